//! Simultaneous block-diagonalization of commuting antisymmetric operators.
//!
//! A commuting family of antisymmetric operators splits a Euclidean space
//! into a common kernel and 2k-dimensional weight spaces on which every
//! operator acts as `w_j * J` for one complex structure `J`. Root planes,
//! isotropy decompositions and rotation speeds are all computed from this.

use nalgebra::{Complex, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector};

#[derive(Debug, Clone)]
pub struct WeightSpace {
    /// Weight on each operator; lexicographically positive representative.
    pub weights: Vec<f64>,
    /// Orthonormal basis (columns in ambient coordinates).
    pub basis: Mat,
    /// Complex structure in the coordinates of `basis` (absent on the zero
    /// weight space). `op_j` restricted to the space equals `weights[j] * J`.
    pub complex_structure: Option<Mat>,
}

impl WeightSpace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.complex_structure.is_none()
    }
}

fn generic_coefficients(k: usize) -> Vec<f64> {
    // Square roots of distinct primes are linearly independent over Q, so no
    // two distinct rational weight vectors collide.
    let mut primes = Vec::new();
    let mut c = 2u64;
    while primes.len() < k {
        if (2..c).take_while(|d| d * d <= c).all(|d| c % d != 0) {
            primes.push(c);
        }
        c += 1;
    }
    primes.iter().map(|p| (*p as f64).sqrt()).collect()
}

/// Sign that makes the first entry above `tol` positive.
pub fn canonical_sign(v: &[f64], tol: f64) -> f64 {
    for x in v {
        if x.abs() > tol {
            return x.signum();
        }
    }
    1.0
}

/// Decomposes `space` (orthonormal columns, invariant under every op) into
/// weight spaces of the commuting antisymmetric `ops`. Spaces with equal
/// weights up to overall sign are merged. `tol` is the relative clustering
/// tolerance.
pub fn weight_spaces(ops: &[Mat], space: &Mat, tol: f64) -> Result<Vec<WeightSpace>> {
    let d = space.ncols();
    if d == 0 {
        return Ok(Vec::new());
    }
    let restricted: Vec<Mat> = ops.iter().map(|a| space.transpose() * a * space).collect();
    let scale = restricted
        .iter()
        .map(linalg::max_abs)
        .fold(1.0, f64::max);
    for (a, r) in ops.iter().zip(&restricted) {
        let leak = linalg::outside_residual(space, &(a * space));
        if leak > 1e-8 * scale {
            return Err(Error::Diagonalization(format!(
                "space is not invariant (leak {leak:.3e})"
            )));
        }
        if linalg::max_abs(&(r + r.transpose())) > 1e-8 * scale {
            return Err(Error::Diagonalization("operator is not antisymmetric".into()));
        }
    }
    if ops.is_empty() {
        return Ok(vec![WeightSpace {
            weights: Vec::new(),
            basis: space.clone(),
            complex_structure: None,
        }]);
    }

    let coeffs = generic_coefficients(restricted.len());
    let combo = restricted
        .iter()
        .zip(&coeffs)
        .fold(Mat::zeros(d, d), |acc, (a, c)| acc + a * *c);
    // i*A is Hermitian with eigenvalues ±λ; eigenvectors x + iy satisfy
    // A x = λ y, A y = -λ x.
    let herm = DMatrix::<Complex<f64>>::from_fn(d, d, |r, c| Complex::new(0.0, combo[(r, c)]));
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let cluster_tol = tol * lmax.max(1.0);

    // Group eigenvalues: zero cluster and positive clusters.
    let mut zero: Vec<usize> = Vec::new();
    let mut positive: Vec<(f64, Vec<usize>)> = Vec::new();
    for &i in &order {
        let l = eig.eigenvalues[i];
        if l.abs() <= cluster_tol.max(1e-9 * lmax.max(1.0)) {
            zero.push(i);
        } else if l > 0.0 {
            match positive.last_mut() {
                Some((last, members)) if (l - *last).abs() <= cluster_tol => {
                    members.push(i);
                    *last = l;
                }
                _ => positive.push((l, vec![i])),
            }
        }
    }

    let real_span = |idx: &[usize]| -> Mat {
        let mut cols = Vec::new();
        for &i in idx {
            let z = eig.eigenvectors.column(i);
            cols.push(Vector::from_iterator(d, z.iter().map(|c| c.re)));
            cols.push(Vector::from_iterator(d, z.iter().map(|c| c.im)));
        }
        linalg::orthonormalize(&cols, d, 1e-6)
    };

    let mut out = Vec::new();
    if !zero.is_empty() {
        let v = real_span(&zero);
        if v.ncols() != zero.len() {
            return Err(Error::Diagonalization(format!(
                "kernel has real dimension {} but multiplicity {}",
                v.ncols(),
                zero.len()
            )));
        }
        for r in &restricted {
            let res = linalg::max_abs(&(r * &v));
            if res > 1e-7 * scale {
                return Err(Error::Diagonalization(format!(
                    "operator does not vanish on the common kernel (residual {res:.3e})"
                )));
            }
        }
        out.push(WeightSpace {
            weights: vec![0.0; ops.len()],
            basis: space * v,
            complex_structure: None,
        });
    }
    for (lambda, members) in positive {
        let v = real_span(&members);
        if v.ncols() != 2 * members.len() {
            return Err(Error::Diagonalization(format!(
                "weight space has real dimension {} for complex multiplicity {}",
                v.ncols(),
                members.len()
            )));
        }
        let k = v.ncols() as f64;
        let mut j = v.transpose() * &combo * &v / lambda;
        let mut weights: Vec<f64> = restricted
            .iter()
            .map(|r| -(&j * (v.transpose() * r * &v)).trace() / k)
            .collect();
        let sign = canonical_sign(&weights, tol * scale);
        if sign < 0.0 {
            j = -j;
            weights.iter_mut().for_each(|w| *w = -*w);
        }
        for (r, w) in restricted.iter().zip(&weights) {
            let res = linalg::max_abs(&(r * &v - &v * (&j * *w)));
            if res > 1e-7 * scale {
                return Err(Error::Diagonalization(format!(
                    "operators are not simultaneously block-diagonal (residual {res:.3e})"
                )));
            }
        }
        out.push(WeightSpace {
            weights,
            basis: space * v,
            complex_structure: Some(j),
        });
    }
    let total: usize = out.iter().map(WeightSpace::dim).sum();
    if total != d {
        return Err(Error::Diagonalization(format!(
            "weight spaces cover {total} of {d} dimensions"
        )));
    }
    Ok(out)
}

/// Descending lexicographic comparison with tolerance.
pub fn lex_desc(a: &[f64], b: &[f64], tol: f64) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > tol {
            return y.total_cmp(x);
        }
    }
    std::cmp::Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot(n: usize, planes: &[(usize, usize, f64)]) -> Mat {
        let mut m = Mat::zeros(n, n);
        for &(a, b, w) in planes {
            m[(b, a)] = w;
            m[(a, b)] = -w;
        }
        m
    }

    #[test]
    fn splits_rotation_planes() {
        let a = rot(5, &[(0, 1, 2.0), (2, 3, -2.0)]);
        let b = rot(5, &[(0, 1, 1.0), (2, 3, 3.0)]);
        let spaces = weight_spaces(&[a, b], &Mat::identity(5, 5), 1e-8).unwrap();
        assert_eq!(spaces.len(), 3);
        assert!(spaces[0].is_zero());
        assert_eq!(spaces[0].dim(), 1);
        let mut w: Vec<Vec<f64>> = spaces[1..].iter().map(|s| s.weights.clone()).collect();
        w.sort_by(|x, y| lex_desc(x, y, 1e-9));
        assert!((w[0][0] - 2.0).abs() < 1e-12 && (w[0][1] - 1.0).abs() < 1e-12);
        assert!((w[1][0] - 2.0).abs() < 1e-12 && (w[1][1] + 3.0).abs() < 1e-12);
    }

    #[test]
    fn merges_equal_weights() {
        let a = rot(4, &[(0, 1, 1.0), (2, 3, 1.0)]);
        let spaces = weight_spaces(&[a], &Mat::identity(4, 4), 1e-8).unwrap();
        assert_eq!(spaces.len(), 1);
        assert_eq!(spaces[0].dim(), 4);
    }
}
