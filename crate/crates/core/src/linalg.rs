//! Small dense linear-algebra helpers on top of nalgebra.
//!
//! Subspaces are represented as matrices with orthonormal columns.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Seeded generator used everywhere randomness is needed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// Uniform direction on the unit sphere of R^n.
pub fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    loop {
        let v = gaussian_vector(rng, n);
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

/// Empty `rows x 0` matrix.
pub fn empty(rows: usize) -> Mat {
    Mat::zeros(rows, 0)
}

/// Orthonormal basis of the span of `vectors`, dropping directions whose
/// residual after projection falls below `tol` times the input norm.
/// Two passes of modified Gram-Schmidt.
pub fn orthonormalize(vectors: &[Vector], rows: usize, tol: f64) -> Mat {
    let mut basis: Vec<Vector> = Vec::new();
    for v in vectors {
        let scale = v.norm();
        if scale == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
        }
        let n = w.norm();
        if n > tol * scale {
            basis.push(w / n);
        }
    }
    if basis.is_empty() {
        return empty(rows);
    }
    Mat::from_columns(&basis)
}

pub fn columns(m: &Mat) -> Vec<Vector> {
    m.column_iter().map(|c| c.into_owned()).collect()
}

/// Orthonormal basis of ker(a): right singular vectors whose singular value
/// is at most `rel_tol` times the largest one (or `abs_floor`, whichever is
/// larger).
pub fn null_space(a: &Mat, rel_tol: f64, abs_floor: f64) -> Mat {
    let n = a.ncols();
    if n == 0 {
        return empty(0);
    }
    if a.nrows() == 0 {
        return Mat::identity(n, n);
    }
    // SVD only returns min(m, n) right vectors; pad so that we get all n.
    let padded;
    let a = if a.nrows() < n {
        let mut p = Mat::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        padded = p;
        &padded
    } else {
        a
    };
    let svd = SVD::new(a.clone(), false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = (rel_tol * smax).max(abs_floor);
    let cols: Vec<Vector> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= cut)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    if cols.is_empty() {
        return empty(n);
    }
    // Re-orthonormalize for hygiene; SVD output is already orthonormal.
    orthonormalize(&cols, n, 1e-8)
}

/// Orthonormal basis of the orthogonal complement of span(basis) in R^n.
pub fn complement(basis: &Mat, n: usize) -> Mat {
    if basis.ncols() == 0 {
        return Mat::identity(n, n);
    }
    let mut cols: Vec<Vector> = columns(basis);
    let k = cols.len();
    for i in 0..n {
        let mut e = Vector::zeros(n);
        e[i] = 1.0;
        cols.push(e);
    }
    let full = orthonormalize(&cols, n, 1e-9);
    let rest: Vec<Vector> = columns(&full).into_iter().skip(k).collect();
    if rest.is_empty() {
        empty(n)
    } else {
        Mat::from_columns(&rest)
    }
}

/// Orthonormal basis of span(a) ∩ span(b) for orthonormal `a`, `b`.
pub fn intersection(a: &Mat, b: &Mat, tol: f64) -> Mat {
    let n = a.nrows();
    if a.ncols() == 0 || b.ncols() == 0 {
        return empty(n);
    }
    // x in span(a) lies in span(b) iff |P_b x| = |x|; the singular values of
    // b^T a are cosines of principal angles.
    let m = b.transpose() * a;
    let svd = SVD::new(m, false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let cols: Vec<Vector> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s >= 1.0 - tol)
        .map(|(i, _)| a * v_t.row(i).transpose())
        .collect();
    orthonormalize(&cols, n, 1e-8)
}

/// Projector residual: largest norm of a column of `x` outside span(basis).
pub fn outside_residual(basis: &Mat, x: &Mat) -> f64 {
    let proj = if basis.ncols() == 0 {
        x.clone()
    } else {
        x - basis * (basis.transpose() * x)
    };
    proj.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn vector_outside(basis: &Mat, x: &Vector) -> Vector {
    if basis.ncols() == 0 {
        x.clone()
    } else {
        x - basis * (basis.transpose() * x)
    }
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues ascending.
pub fn sorted_symmetric_eigen(m: &Mat) -> (Vec<f64>, Mat) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Mat::from_columns(
        &idx
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}

pub fn min_eigenvalue(m: &Mat) -> (f64, Vector) {
    let (vals, vecs) = sorted_symmetric_eigen(m);
    (vals[0], vecs.column(0).into_owned())
}

/// Max absolute entry.
pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Max absolute entry of `m - m^T`.
pub fn asymmetry(m: &Mat) -> f64 {
    max_abs(&(m - m.transpose()))
}

pub fn is_integral(x: f64, tol: f64) -> bool {
    (x - x.round()).abs() <= tol
}

/// Rounds every entry to an integer when all are within `tol` of one.
pub fn to_integers(v: &[f64], tol: f64) -> Option<Vec<i64>> {
    if v.iter().all(|x| is_integral(*x, tol)) {
        Some(v.iter().map(|x| x.round() as i64).collect())
    } else {
        None
    }
}
