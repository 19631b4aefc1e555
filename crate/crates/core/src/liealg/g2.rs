//! g2 as the derivation algebra of the octonions, acting on the imaginary
//! octonions R^7 (basis e1..e7 stored at indices 0..6).

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector};

/// Oriented triples (i, j, k) with e_i e_j = e_k.
const TRIPLES: [(usize, usize, usize); 7] = [
    (1, 2, 3),
    (1, 4, 5),
    (1, 7, 6),
    (2, 4, 6),
    (2, 5, 7),
    (3, 4, 7),
    (3, 6, 5),
];

/// Product of basis octonions e_a e_b as (sign, index), index 0 = 1.
pub fn basis_product(a: usize, b: usize) -> (f64, usize) {
    if a == 0 {
        return (1.0, b);
    }
    if b == 0 {
        return (1.0, a);
    }
    if a == b {
        return (-1.0, 0);
    }
    for &(i, j, k) in &TRIPLES {
        let cyc = [(i, j, k), (j, k, i), (k, i, j)];
        for &(x, y, z) in &cyc {
            if (a, b) == (x, y) {
                return (1.0, z);
            }
            if (a, b) == (y, x) {
                return (-1.0, z);
            }
        }
    }
    unreachable!("every pair of distinct imaginary units lies on one line")
}

pub fn multiply(x: &[f64; 8], y: &[f64; 8]) -> [f64; 8] {
    let mut out = [0.0; 8];
    for a in 0..8 {
        if x[a] == 0.0 {
            continue;
        }
        for b in 0..8 {
            if y[b] == 0.0 {
                continue;
            }
            let (s, c) = basis_product(a, b);
            out[c] += s * x[a] * y[b];
        }
    }
    out
}

fn so7_basis() -> Vec<Mat> {
    let mut out = Vec::new();
    for r in 0..7 {
        for s in r + 1..7 {
            let mut m = Mat::zeros(7, 7);
            m[(r, s)] = 1.0;
            m[(s, r)] = -1.0;
            out.push(m);
        }
    }
    out
}

fn apply(d: &Mat, x: &[f64; 8]) -> [f64; 8] {
    let mut out = [0.0; 8];
    for r in 0..7 {
        let mut acc = 0.0;
        for s in 0..7 {
            acc += d[(r, s)] * x[s + 1];
        }
        out[r + 1] = acc;
    }
    out
}

fn basis_oct(i: usize) -> [f64; 8] {
    let mut e = [0.0; 8];
    e[i] = 1.0;
    e
}

/// Derivation defect D(e_i e_j) - D(e_i) e_j - e_i D(e_j), stacked over all
/// pairs of imaginary units.
fn defect(d: &Mat) -> Vector {
    let mut out = Vec::with_capacity(7 * 7 * 8);
    for i in 1..8 {
        for j in 1..8 {
            let ei = basis_oct(i);
            let ej = basis_oct(j);
            let lhs = apply(d, &multiply(&ei, &ej));
            let a = multiply(&apply(d, &ei), &ej);
            let b = multiply(&ei, &apply(d, &ej));
            for c in 0..8 {
                out.push(lhs[c] - a[c] - b[c]);
            }
        }
    }
    Vector::from_vec(out)
}

/// Spanning set (14 matrices) of Der(O) ⊂ so(7).
pub fn derivation_basis() -> Result<Vec<Mat>> {
    let so7 = so7_basis();
    let cols: Vec<Vector> = so7.iter().map(defect).collect();
    let system = Mat::from_columns(&cols);
    let kernel = linalg::null_space(&system, 1e-12, 1e-12);
    if kernel.ncols() != 14 {
        return Err(Error::UnsupportedAlgebra(format!(
            "octonion derivation algebra has dimension {}",
            kernel.ncols()
        )));
    }
    Ok(kernel
        .column_iter()
        .map(|c| {
            so7.iter()
                .zip(c.iter())
                .fold(Mat::zeros(7, 7), |acc, (b, w)| acc + b * *w)
        })
        .collect())
}

/// Two torus generators of g2 with integral weights. They are the rotations
/// of the three planes (f, e1 f) paired by left multiplication with e1,
/// combined so that the total angle vanishes: `T1 = R1 - R3`, `T2 = R2 - R3`.
pub fn torus_generators() -> Result<Vec<Mat>> {
    let mut rotations = Vec::new();
    for f in [2usize, 4, 7] {
        let (s, g) = basis_product(1, f);
        let mut r = Mat::zeros(7, 7);
        // R f = s e_g, R (s e_g) = -f
        r[(g - 1, f - 1)] = s;
        r[(f - 1, g - 1)] = -s;
        rotations.push(r);
    }
    let cols: Vec<Vector> = rotations.iter().map(defect).collect();
    let system = Mat::from_columns(&cols);
    let kernel = linalg::null_space(&system, 1e-12, 1e-12);
    if kernel.ncols() != 2 {
        return Err(Error::UnsupportedAlgebra(
            "g2 torus is not a codimension-one subspace of the so(7) torus".into(),
        ));
    }
    let normal = linalg::complement(&kernel, 3);
    let n = normal.column(0);
    if (n[0].abs() - n[1].abs()).abs() > 1e-9 || (n[0].abs() - n[2].abs()).abs() > 1e-9 {
        return Err(Error::UnsupportedAlgebra("unexpected g2 torus constraint".into()));
    }
    for (k, r) in rotations.iter_mut().enumerate() {
        if n[k] < 0.0 {
            *r = -r.clone();
        }
    }
    Ok(vec![&rotations[0] - &rotations[2], &rotations[1] - &rotations[2]])
}
