//! Real matrix realizations of the classical compact algebras.
//!
//! Complex n×n matrices `A + iB` become the real 2n×2n block matrix
//! `[[A, -B], [B, A]]`. A quaternion `a + bi + cj + dk` is first written as
//! the complex 2×2 block `[[z, w], [-w̄, z̄]]` with `z = a + bi`,
//! `w = c + di`, and the resulting complex 2n×2n matrix is realified again,
//! so sp(n) lives in 4n×4n real matrices. Every realized element is an
//! antisymmetric real matrix.

use crate::linalg::Mat;

/// `[[re, -im], [im, re]]`.
pub fn realify(re: &Mat, im: &Mat) -> Mat {
    let n = re.nrows();
    let mut out = Mat::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(re);
    out.view_mut((n, n), (n, n)).copy_from(re);
    out.view_mut((0, n), (n, n)).copy_from(&(-im));
    out.view_mut((n, 0), (n, n)).copy_from(im);
    out
}

/// Realization of the quaternionic matrix `a + b i + c j + d k`.
pub fn quaternionic(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Mat {
    let n = a.nrows();
    let mut re = Mat::zeros(2 * n, 2 * n);
    let mut im = Mat::zeros(2 * n, 2 * n);
    for r in 0..n {
        for s in 0..n {
            let (z_re, z_im) = (a[(r, s)], b[(r, s)]);
            let (w_re, w_im) = (c[(r, s)], d[(r, s)]);
            // [[z, w], [-conj(w), conj(z)]]
            re[(2 * r, 2 * s)] = z_re;
            im[(2 * r, 2 * s)] = z_im;
            re[(2 * r, 2 * s + 1)] = w_re;
            im[(2 * r, 2 * s + 1)] = w_im;
            re[(2 * r + 1, 2 * s)] = -w_re;
            im[(2 * r + 1, 2 * s)] = w_im;
            re[(2 * r + 1, 2 * s + 1)] = z_re;
            im[(2 * r + 1, 2 * s + 1)] = -z_im;
        }
    }
    realify(&re, &im)
}

fn unit(n: usize, r: usize, s: usize) -> Mat {
    let mut m = Mat::zeros(n, n);
    m[(r, s)] = 1.0;
    m
}

fn antisym(n: usize, r: usize, s: usize) -> Mat {
    unit(n, r, s) - unit(n, s, r)
}

fn sym(n: usize, r: usize, s: usize) -> Mat {
    unit(n, r, s) + unit(n, s, r)
}

/// Spanning set of su(k) acting on the coordinates `idx` of C^n.
pub fn su_block(n: usize, idx: &[usize]) -> Vec<Mat> {
    let zero = Mat::zeros(n, n);
    let mut out = Vec::new();
    for (a, &r) in idx.iter().enumerate() {
        for &s in &idx[a + 1..] {
            out.push(realify(&antisym(n, r, s), &zero));
            out.push(realify(&zero, &sym(n, r, s)));
        }
    }
    for w in idx.windows(2) {
        out.push(realify(&zero, &(unit(n, w[0], w[0]) - unit(n, w[1], w[1]))));
    }
    out
}

/// Spanning set of the complex su(k) (quaternion parts 1 and i only) acting
/// on the quaternionic coordinates `idx` of H^n.
pub fn su_in_sp_block(n: usize, idx: &[usize]) -> Vec<Mat> {
    let zero = Mat::zeros(n, n);
    let mut out = Vec::new();
    for (a, &r) in idx.iter().enumerate() {
        for &s in &idx[a + 1..] {
            out.push(quaternionic(&antisym(n, r, s), &zero, &zero, &zero));
            out.push(quaternionic(&zero, &sym(n, r, s), &zero, &zero));
        }
    }
    for w in idx.windows(2) {
        let d = unit(n, w[0], w[0]) - unit(n, w[1], w[1]);
        out.push(quaternionic(&zero, &d, &zero, &zero));
    }
    out
}

/// Spanning set of sp(k) acting on the quaternionic coordinates `idx` of H^n.
pub fn sp_block(n: usize, idx: &[usize]) -> Vec<Mat> {
    let zero = Mat::zeros(n, n);
    let mut out = Vec::new();
    for (a, &r) in idx.iter().enumerate() {
        for &s in &idx[a + 1..] {
            out.push(quaternionic(&antisym(n, r, s), &zero, &zero, &zero));
            let sy = sym(n, r, s);
            out.push(quaternionic(&zero, &sy, &zero, &zero));
            out.push(quaternionic(&zero, &zero, &sy, &zero));
            out.push(quaternionic(&zero, &zero, &zero, &sy));
        }
    }
    for &r in idx {
        let e = unit(n, r, r);
        out.push(quaternionic(&zero, &e, &zero, &zero));
        out.push(quaternionic(&zero, &zero, &e, &zero));
        out.push(quaternionic(&zero, &zero, &zero, &e));
    }
    out
}

/// Spanning set of so(k) acting on the coordinates `idx` of R^n.
pub fn so_block(n: usize, idx: &[usize]) -> Vec<Mat> {
    let mut out = Vec::new();
    for (a, &r) in idx.iter().enumerate() {
        for &s in &idx[a + 1..] {
            out.push(antisym(n, r, s));
        }
    }
    out
}

/// `i E_kk` in u(n), realified.
pub fn su_torus_generator(n: usize, k: usize) -> Mat {
    realify(&Mat::zeros(n, n), &unit(n, k, k))
}

/// Quaternion `i` at position (k, k) of sp(n).
pub fn sp_torus_generator(n: usize, k: usize) -> Mat {
    let zero = Mat::zeros(n, n);
    quaternionic(&zero, &unit(n, k, k), &zero, &zero)
}

/// Rotation generator of the k-th coordinate plane (2k, 2k+1) of R^n.
pub fn so_torus_generator(n: usize, k: usize) -> Mat {
    antisym(n, 2 * k, 2 * k + 1)
}

/// Realified complex diagonal matrix `diag(exp(i θ_k))`.
pub fn complex_diagonal(phases: &[f64]) -> Mat {
    let n = phases.len();
    let re = Mat::from_diagonal(&nalgebra::DVector::from_iterator(n, phases.iter().map(|t| t.cos())));
    let im = Mat::from_diagonal(&nalgebra::DVector::from_iterator(n, phases.iter().map(|t| t.sin())));
    realify(&re, &im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn realizations_are_antisymmetric() {
        for m in su_block(3, &[0, 1, 2])
            .into_iter()
            .chain(sp_block(2, &[0, 1]))
            .chain(su_in_sp_block(2, &[0, 1]))
        {
            assert!(crate::linalg::max_abs(&(&m + m.transpose())) < 1e-15);
        }
    }

    #[test]
    fn quaternion_units_multiply() {
        // i*j = k in the realization.
        let z = Mat::zeros(1, 1);
        let one = Mat::from_element(1, 1, 1.0);
        let i = quaternionic(&z, &one, &z, &z);
        let j = quaternionic(&z, &z, &one, &z);
        let k = quaternionic(&z, &z, &z, &one);
        assert!(crate::linalg::max_abs(&(&i * &j - &k)) < 1e-15);
        assert!(crate::linalg::max_abs(&(&i * &i + Mat::identity(4, 4))) < 1e-15);
    }
}
