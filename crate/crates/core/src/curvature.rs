//! Flag curvature of commuting flags on a homogeneous Finsler space.
//!
//! For linearly independent `u, v ∈ m` with `[u, v] = 0` and
//! `g_u([u, m]_m, u) = 0` the flag curvature is
//! `K(u, u∧v) = g_u(U, U) / (g_u(u,u) g_u(v,v) - g_u(u,v)²)` where
//! `g_u(U, w) = ½ (g_u([w,u]_m, v) + g_u([w,v]_m, u))` for all `w ∈ m`.

use crate::error::{Error, Result};
use crate::homspace::HomogeneousSpace;
use crate::linalg::{Mat, Vector};
use crate::minkowski::MinkowskiNorm;
use crate::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    ZeroFlag,
    /// |K| is below tolerance but the zero conditions are not.
    ZeroUncertified,
    Positive,
    Negative,
    PreconditionsFailed,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ZeroFlag => "zero_flag",
            Verdict::ZeroUncertified => "zero_uncertified",
            Verdict::Positive => "positive",
            Verdict::Negative => "negative",
            Verdict::PreconditionsFailed => "preconditions_failed",
        }
    }
}

/// How the fundamental tensor is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TensorMethod {
    ClosedForm,
    FiniteDifference { step_scale: f64 },
}

fn tensor(f: &MinkowskiNorm, u: &Vector, method: TensorMethod) -> Result<Mat> {
    Ok(match method {
        TensorMethod::ClosedForm => f.fundamental_tensor(u)?.gram,
        TensorMethod::FiniteDifference { step_scale } => f.fundamental_tensor_fd(u, step_scale)?.gram,
    })
}

#[derive(Debug, Clone)]
pub struct FlagCertificate {
    pub u: Vector,
    pub v: Vector,
    /// `|[u, v]|_bi / (|u| |v|)`, full bracket in g.
    pub commutator_residual: f64,
    /// The three zero conditions, relative to `|u|²`, `|u||v|`, `|u||v|`.
    pub zero_residuals: [f64; 3],
    pub u_vector: Option<Vector>,
    /// Back-substitution residual of the U solve.
    pub solver_residual: Option<f64>,
    pub curvature: Option<f64>,
    pub verdict: Verdict,
    /// Why the preconditions failed, when they did.
    pub failure: Option<String>,
}

impl FlagCertificate {
    pub fn is_zero_flag(&self) -> bool {
        self.verdict == Verdict::ZeroFlag
    }

    pub fn max_zero_residual(&self) -> f64 {
        self.zero_residuals.iter().copied().fold(0.0, f64::max)
    }
}

fn check_vectors(x: &HomogeneousSpace, u: &Vector, v: &Vector) -> Result<()> {
    for w in [u, v] {
        if w.len() != x.dim_m() {
            return Err(Error::DimensionMismatch {
                expected: x.dim_m(),
                got: w.len(),
            });
        }
    }
    if u.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(())
}

/// `½ (g(ad_m(u)ᵀ) …)`: the right-hand side of the U equation on the basis.
fn u_rhs(x: &HomogeneousSpace, gram: &Mat, u: &Vector, v: &Vector) -> Vector {
    // [w, u]_m = -ad_m(u) w
    let au = x.ad_m(u);
    let av = x.ad_m(v);
    -(au.transpose() * (gram * v) + av.transpose() * (gram * u)) * 0.5
}

fn solve_u(x: &HomogeneousSpace, gram: &Mat, u: &Vector, v: &Vector) -> Result<Vector> {
    let rhs = u_rhs(x, gram, u, v);
    let chol = gram.clone().cholesky().ok_or_else(|| {
        let (min, dir) = crate::linalg::min_eigenvalue(gram);
        Error::NotConvex {
            min_eigenvalue: min,
            direction: dir.iter().copied().collect(),
        }
    })?;
    Ok(chol.solve(&rhs))
}

/// The U-tensor `U(u, v)` at base point `u`.
pub fn u_tensor(x: &HomogeneousSpace, f: &MinkowskiNorm, u: &Vector, v: &Vector) -> Result<Vector> {
    check_vectors(x, u, v)?;
    let gram = f.fundamental_tensor(u)?.gram;
    solve_u(x, &gram, u, v)
}

/// Residual of the defining relation of U, re-evaluated basis vector by
/// basis vector through explicit brackets.
pub fn u_solver_residual(x: &HomogeneousSpace, gram: &Mat, u: &Vector, v: &Vector, big_u: &Vector) -> Result<f64> {
    let d = x.dim_m();
    let gu = gram * u;
    let gv = gram * v;
    let gbu = gram * big_u;
    let scale = (u.norm() * v.norm() * crate::linalg::max_abs(gram)).max(1e-300);
    let mut worst: f64 = 0.0;
    for i in 0..d {
        let mut w = Vector::zeros(d);
        w[i] = 1.0;
        let wu = x.bracket_m(&w, u)?;
        let wv = x.bracket_m(&w, v)?;
        let rhs = 0.5 * (wu.dot(&gv) + wv.dot(&gu));
        worst = worst.max((gbu[i] - rhs).abs() / scale);
    }
    Ok(worst)
}

fn residuals(x: &HomogeneousSpace, gram: &Mat, u: &Vector, v: &Vector) -> [f64; 3] {
    let nu = u.norm();
    let nv = v.norm().max(1e-300);
    let au = x.ad_m(u);
    let av = x.ad_m(v);
    let gu = gram * u;
    let gv = gram * v;
    let inf = |w: Vector| w.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    [
        inf(au.transpose() * &gu) / (nu * nu),
        inf(au.transpose() * &gv) / (nu * nv),
        inf(av.transpose() * &gu) / (nu * nv),
    ]
}

/// Maxima over the m-basis of `|g_u([w,u]_m,u)|`, `|g_u([w,u]_m,v)|` and
/// `|g_u([w,v]_m,u)|`, relative to `|u|²`, `|u||v|`, `|u||v|`.
pub fn zero_conditions_residual(x: &HomogeneousSpace, f: &MinkowskiNorm, u: &Vector, v: &Vector) -> Result<[f64; 3]> {
    check_vectors(x, u, v)?;
    let gram = f.fundamental_tensor(u)?.gram;
    Ok(residuals(x, &gram, u, v))
}

pub fn flag_curvature(x: &HomogeneousSpace, f: &MinkowskiNorm, u: &Vector, v: &Vector) -> Result<FlagCertificate> {
    flag_curvature_with(x, f, u, v, TensorMethod::ClosedForm, &Tolerances::default())
}

/// Certificate for the flag `(u, u∧v)`. Violated preconditions give the
/// verdict `PreconditionsFailed` rather than an error.
pub fn flag_curvature_with(
    x: &HomogeneousSpace,
    f: &MinkowskiNorm,
    u: &Vector,
    v: &Vector,
    method: TensorMethod,
    tol: &Tolerances,
) -> Result<FlagCertificate> {
    check_vectors(x, u, v)?;
    let gram = tensor(f, u, method)?;
    let nu = u.norm();
    let nv = v.norm();
    let commutator_residual = if nv == 0.0 {
        0.0
    } else {
        x.bracket(u, v)?.norm() / (nu * nv)
    };
    let zero_residuals = residuals(x, &gram, u, v);
    let mut cert = FlagCertificate {
        u: u.clone(),
        v: v.clone(),
        commutator_residual,
        zero_residuals,
        u_vector: None,
        solver_residual: None,
        curvature: None,
        verdict: Verdict::PreconditionsFailed,
        failure: None,
    };
    let guu = u.dot(&(&gram * u));
    let gvv = v.dot(&(&gram * v));
    let guv = u.dot(&(&gram * v));
    let denom = guu * gvv - guv * guv;
    if nv == 0.0 || denom <= tol.degenerate * guu * gvv {
        cert.failure = Some(format!(
            "u and v are linearly dependent (relative determinant {:.3e})",
            if guu * gvv > 0.0 { denom / (guu * gvv) } else { 0.0 }
        ));
        return Ok(cert);
    }
    if commutator_residual > tol.precondition {
        cert.failure = Some(format!("[u, v] != 0 (residual {commutator_residual:.3e})"));
        return Ok(cert);
    }
    if zero_residuals[0] > tol.precondition {
        cert.failure = Some(format!(
            "g_u([u, m]_m, u) != 0 (residual {:.3e})",
            zero_residuals[0]
        ));
        return Ok(cert);
    }
    let big_u = solve_u(x, &gram, u, v)?;
    let k = big_u.dot(&(&gram * &big_u)) / denom;
    cert.solver_residual = Some(u_solver_residual(x, &gram, u, v, &big_u)?);
    cert.u_vector = Some(big_u);
    cert.curvature = Some(k);
    let certified = zero_residuals.iter().all(|r| *r < tol.precondition);
    cert.verdict = if k.abs() < tol.zero_flag {
        if certified {
            Verdict::ZeroFlag
        } else {
            Verdict::ZeroUncertified
        }
    } else if k > 0.0 {
        Verdict::Positive
    } else {
        Verdict::Negative
    };
    Ok(cert)
}

/// `(K^F, K^0)` for an (α,β) norm and the Riemannian metric `<·,·>_0` it
/// induces on V1. Both u and v must lie in V1.
pub fn alpha_beta_comparison(
    x: &HomogeneousSpace,
    f: &MinkowskiNorm,
    u: &Vector,
    v: &Vector,
) -> Result<(FlagCertificate, FlagCertificate)> {
    check_vectors(x, u, v)?;
    let g0 = f
        .v1_inner_product()
        .ok_or_else(|| Error::InvalidNorm("an (alpha, beta) norm is required".into()))?;
    let b = f.quadratic();
    for w in [u, v] {
        let beta = f.beta(w).expect("alpha-beta norm");
        let len = w.dot(&(&b * w)).sqrt();
        if beta.abs() > 1e-8 * len.max(1e-300) {
            return Err(Error::NotInV1(beta / len.max(1e-300)));
        }
    }
    let kf = flag_curvature(x, f, u, v)?;
    if kf.zero_residuals[0] > Tolerances::default().precondition {
        return Err(Error::Constraint(format!(
            "g_u([u, m], u) != 0 (residual {:.3e})",
            kf.zero_residuals[0]
        )));
    }
    let riem = MinkowskiNorm::riemannian(g0)?;
    let k0 = flag_curvature(x, &riem, u, v)?;
    Ok((kf, k0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homspace::{Piece, SubalgebraSpec};
    use crate::liealg::{Family, LieAlgebra};
    use crate::linalg;
    use crate::minkowski::{make_norm, NormRecipe, QuarticTerms};
    use std::sync::Arc;

    fn full(f: Family, n: usize) -> HomogeneousSpace {
        let g = Arc::new(LieAlgebra::build(f, n).unwrap());
        HomogeneousSpace::build(g, SubalgebraSpec::default()).unwrap()
    }

    #[test]
    fn biinvariant_metric_has_vanishing_u() {
        let x = full(Family::Su, 3);
        let f = MinkowskiNorm::riemannian(Mat::identity(8, 8)).unwrap();
        let mut rng = linalg::rng(1);
        let u = linalg::gaussian_vector(&mut rng, 8);
        let v = linalg::gaussian_vector(&mut rng, 8);
        assert!(u_tensor(&x, &f, &u, &v).unwrap().norm() < 1e-12);
        // Two elements of the diagonal torus commute.
        let datum = x.g().root_datum().unwrap();
        let t = &datum.cartan_basis;
        let u = t.column(0).into_owned();
        let v = t.column(1).into_owned();
        let c = flag_curvature(&x, &f, &u, &v).unwrap();
        assert_eq!(c.verdict, Verdict::ZeroFlag);
        assert!(c.curvature.unwrap().abs() < 1e-12);
    }

    #[test]
    fn noncommuting_pair_fails_preconditions() {
        let x = full(Family::Su, 2);
        let f = MinkowskiNorm::riemannian(Mat::identity(3, 3)).unwrap();
        let e = |i: usize| {
            let mut v = Vector::zeros(3);
            v[i] = 1.0;
            v
        };
        let c = flag_curvature(&x, &f, &e(0), &e(1)).unwrap();
        assert_eq!(c.verdict, Verdict::PreconditionsFailed);
        assert!(c.curvature.is_none());
        let c = flag_curvature(&x, &f, &e(0), &(e(0) * 2.0)).unwrap();
        assert_eq!(c.verdict, Verdict::PreconditionsFailed);
    }

    #[test]
    fn u_tensor_is_symmetric_in_arguments() {
        let g = Arc::new(LieAlgebra::build(Family::Sp, 2).unwrap());
        let x = HomogeneousSpace::build(g, SubalgebraSpec::new(vec![Piece::Circle { weights: vec![2, 1] }])).unwrap();
        let f = make_norm(
            &NormRecipe::QuarticPerturbed {
                epsilon: 0.1,
                terms: QuarticTerms::Random { count: 2 },
                spread: 0.25,
                seed: 4,
            },
            &x,
        )
        .unwrap();
        let mut rng = linalg::rng(8);
        let u = linalg::gaussian_vector(&mut rng, x.dim_m());
        let v = linalg::gaussian_vector(&mut rng, x.dim_m());
        // Same base point u, arguments swapped in the defining relation.
        let gram = f.fundamental_tensor(&u).unwrap().gram;
        let a = solve_u(&x, &gram, &u, &v).unwrap();
        let b = solve_u(&x, &gram, &v, &u).unwrap();
        assert!((a - &b).norm() < 1e-12 * b.norm().max(1.0));
        let r = u_solver_residual(&x, &gram, &u, &v, &solve_u(&x, &gram, &u, &v).unwrap()).unwrap();
        assert!(r < 1e-12);
    }
}
