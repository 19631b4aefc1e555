//! Reversible Minkowski norms on m and their fundamental tensors
//! `g_u = ½ Hess(F²)(u)`.
//!
//! Three families are supported: Riemannian norms of an invariant inner
//! product Q, (α,β) norms `F(v) = |v|_Q φ(<v0, v>_Q / |v|_Q)` with an even
//! polynomial φ, and quartic perturbations `F = (q² + ε Σ c_i p_i²)^{1/4}`
//! with `q(v) = vᵀQv`, `p_i(v) = vᵀS_i v`. Any of them can be pulled back by
//! an orthogonal map of m.

use crate::error::{Error, Result};
use crate::homspace::HomogeneousSpace;
use crate::linalg::{self, Mat, Vector};
use crate::par::{self, Exec};

/// Number of seeded directions in a convexity scan.
pub const SCAN_DIRECTIONS: usize = 4096;
const MAX_HALVINGS: usize = 30;

/// Even polynomial `Σ a_k s^k`, degree at most 6.
#[derive(Debug, Clone, PartialEq)]
pub struct EvenPoly {
    coeffs: Vec<f64>,
}

impl EvenPoly {
    /// From coefficients `a_0, a_1, …`; odd coefficients must vanish.
    pub fn new(coeffs: &[f64]) -> Result<EvenPoly> {
        if coeffs.is_empty() || coeffs.len() > 7 {
            return Err(Error::InvalidNorm(format!(
                "phi needs between 1 and 7 coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidNorm("phi has non-finite coefficients".into()));
        }
        if let Some((k, c)) = coeffs.iter().enumerate().find(|(k, c)| k % 2 == 1 && **c != 0.0) {
            return Err(Error::InvalidNorm(format!(
                "phi must be even for a reversible norm (coefficient of s^{k} is {c})"
            )));
        }
        Ok(EvenPoly {
            coeffs: coeffs.to_vec(),
        })
    }

    pub fn constant(c: f64) -> EvenPoly {
        EvenPoly { coeffs: vec![c] }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// `(φ, φ', φ'')` at `s`.
    pub fn eval(&self, s: f64) -> (f64, f64, f64) {
        let mut f = 0.0;
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for c in self.coeffs.iter().rev() {
            d2 = d2 * s + 2.0 * d1;
            d1 = d1 * s + f;
            f = f * s + c;
        }
        (f, d1, d2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    Riemannian,
    AlphaBeta,
    QuarticPerturbed,
    Transformed,
}

impl NormKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::Riemannian => "riemannian",
            NormKind::AlphaBeta => "alpha_beta",
            NormKind::QuarticPerturbed => "quartic_perturbed",
            NormKind::Transformed => "transformed",
        }
    }
}

#[derive(Debug, Clone)]
enum NormData {
    Riemannian {
        q: Mat,
    },
    AlphaBeta {
        q: Mat,
        v0: Vector,
        /// `Q v0`.
        qv0: Vector,
        phi: EvenPoly,
    },
    Quartic {
        q: Mat,
        terms: Vec<Mat>,
        weights: Vec<f64>,
        epsilon: f64,
    },
    Transformed {
        base: Box<MinkowskiNorm>,
        r: Mat,
    },
}

#[derive(Debug, Clone)]
pub struct MinkowskiNorm {
    data: NormData,
    dim: usize,
}

#[derive(Debug, Clone)]
pub struct FundamentalTensor {
    pub u: Vector,
    pub gram: Mat,
}

fn check_spd(q: &Mat, what: &str) -> Result<()> {
    if q.nrows() != q.ncols() {
        return Err(Error::InvalidNorm(format!("{what} is not square")));
    }
    if linalg::asymmetry(q) > 1e-12 * linalg::max_abs(q).max(1.0) {
        return Err(Error::InvalidNorm(format!("{what} is not symmetric")));
    }
    let (min, _) = linalg::min_eigenvalue(q);
    if min <= 0.0 {
        return Err(Error::InvalidNorm(format!(
            "{what} is not positive definite (minimum eigenvalue {min:.3e})"
        )));
    }
    Ok(())
}

impl MinkowskiNorm {
    pub fn riemannian(q: Mat) -> Result<MinkowskiNorm> {
        check_spd(&q, "Q")?;
        let dim = q.nrows();
        Ok(MinkowskiNorm {
            data: NormData::Riemannian { q },
            dim,
        })
    }

    /// `F(v) = |v| φ(<v0, v> / |v|)` with the inner product and norm of Q.
    /// The convexity conditions `φ > 0`, `φ - sφ' > 0` and
    /// `φ - sφ' + (b² - s²)φ'' > 0` on `|s| ≤ b = |v0|` are checked on a grid.
    pub fn alpha_beta(q: Mat, v0: Vector, phi: EvenPoly) -> Result<MinkowskiNorm> {
        check_spd(&q, "Q")?;
        if v0.len() != q.nrows() {
            return Err(Error::DimensionMismatch {
                expected: q.nrows(),
                got: v0.len(),
            });
        }
        let qv0 = &q * &v0;
        let b = v0.dot(&qv0).sqrt();
        if b < 1e-12 {
            return Err(Error::InvalidNorm("v0 must be nonzero".into()));
        }
        let steps = 2000;
        for i in 0..=steps {
            let s = -b + 2.0 * b * i as f64 / steps as f64;
            let (f, d1, d2) = phi.eval(s);
            let c1 = f;
            let c2 = f - s * d1;
            let c3 = f - s * d1 + (b * b - s * s) * d2;
            let worst = c1.min(c2).min(c3);
            if worst <= 0.0 {
                // A Q-unit direction with <v0, v>/|v| = s.
                let d = q.nrows();
                let mut w = Vector::zeros(d);
                for k in 0..d {
                    let mut e = Vector::zeros(d);
                    e[k] = 1.0;
                    let cand = &e - &v0 * (qv0.dot(&e) / (b * b));
                    if cand.norm() > 1e-6 {
                        w = cand;
                        break;
                    }
                }
                let wn = w.dot(&(&q * &w)).sqrt().max(1e-300);
                let t = (1.0 - (s / b).powi(2)).max(0.0).sqrt();
                let dir = &v0 * (s / (b * b)) + w * (t / wn);
                return Err(Error::NotConvex {
                    min_eigenvalue: worst,
                    direction: dir.iter().copied().collect(),
                });
            }
        }
        let dim = q.nrows();
        Ok(MinkowskiNorm {
            data: NormData::AlphaBeta { q, v0, qv0, phi },
            dim,
        })
    }

    /// `F = (q² + ε Σ c_i p_i²)^{1/4}`.
    pub fn quartic(q: Mat, terms: Vec<Mat>, weights: Vec<f64>, epsilon: f64) -> Result<MinkowskiNorm> {
        check_spd(&q, "Q")?;
        if terms.len() != weights.len() {
            return Err(Error::InvalidNorm("one weight per quartic term is required".into()));
        }
        if epsilon < 0.0 || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidNorm("quartic weights must be nonnegative".into()));
        }
        for s in &terms {
            if s.nrows() != q.nrows() || s.ncols() != q.nrows() {
                return Err(Error::DimensionMismatch {
                    expected: q.nrows(),
                    got: s.nrows(),
                });
            }
            if linalg::asymmetry(s) > 1e-12 * linalg::max_abs(s).max(1.0) {
                return Err(Error::InvalidNorm("quartic term is not symmetric".into()));
            }
        }
        let dim = q.nrows();
        Ok(MinkowskiNorm {
            data: NormData::Quartic {
                q,
                terms,
                weights,
                epsilon,
            },
            dim,
        })
    }

    /// `v ↦ base(Rᵀ v)` for an orthogonal `R`.
    pub fn transformed(base: MinkowskiNorm, r: Mat) -> Result<MinkowskiNorm> {
        if r.nrows() != base.dim || r.ncols() != base.dim {
            return Err(Error::DimensionMismatch {
                expected: base.dim,
                got: r.nrows(),
            });
        }
        let orth = linalg::max_abs(&(&r * r.transpose() - Mat::identity(base.dim, base.dim)));
        if orth > 1e-9 {
            return Err(Error::InvalidNorm(format!(
                "transformation is not orthogonal (residual {orth:.3e})"
            )));
        }
        let dim = base.dim;
        Ok(MinkowskiNorm {
            data: NormData::Transformed {
                base: Box::new(base),
                r,
            },
            dim,
        })
    }

    pub fn kind(&self) -> NormKind {
        match self.data {
            NormData::Riemannian { .. } => NormKind::Riemannian,
            NormData::AlphaBeta { .. } => NormKind::AlphaBeta,
            NormData::Quartic { .. } => NormKind::QuarticPerturbed,
            NormData::Transformed { .. } => NormKind::Transformed,
        }
    }

    /// Kind of the underlying norm of a transformed one.
    pub fn base_kind(&self) -> NormKind {
        match &self.data {
            NormData::Transformed { base, .. } => base.base_kind(),
            _ => self.kind(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The quadratic form Q (pulled back for transformed norms).
    pub fn quadratic(&self) -> Mat {
        match &self.data {
            NormData::Riemannian { q } | NormData::AlphaBeta { q, .. } | NormData::Quartic { q, .. } => {
                q.clone()
            }
            NormData::Transformed { base, r } => r * base.quadratic() * r.transpose(),
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match &self.data {
            NormData::Quartic { epsilon, .. } => Some(*epsilon),
            NormData::Transformed { base, .. } => base.epsilon(),
            _ => None,
        }
    }

    pub fn v0(&self) -> Option<Vector> {
        match &self.data {
            NormData::AlphaBeta { v0, .. } => Some(v0.clone()),
            NormData::Transformed { base, r } => base.v0().map(|v| r * v),
            _ => None,
        }
    }

    pub fn phi(&self) -> Option<&EvenPoly> {
        match &self.data {
            NormData::AlphaBeta { phi, .. } => Some(phi),
            NormData::Transformed { base, .. } => base.phi(),
            _ => None,
        }
    }

    fn check_len(&self, v: &Vector) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, v: &Vector) -> f64 {
        match &self.data {
            NormData::Riemannian { q } => v.dot(&(q * v)).max(0.0).sqrt(),
            NormData::AlphaBeta { q, qv0, phi, .. } => {
                let a = v.dot(&(q * v)).max(0.0).sqrt();
                if a == 0.0 {
                    return 0.0;
                }
                a * phi.eval(qv0.dot(v) / a).0
            }
            NormData::Quartic {
                q,
                terms,
                weights,
                epsilon,
            } => {
                let qq = v.dot(&(q * v));
                let p: f64 = terms
                    .iter()
                    .zip(weights)
                    .map(|(s, c)| {
                        let pv = v.dot(&(s * v));
                        c * pv * pv
                    })
                    .sum();
                (qq * qq + epsilon * p).max(0.0).powf(0.25)
            }
            NormData::Transformed { base, r } => base.eval(&(r.transpose() * v)),
        }
    }

    /// Closed-form `½ Hess(F²)` at `u` (no convexity check).
    pub fn gram(&self, u: &Vector) -> Result<Mat> {
        self.check_len(u)?;
        if u.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(match &self.data {
            NormData::Riemannian { q } => q.clone(),
            NormData::AlphaBeta { q, qv0, phi, .. } => {
                let qu = q * u;
                let a = u.dot(&qu).sqrt();
                let s = qv0.dot(u) / a;
                let (f, d1, d2) = phi.eval(s);
                let alpha_i = qu / a;
                let rho = f * (f - s * d1);
                let k = f * d2 + d1 * d1;
                let rho0 = k;
                let rho1 = -(s * k - f * d1);
                let rho2 = s * (s * k - f * d1);
                q * rho
                    + qv0 * qv0.transpose() * rho0
                    + (qv0 * alpha_i.transpose() + &alpha_i * qv0.transpose()) * rho1
                    + &alpha_i * alpha_i.transpose() * rho2
            }
            NormData::Quartic {
                q,
                terms,
                weights,
                epsilon,
            } => {
                let qu = q * u;
                let qq = u.dot(&qu);
                let mut n = qq * qq;
                let mut grad = &qu * (4.0 * qq);
                let mut hess = &qu * qu.transpose() * 8.0 + q * (4.0 * qq);
                for (s, c) in terms.iter().zip(weights) {
                    let su = s * u;
                    let p = u.dot(&su);
                    let w = epsilon * c;
                    n += w * p * p;
                    grad += &su * (4.0 * w * p);
                    hess += (&su * su.transpose() * 2.0 + s * p) * (4.0 * w);
                }
                let sq = n.sqrt();
                hess * (0.25 / sq) - &grad * grad.transpose() * (0.125 / (n * sq))
            }
            NormData::Transformed { base, r } => {
                let inner = base.gram(&(r.transpose() * u))?;
                r * inner * r.transpose()
            }
        })
    }

    /// `½ Hess(F²)` by central differences with one Richardson step. The
    /// base step is `eps^{1/6} |u| * step_scale`.
    pub fn gram_fd(&self, u: &Vector, step_scale: f64) -> Result<Mat> {
        self.check_len(u)?;
        let norm = u.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let h = f64::EPSILON.powf(1.0 / 6.0) * norm * step_scale;
        let d = self.dim;
        let f = |v: &Vector| {
            let x = self.eval(v);
            0.5 * x * x
        };
        let f0 = f(u);
        let hessian = |h: f64| -> Mat {
            let mut out = Mat::zeros(d, d);
            let e = |i: usize| {
                let mut e = Vector::zeros(d);
                e[i] = h;
                e
            };
            for i in 0..d {
                let ei = e(i);
                out[(i, i)] = (f(&(u + &ei * 2.0)) - 2.0 * f0 + f(&(u - &ei * 2.0))) / (4.0 * h * h);
                for j in i + 1..d {
                    let ej = e(j);
                    let v = (f(&(u + &ei + &ej)) - f(&(u + &ei - &ej)) - f(&(u - &ei + &ej))
                        + f(&(u - &ei - &ej)))
                        / (4.0 * h * h);
                    out[(i, j)] = v;
                    out[(j, i)] = v;
                }
            }
            out
        };
        let coarse = hessian(h);
        let fine = hessian(h / 2.0);
        Ok((fine * 4.0 - coarse) / 3.0)
    }

    /// Fundamental tensor at `u`; fails when it is not positive definite.
    pub fn fundamental_tensor(&self, u: &Vector) -> Result<FundamentalTensor> {
        let gram = self.gram(u)?;
        check_tensor(u, gram)
    }

    /// Finite-difference fundamental tensor at `u`.
    pub fn fundamental_tensor_fd(&self, u: &Vector, step_scale: f64) -> Result<FundamentalTensor> {
        let gram = self.gram_fd(u, step_scale)?;
        check_tensor(u, gram)
    }

    /// The inner product `<·,·>_0 = g_u` for `u ⊥_Q v0` of an (α,β) norm.
    pub fn v1_inner_product(&self) -> Option<Mat> {
        match &self.data {
            NormData::AlphaBeta { q, qv0, phi, .. } => {
                let (f, _, d2) = phi.eval(0.0);
                Some(q * (f * f) + qv0 * qv0.transpose() * (f * d2))
            }
            NormData::Transformed { base, r } => base.v1_inner_product().map(|g| r * g * r.transpose()),
            _ => None,
        }
    }

    /// `<v0, v>_Q`, the component that must vanish on V1.
    pub fn beta(&self, v: &Vector) -> Option<f64> {
        match &self.data {
            NormData::AlphaBeta { qv0, .. } => Some(qv0.dot(v)),
            NormData::Transformed { base, r } => base.beta(&(r.transpose() * v)),
            _ => None,
        }
    }

    /// Smallest eigenvalue of `g_u` over seeded unit directions, with the
    /// minimizing direction.
    pub fn convexity_scan(&self, directions: usize, seed: u64, exec: Exec) -> (f64, Vector) {
        let d = self.dim;
        let results = par::map_range(exec, directions, |i| {
            let mut rng = linalg::rng(seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let u = linalg::unit_vector(&mut rng, d);
            let min = match self.gram(&u) {
                Ok(g) => linalg::min_eigenvalue(&g).0,
                Err(_) => f64::NEG_INFINITY,
            };
            (min, u)
        });
        results
            .into_iter()
            .fold((f64::INFINITY, Vector::zeros(d)), |acc, cur| if cur.0 < acc.0 { cur } else { acc })
    }
}

fn check_tensor(u: &Vector, gram: Mat) -> Result<FundamentalTensor> {
    let sym = (&gram + gram.transpose()) * 0.5;
    if sym.clone().cholesky().is_none() {
        let (min, dir) = linalg::min_eigenvalue(&sym);
        return Err(Error::NotConvex {
            min_eigenvalue: min,
            direction: dir.iter().copied().collect(),
        });
    }
    Ok(FundamentalTensor { u: u.clone(), gram: sym })
}

/// Choice of quartic terms for [`NormRecipe::QuarticPerturbed`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuarticTerms {
    /// Random elements of the invariant commutant, operator norm one.
    Random { count: usize },
    /// Projectors onto the summands of the isotropy decomposition; each
    /// must be Ad(H)-invariant.
    Summands,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NormRecipe {
    /// `Q = I + spread * S` for a random invariant `S` of operator norm one,
    /// or the given Q.
    Riemannian { q: Option<Mat>, spread: f64, seed: u64 },
    AlphaBeta {
        phi: Vec<f64>,
        /// Defaults to a random Ad(H)-fixed Q-unit vector.
        v0: Option<Vector>,
        spread: f64,
        seed: u64,
    },
    QuarticPerturbed {
        epsilon: f64,
        terms: QuarticTerms,
        spread: f64,
        seed: u64,
    },
}

impl NormRecipe {
    pub fn kind(&self) -> NormKind {
        match self {
            NormRecipe::Riemannian { .. } => NormKind::Riemannian,
            NormRecipe::AlphaBeta { .. } => NormKind::AlphaBeta,
            NormRecipe::QuarticPerturbed { .. } => NormKind::QuarticPerturbed,
        }
    }
}

/// Random element of the span of `forms`, scaled to operator norm one.
fn random_form(forms: &[Mat], d: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Mat {
    let s = forms
        .iter()
        .fold(Mat::zeros(d, d), |acc, f| acc + f * linalg::gaussian_vector(rng, 1)[0]);
    let (vals, _) = linalg::sorted_symmetric_eigen(&s);
    let op = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if op < 1e-12 {
        Mat::identity(d, d)
    } else {
        s / op
    }
}

/// Largest `|A S - S A|` over the isotropy action.
pub fn invariance_defect(x: &HomogeneousSpace, s: &Mat) -> f64 {
    x.isotropy_action()
        .iter()
        .map(|a| linalg::max_abs(&(s * a - a * s)))
        .fold(0.0, f64::max)
}

fn invariant_q(x: &HomogeneousSpace, spread: f64, seed: u64) -> Mat {
    let d = x.dim_m();
    let forms = x.invariant_forms();
    let mut rng = linalg::rng(seed);
    Mat::identity(d, d) + random_form(&forms, d, &mut rng) * spread
}

/// Builds an Ad(H)-invariant reversible norm on m from a recipe. Quartic
/// strengths are halved until the convexity scan passes.
pub fn make_norm(recipe: &NormRecipe, x: &HomogeneousSpace) -> Result<MinkowskiNorm> {
    make_norm_with(recipe, x, Exec::default())
}

pub fn make_norm_with(recipe: &NormRecipe, x: &HomogeneousSpace, exec: Exec) -> Result<MinkowskiNorm> {
    let d = x.dim_m();
    let tol = 1e-9;
    match recipe {
        NormRecipe::Riemannian { q, spread, seed } => {
            let q = match q {
                Some(q) => {
                    if q.nrows() != d {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            got: q.nrows(),
                        });
                    }
                    let defect = invariance_defect(x, q);
                    if defect > tol {
                        return Err(Error::InvalidNorm(format!(
                            "Q is not Ad(H)-invariant (defect {defect:.3e})"
                        )));
                    }
                    q.clone()
                }
                None => invariant_q(x, *spread, *seed),
            };
            MinkowskiNorm::riemannian(q)
        }
        NormRecipe::AlphaBeta { phi, v0, spread, seed } => {
            let phi = EvenPoly::new(phi)?;
            let q = invariant_q(x, *spread, *seed);
            let v0 = match v0 {
                Some(v) => {
                    if v.len() != d {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            got: v.len(),
                        });
                    }
                    let moved = x
                        .isotropy_action()
                        .iter()
                        .map(|a| (a * v).norm())
                        .fold(0.0, f64::max);
                    if moved > tol * v.norm().max(1.0) {
                        return Err(Error::InvalidNorm(format!(
                            "v0 is not fixed by Ad(H) (residual {moved:.3e})"
                        )));
                    }
                    v.clone()
                }
                None => {
                    let fixed = x.fixed_vectors();
                    if fixed.ncols() == 0 {
                        return Err(Error::InvalidNorm("m has no Ad(H)-fixed vector".into()));
                    }
                    let mut rng = linalg::rng(seed.wrapping_add(1));
                    let v = &fixed * linalg::gaussian_vector(&mut rng, fixed.ncols());
                    let n = v.dot(&(&q * &v)).sqrt();
                    v / n
                }
            };
            let norm = MinkowskiNorm::alpha_beta(q, v0, phi)?;
            let (min, dir) = norm.convexity_scan(SCAN_DIRECTIONS, *seed, exec);
            if min <= 0.0 {
                return Err(Error::NotConvex {
                    min_eigenvalue: min,
                    direction: dir.iter().copied().collect(),
                });
            }
            Ok(norm)
        }
        NormRecipe::QuarticPerturbed {
            epsilon,
            terms,
            spread,
            seed,
        } => {
            let q = invariant_q(x, *spread, *seed);
            let (mats, weights) = match terms {
                QuarticTerms::Random { count } => {
                    let forms = x.invariant_forms();
                    let mut rng = linalg::rng(seed.wrapping_add(2));
                    let mats: Vec<Mat> = (0..*count).map(|_| random_form(&forms, d, &mut rng)).collect();
                    let w = vec![1.0 / (*count).max(1) as f64; *count];
                    (mats, w)
                }
                QuarticTerms::Summands => {
                    let dec = crate::homspace::isotropy_invariant_decomposition(x)?;
                    let mut mats = Vec::new();
                    for s in &dec.summands {
                        let p = &s.basis * s.basis.transpose();
                        let defect = invariance_defect(x, &p);
                        if defect > tol {
                            return Err(Error::InvalidNorm(format!(
                                "summand {} is not Ad(H)-invariant (defect {defect:.3e})",
                                s.label
                            )));
                        }
                        mats.push(p);
                    }
                    let w = vec![1.0; mats.len()];
                    (mats, w)
                }
            };
            let mut eps = *epsilon;
            let mut last = (f64::NEG_INFINITY, Vector::zeros(d));
            for _ in 0..=MAX_HALVINGS {
                let norm = MinkowskiNorm::quartic(q.clone(), mats.clone(), weights.clone(), eps)?;
                let scan = norm.convexity_scan(SCAN_DIRECTIONS, *seed, exec);
                if scan.0 > 0.0 {
                    return Ok(norm);
                }
                last = scan;
                eps *= 0.5;
            }
            Err(Error::NotConvex {
                min_eigenvalue: last.0,
                direction: last.1.iter().copied().collect(),
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct NormReport {
    pub homogeneity: f64,
    pub reversibility: f64,
    pub invariance: f64,
    pub min_eigenvalue: f64,
    pub min_direction: Vector,
    pub samples: usize,
}

/// Sampled residuals of homogeneity, reversibility and Ad(H)-invariance,
/// and the smallest fundamental-tensor eigenvalue over unit directions.
pub fn check_norm_properties(f: &MinkowskiNorm, x: &HomogeneousSpace, samples: usize, seed: u64) -> NormReport {
    let d = f.dim();
    let mut rng = linalg::rng(seed);
    let isos = x.isotropy_samples(samples.clamp(1, 64), seed.wrapping_add(17));
    let mut hom: f64 = 0.0;
    let mut rev: f64 = 0.0;
    let mut inv: f64 = 0.0;
    for i in 0..samples {
        let v = linalg::unit_vector(&mut rng, d);
        let fv = f.eval(&v);
        for lambda in [0.5, 3.0] {
            hom = hom.max((f.eval(&(&v * lambda)) - lambda * fv).abs() / fv);
        }
        rev = rev.max((f.eval(&(-&v)) - fv).abs() / fv);
        let a = &isos[i % isos.len()];
        inv = inv.max((f.eval(&(a * &v)) - fv).abs() / fv);
    }
    let (min, dir) = f.convexity_scan(samples.max(1), seed.wrapping_add(5), Exec::default());
    NormReport {
        homogeneity: hom,
        reversibility: rev,
        invariance: inv,
        min_eigenvalue: min,
        min_direction: dir,
        samples,
    }
}
