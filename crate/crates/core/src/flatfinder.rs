//! Zero-curvature flags: the five worked constructions, their bracket
//! closure claims, extremal unit vectors and a seeded generic search.

use std::sync::Arc;

use crate::curvature::{self, FlagCertificate, TensorMethod, Verdict};
use crate::error::{Error, Result};
use crate::homspace::{self, BlockFamily, HomogeneousSpace, Piece, SubalgebraSpec};
use crate::liealg::{Family, LieAlgebra, RootPlane};
use crate::linalg::{self, Mat, Vector};
use crate::minkowski::MinkowskiNorm;
use crate::par::{self, Exec};
use crate::Tolerances;

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExampleParams {
    pub p: i64,
    pub q: i64,
}

impl ExampleParams {
    /// Defaults used when an example takes parameters: (p, q) = (2, 1).
    pub fn default_for(id: u8) -> ExampleParams {
        let _ = id;
        ExampleParams { p: 2, q: 1 }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Checks the parameter constraints of an example. Returns notes to echo
/// into reports.
pub fn check_example_params(id: u8, params: &ExampleParams) -> Result<Vec<String>> {
    let ExampleParams { p, q } = *params;
    let mut notes = Vec::new();
    match id {
        1 => {
            if gcd(p, q) != 1 {
                return Err(Error::Constraint(format!("gcd(p, q) = 1 (got gcd({p}, {q}) = {})", gcd(p, q))));
            }
            if p + q <= 0 {
                return Err(Error::Constraint(format!("p + q > 0 (got {})", p + q)));
            }
            if p < q {
                return Err(Error::Constraint(format!("p >= q (got p = {p}, q = {q})")));
            }
            for bad in [(1, 0), (1, 1), (1, -1), (3, -1)] {
                if (p, q) == bad {
                    return Err(Error::Constraint(format!(
                        "(p, q) not in {{(1,0), (1,1), (1,-1), (3,-1)}} (got {bad:?})"
                    )));
                }
            }
            notes.push(
                "excluded parameters are the union of two published lists; (1,0) appears in only one of them"
                    .into(),
            );
        }
        3 => {
            if gcd(p, q) != 1 {
                return Err(Error::Constraint(format!("gcd(p, q) = 1 (got gcd({p}, {q}) = {})", gcd(p, q))));
            }
            if !(p > q && q > 0) {
                return Err(Error::Constraint(format!("p > q > 0 (got p = {p}, q = {q})")));
            }
            if (p, q) == (3, 1) {
                return Err(Error::Constraint("(p, q) != (3, 1)".into()));
            }
        }
        2 | 4 | 5 => {}
        other => return Err(Error::Constraint(format!("example id must be 1..=5 (got {other})"))),
    }
    Ok(notes)
}

fn g2_gammas(g: &LieAlgebra) -> Result<[Vec<i64>; 6]> {
    let datum = g
        .root_datum()
        .ok_or_else(|| Error::TorusAlignment("g2 has no standard torus".into()))?;
    let min_len = datum
        .planes
        .iter()
        .map(RootPlane::length_sq)
        .fold(f64::INFINITY, f64::min);
    let ints: Vec<(Vec<i64>, bool)> = datum
        .planes
        .iter()
        .map(|p| {
            let r = p.integral.clone().ok_or_else(|| Error::OffLattice("g2 root".into()))?;
            Ok((r, (p.length_sq() - min_len).abs() < 1e-8 * min_len))
        })
        .collect::<Result<_>>()?;
    let is_root = |r: &[i64]| datum.find(r).is_some();
    let add = |a: &[i64], ka: i64, b: &[i64], kb: i64| -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| ka * x + kb * y).collect()
    };
    let g1 = ints
        .iter()
        .find(|(_, short)| *short)
        .map(|(r, _)| r.clone())
        .ok_or_else(|| Error::Diagonalization("no short root".into()))?;
    for (r, short) in &ints {
        if *short {
            continue;
        }
        for sign in [1i64, -1] {
            let g2: Vec<i64> = r.iter().map(|x| sign * x).collect();
            let g3 = add(&g1, 1, &g2, 1);
            let g4 = add(&g1, 2, &g2, 1);
            let g5 = add(&g1, 3, &g2, 1);
            let g6 = add(&g1, 3, &g2, 2);
            if is_root(&g3) && is_root(&g4) && is_root(&g5) && is_root(&g6) {
                return Ok([g1.clone(), g2, g3, g4, g5, g6]);
            }
        }
    }
    Err(Error::Diagonalization("no long root completes the g2 chain".into()))
}

/// The homogeneous space of an example.
pub fn example_space(id: u8, params: &ExampleParams) -> Result<HomogeneousSpace> {
    check_example_params(id, params)?;
    example_space_unchecked(id, params)
}

fn example_space_unchecked(id: u8, params: &ExampleParams) -> Result<HomogeneousSpace> {
    let ExampleParams { p, q } = *params;
    let su2_12 = Piece::Block {
        family: BlockFamily::Su,
        indices: vec![0, 1],
    };
    let (family, n, pieces) = match id {
        1 => (
            Family::Su,
            4,
            vec![
                su2_12,
                Piece::Circle {
                    weights: vec![p + q, p + q, -2 * p, -2 * q],
                },
            ],
        ),
        2 => (
            Family::Su,
            4,
            vec![
                su2_12,
                Piece::Circle {
                    weights: vec![1, 1, -1, -1],
                },
            ],
        ),
        3 => (Family::Sp, 2, vec![Piece::Circle { weights: vec![p, q] }]),
        4 => (
            Family::Sp,
            3,
            vec![
                Piece::Sp1Block { index: 2 },
                Piece::Circle {
                    weights: vec![1, 3, 0],
                },
            ],
        ),
        5 => {
            let g = LieAlgebra::build(Family::G2, 0)?;
            let gammas = g2_gammas(&g)?;
            let g = Arc::new(g);
            return HomogeneousSpace::build(
                g,
                SubalgebraSpec::new(vec![Piece::RootSu2 {
                    root: gammas[0].clone(),
                }]),
            );
        }
        other => return Err(Error::Constraint(format!("example id must be 1..=5 (got {other})"))),
    };
    let g = Arc::new(LieAlgebra::build(family, n)?);
    HomogeneousSpace::build(g, SubalgebraSpec::new(pieces))
}

/// Which vector of the flag a closure claim is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimElement {
    U,
    V,
}

#[derive(Debug, Clone)]
pub struct ClosureClaim {
    pub label: String,
    pub element: ClaimElement,
    /// Orthonormal basis (m-coordinates) of the bracketed subspace.
    pub source: Mat,
    /// Orthonormal basis (m-coordinates) of the claimed target.
    pub target: Mat,
    /// Whether the claim is stated as such in the construction; the others
    /// are the weaker inclusions the zero conditions actually need.
    pub stated: bool,
}

#[derive(Debug, Clone)]
pub struct ClaimResult {
    pub label: String,
    pub residual: f64,
    pub passed: bool,
    pub stated: bool,
}

/// Largest `|[x, w]_m|` component outside `target` over the orthonormal
/// basis `w` of `source`, relative to `|x|`.
pub fn closure_residual(x: &HomogeneousSpace, elt: &Vector, source: &Mat, target: &Mat) -> Result<f64> {
    let a = x.ad_m(elt);
    let images = a * source;
    Ok(linalg::outside_residual(target, &images) / elt.norm().max(1e-300))
}

/// Evaluates closure claims at the closure tolerance.
pub fn verify_closure_claims(
    x: &HomogeneousSpace,
    claims: &[ClosureClaim],
    u: &Vector,
    v: &Vector,
    tol: &Tolerances,
) -> Result<Vec<ClaimResult>> {
    claims
        .iter()
        .map(|c| {
            let elt = match c.element {
                ClaimElement::U => u,
                ClaimElement::V => v,
            };
            let residual = closure_residual(x, elt, &c.source, &c.target)?;
            Ok(ClaimResult {
                label: c.label.clone(),
                residual,
                passed: residual < tol.closure,
                stated: c.stated,
            })
        })
        .collect()
}

/// Block action of an isotropy element on one summand.
#[derive(Debug, Clone)]
pub struct BlockAction {
    pub label: String,
    pub dim: usize,
    pub expected: String,
    /// Distance to the expected normal form in suitably oriented root-plane bases.
    pub residual: f64,
    /// Eigenvalues (re, im) of the restricted action, sorted.
    pub eigenvalues: Vec<(f64, f64)>,
}

/// An isotropy element `exp(angle Σ w_k T_k)` used by a construction.
#[derive(Debug, Clone)]
pub struct SymmetryReport {
    pub weights: Vec<f64>,
    pub angle: f64,
    /// `|Ad(g) u + u| / |u|`.
    pub flips_u: f64,
    /// Largest change of F over sampled vectors under Ad(g).
    pub norm_invariance: f64,
    /// `|Ad(g)ᵀ g_{Ad(g)u} Ad(g) - g_u|`.
    pub preserves_tensor: f64,
    pub blocks: Vec<BlockAction>,
}

#[derive(Debug, Clone)]
pub struct Extremal {
    pub u: Vector,
    /// `max |g_u(u, w)|` over bi-unit w in the subspace, bi-orthogonal to u.
    pub stationarity: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct Rotation {
    /// `Ad(k)` on m.
    pub matrix: Mat,
    /// Component of the rotated vector outside the target plane (relative).
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct ExampleFlat {
    pub id: u8,
    pub params: ExampleParams,
    pub space: HomogeneousSpace,
    /// The norm the flag is certified for (pulled back when the
    /// construction moves the metric).
    pub norm: MinkowskiNorm,
    pub u: Vector,
    pub v: Vector,
    pub m_prime: Option<Mat>,
    pub claims: Vec<ClosureClaim>,
    pub extremal: Option<Extremal>,
    pub rotation: Option<Rotation>,
    pub symmetry: Option<SymmetryReport>,
    pub notes: Vec<String>,
}

fn plane<'a>(x: &'a HomogeneousSpace, root: &[i64]) -> Result<&'a RootPlane> {
    x.g()
        .root_datum()
        .and_then(|d| d.plane(root))
        .ok_or_else(|| Error::Constraint(format!("{root:?} is not a root of {}", x.g().label())))
}

/// Root plane as an orthonormal m-basis; fails if it is not in m.
fn plane_in_m(x: &HomogeneousSpace, root: &[i64]) -> Result<Mat> {
    let p = plane(x, root)?;
    let b = p.basis();
    let leak = linalg::outside_residual(x.m_basis(), &b);
    if leak > 1e-9 {
        return Err(Error::Constraint(format!("root plane {root:?} is not contained in m")));
    }
    Ok(x.m_basis().transpose() * b)
}

/// `t ∩ m` in m-coordinates for the standard torus.
fn torus_in_m(x: &HomogeneousSpace) -> Result<Mat> {
    let datum = x
        .g()
        .root_datum()
        .ok_or_else(|| Error::TorusAlignment("no standard torus".into()))?;
    let t = &datum.cartan_basis;
    let inter = linalg::intersection(t, x.m_basis(), 1e-9);
    Ok(x.subspace_to_m(&inter))
}

/// `[u, t]` for the standard torus, in m-coordinates.
fn bracket_with_torus(x: &HomogeneousSpace, u: &Vector) -> Result<Mat> {
    let datum = x
        .g()
        .root_datum()
        .ok_or_else(|| Error::TorusAlignment("no standard torus".into()))?;
    let ug = x.to_g(u);
    let cols: Vec<Vector> = datum
        .cartan_basis
        .column_iter()
        .map(|t| x.g().bracket(&ug, &t.into_owned()).map(|b| x.to_m(&b)))
        .collect::<Result<_>>()?;
    Ok(linalg::orthonormalize(&cols, x.dim_m(), 1e-9))
}

fn span(parts: &[&Mat], d: usize) -> Mat {
    let cols: Vec<Vector> = parts.iter().flat_map(|m| linalg::columns(m)).collect();
    linalg::orthonormalize(&cols, d, 1e-9)
}

fn in_plane(basis: &Mat, angle: f64, scale: f64) -> Vector {
    (basis.column(0) * angle.cos() + basis.column(1) * angle.sin()) * scale
}

fn summand(dec: &homspace::InvariantDecomposition, label: &str) -> Result<Mat> {
    dec.find(label)
        .map(|s| s.basis.clone())
        .ok_or_else(|| Error::Diagonalization(format!("missing summand {label}")))
}

/// Symmetry check for `g = exp(angle Σ w_k T_k)`.
fn symmetry_report(
    x: &HomogeneousSpace,
    f: &MinkowskiNorm,
    u: &Vector,
    weights: &[f64],
    angle: f64,
    seed: u64,
) -> Result<SymmetryReport> {
    let elt = x.g().torus_element(weights, angle)?;
    let a = x.adjoint_on_m(&elt)?;
    let au = &a * u;
    let flips_u = (&au + u).norm() / u.norm();
    let mut rng = linalg::rng(seed);
    let mut inv: f64 = 0.0;
    for _ in 0..64 {
        let w = linalg::gaussian_vector(&mut rng, x.dim_m());
        let fw = f.eval(&w);
        inv = inv.max((f.eval(&(&a * &w)) - fw).abs() / fw);
    }
    let g0 = f.gram(u)?;
    let g1 = f.gram(&au)?;
    let preserves_tensor = linalg::max_abs(&(a.transpose() * g1 * &a - g0));
    Ok(SymmetryReport {
        weights: weights.to_vec(),
        angle,
        flips_u,
        norm_invariance: inv,
        preserves_tensor,
        blocks: Vec::new(),
    })
}

fn sorted_eigenvalues(m: &Mat) -> Vec<(f64, f64)> {
    let mut ev: Vec<(f64, f64)> = m
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| (z.re, z.im))
        .collect();
    ev.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    ev
}

/// Minimizes F on the bi-unit sphere of `subspace` (equivalently maximizes
/// the biinvariant length among F-unit vectors) from seeded starts.
pub fn extremal_unit_vector(f: &MinkowskiNorm, subspace: &Mat, seed: u64) -> Result<Extremal> {
    let k = subspace.ncols();
    if k == 0 {
        return Err(Error::Constraint("subspace must be nonzero".into()));
    }
    let starts = 8;
    let max_iter = 20_000;
    let eval = |x: &Vector| f.eval(&(subspace * x));
    let mut best: Option<(f64, Vector, usize)> = None;
    for s in 0..starts {
        let mut rng = linalg::rng(seed.wrapping_add(s as u64 * 7919));
        let mut x = linalg::unit_vector(&mut rng, k);
        let mut fx = eval(&x);
        let mut step = 0.5;
        let mut it = 0;
        while it < max_iter {
            it += 1;
            let v = subspace * &x;
            let grad_full = f.gram(&v)? * &v / fx;
            let gx = subspace.transpose() * grad_full;
            let tang = &gx - &x * x.dot(&gx);
            let tn = tang.norm();
            if tn < 1e-12 * fx {
                break;
            }
            let mut accepted = false;
            for _ in 0..60 {
                let cand = (&x - &tang * step).normalize();
                let fc = eval(&cand);
                if fc <= fx - 1e-4 * step * tn * tn {
                    x = cand;
                    fx = fc;
                    step *= 2.0;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| fx < b.0) {
            best = Some((fx, x, it));
        }
    }
    let (fx, x, iterations) = best.expect("at least one start");
    let u = subspace * &x / fx;
    let stationarity = stationarity(f, subspace, &u)?;
    if stationarity > 1e-8 {
        return Err(Error::NoConvergence {
            iterations,
            best_residual: stationarity,
            best: u.iter().copied().collect(),
        });
    }
    Ok(Extremal {
        u,
        stationarity,
        iterations,
    })
}

/// `max |g_u(u, w)| / F(u)²` over a bi-orthonormal basis w of the part of
/// `subspace` orthogonal to u.
pub fn stationarity(f: &MinkowskiNorm, subspace: &Mat, u: &Vector) -> Result<f64> {
    let gram = f.gram(u)?;
    let un = u.normalize();
    let mut cols = vec![un.clone()];
    cols.extend(linalg::columns(subspace));
    let all = linalg::orthonormalize(&cols, u.len(), 1e-9);
    let fu = f.eval(u);
    let gu = &gram * u;
    Ok(all
        .column_iter()
        .skip(1)
        .map(|w| w.dot(&gu).abs())
        .fold(0.0, f64::max)
        / (fu * fu))
}

/// Finds `k = exp(x)`, `x` in `generators` (g-coordinates, orthonormal),
/// with `Ad(k) u` in the m-subspace `target`, by Levenberg-Marquardt from
/// seeded starts.
pub fn rotate_into(
    x: &HomogeneousSpace,
    generators: &Mat,
    u: &Vector,
    target: &Mat,
    seed: u64,
) -> Result<Rotation> {
    let k = generators.ncols();
    let un = u.norm();
    let residual = |theta: &Vector| -> (Vector, Mat) {
        let a = x.ad_exp_on_m(&(generators * theta));
        let r = linalg::vector_outside(target, &(&a * u)) / un;
        (r, a)
    };
    let mut best: Option<(f64, Mat, usize)> = None;
    let starts = 24;
    for s in 0..starts {
        let mut rng = linalg::rng(seed.wrapping_add(1000 + s as u64));
        let mut theta = if s == 0 {
            Vector::zeros(k)
        } else {
            linalg::gaussian_vector(&mut rng, k) * 1.5
        };
        let (mut r, mut a) = residual(&theta);
        let mut lambda = 1e-3;
        let mut it = 0;
        while it < 200 && r.norm() > 1e-15 {
            it += 1;
            let h = 1e-7;
            let cols: Vec<Vector> = (0..k)
                .map(|i| {
                    let mut e = Vector::zeros(k);
                    e[i] = h;
                    (residual(&(&theta + &e)).0 - residual(&(&theta - &e)).0) / (2.0 * h)
                })
                .collect();
            let jac = Mat::from_columns(&cols);
            let jtj = jac.transpose() * &jac;
            let jtr = jac.transpose() * &r;
            let mut improved = false;
            for _ in 0..20 {
                let lhs = &jtj + Mat::identity(k, k) * (lambda * (1.0 + jtj.diagonal().max()));
                let Some(chol) = lhs.cholesky() else {
                    lambda *= 10.0;
                    continue;
                };
                let step = chol.solve(&jtr);
                let cand = &theta - step;
                let (rc, ac) = residual(&cand);
                if rc.norm() < r.norm() {
                    theta = cand;
                    r = rc;
                    a = ac;
                    lambda = (lambda * 0.3).max(1e-12);
                    improved = true;
                    break;
                }
                lambda *= 10.0;
            }
            if !improved {
                break;
            }
        }
        let rn = r.norm();
        if best.as_ref().is_none_or(|b| rn < b.0) {
            best = Some((rn, a, it));
        }
        if rn < 1e-13 {
            break;
        }
    }
    let (rn, matrix, iterations) = best.expect("at least one start");
    if rn > 1e-11 {
        return Err(Error::NoConvergence {
            iterations,
            best_residual: rn,
            best: Vec::new(),
        });
    }
    Ok(Rotation {
        matrix,
        residual: rn,
        iterations,
    })
}

/// Extremal vector of `f` in `m1`, moved into `target` by the centralizer
/// `m0` of h; returns the pulled-back norm, the moved vector and reports.
fn extremal_and_rotate(
    x: &HomogeneousSpace,
    f: &MinkowskiNorm,
    m1: &Mat,
    m0: &Mat,
    target: &Mat,
    seed: u64,
) -> Result<(MinkowskiNorm, Vector, Extremal, Rotation)> {
    let ext = extremal_unit_vector(f, m1, seed)?;
    let gens = x.m_basis() * m0;
    // m0 must centralize h for the moved norm to stay invariant.
    let mut worst: f64 = 0.0;
    for c in gens.column_iter() {
        for hj in x.h_basis().column_iter() {
            worst = worst.max(x.g().bracket(&c.into_owned(), &hj.into_owned())?.norm());
        }
    }
    if worst > 1e-9 {
        return Err(Error::Constraint(format!(
            "m0 does not centralize h (residual {worst:.3e})"
        )));
    }
    let rot = rotate_into(x, &gens, &ext.u, target, seed)?;
    let moved = &rot.matrix * &ext.u;
    let projected = target * (target.transpose() * &moved);
    let norm = MinkowskiNorm::transformed(f.clone(), rot.matrix.clone())?;
    let u = &projected / norm.eval(&projected);
    let stationarity = stationarity(&norm, &(&rot.matrix * m1), &u)?;
    let ext = Extremal {
        u: u.clone(),
        stationarity,
        iterations: ext.iterations,
    };
    Ok((norm, u, ext, rot))
}

/// Builds the flat flag of example `id` for the invariant norm `f` on
/// `example_space(id, params)`.
pub fn construct_example_flat(
    id: u8,
    params: &ExampleParams,
    x: &HomogeneousSpace,
    f: &MinkowskiNorm,
    seed: u64,
) -> Result<ExampleFlat> {
    let notes = check_example_params(id, params)?;
    if f.dim() != x.dim_m() {
        return Err(Error::DimensionMismatch {
            expected: x.dim_m(),
            got: f.dim(),
        });
    }
    let d = x.dim_m();
    let mut out = ExampleFlat {
        id,
        params: *params,
        space: x.clone(),
        norm: f.clone(),
        u: Vector::zeros(d),
        v: Vector::zeros(d),
        m_prime: None,
        claims: Vec::new(),
        extremal: None,
        rotation: None,
        symmetry: None,
        notes,
    };
    let full = Mat::identity(d, d);
    match id {
        1 => {
            let p13 = plane_in_m(x, &[1, 0, -1, 0])?;
            let p24 = plane_in_m(x, &[0, 1, 0, -1])?;
            let u = in_plane(&p13, 0.3, 1.0);
            let v = in_plane(&p24, 1.1, 1.7);
            let tm = torus_in_m(x)?;
            let ut = bracket_with_torus(x, &u)?;
            let m2 = span(
                &[
                    &plane_in_m(x, &[1, 0, 0, -1])?,
                    &plane_in_m(x, &[0, 1, -1, 0])?,
                    &plane_in_m(x, &[0, 0, 1, -1])?,
                ],
                d,
            );
            let mp = span(&[&tm, &ut, &m2], d);
            out.claims = vec![
                ClosureClaim {
                    label: "[u,m']_m in m'".into(),
                    element: ClaimElement::U,
                    source: mp.clone(),
                    target: mp.clone(),
                    stated: true,
                },
                ClosureClaim {
                    label: "[v,m']_m in m'".into(),
                    element: ClaimElement::V,
                    source: mp.clone(),
                    target: mp.clone(),
                    stated: true,
                },
                ClosureClaim {
                    label: "[v,m']_m in m' + m1".into(),
                    element: ClaimElement::V,
                    source: mp.clone(),
                    target: span(&[&mp, &p24], d),
                    stated: false,
                },
            ];
            out.m_prime = Some(mp);
            out.u = u;
            out.v = v;
        }
        2 => {
            let dec = homspace::isotropy_invariant_decomposition(x)?;
            let m0 = summand(&dec, "m0")?;
            let m1 = summand(&dec, "m1")?;
            let m2 = summand(&dec, "m2")?;
            let p13 = plane_in_m(x, &[1, 0, -1, 0])?;
            let p14 = plane_in_m(x, &[1, 0, 0, -1])?;
            let p24 = plane_in_m(x, &[0, 1, 0, -1])?;
            if linalg::outside_residual(&m1, &span(&[&p13, &p14], d)) > 1e-9 {
                return Err(Error::Diagonalization("m1 is not g13 + g14".into()));
            }
            let (norm, u, ext, rot) = extremal_and_rotate(x, f, &m1, &m0, &p13, seed)?;
            let v = in_plane(&p24, 0.7, 1.3);
            let ut = bracket_with_torus(x, &u)?;
            let mp = span(&[&m0, &ut, &p14], d);
            out.claims = vec![
                ClosureClaim {
                    label: "[u,m]_m in m'".into(),
                    element: ClaimElement::U,
                    source: full.clone(),
                    target: mp.clone(),
                    stated: true,
                },
                ClosureClaim {
                    label: "[v,m]_m in m'".into(),
                    element: ClaimElement::V,
                    source: full.clone(),
                    target: mp.clone(),
                    stated: true,
                },
                ClosureClaim {
                    label: "[v,m]_m in m0 + m2".into(),
                    element: ClaimElement::V,
                    source: full.clone(),
                    target: span(&[&m0, &m2], d),
                    stated: false,
                },
            ];
            out.m_prime = Some(mp);
            out.norm = norm;
            out.u = u;
            out.v = v;
            out.extremal = Some(ext);
            out.rotation = Some(rot);
            out.notes.push(
                "the circle fixing m0 + m1 and rotating m2 is S1_(-1,3,-1,-1); S1_(0,-2,1,1) rotates g13 with speed 1"
                    .into(),
            );
        }
        3 => {
            let p = params.p;
            let u = in_plane(&plane_in_m(x, &[2, 0])?, 0.4, 1.0);
            let v = in_plane(&plane_in_m(x, &[0, 2])?, 2.2, 0.8);
            // z^{2p} = -1
            let w = [params.p as f64, params.q as f64];
            out.symmetry = Some(symmetry_report(x, f, &u, &w, PI / (2 * p) as f64, seed)?);
            out.u = u;
            out.v = v;
        }
        4 => {
            let u = in_plane(&plane_in_m(x, &[0, 2, 0])?, 0.9, 1.0);
            let v = in_plane(&plane_in_m(x, &[1, 0, -1])?, 0.2, 1.4);
            // z = exp(iπ/6) so that z^6 = -1.
            out.symmetry = Some(symmetry_report(x, f, &u, &[1.0, 3.0, 4.0], PI / 6.0, seed)?);
            out.u = u;
            out.v = v;
        }
        5 => {
            let gammas = g2_gammas(x.g())?;
            let dec = homspace::isotropy_invariant_decomposition(x)?;
            let m0 = summand(&dec, "m0")?;
            let m1 = summand(&dec, "m1")?;
            let m2 = summand(&dec, "m2")?;
            let pg = |i: usize| plane_in_m(x, &gammas[i - 1]);
            let expect = [
                (&m0, span(&[&torus_in_m(x)?, &pg(6)?], d), "m0"),
                (&m1, span(&[&pg(2)?, &pg(5)?], d), "m1"),
                (&m2, span(&[&pg(3)?, &pg(4)?], d), "m2"),
            ];
            for (got, want, label) in &expect {
                if got.ncols() != want.ncols() || linalg::outside_residual(want, got) > 1e-9 {
                    return Err(Error::Diagonalization(format!(
                        "{label} does not match the root-plane description"
                    )));
                }
            }
            let coroot = x
                .torus()
                .lattice
                .as_ref()
                .and_then(|l| l.first().cloned())
                .ok_or_else(|| Error::TorusAlignment("isotropy torus is not aligned".into()))?;
            let theta = PI / 3.0;
            let elt = x.g().torus_element(&coroot, theta)?;
            let a = x.adjoint_on_m(&elt)?;
            let mut blocks = Vec::new();
            let a0 = m0.transpose() * &a * &m0;
            blocks.push(BlockAction {
                label: "m0".into(),
                dim: m0.ncols(),
                expected: "Id".into(),
                residual: linalg::max_abs(&(&a0 - Mat::identity(m0.ncols(), m0.ncols()))),
                eigenvalues: sorted_eigenvalues(&a0),
            });
            let a1 = m1.transpose() * &a * &m1;
            blocks.push(BlockAction {
                label: "m1".into(),
                dim: m1.ncols(),
                expected: "-Id".into(),
                residual: linalg::max_abs(&(&a1 + Mat::identity(m1.ncols(), m1.ncols()))),
                eigenvalues: sorted_eigenvalues(&a1),
            });
            // R(π/3) on each root plane of m2, with the plane oriented so
            // that the rotation is anticlockwise.
            let mut r2: f64 = 0.0;
            let mut cols = Vec::new();
            for i in [3, 4] {
                let pb = pg(i)?;
                let (c0, mut c1) = (pb.column(0).into_owned(), pb.column(1).into_owned());
                if c1.dot(&(&a * &c0)) < 0.0 {
                    c1 = -c1;
                }
                let b = Mat::from_columns(&[c0, c1]);
                let blk = b.transpose() * &a * &b;
                let rot = Mat::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
                r2 = r2.max(linalg::max_abs(&(blk - rot)));
                cols.extend(linalg::columns(&b));
            }
            let a2 = m2.transpose() * &a * &m2;
            blocks.push(BlockAction {
                label: "m2".into(),
                dim: m2.ncols(),
                expected: "R(pi/3)".into(),
                residual: r2,
                eigenvalues: sorted_eigenvalues(&a2),
            });

            let target = pg(2)?;
            let (norm, u, ext, rot) = extremal_and_rotate(x, f, &m1, &m0, &target, seed)?;
            let v = in_plane(&pg(4)?, 0.5, 1.1);
            let ut = bracket_with_torus(x, &u)?;
            out.claims = vec![
                ClosureClaim {
                    label: "[u,m]_m in m0 + [u,t] + g_gamma5".into(),
                    element: ClaimElement::U,
                    source: full.clone(),
                    target: span(&[&m0, &ut, &pg(5)?], d),
                    stated: true,
                },
                ClosureClaim {
                    label: "[v,m]_m in m0 + m2".into(),
                    element: ClaimElement::V,
                    source: full.clone(),
                    target: span(&[&m0, &m2], d),
                    stated: true,
                },
            ];
            let mut sym = symmetry_report(x, &norm, &u, &coroot, theta, seed)?;
            sym.blocks = blocks;
            out.symmetry = Some(sym);
            out.norm = norm;
            out.u = u;
            out.v = v;
            out.extremal = Some(ext);
            out.rotation = Some(rot);
            out.notes.push(
                "gamma1 (short) and gamma2 (long) span an angle of 5pi/6, the angle for which gamma1+gamma2, 2gamma1+gamma2, 3gamma1+gamma2 and 3gamma1+2gamma2 are roots"
                    .into(),
            );
        }
        other => return Err(Error::Constraint(format!("example id must be 1..=5 (got {other})"))),
    }
    Ok(out)
}

/// Speeds of `L = S¹_{(-p, 2p+q, -p, -q)}` on the summands of the first
/// example: the speed on `g_{e2-e4}` and the speeds on the other root planes
/// and `t ∩ m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeedSeparation {
    pub m1_speed: i64,
    pub other_speeds: Vec<i64>,
    pub unique: bool,
}

pub fn example1_speed_separation(p: i64, q: i64) -> Result<SpeedSeparation> {
    let x = example_space_unchecked(1, &ExampleParams { p, q })?;
    let w = [-p, 2 * p + q, -p, -q];
    let lw: Vec<f64> = w.iter().map(|a| *a as f64).collect();
    // L must lie in the isotropy torus.
    let lv = x.g().torus_vector(&lw)?;
    if linalg::vector_outside(x.h_basis(), &lv).norm() > 1e-9 {
        return Err(Error::TorusAlignment("L is not in the isotropy torus".into()));
    }
    let speeds = homspace::ad_rotation_speeds(&x, &w)?;
    let mut m1 = None;
    let mut others = Vec::new();
    for s in speeds {
        if s.root == [0, 1, 0, -1] || s.root == [0, -1, 0, 1] {
            m1 = Some(s.speed);
        } else {
            others.push(s.speed);
        }
    }
    if torus_in_m(&x)?.ncols() > 0 {
        others.push(0);
    }
    let m1_speed = m1.ok_or_else(|| Error::Constraint("g_{e2-e4} is not in m".into()))?;
    others.sort_unstable();
    others.dedup();
    Ok(SpeedSeparation {
        m1_speed,
        unique: !others.contains(&m1_speed),
        other_speeds: others,
    })
}

/// One result of the generic search.
#[derive(Debug, Clone)]
pub struct SearchHit {
    pub start: usize,
    pub objective: f64,
    pub certificate: FlagCertificate,
    /// Curvature with finite-difference tensors at the base and halved step.
    pub recheck: Option<[f64; 2]>,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub certified: Vec<SearchHit>,
    pub candidates: Vec<SearchHit>,
    pub starts: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub budget: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub keep_candidates: usize,
    pub exec: Exec,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: 200,
            seed: 1,
            max_iterations: 500,
            keep_candidates: 5,
            exec: Exec::default(),
        }
    }
}

struct Objective<'a> {
    x: &'a HomogeneousSpace,
    f: &'a MinkowskiNorm,
    basis_ad: Vec<Mat>,
    kernel_tol: f64,
}

impl Objective<'_> {
    /// Squared second singular value of `ad(u)|_m`, squared first zero
    /// condition and the best second and third conditions over the
    /// commutant of u; with the minimizing v.
    fn eval(&self, u: &Vector) -> (f64, Vector) {
        let d = self.x.dim_m();
        let nu = u.norm();
        let un = u / nu;
        let a = self.x.ad_to_g(&un);
        let svd = a.svd(false, true);
        let vt = svd.v_t.expect("requested v_t");
        let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
        idx.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
        // Pad when dim g < dim m cannot happen; m is a subspace of g.
        let smax = svd.singular_values.iter().fold(0.0f64, |m, s| m.max(*s));
        let s2 = if idx.len() > 1 { svd.singular_values[idx[1]] } else { smax };
        let cut = self.kernel_tol * smax.max(1.0);
        let mut kcols: Vec<Vector> = idx
            .iter()
            .filter(|&&i| svd.singular_values[i] <= cut)
            .map(|&i| vt.row(i).transpose())
            .collect();
        if kcols.len() < 2 && idx.len() > 1 {
            kcols = idx.iter().take(2).map(|&i| vt.row(i).transpose()).collect();
        }
        let mut with_u = vec![un.clone()];
        with_u.extend(kcols);
        let k = linalg::orthonormalize(&with_u, d, 1e-9);
        if k.ncols() < 2 {
            return (f64::INFINITY, Vector::zeros(d));
        }
        let kv = k.columns(1, k.ncols() - 1).into_owned();
        let gram = match self.f.gram(&un) {
            Ok(g) => g,
            Err(_) => return (f64::INFINITY, Vector::zeros(d)),
        };
        let gu = &gram * &un;
        let au = self.x.ad_m(&un);
        let r1 = au.transpose() * &gu;
        // v ↦ (ad_m(u)ᵀ g v, ad_m(v)ᵀ g u)
        let m2 = au.transpose() * &gram;
        let m3 = Mat::from_columns(
            &self
                .basis_ad
                .iter()
                .map(|b| b.transpose() * &gu)
                .collect::<Vec<_>>(),
        );
        let mut c = Mat::zeros(2 * d, d);
        c.view_mut((0, 0), (d, d)).copy_from(&m2);
        c.view_mut((d, 0), (d, d)).copy_from(&m3);
        let ck = c * &kv;
        let (vals, vecs) = linalg::sorted_symmetric_eigen(&(ck.transpose() * &ck));
        let v = &kv * vecs.column(0);
        (s2 * s2 + r1.norm_squared() + vals[0].max(0.0), v)
    }
}

fn search_start(obj: &Objective, cfg: &SearchConfig, planes: &[Mat], i: usize) -> (f64, Vector, Vector) {
    let d = obj.x.dim_m();
    let mut rng = linalg::rng(cfg.seed ^ (i as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut u = if i % 2 == 0 && !planes.is_empty() {
        let p = &planes[(i / 2) % planes.len()];
        let a = linalg::gaussian_vector(&mut rng, 2);
        p * a
    } else {
        linalg::gaussian_vector(&mut rng, d)
    };
    u /= obj.f.eval(&u);
    let (mut phi, mut v) = obj.eval(&u);
    let mut step = 0.1;
    let mut stall = 0;
    for _ in 0..cfg.max_iterations {
        if phi < 1e-26 {
            break;
        }
        let h = 1e-7;
        let mut grad = Vector::zeros(d);
        for j in 0..d {
            let mut e = u.clone();
            e[j] += h;
            grad[j] = (obj.eval(&e).0 - phi) / h;
        }
        let un = u.normalize();
        grad -= &un * un.dot(&grad);
        let gn = grad.norm();
        if gn == 0.0 || !gn.is_finite() {
            break;
        }
        let mut accepted = false;
        for _ in 0..30 {
            let cand = &u - &grad * (step / gn);
            let cand = &cand / obj.f.eval(&cand);
            let (pc, vc) = obj.eval(&cand);
            if pc < phi {
                let gain = (phi - pc) / phi.max(1e-300);
                stall = if gain < 1e-6 { stall + 1 } else { 0 };
                u = cand;
                phi = pc;
                v = vc;
                step *= 1.5;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted || stall > 25 {
            break;
        }
    }
    (phi, u, v)
}

/// Seeded multi-start search for flat flags. Starts alternate between
/// root planes of g lying in m and random directions; each start descends
/// the combined zero-condition objective on the F-unit sphere.
pub fn generic_flat_search(
    x: &HomogeneousSpace,
    f: &MinkowskiNorm,
    cfg: &SearchConfig,
    tol: &Tolerances,
) -> Result<SearchResult> {
    let d = x.dim_m();
    let basis_ad: Vec<Mat> = (0..d)
        .map(|j| {
            let mut e = Vector::zeros(d);
            e[j] = 1.0;
            x.ad_m(&e)
        })
        .collect();
    let obj = Objective {
        x,
        f,
        basis_ad,
        kernel_tol: tol.kernel,
    };
    let planes: Vec<Mat> = x
        .g()
        .root_datum()
        .map(|datum| {
            datum
                .planes
                .iter()
                .filter(|p| linalg::outside_residual(x.m_basis(), &p.basis()) < 1e-9)
                .map(|p| x.m_basis().transpose() * p.basis())
                .collect()
        })
        .unwrap_or_default();
    let runs = par::map_range(cfg.exec, cfg.budget, |i| search_start(&obj, cfg, &planes, i));
    let mut certified = Vec::new();
    let mut others = Vec::new();
    for (i, (phi, u, v)) in runs.into_iter().enumerate() {
        if !phi.is_finite() || v.norm() == 0.0 {
            continue;
        }
        let cert = curvature::flag_curvature_with(x, f, &u, &v, TensorMethod::ClosedForm, tol)?;
        let mut hit = SearchHit {
            start: i,
            objective: phi,
            certificate: cert,
            recheck: None,
        };
        if hit.certificate.verdict == Verdict::ZeroFlag {
            let k = |s: f64| {
                curvature::flag_curvature_with(x, f, &u, &v, TensorMethod::FiniteDifference { step_scale: s }, tol)
                    .ok()
                    .and_then(|c| c.curvature)
                    .unwrap_or(f64::INFINITY)
            };
            hit.recheck = Some([k(1.0), k(0.5)]);
            certified.push(hit);
        } else {
            others.push(hit);
        }
    }
    others.sort_by(|a, b| a.objective.total_cmp(&b.objective).then(a.start.cmp(&b.start)));
    others.truncate(cfg.keep_candidates);
    Ok(SearchResult {
        certified,
        candidates: others,
        starts: cfg.budget,
    })
}
