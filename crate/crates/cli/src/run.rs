//! Task dispatch and report assembly.

use std::sync::Arc;

use flagcurv::curvature::{self, FlagCertificate};
use flagcurv::flatfinder::{self, ExampleParams, SearchConfig, SearchHit};
use flagcurv::homspace::{self, BlockFamily, HomogeneousSpace, Piece, SubalgebraSpec};
use flagcurv::linalg::{Mat, Vector};
use flagcurv::minkowski::{self, MinkowskiNorm, NormRecipe, QuarticTerms};
use flagcurv::{Error, Exec, Family, LieAlgebra, Tolerances};
use serde_json::{json, Map, Value};

use crate::canonical::{float, floats};
use crate::error::CliError;
use crate::spec::{
    BlockFamilySpec, MetricSpec, PieceSpec, RootOrderSpec, SpaceSpecFile, TaskName, TermsSpec, ToleranceSpec, VectorSpec,
};

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub task: TaskName,
    pub budget: Option<usize>,
    pub seed: Option<u64>,
    pub id: Option<u8>,
    pub exec: Exec,
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub exit: u8,
}

const DEFAULT_BUDGET: usize = 200;
const DEFAULT_SAMPLES: usize = 64;

fn vector(v: &Vector) -> Value {
    floats(v.iter())
}

fn matrix(m: &Mat) -> Value {
    Value::Array(m.row_iter().map(|r| floats(r.iter())).collect())
}

fn opt_float(x: Option<f64>) -> Value {
    x.map(float).unwrap_or(Value::Null)
}

fn certificate(c: &FlagCertificate) -> Value {
    json!({
        "u": vector(&c.u),
        "v": vector(&c.v),
        "commutator_residual": float(c.commutator_residual),
        "zero_residuals": floats(c.zero_residuals.iter()),
        "u_vector": c.u_vector.as_ref().map(vector).unwrap_or(Value::Null),
        "solver_residual": opt_float(c.solver_residual),
        "curvature": opt_float(c.curvature),
        "verdict": c.verdict.as_str(),
        "failure": c.failure.clone().map(Value::String).unwrap_or(Value::Null),
    })
}

fn hit(h: &SearchHit) -> Value {
    json!({
        "start": h.start,
        "objective": float(h.objective),
        "certificate": certificate(&h.certificate),
        "fd_recheck": h.recheck.map(|r| floats(r.iter())).unwrap_or(Value::Null),
    })
}

fn block_family(f: BlockFamilySpec) -> BlockFamily {
    match f {
        BlockFamilySpec::Su => BlockFamily::Su,
        BlockFamilySpec::Sp => BlockFamily::Sp,
        BlockFamilySpec::So => BlockFamily::So,
    }
}

fn one_based(ptr: &str, i: usize, n: usize) -> Result<usize, CliError> {
    if i == 0 || i > n {
        return Err(CliError::input(ptr, format!("index {i} outside 1..={n}")));
    }
    Ok(i - 1)
}

fn pieces(spec: &[PieceSpec], g: &LieAlgebra) -> Result<Vec<Piece>, CliError> {
    let (family, n) = g.family().expect("built from a family");
    let coords = family.torus_coordinates(n);
    let size = g.matrix_size();
    spec.iter()
        .enumerate()
        .map(|(i, p)| {
            Ok(match p {
                PieceSpec::Block { family: bf, indices } => {
                    let ptr = format!("/isotropy/{i}/block/indices");
                    let idx = indices
                        .iter()
                        .enumerate()
                        .map(|(k, j)| one_based(&format!("{ptr}/{k}"), *j, n))
                        .collect::<Result<Vec<_>, _>>()?;
                    Piece::Block {
                        family: block_family(*bf),
                        indices: idx,
                    }
                }
                PieceSpec::Circle { weights } => {
                    if weights.len() != coords {
                        return Err(CliError::input(
                            format!("/isotropy/{i}/circle/weights"),
                            format!("expected {coords} weights for {}, got {}", g.label(), weights.len()),
                        ));
                    }
                    Piece::Circle {
                        weights: weights.clone(),
                    }
                }
                PieceSpec::Sp1Block { index } => Piece::Sp1Block {
                    index: one_based(&format!("/isotropy/{i}/sp1_block/index"), *index, n)?,
                },
                PieceSpec::RootSu2 { root } => {
                    if root.len() != coords {
                        return Err(CliError::input(
                            format!("/isotropy/{i}/root_su2/root"),
                            format!("expected {coords} entries, got {}", root.len()),
                        ));
                    }
                    Piece::RootSu2 { root: root.clone() }
                }
                PieceSpec::Explicit { matrices } => {
                    let mats = matrices
                        .iter()
                        .enumerate()
                        .map(|(k, rows)| {
                            let ptr = format!("/isotropy/{i}/explicit/matrices/{k}");
                            if rows.len() != size || rows.iter().any(|r| r.len() != size) {
                                return Err(CliError::input(ptr, format!("expected a {size}x{size} matrix")));
                            }
                            Ok(Mat::from_fn(size, size, |a, b| rows[a][b]))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Piece::Explicit { matrices: mats }
                }
            })
        })
        .collect()
}

fn build_space(spec: &SpaceSpecFile, exec: Exec) -> Result<HomogeneousSpace, CliError> {
    let group = spec
        .group
        .as_ref()
        .ok_or_else(|| CliError::input("/group", "missing group"))?;
    let family = Family::parse(&group.family).map_err(|e| CliError::input("/group/family", e.to_string()))?;
    let g = LieAlgebra::build_with(family, group.n, exec).map_err(|e| CliError::input("/group/n", e.to_string()))?;
    let pieces = pieces(&spec.isotropy, &g)?;
    HomogeneousSpace::build(Arc::new(g), SubalgebraSpec::new(pieces))
        .map_err(|e| CliError::input("/isotropy", e.to_string()))
}

fn resolve_vector(x: &HomogeneousSpace, v: &VectorSpec, ptr: &str) -> Result<Vector, CliError> {
    match v {
        VectorSpec::Raw(c) => {
            if c.len() != x.dim_m() {
                return Err(CliError::input(
                    format!("{ptr}/raw"),
                    format!("expected {} coordinates, got {}", x.dim_m(), c.len()),
                ));
            }
            Ok(Vector::from_vec(c.clone()))
        }
        VectorSpec::RootPlane { root, coords } => {
            let rptr = format!("{ptr}/root_plane/root");
            let datum = x
                .g()
                .root_datum()
                .ok_or_else(|| CliError::input(&rptr, "the algebra has no standard root datum"))?;
            let (i, sign) = datum
                .find(root)
                .ok_or_else(|| CliError::input(&rptr, format!("{root:?} is not a root of {}", x.g().label())))?;
            let w = datum.planes[i].vector(coords[0], coords[1], sign);
            let outside = flagcurv::linalg::vector_outside(x.m_basis(), &w).norm();
            if outside > 1e-9 * w.norm().max(1e-300) {
                return Err(CliError::input(&rptr, format!("root plane {root:?} is not contained in m")));
            }
            Ok(x.to_m(&w))
        }
    }
}

fn recipe(spec: &MetricSpec, x: &HomogeneousSpace) -> Result<NormRecipe, CliError> {
    Ok(match spec {
        MetricSpec::Riemannian { spread, seed, q } => {
            let q = match q {
                None => None,
                Some(rows) => {
                    let d = x.dim_m();
                    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                        return Err(CliError::input("/metric/q", format!("expected a {d}x{d} matrix")));
                    }
                    Some(Mat::from_fn(d, d, |a, b| rows[a][b]))
                }
            };
            NormRecipe::Riemannian {
                q,
                spread: *spread,
                seed: *seed,
            }
        }
        MetricSpec::AlphaBeta { phi, v0, spread, seed } => NormRecipe::AlphaBeta {
            phi: phi.clone(),
            v0: v0.as_ref().map(|v| resolve_vector(x, v, "/metric/v0")).transpose()?,
            spread: *spread,
            seed: *seed,
        },
        MetricSpec::QuarticPerturbed {
            epsilon,
            terms,
            spread,
            seed,
        } => NormRecipe::QuarticPerturbed {
            epsilon: *epsilon,
            terms: match terms {
                TermsSpec::Random { count } => QuarticTerms::Random { count: *count },
                TermsSpec::Summands => QuarticTerms::Summands,
            },
            spread: *spread,
            seed: *seed,
        },
    })
}

fn space_summary(x: &HomogeneousSpace) -> Value {
    let regular = homspace::is_regular_subalgebra(x)
        .map(|r| {
            json!({
                "regular": r.regular,
                "normalizer_rank": r.normalizer_rank,
                "h_roots": r.h_roots,
            })
        })
        .unwrap_or_else(|e| json!({"error": e.to_string()}));
    let decomposition = homspace::isotropy_invariant_decomposition(x)
        .map(|d| {
            Value::Array(
                d.summands
                    .iter()
                    .map(|s| {
                        json!({
                            "label": s.label,
                            "dim": s.dim(),
                            "signature": floats(s.signature.iter()),
                        })
                    })
                    .collect(),
            )
        })
        .unwrap_or_else(|e| json!({"error": e.to_string()}));
    json!({
        "algebra": x.g().label(),
        "dim_g": x.dim_h() + x.dim_m(),
        "dim_h": x.dim_h(),
        "dim_m": x.dim_m(),
        "rank_g": x.rank_g(),
        "rank_h": x.rank_h(),
        "torus_aligned": x.torus().is_aligned(),
        "reductive_residual": float(x.reductive_residual()),
        "regularity": regular,
        "decomposition": decomposition,
    })
}

fn metric_summary(f: &MinkowskiNorm, x: &HomogeneousSpace, samples: usize, seed: u64) -> Value {
    let r = minkowski::check_norm_properties(f, x, samples, seed);
    json!({
        "kind": f.kind().as_str(),
        "base_kind": f.base_kind().as_str(),
        "epsilon": opt_float(f.epsilon()),
        "homogeneity": float(r.homogeneity),
        "reversibility": float(r.reversibility),
        "invariance": float(r.invariance),
        "min_eigenvalue": float(r.min_eigenvalue),
        "samples": r.samples,
    })
}

struct Assertions(Vec<Value>, bool);

impl Assertions {
    fn new() -> Self {
        Assertions(Vec::new(), true)
    }

    fn below(&mut self, name: &str, value: f64, threshold: f64) {
        let passed = value.is_finite() && value < threshold;
        self.1 &= passed;
        self.0.push(json!({
            "name": name,
            "value": float(value),
            "threshold": float(threshold),
            "passed": passed,
        }));
    }

    fn holds(&mut self, name: &str, passed: bool) {
        self.1 &= passed;
        self.0.push(json!({"name": name, "passed": passed}));
    }
}

fn verify_example(
    id: u8,
    params: ExampleParams,
    x: &HomogeneousSpace,
    f: &MinkowskiNorm,
    seed: u64,
    tol: &Tolerances,
) -> Result<(Value, bool), CliError> {
    let ex = flatfinder::construct_example_flat(id, &params, x, f, seed)?;
    let cert = curvature::flag_curvature_with(x, &ex.norm, &ex.u, &ex.v, curvature::TensorMethod::ClosedForm, tol)?;
    let claims = flatfinder::verify_closure_claims(x, &ex.claims, &ex.u, &ex.v, tol)?;
    let mut a = Assertions::new();
    a.holds("verdict is zero_flag", cert.is_zero_flag());
    a.below("|K|", cert.curvature.map(f64::abs).unwrap_or(f64::INFINITY), tol.zero_flag);
    for c in claims.iter().filter(|c| c.stated) {
        a.below(&c.label, c.residual, tol.closure);
    }
    if let Some(e) = &ex.extremal {
        a.below("extremal stationarity", e.stationarity, 1e-8);
    }
    let mut payload = Map::new();
    if let Some(s) = &ex.symmetry {
        a.below("Ad(g) u = -u", s.flips_u, 1e-10);
        a.below("Ad(g) preserves F", s.norm_invariance, 1e-10);
        a.below("Ad(g) preserves g_u", s.preserves_tensor, 1e-8);
        for b in &s.blocks {
            a.below(&format!("Ad(g) on {} is {}", b.label, b.expected), b.residual, 1e-10);
        }
        payload.insert(
            "symmetry".into(),
            json!({
                "weights": floats(s.weights.iter()),
                "angle": float(s.angle),
                "flips_u": float(s.flips_u),
                "norm_invariance": float(s.norm_invariance),
                "preserves_tensor": float(s.preserves_tensor),
                "blocks": s.blocks.iter().map(|b| json!({
                    "label": b.label,
                    "dim": b.dim,
                    "expected": b.expected,
                    "residual": float(b.residual),
                    "eigenvalues": b.eigenvalues.iter().map(|(re, im)| floats([re, im])).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            }),
        );
    }
    if id == 1 {
        let s = flatfinder::example1_speed_separation(params.p, params.q)?;
        a.holds("speed of L on m1 differs from the other speeds", s.unique);
        payload.insert(
            "speed_separation".into(),
            json!({"m1_speed": s.m1_speed, "other_speeds": s.other_speeds, "unique": s.unique}),
        );
    }
    payload.insert("example_id".into(), json!(id));
    payload.insert("p".into(), json!(params.p));
    payload.insert("q".into(), json!(params.q));
    payload.insert("certificate".into(), certificate(&cert));
    payload.insert(
        "claims".into(),
        Value::Array(
            claims
                .iter()
                .map(|c| {
                    json!({
                        "label": c.label,
                        "residual": float(c.residual),
                        "passed": c.passed,
                        "stated": c.stated,
                    })
                })
                .collect(),
        ),
    );
    payload.insert(
        "m_prime_dim".into(),
        ex.m_prime.as_ref().map(|m| json!(m.ncols())).unwrap_or(Value::Null),
    );
    payload.insert(
        "extremal".into(),
        ex.extremal
            .as_ref()
            .map(|e| json!({"stationarity": float(e.stationarity), "iterations": e.iterations}))
            .unwrap_or(Value::Null),
    );
    payload.insert(
        "rotation".into(),
        ex.rotation
            .as_ref()
            .map(|r| json!({"residual": float(r.residual), "iterations": r.iterations}))
            .unwrap_or(Value::Null),
    );
    payload.insert("norm_kind".into(), json!(ex.norm.kind().as_str()));
    payload.insert("notes".into(), json!(ex.notes));
    payload.insert("assertions".into(), Value::Array(a.0));
    Ok((Value::Object(payload), a.1))
}

fn input_from(e: Error, ptr: &str) -> CliError {
    CliError::input(ptr, e.to_string())
}

/// Runs one task and assembles the report.
pub fn run(spec: &SpaceSpecFile, opts: &Options) -> Result<Outcome, CliError> {
    if let Some(t) = spec.task {
        if t != opts.task {
            return Err(CliError::input(
                "/task",
                format!("file asks for {} but the command is {}", t.as_str(), opts.task.as_str()),
            ));
        }
    }
    let tol = spec.tolerances.resolve()?;
    let mut effective = spec.clone();
    effective.task = Some(opts.task);
    effective.tolerances = ToleranceSpec {
        algebra: Some(tol.algebra),
        cluster: Some(tol.cluster),
        precondition: Some(tol.precondition),
        zero_flag: Some(tol.zero_flag),
        degenerate: Some(tol.degenerate),
        closure: Some(tol.closure),
        kernel: Some(tol.kernel),
    };
    let samples = spec.params.samples.unwrap_or(DEFAULT_SAMPLES);
    effective.params.samples = Some(samples);
    let seed = opts.seed.or(spec.params.seed).unwrap_or(1);
    effective.params.seed = Some(seed);

    let mut example = None;
    let x = if opts.task == TaskName::VerifyExample {
        let id = opts
            .id
            .or(spec.params.example_id)
            .ok_or_else(|| CliError::input("/params/example_id", "missing example id"))?;
        let params = ExampleParams {
            p: spec.params.p.unwrap_or(2),
            q: spec.params.q.unwrap_or(1),
        };
        flatfinder::check_example_params(id, &params).map_err(|e| {
            let ptr = if (1..=5).contains(&id) { "/params/p" } else { "/params/example_id" };
            input_from(e, ptr)
        })?;
        effective.params.example_id = Some(id);
        effective.params.p = Some(params.p);
        effective.params.q = Some(params.q);
        let x = flatfinder::example_space(id, &params)?;
        if let Some(g) = &spec.group {
            let (family, n) = x.g().family().expect("example algebras come from families");
            let same = Family::parse(&g.family).ok() == Some(family) && (family == Family::G2 || g.n == n);
            if !same {
                return Err(CliError::input(
                    "/group",
                    format!("example {id} lives in {}", x.g().label()),
                ));
            }
        }
        example = Some((id, params));
        x
    } else {
        build_space(spec, opts.exec)?
    };

    let recipe = recipe(&spec.metric, &x)?;
    let f = minkowski::make_norm_with(&recipe, &x, opts.exec).map_err(|e| input_from(e, "/metric"))?;
    if let (MetricSpec::QuarticPerturbed { epsilon, .. }, Some(eff)) = (&mut effective.metric, f.epsilon()) {
        *epsilon = eff;
    }

    let mut exit = 0;
    let mut notes: Vec<String> = Vec::new();
    let payload = match opts.task {
        TaskName::CheckSpace => {
            let mut m = Map::new();
            m.insert("invariant_forms".into(), json!(x.invariant_forms().len()));
            m.insert("fixed_vectors".into(), json!(x.fixed_vectors().ncols()));
            if let Some(inv) = &spec.params.involution {
                let elt = x
                    .g()
                    .torus_element(&inv.weights, inv.angle)
                    .map_err(|e| input_from(e, "/params/involution/weights"))?;
                let r = homspace::fixed_point_space(&x, &elt)?;
                m.insert(
                    "fixed_point_space".into(),
                    json!({
                        "algebra_dim": r.space.dim_h() + r.space.dim_m(),
                        "isotropy_dim": r.space.dim_h(),
                        "dim": r.space.dim_m(),
                        "codimension": r.codimension,
                        "rank_g": r.rank_g,
                        "rank_centralizer": r.rank_total,
                        "rank_h": r.rank_h,
                        "rank_isotropy": r.rank_isotropy,
                        "ranks_equal": r.ranks_equal(),
                        "isotropy_splits": r.isotropy_splits,
                        "factors": r.factors.iter().map(|f| json!({
                            "dim": f.dim,
                            "isotropy_dim": f.isotropy_dim,
                            "quotient_dim": f.quotient_dim,
                            "abelian": f.abelian,
                        })).collect::<Vec<_>>(),
                    }),
                );
            }
            Value::Object(m)
        }
        TaskName::Speeds => {
            let w = spec
                .params
                .weights
                .as_ref()
                .ok_or_else(|| CliError::input("/params/weights", "missing circle weights"))?;
            let order = spec.params.order.unwrap_or(RootOrderSpec::Conventional);
            effective.params.order = Some(order);
            let order = match order {
                RootOrderSpec::Canonical => homspace::RootOrder::Canonical,
                RootOrderSpec::Conventional => homspace::RootOrder::Conventional,
            };
            let speeds = homspace::ad_rotation_speeds_ordered(&x, w, order)
                .map_err(|e| input_from(e, "/params/weights"))?;
            json!({
                "weights": w,
                "planes": speeds.iter().map(|s| json!({"root": s.root, "speed": s.speed})).collect::<Vec<_>>(),
                "speeds": speeds.iter().map(|s| s.speed).collect::<Vec<_>>(),
            })
        }
        TaskName::Curvature => {
            let u = spec
                .params
                .u
                .as_ref()
                .ok_or_else(|| CliError::input("/params/u", "missing u"))?;
            let v = spec
                .params
                .v
                .as_ref()
                .ok_or_else(|| CliError::input("/params/v", "missing v"))?;
            let u = resolve_vector(&x, u, "/params/u")?;
            let v = resolve_vector(&x, v, "/params/v")?;
            let cert = curvature::flag_curvature_with(&x, &f, &u, &v, curvature::TensorMethod::ClosedForm, &tol)
                .map_err(|e| input_from(e, "/params"))?;
            let mut m = Map::new();
            m.insert("certificate".into(), certificate(&cert));
            if f.v1_inner_product().is_some() {
                match curvature::alpha_beta_comparison(&x, &f, &u, &v) {
                    Ok((kf, k0)) => {
                        m.insert(
                            "alpha_beta".into(),
                            json!({
                                "k_f": opt_float(kf.curvature),
                                "k_0": opt_float(k0.curvature),
                                "difference": opt_float(kf.curvature.zip(k0.curvature).map(|(a, b)| (a - b).abs())),
                            }),
                        );
                    }
                    Err(e) => notes.push(format!("no (alpha, beta) comparison: {e}")),
                }
            }
            Value::Object(m)
        }
        TaskName::FindFlat => {
            let budget = opts.budget.or(spec.params.budget).unwrap_or(DEFAULT_BUDGET);
            effective.params.budget = Some(budget);
            let cfg = SearchConfig {
                budget,
                seed,
                exec: opts.exec,
                ..SearchConfig::default()
            };
            let r = flatfinder::generic_flat_search(&x, &f, &cfg, &tol)?;
            json!({
                "starts": r.starts,
                "certified": r.certified.iter().map(hit).collect::<Vec<_>>(),
                "candidates": r.candidates.iter().map(hit).collect::<Vec<_>>(),
            })
        }
        TaskName::VerifyExample => {
            let (id, params) = example.expect("set above");
            let (payload, ok) = verify_example(id, params, &x, &f, seed, &tol)?;
            if !ok {
                exit = 1;
            }
            payload
        }
    };

    let report = json!({
        "config": serde_json::to_value(&effective).expect("spec serializes"),
        "space": space_summary(&x),
        "metric": {
            "check": metric_summary(&f, &x, samples, seed),
            "quadratic": matrix(&f.quadratic()),
        },
        "task": opts.task.as_str(),
        "result": payload,
        "status": if exit == 0 { "ok" } else { "failed" },
        "notes": notes,
    });
    Ok(Outcome { report, exit })
}
