//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

use flagcurv::curvature::{self, Verdict};
use flagcurv::flatfinder::{self, ExampleFlat, ExampleParams};
use flagcurv::homspace::{self, BlockFamily, HomogeneousSpace, Piece, RootOrder, SubalgebraSpec};
use flagcurv::linalg::{self, Mat, Vector};
use flagcurv::minkowski::{make_norm, MinkowskiNorm, NormKind, NormRecipe, QuarticTerms};
use flagcurv::{Exec, Family, LieAlgebra, Tolerances};
use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn pass_if(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn quartic(x: &HomogeneousSpace, eps: f64, seed: u64) -> MinkowskiNorm {
    make_norm(
        &NormRecipe::QuarticPerturbed {
            epsilon: eps,
            terms: QuarticTerms::Random { count: 3 },
            spread: 0.25,
            seed,
        },
        x,
    )
    .expect("quartic norm")
}

fn space(family: Family, n: usize, pieces: Vec<Piece>) -> HomogeneousSpace {
    let g = Arc::new(LieAlgebra::build(family, n).expect("algebra"));
    HomogeneousSpace::build(g, SubalgebraSpec::new(pieces)).expect("space")
}

fn commutator(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

fn c1_algebra() -> Outcome {
    let mut cases: Vec<(Family, usize)> = (2..=6).map(|n| (Family::Su, n)).collect();
    cases.extend((2..=4).map(|n| (Family::Sp, n)));
    cases.extend((5..=8).map(|n| (Family::So, n)));
    cases.push((Family::G2, 0));
    let mut worst: f64 = 0.0;
    let mut matrix_worst: f64 = 0.0;
    let mut problems = Vec::new();
    for (family, n) in cases {
        let g = LieAlgebra::build(family, n).expect("algebra");
        let (dim, roots) = match family {
            Family::Su => (n * n - 1, n * (n - 1) / 2),
            Family::Sp => (n * (2 * n + 1), n * n),
            Family::So => (n * (n - 1) / 2, if n % 2 == 0 { (n / 2) * (n / 2 - 1) } else { (n / 2) * (n / 2) }),
            Family::G2 => (14, 6),
        };
        let got_roots = g.root_datum().map(|d| d.planes.len()).unwrap_or(0);
        if g.dim() != dim || got_roots != roots {
            problems.push(format!("{}: dim {} roots {}", g.label(), g.dim(), got_roots));
        }
        worst = worst
            .max(g.jacobi_residual(Exec::Parallel))
            .max(g.antisymmetry_residual())
            .max(g.invariance_residual());
        // Independent check through the realized matrices.
        let mut rng = linalg::rng(n as u64 + 100);
        for _ in 0..20 {
            let [a, b, c] = [0; 3].map(|_| g.matrix(&linalg::gaussian_vector(&mut rng, g.dim())));
            let jac = commutator(&a, &commutator(&b, &c))
                + commutator(&b, &commutator(&c, &a))
                + commutator(&c, &commutator(&a, &b));
            let (x, y) = (g.coords(&a).unwrap(), g.coords(&b).unwrap());
            let via_constants = g.matrix(&g.bracket(&x, &y).unwrap());
            let inv = g.bi_matrices(&commutator(&a, &b), &c) + g.bi_matrices(&b, &commutator(&a, &c));
            matrix_worst = matrix_worst
                .max(linalg::max_abs(&jac) / (1.0 + linalg::max_abs(&a)).powi(3))
                .max(linalg::max_abs(&(via_constants - commutator(&a, &b))))
                .max(inv.abs());
        }
    }
    pass_if(
        worst < 1e-10 && matrix_worst < 1e-10 && problems.is_empty(),
        format!("identity residual {worst:.2e}, matrix oracle {matrix_worst:.2e}, mismatches {problems:?}"),
    )
}

fn c2_speeds() -> Outcome {
    let x = space(
        Family::Sp,
        3,
        vec![Piece::Sp1Block { index: 2 }, Piece::Circle { weights: vec![1, 3, 0] }],
    );
    let s: Vec<i64> = homspace::ad_rotation_speeds_ordered(&x, &[1, 3, 4], RootOrder::Conventional)
        .expect("speeds")
        .iter()
        .map(|e| e.speed)
        .collect();
    let mut ok = s == vec![2, 6, 4, 2, 5, 3, 7, 1];
    let mut detail = format!("sp(3): {s:?}");
    for (p, q) in [(2i64, 1i64), (5, 2), (3, 1)] {
        let x = space(Family::Sp, 2, vec![Piece::Circle { weights: vec![p, q] }]);
        let s: Vec<i64> = homspace::ad_rotation_speeds_ordered(&x, &[p, q], RootOrder::Conventional)
            .expect("speeds")
            .iter()
            .map(|e| e.speed)
            .collect();
        ok &= s == vec![2 * p, 2 * q, p + q, p - q];
        detail.push_str(&format!("; ({p},{q}): {s:?}"));
    }
    pass_if(ok, detail)
}

fn flag_checks(ex: &ExampleFlat, k_tol: f64) -> (bool, f64, f64, Verdict) {
    let c = curvature::flag_curvature(&ex.space, &ex.norm, &ex.u, &ex.v).expect("certificate");
    let k = c.curvature.map(f64::abs).unwrap_or(f64::INFINITY);
    let r = c.max_zero_residual();
    (c.is_zero_flag() && r < 1e-8 && k < k_tol, r, k, c.verdict)
}

const EPSILONS: [f64; 3] = [0.05, 0.1, 0.2];

fn example_family(id: u8, params: ExampleParams, k_tol: f64) -> (bool, String) {
    let x = flatfinder::example_space(id, &params).expect("space");
    let mut ok = true;
    let mut detail = Vec::new();
    for (i, eps) in EPSILONS.iter().enumerate() {
        let f = quartic(&x, *eps, 11 + i as u64);
        if f.epsilon() != Some(*eps) {
            ok = false;
            detail.push(format!("eps {eps} reduced to {:?}", f.epsilon()));
            continue;
        }
        match flatfinder::construct_example_flat(id, &params, &x, &f, 5 + i as u64) {
            Ok(ex) => {
                let (good, r, k, v) = flag_checks(&ex, k_tol);
                ok &= good;
                detail.push(format!("eps {eps}: {} res {r:.1e} |K| {k:.1e}", v.as_str()));
            }
            Err(e) => {
                ok = false;
                detail.push(format!("eps {eps}: {e}"));
            }
        }
    }
    (ok, detail.join(", "))
}

fn c3_example3() -> Outcome {
    let (ok, d) = example_family(3, ExampleParams { p: 2, q: 1 }, 1e-7);
    pass_if(ok, d)
}

fn c4_example4() -> Outcome {
    let (mut ok, d) = example_family(4, ExampleParams { p: 2, q: 1 }, 1e-7);
    // z = exp(iπ/6) has z^6 = -1.
    let z6 = (6.0 * PI / 6.0).cos();
    ok &= (z6 + 1.0).abs() < 1e-15;
    pass_if(ok, d)
}

fn c5_example5() -> Outcome {
    let params = ExampleParams { p: 2, q: 1 };
    let x = flatfinder::example_space(5, &params).expect("space");
    let f = quartic(&x, 0.1, 21);
    let ex = match flatfinder::construct_example_flat(5, &params, &x, &f, 3) {
        Ok(ex) => ex,
        Err(e) => return pass_if(false, e.to_string()),
    };
    let s = ex.symmetry.as_ref().expect("block report");
    let (c, h) = (0.5, 3f64.sqrt() / 2.0);
    let expected: [(usize, Vec<(f64, f64)>); 3] = [
        (3, vec![(1.0, 0.0); 3]),
        (4, vec![(-1.0, 0.0); 4]),
        (4, vec![(c, -h), (c, -h), (c, h), (c, h)]),
    ];
    let mut ok = s.blocks.len() == 3;
    let mut worst: f64 = 0.0;
    for (b, (dim, ev)) in s.blocks.iter().zip(&expected) {
        ok &= b.dim == *dim && b.eigenvalues.len() == ev.len();
        for ((re, im), (er, ei)) in b.eigenvalues.iter().zip(ev) {
            worst = worst.max((re - er).abs()).max((im - ei).abs());
        }
        worst = worst.max(b.residual);
    }
    ok &= worst < 1e-10;
    let (good, r, k, v) = flag_checks(&ex, 1e-6);
    let dims: Vec<usize> = s.blocks.iter().map(|b| b.dim).collect();
    let claims = flatfinder::verify_closure_claims(&x, &ex.claims, &ex.u, &ex.v, &Tolerances::default()).unwrap();
    let claims_ok = claims.iter().all(|c| c.passed);
    pass_if(
        ok && good && claims_ok,
        format!(
            "dims {dims:?}, block/eigenvalue deviation {worst:.1e}, {} res {r:.1e} |K| {k:.1e}, claims {}",
            v.as_str(),
            if claims_ok { "hold" } else { "fail" }
        ),
    )
}

fn c6_examples12() -> Outcome {
    let tol = Tolerances::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for id in [1u8, 2] {
        let params = ExampleParams { p: 2, q: 1 };
        let x = flatfinder::example_space(id, &params).expect("space");
        let f = quartic(&x, 0.1, 31);
        let ex = match flatfinder::construct_example_flat(id, &params, &x, &f, 9) {
            Ok(ex) => ex,
            Err(e) => {
                ok = false;
                detail.push(format!("ex{id}: {e}"));
                continue;
            }
        };
        let (good, r, k, v) = flag_checks(&ex, 1e-7);
        ok &= good;
        detail.push(format!("ex{id}: {} res {r:.1e} |K| {k:.1e}", v.as_str()));
        for c in flatfinder::verify_closure_claims(&x, &ex.claims, &ex.u, &ex.v, &tol).unwrap() {
            if c.stated {
                ok &= c.passed;
            }
            detail.push(format!(
                "ex{id} {}{} {:.1e} {}",
                if c.stated { "" } else { "(needed) " },
                c.label,
                c.residual,
                if c.passed { "holds" } else { "FAILS" }
            ));
        }
    }
    pass_if(ok, detail.join("; "))
}

fn c7_alpha_beta() -> Outcome {
    let x = space(
        Family::Su,
        4,
        vec![
            Piece::Block { family: BlockFamily::Su, indices: vec![0, 1] },
            Piece::Circle { weights: vec![1, 1, 1, -3] },
        ],
    );
    let f = make_norm(
        &NormRecipe::AlphaBeta { phi: vec![1.0, 0.0, 0.3, 0.0, -0.05], v0: None, spread: 0.25, seed: 4 },
        &x,
    )
    .expect("alpha-beta norm");
    let datum = x.g().root_datum().expect("datum");
    let plane = |r: &[i64]| {
        let p = datum.plane(r).expect("root");
        x.m_basis().transpose() * p.basis()
    };
    let pairs = [
        (plane(&[1, 0, -1, 0]), plane(&[0, 1, 0, -1])),
        (plane(&[1, 0, 0, -1]), plane(&[0, 1, -1, 0])),
    ];
    let isos = x.isotropy_samples(50, 77);
    let mut rng = linalg::rng(78);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for (i, a) in isos.iter().enumerate() {
        let (pu, pv) = &pairs[i % 2];
        let tu: f64 = rng.random_range(0.0..2.0 * PI);
        let tv: f64 = rng.random_range(0.0..2.0 * PI);
        let u = a * (pu * Vector::from_vec(vec![tu.cos(), tu.sin()])) * rng.random_range(0.5..2.0);
        let v = a * (pv * Vector::from_vec(vec![tv.cos(), tv.sin()])) * rng.random_range(0.5..2.0);
        match curvature::alpha_beta_comparison(&x, &f, &u, &v) {
            Ok((kf, k0)) => match (kf.curvature, k0.curvature) {
                (Some(a), Some(b)) => worst = worst.max((a - b).abs()),
                _ => failures += 1,
            },
            Err(_) => failures += 1,
        }
    }
    let u = pairs[0].0.column(0).into_owned();
    let v = pairs[0].1.column(0).into_owned();
    let (kf, k0) = curvature::alpha_beta_comparison(&x, &f, &u, &v).expect("comparison");
    let (a, b) = (kf.curvature.unwrap_or(f64::NAN), k0.curvature.unwrap_or(f64::NAN));
    pass_if(
        failures == 0 && worst < 1e-7 && a.abs() < 1e-8 && b.abs() < 1e-8 && f.kind() == NormKind::AlphaBeta,
        format!("50 flags: max |K^F - K^0| {worst:.1e}, rejected {failures}; g13/g24 flag: K^F {a:.1e}, K^0 {b:.1e}"),
    )
}

fn c8_tensor() -> Outcome {
    let spaces = [
        flatfinder::example_space(3, &ExampleParams { p: 2, q: 1 }).unwrap(),
        flatfinder::example_space(1, &ExampleParams { p: 2, q: 1 }).unwrap(),
        space(
            Family::Su,
            4,
            vec![
                Piece::Block { family: BlockFamily::Su, indices: vec![0, 1] },
                Piece::Circle { weights: vec![1, 1, 1, -3] },
            ],
        ),
    ];
    let mut pairs = 0;
    let (mut w_id, mut w_rev, mut w_fd): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (si, x) in spaces.iter().enumerate() {
        for k in 0..6u64 {
            let seed = 1000 + 10 * si as u64 + k;
            let recipe = match k % 3 {
                0 => NormRecipe::Riemannian { q: None, spread: 0.3, seed },
                1 => NormRecipe::AlphaBeta { phi: vec![1.0, 0.0, 0.25], v0: None, spread: 0.3, seed },
                _ => NormRecipe::QuarticPerturbed {
                    epsilon: 0.1,
                    terms: QuarticTerms::Random { count: 3 },
                    spread: 0.3,
                    seed,
                },
            };
            let f = make_norm(&recipe, x).expect("norm");
            let count = if si == 2 && k == 5 { 1000 - pairs } else { 1000 / 18 };
            let mut rng = linalg::rng(seed);
            for _ in 0..count {
                let u = linalg::gaussian_vector(&mut rng, x.dim_m()) * rng.random_range(0.1..3.0);
                let g = f.gram(&u).expect("gram");
                let fu = f.eval(&u);
                w_id = w_id.max((u.dot(&(&g * &u)) - fu * fu).abs() / (fu * fu));
                let gm = f.gram(&-&u).expect("gram");
                w_rev = w_rev.max(linalg::max_abs(&(gm - &g)) / linalg::max_abs(&g));
                if matches!(f.kind(), NormKind::Riemannian | NormKind::AlphaBeta) {
                    let fd = f.gram_fd(&u, 1.0).expect("fd gram");
                    w_fd = w_fd.max(linalg::max_abs(&(fd - &g)) / linalg::max_abs(&g));
                }
                pairs += 1;
            }
        }
    }
    pass_if(
        pairs == 1000 && w_id < 1e-9 && w_rev < 1e-10 && w_fd < 1e-6,
        format!("{pairs} pairs: g_u(u,u)/F^2 {w_id:.1e}, g_-u vs g_u {w_rev:.1e}, fd vs closed form {w_fd:.1e}"),
    )
}

fn c9_u_solver() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut solves = 0;
    for (id, seed) in [(3u8, 1u64), (4, 2), (1, 3)] {
        let x = flatfinder::example_space(id, &ExampleParams { p: 2, q: 1 }).unwrap();
        let f = quartic(&x, 0.1, seed);
        let mut rng = linalg::rng(seed + 50);
        for _ in 0..60 {
            let u = linalg::gaussian_vector(&mut rng, x.dim_m());
            let v = linalg::gaussian_vector(&mut rng, x.dim_m());
            let g = f.gram(&u).unwrap();
            let big_u = curvature::u_tensor(&x, &f, &u, &v).unwrap();
            worst = worst.max(curvature::u_solver_residual(&x, &g, &u, &v, &big_u).unwrap());
            solves += 1;
        }
    }
    let g = Arc::new(LieAlgebra::build(Family::Su, 4).unwrap());
    let x = HomogeneousSpace::build(g, SubalgebraSpec::default()).unwrap();
    let f = make_norm(&NormRecipe::Riemannian { q: None, spread: 0.0, seed: 1 }, &x).unwrap();
    let datum = x.g().root_datum().unwrap();
    let mut zero: f64 = 0.0;
    let mut rng = linalg::rng(9);
    // Pairs of commuting vectors: two torus elements, and orthogonal root planes.
    let t = datum.cartan_basis.clone();
    let p13 = datum.plane(&[1, 0, -1, 0]).unwrap().basis();
    let p24 = datum.plane(&[0, 1, 0, -1]).unwrap().basis();
    for _ in 0..20 {
        for (a, b) in [(&t, &t), (&p13, &p24)] {
            let u = x.to_m(&(a * linalg::gaussian_vector(&mut rng, a.ncols())));
            let v = x.to_m(&(b * linalg::gaussian_vector(&mut rng, b.ncols())));
            if x.g().bracket(&x.to_g(&u), &x.to_g(&v)).unwrap().norm() > 1e-12 {
                return pass_if(false, "sampled pair does not commute".into());
            }
            let big_u = curvature::u_tensor(&x, &f, &u, &v).unwrap();
            zero = zero.max(big_u.norm() / (u.norm() * v.norm()));
            let g = f.gram(&u).unwrap();
            worst = worst.max(curvature::u_solver_residual(&x, &g, &u, &v, &big_u).unwrap());
            solves += 1;
        }
    }
    pass_if(
        worst < 1e-10 && zero < 1e-10,
        format!("{solves} solves, back-substitution residual {worst:.1e}; biinvariant commuting |U| {zero:.1e}"),
    )
}

fn random_space(rng: &mut rand_chacha::ChaCha8Rng) -> (HomogeneousSpace, Vec<f64>) {
    loop {
        let kind = rng.random_range(0..3);
        let (family, n) = match kind {
            0 => (Family::Su, rng.random_range(3..=5)),
            1 => (Family::Sp, rng.random_range(2..=3)),
            _ => (Family::So, rng.random_range(5..=7)),
        };
        let k = family.torus_coordinates(n);
        let mut w: Vec<i64> = (0..k).map(|_| rng.random_range(-3..=3)).collect();
        if family == Family::Su {
            let s: i64 = w[..k - 1].iter().sum();
            w[k - 1] = -s;
        }
        if w.iter().all(|a| *a == 0) {
            continue;
        }
        let mut pieces = vec![Piece::Circle { weights: w }];
        if family == Family::Su && rng.random_bool(0.5) {
            pieces.push(Piece::Block { family: BlockFamily::Su, indices: vec![0, 1] });
        }
        let mut e: Vec<f64> = (0..k).map(|_| f64::from(rng.random_range(0..2u8))).collect();
        if family == Family::Su && e.iter().sum::<f64>() as i64 % 2 == 1 {
            e[0] = 1.0 - e[0];
        }
        if e.iter().all(|a| *a == 0.0) {
            continue;
        }
        let g = Arc::new(LieAlgebra::build(family, n).unwrap());
        if let Ok(x) = HomogeneousSpace::build(g, SubalgebraSpec::new(pieces)) {
            return (x, e);
        }
    }
}

fn c10_fixed_points() -> Outcome {
    let x = flatfinder::example_space(2, &ExampleParams { p: 2, q: 1 }).unwrap();
    let iota = x.g().torus_element(&[0.0, 0.0, 1.0, 1.0], PI).unwrap();
    let expected = Mat::from_diagonal(&Vector::from_vec(vec![1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0]));
    // Realified: diag(A, A) for the complex diagonal A.
    let iota_ok = linalg::max_abs(&(&iota - &expected)) < 1e-12;
    let r = homspace::fixed_point_space(&x, &iota).unwrap();
    let c_dim = r.space.dim_h() + r.space.dim_m();
    let mut ok = iota_ok && c_dim == 7 && r.ranks_equal();
    let mut detail = format!(
        "su(4) involution: centralizer dim {c_dim}, ranks ({}, {}) vs ({}, {})",
        r.rank_total, r.rank_isotropy, r.rank_g, r.rank_h
    );
    let mut rng = linalg::rng(2024);
    let mut codims = Vec::new();
    for _ in 0..20 {
        let (x, e) = random_space(&mut rng);
        let iota = x.g().torus_element(&e, PI).unwrap();
        match homspace::fixed_point_space(&x, &iota) {
            Ok(r) => codims.push(r.codimension as i64),
            Err(err) => {
                ok = false;
                detail.push_str(&format!("; {}: {err}", x.g().label()));
            }
        }
    }
    ok &= codims.len() == 20 && codims.iter().all(|c| c % 2 == 0);
    detail.push_str(&format!("; codimensions {codims:?}"));
    pass_if(ok, detail)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 10] = [
        ("1 algebra foundation", c1_algebra, Some(Duration::from_secs(30))),
        ("2 Ad-speed reproduction", c2_speeds, None),
        ("3 sp(2) circle flat flag", c3_example3, Some(Duration::from_secs(10))),
        ("4 sp(3) flat flag", c4_example4, Some(Duration::from_secs(20))),
        ("5 g2 flat flag and blocks", c5_example5, Some(Duration::from_secs(60))),
        ("6 su(4) closure claims and flat flags", c6_examples12, None),
        ("7 (alpha,beta) comparison", c7_alpha_beta, None),
        ("8 fundamental tensor", c8_tensor, None),
        ("9 U-solver oracle", c9_u_solver, None),
        ("10 fixed-point machinery", c10_fixed_points, None),
    ];
    let mut failed = Vec::new();
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = budget.is_none_or(|b| took <= b);
        let passed = out.passed && in_time;
        let timing = match budget {
            Some(b) => format!("{:.2}s of {}s", took.as_secs_f64(), b.as_secs()),
            None => format!("{:.2}s", took.as_secs_f64()),
        };
        println!(
            "{} criterion {name} [{timing}]: {}",
            if passed { "PASS" } else { "FAIL" },
            out.detail
        );
        if !passed {
            failed.push(name);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
