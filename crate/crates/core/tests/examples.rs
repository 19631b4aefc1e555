use flagcurv::curvature::{self, Verdict};
use flagcurv::flatfinder::{self, ExampleParams, SearchConfig};
use flagcurv::minkowski::{make_norm, MinkowskiNorm, NormRecipe, QuarticTerms};
use flagcurv::{Exec, Family, LieAlgebra, Tolerances};
use flagcurv::homspace::HomogeneousSpace;

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
    .unwrap()
}

#[test]
fn g2_has_two_root_lengths_in_ratio_three() {
    let g = LieAlgebra::build(Family::G2, 0).unwrap();
    let planes = &g.root_datum().unwrap().planes;
    assert_eq!(planes.len(), 6);
    let mut lens: Vec<f64> = planes.iter().map(|p| p.length_sq()).collect();
    lens.sort_by(f64::total_cmp);
    let (short, long) = (lens[0], lens[5]);
    assert!((long / short - 3.0).abs() < 1e-10);
    assert_eq!(lens.iter().filter(|l| (*l - short).abs() < 1e-10).count(), 3);
}

#[test]
fn every_example_gives_a_flat_flag() {
    for id in 1..=5u8 {
        let params = ExampleParams::default_for(id);
        let x = flatfinder::example_space(id, &params).unwrap();
        for seed in [2u64, 9] {
            let f = quartic(&x, 0.12, seed);
            let ex = flatfinder::construct_example_flat(id, &params, &x, &f, seed).unwrap();
            let cert = curvature::flag_curvature(&x, &ex.norm, &ex.u, &ex.v).unwrap();
            assert_eq!(cert.verdict, Verdict::ZeroFlag, "example {id} seed {seed}");
            assert!(cert.curvature.unwrap().abs() < 1e-6);
            assert!(cert.commutator_residual < 1e-10);
        }
    }
}

#[test]
fn example_three_over_several_parameters() {
    for (p, q) in [(2, 1), (5, 2), (4, 3)] {
        let params = ExampleParams { p, q };
        let x = flatfinder::example_space(3, &params).unwrap();
        let f = quartic(&x, 0.2, 4);
        let ex = flatfinder::construct_example_flat(3, &params, &x, &f, 4).unwrap();
        assert!(curvature::flag_curvature(&x, &ex.norm, &ex.u, &ex.v).unwrap().is_zero_flag());
    }
}

#[test]
fn excluded_parameters_are_rejected() {
    assert!(flatfinder::example_space(3, &ExampleParams { p: 3, q: 1 }).is_err());
    assert!(flatfinder::example_space(3, &ExampleParams { p: 1, q: 2 }).is_err());
    assert!(flatfinder::example_space(1, &ExampleParams { p: 1, q: 1 }).is_err());
    assert!(flatfinder::example_space(1, &ExampleParams { p: 4, q: 2 }).is_err());
}

#[test]
fn the_stated_inclusion_for_u_holds_in_example_one() {
    let params = ExampleParams::default_for(1);
    let x = flatfinder::example_space(1, &params).unwrap();
    let f = quartic(&x, 0.1, 5);
    let ex = flatfinder::construct_example_flat(1, &params, &x, &f, 5).unwrap();
    let res = flatfinder::verify_closure_claims(&x, &ex.claims, &ex.u, &ex.v, &Tolerances::default()).unwrap();
    let by_label = |l: &str| res.iter().find(|r| r.label == l).unwrap().passed;
    assert!(by_label("[u,m']_m in m'"));
    assert!(by_label("[v,m']_m in m' + m1"));
}

#[test]
fn search_finds_a_flat_flag_on_sp2() {
    let params = ExampleParams::default_for(3);
    let x = flatfinder::example_space(3, &params).unwrap();
    let f = quartic(&x, 0.1, 6);
    let cfg = SearchConfig { budget: 16, seed: 2, ..SearchConfig::default() };
    let a = flatfinder::generic_flat_search(&x, &f, &cfg, &Tolerances::default()).unwrap();
    assert!(!a.certified.is_empty());
    for hit in &a.certified {
        assert!(hit.certificate.is_zero_flag());
    }
    let seq = SearchConfig { exec: Exec::Sequential, ..cfg };
    let b = flatfinder::generic_flat_search(&x, &f, &seq, &Tolerances::default()).unwrap();
    let starts = |r: &flatfinder::SearchResult| r.certified.iter().map(|h| h.start).collect::<Vec<_>>();
    assert_eq!(starts(&a), starts(&b));
}

#[test]
fn example_two_circle_fixing_u() {
    use flagcurv::homspace;
    let x = flatfinder::example_space(2, &ExampleParams::default_for(2)).unwrap();
    let speeds = |w: &[i64]| -> Vec<(Vec<i64>, i64)> {
        homspace::ad_rotation_speeds(&x, w)
            .unwrap()
            .into_iter()
            .map(|s| (s.root, s.speed.abs()))
            .collect()
    };
    let of = |list: &[(Vec<i64>, i64)], root: [i64; 4]| list.iter().find(|(r, _)| r[..] == root[..]).unwrap().1;
    // u lies in g13, so the printed circle does not fix it.
    let printed = speeds(&[0, -2, 1, 1]);
    assert_eq!(of(&printed, [1, 0, -1, 0]), 1);
    let fixing = speeds(&[-1, 3, -1, -1]);
    for root in [[1, 0, -1, 0], [1, 0, 0, -1], [0, 0, 1, -1]] {
        assert_eq!(of(&fixing, root), 0);
    }
    for root in [[0, 1, 0, -1], [0, 1, -1, 0]] {
        assert_eq!(of(&fixing, root), 4);
    }
}
