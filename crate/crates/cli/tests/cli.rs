use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn flagcurv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flagcurv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(name: &str) -> String {
    fixture(name).display().to_string()
}

#[test]
fn speeds_in_conventional_order() {
    let out = flagcurv(&["speeds", &path("sp3_speeds.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let speeds: Vec<i64> = r["result"]["speeds"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_i64().unwrap())
        .collect();
    assert_eq!(speeds, vec![2, 6, 4, 2, 5, 3, 7, 1]);
    assert_eq!(r["config"]["params"]["order"], "conventional");
}

#[test]
fn example_three_verifies() {
    let out = flagcurv(&["verify-example", &path("example.json"), "--id", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(&out);
    assert_eq!(r["result"]["certificate"]["verdict"], "zero_flag");
    assert_eq!(r["status"], "ok");
}

#[test]
fn example_five_reports_blocks() {
    let out = flagcurv(&["verify-example", &path("example.json"), "--id", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let blocks = r["result"]["symmetry"]["blocks"].as_array().unwrap();
    let expected: Vec<&str> = blocks.iter().map(|b| b["expected"].as_str().unwrap()).collect();
    assert_eq!(expected, vec!["Id", "-Id", "R(pi/3)"]);
    let dims: Vec<u64> = blocks.iter().map(|b| b["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![3, 4, 4]);
}

#[test]
fn example_one_reports_the_refuted_inclusion() {
    // The flag is flat, but the stated inclusion for v does not hold
    // literally, so verification exits with status 1.
    let out = flagcurv(&["verify-example", &path("example.json"), "--id", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["result"]["certificate"]["verdict"], "zero_flag");
    let claims = r["result"]["claims"].as_array().unwrap();
    let passed: Vec<bool> = claims.iter().map(|c| c["passed"].as_bool().unwrap()).collect();
    assert_eq!(passed, vec![true, false, true]);
    assert_eq!(r["status"], "failed");
}

#[test]
fn find_flat_on_su2_is_empty() {
    let out = flagcurv(&["find-flat", &path("su2_trivial.json"), "--budget", "6", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["certified"].as_array().unwrap().len(), 0);
    assert_eq!(r["config"]["params"]["budget"], 6);
    assert_eq!(r["config"]["params"]["seed"], 3);
}

#[test]
fn find_flat_is_byte_stable_across_modes() {
    let file = path("sp2_curvature.json");
    let mut spec: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    spec.as_object_mut().unwrap().remove("task");
    let tmp = std::env::temp_dir().join(format!("flagcurv-findflat-{}.json", std::process::id()));
    std::fs::write(&tmp, spec.to_string()).unwrap();
    let tmp = tmp.display().to_string();
    let a = flagcurv(&["find-flat", &tmp, "--budget", "12"]);
    let b = flagcurv(&["--sequential", "find-flat", &tmp, "--budget", "12"]);
    let c = flagcurv(&["find-flat", &tmp, "--budget", "12"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let r = report(&a);
    assert!(!r["result"]["certified"].as_array().unwrap().is_empty());
}

#[test]
fn curvature_and_alpha_beta() {
    let out = flagcurv(&["curvature", &path("sp2_curvature.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["certificate"]["verdict"], "zero_flag");

    let out = flagcurv(&["curvature", &path("su4_alpha_beta.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let d = r["result"]["alpha_beta"]["difference"].as_f64().unwrap();
    assert!(d < 1e-7);
}

#[test]
fn fixed_point_space_of_the_involution() {
    let out = flagcurv(&["check-space", &path("su4_involution.json")]);
    assert_eq!(out.status.code(), Some(0));
    let fp = &report(&out)["result"]["fixed_point_space"];
    assert_eq!(fp["algebra_dim"], 7);
    assert_eq!(fp["ranks_equal"], true);
    assert_eq!(fp["codimension"].as_u64().unwrap() % 2, 0);
}

#[test]
fn input_errors_exit_two_with_pointer() {
    let out = flagcurv(&["check-space", &path("bad_circle.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/isotropy/0/circle/weights"));
    assert!(out.stdout.is_empty());

    let out = flagcurv(&["check-space", &path("bad_key.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field `epsilon`"));

    let out = flagcurv(&["check-space", &path("does_not_exist.json")]);
    assert_eq!(out.status.code(), Some(2));

    let out = flagcurv(&["speeds", &path("sp2_curvature.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/task"));
}

#[test]
fn empty_isotropy_is_accepted() {
    let out = flagcurv(&["check-space", &path("su2_trivial.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["space"]["dim_h"], 0);
    assert_eq!(r["space"]["dim_m"], 3);
}
