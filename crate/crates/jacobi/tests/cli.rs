use std::process::Command;

use clap::Parser;
use jacobi::cli::{run, Cli, Outcome};
use jacobi::formats::{read_csv, CoeffTableJson, ExpPolyJson};
use jacobi::mc::MomentEstimate;
use jacobi_core::coefficients::{arcsine_coefficient, Route};
use jacobi_core::exact::rat;

fn jacobi(args: &[&str]) -> Outcome {
    let mut full = vec!["jacobi"];
    full.extend_from_slice(args);
    run(Cli::try_parse_from(full).unwrap()).unwrap()
}

#[test]
fn finite_rows() {
    let out = jacobi(&["--format", "csv", "finite", "--n", "1", "--m", "2", "--p", "2", "--d", "4", "--t", "0,1"]);
    let grid = read_csv(&out.stdout).unwrap();
    assert_eq!(grid.header, ["t", "M_1"]);
    assert_eq!(grid.rows[0], [0.0, 2.0]);
    assert!((grid.rows[1][1] - (1.0 + (-1.0f64).exp())).abs() < 1e-12);
}

#[test]
fn finite_json_is_exp_poly_and_starts_at_m() {
    let out = jacobi(&["--format", "json", "finite", "--n", "3", "--m", "3", "--p", "7/2", "--d", "9"]);
    let e = serde_json::from_str::<ExpPolyJson>(&out.stdout).unwrap().to_exp_poly().unwrap();
    assert_eq!(e.eval_exact_at_zero(), rat(3, 1));
}

#[test]
fn limit_at_zero_is_one() {
    let out = jacobi(&["--format", "csv", "limit", "--n", "1", "--lambda", "1", "--theta", "1/2", "--t", "0"]);
    assert_eq!(read_csv(&out.stdout).unwrap().rows, [[0.0, 1.0]]);
}

#[test]
fn coeff_emits_six_closed_form_entries() {
    let out = jacobi(&["--format", "json", "coeff", "--n", "3", "--lambda", "1", "--theta", "1/2"]);
    let json: CoeffTableJson = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(json.entries.len(), 6);
    for e in &json.entries {
        assert_eq!(e.route, "division");
        let v = jacobi::formats::parse_rational(&e.value).unwrap();
        assert_eq!(v, arcsine_coefficient(e.n, e.h, e.l));
    }
    let all = jacobi(&["--format", "json", "coeff", "--n", "3", "--all", "--lambda", "1", "--theta", "1/2"]);
    let all: CoeffTableJson = serde_json::from_str(&all.stdout).unwrap();
    assert_eq!(all.entries.len(), 10);
}

#[test]
fn coeff_output_reingested_reproduces_limit() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cache = cache.to_str().unwrap();
    let lt = ["--lambda", "2/3", "--theta", "2/5"];
    let coeff = jacobi(&[&["--format", "json", "--cache-dir", cache, "coeff", "--n", "4"][..], &lt].concat());
    let file = dir.path().join("table.json");
    std::fs::write(&file, &coeff.stdout).unwrap();
    let base = [&["--format", "json", "limit", "--n", "4", "--t", "0,1"][..], &lt].concat();
    let fresh = jacobi(&base);
    let cached = jacobi(&[&["--cache-dir", cache][..], &base].concat());
    let ingested = jacobi(&[&base[..], &["--table", file.to_str().unwrap()]].concat());
    assert_eq!(fresh, cached);
    assert_eq!(fresh, ingested);
    assert_eq!(std::fs::read_dir(cache).unwrap().count(), 1);
}

#[test]
fn coeff_routes_agree_through_the_cli() {
    let get = |route: &str| {
        let out = jacobi(&["--format", "json", "coeff", "--n", "3", "--lambda", "3/4", "--theta", "1/3", "--route", route]);
        serde_json::from_str::<CoeffTableJson>(&out.stdout).unwrap()
    };
    let reference = get("division");
    for route in Route::ALL {
        for e in get(route.as_str()).entries {
            let r = reference.entries.iter().find(|x| (x.n, x.h, x.l) == (e.n, e.h, e.l)).unwrap();
            assert_eq!(r.value, e.value, "{route}");
        }
    }
}

#[test]
fn verify_single_suite() {
    let out = jacobi(&["verify", "carlitz"]);
    assert_eq!(out.exit_code, 0);
    assert!(out.stdout.starts_with("PASS carlitz: 177 cases"), "{}", out.stdout);
}

#[test]
fn verify_failure_exits_one_with_counterexamples() {
    let out = jacobi(&["verify", "biane"]);
    assert_eq!(out.exit_code, 1);
    assert!(out.stdout.contains("counterexample: h=4 m=50"), "{}", out.stdout);
}

#[test]
fn simulate_json() {
    let out = jacobi(&[
        "--format", "json", "simulate", "--d", "4", "--m", "2", "--p", "2", "--t", "0", "--steps", "3", "--samples", "5",
        "--streams", "2", "--nmax", "2",
    ]);
    let est: Vec<MomentEstimate> = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(est, [MomentEstimate { n: 1, mean: 1.0, stderr: 0.0 }, MomentEstimate { n: 2, mean: 1.0, stderr: 0.0 }]);
}

#[test]
fn table_csv() {
    let out = jacobi(&["table", "--kind", "limit", "--nmax", "3", "--lambda", "1", "--theta", "1/2", "--t", "0,1"]);
    let grid = read_csv(&out.stdout).unwrap();
    assert_eq!(grid.header, ["t", "M_1", "M_2", "M_3"]);
    assert_eq!(grid.rows[0], [0.0, 1.0, 1.0, 1.0]);
    let finite = jacobi(&["table", "--kind", "finite", "--nmax", "2", "--m", "2", "--p", "5/2", "--d", "6", "--t", "0"]);
    assert_eq!(read_csv(&finite.stdout).unwrap().rows, [[0.0, 2.0, 2.0]]);
}

#[test]
fn rejects_bad_input() {
    let bad = |args: &[&str]| {
        let mut full = vec!["jacobi"];
        full.extend_from_slice(args);
        Cli::try_parse_from(full).map_err(anyhow::Error::from).and_then(run).is_err()
    };
    assert!(bad(&["limit", "--n", "1", "--lambda", "0.5", "--theta", "1/2"]));
    assert!(bad(&["limit", "--n", "1", "--lambda", "3/2", "--theta", "1/2"]));
    assert!(bad(&["finite", "--n", "1", "--m", "2", "--p", "7/3", "--d", "6"]));
    assert!(bad(&["finite", "--n", "1", "--m", "2", "--p", "2", "--d", "4", "--t", "-1"]));
    assert!(bad(&["verify", "nonexistent"]));
    assert!(bad(&["coeff", "--n", "2", "--lambda", "1", "--theta", "1/2", "--route", "bogus"]));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_jacobi");
    let ok = Command::new(bin).args(["limit", "--n", "2", "--lambda", "1", "--theta", "1/2"]).output().unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8(ok.stdout).unwrap().contains("stationary: 3/8"));
    let fail = Command::new(bin).args(["verify", "convergence"]).output().unwrap();
    assert_eq!(fail.status.code(), Some(1));
    let err = Command::new(bin).args(["limit", "--n", "1", "--lambda", "x", "--theta", "1/2"]).output().unwrap();
    assert_eq!(err.status.code(), Some(2));
}
