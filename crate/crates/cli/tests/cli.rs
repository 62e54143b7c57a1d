use std::fs;
use std::process::{Command, Output};

use ces_interp::funcore::StepFunction;
use ces_interp::norms::{ces_norm, QuadConfig};
use ces_interp_cli::funcfile;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ces-interp"));
    c.env_remove("CES_INTERP_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV with a header line.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn verify_identities_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&["verify", "--suite", "identities", "--seed", "7", "--out-dir", d]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = fs::read_to_string(dir.path().join("identities-seed7.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["suite"], "identities");
    assert_eq!(v["seed"], 7);
    let asserts = v["assertions"].as_array().unwrap();
    assert!(!asserts.is_empty());
    for a in asserts {
        assert_eq!(a["pass"], true);
        assert!(a["paper_ref"].as_str().is_some_and(|s| !s.is_empty()));
        assert!(a["margin"].as_f64().is_some());
    }
}

#[test]
fn verify_ap_records_bound() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["verify", "--suite", "ap", "--p", "2", "--count", "3"])
        .env("CES_INTERP_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("ap-seed7.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let worst = &v["assertions"][0]["worst"];
    assert!(worst["observed"].as_f64().unwrap() <= 2.0);
    let csv = fs::read_to_string(dir.path().join("ap.csv")).unwrap();
    assert!(csv.starts_with("parameter,value_lhs,value_rhs,bound,pass"));
}

#[test]
fn verify_exit_codes() {
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["verify"]).status.code(), Some(2));

    // a two-point rule cannot resolve the norms, so the embedding checks fail
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"quad": {"gauss_order": 2, "refine_levels": 2, "log_grid_points": 400, "rel_tol": 1e-9}}"#,
    )
    .unwrap();
    let o = run(&[
        "verify",
        "--suite",
        "embeddings",
        "--count",
        "5",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn kcurve_examples() {
    let o = run(&["kcurve", "--breaks", "1", "--values", "1", "--couple", "l1-l1inv", "--t", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o));
    let k: f64 = r[0][1].parse().unwrap();
    assert!((k - (0.5 + 0.5 * 2f64.ln())).abs() < 1e-15);
    assert!((k - 0.84657).abs() < 1e-5);

    let o = run(&["kcurve", "--seq", "1", "--couple", "discrete", "--t", "2"]);
    let k: f64 = rows(&stdout(&o))[0][1].parse().unwrap();
    assert_eq!(k, 1.0);

    let o = run(&[
        "kcurve", "--breaks", "0.3,1", "--values", "2,1", "--couple", "ces", "--method", "lp",
        "--per-decade", "10",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let mut checked = 0;
    for r in rows(&stdout(&o)) {
        if r[2].is_empty() {
            continue;
        }
        let v: Vec<f64> = r[1..].iter().map(|x| x.parse().unwrap()).collect();
        assert!(v[1] <= v[0] && v[0] <= v[2] * (1.0 + 1e-9), "{r:?}");
        checked += 1;
    }
    assert!(checked > 10);
}

#[test]
fn kcurve_rejects_invalid_pairings() {
    let o = run(&["kcurve", "--breaks", "1", "--values", "1", "--couple", "ces"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["kcurve", "--breaks", "1", "--values", "1", "--couple", "ces:one"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["kcurve", "--seq", "1", "--couple", "ces", "--t", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn function_files_round_trip_norms() {
    let f = StepFunction::unit(vec![0.0, 0.1, 1.0 / 3.0, 1.0], vec![2.5, 1.0 / 7.0, 3.0]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.txt");
    fs::write(&path, funcfile::write(&f)).unwrap();
    let p = path.to_str().unwrap();
    let a = run(&["norm", "--func", p, "--space", "ces", "--p", "2"]);
    let b = run(&["norm", "--func", p, "--space", "ces", "--p", "2"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: f64 = rows(&stdout(&a))[0][2].parse().unwrap();
    assert_eq!(v, ces_norm(&f, 2.0, &QuadConfig::default()).unwrap());

    let o = run(&["norm", "--breaks", "1", "--values", "1", "--space", "identity", "--p", "2"]);
    let v: f64 = rows(&stdout(&o))[0][2].parse().unwrap();
    assert!((v - 6f64.sqrt()).abs() < 1e-12);
}

#[test]
fn sweeps_and_tau() {
    let o = run(&["sweep", "--family", "fh"]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 10);
    assert!(r.iter().all(|x| x[4] == "true"));
    let last: f64 = r[9][3].parse().unwrap();
    assert!(last > 1e3);

    let o = run(&["tau"]);
    let r = rows(&stdout(&o));
    let v: Vec<f64> = r[0].iter().map(|x| x.parse().unwrap()).collect();
    assert!((v[0] - 0.689045060788817).abs() < 1e-12);
    assert!((v[1] - v[2]).abs() < 1e-12);
    assert_eq!(run(&["tau", "--t", "-1"]).status.code(), Some(2));
}
