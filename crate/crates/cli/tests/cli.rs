use std::process::{Command, Output};

use spherewave_core::grid::Field;
use spherewave_core::io::read_field;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spherewave")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn bessel_at_origin() {
    let o = run(&["bessel", "eval", "--a", "0", "--b", "0", "--rho", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1,0\n");
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"), "{}", stderr(&o));
}

#[test]
fn tail_scan_below_threshold_fails_with_regime() {
    let o = run(&["kernel", "scan", "--mode", "tail", "--j-min", "3", "--j-max", "4", "--r", "0.125"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("whenever 2^j > 1/r"), "{}", stderr(&o));
}

#[test]
fn malformed_config_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{ not json").unwrap();
    let o = run(&["wave", "solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("malformed JSON"), "{}", stderr(&o));
    let o = run(&["wave", "solve", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_output_to_stdout() {
    let o = run(&["--json", "--out", "-", "omega", "table", "--alpha", "1", "--dim", "2", "--xi-max", "1", "--samples", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!((rows[0]["re"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-14);
}

#[test]
fn file_outputs_have_manifests_and_repeat_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|k| dir.path().join(format!("sweep{k}.csv"))).collect();
    for p in &paths {
        let o = run(&[
            "--seed", "7", "--threads", "1", "--out", p.to_str().unwrap(),
            "sweep", "region", "--alpha", "-0.5,0.5", "--p", "1.2:0.4:2.4", "--random", "3", "--M", "32",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("alpha,r,s_total,p,ratio_max,inside_theory,knapp_slope\n"));
    assert_eq!(text.lines().count(), 9);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep0.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "sweep region");
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["params"]["alpha"], "-0.5,0.5");
}

#[test]
fn wave_solve_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("wave.json");
    std::fs::write(
        &cfg,
        r#"{"dim":2,"factors":[1,1],"M":32,"L":1.0,"T":1.0,"steps":128,
            "g":{"kind":"manufactured","k":[0.5,1.0],"omega":3.141592653589793}}"#,
    )
    .unwrap();
    let out = dir.path().join("u.bin");
    let o = run(&["--out", out.to_str().unwrap(), "wave", "solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let u: Field<f64> = read_field(std::io::BufReader::new(std::fs::File::open(&out).unwrap())).unwrap();
    // sin^2(pi T) = 0 at T = 1, so u(T) is close to zero
    assert!(u.sup_norm() < 1e-3, "{}", u.sup_norm());

    let o = run(&["--json", "wave", "solve", "--config", cfg.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["manufactured_error"].as_f64().unwrap() < 1e-2);

    let o = run(&["sobolev", "norm", "--field", out.to_str().unwrap(), "--s", "0.25,0.25", "--p", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).trim().parse::<f64>().unwrap() >= 0.0);
}

#[test]
fn selftest_subset() {
    let o = run(&["selftest", "--only", "1,3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("criterion  1 PASS") && text.contains("criterion  3 PASS"), "{text}");
    let o = run(&["selftest", "--only", "2"]);
    assert_eq!(o.status.code(), Some(1));
}
