use std::process::{Command, Output};

use serde_json::Value;

fn lpcrit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpcrit"))
        .args(args)
        .env_remove("LPCRIT_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn assertive_pair_prints_a_bound() {
    let out = lpcrit(&["verify-criterion", "--t", "1.5707963", "--s", "1", "--p", "2", "--fn", "box:0:1"]);
    assert_eq!(code(&out), 0);
    let bound = json(&out)["bound"].as_f64().unwrap();
    assert!((bound - 6.425).abs() < 0.01 * 6.425, "bound {bound}");
}

#[test]
fn violated_pairs_exit_with_verdict_code() {
    for t in ["3.14159265358979", "0", "pi", "-2pi"] {
        let out = lpcrit(&["verify-criterion", "--t", t, "--s", "1", "--p", "2", "--fn", "box:0:1"]);
        assert_eq!(code(&out), 2, "t = {t}");
        assert_eq!(json(&out)["verdict"], "violated");
    }
}

#[test]
fn one_d_report_has_half_shift() {
    let out = lpcrit(&["counterexample", "--kind", "one_d_pi", "--p", "2", "--M", "1"]);
    assert_eq!(code(&out), 3);
    let r = json(&out);
    let shift = &r["shift"][0]["pth_power"];
    assert!((shift["lower"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((shift["upper"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(r["trichotomy"], true);
}

#[test]
fn lattice_report_and_refusal() {
    let out = lpcrit(&["counterexample", "--kind", "lattice_nd", "--n", "2", "--gamma", "0.7", "--p", "1", "--M", "5"]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["trichotomy"], true);
    let out = lpcrit(&["counterexample", "--kind", "lattice_nd", "--gamma", "0.6", "--n", "2"]);
    assert_eq!(code(&out), 64);
}

#[test]
fn tools_print_values() {
    let out = lpcrit(&["lattice-count", "--n", "2", "--k", "7", "--orthant"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "8");

    let out = lpcrit(&["trig-decomp", "--b", "1,1"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Q1 = cos(x2)") && text.contains("Q2 = cos(x1)"), "{text}");
    assert!(text.contains("sup|Q1|"), "{text}");

    let out = lpcrit(&["simplex", "--n", "2", "--a", "1", "--volume"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("volume = 0.5"));
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["verify-criterion", "--t", "1", "--s", "1", "--p", "0.5", "--fn", "box:0:1"][..],
        &["verify-criterion", "--t", "abc", "--s", "1", "--fn", "box:0:1"],
        &["counterexample", "--kind", "nope"],
        &["counterexample", "--kind", "one_d_pi", "--gamma", "0.7"],
        &["lattice-count", "--n", "2"],
        &["frobnicate"],
        &[],
    ] {
        assert_eq!(code(&lpcrit(args)), 64, "{args:?}");
    }
    assert_eq!(code(&lpcrit(&["--help"])), 0);
}

#[test]
fn config_file_supplies_flags_and_cli_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"command": "verify-criterion", "t": "pi/2", "s": 1, "p": 2, "fn": "box:0:1"}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = lpcrit(&["--config", cfg]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["bound"].as_f64().unwrap().is_finite());

    let out = lpcrit(&["--config", cfg, "verify-criterion", "--t", "pi"]);
    assert_eq!(code(&out), 2);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"command": "simplex", "volume": true, "bogus": 1}"#).unwrap();
    assert_eq!(code(&lpcrit(&["--config", bad.to_str().unwrap()])), 64);
}

#[test]
fn output_files_are_written_and_reproducible() {
    let runs: Vec<_> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let out = lpcrit(&[
                "counterexample",
                "--kind",
                "one_d_pi",
                "--M",
                "1,2",
                "--out-dir",
                dir.path().to_str().unwrap(),
            ]);
            assert_eq!(code(&out), 3);
            let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
            (out.stdout, read("report.json"), read("layers.csv"), read("mass.svg"), read("norms.svg"))
        })
        .collect();
    assert_eq!(runs[0], runs[1]);

    let (_, report, csv, mass, norms) = &runs[0];
    let report: Value = serde_json::from_slice(report).unwrap();
    assert_eq!(report["kind"], "one_d_pi");
    let csv = String::from_utf8_lossy(csv);
    assert_eq!(
        csv.lines().next(),
        Some("layer,partial_mass_lower,partial_sine_upper,partial_shift_upper")
    );
    assert!(csv.lines().count() > 20);
    for svg in [mass, norms] {
        let svg = String::from_utf8_lossy(svg);
        assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
    }
}

#[test]
fn csv_without_out_dir_is_refused() {
    let out = lpcrit(&["counterexample", "--kind", "one_d_pi", "--format", "csv"]);
    assert_eq!(code(&out), 64);
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["counterexample", "--kind", "lattice_nd", "--n", "2", "--gamma", "0.8", "--p", "1", "--M", "2"];
    let one = Command::new(env!("CARGO_BIN_EXE_lpcrit"))
        .args(args)
        .env("LPCRIT_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_lpcrit"))
        .args(args)
        .env("LPCRIT_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(code(&one), 3);
    assert_eq!(one.stdout, many.stdout);

    let bad = Command::new(env!("CARGO_BIN_EXE_lpcrit"))
        .args(args)
        .env("LPCRIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 64);
}
