use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn probe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squeeze-probe"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            l.split(',')
                .filter(|f| !f.is_empty())
                .map(|f| f.parse().unwrap())
                .collect()
        })
        .collect()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn dynamics_epr_plateau() {
    let o = probe(&[
        "dynamics",
        "--state",
        "epr",
        "--r",
        "5",
        "--alpha1",
        "1",
        "--alpha2",
        "1",
        "--dt",
        "0.025",
        "--consecutive",
        "--steps",
        "4000",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(
        text.lines().next().unwrap(),
        "t,abs_k1,abs_k2,abs_k12,abs_l12,re_k12,im_k12,re_l12,im_l12"
    );
    let data = rows(&text);
    assert_eq!(data.len(), 4001);
    let last = data.last().unwrap();
    assert!((last[0] - 0.05).abs() < 1e-12);
    assert!((last[4] - 0.817).abs() < 0.005, "{}", last[4]);
}

#[test]
fn dynamics_without_squeezing_is_monotone() {
    let o = probe(&[
        "dynamics", "--state", "epr", "--r", "0", "--dt", "0.1", "--steps", "200",
    ]);
    assert!(o.status.success());
    let data = rows(&stdout(&o));
    for w in data.windows(2) {
        for col in 1..=4 {
            assert!(
                w[1][col] <= w[0][col],
                "column {col} increases at t = {}",
                w[1][0]
            );
        }
    }
}

#[test]
fn output_is_reproducible() {
    let args = [
        "dynamics", "--state", "sts", "--r", "1", "--phi", "0.3", "--n1", "1", "--dt", "0.2",
        "--steps", "50",
    ];
    assert_eq!(probe(&args).stdout, probe(&args).stdout);
}

#[test]
fn malformed_config_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    fs::write(&path, "{\"state\": \"epr\", ").unwrap();
    let o = probe(&["dynamics", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    fs::write(
        &path,
        r#"{"state": "epr", "r": 1, "dt": 0.025, "consecutive": true}"#,
    )
    .unwrap();
    let from_file = json(&probe(&["measure", "--config", path.to_str().unwrap()]));
    assert!((from_file["measure"].as_f64().unwrap() - 4.29e-3).abs() < 1e-4);
    let overridden = json(&probe(&[
        "measure",
        "--config",
        path.to_str().unwrap(),
        "--r",
        "3",
    ]));
    assert!((overridden["measure"].as_f64().unwrap() - 0.22).abs() < 0.01);
}

#[test]
fn unknown_config_key_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    fs::write(&path, r#"{"state": "epr", "squeeze": 1}"#).unwrap();
    assert_eq!(
        probe(&["measure", "--config", path.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn unphysical_state_exits_2() {
    let o = probe(&[
        "dynamics",
        "--state",
        "custom",
        "--cov",
        "0.1,0.1,0,0",
        "--dt",
        "0.1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = probe(&[
        "measure", "--state", "sts", "--r", "1", "--n1", "-2", "--dt", "0.1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_arguments_exit_3() {
    assert_eq!(
        probe(&["dynamics", "--state", "epr", "--r", "x"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(probe(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(
        probe(&["dynamics", "--state", "epr", "--r", "1"])
            .status
            .code(),
        Some(3)
    );
    // closed forms need the first window to start at zero
    assert_eq!(
        probe(&["dynamics", "--state", "epr", "--r", "1", "--dt", "0.1", "--shift", "0.5"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn help_exits_0() {
    assert!(probe(&["--help"]).status.success());
    assert!(probe(&["measure", "--help"]).status.success());
}

#[test]
fn measure_mts() {
    let o = probe(&[
        "measure",
        "--state",
        "mts",
        "--r",
        "4",
        "--dt",
        "0.025",
        "--consecutive",
    ]);
    assert!(o.status.success());
    let v = json(&o);
    assert!((v["measure"].as_f64().unwrap() - 0.84).abs() < 0.01);
    assert_eq!(v["best_pair"], "II");
    let intervals = v["intervals"].as_array().unwrap();
    assert!(!intervals.is_empty());
    let gain: f64 = intervals.iter().map(|i| i["gain"].as_f64().unwrap()).sum();
    assert!((gain - v["measure"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn sweep_rows_sorted() {
    let o = probe(&[
        "sweep",
        "--state",
        "epr",
        "--r",
        "2",
        "--dt-min",
        "0.05",
        "--dt-max",
        "0.3",
        "--points",
        "6",
        "--points-per-window",
        "256",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "delta_t,measure,best_pair");
    let dts: Vec<f64> = lines
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(dts.len(), 6);
    assert!(dts.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn optimal_epr() {
    let v = json(&probe(&["optimal", "--state", "epr", "--r", "3"]));
    assert!((v["delta_t"].as_f64().unwrap() - 0.0676).abs() < 1e-3);
    assert_eq!(v["at_edge"], false);
}

fn synthetic(dir: &Path, pair: &str) -> std::path::PathBuf {
    let o = probe(&[
        "sweep",
        "--state",
        "epr",
        "--r",
        "3",
        "--dt-min",
        "0.0338",
        "--dt-max",
        "0.135",
        "--points",
        "5",
        "--log",
        "--points-per-window",
        "256",
    ]);
    assert!(o.status.success());
    let mut csv = String::from("delta_t,observed,pair\n");
    for line in stdout(&o).lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        csv.push_str(&format!("{},{},{}\n", f[0], f[1], pair));
    }
    let path = dir.join("synth.csv");
    fs::write(&path, csv).unwrap();
    path
}

#[test]
fn estimate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = synthetic(dir.path(), "");
    let o = probe(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--state",
        "epr",
        "--bracket",
        "0",
        "6",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert!((v["r_hat"].as_f64().unwrap() - 3.0).abs() < 1e-3);
    assert!(v["phi_hat"].is_null());
    assert!(v["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn strict_mode_promotes_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let input = synthetic(dir.path(), "II");
    let path = input.to_str().unwrap();
    // thermal mixtures cannot reproduce twin-beam data at every duration
    let relaxed = probe(&[
        "estimate",
        "--input",
        path,
        "--state",
        "mts",
        "--mismatch-threshold",
        "1e-4",
    ]);
    assert!(relaxed.status.success());
    let v = json(&relaxed);
    assert!(v["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .any(|w| w["kind"] == "model_mismatch"));
    let strict = probe(&[
        "estimate",
        "--input",
        path,
        "--state",
        "mts",
        "--mismatch-threshold",
        "1e-4",
        "--strict",
    ]);
    assert_eq!(strict.status.code(), Some(4));
    assert!(!strict.stdout.is_empty());
}

#[test]
fn estimate_rejects_bad_pair_label() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    fs::write(&path, "delta_t,observed,pair\n0.05,0.3,III\n").unwrap();
    assert_eq!(
        probe(&[
            "estimate",
            "--input",
            path.to_str().unwrap(),
            "--state",
            "epr"
        ])
        .status
        .code(),
        Some(3)
    );
}

#[test]
fn oracle_compare_summary() {
    let o = probe(&[
        "oracle",
        "--compare",
        "--state",
        "sts",
        "--r",
        "1",
        "--phi",
        "0.7854",
        "--modes",
        "20000",
        "--dt",
        "0.025",
        "--steps",
        "100",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().ends_with(",deviation"));
    let summary = text
        .lines()
        .find(|l| l.starts_with("# max_deviation,"))
        .unwrap();
    let dev: f64 = summary.split(',').nth(1).unwrap().parse().unwrap();
    assert!(dev < 1e-4, "{dev}");
    assert!(text
        .lines()
        .any(|l| l == "# within_tolerance,1.00000000000e-4,true"));
}

#[test]
fn oracle_accepts_delayed_schedule() {
    let o = probe(&[
        "oracle", "--state", "mts", "--r", "3", "--dt", "0.025", "--shift", "0.5", "--steps", "10",
        "--modes", "2000",
    ]);
    assert!(o.status.success());
    assert_eq!(rows(&stdout(&o)).len(), 11);
}

#[test]
fn dynamics_oracle_flag_matches_closed_form() {
    let common = ["--state", "epr", "--r", "1", "--dt", "0.1", "--steps", "20"];
    let closed = rows(&stdout(&probe(&[&["dynamics"][..], &common].concat())));
    let oracle = rows(&stdout(&probe(
        &[&["dynamics", "--oracle"][..], &common].concat(),
    )));
    for (c, o) in closed.iter().zip(&oracle) {
        for col in 1..=4 {
            assert!((c[col] - o[col]).abs() < 1e-4);
        }
    }
}

#[test]
fn approx_output_schema() {
    let o = probe(&[
        "approx", "--state", "epr", "--r", "3", "--dt", "0.025", "--steps", "2",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    assert!(last.ends_with(",,,,"));
    let l12: f64 = last.split(',').nth(4).unwrap().parse().unwrap();
    assert!((l12 - (-8.0 * 0.025f64.powi(2) * (-6.0f64).exp() / 2.0).exp()).abs() < 1e-12);
    let unequal = probe(&[
        "approx", "--state", "epr", "--r", "3", "--dt", "0.025", "--alpha2", "2",
    ]);
    assert_eq!(unequal.status.code(), Some(3));
}

#[test]
fn omega_c_rescales_input_times() {
    let scaled = probe(&[
        "measure",
        "--state",
        "epr",
        "--r",
        "3",
        "--dt",
        "0.0125",
        "--omega-c",
        "2",
    ]);
    let plain = probe(&["measure", "--state", "epr", "--r", "3", "--dt", "0.025"]);
    assert_eq!(json(&scaled)["measure"], json(&plain)["measure"]);
}

#[test]
fn thread_cap_is_validated() {
    let args = [
        "sweep", "--state", "epr", "--r", "2", "--dt-min", "0.05", "--dt-max", "0.3", "--points",
        "4",
    ];
    let capped = Command::new(env!("CARGO_BIN_EXE_squeeze-probe"))
        .args(args)
        .env("SQUEEZE_PROBE_THREADS", "1")
        .output()
        .unwrap();
    assert!(capped.status.success());
    assert_eq!(capped.stdout, probe(&args).stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_squeeze-probe"))
        .args(args)
        .env("SQUEEZE_PROBE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let o = probe(&[
        "dynamics",
        "--state",
        "epr",
        "--r",
        "1",
        "--dt",
        "0.1",
        "--steps",
        "10",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 12);
}
