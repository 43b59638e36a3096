use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SCENARIO: &str = r#"
kind = "iid_gaussian"
p = 16
support = [2, 9]
amplitudes = { fixed = [1.0, 3.0] }
snr_db = 20.0
n_max = 120
seed = 5
trials = 3
"#;

fn olspice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_olspice"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn setup() -> (TempDir, PathBuf) {
    let dir = TempDir::new().unwrap();
    let scenario = dir.path().join("scenario.toml");
    std::fs::write(&scenario, SCENARIO).unwrap();
    (dir, scenario)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn run_ok(scenario: &Path, out: &Path, extra: &[&str]) -> String {
    let mut args = vec![
        "run",
        "--scenario",
        path_str(scenario),
        "--estimators",
        "olspice:L=1,ollasso:feasible,ollasso:infeasible,olrls:lambda=1,olrls:oracle",
        "--out",
        path_str(out),
    ];
    args.extend_from_slice(extra);
    let output = olspice(&args);
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    std::fs::read_to_string(out).unwrap()
}

#[test]
fn run_writes_six_column_csv_and_sidecar() {
    let (dir, scenario) = setup();
    let out = dir.path().join("results.csv");
    let csv = run_ok(&scenario, &out, &["--zero-hold", "5"]);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "estimator,n,nmse_db,var,bias2,trials"
    );
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.split(',').count() == 6));
    // zero estimate during the hold window means NMSE = 0 dB
    assert!(rows.iter().any(|r| r.starts_with("olspice:L=1,5,0,")));

    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("results.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["config"]["scenario"]["seed"], 5);
    assert_eq!(sidecar["config"]["options"]["zero_hold"], 5);
    assert_eq!(sidecar["oracle_estimators"].as_array().unwrap().len(), 2);
    assert!(sidecar["runtime"]["seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn same_seed_gives_identical_csv() {
    let (dir, scenario) = setup();
    let a = run_ok(
        &scenario,
        &dir.path().join("a.csv"),
        &["--trials", "10", "--seed", "9"],
    );
    let b = run_ok(
        &scenario,
        &dir.path().join("b.csv"),
        &["--trials", "10", "--seed", "9"],
    );
    let c = run_ok(
        &scenario,
        &dir.path().join("c.csv"),
        &["--trials", "10", "--seed", "10"],
    );
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn replay_reproduces_run() {
    let (dir, scenario) = setup();
    let out = dir.path().join("first.csv");
    let first = run_ok(&scenario, &out, &["--snapshots", "all"]);
    let again = dir.path().join("again.csv");
    let output = olspice(&[
        "replay",
        "--sidecar",
        path_str(&dir.path().join("first.json")),
        "--out",
        path_str(&again),
    ]);
    assert!(output.status.success());
    assert_eq!(std::fs::read_to_string(&again).unwrap(), first);
    assert_eq!(first.lines().count(), 1 + 5 * 120);
}

#[test]
fn snr_sweep_uses_snr_axis() {
    let (dir, scenario) = setup();
    let out = dir.path().join("sweep.csv");
    let csv = run_ok(
        &scenario,
        &out,
        &["--snr-sweep", "0:30:5", "--fixed-n", "60"],
    );
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "estimator,snr_db,nmse_db,var,bias2,trials"
    );
    assert_eq!(lines.count(), 5 * 7);
}

#[test]
fn json_scenario_with_noise_free_stream() {
    let dir = TempDir::new().unwrap();
    let scenario = dir.path().join("scenario.json");
    std::fs::write(
        &scenario,
        r#"{"kind":"iid_gaussian","p":4,"support":[1],"amplitudes":{"fixed":[3.0]},
            "snr_db":"inf","n_max":10,"seed":0,"trials":1}"#,
    )
    .unwrap();
    let out = dir.path().join("r.csv");
    let output = olspice(&[
        "run",
        "--scenario",
        path_str(&scenario),
        "--estimators",
        "olspice:L=50",
        "--out",
        path_str(&out),
        "--snapshots",
        "all",
    ]);
    assert!(output.status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let last = csv.lines().last().unwrap();
    let nmse_db: f64 = last.split(',').nth(2).unwrap().parse().unwrap();
    assert!(nmse_db < -100.0, "{last}");
}

#[test]
fn config_errors_exit_with_2() {
    let (dir, scenario) = setup();
    let out = dir.path().join("r.csv");
    let s = path_str(&scenario);
    let o = path_str(&out);
    let cases: Vec<Vec<&str>> = vec![
        vec![
            "run",
            "--scenario",
            s,
            "--estimators",
            "olspice:L=0",
            "--out",
            o,
        ],
        vec!["run", "--scenario", s, "--estimators", "nope", "--out", o],
        vec![
            "run",
            "--scenario",
            "/no/such/file.toml",
            "--estimators",
            "olspice",
            "--out",
            o,
        ],
        vec![
            "run",
            "--scenario",
            s,
            "--estimators",
            "olspice",
            "--out",
            o,
            "--snr-sweep",
            "0:30",
        ],
        vec![
            "run",
            "--scenario",
            s,
            "--estimators",
            "olspice",
            "--out",
            o,
            "--trials",
            "0",
        ],
        vec![
            "run",
            "--scenario",
            s,
            "--estimators",
            "olspice",
            "--out",
            o,
            "--snapshots",
            "some",
        ],
        vec![
            "run",
            "--scenario",
            s,
            "--estimators",
            "olspice",
            "--out",
            o,
            "--fixed-n",
            "10",
        ],
        vec!["replay", "--sidecar", "/no/such/sidecar.json", "--out", o],
        vec!["run"],
    ];
    for args in cases {
        let output = olspice(&args);
        assert_eq!(output.status.code(), Some(2), "{args:?}");
    }
    assert!(!out.exists());
}

#[test]
fn unwritable_output_exits_with_3() {
    let (dir, scenario) = setup();
    let out = dir.path().join("missing-dir").join("r.csv");
    let output = olspice(&[
        "run",
        "--scenario",
        path_str(&scenario),
        "--estimators",
        "olspice",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(output.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&output.stderr).contains("missing-dir"));
}

#[test]
fn shipped_scenarios_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        olspice::ScenarioSpec::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert_eq!(count, 7);
}
