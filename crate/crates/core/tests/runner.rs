//! Runner and CLI behaviour end to end.

use std::fs;
use std::path::Path;
use std::process::Command;

use dislac::runner::{run_experiment, ExperimentName, ExperimentSpec, RunManifest, RunnerError};
use serde_json::{json, Value};

fn spec(name: ExperimentName, seed: u64, dir: &Path, overrides: Value) -> ExperimentSpec {
    ExperimentSpec::with_defaults(name, seed, dir)
        .with_overrides(overrides)
        .unwrap()
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap()
}

#[test]
fn delay_doppler_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let m = run_experiment(&spec(
        ExperimentName::DelayDoppler,
        1,
        dir.path(),
        json!({}),
    ))
    .unwrap();
    assert_eq!(m.artifacts, ["delay_doppler.csv"]);
    let csv = read(&m.artifact_paths()[0]);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sat_id,zenith_deg,differential_delay_us,doppler_hz,delay_ok,doppler_ok"
    );
    assert_eq!(lines.count(), 200);
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
}

#[test]
fn same_spec_twice_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let overrides = json!({ "instances": 2, "n_sats": [2, 3] });
    let m1 = run_experiment(&spec(
        ExperimentName::BeamformSweep,
        8,
        a.path(),
        overrides.clone(),
    ))
    .unwrap();
    let m2 = run_experiment(&spec(ExperimentName::BeamformSweep, 8, b.path(), overrides)).unwrap();
    for (x, y) in m1.artifact_paths().iter().zip(m2.artifact_paths()) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
    }
    let sweep = read(&m1.artifact_paths()[0]);
    assert_eq!(sweep.lines().next().unwrap(), "scheme,S,U,sum_rate_bps");
    assert_eq!(sweep.lines().count(), 1 + 2 * 4);
}

#[test]
fn seeds_change_random_experiments_only() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name, seed, sub: &str| {
        let m = run_experiment(&spec(name, seed, &dir.path().join(sub), json!({}))).unwrap();
        read(&m.artifact_paths()[0])
    };
    assert_ne!(
        run(ExperimentName::DelayDoppler, 1, "a"),
        run(ExperimentName::DelayDoppler, 2, "b")
    );
    assert_eq!(
        run(ExperimentName::WaveformSweep, 1, "c"),
        run(ExperimentName::WaveformSweep, 2, "d")
    );
}

#[test]
fn manifest_reproduces_the_run_under_other_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = spec(
        ExperimentName::SensingMc,
        3,
        &dir.path().join("first"),
        json!({ "trials": 16, "n_antennas": [2, 3] }),
    );
    s.threads = Some(1);
    let first = run_experiment(&s).unwrap();
    let text = read(&first.path());
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["experiment"], "sensing-mc");
    assert_eq!(doc["master_seed"], 3);
    assert_eq!(doc["sensing-mc"]["trials"], 16);
    assert_eq!(doc["artifacts"], json!(["sensing_mc.csv"]));
    for p in first.artifact_paths() {
        assert!(p.exists());
    }

    let mut again = RunManifest::read(&first.path()).unwrap();
    assert_eq!(again.spec, s);
    again.spec.output_dir = dir.path().join("second");
    again.spec.threads = Some(3);
    let second = run_experiment(&again.spec).unwrap();
    assert_eq!(
        fs::read(&first.artifact_paths()[0]).unwrap(),
        fs::read(&second.artifact_paths()[0]).unwrap()
    );
    let csv = read(&second.artifact_paths()[0]);
    assert_eq!(
        csv.lines().next().unwrap(),
        "estimator,n_antennas,trials,rmse_over_delta_r,discarded"
    );
    assert_eq!(csv.lines().count(), 1 + 2 * 3);
}

#[test]
fn errors_are_structured() {
    let err = ExperimentSpec::parse("experiment = \"fig-9\"\n").unwrap_err();
    assert_eq!(err.code(), "unknown_experiment");
    for name in ExperimentName::ALL {
        assert!(err.to_string().contains(name.as_str()));
    }

    let err = ExperimentSpec::parse(
        "experiment = \"overhead-sweep\"\n[overhead-sweep]\nn_users = [4, \"x\"]\n",
    )
    .unwrap_err();
    match err {
        RunnerError::InvalidParameter { path, .. } => assert_eq!(path, "overhead-sweep.n_users[1]"),
        other => panic!("{other}"),
    }

    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let err = run_experiment(&spec(
        ExperimentName::WaveformDesign,
        0,
        &blocker.join("out"),
        json!({}),
    ))
    .unwrap_err();
    assert_eq!(err.code(), "io");
}

fn dislac() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dislac"))
}

#[test]
fn cli_run_list_and_failures() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(
        &config,
        "experiment = \"waveform-design\"\n[waveform-design]\nr_max_km = [50.0, 100.0]\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = dislac()
        .arg("run")
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .args(["--seed", "9", "--threads", "2"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["experiment"], "waveform-design");
    let csv = read(&out_dir.join("waveform_design.csv"));
    assert_eq!(csv.lines().count(), 3);
    let manifest: Value = serde_json::from_str(&read(&out_dir.join("manifest.json"))).unwrap();
    assert_eq!(manifest["master_seed"], 9);
    assert_eq!(manifest["threads"], 2);

    // Rerun from the manifest alone.
    let rerun_dir = dir.path().join("rerun");
    let out = dislac()
        .arg("run")
        .arg("--config")
        .arg(out_dir.join("manifest.json"))
        .arg("--out")
        .arg(&rerun_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(read(&rerun_dir.join("waveform_design.csv")), csv);

    let list = dislac().arg("list").output().unwrap();
    assert!(list.status.success());
    let text = String::from_utf8(list.stdout).unwrap();
    for name in ExperimentName::ALL {
        assert!(text.contains(&format!("{}:", name.as_str())));
    }

    fs::write(
        &config,
        "experiment = \"sensing-mc\"\n[sensing-mc]\nsnr = 3\n",
    )
    .unwrap();
    let out = dislac()
        .arg("run")
        .arg("--config")
        .arg(&config)
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err: Value = serde_json::from_str(String::from_utf8(out.stderr).unwrap().trim()).unwrap();
    assert_eq!(err["error"], "invalid_parameter");
    assert!(err["message"].as_str().unwrap().contains("snr"));

    let out = dislac()
        .arg("run")
        .arg("--config")
        .arg(dir.path().join("missing.toml"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err: Value = serde_json::from_str(String::from_utf8(out.stderr).unwrap().trim()).unwrap();
    assert_eq!(err["error"], "io");
}
