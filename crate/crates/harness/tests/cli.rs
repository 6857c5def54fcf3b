use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_inertia-id"));
    c.env_remove("INERTIA_ID_SEED");
    c
}

fn small_run(out: &Path) -> Command {
    let mut c = bin();
    c.args([
        "run",
        "--satellite",
        "cubesat",
        "--profile",
        "chirp",
        "--mode",
        "static",
        "--seeds",
        "2",
    ])
    .args(["--horizon", "30", "--out"])
    .arg(out);
    c
}

#[test]
fn run_writes_results_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let status = small_run(dir.path()).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let results = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    let lines: Vec<&str> = results.lines().collect();
    assert_eq!(
        lines[0],
        "satellite,profile,inertia_mode,estimator,seed,error,cond_number,wall_time_s"
    );
    assert_eq!(lines.len(), 1 + 4);
    assert!(!results.contains('\r'));
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2);
}

#[test]
fn env_seed_changes_results() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    small_run(a.path()).status().unwrap();
    small_run(b.path())
        .env("INERTIA_ID_SEED", "7")
        .status()
        .unwrap();
    let ra = std::fs::read(a.path().join("results.csv")).unwrap();
    let rb = std::fs::read(b.path().join("results.csv")).unwrap();
    assert_ne!(ra, rb);
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "horizon = soon\n").unwrap();
    let out = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.cfg:1"));
    let status = bin()
        .args(["run", "--profile", "square-wave"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(1));
    let status = bin().args(["frobnicate"]).output().unwrap().status;
    assert_eq!(status.code(), Some(1));
}

#[test]
fn failed_runs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // two samples are too few for the least-squares differencing
    let status = bin()
        .args([
            "run",
            "--satellite",
            "cubesat",
            "--profile",
            "sine",
            "--mode",
            "static",
            "--seeds",
            "1",
        ])
        .args(["--horizon", "0.2", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let results = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert!(results.contains("CubeSat,sine,static,LS,0,,,"));
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.cfg");
    std::fs::write(
        &cfg,
        "satellite = microsat\nprofile = prbs\nprofile = sine\nmode = step\nestimator = EKF\nseed = 5\nhorizon = 20\n",
    )
    .unwrap();
    let status = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .args(["--no-noise", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let results = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    let rows: Vec<&str> = results.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("Microsat,prbs,step,EKF,5,"));
    assert!(rows[1].starts_with("Microsat,sine,step,EKF,5,"));
}

#[test]
fn summarize_round_trips_a_results_file() {
    let dir = tempfile::tempdir().unwrap();
    small_run(dir.path()).status().unwrap();
    let out = dir.path().join("again.csv");
    let status = bin()
        .args(["summarize", "--in"])
        .arg(dir.path().join("results.csv"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(
        std::fs::read(&out).unwrap(),
        std::fs::read(dir.path().join("summary.csv")).unwrap()
    );
}

#[test]
fn profile_dump_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("prbs.csv");
    let status = bin()
        .args(["profile-dump", "--kind", "prbs", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,tau_x,tau_y,tau_z\n"));
    assert_eq!(text.lines().count(), 1 + 3000);

    let status = bin()
        .args([
            "sweep",
            "--satellite",
            "cubesat",
            "--profile",
            "chirp",
            "--seeds",
            "2",
        ])
        .args(["--durations", "10,30", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let sweep = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = sweep.lines().collect();
    assert_eq!(lines[0], "duration_s,estimator,n,mean_pct,std_pct");
    assert_eq!(lines.len(), 1 + 4);
}
