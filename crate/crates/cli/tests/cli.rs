//! End-to-end tests of the binary: determinism, exit codes, and
//! checkpoint-resume through the command line.

use std::path::Path;
use std::process::{Command, Output};

fn kepmap(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kepmap"))
        .args(args)
        .current_dir(dir)
        .env_remove("KEPMAP_OUT")
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn regimes_rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for out in [&a, &b] {
        let res = kepmap(
            &[
                "regimes",
                "--set",
                "system=sun-jupiter",
                "--set",
                "grid.points=40",
                "--out",
                out.to_str().unwrap(),
            ],
            tmp.path(),
        );
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    assert_eq!(read(&a, "regimes.csv"), read(&b, "regimes.csv"));
    // manifests agree on the output hashes
    let ma: serde_json::Value = serde_json::from_slice(&read(&a, "manifest.json")).unwrap();
    let mb: serde_json::Value = serde_json::from_slice(&read(&b, "manifest.json")).unwrap();
    assert_eq!(ma["outputs"], mb["outputs"]);
}

#[test]
fn classical_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for (out, threads) in [(&a, "1"), (&b, "4")] {
        let res = kepmap(
            &[
                "classical-sim",
                "--set",
                "system=sun-jupiter",
                "--set",
                "n_traj=200",
                "--set",
                "max_kicks=5000",
                "--threads",
                threads,
                "--out",
                out.to_str().unwrap(),
            ],
            tmp.path(),
        );
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    assert_eq!(read(&a, "survival.csv"), read(&b, "survival.csv"));
    assert_eq!(read(&a, "escape.csv"), read(&b, "escape.csv"));
}

#[test]
fn classical_checkpoint_resume_matches_straight_run() {
    let tmp = tempfile::tempdir().unwrap();
    let straight = tmp.path().join("straight");
    let resumed = tmp.path().join("resumed");
    let chk = tmp.path().join("run.chk");
    let base = [
        "classical-sim",
        "--set",
        "system=sun-jupiter",
        "--set",
        "n_traj=100",
        "--set",
        "max_kicks=2000",
    ];

    let mut args: Vec<&str> = base.to_vec();
    args.extend(["--out", straight.to_str().unwrap()]);
    assert!(kepmap(&args, tmp.path()).status.success());

    let chk_set = format!("checkpoint=\"{}\"", chk.display());
    let mut args: Vec<&str> = base.to_vec();
    args.extend(["--set", &chk_set, "--set", "stop_after=37", "--out", "."]);
    let res = kepmap(&args, tmp.path());
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(chk.exists());

    let resume_set = format!("resume=\"{}\"", chk.display());
    let mut args: Vec<&str> = base.to_vec();
    args.extend(["--set", &resume_set, "--out", resumed.to_str().unwrap()]);
    let res = kepmap(&args, tmp.path());
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    assert_eq!(read(&straight, "survival.csv"), read(&resumed, "survival.csv"));
    assert_eq!(read(&straight, "escape.csv"), read(&resumed, "escape.csv"));
}

#[test]
fn unknown_config_key_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let res = kepmap(&["regimes", "--set", "sytem=sun-jupiter"], tmp.path());
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("sytem"));
}

#[test]
fn missing_quantum_params_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let res = kepmap(&["quantum-sim"], tmp.path());
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let out = blocker.join("sub"); // can't create a directory under a file
    let res = kepmap(
        &[
            "regimes",
            "--set",
            "system=sun-jupiter",
            "--set",
            "grid.points=2",
            "--out",
            out.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(res.status.code(), Some(4));
}

#[test]
fn config_file_plus_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.json");
    std::fs::write(
        &cfg,
        br#"{"command": "lifetime", "system": "sun-jupiter", "grid": {"points": 12}}"#,
    )
    .unwrap();
    let out = tmp.path().join("out");
    let res = kepmap(
        &[
            "--config",
            cfg.to_str().unwrap(),
            "--set",
            "grid.points=8",
            "--out",
            out.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = String::from_utf8(read(&out, "lifetime.csv")).unwrap();
    assert!(text.starts_with("mu,t_I_years,mechanism\n"));
    // 8 grid points plus inserted border rows
    let n_rows = text.lines().count() - 1;
    assert!((8..=12).contains(&n_rows), "{n_rows} rows");
}

#[test]
fn quantum_sim_runs_and_reports_fit() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let res = kepmap(
        &[
            "quantum-sim",
            "--set",
            "k=4",
            "--set",
            "omega=2e-7",
            "--set",
            "n_i=150",
            "--set",
            "n_periods=200",
            "--set",
            "lattice_pad=8",
            "--out",
            out.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let curve = String::from_utf8(read(&out, "ionization.csv")).unwrap();
    assert!(curve.starts_with("iteration,p_ion\n"));
    let dist = String::from_utf8(read(&out, "distribution.csv")).unwrap();
    assert!(dist.starts_with("N_phi,W\n"));
}
