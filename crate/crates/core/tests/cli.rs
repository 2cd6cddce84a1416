use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use spinnet::experiment::CSV_HEADER;
use spinnet::oracles::analytic::complete_graph_fidelity;

fn spinnet(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spinnet"));
    cmd.args(args).env_remove("SPINNET_WORKERS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    lines.map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn frozen_network_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = spinnet(
        &["--nodes", "4", "--xi", "0", "--steps", "10", "--realizations", "5", "--out", out],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&dir.path().join("N4_xi0.csv"));
    assert_eq!(rows.len(), 11);
    for r in rows {
        assert_eq!(r.len(), 14);
        assert_eq!(r[2].parse::<f64>().unwrap(), 1.0);
        assert!((r[6].parse::<f64>().unwrap() - 1.0).abs() <= 1e-12);
        for se in [3, 5, 7, 9, 11, 13] {
            assert_eq!(r[se], "");
        }
    }
    assert!(dir.path().join("manifest.txt").exists());
}

#[test]
fn complete_graph_single_realization_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = spinnet(
        &["--nodes", "32", "--xi", "1", "--realizations", "1", "--observables", "fidelity", "--out", out],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&dir.path().join("N32_xi1.csv"));
    assert_eq!(rows.len(), 1001);
    for r in rows {
        let t = r[0].parse::<f64>().unwrap() * 0.015;
        let f = r[2].parse::<f64>().unwrap();
        assert!((f - complete_graph_fidelity(32, t)).abs() <= 1e-9);
        assert_eq!(r[4], "");
    }
}

#[test]
fn invalid_parameter_exits_2_and_names_it() {
    let o = spinnet(&["--xi", "1.5"], &[]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("xi"));

    let o = spinnet(&["--nodes", "3"], &[]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("nodes"));

    let o = spinnet(&["--dt", "0"], &[]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("dt"));

    let o = spinnet(&["--ensemble", "thermal"], &[]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("temperature"));

    let o = spinnet(&["--steps", "2"], &[("SPINNET_WORKERS", "zero")]);
    assert_eq!(code(&o), 2);
}

#[test]
fn filesystem_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    let o = spinnet(
        &["--nodes", "4", "--steps", "2", "--realizations", "2", "--out", out.to_str().unwrap()],
        &[],
    );
    assert_eq!(code(&o), 3);
}

#[test]
fn oracle_check_guard_and_report() {
    let o = spinnet(&["--oracle-check", "--nodes", "7"], &[]);
    assert_eq!(code(&o), 2);

    let o = spinnet(
        &["--oracle-check", "--nodes", "3", "--xi", "0.3", "--steps", "10", "--realizations", "3000"],
        &[],
    );
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{stdout}");
    assert!(stdout.contains("PASS full-space N=3"));
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 5);
}

#[test]
fn manifest_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    let o = spinnet(
        &[
            "--nodes", "5", "--xi", "0.2,0.7", "--steps", "30", "--realizations", "12", "--seed", "42",
            "--bootstrap", "10", "--out", first.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = first.join("manifest.txt");
    let text = fs::read_to_string(&manifest).unwrap();
    for key in ["seed = 42", "run.version", "run.wall_time_s", "run.outputs = N5_xi0.2.csv,N5_xi0.7.csv"] {
        assert!(text.contains(key), "{key} missing from\n{text}");
    }
    let o = spinnet(
        &["--config", manifest.to_str().unwrap(), "--out", second.to_str().unwrap()],
        &[],
    );
    assert_eq!(code(&o), 0);
    for name in ["N5_xi0.2.csv", "N5_xi0.7.csv"] {
        assert_eq!(fs::read(first.join(name)).unwrap(), fs::read(second.join(name)).unwrap());
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "3"] {
        let out = dir.path().join(workers);
        let o = spinnet(
            &["--nodes", "6", "--steps", "40", "--realizations", "20", "--bootstrap", "8", "--out", out.to_str().unwrap()],
            &[("SPINNET_WORKERS", workers)],
        );
        assert_eq!(code(&o), 0);
        outputs.push(fs::read(out.join("N6_xi0.3.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn presets_and_thermal_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("preset");
    let o = spinnet(
        &["--preset", "fig4", "--nodes", "4", "--xi", "0.5", "--steps", "5", "--realizations", "3", "--out", out.to_str().unwrap()],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("preset = fig4"));
    assert!(manifest.contains("run.note = "));
    let r = &rows(&out.join("N4_xi0.5.csv"))[1];
    assert_eq!(r[2], "");
    assert!(!r[6].is_empty() && !r[8].is_empty() && !r[10].is_empty());

    let out = dir.path().join("thermal");
    let o = spinnet(
        &["--ensemble", "thermal", "--temperature", "1,4", "--nodes", "4", "--steps", "5", "--realizations", "3", "--out", out.to_str().unwrap()],
        &[],
    );
    assert_eq!(code(&o), 0);
    assert!(out.join("N4_T1.csv").exists() && out.join("N4_T4.csv").exists());

    let o = spinnet(&["--preset", "fig9"], &[]);
    assert_eq!(code(&o), 2);
}
