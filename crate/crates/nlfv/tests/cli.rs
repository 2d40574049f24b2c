//! End-to-end tests of the `nlfv` binary: config handling, output files,
//! manifest completeness, determinism, exit codes.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_nlfv")
}

fn examples_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nlfv_cli_{tag}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_cfg(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

const SMALL_1D: &str = "\
[grid]
x_min = -1.5
x_max = 1.5
n_cells = 120
[model]
name = nonlocal-lwr-1d
[time]
t_end = 0.05
snapshots = 0, 0.05
";

const SMALL_2D: &str = "\
[grid]
x_min = -4
x_max = 4
y_min = -4
y_max = 4
nx = 32
ny = 32
[model]
name = crowd-2d
[time]
t_end = 0.05
snapshots = 0, 0.05
";

#[test]
fn shipped_fig1_config_parses_to_documented_values() {
    use nlfv::config::{parse_config, AnyConfig};
    let parsed = parse_config(&examples_dir().join("fig1.cfg")).unwrap();
    let AnyConfig::OneD(cfg) = parsed.config else {
        panic!("expected a 1D config")
    };
    assert_eq!(cfg.grid.n_cells, 1920);
    assert!((cfg.grid.dx() - 0.0015625).abs() < 1e-15);
    assert_eq!(cfg.scheme.lambda, 0.1286);
    assert!(
        matches!(cfg.scheme.family, nlfv::FluxFamily::LaxFriedrichs { theta } if theta == 0.3333)
    );
    assert_eq!(cfg.t_end, 0.5);
    assert_eq!(cfg.snapshot_times, vec![0.0, 0.017, 0.33, 0.5]);
    // the other shipped configs parse too
    for name in [
        "table1.cfg",
        "crowd-annular.cfg",
        "crowd-circular.cfg",
        "eta.cfg",
    ] {
        parse_config(&examples_dir().join(name)).unwrap();
    }
}

#[test]
fn run1d_writes_snapshots_diagnostics_and_complete_manifest() {
    let dir = tmp_dir("run1d");
    let cfg = write_cfg(&dir, "cfg.ini", SMALL_1D);
    let out_dir = dir.join("out");
    let out = run(&[
        "run1d",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let names: BTreeSet<String> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().to_string())
        .collect();
    assert!(names.contains("manifest.json"));
    assert!(names.iter().filter(|n| n.starts_with("snap_") && n.ends_with(".csv")).count() == 2);
    assert!(names.iter().filter(|n| n.ends_with(".svg")).count() == 2);
    assert!(names.contains("final.csv"));
    assert!(names.contains("diagnostics.csv"));
    assert!(names.contains("diagnostics.json"));
    // manifest lists every file except itself, with correct digests
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    let listed: BTreeSet<String> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["path"].as_str().unwrap().to_string())
        .collect();
    let on_disk: BTreeSet<String> = names
        .iter()
        .filter(|n| *n != "manifest.json")
        .cloned()
        .collect();
    assert_eq!(listed, on_disk);
    for entry in manifest["outputs"].as_array().unwrap() {
        let bytes = std::fs::read(out_dir.join(entry["path"].as_str().unwrap())).unwrap();
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(&bytes);
        let hex: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(hex, entry["sha256"].as_str().unwrap());
        assert_eq!(bytes.len() as u64, entry["bytes"].as_u64().unwrap());
    }
    // config echo carries resolved defaults
    assert!(manifest["config"]
        .as_array()
        .unwrap()
        .iter()
        .any(|kv| kv[0] == "scheme.lambda" && kv[1] == "0.1286"));
}

#[test]
fn identical_invocations_produce_byte_identical_outputs() {
    let dir = tmp_dir("determinism");
    let cfg = write_cfg(&dir, "cfg.ini", SMALL_1D);
    let (a, b) = (dir.join("a"), dir.join("b"));
    for out_dir in [&a, &b] {
        let out = run(&[
            "run1d",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    for name in ["final.csv", "diagnostics.csv", "snap_000_t0.000000.csv"] {
        let x = std::fs::read(a.join(name)).unwrap();
        let y = std::fs::read(b.join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between identical invocations");
    }
}

#[test]
fn run2d_writes_pgm_and_csv_snapshots() {
    let dir = tmp_dir("run2d");
    let cfg = write_cfg(&dir, "cfg.ini", SMALL_2D);
    let out_dir = dir.join("out");
    let out = run(&[
        "run2d",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let names: Vec<String> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().to_string())
        .collect();
    assert_eq!(names.iter().filter(|n| n.starts_with("snap_") && n.ends_with(".pgm")).count(), 2);
    assert_eq!(names.iter().filter(|n| n.starts_with("snap_") && n.ends_with(".csv")).count(), 2);
    let pgm = std::fs::read(out_dir.join("final.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n32 32\n255\n"));
    // dimension mismatch is a configuration error (exit 2)
    let out = run(&["run1d", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn converge_cli_produces_rate_table() {
    let dir = tmp_dir("converge");
    let mut cfg_text = SMALL_1D.replace("n_cells = 120", "n_cells = 60");
    cfg_text.push_str("[kernel]\neta = 0.2\n");
    let cfg = write_cfg(&dir, "cfg.ini", &cfg_text);
    let out_dir = dir.join("out");
    let out = run(&[
        "converge",
        "--config",
        cfg.to_str().unwrap(),
        "--levels",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("rates.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "dx,l1_distance,alpha");
    assert_eq!(lines.len(), 3); // header + 2 rows
    assert!(lines[1].split(',').nth(2).unwrap().parse::<f64>().is_ok());
    assert!(lines[2].ends_with(',')); // last row has no alpha
}

#[test]
fn eta_sweep_cli_writes_rows() {
    let dir = tmp_dir("eta");
    let cfg = write_cfg(&dir, "cfg.ini", &SMALL_1D.replace("n_cells = 120", "n_cells = 240"));
    let out_dir = dir.join("out");
    let out = run(&[
        "eta-sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--etas",
        "0.1,0.05",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("eta_sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("eta,l1_distance_to_local\n"));
    // unresolvable radius is a configuration error
    let out = run(&[
        "eta-sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--etas",
        "0.001",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_exit_codes() {
    let dir = tmp_dir("check");
    // healthy run: exit 0
    let good = write_cfg(&dir, "good.ini", SMALL_1D);
    let out = run(&[
        "check",
        "--config",
        good.to_str().unwrap(),
        "--out",
        dir.join("good_out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[PASS] mass conservation"));
    assert!(stdout.contains("[PASS] entropy inequality"));
    // CFL-violating run under warn: completes, audits fail, exit 1
    let bad = write_cfg(
        &dir,
        "bad.ini",
        "[grid]\nx_min = -1.5\nx_max = 1.5\nn_cells = 240\n[model]\nname = nonlocal-lwr-1d\n[scheme]\nlambda = 0.5\ncfl = warn\n[time]\nt_end = 0.05\n",
    );
    let out = run(&[
        "check",
        "--config",
        bad.to_str().unwrap(),
        "--out",
        dir.join("bad_out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[FAIL]"));
    // malformed config: exit 2
    let missing = write_cfg(&dir, "missing.ini", "[grid]\nx_min = -1.5\n");
    let out = run(&["check", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // unknown key: exit 2 with file and line in the message
    let broken = write_cfg(&dir, "broken.ini", &format!("{SMALL_1D}[grid2]\nwhat = 1\n"));
    let out = run(&["check", "--config", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("broken.ini:11") && stderr.contains("grid2.what"), "{stderr}");
    // rejected theta: exit 2
    let theta = write_cfg(
        &dir,
        "theta.ini",
        &format!("{SMALL_1D}[scheme]\ntheta = 0.7\n"),
    );
    let out = run(&["check", "--config", theta.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("theta"));
}

#[test]
fn check_passes_on_shipped_reference_config() {
    let dir = tmp_dir("check_fig1");
    let cfg = examples_dir().join("fig1.cfg");
    let out = run(&[
        "check",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for check in [
        "model bounds",
        "mass conservation",
        "positivity",
        "max principle",
        "entropy inequality",
    ] {
        assert!(stdout.contains(&format!("[PASS] {check}")), "{stdout}");
    }
}

#[test]
fn threads_env_var_is_accepted() {
    let dir = tmp_dir("threads");
    let cfg = write_cfg(&dir, "cfg.ini", SMALL_1D);
    let out = Command::new(bin())
        .args([
            "run1d",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.join("out").to_str().unwrap(),
            "--diagnostics",
            "off",
        ])
        .env("NLFV_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("threads = 1"));
}
