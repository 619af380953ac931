//! End-to-end tests of the `spinmem` binary: bundle layout, determinism,
//! decode verification, failure flagging and exit codes.
//!
//! The fast configuration — a 3-spin chain driving 2 comb slots at ±300 Hz
//! for 0.15 s — keeps each simulation under a second while leaving wide
//! decode margins.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spinmem"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// `write` flags for the fast configuration, with the payload and bundle
/// directory appended.
fn fast_args(payload: &[&str], dir: &Path) -> Vec<String> {
    let mut args: Vec<String> = [
        "--spins",
        "3",
        "--d-nn-hz",
        "400",
        "--spread-hz",
        "0",
        "--gen-seed",
        "0",
        "--spacing-hz",
        "600",
        "--duration-s",
        "0.15",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    args.extend(payload.iter().map(|s| s.to_string()));
    args.push("--out-dir".into());
    args.push(dir.display().to_string());
    args
}

fn run_fast(cmd: &str, payload: &[&str], dir: &Path) -> Output {
    let mut full = vec![cmd.to_string()];
    full.extend(fast_args(payload, dir));
    bin().args(&full).output().expect("binary runs")
}

#[test]
fn gen_is_deterministic_and_enforces_the_size_limit() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let out = run(&[
            "gen", "--spins", "4", "--geometry", "ring", "--d-nn-hz", "500", "--spread-hz",
            "200", "--seed", "3", "--out-dir", &dir.display().to_string(),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let sys_a = fs::read(a.join("system.json")).unwrap();
    let sys_b = fs::read(b.join("system.json")).unwrap();
    assert_eq!(sys_a, sys_b);
    let parsed: serde_json::Value = serde_json::from_slice(&sys_a).unwrap();
    assert_eq!(parsed["offsets_hz"].as_array().unwrap().len(), 4);

    let refused = run(&[
        "gen", "--spins", "13", "--out-dir", &tmp.path().join("c").display().to_string(),
    ]);
    assert_eq!(code(&refused), 2);
    assert!(stderr(&refused).contains("12"), "{}", stderr(&refused));
}

#[test]
fn write_builds_a_complete_bundle_with_recorded_defaults() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("bundle");
    let out = run(&[
        "write", "--text", "hi", "--out-dir", &dir.display().to_string(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for name in ["system.json", "pulse.json", "pulse.shape", "manifest.json"] {
        assert!(dir.join(name).exists(), "missing {name}");
    }
    let pulse: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("pulse.json")).unwrap()).unwrap();
    assert_eq!(pulse["harmonics"].as_array().unwrap().len(), 10);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["comb"]["spacing_hz"].as_f64().unwrap(), 200.0);
    assert_eq!(manifest["comb"]["amplitude_hz"].as_f64().unwrap(), 3.0);
    assert_eq!(manifest["acquisition"]["transients"].as_u64().unwrap(), 512);
    assert_eq!(manifest["payload"]["bits"].as_str().unwrap().len(), 10);
}

#[test]
fn write_rejects_a_payload_comb_size_mismatch() {
    let tmp = TempDir::new().unwrap();
    let out = run(&[
        "write", "--bits", "101", "--harmonics", "4", "--out-dir",
        &tmp.path().join("x").display().to_string(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("3 bits"), "{}", stderr(&out));
}

#[test]
fn write_rejects_a_comb_outside_the_nyquist_window() {
    let tmp = TempDir::new().unwrap();
    let out = run(&[
        "write", "--bits", "10", "--spacing-hz", "20000", "--out-dir",
        &tmp.path().join("x").display().to_string(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("window"), "{}", stderr(&out));
}

#[test]
fn simulate_is_deterministic_across_runs() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let out = run_fast("write", &["--bits", "10"], dir);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let out = run(&["simulate", "--out-dir", &dir.display().to_string()]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    for name in ["fid.csv", "spectrum.csv", "reference.csv"] {
        let bytes_a = fs::read(a.join(name)).unwrap();
        let bytes_b = fs::read(b.join(name)).unwrap();
        assert_eq!(bytes_a, bytes_b, "{name} differs between identical runs");
    }
}

#[test]
fn zero_amplitude_comb_yields_a_silent_record() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("silent");
    let out = run_fast("write", &["--bits", "10", "--amp-hz", "0"], &dir);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = run(&["simulate", "--out-dir", &dir.display().to_string()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for (name, value_cols) in [("fid.csv", 2..4), ("spectrum.csv", 1..4)] {
        let text = fs::read_to_string(dir.join(name)).unwrap();
        for line in text.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            for field in &fields[value_cols.clone()] {
                assert!(
                    field.parse::<f64>().unwrap().abs() < 1e-9,
                    "{name} carries signal for a silent comb: {line}"
                );
            }
        }
    }
    // With a flat reference there is nothing to calibrate against.
    let out = run(&["read", "--out-dir", &dir.display().to_string()]);
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("calibration failure"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn roundtrip_recovers_the_payload() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("trip");
    let out = run_fast("roundtrip", &["--number", "2", "--bit-len", "2"], &dir);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("bits: 10"), "{text}");
    assert!(text.contains("number: 2"), "{text}");
    assert!(text.contains("roundtrip: payload recovered"), "{text}");

    // A standalone read of the finished bundle verifies the same decode.
    let out = run(&["read", "--out-dir", &dir.display().to_string()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("payload matches the manifest"));

    // The reference read against itself is the all-ones payload.
    let reference = dir.join("reference.csv");
    let out = run(&[
        "read", "--out-dir", &dir.display().to_string(), "--spectrum",
        &reference.display().to_string(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("bits: 11"), "{}", stdout(&out));
}

/// Zero every spectrum bin within `half` Hz of `center`, preserving format.
fn zero_window(path: &Path, center: f64, half: f64) -> PathBuf {
    let text = fs::read_to_string(path).unwrap();
    let mut lines: Vec<String> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            lines.push(line.to_string());
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let f: f64 = fields[0].parse().unwrap();
        if (f - center).abs() <= half {
            lines.push(format!("{},0,0,0", fields[0]));
        } else {
            lines.push(line.to_string());
        }
    }
    let out = path.with_file_name("corrupt.csv");
    fs::write(&out, lines.join("\n") + "\n").unwrap();
    out
}

#[test]
fn corrupted_peak_is_flagged_and_mismatch_sets_the_exit_code() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("damaged");
    let out = run_fast("roundtrip", &["--bits", "11"], &dir);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let corrupt = zero_window(&dir.join("spectrum.csv"), 300.0, 151.0);

    // Ad-hoc inspection: the dead slot decodes as 0 with a flagged margin.
    let out = run(&[
        "read", "--out-dir", &dir.display().to_string(), "--spectrum",
        &corrupt.display().to_string(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("bits: 10"), "{text}");
    let slot_row = text
        .lines()
        .find(|l| l.trim_start().starts_with("300.00"))
        .expect("row for +300 Hz");
    assert!(slot_row.contains("LOW"), "{slot_row}");

    // The same damage in the bundle's own spectrum is a decode mismatch.
    fs::rename(&corrupt, dir.join("spectrum.csv")).unwrap();
    let out = run(&["read", "--out-dir", &dir.display().to_string()]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    assert!(stdout(&out).contains("decode mismatch"), "{}", stdout(&out));
}

#[test]
fn plot_is_deterministic_and_refuses_empty_input() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("plotted");
    let out = run_fast("write", &["--bits", "10"], &dir);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = run(&["simulate", "--out-dir", &dir.display().to_string()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let svg_a = dir.join("a.svg");
    let svg_b = dir.join("b.svg");
    for svg in [&svg_a, &svg_b] {
        let out = run(&[
            "plot", "--out-dir", &dir.display().to_string(), "--out",
            &svg.display().to_string(),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let bytes_a = fs::read(&svg_a).unwrap();
    assert_eq!(bytes_a, fs::read(&svg_b).unwrap());
    let text = String::from_utf8(bytes_a).unwrap();
    assert!(text.starts_with("<svg"));
    assert!(text.contains("frequency offset (Hz)"));
    assert_eq!(text.matches("comb-tick").count(), 2);

    let empty = dir.join("empty.csv");
    fs::write(&empty, "freq_hz,re,im,mag\n").unwrap();
    let target = dir.join("empty.svg");
    let out = run(&[
        "plot", "--out-dir", &dir.display().to_string(), "--spectrum",
        &empty.display().to_string(), "--out", &target.display().to_string(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(!target.exists(), "failed plot must not leave a file");
}
