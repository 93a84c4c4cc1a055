//! End-to-end tests of the `solidshell` binary: CSV contract, argument
//! validation, determinism, and the verification subcommand.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_solidshell"))
}

const HEADER: &str = "benchmark,formulation,degree,n_elems,slenderness,distortion_deg,\
raw_deflection,normalized_deflection,wall_time_s";

#[test]
fn run_emits_csv_with_exact_header() {
    let out = bin()
        .args([
            "run",
            "--benchmark",
            "scordelis",
            "--formulations",
            "ss,ss_ans,std",
            "--degree",
            "2",
            "--elems",
            "2,3,4",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len(), 1 + 9, "3 formulations x 3 meshes");
    // Normalized deflections approach the reference from below for the
    // projected formulations.
    let ss_rows: Vec<f64> = lines[1..]
        .iter()
        .filter(|l| l.split(',').nth(1) == Some("ss"))
        .map(|l| l.split(',').nth(7).unwrap().parse::<f64>().unwrap())
        .collect();
    assert_eq!(ss_rows.len(), 3);
    assert!(ss_rows.windows(2).all(|w| w[1] >= w[0] - 1e-3));
    for l in &lines[1..] {
        assert_eq!(l.split(',').count(), 9);
        assert!(l.starts_with("scordelis,"));
    }
}

#[test]
fn run_rows_are_byte_stable_apart_from_wall_time() {
    let args = [
        "run",
        "--benchmark",
        "straight",
        "--formulations",
        "ss",
        "--degree",
        "2",
        "--elems",
        "4",
        "--slenderness",
        "1e2,1e3",
    ];
    let a = bin().args(args).output().unwrap();
    let b = bin().args(args).output().unwrap();
    assert!(a.status.success());
    let strip = |raw: &[u8]| -> Vec<String> {
        String::from_utf8(raw.to_vec())
            .unwrap()
            .lines()
            .map(|l| {
                let mut cols: Vec<&str> = l.split(',').collect();
                cols.pop();
                cols.join(",")
            })
            .collect()
    };
    assert_eq!(strip(&a.stdout), strip(&b.stdout));
}

#[test]
fn parallel_sweep_matches_serial_order() {
    let base = [
        "run",
        "--benchmark",
        "curved",
        "--formulations",
        "ss,ss_ans",
        "--degree",
        "2",
        "--elems",
        "4",
        "--slenderness",
        "1e1,1e2",
    ];
    let serial = bin().args(base).output().unwrap();
    let parallel = bin().args(base).args(["--jobs", "4"]).output().unwrap();
    assert!(serial.status.success() && parallel.status.success());
    let strip = |raw: &[u8]| -> Vec<String> {
        String::from_utf8(raw.to_vec())
            .unwrap()
            .lines()
            .map(|l| {
                let mut cols: Vec<&str> = l.split(',').collect();
                cols.pop();
                cols.join(",")
            })
            .collect()
    };
    assert_eq!(strip(&serial.stdout), strip(&parallel.stdout));
}

#[test]
fn jobs_env_var_overrides_flag() {
    let out = bin()
        .env("IGA_SS_JOBS", "2")
        .args([
            "run",
            "--benchmark",
            "straight",
            "--formulations",
            "ss",
            "--elems",
            "2",
            "--slenderness",
            "1e1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
}

#[test]
fn empty_formulation_list_is_a_usage_error() {
    let out = bin()
        .args(["run", "--benchmark", "scordelis", "--formulations", ""])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn unknown_benchmark_and_formulation_are_usage_errors() {
    let out = bin()
        .args(["run", "--benchmark", "nope", "--formulations", "ss"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown benchmark"));

    let out = bin()
        .args(["run", "--benchmark", "scordelis", "--formulations", "warp"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown formulation"));
}

#[test]
fn output_file_receives_the_table() {
    let dir = std::env::temp_dir().join(format!("solidshell-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rows.csv");
    let out = bin()
        .args([
            "run",
            "--benchmark",
            "hemisphere",
            "--formulations",
            "ss",
            "--elems",
            "2",
            "--out",
        ])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with(HEADER));
    assert_eq!(text.lines().count(), 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_passes_on_a_fresh_build() {
    let out = bin().arg("verify").output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "verify failed:\n{text}");
    assert!(
        text.contains("all") && text.contains("checks passed"),
        "{text}"
    );
    assert!(text.contains("idempotence"));
}
