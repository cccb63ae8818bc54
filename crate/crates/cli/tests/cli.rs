//! Binary-level tests: exit codes, file output, and byte-level determinism.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_entherm"))
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("entherm-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = workdir("determinism");
    let out1 = dir.join("run1.csv");
    let out2 = dir.join("run2.csv");
    for out in [&out1, &out2] {
        let status = bin()
            .args([
                "simulate",
                "--points",
                "40",
                "--seed",
                "7",
                "--output",
                out.to_str().unwrap(),
            ])
            .status()
            .expect("run simulate");
        assert!(status.success());
    }
    let bytes1 = std::fs::read(&out1).unwrap();
    let bytes2 = std::fs::read(&out2).unwrap();
    // The files embed the same config except the output path; compare with
    // the single differing line masked.
    let normalize = |bytes: &[u8]| -> Vec<String> {
        String::from_utf8_lossy(bytes)
            .lines()
            .map(|l| {
                if l.starts_with("# config:") {
                    l.replace("run1.csv", "RUN").replace("run2.csv", "RUN")
                } else {
                    l.to_owned()
                }
            })
            .collect()
    };
    assert_eq!(normalize(&bytes1), normalize(&bytes2), "reruns differ");
}

#[test]
fn simulate_emits_baseline_row_and_plot_script() {
    let dir = workdir("baseline");
    let out = dir.join("gap.csv");
    let status = bin()
        .args(["simulate", "--points", "24", "--output", out.to_str().unwrap()])
        .status()
        .expect("run simulate");
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# schema: entherm-simulate-gap-v1"));
    assert!(text.contains("# config: "));
    let first_data = text
        .lines()
        .find(|l| !l.starts_with('#') && !l.starts_with("t_s"))
        .expect("data row");
    let fields: Vec<f64> = first_data.split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(fields[0], 0.0, "first row is the t = 0 baseline");
    // dw, gap_dw ~ 0 and concurrence = 1 at t = 0.
    assert!(fields[4].abs() < 1e-3, "dw(0) = {}", fields[4]);
    assert!(fields[8].abs() < 1e-3, "gap_dw(0) = {}", fields[8]);
    assert!((fields[15] - 1.0).abs() < 1e-9, "concurrence(0) = {}", fields[15]);
    assert!(dir.join("gap.gp").exists(), "plot script missing");
}

#[test]
fn single_setup_run_writes_its_schema() {
    let dir = workdir("single");
    let out = dir.join("setup_b.csv");
    let status = bin()
        .args([
            "simulate",
            "--setup",
            "b",
            "--points",
            "16",
            "--output",
            out.to_str().unwrap(),
        ])
        .status()
        .expect("run simulate");
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# schema: entherm-simulate-setup-v1"));
    assert!(text.contains("# setup: b"));
}

#[test]
fn invalid_configuration_exits_with_code_2() {
    let dir = workdir("badconfig");
    // Bad flag value set.
    let status = bin()
        .args(["simulate", "--points", "1", "--output", dir.join("x.csv").to_str().unwrap()])
        .status()
        .expect("run simulate");
    assert_eq!(status.code(), Some(2));

    // Unknown setup label.
    let status = bin().args(["simulate", "--setup", "z"]).status().expect("run");
    assert_eq!(status.code(), Some(2));

    // Malformed config file.
    let cfg = dir.join("broken.json");
    std::fs::write(&cfg, "{\"points\": \"many\"}").unwrap();
    let status = bin()
        .args(["simulate", "--config", cfg.to_str().unwrap()])
        .status()
        .expect("run");
    assert_eq!(status.code(), Some(2));
}

#[test]
fn config_file_overrides_are_honored() {
    let dir = workdir("cfgfile");
    let cfg = dir.join("cfg.json");
    let out = dir.join("cfg_out.csv");
    std::fs::write(
        &cfg,
        format!(
            "{{\"points\": 12, \"t_max\": 2e-6, \"gamma_a\": 4.0e5, \"output\": {:?}}}",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let status = bin().args(["simulate", "--config", cfg.to_str().unwrap()]).status().unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"gamma_a\":4e5") || text.contains("\"gamma_a\":400000"));
    let rows = text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("t_s")).count();
    assert_eq!(rows, 13, "12 grid points plus the baseline row");
}

#[test]
fn sweep_modes_produce_their_schemas() {
    let dir = workdir("sweep");
    let common = dir.join("sweep_common.csv");
    let status = bin()
        .args(["sweep-temp", "--mode", "common", "--output", common.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&common).unwrap();
    assert!(text.starts_with("# schema: entherm-sweep-common-v1"));
    let rows = text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("temp_k")).count();
    assert_eq!(rows, 9);

    let delta = dir.join("sweep_delta.csv");
    let status = bin()
        .args([
            "sweep-temp",
            "--mode",
            "delta",
            "--points",
            "32",
            "--output",
            delta.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&delta).unwrap();
    assert!(text.starts_with("# schema: entherm-sweep-delta-v1"));
    // Three blocks separated by double blank lines.
    assert_eq!(text.matches("# block").count(), 3);
    assert!(dir.join("sweep_delta.gp").exists());

    let status = bin().args(["sweep-temp", "--mode", "sideways"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn protocol_run_reports_summary() {
    let dir = workdir("protocol");
    let out = dir.join("protocol.csv");
    let output = bin()
        .args([
            "protocol",
            "--steps",
            "2000",
            "--temperature",
            "250",
            "--output",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("stage1 work extracted"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# schema: entherm-protocol-v1"));
    assert!(text.contains("# summary: total_work_to_weight="));
    let rows = text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("step,")).count();
    assert_eq!(rows, 2000);
}

#[test]
fn validate_passes_on_defaults() {
    let output = bin().args(["validate", "--seed", "5"]).output().unwrap();
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(output.status.success(), "validate failed:\n{stdout}");
    assert!(stdout.contains("PASS dynamics_oracle_equivalence"));
    assert!(stdout.contains("INFO analysis_closed_form_sides"));
    assert!(!stdout.contains("\nFAIL"));
}
