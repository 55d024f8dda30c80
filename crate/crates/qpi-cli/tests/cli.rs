//! End-to-end tests of the `qpi` binary and the artifact round trip.
//! Training smoke runs use tiny epoch/dataset overrides to stay fast.

use std::path::Path;
use std::process::{Command, Output};

fn qpi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpi"))
        .args(args)
        .env("QPI_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn list_shows_nine_unique_presets_and_all_systems() {
    let out = qpi(&["list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for id in [
        "ho1d-tise",
        "pt-tise",
        "hyd-tise",
        "ho2d-tise",
        "pib-supervised",
        "soliton-tdse",
        "ho-wigner",
        "pt-wigner-k0",
        "pt-wigner-k1",
    ] {
        assert!(text.contains(id), "missing preset {id}\n{text}");
    }
    for sys in ["ho1d:n=0", "soliton", "wigner-pt", "h2"] {
        assert!(text.contains(sys), "missing system {sys}");
    }
}

#[test]
fn list_json_is_machine_readable() {
    let out = qpi(&["list", "--json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let presets = doc["presets"].as_array().unwrap();
    assert_eq!(presets.len(), 9);
    let mut ids: Vec<&str> = presets.iter().map(|p| p["id"].as_str().unwrap()).collect();
    ids.sort_unstable();
    ids.dedup();
    assert_eq!(ids.len(), 9, "preset ids must be unique");
    assert_eq!(doc["systems"].as_array().unwrap().len(), 9);
}

#[test]
fn malformed_config_exits_2_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run-out");
    let cfg = write_config(
        dir.path(),
        "bad.cfg",
        &format!("loss.kind = tise\noutput = {}\n", out_dir.display()),
    );
    let out = qpi(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("system"));
    assert!(!out_dir.exists(), "no partial artifacts on schema errors");
}

#[test]
fn config_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.cfg",
        "preset = ho1d-tise\nfrobnicate = 1\noutput = o\n",
    );
    let out = qpi(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_baseline_system_exits_2_listing_ids() {
    let out = qpi(&["baseline", "wat:n=1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("ho1d:n=0"), "should list valid ids: {err}");
    assert!(err.contains("pt:l=2,mu=1"));
}

#[test]
fn oscillator_baseline_meets_the_reference_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("b");
    let out = qpi(&[
        "baseline",
        "ho1d:n=0",
        "--ic",
        "0,0",
        "--grid",
        "-5,5,401",
        "--out",
        out_path.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["rmse_potential"].as_f64().unwrap() <= 1e-2);
    assert_eq!(doc["method"], "rk4");
    assert!(out_path.join("baseline.csv").exists());
    let csv = std::fs::read_to_string(out_path.join("baseline.csv")).unwrap();
    assert!(csv.starts_with("x,u_rk4,u_true\n"));
}

#[test]
fn sech_well_baseline_meets_the_reference_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("b");
    let out = qpi(&[
        "baseline",
        "pt:l=2,mu=1",
        "--ic",
        "0,-3",
        "--out",
        out_path.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["rmse_potential"].as_f64().unwrap() <= 1e-3);
}

#[test]
fn smoke_run_writes_all_artifacts_and_checkpoint_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let cfg = write_config(
        dir.path(),
        "smoke.cfg",
        &format!(
            "preset = ho1d-tise\n\
             train.epochs = 2\n\
             train.dataset_size = 64\n\
             train.seed = 5\n\
             grid.count = 64\n\
             output = {}\n",
            out_dir.display()
        ),
    );
    let out = qpi(&["run", "--config", &cfg]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    for f in [
        "history.csv",
        "potential.csv",
        "energy.csv",
        "checkpoint.qpic",
        "report.json",
    ] {
        assert!(out_dir.join(f).exists(), "missing {f}");
    }
    let history = std::fs::read_to_string(out_dir.join("history.csv")).unwrap();
    assert_eq!(history.lines().count(), 3, "header + one row per epoch");

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    for field in [
        "rmse_potential",
        "rmse_energy",
        "grid",
        "method",
        "seed_list",
    ] {
        assert!(report.get(field).is_some(), "report missing {field}");
    }
    assert_eq!(report["preset"], "ho1d-tise");
    assert_eq!(report["seed"], 5);

    // Reloading the checkpoint must reproduce the potential curve
    // byte-for-byte.
    let net = qpi_core::net::Mlp::load_checkpoint(&out_dir.join("checkpoint.qpic")).unwrap();
    let system = qpi_core::SystemSpec::parse_id("ho1d:n=0").unwrap();
    let rebuilt = qpi_cli::run::potential_curve_csv(&net, &system, 64).unwrap();
    let original = std::fs::read_to_string(out_dir.join("potential.csv")).unwrap();
    assert_eq!(rebuilt, original);
}

#[test]
fn wigner_preset_smoke_run_reports_truncation_order() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("wig");
    let cfg = write_config(
        dir.path(),
        "wig.cfg",
        &format!(
            "preset = pt-wigner-k1\n\
             train.epochs = 1\n\
             train.dataset_size = 48\n\
             grid.count = 32\n\
             output = {}\n",
            out_dir.display()
        ),
    );
    let out = qpi(&["run", "--config", &cfg]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["truncation_order"], 1);
    assert_eq!(report["system"], "wigner-pt");
    assert_eq!(report["rmse_energy"], serde_json::Value::Null);
}

#[test]
fn every_preset_runs_end_to_end_in_smoke_mode() {
    let dir = tempfile::tempdir().unwrap();
    for preset in [
        "ho1d-tise",
        "pt-tise",
        "hyd-tise",
        "ho2d-tise",
        "pib-supervised",
        "soliton-tdse",
        "ho-wigner",
        "pt-wigner-k0",
        "pt-wigner-k1",
    ] {
        let out_dir = dir.path().join(preset);
        let cfg = write_config(
            dir.path(),
            &format!("{preset}.cfg"),
            &format!(
                "preset = {preset}\n\
                 train.epochs = 1\n\
                 train.dataset_size = 40\n\
                 train.batch_size = 20\n\
                 grid.count = 24\n\
                 output = {}\n",
                out_dir.display()
            ),
        );
        let out = qpi(&["run", "--config", &cfg]);
        assert!(
            out.status.success(),
            "{preset} failed: {}\n{}",
            stdout(&out),
            stderr(&out)
        );
        assert!(out_dir.join("report.json").exists());
        assert!(out_dir.join("potential.csv").exists());
        if preset == "pib-supervised" {
            assert!(out_dir.join("checkpoint-wave.qpic").exists());
            assert!(out_dir.join("wave.csv").exists());
        }
    }
}

#[test]
fn sweep_requires_two_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "one.cfg",
        &format!(
            "preset = ho1d-tise\ntrain.epochs = 1\ntrain.dataset_size = 40\nseeds = 3\noutput = {}\n",
            dir.path().join("s").display()
        ),
    );
    let out = qpi(&["sweep", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}

#[test]
fn sweep_aggregates_and_duplicate_seeds_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("sweep");
    let cfg = write_config(
        dir.path(),
        "sweep.cfg",
        &format!(
            "preset = ho1d-tise\n\
             train.epochs = 1\n\
             train.dataset_size = 40\n\
             train.batch_size = 20\n\
             grid.count = 24\n\
             seeds = 7,7,9\n\
             output = {}\n",
            out_dir.display()
        ),
    );
    let out = qpi(&["sweep", "--config", &cfg]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let agg: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("aggregate.json")).unwrap())
            .unwrap();
    assert_eq!(agg["partial"], false);
    let rows = agg["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    // Determinism: the duplicated seed yields identical metrics.
    assert_eq!(rows[0]["rmse_potential"], rows[1]["rmse_potential"]);
    assert!(agg["std_rmse_potential"].as_f64().unwrap() >= 0.0);
    for seed in ["seed-7", "seed-9"] {
        assert!(out_dir.join(seed).join("report.json").exists());
    }
}

#[test]
fn run_seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o");
    let cfg = write_config(
        dir.path(),
        "seed.cfg",
        &format!(
            "preset = ho1d-tise\ntrain.epochs = 1\ntrain.dataset_size = 40\n\
             train.batch_size = 20\ngrid.count = 24\ntrain.seed = 1\noutput = {}\n",
            out_dir.display()
        ),
    );
    let out = qpi(&["run", "--config", &cfg, "--seed", "42"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["seed"], 42);
    assert_eq!(report["seed_list"][0], 42);
}
