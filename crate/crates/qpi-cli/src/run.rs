//! Experiment execution and artifact emission.
//!
//! Every run writes, atomically, into its output directory:
//!   history.csv      per-epoch loss and wall time
//!   potential.csv    evaluation grid, learned potential, true potential
//!   energy.csv       pointwise learned energy (stationary systems)
//!   wave.csv         learned vs reference wave (box experiment only)
//!   checkpoint.qpic  network parameters (plus checkpoint-wave.qpic)
//!   report.json      metrics report plus run metadata

use std::path::Path;

use qpi_core::error::Error;
use qpi_core::loss::LossKind;
use qpi_core::metrics::{
    self, build_report, csv_table, energy_curve, eval_grid_1d, report_grid, rmse, Method,
};
use qpi_core::net::Mlp;
use qpi_core::potential::PotentialFn;
use qpi_core::train::{train, Model, TrainingHistory};
use qpi_core::{Result, SystemSpec};

use crate::config::ExperimentConfig;
use crate::presets;

pub struct RunArtifacts {
    pub report: qpi_core::MetricsReport,
    pub history: TrainingHistory,
    pub model: Model,
}

/// Train one seed of an experiment and write all artifacts under `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, seed: u64, out_dir: &Path) -> Result<RunArtifacts> {
    let mut train_cfg = cfg.train.clone();
    train_cfg.seed = seed;
    let init = match &cfg.wave_net {
        None => Model::Single(Mlp::init(cfg.net.clone(), seed)?),
        Some(wave_cfg) => Model::PibPair {
            potential: Mlp::init(cfg.net.clone(), seed)?,
            // Decorrelate the wave network's draw from the potential's.
            wave: Mlp::init(wave_cfg.clone(), seed ^ 0x9E37_79B9_7F4A_7C15)?,
        },
    };
    let (model, history) = train(&train_cfg, &cfg.loss, &cfg.system, init)?;

    let report = build_report(
        model.potential(),
        &cfg.system,
        cfg.grid_count,
        Method::Nn,
        vec![seed],
    )?;
    write_run_artifacts(cfg, seed, out_dir, &model, &history, &report)?;
    Ok(RunArtifacts {
        report,
        history,
        model,
    })
}

fn write_run_artifacts(
    cfg: &ExperimentConfig,
    seed: u64,
    out_dir: &Path,
    model: &Model,
    history: &TrainingHistory,
    report: &qpi_core::MetricsReport,
) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    metrics::write_atomic(&out_dir.join("history.csv"), history.to_csv().as_bytes())?;

    let curve = potential_curve_csv(model.potential(), &cfg.system, cfg.grid_count)?;
    metrics::write_atomic(&out_dir.join("potential.csv"), curve.as_bytes())?;

    if cfg.system.supports_energy_curve() {
        let (_, points) = report_grid(&cfg.system, cfg.grid_count);
        let energies = energy_curve(model.potential(), &cfg.system, &points)?;
        let rows: Vec<Vec<f64>> = points
            .iter()
            .zip(energies.iter())
            .map(|(p, &e)| {
                let mut row = p.clone();
                row.push(e);
                row
            })
            .collect();
        let header: Vec<&str> = match points[0].len() {
            1 => vec!["x", "energy"],
            _ => vec!["x", "y", "energy"],
        };
        metrics::write_atomic(
            &out_dir.join("energy.csv"),
            csv_table(&header, rows.iter()).as_bytes(),
        )?;
    }

    model
        .potential()
        .save_checkpoint(&out_dir.join("checkpoint.qpic"))?;
    if let Model::PibPair { wave, .. } = model {
        wave.save_checkpoint(&out_dir.join("checkpoint-wave.qpic"))?;
        let pib = cfg.system.pib()?;
        let xs = eval_grid_1d(&cfg.system, cfg.grid_count);
        let rows: Vec<Vec<f64>> = xs
            .iter()
            .map(|&x| Ok(vec![x, wave.forward(&[x])?, pib.psi(x)]))
            .collect::<Result<_>>()?;
        metrics::write_atomic(
            &out_dir.join("wave.csv"),
            csv_table(&["x", "w_learned", "psi_reference"], rows.iter()).as_bytes(),
        )?;
    }

    let json = report_with_metadata(cfg, seed, report);
    metrics::write_atomic(&out_dir.join("report.json"), json.as_bytes())?;
    Ok(())
}

/// Grid + learned + true potential table for a trained (or loaded) network.
/// Reloading a checkpoint and calling this again reproduces the file
/// byte-for-byte.
pub fn potential_curve_csv(
    potential: &Mlp,
    system: &SystemSpec,
    grid_count: usize,
) -> Result<String> {
    let (_, points) = report_grid(system, grid_count);
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            let mut row = p.clone();
            row.push(potential.value(p)?);
            row.push(system.true_potential(p)?);
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let header: Vec<&str> = match (points[0].len(), system.kind) {
        (1, _) => vec!["x", "u_learned", "u_true"],
        (_, qpi_core::SystemKind::Soliton) => vec!["x", "t", "u_learned", "u_true"],
        _ => vec!["x", "y", "u_learned", "u_true"],
    };
    Ok(csv_table(&header, rows.iter()))
}

fn report_with_metadata(
    cfg: &ExperimentConfig,
    seed: u64,
    report: &qpi_core::MetricsReport,
) -> String {
    let mut value: serde_json::Value = serde_json::to_value(report).expect("report serializes");
    let obj = value.as_object_mut().expect("report is an object");
    obj.insert("system".into(), cfg.system.id().into());
    obj.insert("loss".into(), loss_name(cfg.loss.kind).into());
    obj.insert("epochs".into(), cfg.train.epochs.into());
    obj.insert("dataset_size".into(), cfg.train.dataset_size.into());
    obj.insert("seed".into(), seed.into());
    if let Some(p) = &cfg.preset {
        obj.insert("preset".into(), p.as_str().into());
    }
    if let LossKind::WignerMoyal { k } = cfg.loss.kind {
        obj.insert("truncation_order".into(), k.into());
    }
    serde_json::to_string_pretty(&value).expect("json") + "\n"
}

pub fn loss_name(kind: LossKind) -> &'static str {
    match kind {
        LossKind::Tise => "tise",
        LossKind::Tdse => "tdse",
        LossKind::WignerMoyal { k: 0 } => "wigner-k0",
        LossKind::WignerMoyal { .. } => "wigner-k1",
        LossKind::SupervisedPib => "pib",
    }
}

pub struct BaselineOutcome {
    pub rmse_potential: f64,
    pub rmse_energy: Option<f64>,
}

/// Fourth-order reference inversion along a node-free grid, with artifacts.
pub fn run_baseline(
    system: &SystemSpec,
    ic: Option<(f64, f64)>,
    grid: Option<(f64, f64, usize)>,
    out_dir: &Path,
) -> Result<BaselineOutcome> {
    let ic = match ic.or_else(|| default_baseline_ic(system)) {
        Some(ic) => ic,
        None => {
            return Err(Error::Config(format!(
                "{} has no default anchor; pass --ic x,u",
                system.id()
            )))
        }
    };
    let xs = match grid {
        Some((a, b, n)) => {
            let dom = system.potential_domain()[0];
            if a < dom[0] || b > dom[1] || a >= b {
                return Err(Error::Config(format!(
                    "grid [{a}, {b}] outside the system domain [{}, {}]",
                    dom[0], dom[1]
                )));
            }
            metrics::uniform_grid(a, b, n)
                .into_iter()
                .filter(|&x| match system.amp_abs_potential_axis(x) {
                    Some(m) => m >= qpi_core::catalog::NODAL_EPSILON,
                    None => true,
                })
                .collect()
        }
        None => eval_grid_1d(system, 401),
    };
    let u = metrics::rk4_invert(system, &xs, ic)?;
    let truth: Vec<f64> = xs
        .iter()
        .map(|&x| system.true_potential(&[x]))
        .collect::<Result<_>>()?;
    let rmse_potential = rmse(&u, &truth)?;

    let rmse_energy = match system.exact_energy() {
        Some(e_ref) => {
            let energies: Vec<f64> = xs
                .iter()
                .zip(u.iter())
                .map(|(&x, &ui)| Ok(system.kinetic_ratio(&[x])? + ui))
                .collect::<Result<_>>()?;
            let flat = vec![e_ref; energies.len()];
            Some(rmse(&energies, &flat)?)
        }
        None => None,
    };

    std::fs::create_dir_all(out_dir)?;
    let rows: Vec<Vec<f64>> = xs
        .iter()
        .zip(u.iter())
        .zip(truth.iter())
        .map(|((&x, &ui), &ti)| vec![x, ui, ti])
        .collect();
    metrics::write_atomic(
        &out_dir.join("baseline.csv"),
        csv_table(&["x", "u_rk4", "u_true"], rows.iter()).as_bytes(),
    )?;
    let report = serde_json::json!({
        "rmse_potential": rmse_potential,
        "rmse_energy": rmse_energy,
        "grid": [{"start": xs[0], "stop": xs[xs.len()-1], "count": xs.len()}],
        "method": "rk4",
        "seed_list": [],
        "system": system.id(),
        "ic": [ic.0, ic.1],
    });
    metrics::write_atomic(
        &out_dir.join("report.json"),
        (serde_json::to_string_pretty(&report).expect("json") + "\n").as_bytes(),
    )?;
    Ok(BaselineOutcome {
        rmse_potential,
        rmse_energy,
    })
}

fn default_baseline_ic(system: &SystemSpec) -> Option<(f64, f64)> {
    if system.kind == qpi_core::SystemKind::H2Molecule {
        let x = qpi_core::catalog::h2::equilibrium_coordinate();
        return Some((x, 0.0));
    }
    presets::default_ic(&system.id())
}

pub struct SweepRow {
    pub seed: u64,
    pub outcome: std::result::Result<qpi_core::MetricsReport, String>,
}

pub struct SweepSummary {
    pub rows: Vec<SweepRow>,
    pub mean_rmse_potential: f64,
    pub std_rmse_potential: f64,
    pub mean_rmse_energy: Option<f64>,
    pub std_rmse_energy: Option<f64>,
    pub partial: bool,
}

/// Run every seed of a sweep (concurrently when the pool allows), each into
/// its own subdirectory, then aggregate mean ± sample standard deviation.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepSummary> {
    if cfg.seeds.len() < 2 {
        return Err(Error::Config(format!(
            "a sweep needs at least two seeds, got {}",
            cfg.seeds.len()
        )));
    }
    // Runs are deterministic per seed, so a duplicated seed is executed
    // once and its row repeated.
    let mut unique: Vec<u64> = cfg.seeds.clone();
    unique.sort_unstable();
    unique.dedup();
    let outcomes: Vec<std::result::Result<qpi_core::MetricsReport, String>> =
        qpi_core::parallel::map(&unique, |&seed| {
            let sub = cfg.output.join(format!("seed-{seed}"));
            run_experiment(cfg, seed, &sub)
                .map(|a| a.report)
                .map_err(|e| e.to_string())
        });
    let by_seed: std::collections::BTreeMap<u64, _> =
        unique.iter().copied().zip(outcomes).collect();
    let rows: Vec<SweepRow> = cfg
        .seeds
        .iter()
        .map(|&seed| SweepRow {
            seed,
            outcome: by_seed[&seed].clone(),
        })
        .collect();

    let ok: Vec<&qpi_core::MetricsReport> = rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok())
        .collect();
    let partial = ok.len() != rows.len();
    let (mean_p, std_p) = mean_std(ok.iter().map(|r| r.rmse_potential));
    let energies: Vec<f64> = ok.iter().filter_map(|r| r.rmse_energy).collect();
    let (mean_e, std_e) = if energies.len() == ok.len() && !energies.is_empty() {
        let (m, s) = mean_std(energies.iter().copied());
        (Some(m), Some(s))
    } else {
        (None, None)
    };

    let summary = SweepSummary {
        rows,
        mean_rmse_potential: mean_p,
        std_rmse_potential: std_p,
        mean_rmse_energy: mean_e,
        std_rmse_energy: std_e,
        partial,
    };
    write_sweep_aggregate(cfg, &summary)?;
    Ok(summary)
}

fn mean_std(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    if v.len() == 1 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    (mean, var.sqrt())
}

fn write_sweep_aggregate(cfg: &ExperimentConfig, s: &SweepSummary) -> Result<()> {
    std::fs::create_dir_all(&cfg.output)?;
    let rows: Vec<serde_json::Value> = s
        .rows
        .iter()
        .map(|r| match &r.outcome {
            Ok(rep) => serde_json::json!({
                "seed": r.seed,
                "rmse_potential": rep.rmse_potential,
                "rmse_energy": rep.rmse_energy,
            }),
            Err(e) => serde_json::json!({ "seed": r.seed, "error": e.to_string() }),
        })
        .collect();
    let agg = serde_json::json!({
        "system": cfg.system.id(),
        "loss": loss_name(cfg.loss.kind),
        "seeds": cfg.seeds,
        "partial": s.partial,
        "mean_rmse_potential": s.mean_rmse_potential,
        "std_rmse_potential": s.std_rmse_potential,
        "mean_rmse_energy": s.mean_rmse_energy,
        "std_rmse_energy": s.std_rmse_energy,
        "rows": rows,
    });
    metrics::write_atomic(
        &cfg.output.join("aggregate.json"),
        (serde_json::to_string_pretty(&agg).expect("json") + "\n").as_bytes(),
    )
}
