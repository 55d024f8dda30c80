use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qpi_cli::config::parse_config;
use qpi_cli::presets::PRESETS;
use qpi_cli::run::{loss_name, run_baseline, run_experiment, run_sweep};
use qpi_core::error::Error;
use qpi_core::SystemSpec;

#[derive(Parser)]
#[command(
    name = "qpi",
    about = "Reconstruct quantum potentials from probability amplitudes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one experiment from a config file and write its artifacts.
    Run {
        /// Experiment config (flat key = value lines).
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the training seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Invert a system's potential with the fourth-order reference
    /// integrator instead of training.
    Baseline {
        /// System identifier, e.g. ho1d:n=0 or pt:l=2,mu=1.
        system: String,
        /// Anchor "x,u" pinning the potential's constant.
        #[arg(long, allow_hyphen_values = true)]
        ic: Option<String>,
        /// Evaluation grid "start,stop,count".
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long, default_value = "baseline-out")]
        out: PathBuf,
        /// Print the report as JSON on stdout.
        #[arg(long)]
        json: bool,
    },
    /// Run a config once per seed and aggregate mean ± std.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List known systems and experiment presets.
    List {
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                Error::Config(_) | Error::Domain(_) => 2,
                Error::Divergence { .. } => 3,
                _ => 1,
            })
        }
    }
}

/// `QPI_THREADS` caps the worker pool; unset means one worker per core.
fn configure_threads() {
    if let Ok(v) = std::env::var("QPI_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => qpi_core::parallel::configure_threads(n),
            _ => eprintln!("warning: ignoring bad QPI_THREADS value '{v}'"),
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run { config, out, seed } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
            let mut cfg = match parse_config(&text) {
                Ok(cfg) => cfg,
                Err(e) => return Err(Error::Config(e.to_string())),
            };
            if let Some(out) = out {
                cfg.output = out;
            }
            let seed = seed.unwrap_or(cfg.seeds[0]);
            let out_dir = cfg.output.clone();
            let artifacts = run_experiment(&cfg, seed, &out_dir)?;
            println!(
                "{} [{}] seed {seed}: rmse_potential {:.6e}{} -> {}",
                cfg.system.id(),
                loss_name(cfg.loss.kind),
                artifacts.report.rmse_potential,
                match artifacts.report.rmse_energy {
                    Some(e) => format!(", rmse_energy {e:.6e}"),
                    None => String::new(),
                },
                out_dir.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Baseline {
            system,
            ic,
            grid,
            out,
            json,
        } => {
            let spec = SystemSpec::parse_id(&system).map_err(|e| {
                Error::Config(format!(
                    "{e}; known systems: {}",
                    qpi_core::catalog::known_system_ids().join(", ")
                ))
            })?;
            let ic = match ic {
                Some(s) => Some(parse_pair(&s, "--ic")?),
                None => None,
            };
            let grid = match grid {
                Some(s) => Some(parse_grid(&s)?),
                None => None,
            };
            let outcome = run_baseline(&spec, ic, grid, &out)?;
            if json {
                let report = std::fs::read_to_string(out.join("report.json"))?;
                print!("{report}");
            } else {
                println!(
                    "{} rk4: rmse_potential {:.6e}{} -> {}",
                    spec.id(),
                    outcome.rmse_potential,
                    match outcome.rmse_energy {
                        Some(e) => format!(", rmse_energy {e:.6e}"),
                        None => String::new(),
                    },
                    out.display()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { config, out } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
            let mut cfg = match parse_config(&text) {
                Ok(cfg) => cfg,
                Err(e) => return Err(Error::Config(e.to_string())),
            };
            if let Some(out) = out {
                cfg.output = out;
            }
            let summary = run_sweep(&cfg)?;
            for row in &summary.rows {
                match &row.outcome {
                    Ok(rep) => println!(
                        "seed {:>4}: rmse_potential {:.6e}{}",
                        row.seed,
                        rep.rmse_potential,
                        match rep.rmse_energy {
                            Some(e) => format!(", rmse_energy {e:.6e}"),
                            None => String::new(),
                        }
                    ),
                    Err(e) => println!("seed {:>4}: FAILED ({e})", row.seed),
                }
            }
            println!(
                "{} [{}] over {} seeds: rmse_potential {:.3e} +- {:.3e}{}",
                cfg.system.id(),
                loss_name(cfg.loss.kind),
                cfg.seeds.len(),
                summary.mean_rmse_potential,
                summary.std_rmse_potential,
                match (summary.mean_rmse_energy, summary.std_rmse_energy) {
                    (Some(m), Some(s)) => format!(", rmse_energy {m:.3e} +- {s:.3e}"),
                    _ => String::new(),
                }
            );
            if summary.partial {
                eprintln!("error: some seeds failed; aggregate marked partial");
                return Ok(ExitCode::FAILURE);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::List { json } => {
            list(json);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn list(json: bool) {
    if json {
        let presets: Vec<serde_json::Value> = PRESETS
            .iter()
            .map(|p| {
                serde_json::json!({
                    "id": p.id,
                    "system": p.system,
                    "loss": loss_name(p.loss),
                    "activation": match p.activation {
                        qpi_core::net::FinalActivation::None => "none",
                        qpi_core::net::FinalActivation::Sigmoid => "sigmoid",
                    },
                    "scale": p.scale,
                    "dataset_size": p.dataset_size,
                    "epochs": p.epochs,
                    "ic": p.ic.map(|(x, y)| vec![x, y]),
                })
            })
            .collect();
        let doc = serde_json::json!({
            "systems": qpi_core::catalog::known_system_ids(),
            "presets": presets,
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
        return;
    }
    println!("systems:");
    for id in qpi_core::catalog::known_system_ids() {
        println!("  {id}");
    }
    println!("\npresets:");
    println!(
        "  {:<16} {:<16} {:<10} {:<9} {:>6} {:>6} {:>7}  ic",
        "id", "system", "loss", "act", "scale", "data", "epochs"
    );
    for p in &PRESETS {
        println!(
            "  {:<16} {:<16} {:<10} {:<9} {:>6} {:>6} {:>7}  {}",
            p.id,
            p.system,
            loss_name(p.loss),
            match p.activation {
                qpi_core::net::FinalActivation::None => "none",
                qpi_core::net::FinalActivation::Sigmoid => "sigmoid",
            },
            p.scale.map(|s| s.to_string()).unwrap_or_else(|| "-".into()),
            p.dataset_size,
            p.epochs,
            p.ic.map(|(x, y)| format!("U({x}) = {y}"))
                .unwrap_or_else(|| "-".into()),
        );
    }
}

fn parse_pair(s: &str, flag: &str) -> Result<(f64, f64), Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Error::Config(format!("{flag} expects 'a,b', got '{s}'")));
    }
    let a = parts[0]
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("{flag}: bad number '{}'", parts[0])))?;
    let b = parts[1]
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("{flag}: bad number '{}'", parts[1])))?;
    Ok((a, b))
}

fn parse_grid(s: &str) -> Result<(f64, f64, usize), Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "--grid expects 'start,stop,count', got '{s}'"
        )));
    }
    let a = parts[0]
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("--grid: bad number '{}'", parts[0])))?;
    let b = parts[1]
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("--grid: bad number '{}'", parts[1])))?;
    let n = parts[2]
        .parse::<usize>()
        .map_err(|_| Error::Config(format!("--grid: bad count '{}'", parts[2])))?;
    if n < 2 {
        return Err(Error::Config("--grid: need at least 2 points".into()));
    }
    Ok((a, b, n))
}
