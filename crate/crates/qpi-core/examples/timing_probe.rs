use qpi_core::loss::{LossKind, LossSpec};
use qpi_core::metrics::{build_report, rmse, uniform_grid, Method};
use qpi_core::net::{FinalActivation, Mlp, MlpConfig};
use qpi_core::train::{train, Model, TrainConfig};
use qpi_core::{PotentialFn, SystemSpec};
use std::time::Instant;

fn run(name: &str, spec: SystemSpec, loss: LossSpec, net_cfg: MlpConfig, tc: TrainConfig) {
    let t0 = Instant::now();
    let init = Model::Single(Mlp::init(net_cfg, tc.seed).unwrap());
    match train(&tc, &loss, &spec, init) {
        Ok((model, h)) => {
            let dt = t0.elapsed().as_secs_f64();
            let report =
                build_report(model.potential(), &spec, 201, Method::Nn, vec![tc.seed]).unwrap();
            println!(
                "{name}: {dt:.0}s rmse_pot={:.3e} rmse_e={:?} loss0={:.3e} lossN={:.3e}",
                report.rmse_potential,
                report.rmse_energy.map(|e| format!("{e:.3e}")),
                h.epoch_loss[0],
                h.epoch_loss.last().unwrap()
            );
        }
        Err(e) => println!("{name}: FAILED {e}"),
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("all");

    if which == "all" || which == "ho" {
        let mut cfg = MlpConfig::new(1);
        cfg.final_activation = FinalActivation::Sigmoid;
        cfg.final_scale = Some(12.5);
        run(
            "ho1d-tise",
            SystemSpec::harmonic_1d(0),
            LossSpec::new(LossKind::Tise),
            cfg,
            TrainConfig {
                epochs: 1000,
                dataset_size: 2500,
                seed: 1,
                ..TrainConfig::default()
            },
        );
    }
    if which == "all" || which == "pt" {
        run(
            "pt-tise",
            SystemSpec::poschl_teller(2, 1).unwrap(),
            LossSpec::new(LossKind::Tise).with_ic(vec![0.0], -3.0),
            MlpConfig::new(1),
            TrainConfig {
                epochs: 1000,
                dataset_size: 2500,
                seed: 1,
                ..TrainConfig::default()
            },
        );
    }
    if which == "all" || which == "hyd" {
        run(
            "hyd-tise",
            SystemSpec::hydrogen_radial(2, 1).unwrap(),
            LossSpec::new(LossKind::Tise).with_ic(vec![1.0], 0.0),
            MlpConfig::new(1),
            TrainConfig {
                epochs: 1000,
                dataset_size: 2500,
                seed: 1,
                ..TrainConfig::default()
            },
        );
    }
    if which == "all" || which == "who" {
        run(
            "ho-wigner",
            SystemSpec::wigner_ho(),
            LossSpec::new(LossKind::WignerMoyal { k: 0 }).with_ic(vec![0.0], 0.0),
            MlpConfig::new(1),
            TrainConfig {
                epochs: 1000,
                dataset_size: 5000,
                seed: 1,
                ..TrainConfig::default()
            },
        );
    }
    if which == "all" || which == "sol" {
        let spec = SystemSpec::soliton();
        let tc = TrainConfig {
            epochs: 500,
            dataset_size: 3000,
            seed: 1,
            ..TrainConfig::default()
        };
        let t0 = Instant::now();
        let init = Model::Single(Mlp::init(MlpConfig::new(2), tc.seed).unwrap());
        let (model, h) = train(&tc, &LossSpec::new(LossKind::Tdse), &spec, init).unwrap();
        let dt = t0.elapsed().as_secs_f64();
        // 51x51 grid rmse vs 4 sech^2(sqrt2(x-2t))
        let xs = uniform_grid(0.0, 1.0, 51);
        let mut learned = Vec::new();
        let mut truth = Vec::new();
        for &x in &xs {
            for &t in &xs {
                learned.push(model.potential().value(&[x, t]).unwrap());
                truth.push(spec.true_potential(&[x, t]).unwrap());
            }
        }
        println!(
            "soliton: {dt:.0}s rmse={:.3e} loss0={:.3e} lossN={:.3e}",
            rmse(&learned, &truth).unwrap(),
            h.epoch_loss[0],
            h.epoch_loss.last().unwrap()
        );
    }
}
