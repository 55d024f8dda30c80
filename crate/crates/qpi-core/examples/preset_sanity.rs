use qpi_core::loss::{LossKind, LossSpec};
use qpi_core::metrics::{build_report, Method};
use qpi_core::net::{FinalActivation, Mlp, MlpConfig};
use qpi_core::train::{train, Model, TrainConfig};
use qpi_core::SystemSpec;
use std::time::Instant;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "ho2d".into());
    let epochs: usize = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(300);
    match which.as_str() {
        "ho2d" => {
            let spec = SystemSpec::harmonic_2d(0, 0);
            let mut cfg = MlpConfig::new(2);
            cfg.final_activation = FinalActivation::Sigmoid;
            let tc = TrainConfig {
                epochs,
                dataset_size: 5000,
                seed: 1,
                ..TrainConfig::default()
            };
            let t0 = Instant::now();
            let (m, h) = train(
                &tc,
                &LossSpec::new(LossKind::Tise),
                &spec,
                Model::Single(Mlp::init(cfg, 1).unwrap()),
            )
            .unwrap();
            let report = build_report(m.potential(), &spec, 101, Method::Nn, vec![1]).unwrap();
            println!(
                "ho2d {epochs}ep: {:.0}s rmse_pot={:.3e} rmse_e={:.3e} loss {:.2e}->{:.2e}",
                t0.elapsed().as_secs_f64(),
                report.rmse_potential,
                report.rmse_energy.unwrap(),
                h.epoch_loss[0],
                h.epoch_loss.last().unwrap()
            );
        }
        "pib" => {
            let spec = SystemSpec::particle_in_box(1).unwrap();
            let mut pot_cfg = MlpConfig::new(1);
            pot_cfg.final_activation = FinalActivation::Sigmoid;
            pot_cfg.final_scale = Some(10.0);
            let wave_cfg = MlpConfig::new(1);
            let tc = TrainConfig {
                epochs,
                dataset_size: 4000,
                seed: 1,
                ..TrainConfig::default()
            };
            let t0 = Instant::now();
            let init = Model::PibPair {
                potential: Mlp::init(pot_cfg, 1).unwrap(),
                wave: Mlp::init(wave_cfg, 99).unwrap(),
            };
            let (m, h) = train(&tc, &LossSpec::new(LossKind::SupervisedPib), &spec, init).unwrap();
            let report = build_report(m.potential(), &spec, 201, Method::Nn, vec![1]).unwrap();
            println!(
                "pib {epochs}ep: {:.0}s rmse_pot={:.3e} rmse_e={:.3e} loss {:.2e}->{:.2e}",
                t0.elapsed().as_secs_f64(),
                report.rmse_potential,
                report.rmse_energy.unwrap(),
                h.epoch_loss[0],
                h.epoch_loss.last().unwrap()
            );
        }
        "ptwig" => {
            let spec = SystemSpec::wigner_pt();
            let tc = TrainConfig {
                epochs,
                dataset_size: 2000,
                seed: 1,
                ..TrainConfig::default()
            };
            let loss = LossSpec::new(LossKind::WignerMoyal { k: 1 }).with_ic(vec![0.0], -3.0);
            let t0 = Instant::now();
            let (m, h) = train(
                &tc,
                &loss,
                &spec,
                Model::Single(Mlp::init(MlpConfig::new(1), 1).unwrap()),
            )
            .unwrap();
            let report = build_report(m.potential(), &spec, 201, Method::Nn, vec![1]).unwrap();
            println!(
                "pt-wigner-k1 {epochs}ep: {:.0}s rmse_pot={:.3e} loss {:.2e}->{:.2e}",
                t0.elapsed().as_secs_f64(),
                report.rmse_potential,
                h.epoch_loss[0],
                h.epoch_loss.last().unwrap()
            );
        }
        other => eprintln!("unknown target {other}"),
    }
}
