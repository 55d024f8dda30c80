use qpi_core::loss::{LossKind, LossSpec};
use qpi_core::metrics::{build_report, energy_curve, report_grid, rmse, uniform_grid, Method};
use qpi_core::net::{Mlp, MlpConfig};
use qpi_core::train::{train, Model, TrainConfig};
use qpi_core::{PotentialFn, SystemSpec};

fn main() {
    let which = std::env::args().nth(1).unwrap();
    let seed: u64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);
    match which.as_str() {
        "pt" => {
            let spec = SystemSpec::poschl_teller(2, 1).unwrap();
            let tc = TrainConfig {
                epochs: 1000,
                dataset_size: 2500,
                seed,
                ..TrainConfig::default()
            };
            let loss = LossSpec::new(LossKind::Tise).with_ic(vec![0.0], -3.0);
            let (m, _) = train(
                &tc,
                &loss,
                &spec,
                Model::Single(Mlp::init(MlpConfig::new(1), seed).unwrap()),
            )
            .unwrap();
            let r = build_report(m.potential(), &spec, 201, Method::Nn, vec![seed]).unwrap();
            println!(
                "pt seed={seed}: rmse_pot={:.4e} rmse_e={:.4e}",
                r.rmse_potential,
                r.rmse_energy.unwrap()
            );
        }
        "hyd" => {
            let spec = SystemSpec::hydrogen_radial(2, 1).unwrap();
            let tc = TrainConfig {
                epochs: 1000,
                dataset_size: 2500,
                seed,
                ..TrainConfig::default()
            };
            let loss = LossSpec::new(LossKind::Tise).with_ic(vec![1.0], 0.0);
            let (m, _) = train(
                &tc,
                &loss,
                &spec,
                Model::Single(Mlp::init(MlpConfig::new(1), seed).unwrap()),
            )
            .unwrap();
            let (_, pts) = report_grid(&spec, 201);
            let es = energy_curve(m.potential(), &spec, &pts).unwrap();
            let flat = vec![-0.125; es.len()];
            println!("hyd seed={seed}: rmse_e={:.4e}", rmse(&es, &flat).unwrap());
        }
        "who" => {
            let spec = SystemSpec::wigner_ho();
            let tc = TrainConfig {
                epochs: 1000,
                dataset_size: 5000,
                seed,
                ..TrainConfig::default()
            };
            let loss = LossSpec::new(LossKind::WignerMoyal { k: 0 }).with_ic(vec![0.0], 0.0);
            let (m, _) = train(
                &tc,
                &loss,
                &spec,
                Model::Single(Mlp::init(MlpConfig::new(1), seed).unwrap()),
            )
            .unwrap();
            let r = build_report(m.potential(), &spec, 201, Method::Nn, vec![seed]).unwrap();
            println!("who seed={seed}: rmse_pot={:.4e}", r.rmse_potential);
        }
        "sol" => {
            let spec = SystemSpec::soliton();
            let tc = TrainConfig {
                epochs: 500,
                dataset_size: 3000,
                seed,
                ..TrainConfig::default()
            };
            let (m, _) = train(
                &tc,
                &LossSpec::new(LossKind::Tdse),
                &spec,
                Model::Single(Mlp::init(MlpConfig::new(2), seed).unwrap()),
            )
            .unwrap();
            let xs = uniform_grid(0.0, 1.0, 51);
            let mut learned = Vec::new();
            let mut truth = Vec::new();
            for &x in &xs {
                for &t in &xs {
                    learned.push(m.potential().value(&[x, t]).unwrap());
                    truth.push(spec.true_potential(&[x, t]).unwrap());
                }
            }
            println!(
                "sol seed={seed}: rmse={:.4e}",
                rmse(&learned, &truth).unwrap()
            );
        }
        _ => unreachable!(),
    }
}
