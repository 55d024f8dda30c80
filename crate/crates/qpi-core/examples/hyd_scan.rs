use qpi_core::loss::{LossKind, LossSpec};
use qpi_core::metrics::{energy_curve, report_grid, rmse};
use qpi_core::net::{Mlp, MlpConfig};
use qpi_core::train::{train, Model, TrainConfig};
use qpi_core::SystemSpec;

fn main() {
    let seed: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);
    let spec = SystemSpec::hydrogen_radial(2, 1).unwrap();
    let tc = TrainConfig {
        epochs: 1000,
        dataset_size: 2500,
        seed,
        ..TrainConfig::default()
    };
    let loss = LossSpec::new(LossKind::Tise).with_ic(vec![1.0], 0.0);
    let (m, h) = train(
        &tc,
        &loss,
        &spec,
        Model::Single(Mlp::init(MlpConfig::new(1), seed).unwrap()),
    )
    .unwrap();
    let (_, pts) = report_grid(&spec, 201);
    let energies = energy_curve(m.potential(), &spec, &pts).unwrap();
    let flat = vec![-0.125; energies.len()];
    println!(
        "hyd seed {seed}: rmse_energy={:.4e} lossN={:.3e}",
        rmse(&energies, &flat).unwrap(),
        h.epoch_loss.last().unwrap()
    );
}
