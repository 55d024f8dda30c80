use qpi_core::loss::{LossKind, LossSpec};
use qpi_core::metrics::{build_report, Method};
use qpi_core::net::{FinalActivation, Mlp, MlpConfig};
use qpi_core::train::{train, Model, TrainConfig};
use qpi_core::SystemSpec;

fn main() {
    let lr: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(3e-4);
    let seed: u64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);
    let spec = SystemSpec::harmonic_1d(0);
    let mut cfg = MlpConfig::new(1);
    cfg.final_activation = FinalActivation::Sigmoid;
    cfg.final_scale = Some(12.5);
    let tc = TrainConfig {
        epochs: 1000,
        dataset_size: 2500,
        seed,
        learning_rate: lr,
        ..TrainConfig::default()
    };
    let init = Mlp::init(cfg, seed).unwrap();
    let (m, h) = train(
        &tc,
        &LossSpec::new(LossKind::Tise),
        &spec,
        Model::Single(init),
    )
    .unwrap();
    let report = build_report(m.potential(), &spec, 201, Method::Nn, vec![seed]).unwrap();
    println!(
        "ho lr={lr} seed={seed}: rmse={:.4e} lossN={:.3e}",
        report.rmse_potential,
        h.epoch_loss.last().unwrap()
    );
}
