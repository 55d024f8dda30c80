use qpi_core::loss::{LossKind, LossSpec};
use qpi_core::metrics::{build_report, Method};
use qpi_core::net::{FinalActivation, Mlp, MlpConfig};
use qpi_core::train::{train, Model, TrainConfig};
use qpi_core::SystemSpec;

fn main() {
    let w4_mult: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1.0);
    let lr: f64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(3e-4);
    let seed: u64 = std::env::args()
        .nth(3)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);
    let epochs: usize = std::env::args()
        .nth(4)
        .and_then(|s| s.parse().ok())
        .unwrap_or(300);
    let spec = SystemSpec::harmonic_1d(0);
    let mut cfg = MlpConfig::new(1);
    cfg.final_activation = FinalActivation::Sigmoid;
    cfg.final_scale = Some(12.5);
    let mut init = Mlp::init(cfg, seed).unwrap();
    // scale the last layer's weights (the 128 entries before the final bias)
    let n = init.params.len();
    for w in init.params[n - 129..n - 1].iter_mut() {
        *w *= w4_mult;
    }
    let tc = TrainConfig {
        epochs,
        dataset_size: 2500,
        seed,
        learning_rate: lr,
        ..TrainConfig::default()
    };
    let (m, h) = train(
        &tc,
        &LossSpec::new(LossKind::Tise),
        &spec,
        Model::Single(init),
    )
    .unwrap();
    let report = build_report(m.potential(), &spec, 201, Method::Nn, vec![seed]).unwrap();
    println!(
        "w4x{w4_mult} lr={lr} seed={seed} ep={epochs}: rmse={:.4e} lossN={:.3e}",
        report.rmse_potential,
        h.epoch_loss.last().unwrap()
    );
}
