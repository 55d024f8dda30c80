use qpi_core::loss::{LossKind, LossSpec};
use qpi_core::metrics::{build_report, Method};
use qpi_core::net::{FinalActivation, Mlp, MlpConfig};
use qpi_core::train::{train, Model, TrainConfig};
use qpi_core::{Rng, SystemSpec};

// Full fan-in init: W, b ~ U(+-1/sqrt(fan_in)) per layer.
fn fan_in_init(mut net: Mlp, seed: u64) -> Mlp {
    let shapes = [(1usize, 32usize), (32, 128), (128, 128), (128, 1)];
    let mut rng = Rng::new(seed);
    let mut pos = 0;
    for (fan_in, fan_out) in shapes {
        let bound = 1.0 / (fan_in as f64).sqrt();
        for w in net.params[pos..pos + fan_in * fan_out + fan_out].iter_mut() {
            *w = rng.range(-bound, bound);
        }
        pos += fan_in * fan_out + fan_out;
    }
    net
}

fn main() {
    let lr: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1e-3);
    let seed: u64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);
    let epochs: usize = std::env::args()
        .nth(3)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1000);
    let spec = SystemSpec::harmonic_1d(0);
    let mut cfg = MlpConfig::new(1);
    cfg.final_activation = FinalActivation::Sigmoid;
    cfg.final_scale = Some(12.5);
    let tc = TrainConfig {
        epochs,
        dataset_size: 2500,
        seed,
        learning_rate: lr,
        ..TrainConfig::default()
    };
    let init = fan_in_init(Mlp::init(cfg, seed).unwrap(), seed);
    let (m, h) = train(
        &tc,
        &LossSpec::new(LossKind::Tise),
        &spec,
        Model::Single(init),
    )
    .unwrap();
    let report = build_report(m.potential(), &spec, 201, Method::Nn, vec![seed]).unwrap();
    println!(
        "fanin lr={lr} seed {seed} ep={epochs}: rmse={:.4e} lossN={:.3e}",
        report.rmse_potential,
        h.epoch_loss.last().unwrap()
    );
}
