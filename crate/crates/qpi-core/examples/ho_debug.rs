use qpi_core::loss::{LossKind, LossSpec};
use qpi_core::metrics::{build_report, Method};
use qpi_core::net::{FinalActivation, Mlp, MlpConfig};
use qpi_core::train::{train, Model, TrainConfig};
use qpi_core::{PotentialFn, SystemSpec};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let lr: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1e-3);
    let epochs: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(150);
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1);
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
    // full run diagnostics
    let (m, h) = train(
        &tc,
        &LossSpec::new(LossKind::Tise),
        &spec,
        Model::Single(Mlp::init(cfg, seed).unwrap()),
    )
    .unwrap();
    let report = build_report(m.potential(), &spec, 201, Method::Nn, vec![seed]).unwrap();
    println!(
        "lr={lr} epochs={epochs} seed={seed} rmse_pot={:.4e}",
        report.rmse_potential
    );
    println!(
        "loss: {:.3e} -> {:.3e} (mid {:.3e})",
        h.epoch_loss[0],
        h.epoch_loss.last().unwrap(),
        h.epoch_loss[epochs / 2]
    );
    print!("U(x):");
    for i in 0..11 {
        let x = -5.0 + i as f64;
        print!(" {:.2}", m.potential().value(&[x]).unwrap());
    }
    println!();
    print!("true:");
    for i in 0..11 {
        let x: f64 = -5.0 + i as f64;
        print!(" {:.2}", 0.5 * x * x);
    }
    println!();
}
