//! Built-in experiment presets: one per shipped training configuration,
//! carrying the final-layer head, dataset size, epoch count, and the
//! initial-condition anchor where one is required.

use qpi_core::loss::{LossKind, LossSpec};
use qpi_core::net::FinalActivation;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub id: &'static str,
    pub system: &'static str,
    pub loss: LossKind,
    pub activation: FinalActivation,
    pub scale: Option<f64>,
    /// Second network head for the supervised box experiment.
    pub wave_activation: Option<(FinalActivation, Option<f64>)>,
    pub ic: Option<(f64, f64)>,
    pub dataset_size: usize,
    pub epochs: usize,
    pub grid_count: usize,
    pub learning_rate: f64,
}

pub const PRESETS: [Preset; 9] = [
    Preset {
        id: "ho1d-tise",
        system: "ho1d:n=0",
        loss: LossKind::Tise,
        activation: FinalActivation::Sigmoid,
        scale: Some(12.5),
        wave_activation: None,
        ic: None,
        dataset_size: 2500,
        epochs: 1000,
        grid_count: 201,
        learning_rate: 3e-4,
    },
    Preset {
        id: "pt-tise",
        system: "pt:l=2,mu=1",
        loss: LossKind::Tise,
        activation: FinalActivation::None,
        scale: None,
        wave_activation: None,
        ic: Some((0.0, -3.0)),
        dataset_size: 2500,
        epochs: 1000,
        grid_count: 201,
        learning_rate: 1e-3,
    },
    Preset {
        id: "hyd-tise",
        system: "hyd:n=2,l=1",
        loss: LossKind::Tise,
        activation: FinalActivation::None,
        scale: None,
        wave_activation: None,
        ic: Some((1.0, 0.0)),
        dataset_size: 2500,
        epochs: 1000,
        grid_count: 201,
        learning_rate: 1e-3,
    },
    Preset {
        id: "ho2d-tise",
        system: "ho2d:nx=0,ny=0",
        loss: LossKind::Tise,
        activation: FinalActivation::Sigmoid,
        scale: None,
        wave_activation: None,
        ic: None,
        dataset_size: 5000,
        epochs: 1000,
        grid_count: 201,
        learning_rate: 1e-3,
    },
    Preset {
        id: "pib-supervised",
        system: "pib:n=1",
        loss: LossKind::SupervisedPib,
        activation: FinalActivation::Sigmoid,
        scale: Some(10.0),
        wave_activation: Some((FinalActivation::None, None)),
        ic: None,
        dataset_size: 4000,
        epochs: 1000,
        grid_count: 201,
        learning_rate: 1e-3,
    },
    Preset {
        id: "soliton-tdse",
        system: "soliton",
        loss: LossKind::Tdse,
        activation: FinalActivation::None,
        scale: None,
        wave_activation: None,
        ic: None,
        dataset_size: 3000,
        epochs: 500,
        grid_count: 51,
        learning_rate: 1e-3,
    },
    Preset {
        id: "ho-wigner",
        system: "wigner-ho",
        loss: LossKind::WignerMoyal { k: 0 },
        activation: FinalActivation::None,
        scale: None,
        wave_activation: None,
        ic: Some((0.0, 0.0)),
        dataset_size: 5000,
        epochs: 1000,
        grid_count: 201,
        learning_rate: 1e-3,
    },
    Preset {
        id: "pt-wigner-k0",
        system: "wigner-pt",
        loss: LossKind::WignerMoyal { k: 0 },
        activation: FinalActivation::None,
        scale: None,
        wave_activation: None,
        ic: Some((0.0, -3.0)),
        dataset_size: 2000,
        epochs: 1000,
        grid_count: 201,
        learning_rate: 1e-3,
    },
    Preset {
        id: "pt-wigner-k1",
        system: "wigner-pt",
        loss: LossKind::WignerMoyal { k: 1 },
        activation: FinalActivation::None,
        scale: None,
        wave_activation: None,
        ic: Some((0.0, -3.0)),
        dataset_size: 2000,
        epochs: 1000,
        grid_count: 201,
        learning_rate: 1e-3,
    },
];

pub fn find(id: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.id == id)
}

/// The anchor each system's reference experiments use, for baseline runs
/// invoked without an explicit `--ic`.
pub fn default_ic(system_id: &str) -> Option<(f64, f64)> {
    let family = system_id.split(':').next().unwrap_or(system_id);
    match family {
        "ho1d" => Some((0.0, 0.0)),
        "pt" => Some((0.0, -3.0)),
        "hyd" => Some((1.0, 0.0)),
        "pib" => Some((0.0, 0.0)),
        "h2" => None, // anchored at the equilibrium coordinate, resolved later
        _ => None,
    }
}

/// Spec of the loss a preset trains, assembled from its fields.
pub fn loss_spec(p: &Preset) -> LossSpec {
    let mut spec = LossSpec::new(p.loss);
    if let Some((x, y)) = p.ic {
        spec = spec.with_ic(vec![x], y);
    }
    spec
}
