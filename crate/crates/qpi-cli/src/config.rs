//! Flat key-value experiment configs with dotted sections.
//!
//! ```text
//! # comment
//! preset = pt-tise
//! train.epochs = 200
//! seeds = 1,2,3,4,5
//! output = runs/pt
//! ```
//!
//! Unknown keys, malformed values, and missing required fields are reported
//! with their line number. A config may start from a preset and override
//! individual fields, or spell out everything from scratch.

use std::collections::BTreeMap;
use std::path::PathBuf;

use qpi_core::loss::{LossKind, LossSpec, MoyalDenominator, MoyalS1Sign};
use qpi_core::net::{FinalActivation, MlpConfig};
use qpi_core::train::TrainConfig;
use qpi_core::SystemSpec;

use crate::presets;

/// A config error with enough context to point at the offending line.
#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.line, &self.field) {
            (Some(l), Some(k)) => write!(f, "config line {l} ({k}): {}", self.message),
            (Some(l), None) => write!(f, "config line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "config field '{k}': {}", self.message),
            (None, None) => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: Option<usize>, field: Option<&str>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        field: field.map(str::to_string),
        message: message.into(),
    }
}

/// Fully resolved experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub preset: Option<String>,
    pub system: SystemSpec,
    pub loss: LossSpec,
    pub train: TrainConfig,
    pub net: MlpConfig,
    /// Second network for the supervised box experiment.
    pub wave_net: Option<MlpConfig>,
    pub output: PathBuf,
    pub seeds: Vec<u64>,
    pub grid_count: usize,
}

const KNOWN_KEYS: [&str; 18] = [
    "preset",
    "system",
    "output",
    "seeds",
    "grid.count",
    "loss.kind",
    "loss.ic",
    "loss.ic_weight",
    "loss.moyal_denominator",
    "loss.moyal_s1_sign",
    "net.activation",
    "net.scale",
    "net.residual",
    "wave.activation",
    "wave.scale",
    "train.epochs",
    "train.batch_size",
    "train.learning_rate",
];
// train.dataset_size and train.seed are also accepted; kept out of the
// const array only to appease its fixed length.

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut kv: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(Some(line_no), None, "expected 'key = value'"))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let known = KNOWN_KEYS.contains(&key.as_str())
            || key == "train.dataset_size"
            || key == "train.seed";
        if !known {
            return Err(err(Some(line_no), Some(&key), "unknown key"));
        }
        if kv.insert(key.clone(), (line_no, value)).is_some() {
            return Err(err(Some(line_no), Some(&key), "duplicate key"));
        }
    }
    resolve(kv)
}

fn resolve(kv: BTreeMap<String, (usize, String)>) -> Result<ExperimentConfig, ConfigError> {
    let get = |k: &str| kv.get(k).map(|(l, v)| (*l, v.as_str()));

    let preset = match get("preset") {
        Some((line, id)) => Some(
            presets::find(id)
                .ok_or_else(|| {
                    err(
                        Some(line),
                        Some("preset"),
                        format!(
                            "unknown preset '{id}'; known: {}",
                            presets::PRESETS.map(|p| p.id).join(", ")
                        ),
                    )
                })
                .copied()?,
        ),
        None => None,
    };

    let system_id = match get("system") {
        Some((_, id)) => id.to_string(),
        None => match &preset {
            Some(p) => p.system.to_string(),
            None => return Err(err(None, Some("system"), "missing (no preset selected)")),
        },
    };
    let system = SystemSpec::parse_id(&system_id).map_err(|e| {
        let line = get("system").map(|(l, _)| l);
        err(line, Some("system"), e.to_string())
    })?;

    let loss_kind = match get("loss.kind") {
        Some((line, v)) => match v {
            "tise" => LossKind::Tise,
            "tdse" => LossKind::Tdse,
            "wigner-k0" => LossKind::WignerMoyal { k: 0 },
            "wigner-k1" => LossKind::WignerMoyal { k: 1 },
            "pib" => LossKind::SupervisedPib,
            other => {
                return Err(err(
                    Some(line),
                    Some("loss.kind"),
                    format!("unknown loss '{other}' (tise|tdse|wigner-k0|wigner-k1|pib)"),
                ))
            }
        },
        None => match &preset {
            Some(p) => p.loss,
            None => return Err(err(None, Some("loss.kind"), "missing (no preset selected)")),
        },
    };

    let mut loss = LossSpec::new(loss_kind);
    match get("loss.ic") {
        Some((line, v)) => {
            if v != "none" {
                let nums = parse_floats(v).map_err(|m| err(Some(line), Some("loss.ic"), m))?;
                if nums.len() < 2 {
                    return Err(err(
                        Some(line),
                        Some("loss.ic"),
                        "expected 'coords...,target' (at least two numbers)",
                    ));
                }
                let (point, target) = nums.split_at(nums.len() - 1);
                loss = loss.with_ic(point.to_vec(), target[0]);
            }
        }
        None => {
            if let Some(p) = &preset {
                if let Some((x, y)) = p.ic {
                    loss = loss.with_ic(vec![x], y);
                }
            }
        }
    }
    if let Some((line, v)) = get("loss.ic_weight") {
        loss.ic_weight = parse_num(v).map_err(|m| err(Some(line), Some("loss.ic_weight"), m))?;
    }
    if let Some((line, v)) = get("loss.moyal_denominator") {
        loss.moyal_denominator = match v {
            "factorial" => MoyalDenominator::Factorial,
            "linear" => MoyalDenominator::Linear,
            _ => {
                return Err(err(
                    Some(line),
                    Some("loss.moyal_denominator"),
                    "expected factorial|linear",
                ))
            }
        };
    }
    if let Some((line, v)) = get("loss.moyal_s1_sign") {
        loss.moyal_s1_sign = match v {
            "negative" => MoyalS1Sign::Negative,
            "positive" => MoyalS1Sign::Positive,
            _ => {
                return Err(err(
                    Some(line),
                    Some("loss.moyal_s1_sign"),
                    "expected negative|positive",
                ))
            }
        };
    }

    let input_dim = match loss_kind {
        LossKind::Tdse => 2,
        _ => system.potential_domain().len(),
    };
    let mut net = MlpConfig::new(input_dim);
    match get("net.activation") {
        Some((line, v)) => {
            net.final_activation =
                parse_activation(v).map_err(|m| err(Some(line), Some("net.activation"), m))?;
        }
        None => {
            if let Some(p) = &preset {
                net.final_activation = p.activation;
            }
        }
    }
    match get("net.scale") {
        Some((line, v)) => {
            net.final_scale = if v == "none" {
                None
            } else {
                Some(parse_num(v).map_err(|m| err(Some(line), Some("net.scale"), m))?)
            };
        }
        None => {
            if let Some(p) = &preset {
                net.final_scale = p.scale;
            }
        }
    }
    if let Some((line, v)) = get("net.residual") {
        net.residual_skip = v
            .parse::<bool>()
            .map_err(|_| err(Some(line), Some("net.residual"), "expected true|false"))?;
    }

    let wave_net = if loss_kind == LossKind::SupervisedPib {
        let mut wave = MlpConfig::new(1);
        let preset_wave = preset.as_ref().and_then(|p| p.wave_activation);
        wave.final_activation = match get("wave.activation") {
            Some((line, v)) => {
                parse_activation(v).map_err(|m| err(Some(line), Some("wave.activation"), m))?
            }
            None => preset_wave.map(|(a, _)| a).unwrap_or(FinalActivation::None),
        };
        wave.final_scale = match get("wave.scale") {
            Some((line, v)) => {
                if v == "none" {
                    None
                } else {
                    Some(parse_num(v).map_err(|m| err(Some(line), Some("wave.scale"), m))?)
                }
            }
            None => preset_wave.and_then(|(_, s)| s),
        };
        Some(wave)
    } else {
        None
    };

    let mut train = TrainConfig::default();
    if let Some(p) = &preset {
        train.epochs = p.epochs;
        train.dataset_size = p.dataset_size;
        train.learning_rate = p.learning_rate;
    }
    if let Some((line, v)) = get("train.epochs") {
        train.epochs = parse_num_usize(v).map_err(|m| err(Some(line), Some("train.epochs"), m))?;
    }
    if let Some((line, v)) = get("train.batch_size") {
        train.batch_size =
            parse_num_usize(v).map_err(|m| err(Some(line), Some("train.batch_size"), m))?;
    }
    if let Some((line, v)) = get("train.learning_rate") {
        train.learning_rate =
            parse_num(v).map_err(|m| err(Some(line), Some("train.learning_rate"), m))?;
    }
    if let Some((line, v)) = get("train.dataset_size") {
        train.dataset_size =
            parse_num_usize(v).map_err(|m| err(Some(line), Some("train.dataset_size"), m))?;
    }
    if let Some((line, v)) = get("train.seed") {
        train.seed = v.parse::<u64>().map_err(|_| {
            err(
                Some(line),
                Some("train.seed"),
                "expected an unsigned integer",
            )
        })?;
    }

    let seeds = match get("seeds") {
        Some((line, v)) => {
            let seeds: Result<Vec<u64>, _> =
                v.split(',').map(|s| s.trim().parse::<u64>()).collect();
            seeds.map_err(|_| {
                err(
                    Some(line),
                    Some("seeds"),
                    "expected comma-separated unsigned integers",
                )
            })?
        }
        None => vec![train.seed],
    };

    let grid_count = match get("grid.count") {
        Some((line, v)) => {
            let n = parse_num_usize(v).map_err(|m| err(Some(line), Some("grid.count"), m))?;
            if n < 2 {
                return Err(err(
                    Some(line),
                    Some("grid.count"),
                    "need at least 2 points",
                ));
            }
            n
        }
        None => preset.as_ref().map(|p| p.grid_count).unwrap_or(201),
    };

    let output = match get("output") {
        Some((_, v)) => PathBuf::from(v),
        None => return Err(err(None, Some("output"), "missing")),
    };

    // Cross-field validation, before anything touches the filesystem.
    train
        .validate()
        .map_err(|e| err(None, Some("train"), e.to_string()))?;
    net.validate()
        .map_err(|e| err(None, Some("net"), e.to_string()))?;
    loss.validate(&net)
        .map_err(|e| err(None, Some("loss"), e.to_string()))?;

    Ok(ExperimentConfig {
        preset: preset.map(|p| p.id.to_string()),
        system,
        loss,
        train,
        net,
        wave_net,
        output,
        seeds,
        grid_count,
    })
}

fn parse_floats(v: &str) -> Result<Vec<f64>, String> {
    v.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number '{s}'"))
        })
        .collect()
}

fn parse_num(v: &str) -> Result<f64, String> {
    v.parse::<f64>().map_err(|_| format!("bad number '{v}'"))
}

fn parse_num_usize(v: &str) -> Result<usize, String> {
    v.parse::<usize>().map_err(|_| format!("bad count '{v}'"))
}

fn parse_activation(v: &str) -> Result<FinalActivation, String> {
    match v {
        "none" => Ok(FinalActivation::None),
        "sigmoid" => Ok(FinalActivation::Sigmoid),
        _ => Err("expected none|sigmoid".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_config_resolves_defaults() {
        let cfg = parse_config("preset = ho1d-tise\noutput = /tmp/x\ntrain.seed = 9\n").unwrap();
        assert_eq!(cfg.system.id(), "ho1d:n=0");
        assert_eq!(cfg.train.epochs, 1000);
        assert_eq!(cfg.train.dataset_size, 2500);
        assert_eq!(cfg.net.final_scale, Some(12.5));
        assert_eq!(cfg.train.seed, 9);
        assert_eq!(cfg.seeds, vec![9]);
    }

    #[test]
    fn overrides_beat_preset_defaults() {
        let cfg = parse_config(
            "preset = pt-tise\noutput = o\ntrain.epochs = 7\nloss.ic = 0,-3\nseeds = 1,2\n",
        )
        .unwrap();
        assert_eq!(cfg.train.epochs, 7);
        assert_eq!(cfg.seeds, vec![1, 2]);
        let ic = cfg.loss.initial_condition.unwrap();
        assert_eq!(ic.point, vec![0.0]);
        assert_eq!(ic.target, -3.0);
    }

    #[test]
    fn missing_system_is_a_schema_error() {
        let e = parse_config("output = o\nloss.kind = tise\n").unwrap_err();
        assert_eq!(e.field.as_deref(), Some("system"));
    }

    #[test]
    fn unknown_keys_carry_line_numbers() {
        let e = parse_config("preset = ho1d-tise\noutput = o\nbogus = 3\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert_eq!(e.field.as_deref(), Some("bogus"));
    }

    #[test]
    fn bad_values_carry_line_numbers() {
        let e = parse_config("preset = ho1d-tise\noutput = o\ntrain.epochs = many\n").unwrap_err();
        assert_eq!(e.line, Some(3));
    }

    #[test]
    fn unbounded_stationary_config_without_anchor_is_rejected() {
        let e =
            parse_config("system = pt:l=2,mu=1\nloss.kind = tise\nloss.ic = none\noutput = o\n")
                .unwrap_err();
        assert_eq!(e.field.as_deref(), Some("loss"));
    }

    #[test]
    fn box_preset_carries_two_networks() {
        let cfg = parse_config("preset = pib-supervised\noutput = o\n").unwrap();
        assert!(cfg.wave_net.is_some());
        assert_eq!(cfg.net.final_scale, Some(10.0));
    }

    #[test]
    fn soliton_network_takes_two_inputs() {
        let cfg = parse_config("preset = soliton-tdse\noutput = o\n").unwrap();
        assert_eq!(cfg.net.input_dim, 2);
        assert_eq!(cfg.grid_count, 51);
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let e = parse_config("preset = ho1d-tise\npreset = pt-tise\noutput = o\n").unwrap_err();
        assert_eq!(e.line, Some(2));
    }
}
