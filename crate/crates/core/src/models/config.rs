use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How generated rows are made differentiable while training the WGAN.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relaxation {
    /// Gumbel-softmax of each block at `gumbel_temperature`.
    Gumbel,
    /// The generator's block probabilities as they are.
    Softmax,
}

/// Hyperparameters for every synthesizer. Unused fields are ignored by
/// models that do not need them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub latent_dim: usize,
    pub lr_vae: f64,
    pub lr_generator: f64,
    pub lr_critic: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub kl_weight: f64,
    pub clip_c: f64,
    pub n_critic: usize,
    pub gumbel_temperature: f64,
    pub relaxation: Relaxation,
    pub hidden_encoder: Vec<usize>,
    pub hidden_decoder: Vec<usize>,
    pub hidden_generator: Vec<usize>,
    pub hidden_critic: Vec<usize>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            batch_size: 256,
            latent_dim: 16,
            lr_vae: 1e-3,
            lr_generator: 3e-4,
            lr_critic: 3e-4,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            kl_weight: 1.0,
            clip_c: 0.01,
            n_critic: 5,
            gumbel_temperature: 0.5,
            relaxation: Relaxation::Gumbel,
            hidden_encoder: vec![64, 64],
            hidden_decoder: vec![64, 64],
            hidden_generator: vec![64, 64],
            hidden_critic: vec![64, 64],
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("epochs", self.epochs),
            ("batch_size", self.batch_size),
            ("latent_dim", self.latent_dim),
            ("n_critic", self.n_critic),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        let positive = [
            ("lr_vae", self.lr_vae),
            ("lr_generator", self.lr_generator),
            ("lr_critic", self.lr_critic),
            ("clip_c", self.clip_c),
            ("gumbel_temperature", self.gumbel_temperature),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "{name} must be a positive number, got {v}"
                )));
            }
        }
        if !(self.kl_weight >= 0.0 && self.kl_weight.is_finite()) {
            return Err(Error::Config(format!(
                "kl_weight must be nonnegative, got {}",
                self.kl_weight
            )));
        }
        for (name, beta) in [
            ("adam_beta1", self.adam_beta1),
            ("adam_beta2", self.adam_beta2),
        ] {
            if !(0.0..1.0).contains(&beta) {
                return Err(Error::Config(format!(
                    "{name} must lie in [0, 1), got {beta}"
                )));
            }
        }
        for (name, layers) in [
            ("hidden_encoder", &self.hidden_encoder),
            ("hidden_decoder", &self.hidden_decoder),
            ("hidden_generator", &self.hidden_generator),
            ("hidden_critic", &self.hidden_critic),
        ] {
            if layers.contains(&0) {
                return Err(Error::Config(format!("{name} contains a zero-width layer")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        TrainConfig::default().validate().unwrap();
    }

    #[test]
    fn invalid_values_rejected() {
        let invalid = [
            TrainConfig {
                n_critic: 0,
                ..Default::default()
            },
            TrainConfig {
                clip_c: -1.0,
                ..Default::default()
            },
            TrainConfig {
                hidden_critic: vec![8, 0],
                ..Default::default()
            },
        ];
        for c in invalid {
            assert!(c.validate().is_err());
        }
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: TrainConfig =
            serde_json::from_str(r#"{"epochs": 3, "relaxation": "softmax"}"#).unwrap();
        assert_eq!(c.epochs, 3);
        assert_eq!(c.relaxation, Relaxation::Softmax);
        assert_eq!(c.latent_dim, 16);
        assert!(serde_json::from_str::<TrainConfig>(r#"{"epoch": 3}"#).is_err());
    }
}
