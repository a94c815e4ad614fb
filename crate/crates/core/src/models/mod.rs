//! The four synthesizers: VAE, WGAN, marginal sampler, uniform sampler.
//!
//! Every synthesizer implements [`Synthesizer`]; sampling is a pure function
//! of the model and a seed.

mod baseline;
mod config;
mod losses;
mod persist;
mod sampling;
mod search;
mod vae;
mod wgan;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use baseline::{MarginalModel, UniformModel};
pub use config::{Relaxation, TrainConfig};
pub use losses::{gan_losses, gaussian_kl, wgan_losses};
pub use persist::{load_model, save_model, ModelSidecar, SIDECAR_VERSION};
pub use search::{random_search, validation_score, SearchSpace, Trial};
pub use vae::{VaeLoss, VaeModel};
pub use wgan::{StepLosses, WganModel};

use crate::data::{one_hot_encode, CodedTable, Schema};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Vae,
    Wgan,
    Marginal,
    Uniform,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Vae => "vae",
            ModelKind::Wgan => "wgan",
            ModelKind::Marginal => "marginal",
            ModelKind::Uniform => "uniform",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vae" => Ok(ModelKind::Vae),
            "wgan" => Ok(ModelKind::Wgan),
            "marginal" => Ok(ModelKind::Marginal),
            "uniform" | "random" => Ok(ModelKind::Uniform),
            other => Err(Error::Config(format!("unknown model kind {other:?}"))),
        }
    }
}

pub trait Synthesizer: Send + Sync {
    fn kind(&self) -> ModelKind;
    fn schema(&self) -> &Schema;
    /// `n` schema-valid rows; identical for identical `seed`.
    fn sample(&self, n: usize, seed: u64) -> Result<CodedTable>;
}

/// Named loss values for one training epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    pub values: Vec<(&'static str, f64)>,
}

impl EpochLog {
    pub fn new(epoch: usize, values: Vec<(&'static str, f64)>) -> Self {
        Self { epoch, values }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| *v)
    }
}

/// Writes `epoch,<value names...>` followed by one row per epoch.
pub fn write_training_log<W: Write>(logs: &[EpochLog], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["epoch".to_string()];
    if let Some(first) = logs.first() {
        header.extend(first.values.iter().map(|(n, _)| n.to_string()));
    }
    w.write_record(&header)?;
    for log in logs {
        let mut rec = vec![log.epoch.to_string()];
        rec.extend(log.values.iter().map(|(_, v)| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<training log>", e))?;
    Ok(())
}

/// Any trained synthesizer.
#[derive(Debug, Clone)]
pub enum AnyModel {
    Vae(VaeModel),
    Wgan(WganModel),
    Marginal(MarginalModel),
    Uniform(UniformModel),
}

impl AnyModel {
    /// Builds and trains a model of `kind` on `train`; the RNG for
    /// initialisation and training comes from `config.seed`.
    pub fn train(
        kind: ModelKind,
        train: &CodedTable,
        config: &TrainConfig,
    ) -> Result<(Self, Vec<EpochLog>)> {
        config.validate()?;
        let schema = train.schema().clone();
        match kind {
            ModelKind::Vae => {
                let mut rng = crate::rng::substream(config.seed, "train/vae");
                let mut model = VaeModel::new(schema, config, &mut rng)?;
                let logs = model.fit(&one_hot_encode(train)?, config, &mut rng)?;
                Ok((AnyModel::Vae(model), logs))
            }
            ModelKind::Wgan => {
                let mut rng = crate::rng::substream(config.seed, "train/critic");
                let mut model = WganModel::new(schema, config, &mut rng)?;
                let logs = model.fit(&one_hot_encode(train)?, config, &mut rng)?;
                Ok((AnyModel::Wgan(model), logs))
            }
            ModelKind::Marginal => Ok((AnyModel::Marginal(MarginalModel::fit(train)?), Vec::new())),
            ModelKind::Uniform => Ok((AnyModel::Uniform(UniformModel::new(schema)), Vec::new())),
        }
    }

    fn inner(&self) -> &dyn Synthesizer {
        match self {
            AnyModel::Vae(m) => m,
            AnyModel::Wgan(m) => m,
            AnyModel::Marginal(m) => m,
            AnyModel::Uniform(m) => m,
        }
    }
}

impl Synthesizer for AnyModel {
    fn kind(&self) -> ModelKind {
        self.inner().kind()
    }

    fn schema(&self) -> &Schema {
        self.inner().schema()
    }

    fn sample(&self, n: usize, seed: u64) -> Result<CodedTable> {
        self.inner().sample(n, seed)
    }
}
