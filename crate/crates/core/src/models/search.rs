//! Seeded random search over [`TrainConfig`] scored on validation data.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AnyModel, EpochLog, ModelKind, Synthesizer, TrainConfig};
use crate::data::CodedTable;
use crate::error::{Error, Result};
use crate::eval::{empirical_joint, srmse};

/// Ranges sampled per trial. Learning rates are drawn log-uniformly and
/// applied to whichever networks the model kind has.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSpace {
    pub latent_dims: Vec<usize>,
    pub hidden_widths: Vec<usize>,
    pub hidden_depths: Vec<usize>,
    pub lr_min: f64,
    pub lr_max: f64,
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            latent_dims: vec![4, 8, 16, 32],
            hidden_widths: vec![32, 64, 128],
            hidden_depths: vec![1, 2],
            lr_min: 1e-5,
            lr_max: 3e-3,
        }
    }
}

impl SearchSpace {
    fn validate(&self) -> Result<()> {
        if self.latent_dims.is_empty()
            || self.hidden_widths.is_empty()
            || self.hidden_depths.is_empty()
        {
            return Err(Error::Config("search space lists must be non-empty".into()));
        }
        if !(self.lr_min > 0.0 && self.lr_min <= self.lr_max) {
            return Err(Error::Config(
                "search learning-rate range is invalid".into(),
            ));
        }
        Ok(())
    }

    fn draw<R: Rng + ?Sized>(&self, base: &TrainConfig, rng: &mut R) -> TrainConfig {
        let pick = |v: &[usize], rng: &mut R| v[rng.random_range(0..v.len())];
        let latent = pick(&self.latent_dims, rng);
        let width = pick(&self.hidden_widths, rng);
        let depth = pick(&self.hidden_depths, rng);
        let (lo, hi) = (self.lr_min.ln(), self.lr_max.ln());
        let lr = (lo + (hi - lo) * rng.random::<f64>()).exp();
        let hidden = vec![width; depth];
        TrainConfig {
            latent_dim: latent,
            lr_vae: lr,
            lr_generator: lr,
            lr_critic: lr,
            hidden_encoder: hidden.clone(),
            hidden_decoder: hidden.clone(),
            hidden_generator: hidden.clone(),
            hidden_critic: hidden,
            ..base.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub index: usize,
    pub config: TrainConfig,
    pub validation_srmse: f64,
}

/// Mean SRMSE between `validation` and an equally sized sample, over every
/// pair of variables (or the single variable of a one-variable schema).
pub fn validation_score(
    model: &dyn Synthesizer,
    validation: &CodedTable,
    seed: u64,
) -> Result<f64> {
    let generated = model.sample(validation.n_rows(), seed)?;
    let names = validation.schema().names();
    let subsets: Vec<Vec<&str>> = if names.len() == 1 {
        vec![names.clone()]
    } else {
        let mut out = Vec::new();
        for i in 0..names.len() {
            for j in i + 1..names.len() {
                out.push(vec![names[i], names[j]]);
            }
        }
        out
    };
    let mut total = 0.0;
    for s in &subsets {
        total += srmse(
            &empirical_joint(&generated, s)?,
            &empirical_joint(validation, s)?,
        )?;
    }
    Ok(total / subsets.len() as f64)
}

/// Trains `trials` models with configurations drawn from `space` and returns
/// the trials sorted by validation score (best first) plus the best model and
/// its training log.
pub fn random_search(
    kind: ModelKind,
    train: &CodedTable,
    validation: &CodedTable,
    base: &TrainConfig,
    space: &SearchSpace,
    trials: usize,
    seed: u64,
) -> Result<(Vec<Trial>, AnyModel, Vec<EpochLog>)> {
    if trials == 0 {
        return Err(Error::Config(
            "random search needs at least one trial".into(),
        ));
    }
    space.validate()?;
    let mut rng = crate::rng::substream(seed, "search");
    let mut results = Vec::with_capacity(trials);
    let mut best: Option<(f64, AnyModel, Vec<EpochLog>)> = None;
    for index in 0..trials {
        let mut config = space.draw(base, &mut rng);
        config.seed = rng.random();
        let (model, logs) = AnyModel::train(kind, train, &config)?;
        let score = validation_score(&model, validation, seed)?;
        if best.as_ref().is_none_or(|(b, _, _)| score < *b) {
            best = Some((score, model, logs));
        }
        results.push(Trial {
            index,
            config,
            validation_srmse: score,
        });
    }
    results.sort_by(|a, b| {
        a.validation_srmse
            .total_cmp(&b.validation_srmse)
            .then(a.index.cmp(&b.index))
    });
    let (_, model, logs) = best.expect("at least one trial");
    Ok((results, model, logs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Schema;

    #[test]
    fn trials_sorted_and_deterministic() {
        let schema = Schema::from_cardinalities(&[3, 2, 2]).unwrap();
        let rows: Vec<Vec<u32>> = (0..60)
            .map(|i| vec![i % 3, (i / 3) % 2, (i % 3 == 0) as u32])
            .collect();
        let table = CodedTable::from_rows(schema, &rows).unwrap();
        let base = TrainConfig {
            epochs: 2,
            batch_size: 16,
            ..TrainConfig::default()
        };
        let space = SearchSpace {
            hidden_widths: vec![4, 8],
            latent_dims: vec![2],
            ..SearchSpace::default()
        };
        let (trials, _, _) =
            random_search(ModelKind::Vae, &table, &table, &base, &space, 3, 5).unwrap();
        assert_eq!(trials.len(), 3);
        assert!(trials
            .windows(2)
            .all(|w| w[0].validation_srmse <= w[1].validation_srmse));
        let (again, _, _) =
            random_search(ModelKind::Vae, &table, &table, &base, &space, 3, 5).unwrap();
        assert_eq!(trials, again);
    }
}
