use serde::Serialize;

use super::report::subset_label;
use super::zero_analysis;
use crate::data::CodedTable;
use crate::error::{Error, Result};
use crate::models::Synthesizer;

/// Sample size used for the fixed-budget comparison.
pub const DEFAULT_SAMPLE_SIZE: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub subset: String,
    pub n_c: u128,
    pub model: String,
    pub n_sampling_zeros: usize,
    pub n_recovered: usize,
    pub n_structural_proxy: usize,
    pub ratio: Option<f64>,
}

/// Samples `n` rows from every model once, then runs zero accounting for each
/// subset of the ladder. Rows are ordered by subset cell count (stable), then
/// by model order.
pub fn dimension_sweep(
    train: &CodedTable,
    test: &CodedTable,
    models: &[(String, &dyn Synthesizer)],
    ladder: &[Vec<String>],
    n: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if models.is_empty() {
        return Err(Error::Config("sweep needs at least one model".into()));
    }
    let samples = sample_models(models, n, seed)?;
    let named: Vec<(String, &CodedTable)> = models
        .iter()
        .map(|(name, _)| name.clone())
        .zip(&samples)
        .collect();
    sweep_samples(train, test, &named, ladder)
}

/// Draws `n` rows from each model on its own thread, seeded by
/// [`sample_seed`] of the model name.
pub fn sample_models(
    models: &[(String, &dyn Synthesizer)],
    n: usize,
    seed: u64,
) -> Result<Vec<CodedTable>> {
    let samples: Vec<Result<CodedTable>> = std::thread::scope(|scope| {
        let handles: Vec<_> = models
            .iter()
            .map(|(name, model)| {
                let stream_seed = sample_seed(seed, name);
                scope.spawn(move || model.sample(n, stream_seed))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampling thread panicked"))
            .collect()
    });
    samples.into_iter().collect()
}

/// Zero accounting of already generated tables over every ladder subset.
pub fn sweep_samples(
    train: &CodedTable,
    test: &CodedTable,
    samples: &[(String, &CodedTable)],
    ladder: &[Vec<String>],
) -> Result<Vec<SweepRow>> {
    if ladder.is_empty() || samples.is_empty() {
        return Err(Error::Config(
            "sweep needs at least one subset and one model".into(),
        ));
    }
    let mut rows = Vec::with_capacity(ladder.len() * samples.len());
    for subset in ladder {
        let idx = train.schema().indices_of(subset)?;
        let n_c = idx.iter().fold(1u128, |acc, &i| {
            acc.saturating_mul(train.schema().variables()[i].cardinality as u128)
        });
        for (name, generated) in samples {
            let report = zero_analysis(train, test, generated, subset)?;
            rows.push(SweepRow {
                subset: subset_label(subset),
                n_c,
                model: name.clone(),
                n_sampling_zeros: report.n_sampling_zeros,
                n_recovered: report.n_recovered,
                n_structural_proxy: report.n_structural_proxy,
                ratio: report.ratio,
            });
        }
    }
    rows.sort_by_key(|r| r.n_c);
    Ok(rows)
}

/// Per-model sampling seed derived from the master seed.
pub fn sample_seed(seed: u64, model_name: &str) -> u64 {
    crate::rng::derive_seed(seed, &format!("sample/{model_name}"))
}

/// `(ratio / base_ratio - 1) * 100`, the extra structural-per-sampling ratio
/// of a model relative to a base model, in percent.
pub fn additional_ratio_percent(ratio: Option<f64>, base_ratio: Option<f64>) -> Option<f64> {
    match (ratio, base_ratio) {
        (Some(r), Some(b)) if b > 0.0 => Some((r / b - 1.0) * 100.0),
        _ => None,
    }
}
