//! Structural/sampling ratio over a ladder of growing variable subsets, with
//! the percentage table relative to a base model.

use synthpop::eval::{additional_ratio_percent, dimension_sweep};
use synthpop::models::{AnyModel, ModelKind, Synthesizer, TrainConfig};
use synthpop::oracle::default_benchmark;

fn main() -> synthpop::Result<()> {
    let spec = default_benchmark();
    let train = spec.generate_population(20_000, 1)?;
    let test = spec.generate_population(20_000, 2)?;
    let config = TrainConfig {
        epochs: 20,
        seed: 5,
        ..TrainConfig::default()
    };
    let (vae, _) = AnyModel::train(ModelKind::Vae, &train, &config)?;
    let (marginal, _) = AnyModel::train(ModelKind::Marginal, &train, &config)?;
    let (uniform, _) = AnyModel::train(ModelKind::Uniform, &train, &config)?;
    let models: Vec<(String, &dyn Synthesizer)> = vec![
        ("vae".into(), &vae),
        ("marginal".into(), &marginal),
        ("uniform".into(), &uniform),
    ];
    let names: Vec<String> = spec
        .schema()
        .names()
        .iter()
        .map(|s| s.to_string())
        .collect();
    let ladder: Vec<Vec<String>> = (2..=names.len()).map(|k| names[..k].to_vec()).collect();
    let rows = dimension_sweep(&train, &test, &models, &ladder, 100_000, 11)?;
    println!(
        "{:<16} {:>5} {:>9} {:>8} {:>10}",
        "subset", "cells", "model", "ratio", "vs vae %"
    );
    for row in &rows {
        let base = rows
            .iter()
            .find(|r| r.subset == row.subset && r.model == "vae")
            .and_then(|r| r.ratio);
        println!(
            "{:<16} {:>5} {:>9} {:>8} {:>10}",
            row.subset,
            row.n_c,
            row.model,
            row.ratio.map_or("-".into(), |r| format!("{r:.2}")),
            additional_ratio_percent(row.ratio, base).map_or("-".into(), |p| format!("{p:+.1}"))
        );
    }
    Ok(())
}
