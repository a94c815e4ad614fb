//! Trains every model kind on the oracle benchmark and compares full-joint
//! SRMSE and the structural-per-sampling zero ratio.
//!
//! `cargo run --release --example benchmark_models -- [seed] [config.json] [kinds]`
//!
//! `kinds` is a comma-separated list such as `vae,wgan`.

use std::time::Instant;

use synthpop::eval::MetricsRow;
use synthpop::models::{AnyModel, ModelKind, Synthesizer, TrainConfig};
use synthpop::oracle::default_benchmark;

fn main() -> synthpop::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));
    let spec = default_benchmark();
    let train = spec.generate_population(20_000, seed)?;
    let test = spec.generate_population(20_000, seed + 1_000)?;
    let mut config = match args.next().filter(|p| p != "-") {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| synthpop::Error::io(&path, e))?;
            serde_json::from_str::<TrainConfig>(&text)?
        }
        None => TrainConfig::default(),
    };
    config.seed = seed;
    let kinds: Vec<ModelKind> = match args.next() {
        Some(list) => list
            .split(',')
            .map(|k| k.parse())
            .collect::<synthpop::Result<_>>()?,
        None => vec![
            ModelKind::Uniform,
            ModelKind::Marginal,
            ModelKind::Vae,
            ModelKind::Wgan,
        ],
    };
    let names = spec.schema().names();
    for kind in kinds {
        let start = Instant::now();
        let (model, _) = AnyModel::train(kind, &train, &config)?;
        let generated = model.sample(200_000, seed)?;
        let row = MetricsRow::compute(&kind.to_string(), &train, &test, &generated, &names)?;
        println!(
            "{kind:>8}  srmse {:.4}  recovered {:>4}/{:<4}  structural {:>5}  ratio {:>8}  ({:.1}s)",
            row.srmse,
            row.n_recovered,
            row.n_sampling_zeros,
            row.n_structural_proxy,
            row.ratio.map_or("n/a".into(), |r| format!("{r:.2}")),
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
