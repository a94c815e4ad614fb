//! Trains the VAE on an oracle population and compares a sample with held-out
//! data.
//!
//! `cargo run --release --example train_vae -- [epochs]`

use synthpop::eval::MetricsRow;
use synthpop::models::{AnyModel, ModelKind, Synthesizer, TrainConfig};
use synthpop::oracle::default_benchmark;

fn main() -> synthpop::Result<()> {
    let epochs = std::env::args()
        .nth(1)
        .map_or(30, |s| s.parse().expect("epochs"));
    let spec = default_benchmark();
    let train = spec.generate_population(10_000, 1)?;
    let test = spec.generate_population(10_000, 2)?;
    let config = TrainConfig {
        epochs,
        seed: 3,
        ..TrainConfig::default()
    };
    let (model, logs) = AnyModel::train(ModelKind::Vae, &train, &config)?;
    for log in logs.iter().filter(|l| l.epoch == 1 || l.epoch % 10 == 0) {
        println!(
            "epoch {:>3}  loss {:.4}  reconstruction {:.4}  kl {:.4}",
            log.epoch,
            log.get("loss").unwrap_or(f64::NAN),
            log.get("reconstruction").unwrap_or(f64::NAN),
            log.get("kl").unwrap_or(f64::NAN)
        );
    }
    let generated = model.sample(50_000, 4)?;
    let row = MetricsRow::compute("vae", &train, &test, &generated, &spec.schema().names())?;
    println!(
        "full joint SRMSE {:.4}, structural/sampling ratio {:?}",
        row.srmse, row.ratio
    );
    Ok(())
}
