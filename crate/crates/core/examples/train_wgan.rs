//! Trains the Wasserstein GAN on an oracle population, printing critic and
//! generator losses, and checks how much generated mass lands in structural
//! zeros.
//!
//! `cargo run --release --example train_wgan -- [epochs]`

use synthpop::models::{AnyModel, ModelKind, Synthesizer, TrainConfig};
use synthpop::oracle::default_benchmark;

fn main() -> synthpop::Result<()> {
    let epochs = std::env::args()
        .nth(1)
        .map_or(50, |s| s.parse().expect("epochs"));
    let spec = default_benchmark();
    let train = spec.generate_population(10_000, 1)?;
    let config = TrainConfig {
        epochs,
        seed: 3,
        ..TrainConfig::default()
    };
    let (model, logs) = AnyModel::train(ModelKind::Wgan, &train, &config)?;
    for log in logs.iter().filter(|l| l.epoch == 1 || l.epoch % 10 == 0) {
        println!(
            "epoch {:>3}  critic {:+.6}  generator {:+.6}  score gap {:+.6}",
            log.epoch,
            log.get("critic_loss").unwrap_or(f64::NAN),
            log.get("generator_loss").unwrap_or(f64::NAN),
            log.get("score_gap").unwrap_or(f64::NAN)
        );
    }
    let generated = model.sample(50_000, 4)?;
    let mut in_zero = 0usize;
    for row in generated.rows() {
        in_zero += spec.is_zero_cell(row)? as usize;
    }
    println!(
        "{:.2}% of generated agents fall in structural-zero cells",
        100.0 * in_zero as f64 / generated.n_rows() as f64
    );
    Ok(())
}
