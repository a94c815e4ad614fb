//! Seeded random search over network sizes and learning rates, scored by mean
//! pairwise SRMSE on validation data.

use synthpop::data::{split, DEFAULT_FRACTIONS};
use synthpop::models::{random_search, ModelKind, SearchSpace, TrainConfig};
use synthpop::oracle::default_benchmark;

fn main() -> synthpop::Result<()> {
    let spec = default_benchmark();
    let population = spec.generate_population(10_000, 1)?;
    let parts = split(&population, DEFAULT_FRACTIONS, 2)?;
    let base = TrainConfig {
        epochs: 10,
        ..TrainConfig::default()
    };
    let space = SearchSpace::default();
    let (trials, _best, _) = random_search(
        ModelKind::Vae,
        &parts.train,
        &parts.validation,
        &base,
        &space,
        4,
        3,
    )?;
    for t in &trials {
        println!(
            "trial {}  validation SRMSE {:.4}  latent {}  hidden {:?}  lr {:.2e}",
            t.index,
            t.validation_srmse,
            t.config.latent_dim,
            t.config.hidden_decoder,
            t.config.lr_vae
        );
    }
    Ok(())
}
