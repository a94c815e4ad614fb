//! Model directories: train, save, reload, and confirm identical samples.

use synthpop::models::{load_model, save_model, AnyModel, ModelKind, Synthesizer, TrainConfig};
use synthpop::oracle::default_benchmark;

fn main() -> synthpop::Result<()> {
    let spec = default_benchmark();
    let train = spec.generate_population(5_000, 1)?;
    let config = TrainConfig {
        epochs: 3,
        seed: 2,
        ..TrainConfig::default()
    };
    let dir = tempfile::tempdir().map_err(|e| synthpop::Error::io("tempdir", e))?;
    for kind in [
        ModelKind::Vae,
        ModelKind::Wgan,
        ModelKind::Marginal,
        ModelKind::Uniform,
    ] {
        let (model, _) = AnyModel::train(kind, &train, &config)?;
        let path = dir.path().join(kind.to_string());
        save_model(&model, Some(&config), &path)?;
        let reloaded = load_model(&path)?;
        let same = reloaded.sample(1_000, 7)? == model.sample(1_000, 7)?;
        let mut files: Vec<String> = std::fs::read_dir(&path)
            .map_err(|e| synthpop::Error::io(&path, e))?
            .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
            .collect();
        files.sort();
        println!("{kind:>8}: {files:?} identical samples after reload: {same}");
    }
    Ok(())
}
