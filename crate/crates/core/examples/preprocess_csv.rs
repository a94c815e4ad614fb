//! Raw CSV to coded train/validation/test tables: sparse columns are dropped,
//! numerical columns are quantile-binned, the rest become categories.

use std::fmt::Write;

use rand::Rng;
use synthpop::data::{
    code_table, drop_sparse_columns, load_csv, split, DEFAULT_BINS, DEFAULT_FRACTIONS,
    DEFAULT_MISSING_THRESHOLD,
};
use synthpop::rng::seeded;

fn main() -> synthpop::Result<()> {
    let dir = tempfile::tempdir().map_err(|e| synthpop::Error::io("tempdir", e))?;
    let path = dir.path().join("survey.csv");
    let mut rng = seeded(5);
    let mut text = String::from("age,income,sex,mode,car_count\n");
    for _ in 0..500 {
        let age = rng.random_range(18..90);
        let income = if rng.random::<f64>() < 0.1 {
            String::new()
        } else {
            rng.random_range(100..900).to_string()
        };
        let sex = ["f", "m"][rng.random_range(0..2)];
        let mode = ["bike", "car", "walk", "bus"][rng.random_range(0..4)];
        // mostly blank, so it is dropped
        let cars = if rng.random::<f64>() < 0.6 {
            String::new()
        } else {
            rng.random_range(0..3).to_string()
        };
        let _ = writeln!(text, "{age},{income},{sex},{mode},{cars}");
    }
    std::fs::write(&path, text).map_err(|e| synthpop::Error::io(&path, e))?;

    let raw = load_csv(&path, &["age", "income", "car_count"])?;
    let (kept, dropped) = drop_sparse_columns(&raw, DEFAULT_MISSING_THRESHOLD)?;
    println!("dropped: {dropped:?}");
    let coded = code_table(&kept, DEFAULT_BINS)?;
    for var in coded.schema().variables() {
        println!(
            "{:<8} {:?} cardinality {} edges {:?} labels {:?}",
            var.name, var.kind, var.cardinality, var.bin_edges, var.labels
        );
    }
    let parts = split(&coded, DEFAULT_FRACTIONS, 1)?;
    println!(
        "train {} / validation {} / test {} rows",
        parts.train.n_rows(),
        parts.validation.n_rows(),
        parts.test.n_rows()
    );
    Ok(())
}
