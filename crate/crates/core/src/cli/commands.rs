use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::RunConfig;
use super::svg::{line_chart, scatter, Series};
use crate::data::{code_table, drop_sparse_columns, load_csv, split, CodedTable, Schema};
use crate::error::{Error, Result};
use crate::eval::{
    additional_ratio_percent, empirical_joint, ratio_curve, sample_models, scatter_data,
    subset_label, sweep_samples, write_metrics_csv, MetricsRow, SweepRow,
};
use crate::models::{
    load_model, random_search, save_model, write_training_log, AnyModel, Synthesizer,
};
use crate::oracle::{default_benchmark, GroundTruthSpec};
use crate::rng::derive_seed;

/// Outputs are written under a hidden directory inside `out` and moved into
/// place only once every file exists; dropping an uncommitted staging area
/// removes it (and `out` itself when this run created it).
struct Staging {
    out: PathBuf,
    dir: PathBuf,
    created_out: bool,
    committed: bool,
}

impl Staging {
    fn new(out: &Path) -> Result<Self> {
        let created_out = !out.exists();
        std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        let dir = out.join(format!(".synthpop-partial-{}", std::process::id()));
        if dir.exists() {
            std::fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
        let staging = Self {
            out: out.to_path_buf(),
            dir,
            created_out,
            committed: false,
        };
        std::fs::create_dir(&staging.dir).map_err(|e| Error::io(&staging.dir, e))?;
        Ok(staging)
    }

    /// Staged location of `rel`, with parent directories created.
    fn path(&self, rel: &str) -> Result<PathBuf> {
        let p = self.dir.join(rel);
        if let Some(parent) = p.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        Ok(p)
    }

    fn write(&self, rel: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let p = self.path(rel)?;
        std::fs::write(&p, contents).map_err(|e| Error::io(&p, e))
    }

    fn write_json<T: Serialize>(&self, rel: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(rel, text)
    }

    fn csv_writer(&self, rel: &str) -> Result<csv::Writer<std::fs::File>> {
        let p = self.path(rel)?;
        csv::Writer::from_path(&p).map_err(Error::from)
    }

    /// Moves every staged entry into `out`, replacing existing entries of the
    /// same name, and returns the final paths in name order.
    fn commit(mut self) -> Result<Vec<PathBuf>> {
        let mut names: Vec<_> = std::fs::read_dir(&self.dir)
            .map_err(|e| Error::io(&self.dir, e))?
            .map(|entry| entry.map(|e| e.file_name()))
            .collect::<std::io::Result<_>>()
            .map_err(|e| Error::io(&self.dir, e))?;
        names.sort();
        let mut written = Vec::with_capacity(names.len());
        for name in names {
            let target = self.out.join(&name);
            if target.is_dir() {
                std::fs::remove_dir_all(&target).map_err(|e| Error::io(&target, e))?;
            } else if target.exists() {
                std::fs::remove_file(&target).map_err(|e| Error::io(&target, e))?;
            }
            let from = self.dir.join(&name);
            std::fs::rename(&from, &target).map_err(|e| Error::io(&from, e))?;
            written.push(target);
        }
        std::fs::remove_dir(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        self.committed = true;
        Ok(written)
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if !self.committed {
            let _ = std::fs::remove_dir_all(&self.dir);
            if self.created_out {
                let _ = std::fs::remove_dir(&self.out);
            }
        }
    }
}

fn load_tables(schema: &Path, paths: &[&Path]) -> Result<(Schema, Vec<CodedTable>)> {
    let schema = Schema::load(schema)?;
    let tables = paths
        .iter()
        .map(|p| CodedTable::load_csv(p, &schema))
        .collect::<Result<Vec<_>>>()?;
    Ok((schema, tables))
}

fn all_pairs(schema: &Schema) -> Vec<Vec<String>> {
    let names = schema.names();
    if names.len() == 1 {
        return vec![vec![names[0].to_string()]];
    }
    let mut out = Vec::new();
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            out.push(vec![names[i].to_string(), names[j].to_string()]);
        }
    }
    out
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.4}"))
}

#[derive(Serialize)]
struct PreprocessReport {
    input_rows: usize,
    kept_columns: Vec<String>,
    dropped_columns: Vec<String>,
    schema_hash: String,
    train_rows: usize,
    validation_rows: usize,
    test_rows: usize,
}

/// Raw CSV to schema plus coded train/validation/test tables.
pub fn preprocess(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let section = config.preprocess()?;
    let raw = load_csv(&section.input, &section.numerical)?;
    let (kept, dropped) = drop_sparse_columns(&raw, section.missing_threshold)?;
    for name in &dropped {
        eprintln!(
            "dropped column {name:?}: missing fraction above {}",
            section.missing_threshold
        );
    }
    let coded = code_table(&kept, section.bins)?;
    let [a, b, c] = section.fractions;
    let parts = split(&coded, (a, b, c), derive_seed(config.seed, "split"))?;

    let staging = Staging::new(out)?;
    coded.schema().save(staging.path("schema.json")?)?;
    parts.train.save_csv(staging.path("train.csv")?)?;
    parts.validation.save_csv(staging.path("validation.csv")?)?;
    parts.test.save_csv(staging.path("test.csv")?)?;
    staging.write_json(
        "preprocess_report.json",
        &PreprocessReport {
            input_rows: raw.n_rows(),
            kept_columns: coded
                .schema()
                .names()
                .iter()
                .map(|s| s.to_string())
                .collect(),
            dropped_columns: dropped,
            schema_hash: coded.schema().hash(),
            train_rows: parts.train.n_rows(),
            validation_rows: parts.validation.n_rows(),
            test_rows: parts.test.n_rows(),
        },
    )?;
    staging.commit()
}

/// Trains one model (or runs a random search) and writes `model/` plus the
/// per-epoch training log.
pub fn train(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let section = config.train()?;
    let (_, tables) = load_tables(&section.schema, &[&section.train])?;
    let train = &tables[0];
    let mut train_config = section.config.clone();
    train_config.seed = config.seed;

    let search = section.search.as_ref().filter(|s| s.trials > 0);
    let (model, logs, trials) = match search {
        Some(search) => {
            let validation_path = section.validation.as_ref().expect("validated");
            let validation = CodedTable::load_csv(validation_path, train.schema())?;
            let (trials, model, logs) = random_search(
                section.model,
                train,
                &validation,
                &train_config,
                &search.space,
                search.trials,
                config.seed,
            )?;
            (model, logs, Some(trials))
        }
        None => {
            let (model, logs) = AnyModel::train(section.model, train, &train_config)?;
            (model, logs, None)
        }
    };

    let staging = Staging::new(out)?;
    let used_config = trials.as_ref().map_or(&train_config, |t| &t[0].config);
    save_model(&model, Some(used_config), staging.path("model")?)?;
    let log_path = staging.path("training_log.csv")?;
    let file = std::fs::File::create(&log_path).map_err(|e| Error::io(&log_path, e))?;
    write_training_log(&logs, std::io::BufWriter::new(file))?;
    if let Some(trials) = &trials {
        let mut w = staging.csv_writer("trials.csv")?;
        w.write_record([
            "rank",
            "trial",
            "validation_srmse",
            "latent_dim",
            "hidden_layers",
            "learning_rate",
            "seed",
        ])?;
        for (rank, t) in trials.iter().enumerate() {
            let hidden = match section.model {
                crate::models::ModelKind::Vae => &t.config.hidden_decoder,
                _ => &t.config.hidden_generator,
            };
            let lr = match section.model {
                crate::models::ModelKind::Vae => t.config.lr_vae,
                _ => t.config.lr_generator,
            };
            w.write_record([
                rank.to_string(),
                t.index.to_string(),
                t.validation_srmse.to_string(),
                t.config.latent_dim.to_string(),
                hidden
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join("x"),
                lr.to_string(),
                t.config.seed.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("trials.csv", e))?;
    }
    staging.commit()
}

/// Samples `n` rows from a saved model.
pub fn generate(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let section = config.generate()?;
    let model = load_model(&section.model_dir)?;
    let table = model.sample(section.n, derive_seed(config.seed, "sample"))?;
    let staging = Staging::new(out)?;
    table.save_csv(staging.path("generated.csv")?)?;
    staging.commit()
}

/// File-name-safe index of a subset within its list.
fn subset_file(prefix: &str, model: &str, index: usize) -> String {
    format!("{prefix}/{model}_{index:03}.svg")
}

/// Metrics per (subset, model) and one scatter plot per pair.
pub fn evaluate(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let section = config.evaluate()?;
    let (schema, tables) = load_tables(&section.schema, &[&section.train, &section.test])?;
    let (train, test) = (&tables[0], &tables[1]);
    let generated = section
        .generated
        .iter()
        .map(|g| Ok((g.name.as_str(), CodedTable::load_csv(&g.path, &schema)?)))
        .collect::<Result<Vec<_>>>()?;
    let subsets = if section.subsets.is_empty() {
        all_pairs(&schema)
    } else {
        section.subsets.clone()
    };
    for s in &subsets {
        schema.indices_of(s)?;
    }

    let mut rows = Vec::with_capacity(subsets.len() * generated.len());
    let mut plots = Vec::new();
    for (k, subset) in subsets.iter().enumerate() {
        let reference = empirical_joint(test, subset)?;
        for (name, table) in &generated {
            let row = MetricsRow::compute(name, train, test, table, subset)?;
            if section.plots {
                let points = scatter_data(&empirical_joint(table, subset)?, &reference)?;
                let svg = scatter(
                    &points,
                    &format!("{name}: {}", subset_label(subset)),
                    "true frequency (test)",
                    "generated frequency",
                    &[
                        format!("SRMSE = {:.4}", row.srmse),
                        format!("Pearson = {}", fmt_opt(row.pearson)),
                        format!("R2 = {}", fmt_opt(row.r2)),
                    ],
                );
                plots.push((subset_file("scatter", name, k), svg));
            }
            rows.push(row);
        }
    }

    let staging = Staging::new(out)?;
    let path = staging.path("metrics.csv")?;
    let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    write_metrics_csv(&rows, std::io::BufWriter::new(file))?;
    for (rel, svg) in plots {
        staging.write(&rel, svg)?;
    }
    staging.commit()
}

#[derive(Serialize)]
struct RatioTableRow<'a> {
    subset: &'a str,
    n_c: u128,
    model: &'a str,
    ratio: Option<f64>,
    additional_ratio_percent: Option<f64>,
}

/// Ratio curves, the dimension sweep and the percentage table against the
/// base model.
pub fn sweep(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let section = config.sweep()?;
    let (schema, tables) = load_tables(&section.schema, &[&section.train, &section.test])?;
    let (train, test) = (&tables[0], &tables[1]);
    for subset in section.ladder.iter().chain(&section.curve_subsets) {
        schema.indices_of(subset)?;
    }
    let models = section
        .models
        .iter()
        .map(|m| {
            let model = load_model(&m.path)?;
            if model.schema().hash() != schema.hash() {
                return Err(Error::Schema(format!(
                    "model {} was trained on a different schema",
                    m.name
                )));
            }
            Ok((m.name.clone(), model))
        })
        .collect::<Result<Vec<_>>>()?;
    let dyn_models: Vec<(String, &dyn Synthesizer)> = models
        .iter()
        .map(|(n, m)| (n.clone(), m as &dyn Synthesizer))
        .collect();
    let samples = sample_models(&dyn_models, section.n, config.seed)?;
    let named: Vec<(String, &CodedTable)> = models
        .iter()
        .map(|(n, _)| n.clone())
        .zip(&samples)
        .collect();

    let rows = sweep_samples(train, test, &named, &section.ladder)?;

    let curve_subsets = if section.curve_subsets.is_empty() {
        let widest = section
            .ladder
            .iter()
            .max_by_key(|s| {
                schema
                    .indices_of(s)
                    .expect("checked above")
                    .iter()
                    .fold(1u128, |acc, &i| {
                        acc.saturating_mul(schema.variables()[i].cardinality as u128)
                    })
            })
            .expect("ladder is non-empty");
        vec![widest.clone()]
    } else {
        section.curve_subsets.clone()
    };

    let staging = Staging::new(out)?;
    for (k, subset) in curve_subsets.iter().enumerate() {
        let mut series = Vec::with_capacity(named.len());
        for (name, table) in &named {
            let report = ratio_curve(train, test, table, subset, section.step)?;
            let mut w = staging.csv_writer(&format!("curves/{name}_{k:03}.csv"))?;
            for point in &report.curve {
                w.serialize(point)?;
            }
            w.flush().map_err(|e| Error::io("curve csv", e))?;
            series.push(Series {
                name: name.clone(),
                points: report
                    .curve
                    .iter()
                    .filter_map(|p| Some((p.generated as f64, p.ratio?)))
                    .collect(),
            });
        }
        staging.write(
            &format!("ratio_curve_{k:03}.svg"),
            line_chart(
                &series,
                &format!("structural / sampling zeros: {}", subset_label(subset)),
                "generated agents",
                "ratio",
                false,
                section.log_scale,
            ),
        )?;
    }

    let mut w = staging.csv_writer("dimension_sweep.csv")?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io("dimension_sweep.csv", e))?;

    let mut by_model: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for row in &rows {
        if let Some(r) = row.ratio {
            by_model
                .entry(row.model.as_str())
                .or_default()
                .push((row.n_c as f64, r));
        }
    }
    let series: Vec<Series> = named
        .iter()
        .map(|(name, _)| Series {
            name: name.clone(),
            points: by_model.remove(name.as_str()).unwrap_or_default(),
        })
        .collect();
    staging.write(
        "dimension_sweep.svg",
        line_chart(
            &series,
            &format!("{} sampled agents per model", section.n),
            "number of cells",
            "structural / sampling zeros",
            section.log_scale,
            section.log_scale,
        ),
    )?;

    let mut w = staging.csv_writer("ratio_table.csv")?;
    for row in &rows {
        let base = base_ratio(&rows, &row.subset, &section.base_model);
        w.serialize(RatioTableRow {
            subset: &row.subset,
            n_c: row.n_c,
            model: &row.model,
            ratio: row.ratio,
            additional_ratio_percent: additional_ratio_percent(row.ratio, base),
        })?;
    }
    w.flush().map_err(|e| Error::io("ratio_table.csv", e))?;
    staging.commit()
}

fn base_ratio(rows: &[SweepRow], subset: &str, base: &str) -> Option<f64> {
    rows.iter()
        .find(|r| r.subset == subset && r.model == base)?
        .ratio
}

#[derive(Serialize)]
struct SynthSummary {
    spec_hash: String,
    n_cells: u128,
    n_zero_cells: usize,
    structural_zero_fraction: f64,
    population_rows: usize,
}

/// Oracle population, its exact joint distribution, and optional splits.
pub fn synth_data(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let section = config.synth_data()?;
    let spec = match &section.spec {
        Some(path) => GroundTruthSpec::load(path)?,
        None => default_benchmark(),
    };
    let population = spec.generate_population(section.n, derive_seed(config.seed, "population"))?;
    let names = spec.schema().names();
    let joint = spec.exact_joint(&names)?;
    let zero_cells = spec.zero_cells()?.len();

    let staging = Staging::new(out)?;
    spec.save(staging.path("spec.json")?)?;
    spec.schema().save(staging.path("schema.json")?)?;
    population.save_csv(staging.path("population.csv")?)?;
    let mut w = staging.csv_writer("exact_joint.csv")?;
    let mut header: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    header.push("probability".into());
    w.write_record(&header)?;
    for (combo, p) in joint.frequencies() {
        let mut rec: Vec<String> = combo.iter().map(u32::to_string).collect();
        rec.push(p.to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("exact_joint.csv", e))?;
    if section.split {
        let [a, b, c] = section.fractions;
        let parts = split(&population, (a, b, c), derive_seed(config.seed, "split"))?;
        parts.train.save_csv(staging.path("train.csv")?)?;
        parts.validation.save_csv(staging.path("validation.csv")?)?;
        parts.test.save_csv(staging.path("test.csv")?)?;
    }
    staging.write_json(
        "summary.json",
        &SynthSummary {
            spec_hash: spec.hash(),
            n_cells: spec.n_cells(),
            n_zero_cells: zero_cells,
            structural_zero_fraction: zero_cells as f64 / spec.n_cells() as f64,
            population_rows: population.n_rows(),
        },
    )?;
    staging.commit()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_run_leaves_no_output_directory() {
        let tmp = tempfile::tempdir().unwrap();
        let out = tmp.path().join("run");
        {
            let staging = Staging::new(&out).unwrap();
            staging.write("a.csv", "x").unwrap();
        }
        assert!(!out.exists());
    }

    #[test]
    fn commit_replaces_previous_outputs() {
        let tmp = tempfile::tempdir().unwrap();
        std::fs::write(tmp.path().join("a.csv"), "old").unwrap();
        std::fs::write(tmp.path().join("keep.txt"), "k").unwrap();
        let staging = Staging::new(tmp.path()).unwrap();
        staging.write("a.csv", "new").unwrap();
        staging.write("sub/b.csv", "b").unwrap();
        let written = staging.commit().unwrap();
        assert_eq!(
            written,
            vec![tmp.path().join("a.csv"), tmp.path().join("sub")]
        );
        assert_eq!(
            std::fs::read_to_string(tmp.path().join("a.csv")).unwrap(),
            "new"
        );
        assert!(tmp.path().join("keep.txt").exists());
        let leftovers: Vec<_> = std::fs::read_dir(tmp.path())
            .unwrap()
            .filter(|e| {
                e.as_ref()
                    .unwrap()
                    .file_name()
                    .to_string_lossy()
                    .starts_with(".synthpop")
            })
            .collect();
        assert!(leftovers.is_empty());
    }
}
