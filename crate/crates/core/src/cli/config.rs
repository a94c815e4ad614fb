//! JSON run configuration. Relative paths are resolved against the directory
//! holding the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{DEFAULT_BINS, DEFAULT_FRACTIONS, DEFAULT_MISSING_THRESHOLD};
use crate::error::{Error, Result};
use crate::eval::DEFAULT_SAMPLE_SIZE;
use crate::models::{ModelKind, SearchSpace, TrainConfig};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed; `--seed` overrides it.
    pub seed: u64,
    /// Output directory; `--out` overrides it. Defaults to `out`.
    pub out: Option<PathBuf>,
    pub preprocess: Option<PreprocessConfig>,
    pub train: Option<TrainSection>,
    pub generate: Option<GenerateConfig>,
    pub evaluate: Option<EvaluateConfig>,
    pub sweep: Option<SweepConfig>,
    pub synth_data: Option<SynthDataConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreprocessConfig {
    pub input: PathBuf,
    /// Columns parsed as numbers and quantile-binned; all others are categorical.
    #[serde(default)]
    pub numerical: Vec<String>,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_missing_threshold")]
    pub missing_threshold: f64,
    #[serde(default = "default_fractions")]
    pub fractions: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub model: ModelKind,
    pub schema: PathBuf,
    pub train: PathBuf,
    /// Required when `search.trials > 0`.
    #[serde(default)]
    pub validation: Option<PathBuf>,
    #[serde(default)]
    pub config: TrainConfig,
    #[serde(default)]
    pub search: Option<SearchSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSection {
    pub trials: usize,
    #[serde(default)]
    pub space: SearchSpace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateConfig {
    pub model_dir: PathBuf,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedPath {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateConfig {
    pub schema: PathBuf,
    pub train: PathBuf,
    pub test: PathBuf,
    /// Generated tables, one per model.
    pub generated: Vec<NamedPath>,
    /// Variable subsets; empty means every pair of variables.
    #[serde(default)]
    pub subsets: Vec<Vec<String>>,
    #[serde(default = "default_true")]
    pub plots: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub schema: PathBuf,
    pub train: PathBuf,
    pub test: PathBuf,
    /// Model directories written by `train`.
    pub models: Vec<NamedPath>,
    /// Subsets ordered by the caller; results are reported by cell count.
    pub ladder: Vec<Vec<String>>,
    /// Subsets that get a ratio curve; empty means the largest ladder subset.
    #[serde(default)]
    pub curve_subsets: Vec<Vec<String>>,
    #[serde(default = "default_sample_size")]
    pub n: usize,
    #[serde(default = "default_step")]
    pub step: usize,
    #[serde(default)]
    pub log_scale: bool,
    /// Model name used as the base of the percentage table.
    #[serde(default = "default_base_model")]
    pub base_model: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthDataConfig {
    /// Ground-truth spec JSON; absent means the built-in benchmark.
    #[serde(default)]
    pub spec: Option<PathBuf>,
    pub n: usize,
    /// Also write coded train/validation/test splits of the population.
    #[serde(default)]
    pub split: bool,
    #[serde(default = "default_fractions")]
    pub fractions: [f64; 3],
}

fn default_bins() -> usize {
    DEFAULT_BINS
}

fn default_missing_threshold() -> f64 {
    DEFAULT_MISSING_THRESHOLD
}

fn default_fractions() -> [f64; 3] {
    let (a, b, c) = DEFAULT_FRACTIONS;
    [a, b, c]
}

fn default_true() -> bool {
    true
}

fn default_sample_size() -> usize {
    DEFAULT_SAMPLE_SIZE
}

fn default_step() -> usize {
    1000
}

fn default_base_model() -> String {
    "wgan".into()
}

fn resolve(base: &Path, path: &mut PathBuf) {
    if path.is_relative() {
        *path = base.join(&*path);
    }
}

fn require_file(path: &Path, what: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{what} {} does not exist",
            path.display()
        )))
    }
}

fn require_dir(path: &Path, what: &str) -> Result<()> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{what} {} does not exist",
            path.display()
        )))
    }
}

fn check_fractions(f: &[f64; 3]) -> Result<()> {
    if f.iter().any(|x| !(*x > 0.0)) || (f.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "split fractions {f:?} must be positive and sum to 1"
        )));
    }
    Ok(())
}

fn check_subsets(subsets: &[Vec<String>], what: &str) -> Result<()> {
    if subsets.iter().any(Vec::is_empty) {
        return Err(Error::Config(format!("{what} contains an empty subset")));
    }
    Ok(())
}

fn check_names(models: &[NamedPath], what: &str) -> Result<()> {
    if models.is_empty() {
        return Err(Error::Config(format!("{what} lists no models")));
    }
    let mut names: Vec<&str> = models.iter().map(|m| m.name.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Config(format!("{what} has duplicate model names")));
    }
    if names.iter().any(|n| {
        n.is_empty()
            || !n
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c))
    }) {
        return Err(Error::Config(format!(
            "{what}: model names must be non-empty and use only letters, digits, '_', '-' or '.'"
        )));
    }
    Ok(())
}

impl RunConfig {
    /// Reads a config file and resolves its relative paths.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve_paths(base);
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        if let Some(out) = &mut self.out {
            resolve(base, out);
        }
        if let Some(p) = &mut self.preprocess {
            resolve(base, &mut p.input);
        }
        if let Some(t) = &mut self.train {
            resolve(base, &mut t.schema);
            resolve(base, &mut t.train);
            if let Some(v) = &mut t.validation {
                resolve(base, v);
            }
        }
        if let Some(g) = &mut self.generate {
            resolve(base, &mut g.model_dir);
        }
        if let Some(e) = &mut self.evaluate {
            resolve(base, &mut e.schema);
            resolve(base, &mut e.train);
            resolve(base, &mut e.test);
            e.generated
                .iter_mut()
                .for_each(|g| resolve(base, &mut g.path));
        }
        if let Some(s) = &mut self.sweep {
            resolve(base, &mut s.schema);
            resolve(base, &mut s.train);
            resolve(base, &mut s.test);
            s.models.iter_mut().for_each(|m| resolve(base, &mut m.path));
        }
        if let Some(d) = &mut self.synth_data {
            if let Some(spec) = &mut d.spec {
                resolve(base, spec);
            }
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    fn section<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T> {
        section
            .as_ref()
            .ok_or_else(|| Error::Config(format!("config has no \"{name}\" section")))
    }

    pub fn preprocess(&self) -> Result<&PreprocessConfig> {
        let p = Self::section(&self.preprocess, "preprocess")?;
        require_file(&p.input, "preprocess input")?;
        if p.bins < 1 {
            return Err(Error::Config("bins must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&p.missing_threshold) {
            return Err(Error::Config("missing_threshold must lie in [0, 1]".into()));
        }
        check_fractions(&p.fractions)?;
        Ok(p)
    }

    pub fn train(&self) -> Result<&TrainSection> {
        let t = Self::section(&self.train, "train")?;
        require_file(&t.schema, "schema")?;
        require_file(&t.train, "training table")?;
        t.config.validate()?;
        if t.search.as_ref().is_some_and(|s| s.trials > 0) {
            match &t.validation {
                Some(v) => require_file(v, "validation table")?,
                None => {
                    return Err(Error::Config(
                        "random search needs a validation table".into(),
                    ))
                }
            }
            if matches!(t.model, ModelKind::Marginal | ModelKind::Uniform) {
                return Err(Error::Config(format!(
                    "{} has no hyperparameters to search",
                    t.model
                )));
            }
        }
        Ok(t)
    }

    pub fn generate(&self) -> Result<&GenerateConfig> {
        let g = Self::section(&self.generate, "generate")?;
        require_dir(&g.model_dir, "model directory")?;
        if g.n == 0 {
            return Err(Error::Config("generate.n must be at least 1".into()));
        }
        Ok(g)
    }

    pub fn evaluate(&self) -> Result<&EvaluateConfig> {
        let e = Self::section(&self.evaluate, "evaluate")?;
        require_file(&e.schema, "schema")?;
        require_file(&e.train, "training table")?;
        require_file(&e.test, "test table")?;
        check_names(&e.generated, "evaluate.generated")?;
        for g in &e.generated {
            require_file(&g.path, "generated table")?;
        }
        check_subsets(&e.subsets, "evaluate.subsets")?;
        Ok(e)
    }

    pub fn sweep(&self) -> Result<&SweepConfig> {
        let s = Self::section(&self.sweep, "sweep")?;
        require_file(&s.schema, "schema")?;
        require_file(&s.train, "training table")?;
        require_file(&s.test, "test table")?;
        check_names(&s.models, "sweep.models")?;
        for m in &s.models {
            require_dir(&m.path, "model directory")?;
        }
        if !s.models.iter().any(|m| m.name == s.base_model) {
            return Err(Error::Config(format!(
                "sweep.base_model {:?} is not among sweep.models",
                s.base_model
            )));
        }
        if s.ladder.is_empty() {
            return Err(Error::Config("sweep.ladder is empty".into()));
        }
        check_subsets(&s.ladder, "sweep.ladder")?;
        check_subsets(&s.curve_subsets, "sweep.curve_subsets")?;
        if s.n == 0 || s.step == 0 {
            return Err(Error::Config(
                "sweep.n and sweep.step must be at least 1".into(),
            ));
        }
        Ok(s)
    }

    pub fn synth_data(&self) -> Result<&SynthDataConfig> {
        let d = Self::section(&self.synth_data, "synth_data")?;
        if let Some(spec) = &d.spec {
            require_file(spec, "ground-truth spec")?;
        }
        if d.n == 0 {
            return Err(Error::Config("synth_data.n must be at least 1".into()));
        }
        check_fractions(&d.fractions)?;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_paths_follow_config_file() {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("run.json");
        std::fs::write(
            &path,
            r#"{"seed": 3, "generate": {"model_dir": "m", "n": 5}}"#,
        )
        .unwrap();
        let config = RunConfig::load(&path).unwrap();
        assert_eq!(
            config.generate.as_ref().unwrap().model_dir,
            tmp.path().join("m")
        );
        assert!(matches!(config.generate(), Err(Error::Config(_))));
        std::fs::create_dir(tmp.path().join("m")).unwrap();
        assert_eq!(config.generate().unwrap().n, 5);
    }

    #[test]
    fn unknown_keys_and_missing_sections_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("run.json");
        std::fs::write(&path, r#"{"sede": 3}"#).unwrap();
        assert!(matches!(RunConfig::load(&path), Err(Error::Config(_))));
        assert!(matches!(
            RunConfig::default().sweep(),
            Err(Error::Config(_))
        ));
    }
}
