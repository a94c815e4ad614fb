use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Label given to the explicit missing-value category.
pub const MISSING_LABEL: &str = "<missing>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableKind {
    Categorical,
    NumericalBinned,
}

/// One agent attribute after preprocessing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub kind: VariableKind,
    pub cardinality: usize,
    /// Right-closed upper edges of every bin but the last (numerical only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin_edges: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    /// Numerical only: the last code is reserved for missing values.
    #[serde(default)]
    pub missing_bin: bool,
}

impl VariableSpec {
    pub fn categorical(name: impl Into<String>, labels: Vec<String>) -> Self {
        Self {
            name: name.into(),
            kind: VariableKind::Categorical,
            cardinality: labels.len(),
            bin_edges: None,
            labels: Some(labels),
            missing_bin: false,
        }
    }

    /// Categorical variable labelled `0..cardinality`.
    pub fn indexed(name: impl Into<String>, cardinality: usize) -> Self {
        Self::categorical(name, (0..cardinality).map(|i| i.to_string()).collect())
    }

    pub fn binned(name: impl Into<String>, edges: Vec<f64>, missing_bin: bool) -> Self {
        Self {
            name: name.into(),
            kind: VariableKind::NumericalBinned,
            cardinality: edges.len() + 1 + usize::from(missing_bin),
            bin_edges: Some(edges),
            labels: None,
            missing_bin,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.cardinality == 0 {
            return Err(Error::Schema(format!(
                "variable {:?} has cardinality 0",
                self.name
            )));
        }
        match self.kind {
            VariableKind::Categorical => {
                if let Some(labels) = &self.labels {
                    if labels.len() != self.cardinality {
                        return Err(Error::Schema(format!(
                            "variable {:?} has {} labels but cardinality {}",
                            self.name,
                            labels.len(),
                            self.cardinality
                        )));
                    }
                }
            }
            VariableKind::NumericalBinned => {
                let edges = self.bin_edges.as_deref().unwrap_or(&[]);
                if edges.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::Schema(format!(
                        "bin edges of {:?} are not strictly ascending",
                        self.name
                    )));
                }
                if edges.len() + 1 + usize::from(self.missing_bin) != self.cardinality {
                    return Err(Error::Schema(format!(
                        "variable {:?} has {} edges but cardinality {}",
                        self.name,
                        edges.len(),
                        self.cardinality
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Ordered list of variables; the contract between tables, encodings and models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    variables: Vec<VariableSpec>,
}

impl Schema {
    pub fn new(variables: Vec<VariableSpec>) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::EmptySchema);
        }
        let mut seen = HashSet::new();
        for v in &variables {
            v.validate()?;
            if !seen.insert(v.name.as_str()) {
                return Err(Error::Schema(format!(
                    "duplicate variable name {:?}",
                    v.name
                )));
            }
        }
        Ok(Self { variables })
    }

    /// Schema of categorical variables `x0, x1, ...` with the given cardinalities.
    pub fn from_cardinalities(cards: &[usize]) -> Result<Self> {
        Self::new(
            cards
                .iter()
                .enumerate()
                .map(|(i, &c)| VariableSpec::indexed(format!("x{i}"), c))
                .collect(),
        )
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.variables.iter().map(|v| v.name.as_str()).collect()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.variables.iter().map(|v| v.cardinality).collect()
    }

    /// Width of a one-hot row.
    pub fn width(&self) -> usize {
        self.variables.iter().map(|v| v.cardinality).sum()
    }

    /// Start column of each variable's one-hot block.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.variables
            .iter()
            .map(|v| {
                let o = acc;
                acc += v.cardinality;
                o
            })
            .collect()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::Schema(format!("unknown variable {name:?}")))
    }

    pub fn indices_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.index_of(n.as_ref())).collect()
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("schema serializes");
        Sha256::digest(&json)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Schema = serde_json::from_str(text)?;
        Self::new(raw.variables)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
