//! Synthetic ground truth with a fully known joint distribution.
//!
//! A [`GroundTruthSpec`] is a chain `P(X_0) · Π_k P(X_k | X_{k-1})`. Every
//! cell probability is a product of table entries, so zero cells are exactly
//! the structural zeros and any marginal is computable by enumeration.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{CodedTable, Schema};
use crate::error::{Error, Result};
use crate::eval::{Combo, JointHistogram};
use crate::rng::{categorical, seeded};

/// Tolerance on the sum of every probability row.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

/// Universes larger than this are refused by enumeration-based methods.
pub const MAX_ENUMERATED_CELLS: usize = 1 << 22;

/// Version of [`default_benchmark`]. Bumped whenever its tables change.
pub const BENCHMARK_VERSION: u32 = 1;

/// Cardinalities of [`default_benchmark`].
pub const BENCHMARK_CARDINALITIES: [usize; 5] = [8, 8, 6, 5, 4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct GroundTruthSpec {
    schema: Schema,
    root: Vec<f64>,
    /// `transitions[k][prev][cur]` is `P(X_{k+1} = cur | X_k = prev)`.
    transitions: Vec<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    schema: Schema,
    root: Vec<f64>,
    transitions: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<RawSpec> for GroundTruthSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        Self::new(raw.schema, raw.root, raw.transitions)
    }
}

impl From<GroundTruthSpec> for RawSpec {
    fn from(spec: GroundTruthSpec) -> Self {
        RawSpec {
            schema: spec.schema,
            root: spec.root,
            transitions: spec.transitions,
        }
    }
}

fn check_distribution(row: &[f64], len: usize, what: &str) -> Result<()> {
    if row.len() != len {
        return Err(Error::Schema(format!(
            "{what}: expected {len} entries, got {}",
            row.len()
        )));
    }
    if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::Domain(format!(
            "{what}: entries must be finite and non-negative"
        )));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
        return Err(Error::Domain(format!("{what}: sums to {sum}, not 1")));
    }
    Ok(())
}

impl GroundTruthSpec {
    pub fn new(schema: Schema, root: Vec<f64>, transitions: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let cards = schema.cardinalities();
        if transitions.len() + 1 != cards.len() {
            return Err(Error::Schema(format!(
                "{} variables need {} transition tables, got {}",
                cards.len(),
                cards.len() - 1,
                transitions.len()
            )));
        }
        check_distribution(&root, cards[0], "root distribution")?;
        for (k, table) in transitions.iter().enumerate() {
            if table.len() != cards[k] {
                return Err(Error::Schema(format!(
                    "transition {k}: expected {} rows, got {}",
                    cards[k],
                    table.len()
                )));
            }
            for (prev, row) in table.iter().enumerate() {
                check_distribution(row, cards[k + 1], &format!("transition {k} row {prev}"))?;
            }
        }
        Ok(Self {
            schema,
            root,
            transitions,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn root(&self) -> &[f64] {
        &self.root
    }

    pub fn transitions(&self) -> &[Vec<Vec<f64>>] {
        &self.transitions
    }

    pub fn n_cells(&self) -> u128 {
        self.schema
            .cardinalities()
            .iter()
            .fold(1u128, |acc, &c| acc.saturating_mul(c as u128))
    }

    /// Exact probability of a full combo.
    pub fn probability(&self, combo: &[u32]) -> Result<f64> {
        let cards = self.schema.cardinalities();
        if combo.len() != cards.len() {
            return Err(Error::Shape(format!(
                "combo has {} codes, schema has {} variables",
                combo.len(),
                cards.len()
            )));
        }
        if let Some((i, &c)) = combo
            .iter()
            .enumerate()
            .find(|(i, &c)| c as usize >= cards[*i])
        {
            return Err(Error::Encoding(format!(
                "code {c} out of range for variable {i}"
            )));
        }
        Ok(self.probability_unchecked(combo))
    }

    fn probability_unchecked(&self, combo: &[u32]) -> f64 {
        let mut p = self.root[combo[0] as usize];
        for (k, table) in self.transitions.iter().enumerate() {
            if p == 0.0 {
                return 0.0;
            }
            p *= table[combo[k] as usize][combo[k + 1] as usize];
        }
        p
    }

    pub fn is_zero_cell(&self, combo: &[u32]) -> Result<bool> {
        Ok(self.probability(combo)? == 0.0)
    }

    fn enumerable_cells(&self) -> Result<usize> {
        let n = self.n_cells();
        if n > MAX_ENUMERATED_CELLS as u128 {
            return Err(Error::Domain(format!(
                "universe of {n} cells is too large to enumerate"
            )));
        }
        Ok(n as usize)
    }

    /// Visits every cell of the universe in lexicographic order.
    fn for_each_cell(&self, mut visit: impl FnMut(&[u32], f64)) -> Result<()> {
        let n = self.enumerable_cells()?;
        let cards = self.schema.cardinalities();
        let mut combo = vec![0u32; cards.len()];
        for _ in 0..n {
            visit(&combo, self.probability_unchecked(&combo));
            for i in (0..combo.len()).rev() {
                combo[i] += 1;
                if (combo[i] as usize) < cards[i] {
                    break;
                }
                combo[i] = 0;
            }
        }
        Ok(())
    }

    /// Every full combo with probability exactly 0, in lexicographic order.
    pub fn zero_cells(&self) -> Result<Vec<Combo>> {
        let mut out = Vec::new();
        self.for_each_cell(|combo, p| {
            if p == 0.0 {
                out.push(combo.to_vec());
            }
        })?;
        Ok(out)
    }

    pub fn structural_zero_fraction(&self) -> Result<f64> {
        let mut zeros = 0usize;
        self.for_each_cell(|_, p| zeros += (p == 0.0) as usize)?;
        Ok(zeros as f64 / self.enumerable_cells()? as f64)
    }

    /// `n` i.i.d. rows by ancestral sampling along the chain.
    pub fn generate_population(&self, n: usize, seed: u64) -> Result<CodedTable> {
        if n == 0 {
            return Err(Error::TooFewRows(0));
        }
        let mut rng = seeded(seed);
        let width = self.schema.len();
        let mut codes = Vec::with_capacity(n * width);
        for _ in 0..n {
            let mut prev = categorical(&self.root, &mut rng);
            codes.push(prev as u32);
            for table in &self.transitions {
                prev = categorical(&table[prev], &mut rng);
                codes.push(prev as u32);
            }
        }
        CodedTable::from_flat(self.schema.clone(), codes)
    }

    /// Exact marginal over `vars`, by summing the chain product over every
    /// full cell.
    pub fn exact_joint<S: AsRef<str>>(&self, vars: &[S]) -> Result<JointHistogram> {
        let idx = self.schema.indices_of(vars)?;
        if idx.is_empty() {
            return Err(Error::Schema("empty variable subset".into()));
        }
        let mut seen = idx.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != idx.len() {
            return Err(Error::Schema("duplicate variable in subset".into()));
        }
        let mut probs: BTreeMap<Combo, f64> = BTreeMap::new();
        self.for_each_cell(|combo, p| {
            if p > 0.0 {
                let key: Combo = idx.iter().map(|&i| combo[i]).collect();
                *probs.entry(key).or_insert(0.0) += p;
            }
        })?;
        let cards = self.schema.cardinalities();
        JointHistogram::from_probabilities(
            idx.iter()
                .map(|&i| self.schema.variables()[i].name.clone())
                .collect(),
            idx.iter().map(|&i| cards[i]).collect(),
            probs,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
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

    /// Hex SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("spec serialises");
        let digest = Sha256::digest(&json);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn normalised(weights: Vec<f64>) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// The fixed benchmark: five chained variables with cardinalities
/// `(8, 8, 6, 5, 4)`.
///
/// `P(X_0 = i) ∝ exp(-0.25 i)`. Each transition maps the previous code to a
/// centre `c = round(i (card_k - 1) / (card_{k-1} - 1))` and puts weight
/// `exp(-|j - c|)` on codes within distance 2 of it; every other code is a
/// structural zero.
pub fn default_benchmark() -> GroundTruthSpec {
    let cards = BENCHMARK_CARDINALITIES;
    let schema = Schema::from_cardinalities(&cards).expect("benchmark schema is valid");
    let root = normalised((0..cards[0]).map(|i| (-0.25 * i as f64).exp()).collect());
    let transitions = cards
        .windows(2)
        .map(|pair| {
            let (prev, cur) = (pair[0], pair[1]);
            (0..prev)
                .map(|i| {
                    let centre = (i as f64 * (cur - 1) as f64 / (prev - 1) as f64).round() as i64;
                    normalised(
                        (0..cur as i64)
                            .map(|j| {
                                let d = (j - centre).abs();
                                if d <= 2 {
                                    (-(d as f64)).exp()
                                } else {
                                    0.0
                                }
                            })
                            .collect(),
                    )
                })
                .collect()
        })
        .collect();
    GroundTruthSpec::new(schema, root, transitions).expect("benchmark tables are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::empirical_joint;

    fn two_by_two() -> GroundTruthSpec {
        GroundTruthSpec::new(
            Schema::from_cardinalities(&[2, 2]).unwrap(),
            vec![0.3, 0.7],
            vec![vec![vec![1.0, 0.0], vec![0.4, 0.6]]],
        )
        .unwrap()
    }

    #[test]
    fn benchmark_shape_and_zero_fraction() {
        let spec = default_benchmark();
        assert_eq!(spec.n_cells(), 7680);
        assert!(spec.structural_zero_fraction().unwrap() >= 0.25);
        assert_eq!(spec.hash(), default_benchmark().hash());
    }

    #[test]
    fn full_joint_is_cpt_product() {
        let spec = two_by_two();
        let joint = spec.exact_joint(&["x0", "x1"]).unwrap();
        assert_eq!(joint.frequency(&[0, 0]), 0.3);
        assert_eq!(joint.frequency(&[0, 1]), 0.0);
        assert!((joint.frequency(&[1, 0]) - 0.28).abs() < 1e-15);
        assert!((joint.frequency(&[1, 1]) - 0.42).abs() < 1e-15);
        assert_eq!(spec.zero_cells().unwrap(), vec![vec![0, 1]]);
        let marginal = spec.exact_joint(&["x1"]).unwrap();
        assert!((marginal.frequency(&[0]) - 0.58).abs() < 1e-15);
    }

    #[test]
    fn exact_joint_sums_to_one_and_skips_zero_cells() {
        let spec = default_benchmark();
        let joint = spec.exact_joint(&spec.schema().names()).unwrap();
        let total: f64 = joint.frequencies().values().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for z in spec.zero_cells().unwrap() {
            assert_eq!(joint.frequency(&z), 0.0);
        }
    }

    #[test]
    fn population_avoids_zero_cells_and_matches_root() {
        let spec = default_benchmark();
        let n = 50_000;
        let pop = spec.generate_population(n, 11).unwrap();
        assert!(pop.rows().all(|r| !spec.is_zero_cell(r).unwrap()));
        let counts = empirical_joint(&pop, &["x0"]).unwrap();
        for (i, &p) in spec.root().iter().enumerate() {
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((counts.frequency(&[i as u32]) - p).abs() < 3.0 * se + 1e-12);
        }
        assert_eq!(pop, spec.generate_population(n, 11).unwrap());
    }

    #[test]
    fn forbidden_transition_never_generated() {
        let pop = two_by_two().generate_population(5_000, 2).unwrap();
        assert!(pop.rows().all(|r| r != [0, 1]));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let spec = default_benchmark();
        let back = GroundTruthSpec::from_json(&spec.to_json().unwrap()).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.hash(), spec.hash());
        let bad = spec.to_json().unwrap().replacen("[", "[ 0.5, ", 1);
        assert!(GroundTruthSpec::from_json(&bad).is_err());
        let err = GroundTruthSpec::new(
            Schema::from_cardinalities(&[2, 2]).unwrap(),
            vec![0.5, 0.5],
            vec![vec![vec![0.5, 0.4], vec![0.5, 0.5]]],
        );
        assert!(matches!(err, Err(Error::Domain(_))));
    }
}
