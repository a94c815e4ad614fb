use std::collections::{BTreeMap, BTreeSet};

use crate::data::CodedTable;
use crate::error::{Error, Result};

/// Category codes of one agent restricted to a variable subset, in subset order.
pub type Combo = Vec<u32>;

/// Text form `c1-c2-...-ck` used for reports.
pub fn combo_key(combo: &[u32]) -> String {
    combo
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join("-")
}

/// Cell frequencies over a variable subset.
///
/// Empirical histograms carry counts and `total_rows`; exact histograms from
/// the oracle carry probabilities only and report `total_rows == 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointHistogram {
    vars: Vec<String>,
    cardinalities: Vec<usize>,
    counts: BTreeMap<Combo, u64>,
    freqs: BTreeMap<Combo, f64>,
    total_rows: usize,
}

impl JointHistogram {
    /// Histogram from exact cell probabilities; zero cells are not stored.
    pub fn from_probabilities(
        vars: Vec<String>,
        cardinalities: Vec<usize>,
        probs: BTreeMap<Combo, f64>,
    ) -> Result<Self> {
        if vars.len() != cardinalities.len() || vars.is_empty() {
            return Err(Error::Schema("variables and cardinalities disagree".into()));
        }
        for (combo, &p) in &probs {
            check_combo(combo, &cardinalities)?;
            if !(p >= 0.0) {
                return Err(Error::Domain(format!("negative probability {p}")));
            }
        }
        Ok(Self {
            vars,
            cardinalities,
            counts: BTreeMap::new(),
            freqs: probs.into_iter().filter(|(_, p)| *p > 0.0).collect(),
            total_rows: 0,
        })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    pub fn total_rows(&self) -> usize {
        self.total_rows
    }

    /// Product of subset cardinalities (saturating).
    pub fn n_cells(&self) -> u128 {
        self.cardinalities
            .iter()
            .fold(1u128, |acc, &c| acc.saturating_mul(c as u128))
    }

    pub fn counts(&self) -> &BTreeMap<Combo, u64> {
        &self.counts
    }

    pub fn frequencies(&self) -> &BTreeMap<Combo, f64> {
        &self.freqs
    }

    pub fn frequency(&self, combo: &[u32]) -> f64 {
        self.freqs.get(combo).copied().unwrap_or(0.0)
    }

    pub fn same_cells(&self, other: &JointHistogram) -> bool {
        self.vars == other.vars && self.cardinalities == other.cardinalities
    }
}

fn check_combo(combo: &[u32], cards: &[usize]) -> Result<()> {
    if combo.len() != cards.len() || combo.iter().zip(cards).any(|(&c, &k)| c as usize >= k) {
        return Err(Error::Schema(format!(
            "combo {combo:?} invalid for cardinalities {cards:?}"
        )));
    }
    Ok(())
}

pub(crate) fn resolve_vars<S: AsRef<str>>(table: &CodedTable, vars: &[S]) -> Result<Vec<usize>> {
    if vars.is_empty() {
        return Err(Error::Schema("variable subset is empty".into()));
    }
    let idx = table.schema().indices_of(vars)?;
    let mut seen = idx.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != idx.len() {
        return Err(Error::Schema("variable subset repeats a variable".into()));
    }
    Ok(idx)
}

pub(crate) fn project(row: &[u32], idx: &[usize]) -> Combo {
    idx.iter().map(|&i| row[i]).collect()
}

pub fn empirical_joint<S: AsRef<str>>(table: &CodedTable, vars: &[S]) -> Result<JointHistogram> {
    let idx = resolve_vars(table, vars)?;
    let mut counts: BTreeMap<Combo, u64> = BTreeMap::new();
    for row in table.rows() {
        *counts.entry(project(row, &idx)).or_default() += 1;
    }
    let n = table.n_rows();
    let freqs = counts
        .iter()
        .map(|(k, &c)| (k.clone(), c as f64 / n as f64))
        .collect();
    let variables = table.schema().variables();
    Ok(JointHistogram {
        vars: idx.iter().map(|&i| variables[i].name.clone()).collect(),
        cardinalities: idx.iter().map(|&i| variables[i].cardinality).collect(),
        counts,
        freqs,
        total_rows: n,
    })
}

/// Distinct combos observed over a variable subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComboSet {
    pub vars: Vec<String>,
    pub combos: BTreeSet<Combo>,
}

impl ComboSet {
    pub fn len(&self) -> usize {
        self.combos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.combos.is_empty()
    }

    pub fn contains(&self, combo: &[u32]) -> bool {
        self.combos.contains(combo)
    }
}

pub fn combo_set<S: AsRef<str>>(table: &CodedTable, vars: &[S]) -> Result<ComboSet> {
    let idx = resolve_vars(table, vars)?;
    Ok(ComboSet {
        vars: vars.iter().map(|v| v.as_ref().to_string()).collect(),
        combos: table.rows().map(|r| project(r, &idx)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Schema;

    fn table(cards: &[usize], rows: &[Vec<u32>]) -> CodedTable {
        CodedTable::from_rows(Schema::from_cardinalities(cards).unwrap(), rows).unwrap()
    }

    #[test]
    fn binary_variable_halves() {
        let t = table(&[2], &[vec![0], vec![0], vec![1], vec![1]]);
        let h = empirical_joint(&t, &["x0"]).unwrap();
        assert_eq!(h.frequency(&[0]), 0.5);
        assert_eq!(h.frequency(&[1]), 0.5);
        assert_eq!(h.n_cells(), 2);
    }

    #[test]
    fn single_row() {
        let t = table(&[3, 3], &[vec![2, 1]]);
        let h = empirical_joint(&t, &["x0", "x1"]).unwrap();
        assert_eq!(h.frequencies().len(), 1);
        assert_eq!(h.frequency(&[2, 1]), 1.0);
    }

    #[test]
    fn exhaustive_uniform_table() {
        let rows: Vec<Vec<u32>> = (0..2)
            .flat_map(|a| (0..3).map(move |b| vec![a, b]))
            .collect();
        let h = empirical_joint(&table(&[2, 3], &rows), &["x0", "x1"]).unwrap();
        assert_eq!(h.n_cells(), 6);
        assert!(h
            .frequencies()
            .values()
            .all(|&f| (f - 1.0 / 6.0).abs() < 1e-15));
        assert_eq!(h.frequencies().len(), 6);
    }

    #[test]
    fn subset_order_is_respected() {
        let t = table(&[2, 3], &[vec![1, 2]]);
        let h = empirical_joint(&t, &["x1", "x0"]).unwrap();
        assert_eq!(h.frequency(&[2, 1]), 1.0);
        assert_eq!(h.cardinalities(), &[3, 2]);
    }

    #[test]
    fn unknown_or_empty_subset() {
        let t = table(&[2], &[vec![1]]);
        assert!(matches!(
            empirical_joint(&t, &["nope"]),
            Err(Error::Schema(_))
        ));
        assert!(empirical_joint::<&str>(&t, &[]).is_err());
        assert!(empirical_joint(&t, &["x0", "x0"]).is_err());
    }

    #[test]
    fn combo_sets() {
        let s = Schema::from_cardinalities(&[2, 2]).unwrap();
        let empty = CodedTable::empty(s);
        assert!(combo_set(&empty, &["x0", "x1"]).unwrap().is_empty());
        let dup = table(&[2, 2], &[vec![1, 0], vec![1, 0]]);
        assert_eq!(combo_set(&dup, &["x0", "x1"]).unwrap().len(), 1);
        let all = table(&[2, 2], &[vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(combo_set(&all, &["x0", "x1"]).unwrap().len(), 4);
    }

    #[test]
    fn key_text() {
        assert_eq!(combo_key(&[3, 0, 12]), "3-0-12");
    }
}
