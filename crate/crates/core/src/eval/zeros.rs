use std::collections::HashSet;

use super::joint::{project, resolve_vars, Combo};
use crate::data::CodedTable;
use crate::error::{Error, Result};

/// Cumulative zero accounting after a given number of generated rows.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CurvePoint {
    pub generated: usize,
    pub n_recovered: usize,
    pub n_structural_proxy: usize,
    pub recovered_fraction: f64,
    /// Structural proxies per recovered sampling zero; `None` while nothing
    /// has been recovered.
    pub ratio: Option<f64>,
}

/// Sampling-zero recovery and structural-zero proxies over a variable subset.
///
/// All counts are over distinct combos. Generated combos split into three
/// disjoint groups: seen in train, recovered sampling zeros (in test but not
/// train), and structural proxies (in neither).
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroReport {
    pub n_sampling_zeros: usize,
    pub n_recovered: usize,
    pub recovered_fraction: f64,
    pub n_structural_proxy: usize,
    pub n_generated_in_train: usize,
    pub n_generated_distinct: usize,
    pub ratio: Option<f64>,
    pub curve: Vec<CurvePoint>,
}

impl ZeroReport {
    pub fn ratio_undefined(&self) -> bool {
        self.ratio.is_none()
    }
}

struct Accumulator {
    idx: Vec<usize>,
    train: HashSet<Combo>,
    sampling_zeros: HashSet<Combo>,
    seen: HashSet<Combo>,
    n_recovered: usize,
    n_structural: usize,
    n_in_train: usize,
}

impl Accumulator {
    fn new<S: AsRef<str>>(
        train: &CodedTable,
        test: &CodedTable,
        generated: &CodedTable,
        vars: &[S],
    ) -> Result<Self> {
        if train.schema() != test.schema() || train.schema() != generated.schema() {
            return Err(Error::Comparability(
                "train, test and generated schemas differ".into(),
            ));
        }
        let idx = resolve_vars(train, vars)?;
        let train_set: HashSet<Combo> = train.rows().map(|r| project(r, &idx)).collect();
        let sampling_zeros: HashSet<Combo> = test
            .rows()
            .map(|r| project(r, &idx))
            .filter(|c| !train_set.contains(c))
            .collect();
        // combos in test but also train are "in train"; anything else in
        // test is a sampling zero, so test membership is fully covered
        Ok(Self {
            idx,
            train: train_set,
            sampling_zeros,
            seen: HashSet::new(),
            n_recovered: 0,
            n_structural: 0,
            n_in_train: 0,
        })
    }

    fn push(&mut self, row: &[u32]) {
        let combo = project(row, &self.idx);
        if self.seen.contains(&combo) {
            return;
        }
        if self.train.contains(&combo) {
            self.n_in_train += 1;
        } else if self.sampling_zeros.contains(&combo) {
            self.n_recovered += 1;
        } else {
            self.n_structural += 1;
        }
        self.seen.insert(combo);
    }

    fn point(&self, generated: usize) -> CurvePoint {
        let n_sz = self.sampling_zeros.len();
        CurvePoint {
            generated,
            n_recovered: self.n_recovered,
            n_structural_proxy: self.n_structural,
            recovered_fraction: if n_sz == 0 {
                0.0
            } else {
                self.n_recovered as f64 / n_sz as f64
            },
            ratio: (self.n_recovered > 0)
                .then(|| self.n_structural as f64 / self.n_recovered as f64),
        }
    }

    fn report(&self, generated: usize, curve: Vec<CurvePoint>) -> ZeroReport {
        let p = self.point(generated);
        ZeroReport {
            n_sampling_zeros: self.sampling_zeros.len(),
            n_recovered: p.n_recovered,
            recovered_fraction: p.recovered_fraction,
            n_structural_proxy: p.n_structural_proxy,
            n_generated_in_train: self.n_in_train,
            n_generated_distinct: self.seen.len(),
            ratio: p.ratio,
            curve,
        }
    }
}

pub fn zero_analysis<S: AsRef<str>>(
    train: &CodedTable,
    test: &CodedTable,
    generated: &CodedTable,
    vars: &[S],
) -> Result<ZeroReport> {
    let mut acc = Accumulator::new(train, test, generated, vars)?;
    for row in generated.rows() {
        acc.push(row);
    }
    Ok(acc.report(generated.n_rows(), Vec::new()))
}

/// Zero accounting recorded after every `step` generated rows (and after the
/// last row). The returned report's `curve` holds the series.
pub fn ratio_curve<S: AsRef<str>>(
    train: &CodedTable,
    test: &CodedTable,
    generated: &CodedTable,
    vars: &[S],
    step: usize,
) -> Result<ZeroReport> {
    if step == 0 {
        return Err(Error::Config("curve step must be at least 1".into()));
    }
    let mut acc = Accumulator::new(train, test, generated, vars)?;
    let mut curve = Vec::new();
    let n = generated.n_rows();
    for (i, row) in generated.rows().enumerate() {
        acc.push(row);
        let count = i + 1;
        if count % step == 0 || count == n {
            curve.push(acc.point(count));
        }
    }
    Ok(acc.report(n, curve))
}
