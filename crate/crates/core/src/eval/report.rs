use std::io::Write;

use serde::Serialize;

use super::{empirical_joint, pearson, r2, srmse, zero_analysis, ZeroReport};
use crate::data::CodedTable;
use crate::error::{Error, Result};

/// One line of `metrics.csv`: fit metrics and zero accounting for one
/// (subset, model) pair. Undefined values serialize as empty fields.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRow {
    pub subset: String,
    pub model: String,
    pub n_c: u128,
    pub srmse: f64,
    pub pearson: Option<f64>,
    pub r2: Option<f64>,
    pub n_sampling_zeros: usize,
    pub n_recovered: usize,
    pub recovered_fraction: f64,
    pub n_structural_proxy: usize,
    pub ratio: Option<f64>,
    pub undefined_flag: bool,
}

impl MetricsRow {
    /// Compares `generated` against `test` on `vars` and runs zero accounting
    /// with `train` as the sample.
    pub fn compute<S: AsRef<str>>(
        model: &str,
        train: &CodedTable,
        test: &CodedTable,
        generated: &CodedTable,
        vars: &[S],
    ) -> Result<Self> {
        let gen_h = empirical_joint(generated, vars)?;
        let ref_h = empirical_joint(test, vars)?;
        let zeros = zero_analysis(train, test, generated, vars)?;
        Ok(Self::from_parts(
            model,
            vars,
            gen_h.n_cells(),
            srmse(&gen_h, &ref_h)?,
            pearson(&gen_h, &ref_h)?,
            r2(&gen_h, &ref_h)?,
            &zeros,
        ))
    }

    pub fn from_parts<S: AsRef<str>>(
        model: &str,
        vars: &[S],
        n_c: u128,
        srmse: f64,
        pearson: Option<f64>,
        r2: Option<f64>,
        zeros: &ZeroReport,
    ) -> Self {
        Self {
            subset: subset_label(vars),
            model: model.to_string(),
            n_c,
            srmse,
            pearson,
            r2,
            n_sampling_zeros: zeros.n_sampling_zeros,
            n_recovered: zeros.n_recovered,
            recovered_fraction: zeros.recovered_fraction,
            n_structural_proxy: zeros.n_structural_proxy,
            ratio: zeros.ratio,
            undefined_flag: zeros.ratio.is_none(),
        }
    }
}

/// Variable names joined with `|`.
pub fn subset_label<S: AsRef<str>>(vars: &[S]) -> String {
    vars.iter().map(AsRef::as_ref).collect::<Vec<_>>().join("|")
}

pub fn write_metrics_csv<W: Write>(rows: &[MetricsRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io("<metrics csv>", e))?;
    Ok(())
}
