use std::collections::BTreeSet;

use super::{Combo, JointHistogram};
use crate::error::{Error, Result};

fn comparable(a: &JointHistogram, b: &JointHistogram) -> Result<()> {
    if !a.same_cells(b) {
        return Err(Error::Comparability(format!(
            "{:?} {:?} vs {:?} {:?}",
            a.vars(),
            a.cardinalities(),
            b.vars(),
            b.cardinalities()
        )));
    }
    Ok(())
}

fn union_cells<'a>(a: &'a JointHistogram, b: &'a JointHistogram) -> BTreeSet<&'a Combo> {
    a.frequencies()
        .keys()
        .chain(b.frequencies().keys())
        .collect()
}

/// `sqrt(N_c * sum_cells (generated - reference)^2)`; cells missing from
/// either histogram count as frequency 0.
pub fn srmse(generated: &JointHistogram, reference: &JointHistogram) -> Result<f64> {
    comparable(generated, reference)?;
    let sum_sq: f64 = union_cells(generated, reference)
        .into_iter()
        .map(|c| {
            let d = generated.frequency(c) - reference.frequency(c);
            d * d
        })
        .sum();
    Ok((sum_sq * generated.n_cells() as f64).sqrt())
}

/// `(reference, generated)` frequency pairs over cells seen in either histogram,
/// in combo order.
pub fn scatter_data(
    generated: &JointHistogram,
    reference: &JointHistogram,
) -> Result<Vec<(f64, f64)>> {
    comparable(generated, reference)?;
    Ok(union_cells(generated, reference)
        .into_iter()
        .map(|c| (reference.frequency(c), generated.frequency(c)))
        .collect())
}

fn sum_sq_dev(xs: &[f64]) -> (f64, f64) {
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    (mean, xs.iter().map(|x| (x - mean) * (x - mean)).sum())
}

fn degenerate(ss: f64, xs: &[f64]) -> bool {
    let scale: f64 = xs.iter().map(|x| x * x).sum();
    ss <= 1e-24 * scale || ss == 0.0
}

/// Pearson correlation over the observed-cell union; `None` when either side
/// has zero variance.
pub fn pearson(generated: &JointHistogram, reference: &JointHistogram) -> Result<Option<f64>> {
    let pairs = scatter_data(generated, reference)?;
    if pairs.len() < 2 {
        return Ok(None);
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (mx, sx) = sum_sq_dev(&xs);
    let (my, sy) = sum_sq_dev(&ys);
    if degenerate(sx, &xs) || degenerate(sy, &ys) {
        return Ok(None);
    }
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(Some((cov / (sx * sy).sqrt()).clamp(-1.0, 1.0)))
}

/// Coefficient of determination of `generated` as a prediction of `reference`,
/// over the observed-cell union; `None` when the reference has zero variance.
pub fn r2(generated: &JointHistogram, reference: &JointHistogram) -> Result<Option<f64>> {
    let pairs = scatter_data(generated, reference)?;
    if pairs.len() < 2 {
        return Ok(None);
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let (_, ss_tot) = sum_sq_dev(&xs);
    if degenerate(ss_tot, &xs) {
        return Ok(None);
    }
    let ss_res: f64 = pairs.iter().map(|(x, y)| (y - x) * (y - x)).sum();
    Ok(Some(1.0 - ss_res / ss_tot))
}
