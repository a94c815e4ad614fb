use super::Matrix;
use crate::error::{Error, Result};

/// Lower clamp applied to probabilities before taking logs.
pub const PROB_FLOOR: f64 = 1e-12;

/// Block-wise categorical cross-entropy averaged over the batch.
///
/// Returns the loss and its gradient w.r.t. the pre-softmax logits,
/// `(probs - targets) / batch`.
pub fn cross_entropy_blocks(
    probs: &Matrix,
    targets: &Matrix,
    blocks: &[usize],
) -> Result<(f64, Matrix)> {
    if probs.shape() != targets.shape() {
        return Err(Error::Shape(format!(
            "probabilities {:?} vs targets {:?}",
            probs.shape(),
            targets.shape()
        )));
    }
    if blocks.iter().sum::<usize>() != probs.cols() {
        return Err(Error::Shape(format!(
            "blocks {blocks:?} do not cover {} columns",
            probs.cols()
        )));
    }
    let n = probs.rows();
    if n == 0 {
        return Ok((0.0, Matrix::zeros(0, probs.cols())));
    }
    let inv = 1.0 / n as f64;
    let mut loss = 0.0;
    for r in 0..n {
        let t = targets.row(r);
        let p = probs.row(r);
        let mut start = 0;
        for &size in blocks {
            let seg = &t[start..start + size];
            let hot = one_hot_index(seg).ok_or_else(|| {
                Error::Encoding(format!("target row {r} block at {start} is not one-hot"))
            })?;
            loss -= p[start + hot].max(PROB_FLOOR).ln();
            start += size;
        }
    }
    let mut grad = Matrix::zeros(n, probs.cols());
    for ((g, &p), &t) in grad
        .as_mut_slice()
        .iter_mut()
        .zip(probs.as_slice())
        .zip(targets.as_slice())
    {
        *g = (p - t) * inv;
    }
    Ok((loss * inv, grad))
}

fn one_hot_index(seg: &[f64]) -> Option<usize> {
    let mut hot = None;
    for (i, &v) in seg.iter().enumerate() {
        if v == 1.0 {
            if hot.is_some() {
                return None;
            }
            hot = Some(i);
        } else if v != 0.0 {
            return None;
        }
    }
    hot
}
