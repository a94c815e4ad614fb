use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::{CodedTable, Schema};
use crate::error::{Error, Result};
use crate::nn::{Matrix, Mlp};

const CHUNK: usize = 4096;

pub(crate) fn normal_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let data = (0..rows * cols)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    Matrix::from_vec(rows, cols, data).expect("sized to fit")
}

/// Draws one code per block from block-normalised probability rows.
pub(crate) fn draw_codes<R: Rng + ?Sized>(
    probs: &Matrix,
    schema: &Schema,
    out: &mut Vec<u32>,
    rng: &mut R,
) {
    for row in probs.iter_rows() {
        let mut offset = 0;
        for v in schema.variables() {
            let seg = &row[offset..offset + v.cardinality];
            out.push(crate::rng::categorical(seg, rng) as u32);
            offset += v.cardinality;
        }
    }
}

/// `n` rows from `net` fed with standard-normal latent vectors, drawing each
/// variable from its output block.
pub(crate) fn sample_through<R: Rng + ?Sized>(
    net: &Mlp,
    latent_dim: usize,
    schema: &Schema,
    n: usize,
    rng: &mut R,
) -> Result<CodedTable> {
    let mut codes = Vec::with_capacity(n * schema.len());
    let mut remaining = n;
    while remaining > 0 {
        let rows = remaining.min(CHUNK);
        let z = normal_matrix(rows, latent_dim, rng);
        let probs = net.predict(&z)?;
        if !probs.is_finite() {
            return Err(Error::diverged("sampling"));
        }
        draw_codes(&probs, schema, &mut codes, rng);
        remaining -= rows;
    }
    Ok(CodedTable::from_flat_unchecked(schema.clone(), codes))
}

/// Schema cardinalities as a softmax block partition.
pub(crate) fn blocks(schema: &Schema) -> Vec<usize> {
    schema.cardinalities()
}
