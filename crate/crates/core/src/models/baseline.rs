use rand::Rng;

use super::{ModelKind, Synthesizer};
use crate::data::{CodedTable, Schema};
use crate::error::{Error, Result};

/// Draws every variable independently from its training frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalModel {
    schema: Schema,
    frequencies: Vec<Vec<f64>>,
}

impl MarginalModel {
    pub fn fit(train: &CodedTable) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Config(
                "cannot fit marginals on an empty table".into(),
            ));
        }
        let schema = train.schema().clone();
        let mut counts: Vec<Vec<u64>> =
            schema.cardinalities().iter().map(|&c| vec![0; c]).collect();
        for row in train.rows() {
            for (c, &code) in counts.iter_mut().zip(row) {
                c[code as usize] += 1;
            }
        }
        let n = train.n_rows() as f64;
        let frequencies = counts
            .into_iter()
            .map(|c| c.into_iter().map(|k| k as f64 / n).collect())
            .collect();
        Ok(Self {
            schema,
            frequencies,
        })
    }

    pub fn from_frequencies(schema: Schema, frequencies: Vec<Vec<f64>>) -> Result<Self> {
        if frequencies.len() != schema.len() {
            return Err(Error::Shape(
                "one frequency vector per variable required".into(),
            ));
        }
        for (f, v) in frequencies.iter().zip(schema.variables()) {
            let sum: f64 = f.iter().sum();
            if f.len() != v.cardinality
                || f.iter().any(|&p| !(p >= 0.0))
                || (sum - 1.0).abs() > 1e-9
            {
                return Err(Error::Domain(format!(
                    "bad frequency vector for {:?}",
                    v.name
                )));
            }
        }
        Ok(Self {
            schema,
            frequencies,
        })
    }

    pub fn frequencies(&self) -> &[Vec<f64>] {
        &self.frequencies
    }
}

impl Synthesizer for MarginalModel {
    fn kind(&self) -> ModelKind {
        ModelKind::Marginal
    }

    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn sample(&self, n: usize, seed: u64) -> Result<CodedTable> {
        let mut rng = crate::rng::seeded(seed);
        let mut codes = Vec::with_capacity(n * self.schema.len());
        for _ in 0..n {
            for f in &self.frequencies {
                codes.push(crate::rng::categorical(f, &mut rng) as u32);
            }
        }
        Ok(CodedTable::from_flat_unchecked(self.schema.clone(), codes))
    }
}

/// Draws every variable uniformly over its categories.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformModel {
    schema: Schema,
}

impl UniformModel {
    pub fn new(schema: Schema) -> Self {
        Self { schema }
    }
}

impl Synthesizer for UniformModel {
    fn kind(&self) -> ModelKind {
        ModelKind::Uniform
    }

    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn sample(&self, n: usize, seed: u64) -> Result<CodedTable> {
        let mut rng = crate::rng::seeded(seed);
        let cards = self.schema.cardinalities();
        let mut codes = Vec::with_capacity(n * cards.len());
        for _ in 0..n {
            for &c in &cards {
                codes.push(rng.random_range(0..c as u32));
            }
        }
        Ok(CodedTable::from_flat_unchecked(self.schema.clone(), codes))
    }
}
