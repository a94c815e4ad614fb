use rand::seq::SliceRandom;

use super::CodedTable;
use crate::error::{Error, Result};

/// Train / validation / test fractions.
pub const DEFAULT_FRACTIONS: (f64, f64, f64) = (0.4, 0.4, 0.2);

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: CodedTable,
    pub validation: CodedTable,
    pub test: CodedTable,
}

/// Shuffled row indices partitioned into (train, validation, test).
///
/// Validation and test get `floor(n f)` rows; the remainder goes to train.
pub fn split_indices(
    n: usize,
    fractions: (f64, f64, f64),
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    let (a, b, c) = fractions;
    if !(a > 0.0 && b > 0.0 && c > 0.0) || ((a + b + c) - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "split fractions {fractions:?} must be positive and sum to 1"
        )));
    }
    if n < 3 {
        return Err(Error::TooFewRows(n));
    }
    let n_val = (n as f64 * b + 1e-9).floor() as usize;
    let n_test = (n as f64 * c + 1e-9).floor() as usize;
    let n_train = n - n_val - n_test;

    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut crate::rng::seeded(seed));
    let test = idx.split_off(n_train + n_val);
    let val = idx.split_off(n_train);
    Ok((idx, val, test))
}

pub fn split(table: &CodedTable, fractions: (f64, f64, f64), seed: u64) -> Result<Split> {
    let (tr, va, te) = split_indices(table.n_rows(), fractions, seed)?;
    Ok(Split {
        train: table.select_rows(&tr),
        validation: table.select_rows(&va),
        test: table.select_rows(&te),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_rows() {
        let (a, b, c) = split_indices(10, DEFAULT_FRACTIONS, 1).unwrap();
        assert_eq!((a.len(), b.len(), c.len()), (4, 4, 2));
    }

    #[test]
    fn survey_sized_split() {
        let (a, b, c) = split_indices(75_873, DEFAULT_FRACTIONS, 1).unwrap();
        assert_eq!((a.len(), b.len(), c.len()), (30_350, 30_349, 15_174));
    }

    #[test]
    fn disjoint_exhaustive_deterministic() {
        let first = split_indices(101, DEFAULT_FRACTIONS, 9).unwrap();
        assert_eq!(first, split_indices(101, DEFAULT_FRACTIONS, 9).unwrap());
        assert_ne!(first, split_indices(101, DEFAULT_FRACTIONS, 10).unwrap());
        let mut all: Vec<usize> = first
            .0
            .iter()
            .chain(&first.1)
            .chain(&first.2)
            .copied()
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..101).collect::<Vec<_>>());
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(
            split_indices(2, DEFAULT_FRACTIONS, 0),
            Err(Error::TooFewRows(2))
        ));
        assert!(split_indices(10, (0.5, 0.5, 0.1), 0).is_err());
        assert!(split_indices(10, (0.0, 0.8, 0.2), 0).is_err());
    }
}
