use super::VariableSpec;
use crate::error::{Error, Result};

pub const DEFAULT_BINS: usize = 5;

/// Upper edges of the `k` quantile bins of `sorted` (ascending, non-empty).
///
/// Edge `i` is the nearest-rank `i/k` quantile `sorted[ceil(i n / k) - 1]`.
/// Duplicate edges are merged and edges equal to the maximum are dropped, so
/// every bin is non-empty.
pub fn quantile_edges(sorted: &[f64], k: usize) -> Vec<f64> {
    let n = sorted.len();
    let max = sorted[n - 1];
    let mut edges: Vec<f64> = Vec::with_capacity(k.saturating_sub(1));
    for i in 1..k {
        // ceil(i n / k) in integer arithmetic
        let rank = (i * n).div_ceil(k);
        let q = sorted[rank.max(1) - 1];
        if q < max && edges.last().is_none_or(|&last| last < q) {
            edges.push(q);
        }
    }
    edges
}

/// Bins a numerical column into at most `k` right-closed quantile bins.
///
/// A value `v` gets the index of the first edge `>= v`, or the last bin when
/// above every edge. Missing values are excluded from edge estimation and
/// coded into an extra trailing bin when present.
pub fn quantile_bin(values: &[Option<f64>], k: usize) -> Result<(VariableSpec, Vec<u32>)> {
    if k == 0 {
        return Err(Error::Config("bin count must be at least 1".into()));
    }
    let mut sorted: Vec<f64> = values.iter().flatten().copied().collect();
    if sorted.is_empty() {
        return Err(Error::DegenerateColumn(String::new()));
    }
    sorted.sort_by(f64::total_cmp);
    let edges = quantile_edges(&sorted, k);
    let missing_code = edges.len() as u32 + 1;
    let codes = values
        .iter()
        .map(|v| match v {
            Some(x) => edges.partition_point(|&e| e < *x) as u32,
            None => missing_code,
        })
        .collect();
    let has_missing = values.iter().any(Option::is_none);
    Ok((VariableSpec::binned("", edges, has_missing), codes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn some(v: &[f64]) -> Vec<Option<f64>> {
        v.iter().copied().map(Some).collect()
    }

    #[test]
    fn uniform_grid_quintiles() {
        let values: Vec<f64> = (1..=10).map(f64::from).collect();
        let (spec, codes) = quantile_bin(&some(&values), 5).unwrap();
        assert_eq!(codes, vec![0, 0, 1, 1, 2, 2, 3, 3, 4, 4]);
        assert_eq!(spec.bin_edges.unwrap(), vec![2.0, 4.0, 6.0, 8.0]);
        assert_eq!(spec.cardinality, 5);
    }

    #[test]
    fn constant_column_single_bin() {
        let (spec, codes) = quantile_bin(&some(&[3.0; 7]), 5).unwrap();
        assert_eq!(spec.cardinality, 1);
        assert!(codes.iter().all(|&c| c == 0));
    }

    #[test]
    fn all_missing_is_degenerate() {
        assert!(matches!(
            quantile_bin(&[None, None], 5),
            Err(Error::DegenerateColumn(_))
        ));
    }

    #[test]
    fn missing_gets_its_own_code() {
        let (spec, codes) = quantile_bin(&[Some(1.0), None, Some(2.0)], 5).unwrap();
        assert!(spec.missing_bin);
        assert_eq!(codes[1] as usize, spec.cardinality - 1);
    }

    /// Independent binning: each cut is the smallest value whose count of
    /// values at or below it reaches `i n / k`; a value's code is the number
    /// of distinct cuts strictly below it, ignoring cuts at the maximum.
    fn rank_oracle(values: &[f64], k: usize) -> Vec<u32> {
        let n = values.len() as f64;
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut cuts: Vec<f64> = Vec::new();
        for i in 1..k {
            let need = i as f64 * n / k as f64;
            let q = values
                .iter()
                .copied()
                .filter(|&x| values.iter().filter(|&&y| y <= x).count() as f64 >= need - 1e-9)
                .fold(f64::INFINITY, f64::min);
            if q < max && !cuts.contains(&q) {
                cuts.push(q);
            }
        }
        values
            .iter()
            .map(|&v| cuts.iter().filter(|&&c| c < v).count() as u32)
            .collect()
    }

    #[test]
    fn three_levels_match_rank_oracle() {
        let values = vec![2.0, 1.0, 3.0, 1.0, 2.0, 2.0, 3.0, 1.0, 1.0, 3.0, 2.0];
        let (spec, codes) = quantile_bin(&some(&values), 5).unwrap();
        assert!(spec.cardinality <= 3);
        assert_eq!(codes, rank_oracle(&values, 5));
        let max_code = *codes.iter().max().unwrap() as usize;
        assert_eq!(max_code + 1, spec.cardinality);
    }

    proptest! {
        #[test]
        fn matches_oracle_and_is_monotone(
            values in prop::collection::vec(-5i32..5, 1..40),
            k in 1usize..8,
        ) {
            let values: Vec<f64> = values.into_iter().map(f64::from).collect();
            let (spec, codes) = quantile_bin(&some(&values), k).unwrap();
            prop_assert_eq!(&codes, &rank_oracle(&values, k));
            prop_assert!(spec.cardinality <= k);
            // every bin is used
            for c in 0..spec.cardinality as u32 {
                prop_assert!(codes.contains(&c));
            }
            for i in 0..values.len() {
                for j in 0..values.len() {
                    if values[i] <= values[j] {
                        prop_assert!(codes[i] <= codes[j]);
                    }
                }
            }
        }
    }
}
