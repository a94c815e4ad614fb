//! Raw tables, schemas, binning, splitting and one-hot encoding.

mod binning;
mod coded;
mod encode;
mod raw;
mod schema;
mod split;

pub use binning::{quantile_bin, quantile_edges, DEFAULT_BINS};
pub use coded::{read_coded_csv, write_coded_csv, CodedTable};
pub use encode::{decode_row, encode_row, one_hot_encode, EncodedMatrix};
pub use raw::{
    drop_sparse_columns, load_csv, parse_csv, ColumnData, RawColumn, RawTable,
    DEFAULT_MISSING_THRESHOLD,
};
pub use schema::{Schema, VariableKind, VariableSpec, MISSING_LABEL};
pub use split::{split, split_indices, Split, DEFAULT_FRACTIONS};

use crate::error::Result;

/// Turns every raw column into codes: categorical columns map their sorted
/// distinct labels (plus an explicit missing category when needed) to codes,
/// numerical columns go through [`quantile_bin`] with `bins` bins.
pub fn code_table(table: &RawTable, bins: usize) -> Result<CodedTable> {
    let mut specs = Vec::with_capacity(table.columns.len());
    let mut columns = Vec::with_capacity(table.columns.len());
    for col in &table.columns {
        let (spec, codes) = match &col.data {
            ColumnData::Categorical(values) => categorical_codes(&col.name, values),
            ColumnData::Numerical(values) => {
                let (mut spec, codes) = quantile_bin(values, bins).map_err(|e| match e {
                    crate::Error::DegenerateColumn(_) => {
                        crate::Error::DegenerateColumn(col.name.clone())
                    }
                    other => other,
                })?;
                spec.name = col.name.clone();
                (spec, codes)
            }
        };
        specs.push(spec);
        columns.push(codes);
    }
    let schema = Schema::new(specs)?;
    let n = table.n_rows();
    let mut flat = Vec::with_capacity(n * columns.len());
    for r in 0..n {
        for col in &columns {
            flat.push(col[r]);
        }
    }
    CodedTable::from_flat(schema, flat)
}

fn categorical_codes(name: &str, values: &[Option<String>]) -> (VariableSpec, Vec<u32>) {
    let mut labels: Vec<String> = values.iter().flatten().cloned().collect();
    labels.sort_by(|a, b| match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => x.total_cmp(&y).then_with(|| a.cmp(b)),
        _ => a.cmp(b),
    });
    labels.dedup();
    let has_missing = values.iter().any(Option::is_none);
    if has_missing {
        labels.push(MISSING_LABEL.to_string());
    }
    let missing_code = labels.len() as u32 - 1;
    let codes = values
        .iter()
        .map(|v| match v {
            Some(s) => labels.iter().position(|l| l == s).expect("label collected") as u32,
            None => missing_code,
        })
        .collect();
    (VariableSpec::categorical(name, labels), codes)
}
