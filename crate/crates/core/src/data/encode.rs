use super::{CodedTable, Schema};
use crate::error::{Error, Result};
use crate::nn::Matrix;

/// One-hot block rows aligned to a [`Schema`].
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedMatrix {
    pub schema: Schema,
    pub matrix: Matrix,
}

impl EncodedMatrix {
    pub fn n_rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn decode(&self) -> Result<CodedTable> {
        let mut codes = Vec::with_capacity(self.n_rows() * self.schema.len());
        for row in self.matrix.iter_rows() {
            codes.extend(decode_row(row, &self.schema)?);
        }
        CodedTable::from_flat(self.schema.clone(), codes)
    }
}

/// One-hot row for a vector of codes.
pub fn encode_row(codes: &[u32], schema: &Schema) -> Result<Vec<f64>> {
    if codes.len() != schema.len() {
        return Err(Error::Encoding(format!(
            "{} codes for {} variables",
            codes.len(),
            schema.len()
        )));
    }
    let mut row = vec![0.0; schema.width()];
    let mut offset = 0;
    for (v, &c) in schema.variables().iter().zip(codes) {
        if c as usize >= v.cardinality {
            return Err(Error::Encoding(format!(
                "code {c} out of range for {:?} (cardinality {})",
                v.name, v.cardinality
            )));
        }
        row[offset + c as usize] = 1.0;
        offset += v.cardinality;
    }
    Ok(row)
}

/// Per-block argmax (first maximum on ties).
pub fn decode_row(row: &[f64], schema: &Schema) -> Result<Vec<u32>> {
    if row.len() != schema.width() {
        return Err(Error::Encoding(format!(
            "row width {} does not match schema width {}",
            row.len(),
            schema.width()
        )));
    }
    let mut out = Vec::with_capacity(schema.len());
    let mut offset = 0;
    for v in schema.variables() {
        let seg = &row[offset..offset + v.cardinality];
        let mut best = 0;
        for (i, &x) in seg.iter().enumerate() {
            if x > seg[best] {
                best = i;
            }
        }
        out.push(best as u32);
        offset += v.cardinality;
    }
    Ok(out)
}

pub fn one_hot_encode(table: &CodedTable) -> Result<EncodedMatrix> {
    let schema = table.schema().clone();
    let width = schema.width();
    let offsets = schema.offsets();
    let mut data = vec![0.0; table.n_rows() * width];
    for (r, row) in table.rows().enumerate() {
        for ((&c, &o), v) in row.iter().zip(&offsets).zip(schema.variables()) {
            if c as usize >= v.cardinality {
                return Err(Error::Encoding(format!(
                    "row {r}: code {c} out of range for {:?}",
                    v.name
                )));
            }
            data[r * width + o + c as usize] = 1.0;
        }
    }
    Ok(EncodedMatrix {
        matrix: Matrix::from_vec(table.n_rows(), width, data)?,
        schema,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_block() {
        let s = Schema::from_cardinalities(&[4]).unwrap();
        assert_eq!(encode_row(&[2], &s).unwrap(), vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn two_blocks() {
        let s = Schema::from_cardinalities(&[2, 3]).unwrap();
        assert_eq!(
            encode_row(&[1, 0], &s).unwrap(),
            vec![0.0, 1.0, 1.0, 0.0, 0.0]
        );
        assert!(matches!(encode_row(&[2, 0], &s), Err(Error::Encoding(_))));
    }

    #[test]
    fn exhaustive_round_trip_332() {
        let s = Schema::from_cardinalities(&[3, 3, 2]).unwrap();
        let mut rows = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..2 {
                    rows.push(vec![a, b, c]);
                }
            }
        }
        assert_eq!(rows.len(), 18);
        let table = CodedTable::from_rows(s, &rows).unwrap();
        let enc = one_hot_encode(&table).unwrap();
        for r in 0..enc.n_rows() {
            let sum: f64 = enc.matrix.row(r).iter().sum();
            assert_eq!(sum, 3.0);
        }
        assert_eq!(enc.decode().unwrap(), table);
    }

    proptest! {
        #[test]
        fn decode_inverts_encode(
            (cards, codes) in prop::collection::vec(1usize..6, 1..6).prop_flat_map(|cards| {
                let codes: Vec<_> = cards.iter().map(|&c| 0..c as u32).collect();
                (Just(cards), codes)
            })
        ) {
            let s = Schema::from_cardinalities(&cards).unwrap();
            let row = encode_row(&codes, &s).unwrap();
            prop_assert_eq!(decode_row(&row, &s).unwrap(), codes);
        }
    }
}
