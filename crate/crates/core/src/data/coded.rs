use std::io::{Read, Write};
use std::path::Path;

use super::Schema;
use crate::error::{Error, Result};

/// Agents as vectors of category codes, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedTable {
    schema: Schema,
    codes: Vec<u32>,
}

impl CodedTable {
    pub fn empty(schema: Schema) -> Self {
        Self {
            schema,
            codes: Vec::new(),
        }
    }

    /// Builds a table from row-major codes, validating every code.
    pub fn from_flat(schema: Schema, codes: Vec<u32>) -> Result<Self> {
        let width = schema.len();
        if !codes.len().is_multiple_of(width) {
            return Err(Error::Shape(format!(
                "{} codes do not form rows of {width}",
                codes.len()
            )));
        }
        let cards = schema.cardinalities();
        for (i, row) in codes.chunks_exact(width).enumerate() {
            check_row(&cards, row).map_err(|msg| Error::Encoding(format!("row {i}: {msg}")))?;
        }
        Ok(Self { schema, codes })
    }

    pub fn from_rows(schema: Schema, rows: &[Vec<u32>]) -> Result<Self> {
        let width = schema.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != width) {
            return Err(Error::Shape(format!(
                "row {bad} does not have {width} codes"
            )));
        }
        Self::from_flat(schema, rows.concat())
    }

    /// Trusted constructor for samplers that only emit in-range codes.
    pub(crate) fn from_flat_unchecked(schema: Schema, codes: Vec<u32>) -> Self {
        debug_assert_eq!(codes.len() % schema.len(), 0);
        Self { schema, codes }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.codes.len() / self.schema.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn n_vars(&self) -> usize {
        self.schema.len()
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let w = self.schema.len();
        &self.codes[i * w..(i + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.codes.chunks_exact(self.schema.len())
    }

    pub fn as_flat(&self) -> &[u32] {
        &self.codes
    }

    pub fn column(&self, var: usize) -> Vec<u32> {
        self.rows().map(|r| r[var]).collect()
    }

    pub fn push_row(&mut self, row: &[u32]) -> Result<()> {
        if row.len() != self.schema.len() {
            return Err(Error::Shape(format!(
                "row has {} codes, schema has {}",
                row.len(),
                self.schema.len()
            )));
        }
        check_row(&self.schema.cardinalities(), row).map_err(Error::Encoding)?;
        self.codes.extend_from_slice(row);
        Ok(())
    }

    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut codes = Vec::with_capacity(indices.len() * self.schema.len());
        for &i in indices {
            codes.extend_from_slice(self.row(i));
        }
        Self {
            schema: self.schema.clone(),
            codes,
        }
    }

    /// First `n` rows (all of them when `n` exceeds the row count).
    pub fn head(&self, n: usize) -> Self {
        let n = n.min(self.n_rows());
        Self {
            schema: self.schema.clone(),
            codes: self.codes[..n * self.schema.len()].to_vec(),
        }
    }

    /// Appends `other`'s rows; schemas must be identical.
    pub fn extend(&mut self, other: &CodedTable) -> Result<()> {
        if other.schema != self.schema {
            return Err(Error::Schema(
                "cannot append rows of a different schema".into(),
            ));
        }
        self.codes.extend_from_slice(&other.codes);
        Ok(())
    }
}

fn check_row(cards: &[usize], row: &[u32]) -> std::result::Result<(), String> {
    for (j, (&c, &card)) in row.iter().zip(cards).enumerate() {
        if c as usize >= card {
            return Err(format!(
                "code {c} out of range for variable {j} (cardinality {card})"
            ));
        }
    }
    Ok(())
}

/// Writes codes as CSV with the schema's variable names as header.
pub fn write_coded_csv<W: Write>(table: &CodedTable, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(table.schema().names())?;
    let mut buf = Vec::with_capacity(table.n_vars());
    for row in table.rows() {
        buf.clear();
        buf.extend(row.iter().map(u32::to_string));
        w.write_record(&buf)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

/// Reads a coded CSV whose header must equal the schema's names in order.
pub fn read_coded_csv<R: Read>(reader: R, schema: &Schema) -> Result<CodedTable> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if headers.iter().map(String::as_str).ne(schema.names()) {
        return Err(Error::Schema(format!(
            "CSV header {headers:?} does not match schema {:?}",
            schema.names()
        )));
    }
    let cards = schema.cardinalities();
    let mut codes = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != headers.len() {
            return Err(Error::Ingestion {
                row: line,
                column: None,
                message: format!("{} fields under {} headers", record.len(), headers.len()),
            });
        }
        for ((field, name), &card) in record.iter().zip(&headers).zip(&cards) {
            let code: u32 = field.trim().parse().map_err(|_| Error::Ingestion {
                row: line,
                column: Some(name.clone()),
                message: format!("{field:?} is not a category code"),
            })?;
            if code as usize >= card {
                return Err(Error::Ingestion {
                    row: line,
                    column: Some(name.clone()),
                    message: format!("code {code} out of range (cardinality {card})"),
                });
            }
            codes.push(code);
        }
    }
    Ok(CodedTable::from_flat_unchecked(schema.clone(), codes))
}

impl CodedTable {
    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        write_coded_csv(self, std::io::BufWriter::new(file))
    }

    pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        read_coded_csv(std::io::BufReader::new(file), schema)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_of_range_codes_rejected() {
        let s = Schema::from_cardinalities(&[2, 3]).unwrap();
        assert!(CodedTable::from_rows(s.clone(), &[vec![1, 2]]).is_ok());
        assert!(matches!(
            CodedTable::from_rows(s.clone(), &[vec![2, 0]]),
            Err(Error::Encoding(_))
        ));
        let mut t = CodedTable::empty(s);
        assert!(t.push_row(&[0, 3]).is_err());
        assert!(t.push_row(&[0]).is_err());
        assert!(t.is_empty());
    }

    #[test]
    fn csv_round_trip() {
        let s = Schema::from_cardinalities(&[2, 3]).unwrap();
        let t = CodedTable::from_rows(s.clone(), &[vec![1, 2], vec![0, 0]]).unwrap();
        let mut buf = Vec::new();
        write_coded_csv(&t, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "x0,x1\n1,2\n0,0\n");
        assert_eq!(read_coded_csv(&buf[..], &s).unwrap(), t);
    }

    #[test]
    fn csv_with_wrong_header_or_code() {
        let s = Schema::from_cardinalities(&[2]).unwrap();
        assert!(read_coded_csv("y\n0\n".as_bytes(), &s).is_err());
        assert!(matches!(
            read_coded_csv("x0\n0\n5\n".as_bytes(), &s),
            Err(Error::Ingestion { row: 3, .. })
        ));
    }
}
