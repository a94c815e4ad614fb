use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

pub const DEFAULT_MISSING_THRESHOLD: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Categorical(Vec<Option<String>>),
    Numerical(Vec<Option<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawColumn {
    pub name: String,
    pub data: ColumnData,
}

impl RawColumn {
    pub fn len(&self) -> usize {
        match &self.data {
            ColumnData::Categorical(v) => v.len(),
            ColumnData::Numerical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn missing_count(&self) -> usize {
        match &self.data {
            ColumnData::Categorical(v) => v.iter().filter(|x| x.is_none()).count(),
            ColumnData::Numerical(v) => v.iter().filter(|x| x.is_none()).count(),
        }
    }

    pub fn missing_fraction(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.missing_count() as f64 / self.len() as f64
        }
    }
}

/// Column-typed table as read from CSV; empty fields are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub columns: Vec<RawColumn>,
}

impl RawTable {
    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, RawColumn::len)
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, name: &str) -> Option<&RawColumn> {
        self.columns.iter().find(|c| c.name == name)
    }
}

/// Parses comma-separated UTF-8 text with a header row. Columns named in
/// `numerical` are parsed as numbers, everything else is categorical text.
///
/// Rows are reported by their line number in the file (the header is line 1).
pub fn parse_csv<R: Read, S: AsRef<str>>(reader: R, numerical: &[S]) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut seen = HashSet::new();
    for h in &headers {
        if !seen.insert(h.as_str()) {
            return Err(Error::Ingestion {
                row: 1,
                column: Some(h.clone()),
                message: "duplicate header".into(),
            });
        }
    }
    let numeric: HashSet<&str> = numerical.iter().map(AsRef::as_ref).collect();
    if let Some(missing) = numeric.iter().find(|n| !seen.contains(**n)) {
        return Err(Error::Config(format!(
            "declared numerical column {missing:?} not in header"
        )));
    }

    let mut columns: Vec<RawColumn> = headers
        .iter()
        .map(|h| RawColumn {
            name: h.clone(),
            data: if numeric.contains(h.as_str()) {
                ColumnData::Numerical(Vec::new())
            } else {
                ColumnData::Categorical(Vec::new())
            },
        })
        .collect();

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
        for (col, field) in columns.iter_mut().zip(record.iter()) {
            match &mut col.data {
                ColumnData::Categorical(v) => {
                    v.push((!field.is_empty()).then(|| field.to_string()));
                }
                ColumnData::Numerical(v) => {
                    let trimmed = field.trim();
                    if trimmed.is_empty() {
                        v.push(None);
                    } else {
                        let x: f64 = trimmed.parse().map_err(|_| Error::Ingestion {
                            row: line,
                            column: Some(col.name.clone()),
                            message: format!("cannot parse {field:?} as a number"),
                        })?;
                        if !x.is_finite() {
                            return Err(Error::Ingestion {
                                row: line,
                                column: Some(col.name.clone()),
                                message: format!("non-finite value {field:?}"),
                            });
                        }
                        v.push(Some(x));
                    }
                }
            }
        }
    }
    Ok(RawTable { columns })
}

pub fn load_csv<S: AsRef<str>>(path: impl AsRef<Path>, numerical: &[S]) -> Result<RawTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv(std::io::BufReader::new(file), numerical)
}

/// Removes every column whose missing fraction is strictly above `threshold`.
/// Returns the reduced table and the names of the dropped columns.
pub fn drop_sparse_columns(table: &RawTable, threshold: f64) -> Result<(RawTable, Vec<String>)> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Config(format!(
            "missing threshold {threshold} outside (0, 1]"
        )));
    }
    let (kept, dropped): (Vec<&RawColumn>, Vec<&RawColumn>) = table
        .columns
        .iter()
        .partition(|c| c.missing_fraction() <= threshold);
    if kept.is_empty() {
        return Err(Error::EmptySchema);
    }
    Ok((
        RawTable {
            columns: kept.into_iter().cloned().collect(),
        },
        dropped.into_iter().map(|c| c.name.clone()).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const NONE: &[&str] = &[];

    #[test]
    fn well_formed_file() {
        let t = parse_csv("a,b\n1,x\n2,y\n".as_bytes(), &["a"]).unwrap();
        assert_eq!(t.n_cols(), 2);
        assert_eq!(t.n_rows(), 2);
        assert_eq!(
            t.columns[0].data,
            ColumnData::Numerical(vec![Some(1.0), Some(2.0)])
        );
    }

    #[test]
    fn ragged_row_names_its_line() {
        let err = parse_csv("a,b\n1,2,3\n".as_bytes(), NONE).unwrap_err();
        assert!(matches!(err, Error::Ingestion { row: 2, .. }), "{err}");
    }

    #[test]
    fn empty_numeric_field_is_missing() {
        let t = parse_csv("a,b\n,1\n5,2\n".as_bytes(), &["a"]).unwrap();
        assert_eq!(
            t.columns[0].data,
            ColumnData::Numerical(vec![None, Some(5.0)])
        );
    }

    #[test]
    fn duplicate_header_and_bad_number() {
        assert!(matches!(
            parse_csv("a,a\n1,2\n".as_bytes(), NONE),
            Err(Error::Ingestion { row: 1, .. })
        ));
        let err = parse_csv("a,b\n1,2\nzz,3\n".as_bytes(), &["a"]).unwrap_err();
        match err {
            Error::Ingestion { row, column, .. } => {
                assert_eq!(row, 3);
                assert_eq!(column.as_deref(), Some("a"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    fn with_missing(n_missing: usize) -> RawColumn {
        RawColumn {
            name: format!("m{n_missing}"),
            data: ColumnData::Categorical(
                (0..10)
                    .map(|i| (i >= n_missing).then(|| "v".to_string()))
                    .collect(),
            ),
        }
    }

    #[test]
    fn sparse_threshold_is_strict() {
        let t = RawTable {
            columns: vec![with_missing(3), with_missing(2), with_missing(0)],
        };
        let (kept, dropped) = drop_sparse_columns(&t, 0.2).unwrap();
        assert_eq!(dropped, vec!["m3"]);
        assert_eq!(kept.n_cols(), 2);
        let (kept, dropped) = drop_sparse_columns(&t, 1.0).unwrap();
        assert!(dropped.is_empty());
        assert_eq!(kept.n_cols(), 3);
    }

    #[test]
    fn dropping_everything_is_an_error() {
        let t = RawTable {
            columns: vec![with_missing(5)],
        };
        assert!(matches!(
            drop_sparse_columns(&t, 0.2),
            Err(Error::EmptySchema)
        ));
        assert!(drop_sparse_columns(&t, 0.0).is_err());
    }
}
