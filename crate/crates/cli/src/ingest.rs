//! CSV ingestion.

use std::fs::File;
use std::path::Path;

use gofboot_core::Dataset;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot open {path}: {source}")]
    Open { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}: header is empty")]
    NoHeader { path: String },
    #[error("{path}: header column {column} has an empty name")]
    EmptyName { path: String, column: usize },
    #[error("{path}: duplicate header name `{name}` (column {column})")]
    DuplicateName { path: String, name: String, column: usize },
    #[error("{path}: row {row} (line {line}) has {found} fields, expected {expected}")]
    Ragged { path: String, row: usize, line: u64, found: usize, expected: usize },
    #[error("{path}: row {row} (line {line}), column `{column}`: `{value}` is not a finite number")]
    BadNumber { path: String, row: usize, line: u64, column: String, value: String },
    #[error("{path}: no data rows")]
    EmptyBody { path: String },
}

/// Reads a CSV file whose first row names the columns and whose body is
/// entirely finite decimal numbers. Columns keep header order.
pub fn ingest_csv(path: impl AsRef<Path>) -> Result<Dataset, IngestError> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let file = File::open(path).map_err(|source| IngestError::Open { path: shown.clone(), source })?;
    read_csv(file, &shown)
}

pub fn read_csv<R: std::io::Read>(input: R, shown: &str) -> Result<Dataset, IngestError> {
    let csv_err = |source| IngestError::Csv { path: shown.to_string(), source };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let header: Vec<String> = reader.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(IngestError::NoHeader { path: shown.to_string() });
    }
    for (i, name) in header.iter().enumerate() {
        if name.is_empty() {
            return Err(IngestError::EmptyName { path: shown.to_string(), column: i + 1 });
        }
        if header[..i].contains(name) {
            return Err(IngestError::DuplicateName {
                path: shown.to_string(),
                name: name.clone(),
                column: i + 1,
            });
        }
    }

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = i + 1;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(IngestError::Ragged {
                path: shown.to_string(),
                row,
                line,
                found: record.len(),
                expected: header.len(),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => columns[j].push(v),
                _ => {
                    return Err(IngestError::BadNumber {
                        path: shown.to_string(),
                        row,
                        line,
                        column: header[j].clone(),
                        value: cell.to_string(),
                    })
                }
            }
        }
    }
    if columns[0].is_empty() {
        return Err(IngestError::EmptyBody { path: shown.to_string() });
    }
    Ok(Dataset::new(header.into_iter().zip(columns).collect())
        .expect("validated header and rows form a dataset"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Dataset, IngestError> {
        read_csv(text.as_bytes(), "test.csv")
    }

    #[test]
    fn simple_table() {
        let d = parse("y,x1\n1,0\n2,1\n").unwrap();
        assert_eq!(d.n(), 2);
        assert_eq!(d.names(), ["y", "x1"]);
        assert_eq!(d.column("x1").unwrap(), [0.0, 1.0]);
    }

    #[test]
    fn crlf_matches_lf() {
        assert_eq!(parse("y,x1\r\n1,0\r\n2,1\r\n").unwrap(), parse("y,x1\n1,0\n2,1\n").unwrap());
    }

    #[test]
    fn nan_cell_names_the_row() {
        let err = parse("y,x\n1,2\n3,NaN\n").unwrap_err();
        assert!(matches!(err, IngestError::BadNumber { row: 2, line: 3, .. }), "{err}");
        assert!(err.to_string().contains("row 2"));
        assert!(err.to_string().contains("`x`"));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(parse("y,x\n1,2\n3\n"), Err(IngestError::Ragged { row: 2, .. })));
        assert!(matches!(parse("y,x\n1,abc\n"), Err(IngestError::BadNumber { .. })));
        assert!(matches!(parse("y,y\n1,2\n"), Err(IngestError::DuplicateName { column: 2, .. })));
        assert!(matches!(parse("y,x\n"), Err(IngestError::EmptyBody { .. })));
        assert!(matches!(parse("y,,x\n1,2,3\n"), Err(IngestError::EmptyName { column: 2, .. })));
        assert!(matches!(parse("y,x\n1,inf\n"), Err(IngestError::BadNumber { .. })));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(ingest_csv("/nonexistent/data.csv"), Err(IngestError::Open { .. })));
    }
}
