//! Comma-delimited numeric tables with a header row.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed input: {0}")]
    Csv(#[from] csv::Error),
    #[error("input is empty")]
    Empty,
    #[error("header has no columns")]
    NoColumns,
    #[error("duplicate column name {0:?}")]
    DuplicateColumn(String),
    #[error("row {row}, column {column:?}: cell is blank")]
    BlankCell { row: usize, column: String },
    #[error("row {row}, column {column:?}: {value:?} is not a finite number")]
    NonNumeric { row: usize, column: String, value: String },
    #[error("no data rows")]
    NoRows,
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
}

/// Named columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Dataset {
    /// Caller guarantees equal column lengths and distinct names.
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Self {
        debug_assert_eq!(names.len(), columns.len());
        Self { names, columns }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Result<&[f64], DatasetError> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| DatasetError::UnknownColumn(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.names.iter().map(String::as_str).zip(self.columns.iter().map(Vec::as_slice))
    }

    /// CSV text with shortest round-trip float formatting.
    pub fn to_csv(&self) -> Result<Vec<u8>, DatasetError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.names)?;
        for r in 0..self.rows() {
            w.write_record(self.columns.iter().map(|c| c[r].to_string()))?;
        }
        w.into_inner().map_err(|e| DatasetError::Csv(e.into_error().into()))
    }
}

pub fn parse_dataset(path: &Path) -> Result<Dataset, DatasetError> {
    let file = std::fs::File::open(path).map_err(|source| DatasetError::Io { path: path.display().to_string(), source })?;
    parse_reader(file)
}

pub fn parse_reader<R: Read>(reader: R) -> Result<Dataset, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        return Err(DatasetError::Empty);
    }
    let names: Vec<String> = headers.iter().map(str::to_string).collect();
    if names.iter().all(String::is_empty) {
        return Err(DatasetError::NoColumns);
    }
    let mut seen = HashSet::new();
    for n in &names {
        if !seen.insert(n) {
            return Err(DatasetError::DuplicateColumn(n.clone()));
        }
    }
    let mut columns = vec![Vec::new(); names.len()];
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        // Row numbers count the header as row 1.
        let row = i + 2;
        for (j, cell) in record.iter().enumerate() {
            if cell.is_empty() {
                return Err(DatasetError::BlankCell { row, column: names[j].clone() });
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => columns[j].push(v),
                _ => {
                    return Err(DatasetError::NonNumeric { row, column: names[j].clone(), value: cell.to_string() })
                }
            }
        }
    }
    if columns[0].is_empty() {
        return Err(DatasetError::NoRows);
    }
    Ok(Dataset { names, columns })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Dataset, DatasetError> {
        parse_reader(s.as_bytes())
    }

    #[test]
    fn two_float_columns() {
        let d = parse("a,b\n1.5,2\n-3e2, 4.25\n").unwrap();
        assert_eq!(d.names(), ["a", "b"]);
        assert_eq!(d.column("a").unwrap(), [1.5, -300.0]);
        assert_eq!(d.column("b").unwrap(), [2.0, 4.25]);
        assert_eq!(d.rows(), 2);
        assert!(matches!(d.column("c"), Err(DatasetError::UnknownColumn(_))));
    }

    #[test]
    fn blank_cell_names_position() {
        let err = parse("a,b\n1,2\n3,\n").unwrap_err();
        assert!(matches!(&err, DatasetError::BlankCell { row: 3, column } if column == "b"));
        assert_eq!(err.to_string(), "row 3, column \"b\": cell is blank");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(parse(""), Err(DatasetError::Empty)));
        assert!(matches!(parse("a,b\n"), Err(DatasetError::NoRows)));
        assert!(matches!(parse("a,a\n1,2\n"), Err(DatasetError::DuplicateColumn(_))));
        assert!(matches!(parse("a\nfoo\n"), Err(DatasetError::NonNumeric { row: 2, .. })));
        assert!(matches!(parse("a\ninf\n"), Err(DatasetError::NonNumeric { .. })));
        assert!(matches!(parse("a,b\n1,2\n3\n"), Err(DatasetError::Csv(_))));
    }

    #[test]
    fn csv_round_trip() {
        let d = Dataset::new(vec!["x".into(), "y".into()], vec![vec![0.1, 1e-300], vec![2.0, -0.5]]);
        let text = d.to_csv().unwrap();
        assert_eq!(parse_reader(text.as_slice()).unwrap(), d);
    }
}
