use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::methods::Column;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("cannot read dataset: {0}")]
    Io(String),
    #[error("dataset has no header row")]
    EmptyFile,
    #[error("row at line {0} has missing or extra fields")]
    RaggedRows(u64),
    #[error("duplicate column name '{0}'")]
    DuplicateHeader(String),
}

/// An in-memory CSV table. A column is numeric when every cell parses as a
/// float; otherwise all its cells are kept as text.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub names: Vec<String>,
    pub columns: BTreeMap<String, Column>,
    pub row_count: usize,
}

impl Dataset {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, DatasetError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| DatasetError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, DatasetError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| DatasetError::Io(e.to_string()))?.clone();
        if headers.is_empty() {
            return Err(DatasetError::EmptyFile);
        }
        let names: Vec<String> = headers.iter().map(str::to_owned).collect();
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(DatasetError::DuplicateHeader(name.clone()));
            }
        }
        let mut cells: Vec<Vec<String>> = vec![Vec::new(); names.len()];
        for record in reader.records() {
            let record = record.map_err(|e| DatasetError::Io(e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() != names.len() || record.iter().any(str::is_empty) {
                return Err(DatasetError::RaggedRows(line));
            }
            for (col, cell) in cells.iter_mut().zip(record.iter()) {
                col.push(cell.to_owned());
            }
        }
        let row_count = cells[0].len();
        let columns = names.iter().cloned().zip(cells.into_iter().map(infer)).collect();
        Ok(Dataset {
            names,
            columns,
            row_count,
        })
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.get(name)
    }
}

fn infer(cells: Vec<String>) -> Column {
    let parsed: Option<Vec<f64>> = cells.iter().map(|c| c.parse::<f64>().ok()).collect();
    match parsed {
        Some(v) => Column::Numeric(v),
        None => Column::Categorical(cells),
    }
}
