//! Implementations behind the built-in method classes. Everything here is a
//! pure function of its inputs and an explicit seed.

pub mod metrics;
pub mod models;
pub mod plot;
pub mod split;
pub mod stats;

use serde::Serialize;
use thiserror::Error;

pub use models::{KnnMode, Model};
pub use plot::{CanvasState, PlotArtifact, PlotKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MethodError {
    #[error("split ratio must lie strictly between 0 and 1, got {0}")]
    BadRatio(f64),
    #[error("need at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("column is constant")]
    ConstantColumn,
    #[error("empty vector")]
    EmptyVector,
    #[error("percentile must lie in [0, 100], got {0}")]
    BadPercentile(f64),
    #[error("bin count must be at least 1, got {0}")]
    BadBins(i64),
    #[error("normal equations are singular")]
    SingularSystem,
    #[error("k must satisfy 1 <= k <= {rows}, got {k}")]
    BadK { k: i64, rows: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("expected {expected} feature columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("actual value at index {0} is zero")]
    ZeroActual(usize),
    #[error("canvas '{name}' has no free slot ({rows}x{cols} layout)")]
    CanvasOverflow { name: String, rows: usize, cols: usize },
    #[error("no canvas initialized before plotting")]
    NoCanvas,
    #[error("bad layout {rows}x{cols}")]
    BadLayout { rows: i64, cols: i64 },
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("expected numeric data: {0}")]
    NotNumeric(String),
    #[error("column index {index} out of range for {cols} columns")]
    BadColumnIndex { index: i64, cols: usize },
    #[error("missing parameter '{0}'")]
    MissingParam(String),
    #[error("parameter '{name}' has unusable value '{value}'")]
    BadParam { name: String, value: String },
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("matrix data has {len} values, expected {rows}x{cols}")]
    Ragged { rows: usize, cols: usize, len: usize },
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, MethodError> {
        if data.len() != rows * cols {
            return Err(MethodError::Ragged {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MethodError> {
        let cols = rows.first().map_or(0, Vec::len);
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MethodError::Ragged {
                rows: rows.len(),
                cols,
                len: data.len(),
            });
        }
        Matrix::new(rows.len(), cols, data)
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self, MethodError> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(MethodError::Ragged { rows, cols, len: 0 });
        }
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            data.extend(columns.iter().map(|c| c[i]));
        }
        Matrix::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let data = idx.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }
}

/// A vector of numbers or of category labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Column {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_numeric(&self) -> Option<&[f64]> {
        match self {
            Column::Numeric(v) => Some(v),
            Column::Categorical(_) => None,
        }
    }

    pub fn numeric(&self, what: &str) -> Result<&[f64], MethodError> {
        self.as_numeric().ok_or_else(|| MethodError::NotNumeric(what.to_owned()))
    }

    pub fn select(&self, idx: &[usize]) -> Column {
        match self {
            Column::Numeric(v) => Column::Numeric(idx.iter().map(|&i| v[i]).collect()),
            Column::Categorical(v) => Column::Categorical(idx.iter().map(|&i| v[i].clone()).collect()),
        }
    }

    /// Label equality between two positions of (possibly different)
    /// columns. Numbers compare by value, labels by text.
    pub fn same(&self, i: usize, other: &Column, j: usize) -> bool {
        match (self, other) {
            (Column::Numeric(a), Column::Numeric(b)) => a[i] == b[j],
            (Column::Categorical(a), Column::Categorical(b)) => a[i] == b[j],
            _ => self.text(i) == other.text(j),
        }
    }

    pub fn text(&self, i: usize) -> String {
        match self {
            Column::Numeric(v) => crate::rdf::format_double(v[i]),
            Column::Categorical(v) => v[i].clone(),
        }
    }
}
