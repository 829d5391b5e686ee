use serde_json::{json, Value as Json};

use crate::methods::{Column, Matrix, Model, PlotArtifact};
use crate::rdf::Iri;
use crate::vocab::ds;
use crate::SchemaSet;

/// A runtime value bound to a data entity.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Model(Box<Model>),
    Vector(Column),
    Matrix(Matrix),
    Plot(PlotArtifact),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Number(_) => "single_value",
            Value::Model(_) => "model",
            Value::Vector(_) => "vector",
            Value::Matrix(_) => "matrix",
            Value::Plot(_) => "plot",
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(x) => Some(*x),
            _ => None,
        }
    }

    /// Converts between a vector and a one-column matrix to suit the
    /// declared structure of the consuming entity.
    pub fn coerce(self, structure: &Iri, schema: &SchemaSet) -> Value {
        match self {
            Value::Vector(Column::Numeric(v)) if schema.conforms_to(structure, &ds("Matrix")) => {
                let rows = v.len();
                Value::Matrix(Matrix::new(rows, 1, v).expect("one column"))
            }
            Value::Matrix(m) if m.cols() == 1 && schema.conforms_to(structure, &ds("Vector")) => {
                Value::Vector(Column::Numeric(m.column(0)))
            }
            other => other,
        }
    }

    /// JSON form: scalars and vectors inline, matrices and models
    /// summarized.
    pub fn summary(&self) -> Json {
        match self {
            Value::Number(x) => json!({ "type": "single_value", "value": x }),
            Value::Vector(c) => json!({ "type": "vector", "length": c.len(), "values": c }),
            Value::Matrix(m) => json!({ "type": "matrix", "rows": m.rows(), "cols": m.cols() }),
            Value::Plot(p) => json!({ "type": "plot", "kind": p.kind, "slot": [p.slot.0, p.slot.1], "title": p.title }),
            Value::Model(m) => {
                let detail = match m.as_ref() {
                    Model::LinearRegression {
                        coefficients,
                        intercept,
                    } => json!({ "coefficients": coefficients, "intercept": intercept }),
                    Model::Knn { points, k, mode, .. } => json!({ "k": k, "mode": mode, "training_rows": points.rows() }),
                    Model::KMeans {
                        centroids,
                        history,
                        iterations,
                    } => json!({
                        "clusters": centroids.rows(),
                        "iterations": iterations,
                        "objective": history.last(),
                    }),
                };
                let mut out = json!({ "type": "model", "algorithm": m.algorithm() });
                if let (Json::Object(o), Json::Object(d)) = (&mut out, detail) {
                    o.extend(d);
                }
                out
            }
        }
    }
}
