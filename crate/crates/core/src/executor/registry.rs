use std::collections::BTreeMap;
use std::sync::Arc;

use super::Value;
use crate::methods::models::{fit_kmeans, fit_knn, fit_linear_regression};
use crate::methods::plot::{render_plot, PlotData};
use crate::methods::split::train_test_split;
use crate::methods::stats::{self, NormMode};
use crate::methods::{metrics, CanvasState, Column, KnnMode, Matrix, MethodError, Model, PlotArtifact, PlotKind};
use crate::rdf::{Iri, Literal};
use crate::schema::ParamSpec;
use crate::vocab::ml;
use crate::SchemaSet;

pub type Outputs = BTreeMap<String, Value>;
pub type MethodFn = dyn Fn(&mut MethodContext<'_>) -> Result<Outputs, MethodError> + Send + Sync;

/// Everything an implementation sees while one task runs.
pub struct MethodContext<'a> {
    pub task: &'a Iri,
    pub task_class: &'a Iri,
    pub schema: &'a SchemaSet,
    pub inputs: BTreeMap<String, Value>,
    pub params: &'a BTreeMap<String, Vec<Literal>>,
    pub specs: &'a [ParamSpec],
    pub run_seed: u64,
    pub canvas: &'a mut Option<CanvasState>,
    pub plots: Vec<PlotArtifact>,
}

impl MethodContext<'_> {
    pub fn input(&self, slot: &str) -> Result<&Value, MethodError> {
        self.inputs
            .get(slot)
            .ok_or_else(|| MethodError::ArityMismatch(format!("missing input '{slot}'")))
    }

    pub fn vector(&self, slot: &str) -> Result<&Column, MethodError> {
        match self.input(slot)? {
            Value::Vector(c) => Ok(c),
            other => Err(MethodError::BadInput(format!("'{slot}' must be a vector, got {}", other.kind()))),
        }
    }

    pub fn numbers(&self, slot: &str) -> Result<&[f64], MethodError> {
        self.vector(slot)?.numeric(slot)
    }

    pub fn matrix(&self, slot: &str) -> Result<&Matrix, MethodError> {
        match self.input(slot)? {
            Value::Matrix(m) => Ok(m),
            other => Err(MethodError::BadInput(format!("'{slot}' must be a matrix, got {}", other.kind()))),
        }
    }

    pub fn model(&self, slot: &str) -> Result<&Model, MethodError> {
        match self.input(slot)? {
            Value::Model(m) => Ok(m),
            other => Err(MethodError::BadInput(format!("'{slot}' must be a model, got {}", other.kind()))),
        }
    }

    /// First value of a parameter, falling back to its schema default.
    pub fn param(&self, name: &str) -> Option<&Literal> {
        self.params
            .get(name)
            .and_then(|v| v.first())
            .or_else(|| self.specs.iter().find(|s| s.name == name)?.default.as_ref())
    }

    fn required(&self, name: &str) -> Result<&Literal, MethodError> {
        self.param(name).ok_or_else(|| MethodError::MissingParam(name.to_owned()))
    }

    fn bad(name: &str, lit: &Literal) -> MethodError {
        MethodError::BadParam {
            name: name.to_owned(),
            value: lit.lexical().to_owned(),
        }
    }

    pub fn param_i64(&self, name: &str) -> Result<i64, MethodError> {
        let lit = self.required(name)?;
        lit.as_i64().ok_or_else(|| Self::bad(name, lit))
    }

    pub fn param_f64(&self, name: &str) -> Result<f64, MethodError> {
        let lit = self.required(name)?;
        lit.as_f64().ok_or_else(|| Self::bad(name, lit))
    }

    pub fn param_str(&self, name: &str) -> Result<&str, MethodError> {
        Ok(self.required(name)?.lexical())
    }

    /// The `seed` parameter when present, else the run seed.
    pub fn seed(&self) -> Result<u64, MethodError> {
        match self.param("seed") {
            Some(lit) => lit.as_i64().map(|s| s as u64).ok_or_else(|| Self::bad("seed", lit)),
            None => Ok(self.run_seed),
        }
    }

    pub fn task_is(&self, class: &Iri) -> bool {
        self.schema.conforms_to(self.task_class, class)
    }

    fn plot(&mut self, kind: PlotKind, data: PlotData<'_>) -> Result<(), MethodError> {
        let title = match self.param("title") {
            Some(t) => t.lexical().to_owned(),
            None => self.task.local_name().to_owned(),
        };
        let canvas = self.canvas.as_mut().ok_or(MethodError::NoCanvas)?;
        let artifact = render_plot(kind, data, &title, canvas)?;
        self.plots.push(artifact);
        Ok(())
    }
}

/// Dispatch table from implementation keys to functions.
#[derive(Clone, Default)]
pub struct MethodRegistry {
    table: BTreeMap<String, Arc<MethodFn>>,
}

impl std::fmt::Debug for MethodRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.table.keys()).finish()
    }
}

fn out<const N: usize>(pairs: [(&str, Value); N]) -> Outputs {
    pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
}

fn normalize_value(ctx: &MethodContext<'_>, mode: NormMode) -> Result<Outputs, MethodError> {
    let value = match ctx.input("values")? {
        Value::Matrix(m) => Value::Matrix(stats::normalize_matrix(m, mode)?),
        _ => Value::Vector(Column::Numeric(stats::normalize(ctx.numbers("values")?, mode)?)),
    };
    Ok(out([("normalized", value)]))
}

fn fit_model(ctx: &MethodContext<'_>, key: &str) -> Result<Outputs, MethodError> {
    let features = ctx.matrix("features")?;
    let labels = ctx.vector("labels")?;
    let model = match key {
        "knn" => {
            let mode = if ctx.task_is(&ml("Regression")) {
                KnnMode::Mean
            } else {
                KnnMode::Vote
            };
            fit_knn(features, labels, ctx.param_i64("k")?, mode)?
        }
        _ => fit_linear_regression(features, labels.numeric("labels")?)?,
    };
    Ok(out([("model", Value::Model(Box::new(model)))]))
}

impl MethodRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register<F>(&mut self, key: impl Into<String>, f: F)
    where
        F: Fn(&mut MethodContext<'_>) -> Result<Outputs, MethodError> + Send + Sync + 'static,
    {
        self.table.insert(key.into(), Arc::new(f));
    }

    pub fn get(&self, key: &str) -> Option<&Arc<MethodFn>> {
        self.table.get(key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.table.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.table.keys().map(String::as_str)
    }

    /// Implementations of every built-in method class that is not
    /// schema-only.
    pub fn with_builtins() -> Self {
        let mut r = Self::new();
        r.register("train_test_split", |ctx| {
            let s = train_test_split(
                ctx.matrix("features")?,
                ctx.vector("labels")?,
                ctx.param_f64("ratio")?,
                ctx.seed()?,
            )?;
            Ok(out([
                ("train_features", Value::Matrix(s.train_features)),
                ("train_labels", Value::Vector(s.train_labels)),
                ("test_features", Value::Matrix(s.test_features)),
                ("test_labels", Value::Vector(s.test_labels)),
            ]))
        });
        r.register("knn", |ctx| fit_model(ctx, "knn"));
        r.register("linear_regression", |ctx| fit_model(ctx, "linear_regression"));
        r.register("kmeans", |ctx| {
            let model = fit_kmeans(ctx.matrix("features")?, ctx.param_i64("clusters")?, ctx.seed()?)?;
            Ok(out([("model", Value::Model(Box::new(model)))]))
        });
        r.register("predict", |ctx| {
            let predictions = ctx.model("model")?.predict(ctx.matrix("features")?)?;
            Ok(out([("predictions", Value::Vector(predictions))]))
        });
        r.register("mae", |ctx| {
            let score = metrics::mae(ctx.numbers("predicted")?, ctx.numbers("actual")?)?;
            Ok(out([("score", Value::Number(score))]))
        });
        r.register("mape", |ctx| {
            let score = metrics::mape(ctx.numbers("predicted")?, ctx.numbers("actual")?)?;
            Ok(out([("score", Value::Number(score))]))
        });
        r.register("accuracy", |ctx| {
            let score = metrics::accuracy(ctx.vector("predicted")?, ctx.vector("actual")?)?;
            Ok(out([("score", Value::Number(score))]))
        });
        r.register("select_column", |ctx| {
            let m = ctx.matrix("features")?;
            let index = ctx.param_i64("index")?;
            if index < 0 || index as usize >= m.cols() {
                return Err(MethodError::BadColumnIndex { index, cols: m.cols() });
            }
            Ok(out([("column", Value::Vector(Column::Numeric(m.column(index as usize))))]))
        });
        r.register("mean", |ctx| Ok(out([("result", Value::Number(stats::mean(ctx.numbers("values")?)?))])));
        r.register("median", |ctx| Ok(out([("result", Value::Number(stats::median(ctx.numbers("values")?)?))])));
        r.register("percentile", |ctx| {
            let p = stats::percentile(ctx.numbers("values")?, ctx.param_f64("percentile")?)?;
            Ok(out([("result", Value::Number(p))]))
        });
        r.register("grouped_frequency", |ctx| {
            let table = stats::grouped_frequency(ctx.numbers("values")?, ctx.param_i64("bins")?)?;
            Ok(out([("table", Value::Matrix(table))]))
        });
        r.register("minmax", |ctx| normalize_value(ctx, NormMode::MinMax));
        r.register("zscore", |ctx| normalize_value(ctx, NormMode::ZScore));
        r.register("canvas", |ctx| {
            let canvas = CanvasState::new(ctx.param_str("name")?, ctx.param_i64("rows")?, ctx.param_i64("cols")?)?;
            *ctx.canvas = Some(canvas);
            Ok(Outputs::new())
        });
        for (key, kind) in [("scatter", PlotKind::Scatter), ("line", PlotKind::Line)] {
            r.register(key, move |ctx| {
                let x = ctx.numbers("x")?.to_vec();
                let y = ctx.numbers("y")?.to_vec();
                ctx.plot(kind, PlotData::Xy(&x, &y))?;
                Ok(Outputs::new())
            });
        }
        r.register("boxplot", |ctx| {
            let v = ctx.numbers("values")?.to_vec();
            ctx.plot(PlotKind::Boxplot, PlotData::Single(&v))?;
            Ok(Outputs::new())
        });
        r.register("heatmap", |ctx| {
            let m = ctx.matrix("matrix")?.clone();
            ctx.plot(PlotKind::Heatmap, PlotData::Grid(&m))?;
            Ok(Outputs::new())
        });
        r
    }
}
