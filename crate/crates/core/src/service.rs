//! Transport-neutral request handling behind the command line and the HTTP
//! API: catalog listing, validation, runs and rule-based recommendations.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::executor::{Dataset, ExecError, Executor, RunResult, RunStatus};
use crate::rdf::{parse_turtle, Iri};
use crate::schema::{ClassKind, ParamSpec, SlotSpec};
use crate::validator::{validate, ValidationReport};
use crate::vocab::ml;
use crate::SchemaSet;

/// SVG artifacts up to this size are returned inline.
pub const INLINE_SVG_LIMIT: usize = 256 * 1024;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub iri: Iri,
    pub kind: ClassKind,
    pub label: String,
    pub parent: Option<Iri>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub compatible_methods: Vec<Iri>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<ParamSpec>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<SlotSpec>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<SlotSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub implementation: Option<String>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub schema_only: bool,
}

/// One entry per task and method class, ordered by IRI.
pub fn catalog(schema: &SchemaSet) -> Vec<CatalogEntry> {
    let mut entries: Vec<CatalogEntry> = schema
        .catalog_classes()
        .map(|c| {
            let is_task = c.kind == ClassKind::Task;
            let io = if is_task { schema.io_spec(&c.iri).unwrap_or_default() } else { Default::default() };
            CatalogEntry {
                iri: c.iri.clone(),
                kind: c.kind,
                label: c.label.clone(),
                parent: c.parent.clone(),
                compatible_methods: if is_task {
                    schema.methods_for(&c.iri).map(<[Iri]>::to_vec).unwrap_or_default()
                } else {
                    Vec::new()
                },
                params: schema.params(&c.iri).to_vec(),
                inputs: io.inputs,
                outputs: io.outputs,
                implementation: schema.implementation(&c.iri).map(str::to_owned),
                schema_only: schema.is_schema_only(&c.iri),
            }
        })
        .collect();
    entries.sort_by(|a, b| a.iri.cmp(&b.iri));
    entries
}

pub fn catalog_text(entries: &[CatalogEntry]) -> String {
    let mut s = String::new();
    for e in entries {
        let kind = match e.kind {
            ClassKind::Task => "task",
            ClassKind::Method => "method",
            _ => "class",
        };
        s.push_str(&format!("{kind:<7}{}  {}", crate::vocab::compact(&e.iri), e.label));
        if !e.compatible_methods.is_empty() {
            let methods: Vec<String> = e.compatible_methods.iter().map(crate::vocab::compact).collect();
            s.push_str(&format!("  [{}]", methods.join(", ")));
        }
        if !e.params.is_empty() {
            let params: Vec<&str> = e.params.iter().map(|p| p.name.as_str()).collect();
            s.push_str(&format!("  ({})", params.join(", ")));
        }
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct ValidateRequest {
    pub turtle: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRequest {
    pub turtle: String,
    /// Inline CSV text; wins over `dataset`.
    #[serde(default)]
    pub csv: Option<String>,
    /// Dataset path; otherwise the graph's own input path is used.
    #[serde(default)]
    pub dataset: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArtifactOut {
    pub task: String,
    pub kind: crate::methods::PlotKind,
    pub slot: (usize, usize),
    pub title: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunError {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task: Option<String>,
    pub message: String,
}

/// Always carries the validation report, flattened so that any response
/// body also parses as a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResponse {
    #[serde(flatten)]
    pub report: ValidationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<serde_json::Value>,
    pub artifacts: Vec<ArtifactOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<RunError>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    BadRequest,
    Invalid,
    Failed,
}

impl Outcome {
    pub fn http_status(self) -> u16 {
        match self {
            Outcome::Ok => 200,
            Outcome::BadRequest => 400,
            Outcome::Invalid => 422,
            Outcome::Failed => 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ServiceError {
    /// The body is not usable Turtle.
    Malformed(String),
}

impl std::fmt::Display for ServiceError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ServiceError::Malformed(m) => write!(f, "{m}"),
        }
    }
}

pub fn validate_turtle(schema: &SchemaSet, executor: &Executor<'_>, turtle: &str) -> Result<ValidationReport, ServiceError> {
    let graph = parse_turtle(turtle).map_err(|e| ServiceError::Malformed(e.to_string()))?;
    Ok(validate(&graph, executor.shapes(), schema))
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(*b)).wrapping_mul(0x0100_0000_01b3))
}

fn response(report: ValidationReport, error: Option<RunError>) -> RunResponse {
    RunResponse {
        report,
        result: None,
        artifacts: Vec::new(),
        error,
    }
}

/// Validates, runs and packages one request. Large SVGs are written under
/// `artifact_dir` and returned by path.
pub fn handle_run(executor: &Executor<'_>, req: &RunRequest, artifact_dir: &Path) -> (Outcome, RunResponse) {
    let schema = executor.schema();
    let graph = match parse_turtle(&req.turtle) {
        Ok(g) => g,
        Err(e) => {
            let report = ValidationReport::from_violations(Vec::new());
            let err = RunError {
                task: None,
                message: e.to_string(),
            };
            return (Outcome::BadRequest, response(report, Some(err)));
        }
    };
    let report = validate(&graph, executor.shapes(), schema);
    if !report.conforms {
        return (Outcome::Invalid, response(report, None));
    }
    let fail = |outcome, report: &ValidationReport, e: &dyn std::fmt::Display| {
        let err = RunError {
            task: None,
            message: e.to_string(),
        };
        (outcome, response(report.clone(), Some(err)))
    };
    let base = std::env::current_dir().unwrap_or_default();
    let plan = match executor.load_graph(&graph, &base).and_then(|p| executor.compile(&p)) {
        Ok(plan) => plan,
        Err(e) => return fail(Outcome::Invalid, &report, &e),
    };
    let dataset = match (&req.csv, &req.dataset) {
        (Some(text), _) => Dataset::parse(text),
        (None, Some(path)) => Dataset::load(path),
        (None, None) => Dataset::load(&plan.csv_path),
    };
    let dataset = match dataset {
        Ok(d) => d,
        Err(e) => return fail(Outcome::BadRequest, &report, &ExecError::from(e)),
    };
    let result = executor.execute(&plan, &dataset, req.seed);
    package(report, result, artifact_dir)
}

fn package(report: ValidationReport, mut result: RunResult, artifact_dir: &Path) -> (Outcome, RunResponse) {
    let mut artifacts = Vec::new();
    for a in &mut result.artifacts {
        let mut out = ArtifactOut {
            task: a.task.as_str().to_owned(),
            kind: a.plot.kind,
            slot: a.plot.slot,
            title: a.plot.title.clone(),
            svg: None,
            path: None,
        };
        if a.plot.svg.len() <= INLINE_SVG_LIMIT {
            out.svg = Some(a.plot.svg.clone());
        } else {
            let name = format!("{}-{:016x}.svg", a.task.local_name(), fnv1a(a.plot.svg.as_bytes()));
            let path = artifact_dir.join(name);
            let written = std::fs::create_dir_all(artifact_dir).and_then(|_| std::fs::write(&path, &a.plot.svg));
            if written.is_ok() {
                out.path = Some(path.display().to_string());
                a.path = Some(path);
            }
        }
        artifacts.push(out);
    }
    let (outcome, error) = match &result.status {
        RunStatus::Success => (Outcome::Ok, None),
        RunStatus::Failed { task, error } => (
            Outcome::Failed,
            Some(RunError {
                task: Some(task.as_str().to_owned()),
                message: error.to_string(),
            }),
        ),
    };
    let response = RunResponse {
        report,
        result: Some(result.to_json_value()),
        artifacts,
        error,
    };
    (outcome, response)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnType {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct ColumnInfo {
    pub name: String,
    #[serde(rename = "type")]
    pub column_type: ColumnType,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecommendRequest {
    pub columns: Vec<ColumnInfo>,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuggestedStep {
    pub task: Iri,
    pub method: Iri,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Recommendation {
    pub rule: String,
    pub steps: Vec<SuggestedStep>,
}

/// Fixed rules on the label column: categorical leads to k-NN
/// classification, numeric to linear regression, none to k-means. An
/// unknown label name yields no steps.
pub fn recommend(req: &RecommendRequest) -> Recommendation {
    let step = |task: Iri, method: Iri| SuggestedStep { task, method };
    let supervised = |model: SuggestedStep, metric: Iri| {
        vec![
            step(ml("DataSplitting"), ml("TrainTestSplitMethod")),
            model,
            step(ml("Test"), ml("PredictMethod")),
            step(ml("PerformanceCalculation"), metric),
        ]
    };
    let label = req
        .label
        .as_ref()
        .map(|name| req.columns.iter().find(|c| &c.name == name).map(|c| c.column_type));
    let (rule, steps) = match label {
        Some(Some(ColumnType::Categorical)) => (
            "categorical_label",
            supervised(step(ml("Classification"), ml("KNNMethod")), ml("AccuracyMethod")),
        ),
        Some(Some(ColumnType::Numeric)) => (
            "numeric_label",
            supervised(step(ml("Regression"), ml("LinearRegressionMethod")), ml("MAEMethod")),
        ),
        Some(None) => ("unknown_label", Vec::new()),
        None => ("no_label", vec![step(ml("Clustering"), ml("KMeansMethod"))]),
    };
    Recommendation {
        rule: rule.to_owned(),
        steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cols(label_type: ColumnType) -> Vec<ColumnInfo> {
        vec![
            ColumnInfo {
                name: "x".into(),
                column_type: ColumnType::Numeric,
            },
            ColumnInfo {
                name: "y".into(),
                column_type: label_type,
            },
        ]
    }

    #[test]
    fn numeric_label_regression() {
        let r = recommend(&RecommendRequest {
            columns: cols(ColumnType::Numeric),
            label: Some("y".into()),
        });
        assert_eq!(r.steps[1].task, ml("Regression"));
        assert_eq!(r.steps[1].method, ml("LinearRegressionMethod"));
    }

    #[test]
    fn categorical_and_unlabelled() {
        let r = recommend(&RecommendRequest {
            columns: cols(ColumnType::Categorical),
            label: Some("y".into()),
        });
        assert_eq!(r.steps[1].method, ml("KNNMethod"));
        let r = recommend(&RecommendRequest {
            columns: cols(ColumnType::Numeric),
            label: None,
        });
        assert_eq!(r.steps, vec![SuggestedStep { task: ml("Clustering"), method: ml("KMeansMethod") }]);
        let r = recommend(&RecommendRequest {
            columns: cols(ColumnType::Numeric),
            label: Some("missing".into()),
        });
        assert!(r.steps.is_empty());
    }

    #[test]
    fn catalog_covers_task_and_method_classes() {
        let schema = SchemaSet::load_builtin().unwrap();
        let entries = catalog(&schema);
        assert_eq!(entries.len(), schema.catalog_classes().count());
        let knn = entries.iter().find(|e| e.iri == ml("KNNMethod")).unwrap();
        assert_eq!(knn.params[0].name, "k");
    }
}
