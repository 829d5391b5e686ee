//! Turns a validated ExeKG back into an ordered plan and runs it.
//!
//! Loading is fail-closed: a graph that does not pass the validator never
//! reaches [`Executor::execute`].

mod dataset;
mod registry;
mod script;
mod value;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde_json::json;
use thiserror::Error;

pub use dataset::{Dataset, DatasetError};
pub use registry::{MethodContext, MethodFn, MethodRegistry, Outputs};
pub use script::export_plan_script;
pub use value::Value;

use crate::entity::{DataEntityRef, Entity};
use crate::methods::{CanvasState, Matrix, MethodError, PlotArtifact};
use crate::rdf::{parse_turtle, Graph, Iri, Literal, RdfError, Term};
use crate::schema::ClassKind;
use crate::validator::{load_shapes, validate, Shape, ValidationReport};
use crate::vocab::{ds, rdf_type, OWL_NS, RDFS_NS};
use crate::SchemaSet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecError {
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Parse(#[from] RdfError),
    #[error("class <{0}> is not registered")]
    UnknownClass(Iri),
    #[error("graph does not validate ({} violation(s))", .0.violations.len())]
    ValidationFailed(ValidationReport),
    #[error("shapes: {0}")]
    Shapes(String),
    #[error("malformed pipeline: {0}")]
    Malformed(String),
    #[error("pipeline has no tasks")]
    EmptyPipeline,
    #[error("input <{0}> is neither a source column nor an earlier output")]
    UnboundInput(Iri),
    #[error("method <{method}> has no registered implementation{}", key.as_ref().map(|k| format!(" '{k}'")).unwrap_or_default())]
    UnboundImplementation { method: Iri, key: Option<String> },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// Why a single task failed at run time.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TaskError {
    #[error(transparent)]
    Method(#[from] MethodError),
    #[error("dataset has no column '{0}'")]
    MissingColumn(String),
    #[error("input <{0}> is not bound")]
    Unbound(Iri),
    #[error("entity <{0}> is already bound")]
    Rebound(Iri),
    #[error("method <{0}> has no registered implementation")]
    UnboundImplementation(Iri),
    #[error("implementation produced no value for output '{0}'")]
    MissingOutput(String),
}

/// A task individual with its method, parameters and data entities.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTask {
    pub task: Entity,
    pub method: Entity,
    pub implementation: Option<String>,
    /// Parameter literals by parameter name.
    pub params: BTreeMap<String, Vec<Literal>>,
    /// Input bindings by slot name.
    pub inputs: BTreeMap<String, DataEntityRef>,
    pub outputs: BTreeMap<String, DataEntityRef>,
    pub next_task_iri: Option<Iri>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedPipeline {
    pub name: String,
    pub pipeline_iri: Iri,
    /// `ds:hasInputDataPath` as written in the graph.
    pub input_path: String,
    /// The input path resolved against the graph file's directory.
    pub csv_path: PathBuf,
    pub tasks: Vec<ParsedTask>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionPlan {
    pub pipeline: String,
    pub csv_path: PathBuf,
    pub tasks: Vec<ParsedTask>,
    /// Entities the plan will bind, in binding order.
    pub bound: Vec<Iri>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Success,
    Failed { task: Iri, error: TaskError },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub task: Iri,
    pub plot: PlotArtifact,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub pipeline: String,
    pub seed: u64,
    pub status: RunStatus,
    pub bindings: BTreeMap<Iri, Value>,
    pub artifacts: Vec<Artifact>,
    pub timings: Vec<(Iri, Duration)>,
}

impl RunResult {
    pub fn is_success(&self) -> bool {
        self.status == RunStatus::Success
    }

    pub fn number(&self, entity: &Iri) -> Option<f64> {
        self.bindings.get(entity).and_then(Value::as_number)
    }

    /// Writes every SVG to `dir` as `<task name>.svg` and records the paths.
    pub fn write_artifacts(&mut self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for a in &mut self.artifacts {
            let path = dir.join(format!("{}.svg", a.task.local_name()));
            std::fs::write(&path, &a.plot.svg)?;
            a.path = Some(path);
        }
        Ok(())
    }

    /// Timings are left out so that equal runs serialize identically.
    pub fn to_json_value(&self) -> serde_json::Value {
        let status = match &self.status {
            RunStatus::Success => json!({ "state": "success" }),
            RunStatus::Failed { task, error } => json!({
                "state": "failed",
                "task": task.as_str(),
                "error": error.to_string(),
            }),
        };
        let bindings: serde_json::Map<String, serde_json::Value> =
            self.bindings.iter().map(|(k, v)| (k.as_str().to_owned(), v.summary())).collect();
        let artifacts: Vec<_> = self
            .artifacts
            .iter()
            .map(|a| {
                json!({
                    "task": a.task.as_str(),
                    "kind": a.plot.kind,
                    "slot": [a.plot.slot.0, a.plot.slot.1],
                    "title": a.plot.title,
                    "path": a.path.as_ref().map(|p| p.display().to_string()),
                })
            })
            .collect();
        json!({
            "pipeline": self.pipeline,
            "seed": self.seed,
            "status": status,
            "bindings": bindings,
            "artifacts": artifacts,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("json values serialize")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: u64,
    /// Replaces the graph's input data path.
    pub dataset: Option<PathBuf>,
}

pub fn load_exekg(path: impl AsRef<Path>, schema: &SchemaSet) -> Result<LoadedPipeline, ExecError> {
    Executor::new(schema)?.load_file(path)
}

/// Checks def-before-use along the chain.
pub fn compile_plan(pipeline: &LoadedPipeline) -> Result<ExecutionPlan, ExecError> {
    if pipeline.tasks.is_empty() {
        return Err(ExecError::EmptyPipeline);
    }
    let mut bound: Vec<Iri> = Vec::new();
    let mut seen = BTreeSet::new();
    for task in &pipeline.tasks {
        for input in task.inputs.values() {
            match (&input.source_column, &input.referenced_output) {
                (Some(_), _) => {}
                (None, Some(r)) if seen.contains(r) => {}
                (None, Some(r)) => return Err(ExecError::UnboundInput(r.clone())),
                (None, None) => return Err(ExecError::UnboundInput(input.iri.clone())),
            }
        }
        for output in task.outputs.values() {
            seen.insert(output.iri.clone());
            bound.push(output.iri.clone());
        }
    }
    Ok(ExecutionPlan {
        pipeline: pipeline.name.clone(),
        csv_path: pipeline.csv_path.clone(),
        tasks: pipeline.tasks.clone(),
        bound,
    })
}

pub struct Executor<'s> {
    schema: &'s SchemaSet,
    shapes: Vec<Shape>,
    registry: MethodRegistry,
}

impl<'s> Executor<'s> {
    pub fn new(schema: &'s SchemaSet) -> Result<Self, ExecError> {
        Self::with_registry(schema, MethodRegistry::with_builtins())
    }

    pub fn with_registry(schema: &'s SchemaSet, registry: MethodRegistry) -> Result<Self, ExecError> {
        let shapes = load_shapes(schema).map_err(|e| ExecError::Shapes(e.to_string()))?;
        Ok(Executor {
            schema,
            shapes,
            registry,
        })
    }

    pub fn registry_mut(&mut self) -> &mut MethodRegistry {
        &mut self.registry
    }

    pub fn schema(&self) -> &SchemaSet {
        self.schema
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    pub fn load_file(&self, path: impl AsRef<Path>) -> Result<LoadedPipeline, ExecError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ExecError::Io(format!("{}: {e}", path.display())))?;
        let graph = parse_turtle(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        self.load_graph(&graph, base)
    }

    /// Parses a pipeline graph; relative data paths resolve against `base`.
    pub fn load_graph(&self, graph: &Graph, base: &Path) -> Result<LoadedPipeline, ExecError> {
        let schema = self.schema;
        for t in graph.match_pattern(&crate::rdf::TriplePattern::new(None, Some(rdf_type()), None)) {
            if let Term::Iri(class) = &t.object {
                let builtin_vocab = class.as_str().starts_with(OWL_NS) || class.as_str().starts_with(RDFS_NS);
                if !builtin_vocab && schema.class(class).is_none() {
                    return Err(ExecError::UnknownClass(class.clone()));
                }
            }
        }
        let report = validate(graph, &self.shapes, schema);
        if !report.conforms {
            return Err(ExecError::ValidationFailed(report));
        }

        let pipelines = graph.instances_of(&ds("Pipeline"));
        let [Term::Iri(pipeline_iri)] = pipelines.as_slice() else {
            return Err(ExecError::Malformed("expected exactly one pipeline".into()));
        };
        let input_path = graph
            .object(&Term::Iri(pipeline_iri.clone()), &ds("hasInputDataPath"))
            .and_then(Term::as_literal)
            .map(|l| l.lexical().to_owned())
            .ok_or_else(|| ExecError::Malformed("pipeline has no input data path".into()))?;
        let csv_path = if Path::new(&input_path).is_absolute() {
            PathBuf::from(&input_path)
        } else {
            base.join(&input_path)
        };

        let mut tasks = Vec::new();
        let mut next = next_of(graph, pipeline_iri);
        while let Some(task_iri) = next {
            let task = self.parse_task(graph, &task_iri)?;
            next = task.next_task_iri.clone();
            tasks.push(task);
        }
        Ok(LoadedPipeline {
            name: pipeline_iri.local_name().to_owned(),
            pipeline_iri: pipeline_iri.clone(),
            input_path,
            csv_path,
            tasks,
        })
    }

    fn parse_task(&self, graph: &Graph, iri: &Iri) -> Result<ParsedTask, ExecError> {
        let schema = self.schema;
        let node = Term::Iri(iri.clone());
        let task_class = most_specific(schema, graph, &node, ClassKind::Task)
            .ok_or_else(|| ExecError::Malformed(format!("task <{iri}> has no task class")))?;
        let method_iri = graph
            .object(&node, &ds("hasMethod"))
            .and_then(Term::as_iri)
            .cloned()
            .ok_or_else(|| ExecError::Malformed(format!("task <{iri}> has no method")))?;
        let method_node = Term::Iri(method_iri.clone());
        let method_class = most_specific(schema, graph, &method_node, ClassKind::Method)
            .ok_or_else(|| ExecError::Malformed(format!("method <{method_iri}> has no method class")))?;

        let mut params = BTreeMap::new();
        for spec in schema.params(&method_class) {
            let values: Vec<Literal> = graph
                .objects(&method_node, &spec.property)
                .filter_map(Term::as_literal)
                .cloned()
                .collect();
            if !values.is_empty() {
                params.insert(spec.name.clone(), values);
            }
        }

        let inputs = slot_map(graph, &node, &ds("hasInput"))?;
        let outputs = slot_map(graph, &node, &ds("hasOutput"))?;
        Ok(ParsedTask {
            task: Entity::new(iri.clone(), task_class),
            implementation: schema.implementation(&method_class).map(str::to_owned),
            method: Entity::new(method_iri, method_class),
            params,
            inputs,
            outputs,
            next_task_iri: next_of(graph, iri),
        })
    }

    /// [`compile_plan`] plus a check that every implementation key resolves.
    pub fn compile(&self, pipeline: &LoadedPipeline) -> Result<ExecutionPlan, ExecError> {
        let plan = compile_plan(pipeline)?;
        for task in &plan.tasks {
            let resolved = task.implementation.as_deref().is_some_and(|k| self.registry.contains(k));
            if !resolved {
                return Err(ExecError::UnboundImplementation {
                    method: task.method.type_iri.clone(),
                    key: task.implementation.clone(),
                });
            }
        }
        Ok(plan)
    }

    /// Runs the tasks in order, stopping at the first failure.
    pub fn execute(&self, plan: &ExecutionPlan, dataset: &Dataset, seed: u64) -> RunResult {
        let mut result = RunResult {
            pipeline: plan.pipeline.clone(),
            seed,
            status: RunStatus::Success,
            bindings: BTreeMap::new(),
            artifacts: Vec::new(),
            timings: Vec::new(),
        };
        let mut canvas = None;
        for task in &plan.tasks {
            let start = Instant::now();
            let outcome = self.run_task(task, dataset, &mut result.bindings, &mut canvas, seed);
            result.timings.push((task.task.iri.clone(), start.elapsed()));
            match outcome {
                Ok(plots) => result.artifacts.extend(plots.into_iter().map(|plot| Artifact {
                    task: task.task.iri.clone(),
                    plot,
                    path: None,
                })),
                Err(error) => {
                    result.status = RunStatus::Failed {
                        task: task.task.iri.clone(),
                        error,
                    };
                    break;
                }
            }
        }
        result
    }

    fn run_task(
        &self,
        task: &ParsedTask,
        dataset: &Dataset,
        env: &mut BTreeMap<Iri, Value>,
        canvas: &mut Option<CanvasState>,
        seed: u64,
    ) -> Result<Vec<PlotArtifact>, TaskError> {
        let f = task
            .implementation
            .as_deref()
            .and_then(|k| self.registry.get(k))
            .ok_or_else(|| TaskError::UnboundImplementation(task.method.type_iri.clone()))?
            .clone();
        let mut inputs = BTreeMap::new();
        for (slot, entity) in &task.inputs {
            let value = match (&entity.source_column, &entity.referenced_output) {
                (Some(_), _) => self.column_value(entity, dataset)?,
                (None, Some(r)) => env.get(r).cloned().ok_or_else(|| TaskError::Unbound(r.clone()))?,
                (None, None) => return Err(TaskError::Unbound(entity.iri.clone())),
            };
            inputs.insert(slot.clone(), value.coerce(&entity.structure, self.schema));
        }
        let mut ctx = MethodContext {
            task: &task.task.iri,
            task_class: &task.task.type_iri,
            schema: self.schema,
            inputs,
            params: &task.params,
            specs: self.schema.params(&task.method.type_iri),
            run_seed: seed,
            canvas,
            plots: Vec::new(),
        };
        let mut produced = f(&mut ctx)?;
        let plots = std::mem::take(&mut ctx.plots);
        for (slot, entity) in &task.outputs {
            let value = produced.remove(slot).ok_or_else(|| TaskError::MissingOutput(slot.clone()))?;
            if env.contains_key(&entity.iri) {
                return Err(TaskError::Rebound(entity.iri.clone()));
            }
            env.insert(entity.iri.clone(), value);
        }
        Ok(plots)
    }

    fn column_value(&self, entity: &DataEntityRef, dataset: &Dataset) -> Result<Value, TaskError> {
        let names = entity.source_columns();
        let columns = names
            .iter()
            .map(|n| dataset.column(n).ok_or_else(|| TaskError::MissingColumn((*n).to_owned())))
            .collect::<Result<Vec<_>, _>>()?;
        if let [single] = columns.as_slice() {
            if !self.schema.conforms_to(&entity.structure, &ds("Matrix")) {
                return Ok(Value::Vector((*single).clone()));
            }
        }
        let numeric = columns
            .iter()
            .zip(&names)
            .map(|(c, n)| c.numeric(n).map(<[f64]>::to_vec))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Value::Matrix(Matrix::from_columns(&numeric)?))
    }

    /// Loads, compiles and executes a graph file.
    pub fn run_file(&self, path: impl AsRef<Path>, options: &RunOptions) -> Result<RunResult, ExecError> {
        let pipeline = self.load_file(path)?;
        let plan = self.compile(&pipeline)?;
        let csv = options.dataset.clone().unwrap_or_else(|| plan.csv_path.clone());
        let dataset = Dataset::load(csv)?;
        Ok(self.execute(&plan, &dataset, options.seed))
    }
}

fn next_of(graph: &Graph, iri: &Iri) -> Option<Iri> {
    graph
        .object(&Term::Iri(iri.clone()), &ds("hasNextTask"))
        .and_then(Term::as_iri)
        .cloned()
}

/// The registered type of `node` of the given kind that every other such
/// type subsumes.
fn most_specific(schema: &SchemaSet, graph: &Graph, node: &Term, kind: ClassKind) -> Option<Iri> {
    let types: Vec<Iri> = graph
        .types_of(node)
        .into_iter()
        .filter(|t| schema.class(t).is_some_and(|c| c.kind == kind))
        .collect();
    types
        .iter()
        .find(|t| types.iter().all(|o| schema.conforms_to(t, o)))
        .cloned()
}

fn slot_map(graph: &Graph, task: &Term, property: &Iri) -> Result<BTreeMap<String, DataEntityRef>, ExecError> {
    let mut map = BTreeMap::new();
    for term in graph.objects(task, property) {
        let iri = term
            .as_iri()
            .ok_or_else(|| ExecError::Malformed(format!("{} of {task} is not an IRI", property.local_name())))?;
        let slot = graph
            .object(term, &ds("hasSlotName"))
            .and_then(Term::as_literal)
            .map(|l| l.lexical().to_owned())
            .ok_or_else(|| ExecError::Malformed(format!("data entity <{iri}> has no slot name")))?;
        let entity = DataEntityRef::from_graph(graph, iri)
            .ok_or_else(|| ExecError::Malformed(format!("data entity <{iri}> has no structure")))?;
        if map.insert(slot.clone(), entity).is_some() {
            return Err(ExecError::Malformed(format!("slot '{slot}' bound twice on {task}")));
        }
    }
    Ok(map)
}
