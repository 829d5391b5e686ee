//! Programmatic construction of pipeline graphs.
//!
//! A [`PipelineBuilder`] creates the pipeline individual, declares source
//! data entities and appends tasks. Every `add_task` is checked against the
//! schema and re-validated; a rejected task leaves the graph unchanged.

mod batch;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

pub use batch::{generate_batch, BatchPoint, BatchTemplate, EntityTemplate, TaskTemplate};

use crate::entity::DataEntityRef;
use crate::rdf::{serialize_turtle, Graph, Iri, Literal, Term, Triple};
use crate::schema::{ClassKind, SchemaSet, SlotStructure};
use crate::validator::{load_shapes, validate, Constraint, Shape, ValidationReport};
use crate::vocab::{self, ds, rdf_type, xsd};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("invalid name '{0}': expected letters, digits, '_' or '-', starting with a letter or '_'")]
    InvalidName(String),
    #[error("unknown or unsuitable class <{0}>")]
    UnknownClass(Iri),
    #[error("data entity '{0}' already exists")]
    DuplicateEntityName(String),
    #[error("method <{method}> is not compatible with task <{task}>")]
    IncompatibleMethod { task: Iri, method: Iri },
    #[error("task <{task}> takes {min}..={max} inputs, got {got}")]
    ArityMismatch { task: Iri, min: usize, max: usize, got: usize },
    #[error("input slot '{slot}' needs structure <{expected}>, got <{found}>")]
    StructureMismatch { slot: String, expected: Iri, found: Iri },
    #[error("method <{method}> has no parameter '{name}'")]
    UnknownParam { method: Iri, name: String },
    #[error("parameter '{name}' expects <{datatype}>, got {value}")]
    ParamTypeError { name: String, datatype: Iri, value: String },
    #[error("parameter '{name}' given more often than allowed")]
    ParamCardinality { name: String },
    #[error("method <{method}> requires parameter '{name}' and it has no default")]
    MissingParam { method: Iri, name: String },
    #[error("input <{0}> is neither a source column nor an output of an earlier task")]
    UnboundInput(Iri),
    #[error("task <{task}> must be preceded by a <{before}>")]
    OrderingViolation { task: Iri, before: Iri },
    #[error("task rejected by validation:\n{}", .0.to_text())]
    Validation(ValidationReport),
    #[error("pipeline has no tasks")]
    EmptyPipeline,
    #[error("i/o error: {0}")]
    Io(String),
    #[error("shapes failed to load: {0}")]
    Shapes(String),
    #[error("template error: {0}")]
    Template(String),
    #[error("grid point {index} ({name}): {source}")]
    BatchPoint {
        index: usize,
        name: String,
        source: Box<BuildError>,
    },
}

/// A parameter value as given by the caller, converted to a literal of the
/// parameter's declared datatype.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Float(v)
    }
}

impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Bool(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_owned())
    }
}

impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Text(v)
    }
}

impl std::fmt::Display for ParamValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamValue::Bool(b) => write!(f, "{b}"),
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Float(x) => write!(f, "{x}"),
            ParamValue::Text(s) => write!(f, "{s:?}"),
        }
    }
}

impl ParamValue {
    fn to_literal(&self, name: &str, datatype: &Iri) -> Result<Literal, BuildError> {
        let dt = datatype.as_str();
        let type_error = || BuildError::ParamTypeError {
            name: name.to_owned(),
            datatype: datatype.clone(),
            value: self.to_string(),
        };
        let lexical = match (self, dt) {
            (ParamValue::Int(i), xsd::INTEGER | xsd::DECIMAL) => i.to_string(),
            (ParamValue::Int(i), xsd::DOUBLE | xsd::FLOAT) => crate::rdf::format_double(*i as f64),
            (ParamValue::Float(x), xsd::DOUBLE | xsd::FLOAT) => crate::rdf::format_double(*x),
            (ParamValue::Float(x), xsd::DECIMAL) if x.is_finite() => crate::rdf::format_double(*x),
            (ParamValue::Bool(b), xsd::BOOLEAN) => b.to_string(),
            (ParamValue::Text(s), _) if xsd::lexical_ok(dt, s) => s.clone(),
            _ => return Err(type_error()),
        };
        Literal::new(lexical, datatype.clone()).map_err(|_| type_error())
    }
}

/// A task appended to the chain and the output entities it produces.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskHandle {
    pub task_iri: Iri,
    pub method_iri: Iri,
    /// One per declared output slot, in slot order.
    pub output_refs: Vec<(String, DataEntityRef)>,
}

impl TaskHandle {
    pub fn output(&self, slot: &str) -> Option<&DataEntityRef> {
        self.output_refs.iter().find(|(s, _)| s == slot).map(|(_, r)| r)
    }

    /// Output of a single-output task.
    pub fn single_output(&self) -> &DataEntityRef {
        &self.output_refs[0].1
    }
}

/// Single-writer builder for one pipeline graph.
#[derive(Debug, Clone)]
pub struct PipelineBuilder<'s> {
    schema: &'s SchemaSet,
    shapes: Vec<Shape>,
    graph: Graph,
    name: String,
    namespace: String,
    pipeline_iri: Iri,
    last_task: Option<Iri>,
    tasks: Vec<(Iri, Iri)>,
    entities: BTreeMap<String, DataEntityRef>,
    outputs: BTreeSet<Iri>,
    used: BTreeSet<Iri>,
    counters: BTreeMap<String, u32>,
}

/// Names must be usable as IRI fragments and as Turtle local names.
pub fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl<'s> PipelineBuilder<'s> {
    pub fn new(name: &str, input_csv: &str, schema: &'s SchemaSet) -> Result<Self, BuildError> {
        if !valid_name(name) {
            return Err(BuildError::InvalidName(name.to_owned()));
        }
        let shapes = load_shapes(schema).map_err(|e| BuildError::Shapes(e.to_string()))?;
        let namespace = format!("{}{name}#", vocab::EXE_BASE);
        let mut graph = Graph::with_standard_prefixes();
        graph
            .bind_prefix("exe", &namespace)
            .expect("exe is not a reserved prefix");
        let pipeline_iri = Iri::new(format!("{namespace}{name}")).map_err(|_| BuildError::InvalidName(name.to_owned()))?;
        graph.insert(Triple::iri(&pipeline_iri, &rdf_type(), ds("Pipeline")));
        graph.insert(Triple::iri(
            &pipeline_iri,
            &ds("hasInputDataPath"),
            Literal::string(input_csv),
        ));
        let used = BTreeSet::from([pipeline_iri.clone()]);
        Ok(PipelineBuilder {
            schema,
            shapes,
            graph,
            name: name.to_owned(),
            namespace,
            pipeline_iri,
            last_task: None,
            tasks: Vec::new(),
            entities: BTreeMap::new(),
            outputs: BTreeSet::new(),
            used,
            counters: BTreeMap::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn pipeline_iri(&self) -> &Iri {
        &self.pipeline_iri
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Raw access for tests that need to corrupt a built graph.
    pub fn graph_mut(&mut self) -> &mut Graph {
        &mut self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    /// Task IRIs in chain order with their classes.
    pub fn tasks(&self) -> &[(Iri, Iri)] {
        &self.tasks
    }

    pub fn entity(&self, name: &str) -> Option<&DataEntityRef> {
        self.entities.get(name)
    }

    fn local(&self, name: &str) -> Iri {
        Iri::new(format!("{}{name}", self.namespace)).expect("validated local name")
    }

    fn mint(&mut self, class: &Iri) -> Iri {
        let base = class.local_name().to_owned();
        let counter = self.counters.entry(base.clone()).or_insert(0);
        loop {
            *counter += 1;
            let iri = Iri::new(format!("{}{base}{counter}", self.namespace)).expect("class local names are valid");
            if self.used.insert(iri.clone()) {
                return iri;
            }
        }
    }

    fn require_kind(&self, iri: &Iri, upper: &str) -> Result<(), BuildError> {
        if self.schema.conforms_to(iri, &ds(upper)) {
            Ok(())
        } else {
            Err(BuildError::UnknownClass(iri.clone()))
        }
    }

    /// Declares a source-column data entity. Matrix entities list their
    /// columns comma-separated, e.g. `"x1,x2"`.
    pub fn add_data_entity(
        &mut self,
        name: &str,
        source_column: &str,
        semantics: &Iri,
        structure: &Iri,
    ) -> Result<DataEntityRef, BuildError> {
        if !valid_name(name) {
            return Err(BuildError::InvalidName(name.to_owned()));
        }
        self.require_kind(semantics, "DataSemantics")?;
        self.require_kind(structure, "DataStructure")?;
        let iri = self.local(name);
        if self.entities.contains_key(name) || self.used.contains(&iri) {
            return Err(BuildError::DuplicateEntityName(name.to_owned()));
        }
        self.used.insert(iri.clone());
        self.graph.extend([
            Triple::iri(&iri, &rdf_type(), ds("DataEntity")),
            Triple::iri(&iri, &ds("hasSourceColumn"), Literal::string(source_column)),
            Triple::iri(&iri, &ds("hasDataSemantics"), semantics.clone()),
            Triple::iri(&iri, &ds("hasDataStructure"), structure.clone()),
        ]);
        let entity = DataEntityRef {
            iri,
            name: name.to_owned(),
            source_column: Some(source_column.to_owned()),
            referenced_output: None,
            semantics: Some(semantics.clone()),
            structure: structure.clone(),
        };
        self.entities.insert(name.to_owned(), entity.clone());
        Ok(entity)
    }

    /// Appends a task. Inputs bind to the task's input slots in slot order;
    /// parameters are matched by name and missing ones take their defaults.
    pub fn add_task(
        &mut self,
        task_class: &Iri,
        method_class: &Iri,
        inputs: &[&DataEntityRef],
        params: &[(&str, ParamValue)],
    ) -> Result<TaskHandle, BuildError> {
        let schema = self.schema;
        let task_info = schema
            .class(task_class)
            .filter(|c| c.kind == ClassKind::Task && schema.conforms_to(task_class, &ds("AtomicTask")))
            .ok_or_else(|| BuildError::UnknownClass(task_class.clone()))?;
        let compatible = schema
            .methods_for(&task_info.iri)
            .is_some_and(|list| list.contains(method_class));
        if !compatible {
            return Err(BuildError::IncompatibleMethod {
                task: task_class.clone(),
                method: method_class.clone(),
            });
        }

        let io = schema
            .io_spec(task_class)
            .map_err(|_| BuildError::UnknownClass(task_class.clone()))?;
        if inputs.len() < io.required_inputs() || inputs.len() > io.inputs.len() {
            return Err(BuildError::ArityMismatch {
                task: task_class.clone(),
                min: io.required_inputs(),
                max: io.inputs.len(),
                got: inputs.len(),
            });
        }
        for (slot, input) in io.inputs.iter().zip(inputs) {
            if let SlotStructure::Class(expected) = &slot.structure {
                if !schema.conforms_to(&input.structure, expected) {
                    return Err(BuildError::StructureMismatch {
                        slot: slot.name.clone(),
                        expected: expected.clone(),
                        found: input.structure.clone(),
                    });
                }
            }
        }
        let literals = self.param_literals(method_class, params)?;
        for input in inputs {
            if input.source_column.is_none() && input.referenced_output.is_none() && !self.outputs.contains(&input.iri) {
                return Err(BuildError::UnboundInput(input.iri.clone()));
            }
        }
        self.check_ordering(task_class)?;

        let snapshot = (self.graph.clone(), self.used.clone(), self.counters.clone());
        let task = self.mint(task_class);
        let method = self.mint(method_class);
        let mut added = vec![
            Triple::iri(&task, &rdf_type(), task_class.clone()),
            Triple::iri(&task, &ds("hasMethod"), method.clone()),
            Triple::iri(&method, &rdf_type(), method_class.clone()),
        ];
        for (property, literal) in literals {
            added.push(Triple::iri(&method, &property, literal));
        }

        let task_local = task.local_name().to_owned();
        for (slot, input) in io.inputs.iter().zip(inputs) {
            let binding = self.local(&format!("{task_local}_{}", slot.name));
            self.used.insert(binding.clone());
            added.push(Triple::iri(&task, &ds("hasInput"), binding.clone()));
            added.extend(binding_triples(&binding, &slot.name, input));
        }

        let mut output_refs = Vec::new();
        for slot in &io.outputs {
            let iri = self.local(&format!("{task_local}_{}", slot.name));
            self.used.insert(iri.clone());
            let (structure, semantics) = match &slot.structure {
                SlotStructure::Class(c) => (c.clone(), None),
                SlotStructure::SameAs(src) => {
                    let idx = io.inputs.iter().position(|s| &s.name == src).expect("schema checks slot names");
                    let input = inputs.get(idx).ok_or_else(|| BuildError::ArityMismatch {
                        task: task_class.clone(),
                        min: idx + 1,
                        max: io.inputs.len(),
                        got: inputs.len(),
                    })?;
                    (input.structure.clone(), input.semantics.clone())
                }
            };
            added.push(Triple::iri(&task, &ds("hasOutput"), iri.clone()));
            added.push(Triple::iri(&iri, &rdf_type(), ds("DataEntity")));
            added.push(Triple::iri(&iri, &ds("hasSlotName"), Literal::string(slot.name.clone())));
            added.push(Triple::iri(&iri, &ds("hasDataStructure"), structure.clone()));
            if let Some(sem) = &semantics {
                added.push(Triple::iri(&iri, &ds("hasDataSemantics"), sem.clone()));
            }
            output_refs.push((
                slot.name.clone(),
                DataEntityRef {
                    name: iri.local_name().to_owned(),
                    iri,
                    source_column: None,
                    referenced_output: None,
                    semantics,
                    structure,
                },
            ));
        }

        let previous = self.last_task.clone().unwrap_or_else(|| self.pipeline_iri.clone());
        added.push(Triple::iri(&previous, &ds("hasNextTask"), task.clone()));
        self.graph.extend(added);

        let report = validate(&self.graph, &self.shapes, self.schema);
        if !report.conforms {
            (self.graph, self.used, self.counters) = snapshot;
            return Err(BuildError::Validation(report));
        }
        self.last_task = Some(task.clone());
        self.tasks.push((task.clone(), task_class.clone()));
        self.outputs.extend(output_refs.iter().map(|(_, r)| r.iri.clone()));
        Ok(TaskHandle {
            task_iri: task,
            method_iri: method,
            output_refs,
        })
    }

    fn param_literals(
        &self,
        method_class: &Iri,
        params: &[(&str, ParamValue)],
    ) -> Result<Vec<(Iri, Literal)>, BuildError> {
        let specs = self.schema.params(method_class);
        let mut given: BTreeMap<&str, Vec<Literal>> = BTreeMap::new();
        for (name, value) in params {
            let spec = specs
                .iter()
                .find(|s| s.name == *name)
                .ok_or_else(|| BuildError::UnknownParam {
                    method: method_class.clone(),
                    name: (*name).to_owned(),
                })?;
            given.entry(spec.name.as_str()).or_default().push(value.to_literal(name, &spec.datatype)?);
        }
        let mut out = Vec::new();
        for spec in specs {
            let values = match given.remove(spec.name.as_str()) {
                Some(values) => values,
                None => spec.default.iter().cloned().collect(),
            };
            if values.len() > spec.max as usize {
                return Err(BuildError::ParamCardinality { name: spec.name.clone() });
            }
            if values.len() < spec.min as usize {
                return Err(BuildError::MissingParam {
                    method: method_class.clone(),
                    name: spec.name.clone(),
                });
            }
            out.extend(values.into_iter().map(|v| (spec.property.clone(), v)));
        }
        Ok(out)
    }

    fn check_ordering(&self, task_class: &Iri) -> Result<(), BuildError> {
        for shape in &self.shapes {
            for c in &shape.constraints {
                let Constraint::OrderingRule { before, after } = c else { continue };
                if self.schema.conforms_to(task_class, after)
                    && !self.tasks.iter().any(|(_, class)| self.schema.conforms_to(class, before))
                {
                    return Err(BuildError::OrderingViolation {
                        task: task_class.clone(),
                        before: before.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> ValidationReport {
        validate(&self.graph, &self.shapes, self.schema)
    }

    pub fn to_turtle(&self) -> String {
        serialize_turtle(&self.graph)
    }

    /// Validates and writes Turtle to `path` only if the graph conforms.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<ValidationReport, BuildError> {
        if self.tasks.is_empty() {
            return Err(BuildError::EmptyPipeline);
        }
        let report = self.validate();
        if report.conforms {
            std::fs::write(path.as_ref(), self.to_turtle())
                .map_err(|e| BuildError::Io(format!("{}: {e}", path.as_ref().display())))?;
        }
        Ok(report)
    }
}

fn binding_triples(binding: &Iri, slot: &str, input: &DataEntityRef) -> Vec<Triple> {
    let mut out = vec![
        Triple::iri(binding, &rdf_type(), ds("DataEntity")),
        Triple::iri(binding, &ds("hasSlotName"), Literal::string(slot)),
        Triple::iri(binding, &ds("hasDataStructure"), input.structure.clone()),
    ];
    if let Some(sem) = &input.semantics {
        out.push(Triple::iri(binding, &ds("hasDataSemantics"), sem.clone()));
    }
    match (&input.source_column, &input.referenced_output) {
        (Some(column), _) => out.push(Triple::iri(binding, &ds("hasSourceColumn"), Literal::string(column.clone()))),
        (None, Some(target)) => out.push(Triple::iri(binding, &ds("hasReference"), target.clone())),
        (None, None) => out.push(Triple::iri(binding, &ds("hasReference"), input.iri.clone())),
    }
    out
}

/// Values of `predicate` on `subject` as terms, for tests and tools.
pub fn objects_of(graph: &Graph, subject: &Iri, predicate: &Iri) -> Vec<Term> {
    graph.objects(&Term::Iri(subject.clone()), predicate).cloned().collect()
}
