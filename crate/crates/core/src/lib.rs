//! Machine-learning pipelines as executable knowledge graphs.
//!
//! A pipeline is an RDF graph whose task individuals are chained with
//! `ds:hasNextTask`, each linked to a method individual, input/output data
//! entities and typed parameter literals. This crate ships the schemata the
//! graphs instantiate, a shape-based validator, a programmatic builder, and an
//! executor that walks the chain and dispatches every task to a registered
//! implementation.

pub mod builder;
pub mod entity;
pub mod executor;
pub mod fixtures;
pub mod methods;
pub mod rdf;
pub mod schema;
pub mod service;
pub mod validator;
pub mod vocab;

pub use builder::{BatchTemplate, BuildError, ParamValue, PipelineBuilder, TaskHandle};
pub use entity::{DataEntityRef, Entity};
pub use executor::{
    Dataset, ExecError, ExecutionPlan, Executor, LoadedPipeline, MethodRegistry, ParsedTask, RunOptions,
    RunResult, RunStatus, Value,
};
pub use rdf::{parse_turtle, serialize_turtle, Graph, Iri, Literal, Term, Triple, TriplePattern};
pub use schema::{ClassInfo, ClassKind, ExtensionDescriptor, ParamSpec, SchemaSet};
pub use validator::{load_shapes, validate, Shape, ValidationReport, Violation};
