//! Minimal RDF data model: terms, an indexed triple set, triple-pattern
//! matching, and a Turtle-subset reader/writer.

mod graph;
mod term;
mod turtle;

pub use graph::{Graph, Slot, TriplePattern};
pub use term::{format_double, Iri, Literal, Term, Triple};
pub use turtle::{parse_turtle, serialize_turtle};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RdfError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown prefix '{prefix}:' at line {line}, column {column}")]
    UnknownPrefix {
        prefix: String,
        line: usize,
        column: usize,
    },
    #[error("not an absolute IRI: {0}")]
    InvalidIri(String),
    #[error("unsupported literal datatype <{0}>")]
    UnsupportedDatatype(String),
    #[error("prefix '{prefix}' is reserved and cannot be bound to <{namespace}>")]
    ReservedPrefix { prefix: String, namespace: String },
    #[error("literal {0} cannot be a subject")]
    LiteralSubject(String),
}

impl RdfError {
    /// Line of a positioned parse error.
    pub fn line(&self) -> Option<usize> {
        match self {
            RdfError::Syntax { line, .. } | RdfError::UnknownPrefix { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// `match` over a graph; free-function form of [`Graph::match_pattern`].
pub fn match_triples(graph: &Graph, pattern: &TriplePattern) -> Vec<Triple> {
    graph.match_pattern(pattern)
}
