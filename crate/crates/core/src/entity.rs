//! Object model shared by the builder and the executor.

use serde::Serialize;

use crate::rdf::{Graph, Iri, Term};
use crate::vocab::ds;

/// An individual of a KG: its IRI split at `#` into namespace and name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Entity {
    pub iri: Iri,
    pub name: String,
    pub type_iri: Iri,
    pub namespace: String,
}

impl Entity {
    pub fn new(iri: Iri, type_iri: Iri) -> Self {
        let (namespace, name) = match iri.as_str().rsplit_once('#') {
            Some((ns, name)) => (format!("{ns}#"), name.to_owned()),
            None => (String::new(), iri.as_str().to_owned()),
        };
        Entity {
            iri,
            name,
            type_iri,
            namespace,
        }
    }
}

/// A `ds:DataEntity` individual. When bound as a task input exactly one of
/// `source_column` and `referenced_output` is set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DataEntityRef {
    pub iri: Iri,
    pub name: String,
    pub source_column: Option<String>,
    pub referenced_output: Option<Iri>,
    pub semantics: Option<Iri>,
    pub structure: Iri,
}

impl DataEntityRef {
    /// Reads a data entity's properties back from a graph.
    pub fn from_graph(graph: &Graph, iri: &Iri) -> Option<Self> {
        let node = Term::Iri(iri.clone());
        let structure = graph.object(&node, &ds("hasDataStructure"))?.as_iri()?.clone();
        let semantics = graph
            .object(&node, &ds("hasDataSemantics"))
            .and_then(Term::as_iri)
            .cloned();
        let source_column = graph
            .object(&node, &ds("hasSourceColumn"))
            .and_then(Term::as_literal)
            .map(|l| l.lexical().to_owned());
        let referenced_output = graph
            .object(&node, &ds("hasReference"))
            .and_then(Term::as_iri)
            .cloned();
        Some(DataEntityRef {
            name: Entity::new(iri.clone(), ds("DataEntity")).name,
            iri: iri.clone(),
            source_column,
            referenced_output,
            semantics,
            structure,
        })
    }

    /// Source-column entities holding a matrix list their columns
    /// comma-separated.
    pub fn source_columns(&self) -> Vec<&str> {
        self.source_column
            .as_deref()
            .map(|c| c.split(',').map(str::trim).collect())
            .unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn name_is_part_after_hash() {
        let e = Entity::new(
            Iri::new("http://www.w3id.org/exeKG/pipeline/demo#Classification1").unwrap(),
            ds("AtomicTask"),
        );
        assert_eq!(e.name, "Classification1");
        assert_eq!(e.namespace, "http://www.w3id.org/exeKG/pipeline/demo#");
    }

    #[test]
    fn matrix_columns_split() {
        let r = DataEntityRef {
            iri: Iri::new("http://ex.org/#f").unwrap(),
            name: "f".into(),
            source_column: Some("x1, x2".into()),
            referenced_output: None,
            semantics: None,
            structure: ds("Matrix"),
        };
        assert_eq!(r.source_columns(), vec!["x1", "x2"]);
    }
}
