use std::collections::BTreeSet;

use thiserror::Error;

use crate::rdf::{parse_turtle, Graph, Iri, RdfError, Term};
use crate::schema::SchemaSet;
use crate::vocab::{self, sh, shapes, xsd};

pub const SHAPES_TTL: &str = include_str!("../../data/shapes.ttl");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("failed to parse shapes: {0}")]
    Parse(#[from] RdfError),
    #[error("shape <{shape}>: {message}")]
    Invalid { shape: String, message: String },
}

/// One or two property steps; the second step is followed from every value
/// of the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyPath(pub Vec<Iri>);

impl PropertyPath {
    pub fn single(iri: Iri) -> Self {
        PropertyPath(vec![iri])
    }

    pub fn head(&self) -> &Iri {
        &self.0[0]
    }

    pub fn values(&self, graph: &Graph, focus: &Term) -> Vec<Term> {
        let mut current = vec![focus.clone()];
        for step in &self.0 {
            let mut next: Vec<Term> = current
                .iter()
                .flat_map(|node| graph.objects(node, step).cloned())
                .collect();
            next.sort();
            next.dedup();
            current = next;
        }
        current
    }

    pub fn display(&self) -> String {
        self.0.iter().map(vocab::compact).collect::<Vec<_>>().join("/")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    PropertyCardinality {
        path: PropertyPath,
        min: u32,
        max: Option<u32>,
    },
    PropertyClass {
        path: PropertyPath,
        class: Iri,
    },
    PropertyDatatype {
        path: PropertyPath,
        datatype: Iri,
    },
    /// The method linked through `path` must be compatible with the focus
    /// task's class.
    CompatiblePair {
        path: Iri,
    },
    /// Some strict predecessor in the task chain must be a `before`.
    OrderingRule {
        before: Iri,
        after: Iri,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub iri: Iri,
    pub target_class: Iri,
    pub constraints: Vec<Constraint>,
}

impl Shape {
    /// Constraints of this shape whose first path step is `path`.
    pub fn on_path<'a>(&'a self, path: &'a Iri) -> impl Iterator<Item = &'a Constraint> {
        self.constraints.iter().filter(move |c| match c {
            Constraint::PropertyCardinality { path: p, .. }
            | Constraint::PropertyClass { path: p, .. }
            | Constraint::PropertyDatatype { path: p, .. } => p.head() == path,
            Constraint::CompatiblePair { path: p } => p == path,
            Constraint::OrderingRule { .. } => false,
        })
    }
}

/// The shipped shapes graph, parsed.
pub fn shapes_graph() -> Result<Graph, ShapeError> {
    Ok(parse_turtle(SHAPES_TTL)?)
}

/// Shipped shapes plus shapes derived from the schema: one per method class
/// with parameters, and arity shapes for task classes declaring slots.
pub fn load_shapes(schema: &SchemaSet) -> Result<Vec<Shape>, ShapeError> {
    let graph = shapes_graph()?;
    let mut out = parse_shapes(&graph, schema)?;
    let covered: BTreeSet<(Iri, Iri)> = out
        .iter()
        .flat_map(|s| {
            s.constraints.iter().filter_map(move |c| match c {
                Constraint::PropertyCardinality { path, .. } | Constraint::PropertyDatatype { path, .. } => {
                    Some((s.target_class.clone(), path.head().clone()))
                }
                _ => None,
            })
        })
        .collect();

    for class in schema.classes() {
        let params = schema.params(&class.iri);
        if !params.is_empty() {
            let mut constraints = Vec::new();
            for p in params {
                if covered.contains(&(class.iri.clone(), p.property.clone())) {
                    continue;
                }
                let path = PropertyPath::single(p.property.clone());
                constraints.push(Constraint::PropertyCardinality {
                    path: path.clone(),
                    min: p.min,
                    max: Some(p.max),
                });
                constraints.push(Constraint::PropertyDatatype {
                    path,
                    datatype: p.datatype.clone(),
                });
            }
            if !constraints.is_empty() {
                out.push(Shape {
                    iri: derived_iri(&class.iri, "Params"),
                    target_class: class.iri.clone(),
                    constraints,
                });
            }
        }
    }

    // Arity of tasks that declare their own slots.
    for class in schema.classes() {
        let Ok(io) = schema.io_spec(&class.iri) else { continue };
        let parent_io = class.parent.as_ref().and_then(|p| schema.io_spec(p).ok());
        if io.inputs.is_empty() && io.outputs.is_empty() || parent_io.as_ref() == Some(&io) {
            continue;
        }
        let mut constraints = Vec::new();
        let arities = [
            (vocab::ds("hasInput"), io.required_inputs(), io.inputs.len()),
            (vocab::ds("hasOutput"), io.outputs.len(), io.outputs.len()),
        ];
        for (path, min, max) in arities {
            if covered.contains(&(class.iri.clone(), path.clone())) {
                continue;
            }
            constraints.push(Constraint::PropertyCardinality {
                path: PropertyPath::single(path),
                min: min as u32,
                max: Some(max as u32),
            });
        }
        if !constraints.is_empty() {
            out.push(Shape {
                iri: derived_iri(&class.iri, "Slots"),
                target_class: class.iri.clone(),
                constraints,
            });
        }
    }
    Ok(out)
}

fn derived_iri(class: &Iri, suffix: &str) -> Iri {
    let (ns, local) = class.split();
    let prefix = vocab::RESERVED_PREFIXES
        .iter()
        .find(|(_, n)| *n == ns)
        .map(|(p, _)| (*p).to_owned())
        .unwrap_or_else(|| "ext".to_owned());
    shapes(&format!("{prefix}_{local}{suffix}"))
}

fn parse_shapes(graph: &Graph, schema: &SchemaSet) -> Result<Vec<Shape>, ShapeError> {
    let mut out = Vec::new();
    for node in graph.instances_of(&sh("NodeShape")) {
        let shape_name = node.to_string();
        let invalid = |message: String| ShapeError::Invalid {
            shape: shape_name.clone(),
            message,
        };
        let Term::Iri(iri) = &node else {
            return Err(invalid("shapes must be IRIs".into()));
        };
        let target = graph
            .object(&node, &sh("targetClass"))
            .and_then(Term::as_iri)
            .cloned()
            .ok_or_else(|| invalid("missing sh:targetClass".into()))?;
        require_class(schema, &target).map_err(invalid)?;

        let mut constraints = Vec::new();
        for before in graph.objects(&node, &shapes("precededBy")) {
            let before = before
                .as_iri()
                .cloned()
                .ok_or_else(|| invalid("precededBy must be a class".into()))?;
            require_class(schema, &before).map_err(invalid)?;
            constraints.push(Constraint::OrderingRule {
                before,
                after: target.clone(),
            });
        }
        for prop in graph.objects(&node, &sh("property")) {
            constraints.extend(parse_property(graph, prop, schema).map_err(invalid)?);
        }
        out.push(Shape {
            iri: iri.clone(),
            target_class: target,
            constraints,
        });
    }
    Ok(out)
}

fn require_class(schema: &SchemaSet, iri: &Iri) -> Result<(), String> {
    match schema.class(iri) {
        Some(_) => Ok(()),
        None => Err(format!("class <{iri}> is not in the schema")),
    }
}

fn parse_property(graph: &Graph, prop: &Term, schema: &SchemaSet) -> Result<Vec<Constraint>, String> {
    let iri_of = |p: Iri| graph.object(prop, &p).and_then(Term::as_iri).cloned();
    let count = |p: &str| -> Result<Option<u32>, String> {
        match graph.object(prop, &sh(p)) {
            None => Ok(None),
            Some(t) => t
                .as_literal()
                .and_then(|l| l.as_i64())
                .and_then(|v| u32::try_from(v).ok())
                .map(Some)
                .ok_or_else(|| format!("sh:{p} on {prop} must be a non-negative integer")),
        }
    };
    let head = iri_of(sh("path")).ok_or_else(|| format!("{prop} has no sh:path"))?;
    let mut steps = vec![head.clone()];
    if let Some(then) = iri_of(shapes("thenPath")) {
        steps.push(then);
    }
    let path = PropertyPath(steps);

    let mut out = Vec::new();
    let (min, max) = (count("minCount")?, count("maxCount")?);
    if min.is_some() || max.is_some() {
        let min = min.unwrap_or(0);
        if max.is_some_and(|m| m < min) {
            return Err(format!("{prop} has minCount > maxCount"));
        }
        out.push(Constraint::PropertyCardinality {
            path: path.clone(),
            min,
            max,
        });
    }
    if let Some(class) = iri_of(sh("class")) {
        require_class(schema, &class)?;
        out.push(Constraint::PropertyClass {
            path: path.clone(),
            class,
        });
    }
    if let Some(datatype) = iri_of(sh("datatype")) {
        if !xsd::SUPPORTED.contains(&datatype.as_str()) {
            return Err(format!("{prop} uses unsupported datatype <{datatype}>"));
        }
        out.push(Constraint::PropertyDatatype {
            path: path.clone(),
            datatype,
        });
    }
    let compat = graph
        .object(prop, &shapes("compatibleMethod"))
        .and_then(Term::as_literal)
        .and_then(|l| l.as_bool())
        .unwrap_or(false);
    if compat {
        out.push(Constraint::CompatiblePair { path: head });
    }
    Ok(out)
}
