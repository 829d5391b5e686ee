//! Shape-based validation of pipeline graphs.
//!
//! Shapes cover a SHACL subset (target class, path, min/max count, class,
//! datatype) plus two custom rules: task/method compatibility and task
//! ordering. Chain structure (a single pipeline, reachability, cycles,
//! def-before-use of referenced outputs) is checked natively.

mod report;
mod shapes;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

pub use report::{ConstraintKind, ValidationReport, Violation};
pub use shapes::{load_shapes, shapes_graph, Constraint, PropertyPath, Shape, ShapeError, SHAPES_TTL};

use crate::rdf::{Graph, Iri, Term};
use crate::schema::SchemaSet;
use crate::vocab::{self, ds, xsd};

fn focus_string(term: &Term) -> String {
    match term {
        Term::Iri(i) => i.as_str().to_owned(),
        other => other.to_string(),
    }
}

fn violation(focus: &Term, kind: ConstraintKind, path: Option<&Iri>, message: String) -> Violation {
    Violation {
        focus_node: focus_string(focus),
        kind,
        path: path.map(|p| p.as_str().to_owned()),
        message,
    }
}

/// The `hasNextTask` graph of a pipeline plus its task set.
struct Chain {
    pipeline: Option<Term>,
    tasks: BTreeSet<Term>,
    next: BTreeMap<Term, Vec<Term>>,
}

impl Chain {
    fn new(graph: &Graph, schema: &SchemaSet) -> (Self, Vec<Violation>) {
        let mut violations = Vec::new();
        let pipelines = typed_nodes(graph, schema, &ds("Pipeline"));
        let pipeline = match pipelines.len() {
            0 => {
                violations.push(violation(
                    &Term::Iri(ds("Pipeline")),
                    ConstraintKind::PipelineStructure,
                    None,
                    "graph contains no ds:Pipeline individual".into(),
                ));
                None
            }
            1 => pipelines.first().cloned(),
            n => {
                for p in &pipelines {
                    violations.push(violation(
                        p,
                        ConstraintKind::PipelineStructure,
                        None,
                        format!("graph contains {n} ds:Pipeline individuals; expected exactly one"),
                    ));
                }
                None
            }
        };
        let tasks: BTreeSet<Term> = typed_nodes(graph, schema, &ds("AtomicTask")).into_iter().collect();
        let mut next: BTreeMap<Term, Vec<Term>> = BTreeMap::new();
        for t in graph.match_pattern(&crate::rdf::TriplePattern::new(None, Some(ds("hasNextTask")), None)) {
            next.entry(t.subject).or_default().push(t.object);
        }
        (
            Chain {
                pipeline,
                tasks,
                next,
            },
            violations,
        )
    }

    fn successors(&self, node: &Term) -> &[Term] {
        self.next.get(node).map(Vec::as_slice).unwrap_or_default()
    }

    /// Nodes reachable from `start` through one or more edges.
    fn descendants(&self, start: &Term) -> BTreeSet<Term> {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<&Term> = self.successors(start).iter().collect();
        while let Some(n) = queue.pop_front() {
            if seen.insert(n.clone()) {
                queue.extend(self.successors(n));
            }
        }
        seen
    }

    /// Strict predecessors of every task.
    fn ancestors(&self) -> BTreeMap<Term, BTreeSet<Term>> {
        let mut out: BTreeMap<Term, BTreeSet<Term>> = BTreeMap::new();
        for task in &self.tasks {
            for d in self.descendants(task) {
                out.entry(d).or_default().insert(task.clone());
            }
        }
        out
    }

    fn structure_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if let Some(p) = &self.pipeline {
            let reached = self.descendants(p);
            for task in &self.tasks {
                if !reached.contains(task) {
                    out.push(violation(
                        task,
                        ConstraintKind::PipelineStructure,
                        Some(&ds("hasNextTask")),
                        "task is not reachable from the pipeline through ds:hasNextTask".into(),
                    ));
                }
            }
        }
        for task in self.cycle_entries() {
            out.push(violation(
                &task,
                ConstraintKind::PipelineStructure,
                Some(&ds("hasNextTask")),
                "ds:hasNextTask chain contains a cycle".into(),
            ));
        }
        out
    }

    /// Targets of back edges found by an iterative depth-first search.
    fn cycle_entries(&self) -> BTreeSet<Term> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        let mut marks: BTreeMap<&Term, Mark> = BTreeMap::new();
        let mut found = BTreeSet::new();
        let roots = self.pipeline.iter().chain(self.next.keys());
        for root in roots {
            if marks.contains_key(root) {
                continue;
            }
            let mut stack: Vec<(&Term, usize)> = vec![(root, 0)];
            marks.insert(root, Mark::Active);
            while let Some((node, idx)) = stack.pop() {
                let succ = self.successors(node);
                if idx < succ.len() {
                    stack.push((node, idx + 1));
                    let child = &succ[idx];
                    match marks.get(child) {
                        Some(Mark::Active) => {
                            found.insert(child.clone());
                        }
                        Some(Mark::Done) => {}
                        None => {
                            marks.insert(child, Mark::Active);
                            stack.push((child, 0));
                        }
                    }
                } else {
                    marks.insert(node, Mark::Done);
                }
            }
        }
        found
    }
}

/// Nodes with an `rdf:type` that is a registered subclass of `class`.
fn typed_nodes(graph: &Graph, schema: &SchemaSet, class: &Iri) -> Vec<Term> {
    graph
        .subject_terms()
        .filter(|s| graph.types_of(s).iter().any(|t| schema.conforms_to(t, class)))
        .cloned()
        .collect()
}

/// Inputs must be a source column or a reference to an output of an
/// earlier task, never both.
fn binding_violations(graph: &Graph, chain: &Chain, ancestors: &BTreeMap<Term, BTreeSet<Term>>) -> Vec<Violation> {
    let mut producer: BTreeMap<&Term, &Term> = BTreeMap::new();
    let outputs: Vec<(Term, Term)> = chain
        .tasks
        .iter()
        .flat_map(|t| graph.objects(t, &ds("hasOutput")).map(move |o| (t.clone(), o.clone())))
        .collect();
    for (task, out) in &outputs {
        producer.insert(out, task);
    }
    let empty = BTreeSet::new();
    let mut out = Vec::new();
    for task in &chain.tasks {
        let before = ancestors.get(task).unwrap_or(&empty);
        for input in graph.objects(task, &ds("hasInput")) {
            let column = graph.object(input, &ds("hasSourceColumn"));
            let reference = graph.object(input, &ds("hasReference"));
            match (column, reference) {
                (Some(_), None) => {}
                (None, Some(target)) => {
                    let ok = producer.get(target).is_some_and(|p| before.contains(*p));
                    if !ok {
                        out.push(violation(
                            input,
                            ConstraintKind::PipelineStructure,
                            Some(&ds("hasReference")),
                            format!(
                                "input of {} references {}, which is not an output of an earlier task",
                                focus_string(task),
                                focus_string(target)
                            ),
                        ));
                    }
                }
                _ => out.push(violation(
                    input,
                    ConstraintKind::PipelineStructure,
                    None,
                    format!(
                        "input of {} needs exactly one of ds:hasSourceColumn or ds:hasReference",
                        focus_string(task)
                    ),
                )),
            }
        }
    }
    out
}

fn blank_node_violations(graph: &Graph) -> Vec<Violation> {
    let mut blanks = BTreeSet::new();
    for t in graph.iter() {
        for term in [t.subject, t.object] {
            if matches!(term, Term::BlankNode(_)) {
                blanks.insert(term);
            }
        }
    }
    blanks
        .iter()
        .map(|b| {
            violation(
                b,
                ConstraintKind::PipelineStructure,
                None,
                "blank nodes are not allowed in pipeline graphs".into(),
            )
        })
        .collect()
}

fn ordering_violations(
    graph: &Graph,
    schema: &SchemaSet,
    chain: &Chain,
    ancestors: &BTreeMap<Term, BTreeSet<Term>>,
    before: &Iri,
    after: &Iri,
) -> Vec<Violation> {
    let empty = BTreeSet::new();
    chain
        .tasks
        .iter()
        .filter(|t| graph.types_of(t).iter().any(|c| schema.conforms_to(c, after)))
        .filter(|t| {
            !ancestors
                .get(*t)
                .unwrap_or(&empty)
                .iter()
                .any(|a| graph.types_of(a).iter().any(|c| schema.conforms_to(c, before)))
        })
        .map(|t| {
            violation(
                t,
                ConstraintKind::OrderingRule,
                Some(&ds("hasNextTask")),
                format!("no {} precedes this {}", vocab::compact(before), vocab::compact(after)),
            )
        })
        .collect()
}

/// Cycle and ordering-rule violations of the task chain.
pub fn check_pipeline_order(graph: &Graph, schema: &SchemaSet) -> Vec<Violation> {
    let (chain, _) = Chain::new(graph, schema);
    let ancestors = chain.ancestors();
    let mut out: Vec<Violation> = chain
        .cycle_entries()
        .iter()
        .map(|t| {
            violation(
                t,
                ConstraintKind::PipelineStructure,
                Some(&ds("hasNextTask")),
                "ds:hasNextTask chain contains a cycle".into(),
            )
        })
        .collect();
    for shape in load_shapes(schema).unwrap_or_default() {
        for c in &shape.constraints {
            if let Constraint::OrderingRule { before, after } = c {
                out.extend(ordering_violations(graph, schema, &chain, &ancestors, before, after));
            }
        }
    }
    out.sort();
    out
}

/// Checks `graph` against `shapes`. Never fails: every problem is a report
/// entry.
pub fn validate(graph: &Graph, shapes: &[Shape], schema: &SchemaSet) -> ValidationReport {
    let (chain, mut violations) = Chain::new(graph, schema);
    let ancestors = chain.ancestors();
    violations.extend(chain.structure_violations());
    violations.extend(binding_violations(graph, &chain, &ancestors));
    violations.extend(blank_node_violations(graph));

    for shape in shapes {
        let focus_nodes = typed_nodes(graph, schema, &shape.target_class);
        for constraint in &shape.constraints {
            if let Constraint::OrderingRule { before, after } = constraint {
                violations.extend(ordering_violations(graph, schema, &chain, &ancestors, before, after));
                continue;
            }
            for focus in &focus_nodes {
                check(graph, schema, focus, constraint, &mut violations);
            }
        }
    }
    ValidationReport::from_violations(violations)
}

fn check(graph: &Graph, schema: &SchemaSet, focus: &Term, constraint: &Constraint, out: &mut Vec<Violation>) {
    match constraint {
        Constraint::PropertyCardinality { path, min, max } => {
            let n = path.values(graph, focus).len();
            let too_few = n < *min as usize;
            let too_many = max.is_some_and(|m| n > m as usize);
            if too_few || too_many {
                let bound = match max {
                    Some(m) if m == min => format!("exactly {min}"),
                    Some(m) if *min == 0 => format!("at most {m}"),
                    Some(m) => format!("between {min} and {m}"),
                    None => format!("at least {min}"),
                };
                out.push(violation(
                    focus,
                    ConstraintKind::PropertyCardinality,
                    Some(path.head()),
                    format!("expected {bound} value(s) for {}, found {n}", path.display()),
                ));
            }
        }
        Constraint::PropertyClass { path, class } => {
            for value in path.values(graph, focus) {
                if !is_instance_or_subclass(graph, schema, &value, class) {
                    out.push(violation(
                        focus,
                        ConstraintKind::PropertyClass,
                        Some(path.head()),
                        format!(
                            "value {} of {} is not a {}",
                            focus_string(&value),
                            path.display(),
                            vocab::compact(class)
                        ),
                    ));
                }
            }
        }
        Constraint::PropertyDatatype { path, datatype } => {
            for value in path.values(graph, focus) {
                let ok = value
                    .as_literal()
                    .is_some_and(|l| l.datatype() == datatype && xsd::lexical_ok(datatype.as_str(), l.lexical()));
                if !ok {
                    out.push(violation(
                        focus,
                        ConstraintKind::PropertyDatatype,
                        Some(path.head()),
                        format!(
                            "value {value} of {} is not a valid {}",
                            path.display(),
                            vocab::compact(datatype)
                        ),
                    ));
                }
            }
        }
        Constraint::CompatiblePair { path } => {
            let task_classes: Vec<Iri> = graph
                .types_of(focus)
                .into_iter()
                .filter(|c| schema.conforms_to(c, &ds("AtomicTask")))
                .collect();
            for method in graph.objects(focus, path) {
                let method_classes = graph.types_of(method);
                let ok = task_classes.iter().any(|t| {
                    schema.methods_for(t)
                        .is_some_and(|list| method_classes.iter().any(|m| list.contains(m)))
                });
                if !ok {
                    let tasks: Vec<String> = task_classes.iter().map(vocab::compact).collect();
                    let methods: Vec<String> = method_classes.iter().map(vocab::compact).collect();
                    out.push(violation(
                        focus,
                        ConstraintKind::CompatiblePair,
                        Some(path),
                        format!(
                            "method {} ({}) is not compatible with task class {}",
                            focus_string(method),
                            methods.join(", "),
                            tasks.join(", ")
                        ),
                    ));
                }
            }
        }
        Constraint::OrderingRule { .. } => {}
    }
}

/// A node satisfies `sh:class C` if one of its types is a subclass of C, or
/// if it is itself a registered class below C (structure and semantics
/// values are classes, not individuals).
fn is_instance_or_subclass(graph: &Graph, schema: &SchemaSet, value: &Term, class: &Iri) -> bool {
    let Term::Iri(iri) = value else { return false };
    schema.conforms_to(iri, class) || graph.types_of(value).iter().any(|t| schema.conforms_to(t, class))
}
