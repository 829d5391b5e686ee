//! The shipped KG schemata and the indices derived from them: class
//! hierarchy, task/method compatibility, method parameters and task
//! input/output slots.
//!
//! Everything is read from Turtle data (`data/*.ttl`), so a registered
//! extension is just more triples merged into the same indices.

mod extension;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

pub use extension::{ExtensionDescriptor, ParamDescriptor, SlotDescriptor};

use crate::rdf::{parse_turtle, Graph, Iri, Literal, RdfError, Term};
use crate::vocab::{self, ds, owl, rdf_type, rdfs, xsd};

const DS_TTL: &str = include_str!("../../data/ds.ttl");
const ML_TTL: &str = include_str!("../../data/ml.ttl");
const STATS_TTL: &str = include_str!("../../data/stats.ttl");
const VISU_TTL: &str = include_str!("../../data/visu.ttl");

/// The embedded schema documents, keyed by prefix.
pub const BUILTIN_SCHEMATA: &[(&str, &str)] = &[
    ("ds", DS_TTL),
    ("ml", ML_TTL),
    ("stats", STATS_TTL),
    ("visu", VISU_TTL),
];

/// Graph key under which registered extensions accumulate.
pub const EXTENSION_GRAPH: &str = "ext";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("failed to parse schema '{name}': {source}")]
    Parse { name: String, source: RdfError },
    #[error("invalid schema: {0}")]
    Invalid(String),
    #[error("unknown class <{0}>")]
    UnknownClass(Iri),
    #[error("class <{0}> is already registered")]
    DuplicateClass(Iri),
    #[error("unknown or unsuitable parent class <{0}>")]
    UnknownParent(Iri),
    #[error("malformed extension descriptor: {0}")]
    Descriptor(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Task,
    Method,
    DataSemantics,
    DataStructure,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassInfo {
    pub iri: Iri,
    pub parent: Option<Iri>,
    pub kind: ClassKind,
    pub label: String,
}

/// A method parameter: a datatype property whose domain is the method class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParamSpec {
    pub property: Iri,
    pub name: String,
    pub datatype: Iri,
    pub min: u32,
    pub max: u32,
    #[serde(serialize_with = "serialize_default")]
    pub default: Option<Literal>,
}

fn serialize_default<S: serde::Serializer>(
    value: &Option<Literal>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match value {
        Some(lit) => s.serialize_some(lit.lexical()),
        None => s.serialize_none(),
    }
}

/// Structure requirement of a slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotStructure {
    /// Bound entities must have a structure that is a subclass of this one.
    Class(Iri),
    /// Output takes the structure of the named input slot.
    SameAs(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlotSpec {
    pub name: String,
    pub index: u32,
    pub structure: SlotStructure,
    pub optional: bool,
}

/// Input and output slots of a task class, in slot-index order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IoSpec {
    pub inputs: Vec<SlotSpec>,
    pub outputs: Vec<SlotSpec>,
}

impl IoSpec {
    pub fn required_inputs(&self) -> usize {
        self.inputs.iter().filter(|s| !s.optional).count()
    }

    pub fn input(&self, name: &str) -> Option<&SlotSpec> {
        self.inputs.iter().find(|s| s.name == name)
    }

    pub fn output(&self, name: &str) -> Option<&SlotSpec> {
        self.outputs.iter().find(|s| s.name == name)
    }
}

/// Parsed schemata plus derived indices. Immutable once built; extending
/// returns a new value.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaSet {
    graphs: BTreeMap<String, Graph>,
    merged: Graph,
    classes: BTreeMap<Iri, ClassInfo>,
    children: BTreeMap<Iri, Vec<Iri>>,
    compat: BTreeMap<Iri, Vec<Iri>>,
    params: BTreeMap<Iri, Vec<ParamSpec>>,
    io_specs: BTreeMap<Iri, IoSpec>,
    implementations: BTreeMap<Iri, String>,
    schema_only: BTreeSet<Iri>,
}

impl SchemaSet {
    /// Parses the four embedded schemata and checks the registry invariants.
    pub fn load_builtin() -> Result<Self, SchemaError> {
        let mut graphs = BTreeMap::new();
        for (name, text) in BUILTIN_SCHEMATA {
            let graph = parse_turtle(text).map_err(|source| SchemaError::Parse {
                name: (*name).to_owned(),
                source,
            })?;
            graphs.insert((*name).to_owned(), graph);
        }
        Self::from_graphs(graphs)
    }

    /// Builds the indices from a set of schema graphs.
    pub fn from_graphs(graphs: BTreeMap<String, Graph>) -> Result<Self, SchemaError> {
        let mut merged = Graph::with_standard_prefixes();
        for graph in graphs.values() {
            merged.merge(graph);
        }
        let mut schema = SchemaSet {
            graphs,
            merged,
            classes: BTreeMap::new(),
            children: BTreeMap::new(),
            compat: BTreeMap::new(),
            params: BTreeMap::new(),
            io_specs: BTreeMap::new(),
            implementations: BTreeMap::new(),
            schema_only: BTreeSet::new(),
        };
        schema.index_classes()?;
        schema.index_methods()?;
        schema.index_params()?;
        schema.index_slots()?;
        schema.check_invariants()?;
        Ok(schema)
    }

    fn index_classes(&mut self) -> Result<(), SchemaError> {
        let g = &self.merged;
        let mut parents = BTreeMap::new();
        for class in g.instances_of(&owl("Class")) {
            let Term::Iri(iri) = class else {
                return Err(SchemaError::Invalid(format!("class {class} is not an IRI")));
            };
            let supers: Vec<&Term> = g.objects(&Term::Iri(iri.clone()), &rdfs("subClassOf")).collect();
            let parent = match supers.as_slice() {
                [] => None,
                [Term::Iri(p)] if *p == owl("Thing") => None,
                [Term::Iri(p)] => Some(p.clone()),
                _ => {
                    return Err(SchemaError::Invalid(format!(
                        "class <{iri}> must have at most one IRI superclass"
                    )))
                }
            };
            parents.insert(iri, parent);
        }
        for (iri, parent) in &parents {
            if let Some(p) = parent {
                if !parents.contains_key(p) {
                    return Err(SchemaError::Invalid(format!(
                        "class <{iri}> has undeclared parent <{p}>"
                    )));
                }
                self.children.entry(p.clone()).or_default().push(iri.clone());
            }
        }
        // Walk each chain to its root, rejecting cycles.
        for iri in parents.keys() {
            let mut seen = BTreeSet::new();
            let mut cursor = Some(iri);
            while let Some(c) = cursor {
                if !seen.insert(c) {
                    return Err(SchemaError::Invalid(format!(
                        "cyclic rdfs:subClassOf chain through <{c}>"
                    )));
                }
                cursor = parents[c].as_ref();
            }
        }
        let ancestor = |start: &Iri, target: &Iri| -> bool {
            let mut cursor = Some(start);
            while let Some(c) = cursor {
                if c == target {
                    return true;
                }
                cursor = parents[c].as_ref();
            }
            false
        };
        for (iri, parent) in &parents {
            let kind = if ancestor(iri, &ds("Task")) {
                ClassKind::Task
            } else if ancestor(iri, &ds("Method")) {
                ClassKind::Method
            } else if ancestor(iri, &ds("DataSemantics")) {
                ClassKind::DataSemantics
            } else if ancestor(iri, &ds("DataStructure")) {
                ClassKind::DataStructure
            } else {
                ClassKind::Other
            };
            let label = g
                .object(&Term::Iri(iri.clone()), &rdfs("label"))
                .and_then(Term::as_literal)
                .map(|l| l.lexical().to_owned())
                .unwrap_or_else(|| iri.local_name().to_owned());
            self.classes.insert(
                iri.clone(),
                ClassInfo {
                    iri: iri.clone(),
                    parent: parent.clone(),
                    kind,
                    label,
                },
            );
        }
        Ok(())
    }

    fn index_methods(&mut self) -> Result<(), SchemaError> {
        let g = &self.merged;
        for triple in g.match_pattern(&crate::rdf::TriplePattern::new(
            None,
            Some(ds("hasCompatibleMethod")),
            None,
        )) {
            let (Term::Iri(task), Term::Iri(method)) = (&triple.subject, &triple.object) else {
                return Err(SchemaError::Invalid(format!("malformed compatibility triple {triple}")));
            };
            self.compat.entry(task.clone()).or_default().push(method.clone());
        }
        for iri in self.classes.keys() {
            let subject = Term::Iri(iri.clone());
            if let Some(lit) = g.object(&subject, &ds("hasImplementation")).and_then(Term::as_literal) {
                self.implementations.insert(iri.clone(), lit.lexical().to_owned());
            }
            if g
                .object(&subject, &ds("isSchemaOnly"))
                .and_then(Term::as_literal)
                .and_then(Literal::as_bool)
                == Some(true)
            {
                self.schema_only.insert(iri.clone());
            }
        }
        Ok(())
    }

    fn index_params(&mut self) -> Result<(), SchemaError> {
        let g = &self.merged;
        for prop in g.instances_of(&owl("DatatypeProperty")) {
            let Term::Iri(property) = &prop else { continue };
            for domain in g.objects(&prop, &rdfs("domain")) {
                let Term::Iri(domain) = domain else { continue };
                if self.classes.get(domain).map(|c| c.kind) != Some(ClassKind::Method) {
                    continue;
                }
                let literal = |p: &str| g.object(&prop, &ds(p)).and_then(Term::as_literal);
                let card = |p: &str, fallback: u32| -> Result<u32, SchemaError> {
                    match literal(p) {
                        None => Ok(fallback),
                        Some(l) => l.as_i64().and_then(|v| u32::try_from(v).ok()).ok_or_else(|| {
                            SchemaError::Invalid(format!("bad cardinality on <{property}>"))
                        }),
                    }
                };
                let datatype = g
                    .object(&prop, &rdfs("range"))
                    .and_then(Term::as_iri)
                    .cloned()
                    .ok_or_else(|| SchemaError::Invalid(format!("parameter <{property}> has no range")))?;
                let name = g
                    .object(&prop, &rdfs("label"))
                    .and_then(Term::as_literal)
                    .map(|l| l.lexical().to_owned())
                    .unwrap_or_else(|| property.local_name().to_owned());
                let spec = ParamSpec {
                    property: property.clone(),
                    name,
                    datatype,
                    min: card("hasMinCardinality", 0)?,
                    max: card("hasMaxCardinality", 1)?,
                    default: literal("hasDefaultValue").cloned(),
                };
                self.params.entry(domain.clone()).or_default().push(spec);
            }
        }
        for specs in self.params.values_mut() {
            specs.sort_by(|a, b| a.name.cmp(&b.name));
        }
        Ok(())
    }

    fn index_slots(&mut self) -> Result<(), SchemaError> {
        let g = &self.merged;
        for (task, info) in &self.classes {
            if info.kind != ClassKind::Task {
                continue;
            }
            let subject = Term::Iri(task.clone());
            let mut spec = IoSpec::default();
            for (prop, bucket) in [("hasInputSlot", &mut spec.inputs), ("hasOutputSlot", &mut spec.outputs)] {
                for slot in g.objects(&subject, &ds(prop)) {
                    bucket.push(read_slot(g, slot)?);
                }
                bucket.sort_by_key(|s| s.index);
            }
            if !spec.inputs.is_empty() || !spec.outputs.is_empty() {
                self.io_specs.insert(task.clone(), spec);
            }
        }
        Ok(())
    }

    fn check_invariants(&self) -> Result<(), SchemaError> {
        let invalid = |msg: String| Err(SchemaError::Invalid(msg));
        for required in ["Data", "DataSemantics", "DataStructure", "DataEntity", "Method", "AtomicMethod", "Task", "AtomicTask", "Pipeline"] {
            if !self.classes.contains_key(&ds(required)) {
                return invalid(format!("missing upper-level class ds:{required}"));
            }
        }
        let mut task_children = self.children.get(&ds("Task")).cloned().unwrap_or_default();
        task_children.sort();
        if task_children != vec![ds("AtomicTask"), ds("Pipeline")] {
            return invalid("ds:Task must have exactly the sub-classes ds:AtomicTask and ds:Pipeline".into());
        }
        for info in self.classes.values() {
            let upper = info.iri.as_str().starts_with(vocab::DS_NS);
            match info.kind {
                ClassKind::Task if !upper && !self.subclass(&info.iri, &ds("AtomicTask")) => {
                    return invalid(format!("task class <{}> is not an atomic task", info.iri));
                }
                ClassKind::Method if !upper && !self.subclass(&info.iri, &ds("AtomicMethod")) => {
                    return invalid(format!("method class <{}> is not an atomic method", info.iri));
                }
                ClassKind::Task
                    if !upper
                        && !self.children.contains_key(&info.iri)
                        && !self.compat.contains_key(&info.iri) =>
                {
                    return invalid(format!("concrete task class <{}> has no compatible methods", info.iri));
                }
                _ => {}
            }
        }
        for (task, methods) in &self.compat {
            if !self.subclass(task, &ds("AtomicTask")) {
                return invalid(format!("<{task}> declares methods but is not an atomic task"));
            }
            for m in methods {
                if !self.subclass(m, &ds("AtomicMethod")) {
                    return invalid(format!("<{m}> is not an atomic method"));
                }
                if !self.implementations.contains_key(m) {
                    return invalid(format!("method <{m}> has no implementation key"));
                }
            }
        }
        for (method, specs) in &self.params {
            for spec in specs {
                if !xsd::SUPPORTED.contains(&spec.datatype.as_str()) {
                    return invalid(format!("parameter <{}> has unsupported datatype", spec.property));
                }
                if spec.min > spec.max {
                    return invalid(format!("parameter <{}> has min > max", spec.property));
                }
                if let Some(default) = &spec.default {
                    if default.datatype() != &spec.datatype || !default.is_well_typed() {
                        return invalid(format!("default of <{}> does not match its datatype", spec.property));
                    }
                }
            }
            let mut names: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
            names.dedup();
            if names.len() != specs.len() {
                return invalid(format!("duplicate parameter names on <{method}>"));
            }
        }
        for (task, spec) in &self.io_specs {
            let mut names = BTreeSet::new();
            for slot in spec.inputs.iter().chain(&spec.outputs) {
                if !names.insert(slot.name.as_str()) {
                    return invalid(format!("duplicate slot '{}' on <{task}>", slot.name));
                }
                match &slot.structure {
                    SlotStructure::Class(c) if !self.subclass(c, &ds("DataStructure")) => {
                        return invalid(format!("slot '{}' on <{task}> has non-structure class", slot.name));
                    }
                    SlotStructure::SameAs(src) if spec.input(src).is_none() => {
                        return invalid(format!("slot '{}' on <{task}> copies unknown input '{src}'", slot.name));
                    }
                    _ => {}
                }
            }
        }
        let mut labels = BTreeSet::new();
        for info in self.classes.values() {
            if matches!(info.kind, ClassKind::Task | ClassKind::Method) && !labels.insert((info.kind, info.label.as_str())) {
                return invalid(format!("duplicate {:?} label '{}'", info.kind, info.label));
            }
        }
        Ok(())
    }

    fn subclass(&self, sub: &Iri, sup: &Iri) -> bool {
        let mut cursor = Some(sub);
        while let Some(c) = cursor {
            if c == sup {
                return true;
            }
            cursor = self.classes.get(c).and_then(|i| i.parent.as_ref());
        }
        false
    }

    /// Reflexive-transitive `rdfs:subClassOf`.
    pub fn is_subclass_of(&self, sub: &Iri, sup: &Iri) -> Result<bool, SchemaError> {
        for iri in [sub, sup] {
            if !self.classes.contains_key(iri) {
                return Err(SchemaError::UnknownClass(iri.clone()));
            }
        }
        Ok(self.subclass(sub, sup))
    }

    /// Like [`Self::is_subclass_of`] but false for unregistered classes.
    pub fn conforms_to(&self, sub: &Iri, sup: &Iri) -> bool {
        self.classes.contains_key(sub) && self.subclass(sub, sup)
    }

    /// Methods declared compatible with a concrete task class, in schema
    /// order.
    pub fn compatible_methods(&self, task_class: &Iri) -> Result<&[Iri], SchemaError> {
        self.compat
            .get(task_class)
            .map(Vec::as_slice)
            .ok_or_else(|| SchemaError::UnknownClass(task_class.clone()))
    }

    /// Methods of the nearest class (self first) that declares any; `None`
    /// for abstract or unknown task classes.
    pub fn methods_for(&self, task_class: &Iri) -> Option<&[Iri]> {
        let mut cursor = Some(task_class);
        while let Some(c) = cursor {
            if let Some(list) = self.compat.get(c) {
                return Some(list);
            }
            cursor = self.classes.get(c).and_then(|i| i.parent.as_ref());
        }
        None
    }

    pub fn class(&self, iri: &Iri) -> Option<&ClassInfo> {
        self.classes.get(iri)
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassInfo> {
        self.classes.values()
    }

    /// Strict sub-classes of `ds:AtomicTask` and `ds:AtomicMethod`: the
    /// classes a pipeline author picks from.
    pub fn catalog_classes(&self) -> impl Iterator<Item = &ClassInfo> {
        let task = ds("AtomicTask");
        let method = ds("AtomicMethod");
        self.classes.values().filter(move |c| {
            c.iri != task && c.iri != method && (self.subclass(&c.iri, &task) || self.subclass(&c.iri, &method))
        })
    }

    pub fn direct_subclasses(&self, iri: &Iri) -> &[Iri] {
        self.children.get(iri).map(Vec::as_slice).unwrap_or_default()
    }

    /// Parameters of a method class (empty for unknown classes).
    pub fn params(&self, method_class: &Iri) -> &[ParamSpec] {
        self.params.get(method_class).map(Vec::as_slice).unwrap_or_default()
    }

    /// Slots of a task class, inherited from the nearest ancestor that
    /// declares any.
    pub fn io_spec(&self, task_class: &Iri) -> Result<IoSpec, SchemaError> {
        let info = self
            .classes
            .get(task_class)
            .filter(|c| c.kind == ClassKind::Task)
            .ok_or_else(|| SchemaError::UnknownClass(task_class.clone()))?;
        let mut cursor = Some(&info.iri);
        while let Some(c) = cursor {
            if let Some(spec) = self.io_specs.get(c) {
                return Ok(spec.clone());
            }
            cursor = self.classes.get(c).and_then(|i| i.parent.as_ref());
        }
        Ok(IoSpec::default())
    }

    pub fn implementation(&self, method_class: &Iri) -> Option<&str> {
        self.implementations.get(method_class).map(String::as_str)
    }

    /// Methods that exist in the schema only and have no executable
    /// implementation.
    pub fn is_schema_only(&self, method_class: &Iri) -> bool {
        self.schema_only.contains(method_class)
    }

    /// Every (method class, implementation key) pair referenced by the
    /// compatibility table.
    pub fn implementation_keys(&self) -> BTreeMap<&Iri, &str> {
        self.compat
            .values()
            .flatten()
            .filter_map(|m| self.implementations.get_key_value(m))
            .map(|(k, v)| (k, v.as_str()))
            .collect()
    }

    pub fn graphs(&self) -> &BTreeMap<String, Graph> {
        &self.graphs
    }

    /// Union of all schema graphs.
    pub fn merged(&self) -> &Graph {
        &self.merged
    }

    /// Returns a new schema set with the descriptor's classes added.
    pub fn register_extension(&self, desc: &ExtensionDescriptor) -> Result<SchemaSet, SchemaError> {
        let triples = desc.to_triples(self)?;
        let mut graphs = self.graphs.clone();
        let ext = graphs.entry(EXTENSION_GRAPH.to_owned()).or_default();
        ext.extend(triples);
        SchemaSet::from_graphs(graphs)
    }
}

fn read_slot(g: &Graph, slot: &Term) -> Result<SlotSpec, SchemaError> {
    let lit = |p: &str| g.object(slot, &ds(p)).and_then(Term::as_literal);
    let name = lit("hasSlotName")
        .map(|l| l.lexical().to_owned())
        .ok_or_else(|| SchemaError::Invalid(format!("slot {slot} has no name")))?;
    let index = lit("hasSlotIndex")
        .and_then(Literal::as_i64)
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| SchemaError::Invalid(format!("slot {slot} has no index")))?;
    let structure = match (
        g.object(slot, &ds("hasSlotStructure")).and_then(Term::as_iri),
        lit("hasSlotStructureFrom"),
    ) {
        (Some(class), None) => SlotStructure::Class(class.clone()),
        (None, Some(from)) => SlotStructure::SameAs(from.lexical().to_owned()),
        _ => {
            return Err(SchemaError::Invalid(format!(
                "slot {slot} needs exactly one of a structure class or a source slot"
            )))
        }
    };
    let optional = lit("isOptional").and_then(Literal::as_bool).unwrap_or(false);
    if g.object(slot, &rdf_type()).and_then(Term::as_iri) != Some(&ds("IoSlot")) {
        return Err(SchemaError::Invalid(format!("slot {slot} is not typed ds:IoSlot")));
    }
    Ok(SlotSpec {
        name,
        index,
        structure,
        optional,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::{ml, stats, visu};

    fn schema() -> SchemaSet {
        SchemaSet::load_builtin().expect("builtin schemata load")
    }

    #[test]
    fn classification_is_atomic_task() {
        let s = schema();
        assert!(s.is_subclass_of(&ml("Classification"), &ds("AtomicTask")).unwrap());
        assert!(s.is_subclass_of(&ml("KNNMethod"), &ds("AtomicMethod")).unwrap());
        assert!(!s.is_subclass_of(&ds("AtomicTask"), &ml("Classification")).unwrap());
        assert!(s.is_subclass_of(&ml("Train"), &ml("Train")).unwrap());
    }

    #[test]
    fn unknown_class_errors() {
        let s = schema();
        let bogus = Iri::new("http://ex.org/Nope").unwrap();
        assert_eq!(
            s.is_subclass_of(&bogus, &ds("Task")),
            Err(SchemaError::UnknownClass(bogus.clone()))
        );
        assert_eq!(s.compatible_methods(&bogus), Err(SchemaError::UnknownClass(bogus)));
        assert!(matches!(
            s.compatible_methods(&ds("Pipeline")),
            Err(SchemaError::UnknownClass(_))
        ));
    }

    #[test]
    fn compat_table_from_fixture() {
        let s = schema();
        assert_eq!(s.compatible_methods(&ml("DataSplitting")).unwrap(), &[ml("TrainTestSplitMethod")]);
        assert_eq!(s.compatible_methods(&visu("CanvasTask")).unwrap(), &[visu("CanvasMethod")]);
        assert!(s.compatible_methods(&ml("Classification")).unwrap().contains(&ml("KNNMethod")));
    }

    #[test]
    fn required_roster_present() {
        let s = schema();
        let ds_classes = ["Data", "DataSemantics", "DataStructure", "Vector", "Matrix", "SingleValue", "TimeSeries", "Method", "AtomicMethod", "Task", "AtomicTask", "Pipeline", "DataEntity"];
        for c in ds_classes {
            assert!(s.class(&ds(c)).is_some(), "ds:{c}");
        }
        let pairs = [
            (ml("DataSplitting"), ml("TrainTestSplitMethod")),
            (ml("Regression"), ml("LinearRegressionMethod")),
            (ml("Classification"), ml("KNNMethod")),
            (ml("Clustering"), ml("KMeansMethod")),
            (ml("PerformanceCalculation"), ml("MAEMethod")),
            (ml("PerformanceCalculation"), ml("MAPEMethod")),
            (ml("PerformanceCalculation"), ml("AccuracyMethod")),
            (stats("CentralTendency"), stats("MedianMethod")),
            (stats("CentralTendency"), stats("MeanMethod")),
            (stats("PositionMeasure"), stats("PercentileMethod")),
            (stats("FrequencyDistribution"), stats("GroupedFrequencyMethod")),
            (stats("Normalization"), stats("MinMaxMethod")),
            (stats("Normalization"), stats("ZScoreMethod")),
            (visu("CanvasTask"), visu("CanvasMethod")),
        ];
        for (task, method) in pairs {
            assert!(s.compatible_methods(&task).unwrap().contains(&method), "{task} / {method}");
        }
        for t in ["Train", "Test"] {
            assert!(s.class(&ml(t)).is_some());
        }
        for plot in ["ScatterPlot", "LinePlot", "BoxPlot", "Heatmap"] {
            assert!(s.is_subclass_of(&visu(plot), &visu("PlotTask")).unwrap());
        }
    }

    #[test]
    fn task_has_exactly_two_direct_subclasses() {
        let s = schema();
        let mut kids = s.direct_subclasses(&ds("Task")).to_vec();
        kids.sort();
        assert_eq!(kids, vec![ds("AtomicTask"), ds("Pipeline")]);
    }

    #[test]
    fn params_and_io_specs() {
        let s = schema();
        let knn = s.params(&ml("KNNMethod"));
        assert_eq!(knn.len(), 1);
        assert_eq!(knn[0].name, "k");
        assert_eq!(knn[0].datatype.as_str(), xsd::INTEGER);
        assert_eq!(knn[0].default.as_ref().unwrap().as_i64(), Some(3));

        let mlp = s.params(&ml("MLPMethod"));
        assert_eq!(mlp[0].name, "batch_size");
        assert!(s.is_schema_only(&ml("MLPMethod")));

        // Classification inherits Train's slots.
        let io = s.io_spec(&ml("Classification")).unwrap();
        assert_eq!(io.required_inputs(), 2);
        assert_eq!(io.inputs.len(), 3);
        assert_eq!(io.outputs.len(), 1);
        assert_eq!(io.outputs[0].structure, SlotStructure::Class(ds("SingleValue")));
        assert!(s.io_spec(&visu("CanvasTask")).unwrap().inputs.is_empty());
    }

    #[test]
    fn loading_is_pure() {
        assert_eq!(schema(), schema());
    }

    #[test]
    fn every_method_has_an_implementation_key() {
        let s = schema();
        for methods in s.compat.values() {
            for m in methods {
                assert!(s.implementation(m).is_some(), "{m}");
            }
        }
    }

    #[test]
    fn param_datatypes_supported() {
        let s = schema();
        for methods in s.compat.values() {
            for m in methods {
                for p in s.params(m) {
                    assert!(xsd::SUPPORTED.contains(&p.datatype.as_str()));
                }
            }
        }
    }

    #[test]
    fn catalog_excludes_upper_level() {
        let s = schema();
        let iris: Vec<_> = s.catalog_classes().map(|c| c.iri.clone()).collect();
        assert!(!iris.contains(&ds("AtomicTask")));
        assert!(!iris.contains(&ds("Pipeline")));
        assert!(iris.contains(&visu("PlotTask")));
        assert!(iris.contains(&ml("KNNMethod")));
    }
}
