use std::collections::{BTreeMap, BTreeSet};

use exekg_core::schema::{SlotStructure, BUILTIN_SCHEMATA};
use exekg_core::vocab::{ds, ml, stats, visu};
use exekg_core::{parse_turtle, ClassKind, ExtensionDescriptor, Iri, MethodRegistry, SchemaSet, Term};

const RDFS_SUBCLASS: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

fn schema() -> SchemaSet {
    SchemaSet::load_builtin().unwrap()
}

/// Parent map read straight off the Turtle documents.
fn parents_from_documents() -> BTreeMap<String, String> {
    let sub = Iri::new(RDFS_SUBCLASS).unwrap();
    let mut parents = BTreeMap::new();
    for (_, text) in BUILTIN_SCHEMATA {
        let g = parse_turtle(text).unwrap();
        for t in g.iter().filter(|t| t.predicate == sub) {
            if let (Term::Iri(s), Term::Iri(o)) = (&t.subject, &t.object) {
                parents.insert(s.as_str().to_owned(), o.as_str().to_owned());
            }
        }
    }
    parents
}

fn reaches(parents: &BTreeMap<String, String>, from: &str, target: &str) -> bool {
    let mut cursor = Some(from);
    let mut steps = 0;
    while let Some(c) = cursor {
        if c == target {
            return true;
        }
        steps += 1;
        assert!(steps <= parents.len() + 1, "cycle through {from}");
        cursor = parents.get(c).map(String::as_str);
    }
    false
}

#[test]
fn loading_is_pure() {
    assert_eq!(schema(), schema());
}

#[test]
fn hierarchy_is_acyclic_and_matches_documents() {
    let s = schema();
    let parents = parents_from_documents();
    for info in s.classes() {
        let mut seen = BTreeSet::new();
        let mut cursor = Some(&info.iri);
        while let Some(c) = cursor {
            assert!(seen.insert(c.clone()), "cycle at {}", info.iri);
            cursor = s.class(c).and_then(|i| i.parent.as_ref());
        }
        assert_eq!(
            info.parent.as_ref().map(Iri::as_str),
            parents.get(info.iri.as_str()).map(String::as_str),
            "{}",
            info.iri
        );
    }
}

#[test]
fn catalog_is_the_strict_atomic_subtree() {
    let s = schema();
    let parents = parents_from_documents();
    let expected: BTreeSet<String> = parents
        .keys()
        .filter(|c| *c != ds("AtomicTask").as_str() && *c != ds("AtomicMethod").as_str())
        .filter(|c| {
            reaches(&parents, c, ds("AtomicTask").as_str()) || reaches(&parents, c, ds("AtomicMethod").as_str())
        })
        .cloned()
        .collect();
    let got: BTreeSet<String> = s.catalog_classes().map(|c| c.iri.as_str().to_owned()).collect();
    assert_eq!(got, expected);
}

#[test]
fn required_roster_is_present() {
    let s = schema();
    let roster = [
        ds("AtomicTask"),
        ds("AtomicMethod"),
        ds("Vector"),
        ds("Matrix"),
        ds("SingleValue"),
        ml("DataSplitting"),
        ml("Train"),
        ml("Classification"),
        ml("Regression"),
        ml("Clustering"),
        ml("Test"),
        ml("PerformanceCalculation"),
        ml("KNNMethod"),
        ml("LinearRegressionMethod"),
        ml("KMeansMethod"),
        ml("MLPMethod"),
        ml("MAEMethod"),
        ml("MAPEMethod"),
        ml("AccuracyMethod"),
        stats("Normalization"),
        stats("CentralTendency"),
        stats("PositionMeasure"),
        stats("FrequencyDistribution"),
        visu("CanvasTask"),
        visu("PlotTask"),
        visu("ScatterPlot"),
        visu("LinePlot"),
        visu("BoxPlot"),
        visu("Heatmap"),
    ];
    for iri in roster {
        assert!(s.class(&iri).is_some(), "{iri}");
    }
    assert!(s.is_subclass_of(&ml("Classification"), &ml("Train")).unwrap());
    assert!(s.is_subclass_of(&visu("ScatterPlot"), &visu("PlotTask")).unwrap());
    assert!(!s.is_subclass_of(&visu("CanvasTask"), &visu("PlotTask")).unwrap());
}

#[test]
fn compatible_methods_are_method_classes() {
    let s = schema();
    for task in s.catalog_classes().filter(|c| c.kind == ClassKind::Task) {
        let Some(methods) = s.methods_for(&task.iri) else { continue };
        for m in methods {
            let info = s.class(m).unwrap_or_else(|| panic!("{m} undeclared"));
            assert_eq!(info.kind, ClassKind::Method, "{m}");
            assert!(s.conforms_to(m, &ds("AtomicMethod")), "{m}");
        }
    }
}

#[test]
fn param_datatypes_are_supported() {
    let supported: BTreeSet<String> = ["string", "integer", "decimal", "float", "double", "boolean"]
        .iter()
        .map(|t| format!("{XSD}{t}"))
        .collect();
    let s = schema();
    for method in s.catalog_classes().filter(|c| c.kind == ClassKind::Method) {
        for p in s.params(&method.iri) {
            assert!(supported.contains(p.datatype.as_str()), "{} {}", method.iri, p.name);
            assert!(p.min <= p.max, "{} {}", method.iri, p.name);
            if let Some(d) = &p.default {
                assert_eq!(d.datatype(), &p.datatype);
                assert!(d.is_well_typed(), "{} default {}", p.name, d.lexical());
            }
        }
    }
}

#[test]
fn every_implementation_key_resolves() {
    let s = schema();
    let registry = MethodRegistry::with_builtins();
    let mut checked = 0;
    let mut schema_only = Vec::new();
    for task in s.catalog_classes().filter(|c| c.kind == ClassKind::Task) {
        for m in s.compatible_methods(&task.iri).unwrap_or_default() {
            if s.is_schema_only(m) {
                schema_only.push(m.clone());
                continue;
            }
            let key = s.implementation(m).unwrap_or_else(|| panic!("{m} has no implementation key"));
            assert!(registry.contains(key), "{m} -> {key}");
            checked += 1;
        }
    }
    assert!(checked >= 15, "{checked}");
    assert!(schema_only.iter().all(|m| m == &ml("MLPMethod")), "{schema_only:?}");
    assert!(!schema_only.is_empty());
}

#[test]
fn concrete_tasks_declare_slots() {
    let s = schema();
    for task in s.catalog_classes().filter(|c| c.kind == ClassKind::Task) {
        if s.compatible_methods(&task.iri).is_err() || task.iri == visu("CanvasTask") {
            continue;
        }
        let io = s.io_spec(&task.iri).unwrap();
        assert!(!io.inputs.is_empty(), "{}", task.iri);
        let names: BTreeSet<&str> = io.inputs.iter().map(|x| x.name.as_str()).collect();
        for out in &io.outputs {
            if let SlotStructure::SameAs(from) = &out.structure {
                assert!(names.contains(from.as_str()), "{} {}", task.iri, out.name);
            }
        }
        let indices: Vec<u32> = io.inputs.iter().map(|x| x.index).collect();
        assert!(indices.windows(2).all(|w| w[0] < w[1]), "{}", task.iri);
    }
}

#[test]
fn extension_returns_new_set() {
    let base = schema();
    let desc = ExtensionDescriptor::from_toml(
        r#"
method_class = "http://example.org/ext#RobustScaler"
parent_task_class = "stats:Normalization"
implementation = "robust"
"#,
    )
    .unwrap();
    let ext = base.register_extension(&desc).unwrap();
    let method = desc.method_iri().unwrap();
    assert!(base.class(&method).is_none());
    assert!(ext.methods_for(&stats("Normalization")).unwrap().contains(&method));
    assert_eq!(base, schema());
    // Registering twice is rejected.
    assert!(ext.register_extension(&desc).is_err());
}
