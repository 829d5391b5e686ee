use serde::Deserialize;

use super::{ClassKind, SchemaError, SchemaSet};
use crate::rdf::{Iri, Literal, Triple};
use crate::vocab::{self, ds, owl, rdf_type, rdfs};

/// A new method class (and optionally a new task class) to add to a
/// [`SchemaSet`]. Read from TOML; class and datatype fields accept either
/// absolute IRIs or reserved-prefix CURIEs such as `stats:Normalization`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionDescriptor {
    pub method_class: String,
    #[serde(default)]
    pub method_label: Option<String>,
    /// Existing task class. Without `task_class` the method becomes
    /// compatible with this class directly; with it, this is the parent of
    /// the new task class.
    pub parent_task_class: String,
    #[serde(default)]
    pub task_class: Option<String>,
    #[serde(default)]
    pub task_label: Option<String>,
    /// Key in the executor's dispatch table.
    pub implementation: String,
    #[serde(default)]
    pub params: Vec<ParamDescriptor>,
    #[serde(default)]
    pub inputs: Vec<SlotDescriptor>,
    #[serde(default)]
    pub outputs: Vec<SlotDescriptor>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamDescriptor {
    pub name: String,
    pub property: String,
    pub datatype: String,
    #[serde(default)]
    pub min: u32,
    #[serde(default = "one")]
    pub max: u32,
    #[serde(default)]
    pub default: Option<String>,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotDescriptor {
    pub name: String,
    #[serde(default)]
    pub structure: Option<String>,
    /// Output only: copy the structure of this input slot.
    #[serde(default)]
    pub same_as: Option<String>,
    #[serde(default)]
    pub optional: bool,
}

fn resolve(text: &str) -> Result<Iri, SchemaError> {
    vocab::expand(text).ok_or_else(|| SchemaError::Descriptor(format!("'{text}' is not an IRI")))
}

impl ExtensionDescriptor {
    pub fn from_toml(text: &str) -> Result<Self, SchemaError> {
        toml::from_str(text).map_err(|e| SchemaError::Descriptor(e.message().to_owned()))
    }

    pub fn from_file(path: impl AsRef<std::path::Path>) -> Result<Self, SchemaError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| SchemaError::Descriptor(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn method_iri(&self) -> Result<Iri, SchemaError> {
        resolve(&self.method_class)
    }

    /// The task class pipelines should instantiate to use the method.
    pub fn target_task_iri(&self) -> Result<Iri, SchemaError> {
        resolve(self.task_class.as_deref().unwrap_or(&self.parent_task_class))
    }

    pub(super) fn to_triples(&self, schema: &SchemaSet) -> Result<Vec<Triple>, SchemaError> {
        let method = self.method_iri()?;
        let parent = resolve(&self.parent_task_class)?;
        let task = self.task_class.as_deref().map(resolve).transpose()?;

        for class in std::iter::once(&method).chain(task.as_ref()) {
            if schema.class(class).is_some() {
                return Err(SchemaError::DuplicateClass(class.clone()));
            }
        }
        let parent_ok = schema
            .class(&parent)
            .is_some_and(|c| c.kind == ClassKind::Task && schema.subclass(&parent, &ds("AtomicTask")));
        if !parent_ok {
            return Err(SchemaError::UnknownParent(parent));
        }
        if task.is_none() && !(self.inputs.is_empty() && self.outputs.is_empty()) {
            return Err(SchemaError::Descriptor(
                "slots can only be declared together with a new task class".into(),
            ));
        }
        if self.implementation.trim().is_empty() {
            return Err(SchemaError::Descriptor("implementation key is empty".into()));
        }

        let mut out = Vec::new();
        let label = |iri: &Iri, text: &Option<String>| {
            Literal::string(text.clone().unwrap_or_else(|| iri.local_name().to_owned()))
        };
        out.push(Triple::iri(&method, &rdf_type(), owl("Class")));
        out.push(Triple::iri(&method, &rdfs("subClassOf"), ds("AtomicMethod")));
        out.push(Triple::iri(&method, &rdfs("label"), label(&method, &self.method_label)));
        out.push(Triple::iri(
            &method,
            &ds("hasImplementation"),
            Literal::string(self.implementation.clone()),
        ));

        let compat_owner = match &task {
            Some(t) => {
                out.push(Triple::iri(t, &rdf_type(), owl("Class")));
                out.push(Triple::iri(t, &rdfs("subClassOf"), parent.clone()));
                out.push(Triple::iri(t, &rdfs("label"), label(t, &self.task_label)));
                for (prop, slots) in [("hasInputSlot", &self.inputs), ("hasOutputSlot", &self.outputs)] {
                    for (index, slot) in slots.iter().enumerate() {
                        let node = Iri::new(format!("{t}_{}", slot.name))
                            .map_err(|e| SchemaError::Descriptor(e.to_string()))?;
                        out.push(Triple::iri(t, &ds(prop), node.clone()));
                        out.extend(slot_triples(&node, slot, index)?);
                    }
                }
                t.clone()
            }
            None => parent,
        };
        out.push(Triple::iri(&compat_owner, &ds("hasCompatibleMethod"), method.clone()));

        for param in &self.params {
            let property = resolve(&param.property)?;
            let datatype = resolve(&param.datatype)?;
            out.push(Triple::iri(&property, &rdf_type(), owl("DatatypeProperty")));
            out.push(Triple::iri(&property, &rdfs("label"), Literal::string(param.name.clone())));
            out.push(Triple::iri(&property, &rdfs("domain"), method.clone()));
            out.push(Triple::iri(&property, &rdfs("range"), datatype.clone()));
            out.push(Triple::iri(&property, &ds("hasMinCardinality"), Literal::integer(param.min.into())));
            out.push(Triple::iri(&property, &ds("hasMaxCardinality"), Literal::integer(param.max.into())));
            if let Some(default) = &param.default {
                let lit = Literal::new(default.clone(), datatype)
                    .map_err(|e| SchemaError::Descriptor(e.to_string()))?;
                out.push(Triple::iri(&property, &ds("hasDefaultValue"), lit));
            }
        }
        Ok(out)
    }
}

fn slot_triples(node: &Iri, slot: &SlotDescriptor, index: usize) -> Result<Vec<Triple>, SchemaError> {
    let mut out = vec![
        Triple::iri(node, &rdf_type(), ds("IoSlot")),
        Triple::iri(node, &ds("hasSlotName"), Literal::string(slot.name.clone())),
        Triple::iri(node, &ds("hasSlotIndex"), Literal::integer(index as i64)),
    ];
    match (&slot.structure, &slot.same_as) {
        (Some(s), None) => out.push(Triple::iri(node, &ds("hasSlotStructure"), resolve(s)?)),
        (None, Some(from)) => out.push(Triple::iri(
            node,
            &ds("hasSlotStructureFrom"),
            Literal::string(from.clone()),
        )),
        _ => {
            return Err(SchemaError::Descriptor(format!(
                "slot '{}' needs exactly one of `structure` or `same_as`",
                slot.name
            )))
        }
    }
    if slot.optional {
        out.push(Triple::iri(node, &ds("isOptional"), Literal::boolean(true)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::stats;

    const SCALER: &str = r#"
method_class = "http://example.org/ext#MyScalerMethod"
method_label = "My scaler"
parent_task_class = "stats:Normalization"
implementation = "my_scaler"

[[params]]
name = "factor"
property = "http://example.org/ext#hasFactor"
datatype = "xsd:double"
min = 0
max = 1
default = "2.0"
"#;

    #[test]
    fn register_under_existing_task() {
        let base = SchemaSet::load_builtin().unwrap();
        let desc = ExtensionDescriptor::from_toml(SCALER).unwrap();
        let method = desc.method_iri().unwrap();
        assert!(!base.compatible_methods(&stats("Normalization")).unwrap().contains(&method));

        let ext = base.register_extension(&desc).unwrap();
        assert!(ext.compatible_methods(&stats("Normalization")).unwrap().contains(&method));
        assert_eq!(ext.params(&method)[0].name, "factor");
        assert_eq!(ext.implementation(&method), Some("my_scaler"));
        // The original is untouched.
        assert!(base.class(&method).is_none());
    }

    #[test]
    fn duplicate_and_unknown_parent() {
        let base = SchemaSet::load_builtin().unwrap();
        let desc = ExtensionDescriptor::from_toml(SCALER).unwrap();
        let ext = base.register_extension(&desc).unwrap();
        let again = ext.register_extension(&desc);
        assert!(matches!(again, Err(SchemaError::DuplicateClass(_))));

        let mut orphan = desc.clone();
        orphan.method_class = "http://example.org/ext#Other".into();
        orphan.parent_task_class = "http://example.org/ext#Nope".into();
        assert!(matches!(base.register_extension(&orphan), Err(SchemaError::UnknownParent(_))));

        let mut not_task = desc;
        not_task.method_class = "http://example.org/ext#Other".into();
        not_task.parent_task_class = "ds:Vector".into();
        assert!(matches!(base.register_extension(&not_task), Err(SchemaError::UnknownParent(_))));
    }

    #[test]
    fn new_task_class_with_slots() {
        let text = r#"
method_class = "http://example.org/ext#NegateMethod"
parent_task_class = "ds:AtomicTask"
task_class = "http://example.org/ext#Negation"
implementation = "negate"

[[inputs]]
name = "values"
structure = "ds:Vector"

[[outputs]]
name = "negated"
same_as = "values"
"#;
        let base = SchemaSet::load_builtin().unwrap();
        let desc = ExtensionDescriptor::from_toml(text).unwrap();
        let ext = base.register_extension(&desc).unwrap();
        let task = desc.target_task_iri().unwrap();
        let io = ext.io_spec(&task).unwrap();
        assert_eq!(io.inputs[0].name, "values");
        assert_eq!(io.outputs[0].structure, super::super::SlotStructure::SameAs("values".into()));
        assert!(ext.catalog_classes().any(|c| c.iri == task));
    }

    #[test]
    fn malformed_descriptor() {
        assert!(matches!(
            ExtensionDescriptor::from_toml("method_class = 3"),
            Err(SchemaError::Descriptor(_))
        ));
    }
}
