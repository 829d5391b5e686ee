use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::Value;

use super::{BuildError, ParamValue, PipelineBuilder, TaskHandle};
use crate::entity::DataEntityRef;
use crate::rdf::Iri;
use crate::schema::SchemaSet;
use crate::vocab;

/// A pipeline template plus a parameter grid. Any string in the template
/// may contain `${axis}` or `${axis.field}` placeholders; a string that is
/// exactly one placeholder takes the grid value with its type.
///
/// ```toml
/// name = "knn"
/// input_csv = "points.csv"
///
/// [[entities]]
/// name = "features"
/// column = "x1,x2"
/// semantics = "ds:Numerical"
/// structure = "ds:Matrix"
///
/// [[tasks]]
/// id = "train"
/// task = "ml:Classification"
/// method = "ml:KNNMethod"
/// inputs = ["features", "labels"]
/// params = { k = "${k}" }
///
/// [grid]
/// k = [1, 3, 5]
/// ```
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchTemplate {
    pub name: String,
    pub input_csv: String,
    #[serde(default)]
    pub entities: Vec<EntityTemplate>,
    pub tasks: Vec<TaskTemplate>,
    #[serde(default)]
    pub grid: BTreeMap<String, Vec<Value>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntityTemplate {
    pub name: String,
    pub column: String,
    pub semantics: String,
    pub structure: String,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskTemplate {
    /// Lets later tasks refer to outputs as `id.slot` (or `id` for a
    /// single-output task).
    #[serde(default)]
    pub id: Option<String>,
    pub task: String,
    pub method: String,
    #[serde(default)]
    pub inputs: Vec<String>,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
}

/// One combination of grid values.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchPoint {
    pub index: usize,
    pub name: String,
    pub values: BTreeMap<String, Value>,
}

impl BatchTemplate {
    pub fn from_toml(text: &str) -> Result<Self, BuildError> {
        toml::from_str(text).map_err(|e| BuildError::Template(e.message().to_owned()))
    }

    /// Reads a template; a relative `input_csv` is resolved against the
    /// template's directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, BuildError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| BuildError::Io(format!("{}: {e}", path.display())))?;
        let mut template = Self::from_toml(&text)?;
        let csv = Path::new(&template.input_csv);
        if csv.is_relative() {
            let base = path.parent().unwrap_or(Path::new("."));
            let joined = std::path::absolute(base.join(csv)).map_err(|e| BuildError::Io(e.to_string()))?;
            template.input_csv = joined.to_string_lossy().into_owned();
        }
        Ok(template)
    }

    /// Cartesian product over the grid axes (sorted by name, last axis
    /// fastest). No axes, or any empty axis, gives no points.
    pub fn points(&self) -> Vec<BatchPoint> {
        if self.grid.is_empty() || self.grid.values().any(Vec::is_empty) {
            return Vec::new();
        }
        let axes: Vec<(&String, &Vec<Value>)> = self.grid.iter().collect();
        let total: usize = axes.iter().map(|(_, v)| v.len()).product();
        (0..total)
            .map(|index| {
                let mut rem = index;
                let mut values = BTreeMap::new();
                for (axis, options) in axes.iter().rev() {
                    values.insert((*axis).clone(), options[rem % options.len()].clone());
                    rem /= options.len();
                }
                BatchPoint {
                    index,
                    name: format!("{}_{}", self.name, index + 1),
                    values,
                }
            })
            .collect()
    }

    /// Builds the pipeline for one grid point.
    pub fn build_point<'s>(&self, point: &BatchPoint, schema: &'s SchemaSet) -> Result<PipelineBuilder<'s>, BuildError> {
        self.build_inner(point, schema).map_err(|source| BuildError::BatchPoint {
            index: point.index,
            name: point.name.clone(),
            source: Box::new(source),
        })
    }

    fn build_inner<'s>(&self, point: &BatchPoint, schema: &'s SchemaSet) -> Result<PipelineBuilder<'s>, BuildError> {
        let text = |s: &str| -> Result<String, BuildError> {
            match substitute(s, &point.values)? {
                Value::String(s) => Ok(s),
                other => Ok(other.to_string()),
            }
        };
        let iri = |s: &str| -> Result<Iri, BuildError> {
            let s = text(s)?;
            vocab::expand(&s).ok_or_else(|| BuildError::Template(format!("'{s}' is not an IRI")))
        };
        let mut b = PipelineBuilder::new(&point.name, &text(&self.input_csv)?, schema)?;
        let mut named: BTreeMap<String, DataEntityRef> = BTreeMap::new();
        for e in &self.entities {
            let entity = b.add_data_entity(&text(&e.name)?, &text(&e.column)?, &iri(&e.semantics)?, &iri(&e.structure)?)?;
            named.insert(e.name.clone(), entity);
        }
        let mut handles: BTreeMap<String, TaskHandle> = BTreeMap::new();
        for t in &self.tasks {
            let inputs = t
                .inputs
                .iter()
                .map(|r| resolve_input(&text(r)?, &named, &handles))
                .collect::<Result<Vec<_>, _>>()?;
            let input_refs: Vec<&DataEntityRef> = inputs.iter().collect();
            let mut params = Vec::new();
            for (name, value) in &t.params {
                let value = match value {
                    Value::String(s) => substitute(s, &point.values)?,
                    other => other.clone(),
                };
                params.push((name.as_str(), to_param(name, value)?));
            }
            let handle = b.add_task(&iri(&t.task)?, &iri(&t.method)?, &input_refs, &params)?;
            if let Some(id) = &t.id {
                handles.insert(id.clone(), handle);
            }
        }
        Ok(b)
    }
}

fn resolve_input(
    reference: &str,
    named: &BTreeMap<String, DataEntityRef>,
    handles: &BTreeMap<String, TaskHandle>,
) -> Result<DataEntityRef, BuildError> {
    if let Some(e) = named.get(reference) {
        return Ok(e.clone());
    }
    let (id, slot) = match reference.split_once('.') {
        Some((id, slot)) => (id, Some(slot)),
        None => (reference, None),
    };
    let handle = handles
        .get(id)
        .ok_or_else(|| BuildError::Template(format!("unknown input '{reference}'")))?;
    let found = match slot {
        Some(slot) => handle.output(slot),
        None if handle.output_refs.len() == 1 => Some(handle.single_output()),
        None => None,
    };
    found
        .cloned()
        .ok_or_else(|| BuildError::Template(format!("unknown input '{reference}'")))
}

fn to_param(name: &str, value: Value) -> Result<ParamValue, BuildError> {
    Ok(match value {
        Value::Integer(i) => ParamValue::Int(i),
        Value::Float(f) => ParamValue::Float(f),
        Value::Boolean(b) => ParamValue::Bool(b),
        Value::String(s) => ParamValue::Text(s),
        other => {
            return Err(BuildError::Template(format!(
                "parameter '{name}' has unsupported value {other}"
            )))
        }
    })
}

fn lookup(key: &str, values: &BTreeMap<String, Value>) -> Result<Value, BuildError> {
    let (axis, field) = match key.split_once('.') {
        Some((a, f)) => (a, Some(f)),
        None => (key, None),
    };
    let value = values
        .get(axis)
        .ok_or_else(|| BuildError::Template(format!("unknown grid axis '{axis}'")))?;
    match field {
        None => Ok(value.clone()),
        Some(f) => value
            .get(f)
            .cloned()
            .ok_or_else(|| BuildError::Template(format!("grid value for '{axis}' has no field '{f}'"))),
    }
}

/// Expands `${...}` placeholders. A string that is exactly one placeholder
/// yields the grid value itself.
fn substitute(s: &str, values: &BTreeMap<String, Value>) -> Result<Value, BuildError> {
    if let Some(key) = s.strip_prefix("${").and_then(|r| r.strip_suffix('}')) {
        if !key.contains('}') {
            return lookup(key, values);
        }
    }
    let mut out = String::new();
    let mut rest = s;
    while let Some(start) = rest.find("${") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        let end = after
            .find('}')
            .ok_or_else(|| BuildError::Template(format!("unterminated placeholder in '{s}'")))?;
        match lookup(&after[..end], values)? {
            Value::String(v) => out.push_str(&v),
            other => out.push_str(&other.to_string()),
        }
        rest = &after[end + 1..];
    }
    out.push_str(rest);
    Ok(Value::String(out))
}

/// Builds and saves one pipeline per grid point into `out_dir`, stopping
/// at the first failure. Returns the written paths in grid order.
pub fn generate_batch(
    template: &BatchTemplate,
    schema: &SchemaSet,
    out_dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>, BuildError> {
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir).map_err(|e| BuildError::Io(format!("{}: {e}", out_dir.display())))?;
    let mut paths = Vec::new();
    for point in template.points() {
        let builder = template.build_point(&point, schema)?;
        let path = out_dir.join(format!("{}.ttl", point.name));
        let wrap = |source: BuildError| BuildError::BatchPoint {
            index: point.index,
            name: point.name.clone(),
            source: Box::new(source),
        };
        let report = builder.save(&path).map_err(wrap)?;
        if !report.conforms {
            return Err(wrap(BuildError::Validation(report)));
        }
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    const KNN: &str = r#"
name = "knn"
input_csv = "points.csv"

[[entities]]
name = "features"
column = "x1,x2"
semantics = "ds:Numerical"
structure = "ds:Matrix"

[[entities]]
name = "labels"
column = "label"
semantics = "ds:Categorical"
structure = "ds:Vector"

[[tasks]]
id = "split"
task = "ml:DataSplitting"
method = "ml:TrainTestSplitMethod"
inputs = ["features", "labels"]
params = { ratio = 0.75, seed = 7 }

[[tasks]]
id = "train"
task = "ml:Classification"
method = "ml:KNNMethod"
inputs = ["split.train_features", "split.train_labels"]
params = { k = "${k}" }

[grid]
k = [1, 3, 5]
"#;

    #[test]
    fn three_point_grid() {
        let schema = SchemaSet::load_builtin().unwrap();
        let t = BatchTemplate::from_toml(KNN).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = generate_batch(&t, &schema, dir.path()).unwrap();
        assert_eq!(paths.len(), 3);
        assert!(paths[0].ends_with("knn_1.ttl"));
        for p in &paths {
            assert!(p.exists());
        }
    }

    #[test]
    fn empty_grid_is_empty() {
        let schema = SchemaSet::load_builtin().unwrap();
        let mut t = BatchTemplate::from_toml(KNN).unwrap();
        t.grid.clear();
        let dir = tempfile::tempdir().unwrap();
        assert!(generate_batch(&t, &schema, dir.path()).unwrap().is_empty());
        t.grid.insert("k".into(), vec![]);
        assert!(t.points().is_empty());
    }

    #[test]
    fn invalid_value_names_point() {
        let schema = SchemaSet::load_builtin().unwrap();
        let mut t = BatchTemplate::from_toml(KNN).unwrap();
        t.grid.insert("k".into(), vec![Value::Integer(1), Value::String("x".into())]);
        let dir = tempfile::tempdir().unwrap();
        let err = generate_batch(&t, &schema, dir.path()).unwrap_err();
        match err {
            BuildError::BatchPoint { index, name, source } => {
                assert_eq!(index, 1);
                assert_eq!(name, "knn_2");
                assert!(matches!(*source, BuildError::ParamTypeError { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn product_order_and_fields() {
        let mut grid = BTreeMap::new();
        grid.insert("a".to_owned(), vec![Value::Integer(1), Value::Integer(2)]);
        let table: toml::Table = toml::from_str("method = \"m\"").unwrap();
        grid.insert("b".to_owned(), vec![Value::Table(table), Value::String("s".into())]);
        let t = BatchTemplate {
            name: "g".into(),
            input_csv: "x.csv".into(),
            entities: vec![],
            tasks: vec![],
            grid,
        };
        let pts = t.points();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[1].values["a"], Value::Integer(1));
        assert_eq!(pts[1].values["b"], Value::String("s".into()));
        assert_eq!(
            substitute("${b.method}", &pts[0].values).unwrap(),
            Value::String("m".into())
        );
        assert_eq!(
            substitute("k=${a}!", &pts[3].values).unwrap(),
            Value::String("k=2!".into())
        );
    }
}
