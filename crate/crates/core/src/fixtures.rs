//! Synthetic datasets and reference pipelines used by tests, benches and the
//! command-line self-checks.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::builder::{BuildError, ParamValue, PipelineBuilder, TaskHandle};
use crate::rdf::{Graph, Iri, Literal, Triple};
use crate::validator::ConstraintKind;
use crate::vocab::{ds, ml, rdf_type, visu};
use crate::SchemaSet;

/// Two classes of `per_class` points each, separated by a wide margin:
/// class `a` near (1, 1), class `b` near (9, 9). Columns `x1,x2,label`.
pub fn separable_csv(per_class: usize) -> String {
    let mut s = String::from("x1,x2,label\n");
    for i in 0..per_class {
        let (dx, dy) = ((i % 5) as f64 * 0.3, (i / 5) as f64 * 0.3);
        let _ = writeln!(s, "{:.1},{:.1},a", 0.2 + dx, 0.2 + dy);
        let _ = writeln!(s, "{:.1},{:.1},b", 8.0 + dx, 8.0 + dy);
    }
    s
}

/// `y = 2 x1 - x2 + 1` plus a small deterministic wobble. Columns `x1,x2,y`.
pub fn linear_csv(rows: usize) -> String {
    let mut s = String::from("x1,x2,y\n");
    for i in 0..rows {
        let x1 = i as f64 * 0.5 + 1.0;
        let x2 = ((i * 7) % 11) as f64;
        let wobble = if i % 2 == 0 { 0.05 } else { -0.05 };
        let _ = writeln!(s, "{x1},{x2},{:.2}", 2.0 * x1 - x2 + 1.0 + wobble);
    }
    s
}

/// Handles of the classification pipeline's tasks.
#[derive(Debug, Clone)]
pub struct ClassificationPipeline {
    pub split: TaskHandle,
    pub train: TaskHandle,
    pub test: TaskHandle,
    pub accuracy: TaskHandle,
    pub scatter: TaskHandle,
}

impl ClassificationPipeline {
    pub fn accuracy_iri(&self) -> &Iri {
        &self.accuracy.single_output().iri
    }
}

/// split (0.75, seed 7), k-NN (k = 3), predict, accuracy, then a scatter
/// of the two test-feature columns on a 1x1 canvas.
pub fn classification_pipeline<'s>(
    schema: &'s SchemaSet,
    name: &str,
    csv: &str,
) -> Result<(PipelineBuilder<'s>, ClassificationPipeline), BuildError> {
    let mut b = PipelineBuilder::new(name, csv, schema)?;
    let features = b.add_data_entity("features", "x1,x2", &ds("Numerical"), &ds("Matrix"))?;
    let labels = b.add_data_entity("labels", "label", &ds("Categorical"), &ds("Vector"))?;
    let split = b.add_task(
        &ml("DataSplitting"),
        &ml("TrainTestSplitMethod"),
        &[&features, &labels],
        &[("ratio", ParamValue::from(0.75)), ("seed", ParamValue::from(7))],
    )?;
    let out = |h: &TaskHandle, slot: &str| h.output(slot).expect("declared slot").clone();
    let train = b.add_task(
        &ml("Classification"),
        &ml("KNNMethod"),
        &[&out(&split, "train_features"), &out(&split, "train_labels")],
        &[("k", ParamValue::from(3))],
    )?;
    let test = b.add_task(
        &ml("Test"),
        &ml("PredictMethod"),
        &[train.single_output(), &out(&split, "test_features")],
        &[],
    )?;
    let accuracy = b.add_task(
        &ml("PerformanceCalculation"),
        &ml("AccuracyMethod"),
        &[test.single_output(), &out(&split, "test_labels")],
        &[],
    )?;
    let test_features = out(&split, "test_features");
    let x = b.add_task(&ml("FeatureSelection"), &ml("ColumnSelectionMethod"), &[&test_features], &[("index", 0.into())])?;
    let y = b.add_task(&ml("FeatureSelection"), &ml("ColumnSelectionMethod"), &[&test_features], &[("index", 1.into())])?;
    b.add_task(
        &visu("CanvasTask"),
        &visu("CanvasMethod"),
        &[],
        &[("name", "figure".into()), ("rows", 1.into()), ("cols", 1.into())],
    )?;
    let scatter = b.add_task(
        &visu("ScatterPlot"),
        &visu("ScatterMethod"),
        &[x.single_output(), y.single_output()],
        &[("title", "test points".into())],
    )?;
    Ok((
        b,
        ClassificationPipeline {
            split,
            train,
            test,
            accuracy,
            scatter,
        },
    ))
}

/// Writes `data.csv` (40 separable points) and `pipeline.ttl` into `dir`.
pub fn write_classification_fixture(schema: &SchemaSet, dir: &Path) -> Result<(PathBuf, ClassificationPipeline), BuildError> {
    let io = |e: std::io::Error| BuildError::Io(e.to_string());
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join("data.csv"), separable_csv(20)).map_err(io)?;
    let (builder, handles) = classification_pipeline(schema, "classification", "data.csv")?;
    let ttl = dir.join("pipeline.ttl");
    builder.save(&ttl)?;
    Ok((ttl, handles))
}

/// Noiseless `y = 2x + 1` for `x = 0..rows`. Columns `x,y`.
pub fn affine_csv(rows: usize) -> String {
    let mut s = String::from("x,y\n");
    for i in 0..rows {
        let _ = writeln!(s, "{i},{}", 2 * i + 1);
    }
    s
}

/// Linear regression of `y` on `x`, prediction on the training rows and
/// MAPE. Returns the model and score handles.
pub fn regression_pipeline<'s>(
    schema: &'s SchemaSet,
    name: &str,
    csv: &str,
) -> Result<(PipelineBuilder<'s>, TaskHandle, TaskHandle), BuildError> {
    let mut b = PipelineBuilder::new(name, csv, schema)?;
    let x = b.add_data_entity("x", "x", &ds("Numerical"), &ds("Matrix"))?;
    let y = b.add_data_entity("y", "y", &ds("Numerical"), &ds("Vector"))?;
    let fit = b.add_task(&ml("Regression"), &ml("LinearRegressionMethod"), &[&x, &y], &[])?;
    let test = b.add_task(&ml("Test"), &ml("PredictMethod"), &[fit.single_output(), &x], &[])?;
    let score = b.add_task(&ml("PerformanceCalculation"), &ml("MAPEMethod"), &[test.single_output(), &y], &[])?;
    Ok((b, fit, score))
}

/// Two normalizations crossed with two regressors; `input_csv` should hold
/// [`linear_csv`] data.
pub fn norm_model_template(input_csv: &str) -> String {
    format!(
        r#"name = "grid"
input_csv = "{input_csv}"

[[entities]]
name = "features"
column = "x1,x2"
semantics = "ds:Numerical"
structure = "ds:Matrix"

[[entities]]
name = "target"
column = "y"
semantics = "ds:Numerical"
structure = "ds:Vector"

[[tasks]]
id = "norm"
task = "stats:Normalization"
method = "${{norm}}"
inputs = ["features"]

[[tasks]]
id = "split"
task = "ml:DataSplitting"
method = "ml:TrainTestSplitMethod"
inputs = ["norm", "target"]
params = {{ ratio = 0.75, seed = 3 }}

[[tasks]]
id = "fit"
task = "ml:Regression"
method = "${{model}}"
inputs = ["split.train_features", "split.train_labels"]

[[tasks]]
id = "test"
task = "ml:Test"
method = "ml:PredictMethod"
inputs = ["fit", "split.test_features"]

[[tasks]]
id = "score"
task = "ml:PerformanceCalculation"
method = "ml:MAEMethod"
inputs = ["test", "split.test_labels"]

[grid]
norm = ["stats:MinMaxMethod", "stats:ZScoreMethod"]
model = ["ml:LinearRegressionMethod", "ml:KNNMethod"]
"#
    )
}

/// A single-edit corruption of a valid graph and the one violation it must
/// cause.
#[derive(Debug, Clone)]
pub struct Mutation {
    pub name: &'static str,
    pub graph: Graph,
    pub kind: ConstraintKind,
    pub focus: Iri,
}

fn retype(g: &mut Graph, node: &Iri, from: Iri, to: Iri) {
    g.remove(&Triple::iri(node, &rdf_type(), from));
    g.insert(Triple::iri(node, &rdf_type(), to));
}

fn relink(g: &mut Graph, s: &Iri, p: &Iri, from: &Iri, to: &Iri) {
    g.remove(&Triple::iri(s, p, from.clone()));
    g.insert(Triple::iri(s, p, to.clone()));
}

/// Classification task using the schema-only MLP method.
pub fn mlp_pipeline<'s>(schema: &'s SchemaSet) -> Result<(PipelineBuilder<'s>, TaskHandle), BuildError> {
    let mut b = PipelineBuilder::new("mlp", "data.csv", schema)?;
    let features = b.add_data_entity("features", "x1,x2", &ds("Numerical"), &ds("Matrix"))?;
    let labels = b.add_data_entity("labels", "label", &ds("Categorical"), &ds("Vector"))?;
    let train = b.add_task(&ml("Classification"), &ml("MLPMethod"), &[&features, &labels], &[])?;
    Ok((b, train))
}

/// The eight single-mutation fixtures, one per constraint family instance.
pub fn mutations(schema: &SchemaSet) -> Result<Vec<Mutation>, BuildError> {
    let (b, h) = classification_pipeline(schema, "classification", "data.csv")?;
    let base = b.graph().clone();
    let task_at = |i: usize| b.tasks()[i].0.clone();
    let (train, test, scatter) = (h.train.task_iri.clone(), h.test.task_iri.clone(), h.scatter.task_iri.clone());
    let (fs2, canvas) = (task_at(5), task_at(6));
    let mut out = Vec::new();
    let mut push = |name, graph, kind, focus: &Iri| {
        out.push(Mutation {
            name,
            graph,
            kind,
            focus: focus.clone(),
        })
    };

    let mut g = base.clone();
    g.insert(Triple::iri(&test, &ds("hasNextTask"), task_at(4)));
    push("double_next_task", g, ConstraintKind::PropertyCardinality, &test);

    let mut g = base.clone();
    g.remove(&Triple::iri(&test, &ds("hasMethod"), h.test.method_iri.clone()));
    push("missing_method", g, ConstraintKind::PropertyCardinality, &test);

    let mut g = base.clone();
    retype(&mut g, &h.train.method_iri, ml("KNNMethod"), ml("LinearRegressionMethod"));
    push("incompatible_method", g, ConstraintKind::CompatiblePair, &train);

    let mut g = base.clone();
    let next = ds("hasNextTask");
    relink(&mut g, &fs2, &next, &canvas, &scatter);
    g.remove(&Triple::iri(&canvas, &next, scatter.clone()));
    g.insert(Triple::iri(&scatter, &next, canvas.clone()));
    push("plot_before_canvas", g, ConstraintKind::OrderingRule, &scatter);

    let mut g = base.clone();
    let labels_binding = h.train.task_iri.as_str().to_owned() + "_labels";
    g.remove(&Triple::iri(&train, &ds("hasInput"), Iri::new(labels_binding).expect("valid iri")));
    push("train_one_input", g, ConstraintKind::PropertyCardinality, &train);

    let mut g = base.clone();
    let extra = Iri::new(format!("{}_extra", train.as_str())).expect("valid iri");
    g.extend([
        Triple::iri(&train, &ds("hasOutput"), extra.clone()),
        Triple::iri(&extra, &rdf_type(), ds("DataEntity")),
        Triple::iri(&extra, &ds("hasSlotName"), Literal::string("extra")),
        Triple::iri(&extra, &ds("hasDataStructure"), ds("SingleValue")),
    ]);
    push("train_two_outputs", g, ConstraintKind::PropertyCardinality, &train);

    let mut g = base.clone();
    let model = &h.train.single_output().iri;
    relink(&mut g, model, &ds("hasDataStructure"), &ds("SingleValue"), &ds("Vector"));
    push("train_output_not_single_value", g, ConstraintKind::PropertyClass, &train);

    let (mut mlp, mlp_train) = mlp_pipeline(schema)?;
    mlp.graph_mut()
        .insert(Triple::iri(&mlp_train.method_iri, &ml("hasBatchSize"), Literal::string("abc")));
    push("batch_size_not_integer", mlp.graph().clone(), ConstraintKind::PropertyDatatype, &mlp_train.method_iri);

    Ok(out)
}

