use std::hint::black_box;
use std::path::Path;

use criterion::{criterion_group, criterion_main, Criterion};
use exekg_core::fixtures::{classification_pipeline, separable_csv};
use exekg_core::schema::BUILTIN_SCHEMATA;
use exekg_core::{load_shapes, parse_turtle, serialize_turtle, validate, Dataset, Executor, SchemaSet};

fn turtle(c: &mut Criterion) {
    let (_, ml_ttl) = BUILTIN_SCHEMATA.iter().find(|(name, _)| *name == "ml").expect("ml schema");
    let graph = parse_turtle(ml_ttl).expect("ml schema parses");
    c.bench_function("parse ml schema", |b| b.iter(|| parse_turtle(black_box(ml_ttl)).unwrap()));
    c.bench_function("serialize ml schema", |b| b.iter(|| serialize_turtle(black_box(&graph))));
}

fn pipeline(c: &mut Criterion) {
    let schema = SchemaSet::load_builtin().expect("schemata load");
    let shapes = load_shapes(&schema).expect("shapes load");
    let (builder, _) = classification_pipeline(&schema, "bench", "data.csv").expect("fixture builds");
    let graph = builder.graph().clone();

    c.bench_function("build classification pipeline", |b| {
        b.iter(|| classification_pipeline(&schema, "bench", "data.csv").unwrap())
    });
    c.bench_function("validate classification pipeline", |b| {
        b.iter(|| validate(black_box(&graph), &shapes, &schema))
    });

    let exec = Executor::new(&schema).expect("executor");
    let plan = exec.compile(&exec.load_graph(&graph, Path::new(".")).unwrap()).unwrap();
    let data = Dataset::parse(&separable_csv(20)).unwrap();
    c.bench_function("execute classification pipeline", |b| b.iter(|| exec.execute(&plan, &data, 0)));
    let big = Dataset::parse(&separable_csv(500)).unwrap();
    c.bench_function("execute classification pipeline, 1000 rows", |b| b.iter(|| exec.execute(&plan, &big, 0)));
}

criterion_group!(benches, turtle, pipeline);
criterion_main!(benches);
