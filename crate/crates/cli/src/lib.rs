//! The `exekg` command line and its embedded HTTP service.

pub mod http;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use exekg_core::builder::BatchTemplate;
use exekg_core::executor::{export_plan_script, ExecError, RunStatus, Value};
use exekg_core::service::{catalog, catalog_text};
use exekg_core::{parse_turtle, validate, Executor, ExtensionDescriptor, RunOptions, RunResult, SchemaSet};

pub const EXIT_OK: i32 = 0;
/// Validation failure, or any failed pipeline in a batch.
pub const EXIT_INVALID: i32 = 1;
/// Unreadable input files and usage errors.
pub const EXIT_IO: i32 = 2;
/// A task failed while running.
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "exekg", version, about = "Build, validate and run ML pipelines stored as knowledge graphs")]
pub struct Cli {
    /// Extension descriptor (TOML) registering an extra method; repeatable.
    #[arg(long, global = true)]
    pub extension: Vec<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a pipeline graph against the shapes.
    Validate {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Validate and execute a pipeline graph.
    Run {
        path: PathBuf,
        /// Use this CSV instead of the graph's input data path.
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Directory for SVG artifacts.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Generate and run one pipeline per grid point of a template.
    Batch {
        template: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List task and method classes.
    Catalog {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the execution plan of a pipeline graph as a readable script.
    ExportPlan {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the JSON API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        /// Where artifacts too large to inline are stored.
        #[arg(long, default_value = "artifacts")]
        artifacts: PathBuf,
    },
}

/// Built-in schemata plus any extension descriptors.
pub fn load_schema(extensions: &[PathBuf]) -> Result<SchemaSet, String> {
    let mut schema = SchemaSet::load_builtin().map_err(|e| e.to_string())?;
    for path in extensions {
        let desc = ExtensionDescriptor::from_file(path).map_err(|e| format!("{}: {e}", path.display()))?;
        schema = schema.register_extension(&desc).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(schema)
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_IO } else { EXIT_OK };
        }
    };
    let schema = match load_schema(&cli.extension) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_IO;
        }
    };
    match cli.command {
        Command::Validate { path, format } => cmd_validate(&schema, &path, format, out, err),
        Command::Run {
            path,
            dataset,
            out: dir,
            seed,
            format,
        } => cmd_run(&schema, &path, RunOptions { seed, dataset }, dir.as_deref(), format, out, err),
        Command::Batch { template, out: dir, seed } => cmd_batch(&schema, &template, &dir, seed, out, err),
        Command::Catalog { format } => {
            let entries = catalog(&schema);
            let _ = match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&entries).expect("catalog serializes")),
                Format::Text => write!(out, "{}", catalog_text(&entries)),
            };
            EXIT_OK
        }
        Command::ExportPlan { path, out: file } => cmd_export(&schema, &path, file.as_deref(), out, err),
        Command::Serve { addr, artifacts } => {
            let schema: &'static SchemaSet = Box::leak(Box::new(schema));
            let runtime = match tokio::runtime::Runtime::new() {
                Ok(rt) => rt,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_IO;
                }
            };
            match runtime.block_on(http::serve(&addr, schema, artifacts)) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_IO
                }
            }
        }
    }
}

fn executor<'s>(schema: &'s SchemaSet, err: &mut dyn Write) -> Option<Executor<'s>> {
    match Executor::new(schema) {
        Ok(ex) => Some(ex),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            None
        }
    }
}

fn cmd_validate(schema: &SchemaSet, path: &Path, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(ex) = executor(schema, err) else { return EXIT_IO };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return EXIT_IO;
        }
    };
    let graph = match parse_turtle(&text) {
        Ok(g) => g,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return EXIT_IO;
        }
    };
    let report = validate(&graph, ex.shapes(), schema);
    let _ = match format {
        Format::Json => writeln!(out, "{}", report.to_json()),
        Format::Text => write!(out, "{}", report.to_text()),
    };
    if report.conforms {
        EXIT_OK
    } else {
        EXIT_INVALID
    }
}

fn exec_error_code(e: &ExecError) -> i32 {
    match e {
        ExecError::Io(_) | ExecError::Parse(_) | ExecError::Dataset(_) | ExecError::Shapes(_) => EXIT_IO,
        ExecError::UnboundImplementation { .. } => EXIT_RUNTIME,
        _ => EXIT_INVALID,
    }
}

fn report_exec_error(e: &ExecError, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if let ExecError::ValidationFailed(report) = e {
        let _ = match format {
            Format::Json => writeln!(out, "{}", report.to_json()),
            Format::Text => write!(out, "{}", report.to_text()),
        };
    }
    let _ = writeln!(err, "error: {e}");
    exec_error_code(e)
}

fn run_text(result: &RunResult) -> String {
    let mut s = match &result.status {
        RunStatus::Success => "status: success\n".to_owned(),
        RunStatus::Failed { task, error } => format!("status: failed at {task}: {error}\n"),
    };
    for (iri, value) in &result.bindings {
        if let Value::Number(x) = value {
            s.push_str(&format!("{} = {x}\n", iri.local_name()));
        }
    }
    for a in &result.artifacts {
        match &a.path {
            Some(p) => s.push_str(&format!("artifact {} -> {}\n", a.task.local_name(), p.display())),
            None => s.push_str(&format!("artifact {}\n", a.task.local_name())),
        }
    }
    s
}

fn cmd_run(
    schema: &SchemaSet,
    path: &Path,
    options: RunOptions,
    dir: Option<&Path>,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let Some(ex) = executor(schema, err) else { return EXIT_IO };
    let mut result = match ex.run_file(path, &options) {
        Ok(r) => r,
        Err(e) => return report_exec_error(&e, format, out, err),
    };
    if let Some(dir) = dir {
        if let Err(e) = result.write_artifacts(dir) {
            let _ = writeln!(err, "error: {}: {e}", dir.display());
            return EXIT_IO;
        }
    }
    let _ = match format {
        Format::Json => writeln!(out, "{}", result.to_json()),
        Format::Text => write!(out, "{}", run_text(&result)),
    };
    match &result.status {
        RunStatus::Success => EXIT_OK,
        RunStatus::Failed { task, error } => {
            let _ = writeln!(err, "error: task {task} failed: {error}");
            EXIT_RUNTIME
        }
    }
}

/// One row of the batch summary.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchRow {
    pub pipeline: String,
    pub status: &'static str,
    pub metric: String,
    pub value: Option<f64>,
    pub detail: String,
}

/// Last scalar output in chain order.
fn headline(ex: &Executor<'_>, path: &Path, result: &RunResult) -> (String, Option<f64>) {
    let Ok(pipeline) = ex.load_file(path) else { return (String::new(), None) };
    for task in pipeline.tasks.iter().rev() {
        for entity in task.outputs.values() {
            if let Some(x) = result.number(&entity.iri) {
                return (entity.name.clone(), Some(x));
            }
        }
    }
    (String::new(), None)
}

/// Builds and runs every grid point; failures are isolated per point.
pub fn run_batch(schema: &SchemaSet, template: &BatchTemplate, dir: &Path, seed: u64) -> Result<Vec<BatchRow>, String> {
    let ex = Executor::new(schema).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let mut rows = Vec::new();
    for point in template.points() {
        let mut row = BatchRow {
            pipeline: point.name.clone(),
            status: "invalid",
            metric: String::new(),
            value: None,
            detail: String::new(),
        };
        let ttl = dir.join(format!("{}.ttl", point.name));
        let built = template.build_point(&point, schema).and_then(|b| b.save(&ttl));
        match built {
            Err(e) => row.detail = e.to_string(),
            Ok(report) if !report.conforms => row.detail = format!("{} violation(s)", report.violations.len()),
            Ok(_) => match ex.run_file(&ttl, &RunOptions { seed, dataset: None }) {
                Err(e) => {
                    row.status = "failed";
                    row.detail = e.to_string();
                }
                Ok(mut result) => {
                    let _ = result.write_artifacts(&dir.join(&point.name));
                    (row.metric, row.value) = headline(&ex, &ttl, &result);
                    match &result.status {
                        RunStatus::Success => row.status = "success",
                        RunStatus::Failed { task, error } => {
                            row.status = "failed";
                            row.detail = format!("{}: {error}", task.local_name());
                        }
                    }
                }
            },
        }
        rows.push(row);
    }
    Ok(rows)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn batch_csv(rows: &[BatchRow]) -> String {
    let mut s = String::from("pipeline,status,metric,value,detail\n");
    for r in rows {
        let value = r.value.map(|v| v.to_string()).unwrap_or_default();
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_field(&r.pipeline),
            r.status,
            csv_field(&r.metric),
            value,
            csv_field(&r.detail)
        ));
    }
    s
}

fn cmd_batch(schema: &SchemaSet, template: &Path, dir: &Path, seed: u64, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let template = match BatchTemplate::from_file(template) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_IO;
        }
    };
    let rows = match run_batch(schema, &template, dir, seed) {
        Ok(rows) => rows,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_IO;
        }
    };
    let table = batch_csv(&rows);
    if let Err(e) = std::fs::write(dir.join("results.csv"), &table) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_IO;
    }
    let _ = write!(out, "{table}");
    if rows.iter().all(|r| r.status == "success") {
        EXIT_OK
    } else {
        EXIT_INVALID
    }
}

fn cmd_export(schema: &SchemaSet, path: &Path, file: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(ex) = executor(schema, err) else { return EXIT_IO };
    let plan = match ex.load_file(path).and_then(|p| exekg_core::executor::compile_plan(&p)) {
        Ok(plan) => plan,
        Err(e) => return report_exec_error(&e, Format::Text, out, err),
    };
    let script = export_plan_script(&plan);
    match file {
        Some(f) => {
            if let Err(e) = std::fs::write(f, &script) {
                let _ = writeln!(err, "error: {}: {e}", f.display());
                return EXIT_IO;
            }
        }
        None => {
            let _ = write!(out, "{script}");
        }
    }
    EXIT_OK
}
