use std::fmt::Write as _;

use super::ExecutionPlan;
use crate::vocab::compact;

/// Human-readable listing of the plan, one stanza per task in run order.
pub fn export_plan_script(plan: &ExecutionPlan) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# pipeline {}", plan.pipeline);
    let _ = writeln!(s, "# dataset {}", plan.csv_path.display());
    for (i, task) in plan.tasks.iter().enumerate() {
        let _ = writeln!(s);
        let _ = writeln!(s, "step {}: {} ({})", i + 1, task.task.name, compact(&task.task.type_iri));
        let _ = writeln!(
            s,
            "  method: {} [{}]",
            compact(&task.method.type_iri),
            task.implementation.as_deref().unwrap_or("-")
        );
        let params: Vec<String> = task
            .params
            .iter()
            .flat_map(|(name, values)| values.iter().map(move |v| format!("{name}={}", v.lexical())))
            .collect();
        if !params.is_empty() {
            let _ = writeln!(s, "  params: {}", params.join(", "));
        }
        for (slot, input) in &task.inputs {
            let source = match (&input.source_column, &input.referenced_output) {
                (Some(col), _) => format!("column \"{col}\""),
                (None, Some(r)) => r.local_name().to_owned(),
                (None, None) => "?".to_owned(),
            };
            let _ = writeln!(s, "  input {slot} <- {source}");
        }
        for (slot, output) in &task.outputs {
            let _ = writeln!(s, "  output {slot} -> {}", output.name);
        }
    }
    s
}
