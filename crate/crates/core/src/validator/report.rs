use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConstraintKind {
    PipelineStructure,
    PropertyCardinality,
    PropertyClass,
    PropertyDatatype,
    CompatiblePair,
    OrderingRule,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    /// IRI of the offending node (`_:label` for blank nodes).
    pub focus_node: String,
    pub kind: ConstraintKind,
    pub path: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub conforms: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    /// Sorts and deduplicates; `conforms` follows from emptiness.
    pub fn from_violations(mut violations: Vec<Violation>) -> Self {
        violations.sort();
        violations.dedup();
        ValidationReport {
            conforms: violations.is_empty(),
            violations,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        if self.conforms {
            return "conforms: true\n".to_owned();
        }
        let mut out = format!("conforms: false ({} violations)\n", self.violations.len());
        for v in &self.violations {
            out.push_str(&format!("- [{}] {}", v.kind, v.focus_node));
            if let Some(path) = &v.path {
                out.push_str(&format!(" ({path})"));
            }
            out.push_str(&format!(": {}\n", v.message));
        }
        out
    }

    pub fn count(&self, kind: ConstraintKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(focus: &str, kind: ConstraintKind) -> Violation {
        Violation {
            focus_node: focus.into(),
            kind,
            path: None,
            message: "m".into(),
        }
    }

    #[test]
    fn sorted_and_conforms_tracks_emptiness() {
        let r = ValidationReport::from_violations(vec![
            v("http://ex.org/b", ConstraintKind::PropertyClass),
            v("http://ex.org/a", ConstraintKind::OrderingRule),
            v("http://ex.org/a", ConstraintKind::OrderingRule),
        ]);
        assert!(!r.conforms);
        assert_eq!(r.violations.len(), 2);
        assert_eq!(r.violations[0].focus_node, "http://ex.org/a");
        assert!(ValidationReport::from_violations(vec![]).conforms);
    }

    #[test]
    fn json_round_trip() {
        let r = ValidationReport::from_violations(vec![v("http://ex.org/a", ConstraintKind::CompatiblePair)]);
        let back: ValidationReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_json().contains("\"kind\": \"CompatiblePair\""));
    }
}
