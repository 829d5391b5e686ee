//! Namespace constants and term constructors for the vocabularies used by
//! pipeline graphs, schemata and shapes.

use crate::rdf::Iri;

pub const DS_NS: &str = "http://www.w3id.org/exeKG/ds#";
pub const ML_NS: &str = "http://www.w3id.org/exeKG/ml#";
pub const STATS_NS: &str = "http://www.w3id.org/exeKG/stats#";
pub const VISU_NS: &str = "http://www.w3id.org/exeKG/visu#";
pub const SHAPES_NS: &str = "http://www.w3id.org/exeKG/shapes#";
/// Per-pipeline individuals live under `EXE_BASE<pipeline-name>#`.
pub const EXE_BASE: &str = "http://www.w3id.org/exeKG/pipeline/";

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL_NS: &str = "http://www.w3.org/2002/07/owl#";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";
pub const SH_NS: &str = "http://www.w3.org/ns/shacl#";

/// Prefixes that may only be bound to their standard namespaces.
pub const RESERVED_PREFIXES: &[(&str, &str)] = &[
    ("ds", DS_NS),
    ("ml", ML_NS),
    ("stats", STATS_NS),
    ("visu", VISU_NS),
    ("rdf", RDF_NS),
    ("rdfs", RDFS_NS),
    ("owl", OWL_NS),
    ("xsd", XSD_NS),
];

fn term(ns: &str, local: &str) -> Iri {
    Iri::from_static(&format!("{ns}{local}"))
}

pub fn ds(local: &str) -> Iri {
    term(DS_NS, local)
}

pub fn ml(local: &str) -> Iri {
    term(ML_NS, local)
}

pub fn stats(local: &str) -> Iri {
    term(STATS_NS, local)
}

pub fn visu(local: &str) -> Iri {
    term(VISU_NS, local)
}

pub fn sh(local: &str) -> Iri {
    term(SH_NS, local)
}

pub fn shapes(local: &str) -> Iri {
    term(SHAPES_NS, local)
}

pub fn rdf_type() -> Iri {
    term(RDF_NS, "type")
}

pub fn rdfs(local: &str) -> Iri {
    term(RDFS_NS, local)
}

pub fn owl(local: &str) -> Iri {
    term(OWL_NS, local)
}

/// Expands `prefix:local` for the reserved prefixes; anything else must
/// already be an absolute IRI.
pub fn expand(curie_or_iri: &str) -> Option<Iri> {
    if let Some((prefix, local)) = curie_or_iri.split_once(':') {
        if let Some((_, ns)) = RESERVED_PREFIXES.iter().find(|(p, _)| *p == prefix) {
            return Iri::new(format!("{ns}{local}")).ok();
        }
    }
    Iri::new(curie_or_iri).ok()
}

/// Inverse of [`expand`] for display purposes.
pub fn compact(iri: &Iri) -> String {
    for (prefix, ns) in RESERVED_PREFIXES {
        if let Some(local) = iri.as_str().strip_prefix(ns) {
            return format!("{prefix}:{local}");
        }
    }
    iri.to_string()
}

pub mod xsd {
    pub const STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const FLOAT: &str = "http://www.w3.org/2001/XMLSchema#float";
    pub const DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";

    pub const SUPPORTED: &[&str] = &[STRING, INTEGER, DECIMAL, FLOAT, DOUBLE, BOOLEAN];

    /// Lexical-space check for the supported datatypes.
    pub fn lexical_ok(datatype: &str, lexical: &str) -> bool {
        match datatype {
            STRING => true,
            INTEGER => {
                let digits = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
                !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
            }
            DECIMAL => {
                let body = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
                let (int, frac) = body.split_once('.').unwrap_or((body, ""));
                !(int.is_empty() && frac.is_empty())
                    && int.bytes().all(|b| b.is_ascii_digit())
                    && frac.bytes().all(|b| b.is_ascii_digit())
            }
            FLOAT | DOUBLE => {
                // Rust also accepts "inf"/"nan" spellings that XSD does not.
                let lower = lexical.to_ascii_lowercase();
                matches!(lexical, "INF" | "+INF" | "-INF" | "NaN")
                    || (lexical.parse::<f64>().is_ok()
                        && !lower.contains("inf")
                        && !lower.contains("nan"))
            }
            BOOLEAN => matches!(lexical, "true" | "false" | "1" | "0"),
            _ => false,
        }
    }
}
