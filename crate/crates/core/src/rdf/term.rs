use std::fmt;

use serde::{Deserialize, Serialize};

use super::RdfError;
use crate::vocab::xsd;

/// An absolute IRI, stored verbatim.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    /// Wraps `value` after checking that it starts with a URI scheme.
    pub fn new(value: impl Into<String>) -> Result<Self, RdfError> {
        let value = value.into();
        if is_absolute(&value) {
            Ok(Self(value))
        } else {
            Err(RdfError::InvalidIri(value))
        }
    }

    pub(crate) fn from_static(value: &str) -> Self {
        debug_assert!(is_absolute(value), "{value}");
        Self(value.to_owned())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Splits at the last `#` (or `/` when there is no fragment) into
    /// namespace and local name.
    pub fn split(&self) -> (&str, &str) {
        let cut = self
            .0
            .rfind('#')
            .or_else(|| self.0.rfind('/'))
            .unwrap_or(self.0.len() - 1);
        (&self.0[..cut], &self.0[cut + 1..])
    }

    pub fn local_name(&self) -> &str {
        self.split().1
    }
}

fn is_absolute(value: &str) -> bool {
    let Some(colon) = value.find(':') else {
        return false;
    };
    let scheme = &value[..colon];
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        && !value.chars().any(|c| c.is_whitespace() || matches!(c, '<' | '>' | '"'))
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Iri {
    type Error = RdfError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<Iri> for String {
    fn from(value: Iri) -> Self {
        value.0
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// A typed literal. Equality is lexical: `"1"` and `"01"` differ even when
/// both are integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
}

impl Literal {
    /// Builds a literal, rejecting datatypes outside the supported XSD set.
    pub fn new(lexical: impl Into<String>, datatype: Iri) -> Result<Self, RdfError> {
        if !xsd::SUPPORTED.contains(&datatype.as_str()) {
            return Err(RdfError::UnsupportedDatatype(datatype.to_string()));
        }
        Ok(Self {
            lexical: lexical.into(),
            datatype,
        })
    }

    pub fn string(value: impl Into<String>) -> Self {
        Self {
            lexical: value.into(),
            datatype: Iri::from_static(xsd::STRING),
        }
    }

    pub fn integer(value: i64) -> Self {
        Self {
            lexical: value.to_string(),
            datatype: Iri::from_static(xsd::INTEGER),
        }
    }

    pub fn double(value: f64) -> Self {
        Self {
            lexical: format_double(value),
            datatype: Iri::from_static(xsd::DOUBLE),
        }
    }

    pub fn boolean(value: bool) -> Self {
        Self {
            lexical: value.to_string(),
            datatype: Iri::from_static(xsd::BOOLEAN),
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    /// True when the lexical form is valid for the datatype.
    pub fn is_well_typed(&self) -> bool {
        xsd::lexical_ok(self.datatype.as_str(), &self.lexical)
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self.datatype.as_str() {
            xsd::INTEGER => self.lexical.parse().ok(),
            _ => None,
        }
    }

    /// Numeric value of integer, decimal, float and double literals.
    pub fn as_f64(&self) -> Option<f64> {
        match self.datatype.as_str() {
            xsd::INTEGER | xsd::DECIMAL | xsd::FLOAT | xsd::DOUBLE => {
                parse_xsd_float(&self.lexical)
            }
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match (self.datatype.as_str(), self.lexical.as_str()) {
            (xsd::BOOLEAN, "true" | "1") => Some(true),
            (xsd::BOOLEAN, "false" | "0") => Some(false),
            _ => None,
        }
    }
}

fn parse_xsd_float(lexical: &str) -> Option<f64> {
    match lexical {
        "INF" | "+INF" => Some(f64::INFINITY),
        "-INF" => Some(f64::NEG_INFINITY),
        "NaN" => Some(f64::NAN),
        _ => lexical.parse().ok(),
    }
}

/// Canonical-enough lexical form for a double: Rust's shortest round-trip
/// representation.
pub fn format_double(value: f64) -> String {
    if value.is_nan() {
        "NaN".to_owned()
    } else if value.is_infinite() {
        if value > 0.0 { "INF" } else { "-INF" }.to_owned()
    } else {
        format!("{value:?}")
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"^^<{}>", escape_string(&self.lexical), self.datatype)
    }
}

/// An RDF term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
    BlankNode(String),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }
}

impl From<Iri> for Term {
    fn from(value: Iri) -> Self {
        Term::Iri(value)
    }
}

impl From<&Iri> for Term {
    fn from(value: &Iri) -> Self {
        Term::Iri(value.clone())
    }
}

impl From<Literal> for Term {
    fn from(value: Literal) -> Self {
        Term::Literal(value)
    }
}

/// N-Triples style rendering, used in messages and ordering-independent
/// debugging output.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::Literal(lit) => lit.fmt(f),
            Term::BlankNode(label) => write!(f, "_:{label}"),
        }
    }
}

/// A subject-predicate-object statement.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    /// Fails when the subject is a literal.
    pub fn new(subject: Term, predicate: Iri, object: impl Into<Term>) -> Result<Self, RdfError> {
        if subject.is_literal() {
            return Err(RdfError::LiteralSubject(subject.to_string()));
        }
        Ok(Self {
            subject,
            predicate,
            object: object.into(),
        })
    }

    /// Triple with an IRI subject; infallible.
    pub fn iri(subject: &Iri, predicate: &Iri, object: impl Into<Term>) -> Self {
        Self {
            subject: Term::Iri(subject.clone()),
            predicate: predicate.clone(),
            object: object.into(),
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <{}> {} .", self.subject, self.predicate, self.object)
    }
}

pub(crate) fn escape_string(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => {
                out.push_str(&format!("\\u{:04X}", c as u32));
            }
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iri_requires_scheme() {
        assert!(Iri::new("http://ex.org/a").is_ok());
        assert!(Iri::new("urn:x").is_ok());
        assert!(Iri::new("relative/path").is_err());
        assert!(Iri::new("1http://x").is_err());
        assert!(Iri::new("http://ex.org/a b").is_err());
    }

    #[test]
    fn iri_split_prefers_fragment() {
        let iri = Iri::new("http://ex.org/ns#Thing").unwrap();
        assert_eq!(iri.split(), ("http://ex.org/ns", "Thing"));
        let iri = Iri::new("http://ex.org/ns/Thing").unwrap();
        assert_eq!(iri.local_name(), "Thing");
    }

    #[test]
    fn literal_equality_is_lexical() {
        let one = Literal::new("1", Iri::new(xsd::INTEGER).unwrap()).unwrap();
        let padded = Literal::new("01", Iri::new(xsd::INTEGER).unwrap()).unwrap();
        assert_ne!(one, padded);
        assert_eq!(one.as_i64(), padded.as_i64());
    }

    #[test]
    fn literal_rejects_unsupported_datatype() {
        let err = Literal::new("x", Iri::new("http://ex.org/dt").unwrap()).unwrap_err();
        assert!(matches!(err, RdfError::UnsupportedDatatype(_)));
    }

    #[test]
    fn well_typed_checks() {
        assert!(Literal::integer(-4).is_well_typed());
        assert!(!Literal::new("abc", Iri::new(xsd::INTEGER).unwrap())
            .unwrap()
            .is_well_typed());
        assert!(Literal::double(0.75).is_well_typed());
        assert!(Literal::boolean(true).is_well_typed());
    }

    #[test]
    fn literal_subject_rejected() {
        let p = Iri::new("http://ex.org/p").unwrap();
        let err = Triple::new(Literal::string("s").into(), p.clone(), Literal::string("o"));
        assert!(err.is_err());
    }
}
