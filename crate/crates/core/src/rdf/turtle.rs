//! Reader and writer for the Turtle subset used by schemata, shapes and
//! pipeline graphs.
//!
//! Supported: `@prefix`/`PREFIX` directives, prefixed names, `<absolute-iri>`,
//! `_:label` blank nodes, quoted string literals with escapes, integer /
//! decimal / double / boolean shorthand, `^^` datatypes, `a`, and the `;` /
//! `,` list forms. Not supported: `@base`, relative IRIs, collections,
//! `[ ... ]` blank-node property lists, long (triple-quoted) strings and
//! language tags.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Graph, Iri, Literal, RdfError, Term, Triple};
use crate::rdf::term::escape_string;
use crate::vocab::{self, xsd, RDF_NS};

pub fn parse_turtle(text: &str) -> Result<Graph, RdfError> {
    Parser::new(text).parse_document()
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    graph: Graph,
}

#[derive(Clone, Copy)]
struct Mark {
    line: usize,
    col: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Self {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
            graph: Graph::new(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn mark(&self) -> Mark {
        Mark {
            line: self.line,
            col: self.col,
        }
    }

    fn error_at(&self, mark: Mark, message: impl Into<String>) -> RdfError {
        RdfError::Syntax {
            line: mark.line,
            column: mark.col,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> RdfError {
        self.error_at(self.mark(), message)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, want: char) -> Result<(), RdfError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected '{want}', found '{c}'"))),
            None => Err(self.error(format!("expected '{want}', found end of input"))),
        }
    }

    fn parse_document(mut self) -> Result<Graph, RdfError> {
        loop {
            self.skip_ws();
            let Some(c) = self.peek() else {
                return Ok(self.graph);
            };
            if c == '@' {
                self.parse_at_directive()?;
            } else if self.at_keyword_ci("PREFIX") {
                self.parse_sparql_prefix()?;
            } else {
                self.parse_statement()?;
            }
        }
    }

    fn at_keyword_ci(&self, word: &str) -> bool {
        let n = word.len();
        let candidate: String = self.chars[self.pos..].iter().take(n).collect();
        candidate.eq_ignore_ascii_case(word)
            && self
                .peek_at(n)
                .is_some_and(|c| c.is_whitespace())
    }

    fn parse_at_directive(&mut self) -> Result<(), RdfError> {
        let start = self.mark();
        self.bump();
        let word = self.read_while(|c| c.is_ascii_alphabetic());
        if word != "prefix" {
            return Err(self.error_at(start, format!("unsupported directive '@{word}'")));
        }
        self.parse_prefix_body()?;
        self.expect('.')
    }

    fn parse_sparql_prefix(&mut self) -> Result<(), RdfError> {
        for _ in 0.."PREFIX".len() {
            self.bump();
        }
        self.parse_prefix_body()
    }

    fn parse_prefix_body(&mut self) -> Result<(), RdfError> {
        self.skip_ws();
        let mark = self.mark();
        let prefix = self.read_while(is_name_char);
        if prefix.ends_with('.') || prefix.starts_with(|c: char| !c.is_ascii_alphabetic()) {
            return Err(self.error_at(mark, format!("invalid prefix name '{prefix}'")));
        }
        if self.peek() != Some(':') {
            return Err(self.error("expected ':' after prefix name"));
        }
        self.bump();
        self.skip_ws();
        let iri_mark = self.mark();
        let iri = self.parse_iriref()?;
        self.graph
            .bind_prefix(&prefix, iri.as_str())
            .map_err(|e| self.error_at(iri_mark, e.to_string()))
    }

    fn read_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
        out
    }

    fn parse_statement(&mut self) -> Result<(), RdfError> {
        let subject = self.parse_subject()?;
        loop {
            self.skip_ws();
            let predicate = self.parse_verb()?;
            loop {
                let object = self.parse_object()?;
                self.graph.insert(Triple {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                self.skip_ws();
                if self.peek() == Some(',') {
                    self.bump();
                    continue;
                }
                break;
            }
            self.skip_ws();
            match self.peek() {
                Some(';') => {
                    // Repeated or trailing semicolons are allowed.
                    while self.peek() == Some(';') {
                        self.bump();
                        self.skip_ws();
                    }
                    if self.peek() == Some('.') {
                        self.bump();
                        return Ok(());
                    }
                }
                Some('.') => {
                    self.bump();
                    return Ok(());
                }
                Some(c) => {
                    return Err(self.error(format!("expected ',', ';' or '.', found '{c}'")));
                }
                None => return Err(self.error("unterminated statement: expected '.'")),
            }
        }
    }

    fn parse_subject(&mut self) -> Result<Term, RdfError> {
        self.skip_ws();
        match self.peek() {
            Some('_') if self.peek_at(1) == Some(':') => self.parse_blank(),
            Some('"') | Some('\'') => Err(self.error("literal is not allowed as a subject")),
            Some('[') | Some('(') => Err(self.error("blank node property lists and collections are not supported")),
            _ => Ok(Term::Iri(self.parse_iri()?)),
        }
    }

    fn parse_verb(&mut self) -> Result<Iri, RdfError> {
        if self.peek() == Some('a')
            && self
                .peek_at(1)
                .is_none_or(|c| c.is_whitespace() || c == '<' || c == '#')
        {
            self.bump();
            return Ok(vocab::rdf_type());
        }
        self.parse_iri()
    }

    fn parse_object(&mut self) -> Result<Term, RdfError> {
        self.skip_ws();
        let mark = self.mark();
        match self.peek() {
            Some('_') if self.peek_at(1) == Some(':') => self.parse_blank(),
            Some('"') | Some('\'') => self.parse_quoted_literal().map(Term::Literal),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => {
                self.parse_number().map(Term::Literal)
            }
            Some('.') if self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) => {
                self.parse_number().map(Term::Literal)
            }
            Some('[') | Some('(') => Err(self.error_at(
                mark,
                "blank node property lists and collections are not supported",
            )),
            Some(_) => {
                if let Some(value) = self.try_boolean() {
                    return Ok(Term::Literal(Literal::boolean(value)));
                }
                Ok(Term::Iri(self.parse_iri()?))
            }
            None => Err(self.error("expected an object, found end of input")),
        }
    }

    fn try_boolean(&mut self) -> Option<bool> {
        for (word, value) in [("true", true), ("false", false)] {
            let n = word.len();
            let candidate: String = self.chars[self.pos..].iter().take(n).collect();
            let after = self.peek_at(n);
            if candidate == word && after.is_none_or(|c| c == '.' || (!is_name_char(c) && c != ':')) {
                for _ in 0..n {
                    self.bump();
                }
                return Some(value);
            }
        }
        None
    }

    fn parse_blank(&mut self) -> Result<Term, RdfError> {
        let mark = self.mark();
        self.bump();
        self.bump();
        let label = self.read_local_name(false);
        if label.is_empty() {
            return Err(self.error_at(mark, "empty blank node label"));
        }
        Ok(Term::BlankNode(label))
    }

    /// Reads name characters; a dot is kept only when more name characters
    /// follow it, so a trailing dot still terminates the statement.
    fn read_local_name(&mut self, allow_colon: bool) -> String {
        let mut local = String::new();
        while let Some(c) = self.peek() {
            if !(is_name_char(c) || (allow_colon && c == ':')) {
                break;
            }
            if c == '.' && !self.peek_at(1).is_some_and(|n| is_name_char(n) && n != '.') {
                break;
            }
            local.push(c);
            self.bump();
        }
        local
    }

    fn parse_iri(&mut self) -> Result<Iri, RdfError> {
        self.skip_ws();
        match self.peek() {
            Some('<') => self.parse_iriref(),
            Some(_) => self.parse_prefixed_name(),
            None => Err(self.error("expected an IRI, found end of input")),
        }
    }

    fn parse_iriref(&mut self) -> Result<Iri, RdfError> {
        let mark = self.mark();
        if self.peek() != Some('<') {
            return Err(self.error("expected '<'"));
        }
        self.bump();
        let mut value = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some(c) if c == '\n' || c == ' ' || c == '<' || c == '"' => {
                    return Err(self.error_at(mark, "malformed IRI reference"));
                }
                Some(c) => value.push(c),
                None => return Err(self.error_at(mark, "unterminated IRI reference")),
            }
        }
        Iri::new(value).map_err(|e| self.error_at(mark, e.to_string()))
    }

    fn parse_prefixed_name(&mut self) -> Result<Iri, RdfError> {
        let mark = self.mark();
        let prefix = self.read_while(is_name_char);
        if self.peek() != Some(':') {
            return match self.peek() {
                Some(c) if prefix.is_empty() => {
                    Err(self.error_at(mark, format!("unexpected character '{c}'")))
                }
                _ => Err(self.error_at(mark, format!("expected a prefixed name, found '{prefix}'"))),
            };
        }
        self.bump();
        let local = self.read_local_name(true);
        let Some(ns) = self.graph.prefixes().get(&prefix) else {
            return Err(RdfError::UnknownPrefix {
                prefix,
                line: mark.line,
                column: mark.col,
            });
        };
        Iri::new(format!("{ns}{local}")).map_err(|e| self.error_at(mark, e.to_string()))
    }

    fn parse_quoted_literal(&mut self) -> Result<Literal, RdfError> {
        let mark = self.mark();
        let quote = self.bump().expect("caller checked quote");
        if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
            return Err(self.error_at(mark, "long (triple-quoted) literals are not supported"));
        }
        let mut value = String::new();
        loop {
            match self.bump() {
                Some(c) if c == quote => break,
                Some('\\') => value.push(self.parse_escape()?),
                Some('\n') | Some('\r') | None => {
                    return Err(self.error_at(mark, "unterminated string literal"));
                }
                Some(c) => value.push(c),
            }
        }
        match self.peek() {
            Some('^') => {
                let dt_mark = self.mark();
                self.bump();
                if self.bump() != Some('^') {
                    return Err(self.error_at(dt_mark, "expected '^^'"));
                }
                let datatype = self.parse_iri()?;
                Literal::new(value, datatype).map_err(|e| self.error_at(dt_mark, e.to_string()))
            }
            Some('@') => Err(self.error("language-tagged literals are not supported")),
            _ => Ok(Literal::string(value)),
        }
    }

    fn parse_escape(&mut self) -> Result<char, RdfError> {
        let mark = self.mark();
        let c = self
            .bump()
            .ok_or_else(|| self.error_at(mark, "unterminated escape"))?;
        Ok(match c {
            't' => '\t',
            'n' => '\n',
            'r' => '\r',
            'b' => '\u{8}',
            'f' => '\u{c}',
            '"' => '"',
            '\'' => '\'',
            '\\' => '\\',
            'u' | 'U' => {
                let width = if c == 'u' { 4 } else { 8 };
                let mut hex = String::new();
                for _ in 0..width {
                    match self.bump() {
                        Some(h) if h.is_ascii_hexdigit() => hex.push(h),
                        _ => return Err(self.error_at(mark, "malformed unicode escape")),
                    }
                }
                u32::from_str_radix(&hex, 16)
                    .ok()
                    .and_then(char::from_u32)
                    .ok_or_else(|| self.error_at(mark, "invalid unicode code point"))?
            }
            other => return Err(self.error_at(mark, format!("unknown escape '\\{other}'"))),
        })
    }

    fn parse_number(&mut self) -> Result<Literal, RdfError> {
        let mark = self.mark();
        let mut text = String::new();
        if let Some(sign @ ('+' | '-')) = self.peek() {
            text.push(sign);
            self.bump();
        }
        text.push_str(&self.read_while(|c| c.is_ascii_digit()));
        let mut datatype = xsd::INTEGER;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            text.push('.');
            text.push_str(&self.read_while(|c| c.is_ascii_digit()));
            datatype = xsd::DECIMAL;
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            text.push(self.bump().expect("peeked"));
            if let Some(sign @ ('+' | '-')) = self.peek() {
                text.push(sign);
                self.bump();
            }
            let exp = self.read_while(|c| c.is_ascii_digit());
            if exp.is_empty() {
                return Err(self.error_at(mark, "malformed exponent"));
            }
            text.push_str(&exp);
            datatype = xsd::DOUBLE;
        }
        if !xsd::lexical_ok(datatype, &text) && datatype != xsd::DOUBLE {
            return Err(self.error_at(mark, format!("malformed number '{text}'")));
        }
        if self.peek().is_some_and(|c| is_name_char(c) && c != '.') {
            return Err(self.error_at(mark, "malformed number"));
        }
        Literal::new(text, Iri::from_static(datatype)).map_err(|e| self.error_at(mark, e.to_string()))
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '.'
}

fn is_safe_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        }
        _ => false,
    }
}

/// Serializes deterministically: prefix declarations in prefix order, then
/// one statement per subject in term order, predicates and objects sorted.
pub fn serialize_turtle(graph: &Graph) -> String {
    let mut out = String::new();
    for (prefix, ns) in graph.prefixes() {
        let _ = writeln!(out, "@prefix {prefix}: <{ns}> .");
    }
    let writer = TermWriter::new(graph.prefixes());

    let mut grouped: BTreeMap<&Term, BTreeMap<Iri, Vec<&Term>>> = BTreeMap::new();
    let triples: Vec<Triple> = graph.iter().collect();
    for t in &triples {
        grouped
            .entry(&t.subject)
            .or_default()
            .entry(t.predicate.clone())
            .or_default()
            .push(&t.object);
    }
    if !grouped.is_empty() && !out.is_empty() {
        out.push('\n');
    }
    for (subject, predicates) in grouped {
        out.push_str(&writer.term(subject));
        let count = predicates.len();
        for (i, (predicate, objects)) in predicates.into_iter().enumerate() {
            if i > 0 {
                out.push_str("    ");
            } else {
                out.push(' ');
            }
            out.push_str(&writer.predicate(&predicate));
            out.push(' ');
            let rendered: Vec<String> = objects.iter().map(|o| writer.term(o)).collect();
            out.push_str(&rendered.join(", "));
            out.push_str(if i + 1 == count { " .\n" } else { " ;\n" });
        }
    }
    out
}

struct TermWriter<'a> {
    // Longest namespace first so the most specific prefix wins.
    namespaces: Vec<(&'a str, &'a str)>,
}

impl<'a> TermWriter<'a> {
    fn new(prefixes: &'a BTreeMap<String, String>) -> Self {
        let mut namespaces: Vec<(&str, &str)> = prefixes
            .iter()
            .map(|(p, ns)| (p.as_str(), ns.as_str()))
            .collect();
        namespaces.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(b.0)));
        Self { namespaces }
    }

    fn iri(&self, iri: &Iri) -> String {
        for (prefix, ns) in &self.namespaces {
            if let Some(local) = iri.as_str().strip_prefix(ns) {
                if is_safe_local(local) {
                    return format!("{prefix}:{local}");
                }
            }
        }
        format!("<{iri}>")
    }

    fn predicate(&self, iri: &Iri) -> String {
        if iri.as_str() == format!("{RDF_NS}type") {
            "a".to_owned()
        } else {
            self.iri(iri)
        }
    }

    fn term(&self, term: &Term) -> String {
        match term {
            Term::Iri(iri) => self.iri(iri),
            Term::BlankNode(label) => format!("_:{label}"),
            Term::Literal(lit) => {
                let quoted = format!("\"{}\"", escape_string(lit.lexical()));
                if lit.datatype().as_str() == xsd::STRING {
                    quoted
                } else {
                    format!("{quoted}^^{}", self.iri(lit.datatype()))
                }
            }
        }
    }
}
