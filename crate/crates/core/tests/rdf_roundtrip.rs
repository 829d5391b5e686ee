use std::collections::BTreeSet;

use exekg_core::rdf::{match_triples, RdfError};
use exekg_core::schema::BUILTIN_SCHEMATA;
use exekg_core::validator::SHAPES_TTL;
use exekg_core::{parse_turtle, serialize_turtle, Graph, Iri, Literal, Term, Triple, TriplePattern};
use proptest::prelude::*;

const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

fn triple_set(g: &Graph) -> BTreeSet<Triple> {
    g.iter().collect()
}

fn iri_strategy() -> impl Strategy<Value = Iri> {
    let ns = prop::sample::select(vec![
        "http://example.org/ns#",
        "http://example.org/other/",
        "urn:test:",
        "http://www.w3id.org/exeKG/ds#",
    ]);
    // Locals cover both prefixed-name-safe and unsafe shapes.
    let local = prop_oneof![
        "[A-Za-z_][A-Za-z0-9_-]{0,8}",
        "[0-9][a-z0-9]{0,4}",
        "[a-z]{1,3}[./%~:][a-z0-9]{0,3}",
        Just(String::new()),
    ];
    (ns, local).prop_map(|(ns, local)| Iri::new(format!("{ns}{local}")).unwrap())
}

fn literal_strategy() -> impl Strategy<Value = Literal> {
    prop_oneof![
        "[ -~\\n\\t\\r\"\\\\\u{e9}\u{4e16}]{0,16}".prop_map(Literal::string),
        any::<i64>().prop_map(Literal::integer),
        (-1.0e9f64..1.0e9).prop_map(Literal::double),
        any::<bool>().prop_map(Literal::boolean),
        (-99_999i64..99_999, 0u32..4).prop_map(|(n, scale)| {
            let text = format!("{:.*}", scale as usize, n as f64 / 10f64.powi(scale as i32));
            Literal::new(text, Iri::new(format!("{XSD}decimal")).unwrap()).unwrap()
        }),
        // Ill-typed lexical forms must survive too.
        "[a-z ]{1,6}".prop_map(|s| Literal::new(s, Iri::new(format!("{XSD}integer")).unwrap()).unwrap()),
    ]
}

fn blank_strategy() -> impl Strategy<Value = Term> {
    "b[0-9]{1,3}".prop_map(Term::BlankNode)
}

fn subject_strategy() -> impl Strategy<Value = Term> {
    prop_oneof![3 => iri_strategy().prop_map(Term::Iri), 1 => blank_strategy()]
}

fn object_strategy() -> impl Strategy<Value = Term> {
    prop_oneof![
        2 => iri_strategy().prop_map(Term::Iri),
        2 => literal_strategy().prop_map(Term::Literal),
        1 => blank_strategy(),
    ]
}

fn triple_strategy() -> impl Strategy<Value = Triple> {
    (subject_strategy(), iri_strategy(), object_strategy()).prop_map(|(s, p, o)| Triple::new(s, p, o).unwrap())
}

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (prop::collection::vec(triple_strategy(), 0..40), any::<bool>()).prop_map(|(triples, prefixed)| {
        let mut g = if prefixed { Graph::with_standard_prefixes() } else { Graph::new() };
        if prefixed {
            g.bind_prefix("ex", "http://example.org/ns#").unwrap();
            g.bind_prefix("oth", "http://example.org/other/").unwrap();
        }
        g.extend(triples);
        g
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn random_graphs_round_trip(g in graph_strategy()) {
        let text = serialize_turtle(&g);
        let back = parse_turtle(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(triple_set(&back), triple_set(&g));
        prop_assert_eq!(serialize_turtle(&back), text);
    }

    #[test]
    fn insertion_is_idempotent(triples in prop::collection::vec(triple_strategy(), 0..30)) {
        let mut once = Graph::new();
        once.extend(triples.clone());
        let mut twice = once.clone();
        twice.extend(triples);
        prop_assert_eq!(twice.len(), once.len());
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn insertion_is_commutative(triples in prop::collection::vec(triple_strategy(), 0..30)) {
        let mut forward = Graph::new();
        forward.extend(triples.clone());
        let mut backward = Graph::new();
        backward.extend(triples.into_iter().rev());
        prop_assert_eq!(&forward, &backward);
        prop_assert_eq!(serialize_turtle(&forward), serialize_turtle(&backward));
    }

    #[test]
    fn universal_pattern_matches_everything(g in graph_strategy()) {
        let all = match_triples(&g, &TriplePattern::any());
        prop_assert_eq!(all.len(), g.len());
        prop_assert_eq!(all.into_iter().collect::<BTreeSet<_>>(), triple_set(&g));
    }

    #[test]
    fn bound_patterns_agree_with_filtering(g in graph_strategy(), pick in any::<prop::sample::Index>()) {
        prop_assume!(!g.is_empty());
        let all: Vec<Triple> = g.iter().collect();
        let t = &all[pick.index(all.len())];
        let patterns = [
            TriplePattern::new(Some(t.subject.clone()), None, None),
            TriplePattern::new(None, Some(t.predicate.clone()), None),
            TriplePattern::new(None, None, Some(t.object.clone())),
            TriplePattern::new(None, Some(t.predicate.clone()), Some(t.object.clone())),
            TriplePattern::new(Some(t.subject.clone()), Some(t.predicate.clone()), Some(t.object.clone())),
        ];
        for p in &patterns {
            let expected: BTreeSet<Triple> = all.iter().filter(|x| p.matches(x)).cloned().collect();
            let got: BTreeSet<Triple> = g.match_pattern(p).into_iter().collect();
            prop_assert!(got.contains(t));
            prop_assert_eq!(got, expected);
        }
    }
}

fn corpus() -> Vec<(&'static str, &'static str)> {
    let mut docs: Vec<(&str, &str)> = BUILTIN_SCHEMATA.to_vec();
    docs.push(("shapes", SHAPES_TTL));
    docs
}

#[test]
fn shipped_documents_round_trip() {
    for (name, text) in corpus() {
        let g = parse_turtle(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!g.is_empty(), "{name}");
        let back = parse_turtle(&serialize_turtle(&g)).unwrap();
        assert_eq!(triple_set(&back), triple_set(&g), "{name}");
    }
}

fn strip_literals_and_comments(line: &str) -> String {
    let mut out = String::new();
    let mut in_string = false;
    let mut escaped = false;
    for c in line.chars() {
        if in_string {
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_string = false;
            }
            continue;
        }
        match c {
            '"' => in_string = true,
            '#' if out.ends_with(' ') || out.is_empty() => break,
            c => out.push(c),
        }
    }
    out
}

/// Counts triples from punctuation: each statement contributes one, and each
/// `;` or `,` one more.
fn count_triples(text: &str) -> usize {
    let mut statements = 0;
    let mut separators = 0;
    for line in text.lines() {
        let code = strip_literals_and_comments(line);
        let code = code.trim_end();
        if code.trim_start().starts_with("@prefix") {
            continue;
        }
        if code.ends_with(" .") {
            statements += 1;
        }
        separators += code.matches(" ;").count() + code.matches(',').count();
    }
    statements + separators
}

#[test]
fn triple_counts_match_punctuation() {
    for (name, text) in corpus() {
        let g = parse_turtle(text).unwrap();
        assert_eq!(g.len(), count_triples(text), "{name}");
    }
}

fn statement_lines(text: &str) -> Vec<usize> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, _)| i)
        .collect()
}

fn mutate_line(text: &str, index: usize, f: impl Fn(&str) -> String) -> String {
    text.lines()
        .enumerate()
        .map(|(i, l)| if i == index { f(l) } else { l.to_owned() })
        .collect::<Vec<_>>()
        .join("\n")
}

fn assert_near(name: &str, mutated: &str, line: usize) {
    match parse_turtle(mutated) {
        Ok(_) => panic!("{name}: mutation at line {line} parsed"),
        Err(e) => {
            let reported = e.line().unwrap_or_else(|| panic!("{name}: unpositioned error {e}"));
            assert!(reported.abs_diff(line) <= 1, "{name}: mutation at line {line}, reported {reported}: {e}");
        }
    }
}

#[test]
fn stray_token_is_reported_near_its_line() {
    for (name, text) in corpus() {
        for index in statement_lines(text) {
            let mutated = mutate_line(text, index, |l| {
                let indent = l.len() - l.trim_start().len();
                format!("{}}} {}", &l[..indent], &l[indent..])
            });
            assert_near(name, &mutated, index + 1);
        }
    }
}

#[test]
fn missing_terminator_is_reported_near_its_line() {
    for (name, text) in corpus() {
        let lines: Vec<&str> = text.lines().collect();
        for index in statement_lines(text) {
            let line = lines[index];
            let next_is_statement = lines
                .get(index + 1)
                .is_some_and(|n| !n.trim().is_empty() && !n.trim_start().starts_with('#'));
            if line.trim_start().starts_with("@prefix") || !line.ends_with(" .") || !next_is_statement {
                continue;
            }
            let mutated = mutate_line(text, index, |l| l[..l.len() - 2].to_owned());
            assert_near(name, &mutated, index + 1);
        }
    }
}

#[test]
fn unknown_prefix_is_positioned() {
    let err = parse_turtle("@prefix ex: <http://example.org/> .\nex:a ex:b ex:c .\nzz:a ex:b ex:c .\n").unwrap_err();
    assert!(matches!(err, RdfError::UnknownPrefix { line: 3, .. }), "{err}");
}
