use std::collections::{BTreeMap, BTreeSet};

use super::{Iri, RdfError, Term, Triple};
use crate::vocab::{self, RESERVED_PREFIXES};

type Index = BTreeMap<Term, BTreeMap<Term, BTreeSet<Term>>>;

/// A set of triples plus the prefix map used when serializing it.
///
/// Two graphs compare equal when they hold the same triples; prefixes are
/// presentation only.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    // subject -> predicate -> objects
    spo: Index,
    // predicate -> object -> subjects
    pos: Index,
    len: usize,
    prefixes: BTreeMap<String, String>,
}

/// One position of a [`TriplePattern`]: `None` is a wildcard.
pub type Slot<T> = Option<T>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: Slot<Term>,
    pub predicate: Slot<Iri>,
    pub object: Slot<Term>,
}

impl TriplePattern {
    pub fn any() -> Self {
        Self::default()
    }

    pub fn new(subject: Slot<Term>, predicate: Slot<Iri>, object: Slot<Term>) -> Self {
        Self {
            subject,
            predicate,
            object,
        }
    }

    pub fn matches(&self, triple: &Triple) -> bool {
        self.subject.as_ref().is_none_or(|s| *s == triple.subject)
            && self.predicate.as_ref().is_none_or(|p| *p == triple.predicate)
            && self.object.as_ref().is_none_or(|o| *o == triple.object)
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.spo == other.spo
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Graph pre-bound with the reserved prefixes.
    pub fn with_standard_prefixes() -> Self {
        let mut graph = Self::new();
        for (prefix, ns) in RESERVED_PREFIXES {
            graph.prefixes.insert((*prefix).to_owned(), (*ns).to_owned());
        }
        graph
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn prefixes(&self) -> &BTreeMap<String, String> {
        &self.prefixes
    }

    /// Binds `prefix` to `namespace`. Reserved prefixes may only be bound to
    /// their standard namespace.
    pub fn bind_prefix(&mut self, prefix: &str, namespace: &str) -> Result<(), RdfError> {
        if let Some((_, ns)) = RESERVED_PREFIXES.iter().find(|(p, _)| *p == prefix) {
            if *ns != namespace {
                return Err(RdfError::ReservedPrefix {
                    prefix: prefix.to_owned(),
                    namespace: namespace.to_owned(),
                });
            }
        }
        self.prefixes.insert(prefix.to_owned(), namespace.to_owned());
        Ok(())
    }

    /// Returns true if the triple was not already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        let Triple {
            subject,
            predicate,
            object,
        } = triple;
        let predicate = Term::Iri(predicate);
        let added = self
            .spo
            .entry(subject.clone())
            .or_default()
            .entry(predicate.clone())
            .or_default()
            .insert(object.clone());
        if added {
            self.pos
                .entry(predicate)
                .or_default()
                .entry(object)
                .or_default()
                .insert(subject);
            self.len += 1;
        }
        added
    }

    /// Returns true if the triple was present. Removing an absent triple is a
    /// no-op.
    pub fn remove(&mut self, triple: &Triple) -> bool {
        let predicate = Term::Iri(triple.predicate.clone());
        let removed = remove_nested(&mut self.spo, &triple.subject, &predicate, &triple.object);
        if removed {
            remove_nested(&mut self.pos, &predicate, &triple.object, &triple.subject);
            self.len -= 1;
        }
        removed
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.spo
            .get(&triple.subject)
            .and_then(|p| p.get(&Term::Iri(triple.predicate.clone())))
            .is_some_and(|o| o.contains(&triple.object))
    }

    pub fn extend(&mut self, triples: impl IntoIterator<Item = Triple>) {
        for triple in triples {
            self.insert(triple);
        }
    }

    /// Merges triples and prefixes from `other`.
    pub fn merge(&mut self, other: &Graph) {
        for (prefix, ns) in &other.prefixes {
            self.prefixes.entry(prefix.clone()).or_insert_with(|| ns.clone());
        }
        self.extend(other.iter());
    }

    /// All triples in (subject, predicate, object) order.
    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().flat_map(|(s, po)| {
            po.iter().flat_map(move |(p, os)| {
                os.iter().map(move |o| Triple {
                    subject: s.clone(),
                    predicate: p.as_iri().expect("predicate is an IRI").clone(),
                    object: o.clone(),
                })
            })
        })
    }

    /// Every triple unifying with `pattern`, in (subject, predicate, object)
    /// order.
    pub fn match_pattern(&self, pattern: &TriplePattern) -> Vec<Triple> {
        let predicate = pattern.predicate.clone().map(Term::Iri);
        match (&pattern.subject, &predicate) {
            (Some(s), _) => {
                let Some(po) = self.spo.get(s) else {
                    return Vec::new();
                };
                po.iter()
                    .filter(|(p, _)| predicate.as_ref().is_none_or(|want| want == *p))
                    .flat_map(|(p, os)| {
                        os.iter()
                            .filter(|o| pattern.object.as_ref().is_none_or(|want| want == *o))
                            .map(move |o| Triple {
                                subject: s.clone(),
                                predicate: p.as_iri().expect("predicate is an IRI").clone(),
                                object: o.clone(),
                            })
                    })
                    .collect()
            }
            (None, Some(_)) => {
                let mut out: Vec<Triple> = self
                    .iter_predicate(pattern.predicate.as_ref().expect("bound"))
                    .filter(|t| pattern.object.as_ref().is_none_or(|o| *o == t.object))
                    .collect();
                out.sort();
                out
            }
            (None, None) => self.iter().filter(|t| pattern.matches(t)).collect(),
        }
    }

    fn iter_predicate<'a>(&'a self, predicate: &'a Iri) -> impl Iterator<Item = Triple> + 'a {
        self.pos
            .get(&Term::Iri(predicate.clone()))
            .into_iter()
            .flat_map(move |os| {
                os.iter().flat_map(move |(o, ss)| {
                    ss.iter().map(move |s| Triple {
                        subject: s.clone(),
                        predicate: predicate.clone(),
                        object: o.clone(),
                    })
                })
            })
    }

    /// Objects of `(subject, predicate, *)`, sorted.
    pub fn objects<'a>(&'a self, subject: &Term, predicate: &Iri) -> impl Iterator<Item = &'a Term> {
        self.spo
            .get(subject)
            .and_then(|po| po.get(&Term::Iri(predicate.clone())))
            .into_iter()
            .flatten()
    }

    /// Subjects of `(*, predicate, object)`, sorted.
    pub fn subjects<'a>(&'a self, predicate: &Iri, object: &Term) -> impl Iterator<Item = &'a Term> {
        self.pos
            .get(&Term::Iri(predicate.clone()))
            .and_then(|os| os.get(object))
            .into_iter()
            .flatten()
    }

    /// First object of `(subject, predicate, *)` in term order.
    pub fn object(&self, subject: &Term, predicate: &Iri) -> Option<&Term> {
        self.objects(subject, predicate).next()
    }

    /// Distinct subjects in order.
    pub fn subject_terms(&self) -> impl Iterator<Item = &Term> {
        self.spo.keys()
    }

    /// IRI-typed instances of `class` (direct `rdf:type` only).
    pub fn instances_of(&self, class: &Iri) -> Vec<Term> {
        self.subjects(&vocab::rdf_type(), &Term::Iri(class.clone()))
            .cloned()
            .collect()
    }

    /// `rdf:type` values of `subject` that are IRIs.
    pub fn types_of(&self, subject: &Term) -> Vec<Iri> {
        self.objects(subject, &vocab::rdf_type())
            .filter_map(|t| t.as_iri().cloned())
            .collect()
    }
}

fn remove_nested(index: &mut Index, a: &Term, b: &Term, c: &Term) -> bool {
    let Some(level1) = index.get_mut(a) else {
        return false;
    };
    let Some(level2) = level1.get_mut(b) else {
        return false;
    };
    let removed = level2.remove(c);
    if level2.is_empty() {
        level1.remove(b);
    }
    if level1.is_empty() {
        index.remove(a);
    }
    removed
}

impl FromIterator<Triple> for Graph {
    fn from_iter<T: IntoIterator<Item = Triple>>(iter: T) -> Self {
        let mut graph = Graph::new();
        graph.extend(iter);
        graph
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::Literal;

    fn iri(s: &str) -> Iri {
        Iri::new(format!("http://ex.org/{s}")).unwrap()
    }

    fn t(s: &str, p: &str, o: &str) -> Triple {
        Triple::iri(&iri(s), &iri(p), iri(o))
    }

    #[test]
    fn insert_is_idempotent() {
        let mut g = Graph::new();
        assert!(g.insert(t("a", "p", "b")));
        assert!(!g.insert(t("a", "p", "b")));
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn remove_after_insert_restores() {
        let mut g: Graph = [t("a", "p", "b"), t("a", "q", "c")].into_iter().collect();
        let original = g.clone();
        let extra = t("x", "p", "y");
        g.insert(extra.clone());
        assert!(g.remove(&extra));
        assert_eq!(g, original);
        assert!(!g.remove(&extra));
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn match_patterns() {
        let g: Graph = [t("a", "p", "b"), t("a", "q", "c"), t("d", "p", "b")]
            .into_iter()
            .collect();
        assert_eq!(g.match_pattern(&TriplePattern::any()).len(), 3);
        let by_pred = g.match_pattern(&TriplePattern::new(None, Some(iri("p")), None));
        assert_eq!(by_pred, vec![t("a", "p", "b"), t("d", "p", "b")]);
        let missing = g.match_pattern(&TriplePattern::new(
            Some(Term::Iri(iri("a"))),
            Some(iri("missing")),
            None,
        ));
        assert!(missing.is_empty());
        let by_obj = g.match_pattern(&TriplePattern::new(None, None, Some(iri("c").into())));
        assert_eq!(by_obj, vec![t("a", "q", "c")]);
    }

    #[test]
    fn insertion_order_does_not_matter() {
        let triples = [
            t("a", "p", "b"),
            Triple::iri(&iri("a"), &iri("v"), Literal::integer(3)),
            t("c", "p", "a"),
        ];
        let forward: Graph = triples.iter().cloned().collect();
        let backward: Graph = triples.iter().rev().cloned().collect();
        assert_eq!(forward, backward);
        assert_eq!(forward.iter().collect::<Vec<_>>(), backward.iter().collect::<Vec<_>>());
    }

    #[test]
    fn reserved_prefix_binding() {
        let mut g = Graph::new();
        assert!(g.bind_prefix("ds", crate::vocab::DS_NS).is_ok());
        assert!(g.bind_prefix("ds", "http://other.org/#").is_err());
        assert!(g.bind_prefix("ex", "http://ex.org/").is_ok());
    }
}
