//! Conjunctive queries, threshold queries and their unions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::degree::Degree;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Individual(String),
    Variable(String),
    /// An undistinguished, unshared variable (`_`). Every occurrence is a
    /// different variable.
    Anonymous,
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Variable(name.into())
    }

    pub fn ind(name: impl Into<String>) -> Self {
        Term::Individual(name.into())
    }

    pub fn as_variable(&self) -> Option<&str> {
        match self {
            Term::Variable(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Individual(name) => write!(f, "\"{name}\""),
            Term::Variable(name) => f.write_str(name),
            Term::Anonymous => f.write_str("_"),
        }
    }
}

/// `A(t)` or `P(t1, t2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Concept { name: String, term: Term },
    Role { name: String, subject: Term, object: Term },
}

impl Atom {
    pub fn concept(name: impl Into<String>, term: Term) -> Self {
        Atom::Concept { name: name.into(), term }
    }

    pub fn role(name: impl Into<String>, subject: Term, object: Term) -> Self {
        Atom::Role { name: name.into(), subject, object }
    }

    pub fn predicate(&self) -> &str {
        match self {
            Atom::Concept { name, .. } | Atom::Role { name, .. } => name,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Atom::Concept { .. } => 1,
            Atom::Role { .. } => 2,
        }
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Concept { term, .. } => vec![term],
            Atom::Role { subject, object, .. } => vec![subject, object],
        }
    }

    pub(crate) fn terms_mut(&mut self) -> Vec<&mut Term> {
        match self {
            Atom::Concept { term, .. } => vec![term],
            Atom::Role { subject, object, .. } => vec![subject, object],
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.terms().into_iter().filter_map(Term::as_variable)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Concept { name, term } => write!(f, "{name}({term})"),
            Atom::Role { name, subject, object } => write!(f, "{name}({subject}, {object})"),
        }
    }
}

/// `α ≥ d`
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThresholdAtom {
    pub atom: Atom,
    pub bound: Degree,
}

impl ThresholdAtom {
    pub fn new(atom: Atom, bound: Degree) -> Self {
        ThresholdAtom { atom, bound }
    }
}

impl fmt::Display for ThresholdAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} >= {}", self.atom, self.bound)
    }
}

/// Checks the shared well-formedness rules of both query kinds.
fn validate<'a>(head: &[Term], atoms: impl Iterator<Item = &'a Atom> + Clone) -> Result<()> {
    let mut arities: BTreeMap<&str, usize> = BTreeMap::new();
    for atom in atoms.clone() {
        if let Some(previous) = arities.insert(atom.predicate(), atom.arity()) {
            if previous != atom.arity() {
                return Err(Error::InvalidQuery(format!(
                    "predicate `{}` used with arities {previous} and {}",
                    atom.predicate(),
                    atom.arity()
                )));
            }
        }
    }
    let body_vars: BTreeSet<&str> = atoms.flat_map(|a| a.variables()).collect();
    for term in head {
        match term {
            Term::Anonymous => return Err(Error::InvalidQuery("`_` cannot be an answer variable".into())),
            Term::Variable(v) if !body_vars.contains(v.as_str()) => {
                return Err(Error::InvalidQuery(format!("answer variable `{v}` does not occur in the query body")))
            }
            _ => {}
        }
    }
    Ok(())
}

fn write_head(f: &mut fmt::Formatter<'_>, name: &str, head: &[Term]) -> fmt::Result {
    write!(f, "{name}(")?;
    for (i, t) in head.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{t}")?;
    }
    f.write_str(") :-")
}

/// `q(x) = ∃y. φ(x, y)` with untagged atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConjunctiveQuery {
    pub name: String,
    /// Answer terms. Parsed queries only hold variables here.
    pub head: Vec<Term>,
    pub atoms: Vec<Atom>,
}

impl ConjunctiveQuery {
    pub fn new(name: impl Into<String>, head: Vec<Term>, atoms: Vec<Atom>) -> Result<Self> {
        validate(&head, atoms.iter())?;
        Ok(ConjunctiveQuery { name: name.into(), head, atoms })
    }

    pub fn arity(&self) -> usize {
        self.head.len()
    }

    pub fn answer_variables(&self) -> Vec<&str> {
        self.head.iter().filter_map(Term::as_variable).collect()
    }
}

impl fmt::Display for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_head(f, &self.name, &self.head)?;
        for (i, a) in self.atoms.iter().enumerate() {
            f.write_str(if i == 0 { " " } else { ", " })?;
            write!(f, "{a}")?;
        }
        f.write_str(".")
    }
}

/// A conjunction of threshold atoms with answer terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThresholdQuery {
    pub name: String,
    pub head: Vec<Term>,
    pub atoms: Vec<ThresholdAtom>,
}

impl ThresholdQuery {
    pub fn new(name: impl Into<String>, head: Vec<Term>, atoms: Vec<ThresholdAtom>) -> Result<Self> {
        validate(&head, atoms.iter().map(|a| &a.atom))?;
        if let Some(a) = atoms.iter().find(|a| a.bound.is_zero()) {
            return Err(Error::InvalidQuery(format!("threshold atom `{a}` has bound 0")));
        }
        Ok(ThresholdQuery { name: name.into(), head, atoms })
    }

    pub fn arity(&self) -> usize {
        self.head.len()
    }

    /// The same atoms without bounds.
    pub fn to_conjunctive(&self) -> ConjunctiveQuery {
        ConjunctiveQuery {
            name: self.name.clone(),
            head: self.head.clone(),
            atoms: self.atoms.iter().map(|a| a.atom.clone()).collect(),
        }
    }
}

impl fmt::Display for ThresholdQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_head(f, &self.name, &self.head)?;
        for (i, a) in self.atoms.iter().enumerate() {
            f.write_str(if i == 0 { " " } else { ", " })?;
            write!(f, "{a}")?;
        }
        f.write_str(".")
    }
}

/// A parsed query of either kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Conjunctive(ConjunctiveQuery),
    Threshold(ThresholdQuery),
}

impl Query {
    pub fn arity(&self) -> usize {
        match self {
            Query::Conjunctive(q) => q.arity(),
            Query::Threshold(q) => q.arity(),
        }
    }

    pub fn into_conjunctive(self) -> Result<ConjunctiveQuery> {
        match self {
            Query::Conjunctive(q) => Ok(q),
            Query::Threshold(q) => {
                Err(Error::InvalidQuery(format!("`{q}` carries thresholds; a conjunctive query is expected")))
            }
        }
    }

    pub fn into_threshold(self) -> Result<ThresholdQuery> {
        match self {
            Query::Threshold(q) => Ok(q),
            Query::Conjunctive(q) => {
                Err(Error::InvalidQuery(format!("`{q}` has no thresholds; a threshold query is expected")))
            }
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Conjunctive(q) => q.fmt(f),
            Query::Threshold(q) => q.fmt(f),
        }
    }
}

/// A union of threshold queries with a common arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnionTQ {
    queries: Vec<ThresholdQuery>,
}

impl UnionTQ {
    pub fn new(queries: Vec<ThresholdQuery>) -> Result<Self> {
        let Some(first) = queries.first() else {
            return Err(Error::InvalidQuery("a union needs at least one query".into()));
        };
        let arity = first.arity();
        if queries.iter().any(|q| q.arity() != arity) {
            return Err(Error::InvalidQuery("union members differ in arity".into()));
        }
        Ok(UnionTQ { queries })
    }

    pub fn queries(&self) -> &[ThresholdQuery] {
        &self.queries
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.queries[0].arity()
    }

    pub fn contains(&self, q: &ThresholdQuery) -> bool {
        self.queries.contains(q)
    }

    /// Set union of the disjuncts.
    pub fn union(&self, other: &UnionTQ) -> Result<UnionTQ> {
        let mut queries = self.queries.clone();
        for q in &other.queries {
            if !queries.contains(q) {
                queries.push(q.clone());
            }
        }
        UnionTQ::new(queries)
    }
}

impl fmt::Display for UnionTQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.queries {
            writeln!(f, "{q}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::deg;

    #[test]
    fn head_variable_must_occur() {
        let err = ConjunctiveQuery::new("q", vec![Term::var("x")], vec![Atom::concept("A", Term::var("y"))]);
        assert!(matches!(err, Err(Error::InvalidQuery(_))));
    }

    #[test]
    fn zero_bound_rejected() {
        let err = ThresholdQuery::new(
            "q",
            vec![],
            vec![ThresholdAtom::new(Atom::concept("A", Term::Anonymous), Degree::zero())],
        );
        assert!(err.is_err());
    }

    #[test]
    fn mixed_arity_rejected() {
        let err = ConjunctiveQuery::new(
            "q",
            vec![],
            vec![Atom::concept("A", Term::var("x")), Atom::role("A", Term::var("x"), Term::var("y"))],
        );
        assert!(err.is_err());
    }

    #[test]
    fn display() {
        let q = ThresholdQuery::new(
            "q",
            vec![Term::var("x")],
            vec![
                ThresholdAtom::new(Atom::concept("Cheap", Term::var("x")), deg("0.8")),
                ThresholdAtom::new(Atom::role("near", Term::var("x"), Term::ind("comic")), deg("2/3")),
            ],
        )
        .unwrap();
        assert_eq!(q.to_string(), "q(x) :- Cheap(x) >= 0.8, near(x, \"comic\") >= 2/3.");
    }
}
