//! Fuzzy DL-Lite_R ontologies and their structural transformations.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::degree::Degree;
use crate::error::{Error, Result};

/// Prefix reserved for concept names introduced by [`normalize`].
pub const RESERVED_PREFIX: &str = "__norm";

/// `P` or `P⁻`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasicRole {
    pub name: String,
    pub inverted: bool,
}

impl BasicRole {
    pub fn direct(name: impl Into<String>) -> Self {
        BasicRole { name: name.into(), inverted: false }
    }

    pub fn inverse(name: impl Into<String>) -> Self {
        BasicRole { name: name.into(), inverted: true }
    }

    pub fn inverted(&self) -> Self {
        BasicRole { name: self.name.clone(), inverted: !self.inverted }
    }
}

impl fmt::Display for BasicRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "{}-", self.name)
        } else {
            f.write_str(&self.name)
        }
    }
}

/// `A` or `∃Q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasicConcept {
    Named(String),
    Exists(BasicRole),
}

impl BasicConcept {
    pub fn named(name: impl Into<String>) -> Self {
        BasicConcept::Named(name.into())
    }

    pub fn exists(role: BasicRole) -> Self {
        BasicConcept::Exists(role)
    }
}

impl fmt::Display for BasicConcept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicConcept::Named(name) => f.write_str(name),
            BasicConcept::Exists(role) => write!(f, "EX {role}"),
        }
    }
}

/// `B` or `¬B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneralConcept {
    Positive(BasicConcept),
    Negated(BasicConcept),
}

impl GeneralConcept {
    pub fn basic(&self) -> &BasicConcept {
        match self {
            GeneralConcept::Positive(b) | GeneralConcept::Negated(b) => b,
        }
    }

    pub fn is_negated(&self) -> bool {
        matches!(self, GeneralConcept::Negated(_))
    }
}

/// `Q` or `¬Q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneralRole {
    Positive(BasicRole),
    Negated(BasicRole),
}

impl GeneralRole {
    pub fn basic(&self) -> &BasicRole {
        match self {
            GeneralRole::Positive(q) | GeneralRole::Negated(q) => q,
        }
    }

    pub fn is_negated(&self) -> bool {
        matches!(self, GeneralRole::Negated(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Inclusion {
    Concept { lhs: BasicConcept, rhs: GeneralConcept },
    Role { lhs: BasicRole, rhs: GeneralRole },
}

/// A graded inclusion `⟨B ⊑ C, d⟩` or `⟨Q ⊑ R, d⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Axiom {
    pub inclusion: Inclusion,
    pub degree: Degree,
}

impl Axiom {
    pub fn concept(lhs: BasicConcept, rhs: GeneralConcept, degree: Degree) -> Self {
        Axiom { inclusion: Inclusion::Concept { lhs, rhs }, degree }
    }

    pub fn role(lhs: BasicRole, rhs: GeneralRole, degree: Degree) -> Self {
        Axiom { inclusion: Inclusion::Role { lhs, rhs }, degree }
    }

    /// `⟨lhs ⊑ rhs, d⟩` between basic concepts.
    pub fn subsumes(lhs: BasicConcept, rhs: BasicConcept, degree: Degree) -> Self {
        Axiom::concept(lhs, GeneralConcept::Positive(rhs), degree)
    }

    pub fn is_negative(&self) -> bool {
        match &self.inclusion {
            Inclusion::Concept { rhs, .. } => rhs.is_negated(),
            Inclusion::Role { rhs, .. } => rhs.is_negated(),
        }
    }

    pub fn is_positive(&self) -> bool {
        !self.is_negative()
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.inclusion {
            Inclusion::Concept { lhs, rhs } => {
                let not = if rhs.is_negated() { "NOT " } else { "" };
                write!(f, "{lhs} SUBC {not}{} >= {}", rhs.basic(), self.degree)
            }
            Inclusion::Role { lhs, rhs } => {
                let not = if rhs.is_negated() { "NOT " } else { "" };
                write!(f, "{lhs} SUBR {not}{} >= {}", rhs.basic(), self.degree)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Fact {
    Concept { concept: BasicConcept, individual: String },
    Role { role: String, subject: String, object: String },
}

/// A graded assertion `⟨B(a), d⟩` or `⟨P(a, b), d⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assertion {
    pub fact: Fact,
    pub degree: Degree,
}

impl Assertion {
    pub fn concept(concept: BasicConcept, individual: impl Into<String>, degree: Degree) -> Self {
        Assertion { fact: Fact::Concept { concept, individual: individual.into() }, degree }
    }

    pub fn named(concept: &str, individual: &str, degree: Degree) -> Self {
        Assertion::concept(BasicConcept::named(concept), individual, degree)
    }

    pub fn role(
        role: impl Into<String>,
        subject: impl Into<String>,
        object: impl Into<String>,
        degree: Degree,
    ) -> Self {
        Assertion { fact: Fact::Role { role: role.into(), subject: subject.into(), object: object.into() }, degree }
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.fact {
            Fact::Concept { concept, individual } => {
                write!(f, "{concept}({individual}) >= {}", self.degree)
            }
            Fact::Role { role, subject, object } => {
                write!(f, "{role}({subject}, {object}) >= {}", self.degree)
            }
        }
    }
}

/// Either kind of ontology statement.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Statement {
    Axiom(Axiom),
    Assertion(Assertion),
}

impl Statement {
    pub fn degree(&self) -> &Degree {
        match self {
            Statement::Axiom(a) => &a.degree,
            Statement::Assertion(a) => &a.degree,
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Axiom(a) => a.fmt(f),
            Statement::Assertion(a) => a.fmt(f),
        }
    }
}

/// Names used by an ontology.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
    pub individuals: BTreeSet<String>,
}

impl Signature {
    fn add_basic_role(&mut self, role: &BasicRole) {
        self.roles.insert(role.name.clone());
    }

    fn add_basic_concept(&mut self, concept: &BasicConcept) {
        match concept {
            BasicConcept::Named(name) => {
                self.concepts.insert(name.clone());
            }
            BasicConcept::Exists(role) => self.add_basic_role(role),
        }
    }
}

/// A fuzzy ontology `(T, A)`. Immutable once built.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    tbox: Vec<Axiom>,
    abox: Vec<Assertion>,
    signature: Signature,
}

impl Ontology {
    /// Validates and assembles an ontology.
    ///
    /// Rejects zero degrees, names that are used both as a concept and as a
    /// role, and user names carrying the reserved normalization prefix.
    pub fn new(tbox: Vec<Axiom>, abox: Vec<Assertion>) -> Result<Self> {
        let ontology = Self::assemble(tbox, abox)?;
        let reserved = ontology
            .signature
            .concepts
            .iter()
            .chain(&ontology.signature.roles)
            .chain(&ontology.signature.individuals)
            .find(|name| name.starts_with(RESERVED_PREFIX));
        if let Some(name) = reserved {
            return Err(Error::InvalidOntology(format!("name `{name}` uses the reserved prefix `{RESERVED_PREFIX}`")));
        }
        Ok(ontology)
    }

    /// Like [`Ontology::new`] but allows reserved names (used by [`normalize`]).
    fn assemble(tbox: Vec<Axiom>, abox: Vec<Assertion>) -> Result<Self> {
        let mut signature = Signature::default();
        for axiom in &tbox {
            if axiom.degree.is_zero() {
                return Err(Error::InvalidOntology(format!("axiom `{axiom}` has degree 0")));
            }
            match &axiom.inclusion {
                Inclusion::Concept { lhs, rhs } => {
                    signature.add_basic_concept(lhs);
                    signature.add_basic_concept(rhs.basic());
                }
                Inclusion::Role { lhs, rhs } => {
                    signature.add_basic_role(lhs);
                    signature.add_basic_role(rhs.basic());
                }
            }
        }
        for assertion in &abox {
            if assertion.degree.is_zero() {
                return Err(Error::InvalidOntology(format!("assertion `{assertion}` has degree 0")));
            }
            match &assertion.fact {
                Fact::Concept { concept, individual } => {
                    signature.add_basic_concept(concept);
                    signature.individuals.insert(individual.clone());
                }
                Fact::Role { role, subject, object } => {
                    signature.roles.insert(role.clone());
                    signature.individuals.insert(subject.clone());
                    signature.individuals.insert(object.clone());
                }
            }
        }
        if let Some(clash) = signature.concepts.intersection(&signature.roles).next() {
            return Err(Error::InvalidOntology(format!("`{clash}` is used both as a concept name and as a role name")));
        }
        Ok(Ontology { tbox, abox, signature })
    }

    pub fn empty() -> Self {
        Ontology::default()
    }

    pub fn tbox(&self) -> &[Axiom] {
        &self.tbox
    }

    pub fn abox(&self) -> &[Assertion] {
        &self.abox
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn individuals(&self) -> &BTreeSet<String> {
        &self.signature.individuals
    }

    pub fn statements(&self) -> impl Iterator<Item = Statement> + '_ {
        self.tbox.iter().cloned().map(Statement::Axiom).chain(self.abox.iter().cloned().map(Statement::Assertion))
    }

    pub fn len(&self) -> usize {
        self.tbox.len() + self.abox.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn negative_axioms(&self) -> impl Iterator<Item = &Axiom> {
        self.tbox.iter().filter(|a| a.is_negative())
    }

    pub fn positive_axioms(&self) -> impl Iterator<Item = &Axiom> {
        self.tbox.iter().filter(|a| a.is_positive())
    }

    /// True when the TBox has no `⟨∃Q1 ⊑ ∃Q2, d⟩` axiom.
    pub fn is_normalized(&self) -> bool {
        !self.tbox.iter().any(is_exists_to_exists)
    }

    /// A copy with one more statement appended.
    pub fn with_statement(&self, statement: Statement) -> Result<Self> {
        let mut tbox = self.tbox.clone();
        let mut abox = self.abox.clone();
        match statement {
            Statement::Axiom(a) => tbox.push(a),
            Statement::Assertion(a) => abox.push(a),
        }
        Self::assemble(tbox, abox)
    }
}

fn is_exists_to_exists(axiom: &Axiom) -> bool {
    matches!(
        &axiom.inclusion,
        Inclusion::Concept { lhs: BasicConcept::Exists(_), rhs: GeneralConcept::Positive(BasicConcept::Exists(_)) }
    )
}

/// Replaces every `⟨∃Q1 ⊑ ∃Q2, d⟩` by `⟨∃Q1 ⊑ X, 1⟩` and `⟨X ⊑ ∃Q2, d⟩` for a
/// fresh concept name `X`.
///
/// Only positive `∃ ⊑ ∃` axioms are split; `⟨∃Q1 ⊑ ¬∃Q2, d⟩` is already in
/// the shape the canonical construction expects.
pub fn normalize(o: &Ontology) -> Ontology {
    if o.is_normalized() {
        return o.clone();
    }
    let mut counter = 0usize;
    let mut fresh = || loop {
        let name = format!("{RESERVED_PREFIX}{counter}");
        counter += 1;
        if !o.signature.concepts.contains(&name) {
            return name;
        }
    };
    let mut tbox = Vec::with_capacity(o.tbox.len() + 4);
    for axiom in &o.tbox {
        match &axiom.inclusion {
            Inclusion::Concept {
                lhs: lhs @ BasicConcept::Exists(_),
                rhs: GeneralConcept::Positive(rhs @ BasicConcept::Exists(_)),
            } => {
                let name = fresh();
                tbox.push(Axiom::subsumes(lhs.clone(), BasicConcept::Named(name.clone()), Degree::one()));
                tbox.push(Axiom::subsumes(BasicConcept::Named(name), rhs.clone(), axiom.degree.clone()));
            }
            _ => tbox.push(axiom.clone()),
        }
    }
    Ontology::assemble(tbox, o.abox.clone()).expect("normalization keeps an ontology valid")
}

/// Flattens every statement to degree 1.
pub fn classical_version(o: &Ontology) -> Ontology {
    let mut seen_ax = HashSet::new();
    let tbox = o
        .tbox
        .iter()
        .map(|a| Axiom { inclusion: a.inclusion.clone(), degree: Degree::one() })
        .filter(|a| seen_ax.insert(a.clone()))
        .collect();
    let mut seen_as = HashSet::new();
    let abox = o
        .abox
        .iter()
        .map(|a| Assertion { fact: a.fact.clone(), degree: Degree::one() })
        .filter(|a| seen_as.insert(a.clone()))
        .collect();
    Ontology::assemble(tbox, abox).expect("flattening keeps an ontology valid")
}

/// The θ-cut: statements with degree at least `theta`.
pub fn cut(o: &Ontology, theta: &Degree) -> Result<Ontology> {
    if theta.is_zero() {
        return Err(Error::ZeroThreshold);
    }
    let tbox = o.tbox.iter().filter(|a| &a.degree >= theta).cloned().collect();
    let abox = o.abox.iter().filter(|a| &a.degree >= theta).cloned().collect();
    Ontology::assemble(tbox, abox)
}

/// Distinct degrees occurring in `o`, strictly increasing, always ending in 1.
pub fn degree_set(o: &Ontology) -> Vec<Degree> {
    let mut set: BTreeSet<Degree> =
        o.tbox.iter().map(|a| a.degree.clone()).chain(o.abox.iter().map(|a| a.degree.clone())).collect();
    set.insert(Degree::one());
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::deg;
    use crate::testutil::o_exa;

    #[test]
    fn normalize_splits_exists_to_exists() {
        let o = Ontology::new(
            vec![Axiom::subsumes(
                BasicConcept::exists(BasicRole::direct("P")),
                BasicConcept::exists(BasicRole::direct("S")),
                deg("0.8"),
            )],
            vec![],
        )
        .unwrap();
        let n = normalize(&o);
        assert_eq!(
            n.tbox(),
            &[
                Axiom::subsumes(
                    BasicConcept::exists(BasicRole::direct("P")),
                    BasicConcept::named("__norm0"),
                    Degree::one()
                ),
                Axiom::subsumes(
                    BasicConcept::named("__norm0"),
                    BasicConcept::exists(BasicRole::direct("S")),
                    deg("0.8")
                ),
            ]
        );
        assert!(n.is_normalized());
        assert_eq!(normalize(&o_exa()), o_exa());
    }

    #[test]
    fn reserved_prefix_rejected() {
        let err = Ontology::new(vec![], vec![Assertion::named("__norm1", "a", Degree::one())]);
        assert!(matches!(err, Err(Error::InvalidOntology(_))));
    }

    #[test]
    fn zero_degree_rejected() {
        let err = Ontology::new(vec![], vec![Assertion::named("A", "a", Degree::zero())]);
        assert!(matches!(err, Err(Error::InvalidOntology(_))));
    }

    #[test]
    fn concept_role_clash_rejected() {
        let err = Ontology::new(
            vec![],
            vec![Assertion::named("A", "a", Degree::one()), Assertion::role("A", "a", "b", Degree::one())],
        );
        assert!(matches!(err, Err(Error::InvalidOntology(_))));
    }

    #[test]
    fn classical_version_flattens() {
        let o0 = crate::testutil::o_zero();
        let c = classical_version(&o0);
        assert_eq!(c.len(), 3);
        assert!(c.statements().all(|s| s.degree().is_one()));
        assert_eq!(classical_version(&c), c);
        assert!(classical_version(&Ontology::empty()).is_empty());
    }

    #[test]
    fn cut_of_running_example() {
        let o = o_exa();
        assert_eq!(o.len(), 19);
        let c = cut(&o, &deg("0.7")).unwrap();
        assert_eq!(c.len(), 16);
        let dropped: Vec<String> = o.statements().filter(|s| s.degree() < &deg("0.7")).map(|s| s.to_string()).collect();
        assert_eq!(
            dropped,
            vec!["Museum SUBC Popular >= 0.6", "EX locIn SUBC NOT Cheap >= 0.5", "Cheap(irish) >= 0.6",]
        );
        assert_eq!(cut(&o, &deg("0.5")).unwrap(), o);
        assert!(cut(&o, &Degree::one()).unwrap().statements().all(|s| s.degree().is_one()));
        assert!(matches!(cut(&o, &Degree::zero()), Err(Error::ZeroThreshold)));
    }

    #[test]
    fn degree_sets() {
        let d: Vec<String> = degree_set(&o_exa()).iter().map(|d| d.to_string()).collect();
        assert_eq!(d, vec!["0.5", "0.6", "0.7", "0.8", "1"]);
        assert_eq!(degree_set(&Ontology::empty()), vec![Degree::one()]);
        let crisp = classical_version(&o_exa());
        assert_eq!(degree_set(&crisp), vec![Degree::one()]);
    }
}
