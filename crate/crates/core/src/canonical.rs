//! Finite fuzzy interpretations, the canonical interpretation of an ontology
//! and direct query evaluation over interpretations.
//!
//! The canonical interpretation is the least structure closed under the
//! completion rules R1–R8. It may be infinite for TBoxes with existential
//! cycles, so construction is bounded by a [`Budget`] on fresh elements and
//! reports whether the fixpoint was actually reached.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::ontology::{
    degree_set, normalize, Assertion, Axiom, BasicConcept, BasicRole, Fact, GeneralConcept, GeneralRole, Inclusion,
    Ontology, Statement,
};
use crate::query::{Atom, ConjunctiveQuery, Term, ThresholdQuery};
use crate::tnorm::TNorm;

/// A domain element: a named individual or an anonymous element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Named(String),
    Anon(usize),
}

impl Element {
    pub fn named(name: impl Into<String>) -> Self {
        Element::Named(name.into())
    }

    pub fn as_named(&self) -> Option<&str> {
        match self {
            Element::Named(n) => Some(n),
            Element::Anon(_) => None,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Named(n) => f.write_str(n),
            Element::Anon(i) => write!(f, "_n:{i}"),
        }
    }
}

type Edges = BTreeMap<Element, BTreeMap<Element, Degree>>;

/// A finite fuzzy interpretation. Absent entries have degree 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FuzzyInterpretation {
    domain: BTreeSet<Element>,
    next_anon: usize,
    concepts: BTreeMap<String, BTreeMap<Element, Degree>>,
    /// role name -> subject -> object -> degree
    forward: BTreeMap<String, Edges>,
    /// role name -> object -> subject -> degree
    backward: BTreeMap<String, Edges>,
}

impl FuzzyInterpretation {
    pub fn new() -> Self {
        Self::default()
    }

    /// An interpretation whose domain holds exactly the given individuals.
    pub fn with_individuals<'a>(names: impl IntoIterator<Item = &'a String>) -> Self {
        let mut i = Self::new();
        for n in names {
            i.domain.insert(Element::Named(n.clone()));
        }
        i
    }

    pub fn domain(&self) -> &BTreeSet<Element> {
        &self.domain
    }

    pub fn add_element(&mut self, e: Element) {
        if let Element::Anon(k) = e {
            self.next_anon = self.next_anon.max(k + 1);
        }
        self.domain.insert(e);
    }

    /// Adds a new anonymous element and returns it.
    pub fn fresh_element(&mut self) -> Element {
        let e = Element::Anon(self.next_anon);
        self.next_anon += 1;
        self.domain.insert(e.clone());
        e
    }

    pub fn anonymous_count(&self) -> usize {
        self.domain.iter().filter(|e| matches!(e, Element::Anon(_))).count()
    }

    pub fn concept(&self, name: &str, e: &Element) -> Degree {
        self.concepts.get(name).and_then(|m| m.get(e)).cloned().unwrap_or_else(Degree::zero)
    }

    pub fn role(&self, name: &str, subject: &Element, object: &Element) -> Degree {
        self.forward
            .get(name)
            .and_then(|m| m.get(subject))
            .and_then(|m| m.get(object))
            .cloned()
            .unwrap_or_else(Degree::zero)
    }

    pub fn basic_role(&self, q: &BasicRole, d: &Element, e: &Element) -> Degree {
        if q.inverted {
            self.role(&q.name, e, d)
        } else {
            self.role(&q.name, d, e)
        }
    }

    /// `Q`-successors of `d` with positive degree.
    pub fn successors(&self, q: &BasicRole, d: &Element) -> impl Iterator<Item = (&Element, &Degree)> {
        let index = if q.inverted { &self.backward } else { &self.forward };
        index.get(&q.name).and_then(|m| m.get(d)).into_iter().flatten()
    }

    /// `(∃Q)(d)`: the maximum over the domain.
    pub fn exists(&self, q: &BasicRole, d: &Element) -> Degree {
        self.successors(q, d).map(|(_, v)| v).max().cloned().unwrap_or_else(Degree::zero)
    }

    pub fn basic_concept(&self, b: &BasicConcept, e: &Element) -> Degree {
        match b {
            BasicConcept::Named(n) => self.concept(n, e),
            BasicConcept::Exists(q) => self.exists(q, e),
        }
    }

    /// Elements with a positive degree in `b`.
    fn support(&self, b: &BasicConcept) -> Vec<Element> {
        match b {
            BasicConcept::Named(n) => self.concepts.get(n).into_iter().flatten().map(|(e, _)| e.clone()).collect(),
            BasicConcept::Exists(q) => {
                let index = if q.inverted { &self.backward } else { &self.forward };
                index.get(&q.name).into_iter().flatten().map(|(e, _)| e.clone()).collect()
            }
        }
    }

    /// Pairs `(d, e)` with `Q(d, e) > 0`.
    fn role_pairs(&self, q: &BasicRole) -> Vec<(Element, Element, Degree)> {
        let index = if q.inverted { &self.backward } else { &self.forward };
        index
            .get(&q.name)
            .into_iter()
            .flatten()
            .flat_map(|(d, m)| m.iter().map(move |(e, v)| (d.clone(), e.clone(), v.clone())))
            .collect()
    }

    /// Sets `A(e)` to `value`; a zero value removes the entry.
    pub fn set_concept(&mut self, name: &str, e: &Element, value: Degree) {
        self.add_element(e.clone());
        let m = self.concepts.entry(name.to_string()).or_default();
        if value.is_zero() {
            m.remove(e);
        } else {
            m.insert(e.clone(), value);
        }
    }

    /// Sets `P(d, e)` to `value`; a zero value removes the entry.
    pub fn set_role(&mut self, name: &str, d: &Element, e: &Element, value: Degree) {
        self.add_element(d.clone());
        self.add_element(e.clone());
        let fwd = self.forward.entry(name.to_string()).or_default().entry(d.clone()).or_default();
        let bwd = self.backward.entry(name.to_string()).or_default().entry(e.clone()).or_default();
        if value.is_zero() {
            fwd.remove(e);
            bwd.remove(d);
        } else {
            fwd.insert(e.clone(), value.clone());
            bwd.insert(d.clone(), value);
        }
    }

    fn set_basic_role(&mut self, q: &BasicRole, d: &Element, e: &Element, value: Degree) {
        if q.inverted {
            self.set_role(&q.name, e, d, value)
        } else {
            self.set_role(&q.name, d, e, value)
        }
    }

    /// Every positive concept entry, sorted.
    pub fn concept_entries(&self) -> impl Iterator<Item = (&str, &Element, &Degree)> {
        self.concepts.iter().flat_map(|(n, m)| m.iter().map(move |(e, v)| (n.as_str(), e, v)))
    }

    /// Every positive role entry, sorted.
    pub fn role_entries(&self) -> impl Iterator<Item = (&str, &Element, &Element, &Degree)> {
        self.forward
            .iter()
            .flat_map(|(n, m)| m.iter().flat_map(move |(d, row)| row.iter().map(move |(e, v)| (n.as_str(), d, e, v))))
    }

    /// Tab-separated dump: `C concept element degree` and
    /// `R role element element degree` rows.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (n, e, v) in self.concept_entries() {
            out.push_str(&format!("C\t{n}\t{e}\t{v}\n"));
        }
        for (n, d, e, v) in self.role_entries() {
            out.push_str(&format!("R\t{n}\t{d}\t{e}\t{v}\n"));
        }
        out
    }
}

/// Identifies a completion rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One rule application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: Rule,
    pub statement: Statement,
    pub elements: Vec<Element>,
    pub degree: Degree,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let elements: Vec<String> = self.elements.iter().map(|e| e.to_string()).collect();
        write!(f, "{} [{}] ({}) := {}", self.rule, self.statement, elements.join(", "), self.degree)
    }
}

pub type RuleTrace = Vec<TraceStep>;

/// Upper bound on the number of anonymous elements a construction may create.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_fresh_elements: usize,
}

impl Budget {
    pub fn new(max_fresh_elements: usize) -> Self {
        Budget { max_fresh_elements }
    }

    /// `|TBox| × |individuals| × |degree set|`, at least 1.
    pub fn default_for(o: &Ontology) -> Self {
        let n = o.tbox().len() * o.individuals().len().max(1) * degree_set(o).len();
        Budget { max_fresh_elements: n.max(1) }
    }
}

/// Result of [`build_canonical`].
#[derive(Debug, Clone)]
pub struct Canonical {
    pub interpretation: FuzzyInterpretation,
    pub trace: RuleTrace,
    /// True iff the fixpoint was reached without hitting the budget.
    pub complete: bool,
}

/// Builds the canonical interpretation with statements scheduled round-robin,
/// ABox first.
///
/// A TBox with `∃Q1 ⊑ ∃Q2` axioms is normalized first; the auxiliary concept
/// names then show up in the result.
pub fn build_canonical(o: &Ontology, k: TNorm, budget: Budget) -> Canonical {
    let o = normalize(o);
    let statements: Vec<Statement> = abox_then_tbox(&o);
    let order: Vec<usize> = (0..statements.len()).collect();
    run(&o, statements, &order, k, budget)
}

/// Like [`build_canonical`] but visits the statements in the given order.
///
/// `order` must be a permutation of `0..n`, indexing the ABox followed by
/// the TBox of the normalized ontology.
pub fn build_canonical_ordered(o: &Ontology, k: TNorm, budget: Budget, order: &[usize]) -> Canonical {
    let o = normalize(o);
    let statements = abox_then_tbox(&o);
    let mut seen = vec![false; statements.len()];
    assert_eq!(order.len(), statements.len(), "order must be a permutation of the statements");
    for &i in order {
        assert!(i < seen.len() && !seen[i], "order must be a permutation of the statements");
        seen[i] = true;
    }
    run(&o, statements, order, k, budget)
}

fn abox_then_tbox(o: &Ontology) -> Vec<Statement> {
    o.abox().iter().cloned().map(Statement::Assertion).chain(o.tbox().iter().cloned().map(Statement::Axiom)).collect()
}

fn run(o: &Ontology, statements: Vec<Statement>, order: &[usize], k: TNorm, budget: Budget) -> Canonical {
    let mut b = Builder {
        i: FuzzyInterpretation::with_individuals(o.individuals()),
        k,
        budget: budget.max_fresh_elements,
        created: 0,
        suppressed: false,
        trace: Vec::new(),
    };
    loop {
        let mut changed = false;
        for &idx in order {
            changed |= b.apply(&statements[idx]);
        }
        if !changed {
            break;
        }
    }
    Canonical { interpretation: b.i, trace: b.trace, complete: !b.suppressed }
}

/// True when no completion rule for `o` would change `i`.
pub fn is_closed(i: &FuzzyInterpretation, o: &Ontology, k: TNorm) -> bool {
    let o = normalize(o);
    let mut b = Builder { i: i.clone(), k, budget: 0, created: 0, suppressed: false, trace: Vec::new() };
    let changed = abox_then_tbox(&o).iter().fold(false, |acc, s| b.apply(s) | acc);
    !changed && !b.suppressed
}

struct Builder {
    i: FuzzyInterpretation,
    k: TNorm,
    budget: usize,
    created: usize,
    suppressed: bool,
    trace: RuleTrace,
}

impl Builder {
    fn record(&mut self, rule: Rule, statement: &Statement, elements: Vec<Element>, degree: &Degree) {
        self.trace.push(TraceStep { rule, statement: statement.clone(), elements, degree: degree.clone() });
    }

    fn raise_concept(&mut self, rule: Rule, s: &Statement, name: &str, e: &Element, v: Degree) -> bool {
        if v.is_zero() || self.i.concept(name, e) >= v {
            return false;
        }
        self.record(rule, s, vec![e.clone()], &v);
        self.i.set_concept(name, e, v);
        true
    }

    fn raise_role(&mut self, rule: Rule, s: &Statement, q: &BasicRole, d: &Element, e: &Element, v: Degree) -> bool {
        if v.is_zero() || self.i.basic_role(q, d, e) >= v {
            return false;
        }
        let pair = if q.inverted { vec![e.clone(), d.clone()] } else { vec![d.clone(), e.clone()] };
        self.record(rule, s, pair, &v);
        self.i.set_basic_role(q, d, e, v);
        true
    }

    /// Ensures some `Q`-successor of `d` reaches `v`, creating one if needed.
    fn witness(&mut self, rule: Rule, s: &Statement, q: &BasicRole, d: &Element, v: Degree) -> bool {
        if v.is_zero() || self.i.exists(q, d) >= v {
            return false;
        }
        if self.created >= self.budget {
            self.suppressed = true;
            return false;
        }
        self.created += 1;
        let fresh = self.i.fresh_element();
        self.raise_role(rule, s, q, d, &fresh, v)
    }

    fn apply(&mut self, s: &Statement) -> bool {
        match s {
            Statement::Assertion(a) => self.apply_assertion(s, a),
            Statement::Axiom(a) => self.apply_axiom(s, a),
        }
    }

    fn apply_assertion(&mut self, s: &Statement, a: &Assertion) -> bool {
        match &a.fact {
            Fact::Concept { concept: BasicConcept::Named(n), individual } => {
                self.raise_concept(Rule::R1, s, n, &Element::named(individual), a.degree.clone())
            }
            Fact::Concept { concept: BasicConcept::Exists(q), individual } => {
                self.witness(Rule::R1, s, q, &Element::named(individual), a.degree.clone())
            }
            Fact::Role { role, subject, object } => self.raise_role(
                Rule::R2,
                s,
                &BasicRole::direct(role.clone()),
                &Element::named(subject),
                &Element::named(object),
                a.degree.clone(),
            ),
        }
    }

    fn apply_axiom(&mut self, s: &Statement, a: &Axiom) -> bool {
        let k = self.k;
        let d = &a.degree;
        let mut changed = false;
        match &a.inclusion {
            Inclusion::Concept { rhs: GeneralConcept::Negated(_), .. } => {}
            Inclusion::Role { rhs: GeneralRole::Negated(_), .. } => {}
            Inclusion::Concept { lhs, rhs: GeneralConcept::Positive(rhs) } => {
                let rule = match (lhs, rhs) {
                    (BasicConcept::Named(_), BasicConcept::Named(_)) => Rule::R3,
                    (BasicConcept::Named(_), BasicConcept::Exists(q)) if !q.inverted => Rule::R4,
                    (BasicConcept::Named(_), BasicConcept::Exists(_)) => Rule::R5,
                    (BasicConcept::Exists(q), BasicConcept::Named(_)) if !q.inverted => Rule::R6,
                    (BasicConcept::Exists(_), BasicConcept::Named(_)) => Rule::R7,
                    (BasicConcept::Exists(_), BasicConcept::Exists(_)) => {
                        unreachable!("the ontology is normalized before construction")
                    }
                };
                for e in self.i.support(lhs) {
                    let v = k.conj(&self.i.basic_concept(lhs, &e), d);
                    changed |= match rhs {
                        BasicConcept::Named(n) => self.raise_concept(rule, s, n, &e, v),
                        BasicConcept::Exists(q) => self.witness(rule, s, q, &e, v),
                    };
                }
            }
            Inclusion::Role { lhs, rhs: GeneralRole::Positive(rhs) } => {
                for (x, y, v) in self.i.role_pairs(lhs) {
                    changed |= self.raise_role(Rule::R8, s, rhs, &x, &y, k.conj(&v, d));
                }
            }
        }
        changed
    }
}

/// Statements of `o` violated by `i` under `k`.
///
/// `∃Q` is evaluated as a maximum over the finite domain.
pub fn check_model(i: &FuzzyInterpretation, o: &Ontology, k: TNorm) -> Vec<Statement> {
    let mut violated = Vec::new();
    for a in o.tbox() {
        let ok = match &a.inclusion {
            Inclusion::Concept { lhs, rhs } => i.domain().iter().all(|e| {
                let l = i.basic_concept(lhs, e);
                let r = match rhs {
                    GeneralConcept::Positive(b) => i.basic_concept(b, e),
                    GeneralConcept::Negated(b) => k.neg(&i.basic_concept(b, e)),
                };
                k.resid(&l, &r) >= a.degree
            }),
            Inclusion::Role { lhs, rhs } => i.role_pairs(lhs).iter().all(|(x, y, l)| {
                let r = match rhs {
                    GeneralRole::Positive(q) => i.basic_role(q, x, y),
                    GeneralRole::Negated(q) => k.neg(&i.basic_role(q, x, y)),
                };
                k.resid(l, &r) >= a.degree
            }),
        };
        if !ok {
            violated.push(Statement::Axiom(a.clone()));
        }
    }
    for a in o.abox() {
        let value = match &a.fact {
            Fact::Concept { concept, individual } => i.basic_concept(concept, &Element::named(individual)),
            Fact::Role { role, subject, object } => i.role(role, &Element::named(subject), &Element::named(object)),
        };
        if value < a.degree {
            violated.push(Statement::Assertion(a.clone()));
        }
    }
    violated
}

/// Query argument after slot allocation.
#[derive(Debug, Clone)]
enum Arg {
    Slot(usize),
    Const(Element),
}

#[derive(Debug, Clone)]
struct Pattern {
    name: String,
    args: Vec<Arg>,
    bound: Option<Degree>,
}

/// A query compiled for backtracking over an interpretation.
struct Plan {
    patterns: Vec<Pattern>,
    slots: usize,
    /// Slot of each head term, or the constant it names.
    head: Vec<Arg>,
    /// Slot assignment order.
    order: Vec<usize>,
    /// Patterns fully bound once `order[..=i]` is assigned.
    checks: Vec<Vec<usize>>,
}

impl Plan {
    fn new(head: &[Term], atoms: &[(Atom, Option<Degree>)]) -> Plan {
        let mut names: HashMap<String, usize> = HashMap::new();
        let mut slots = 0usize;
        let mut slot_of = |t: &Term| -> Arg {
            match t {
                Term::Individual(n) => Arg::Const(Element::named(n.clone())),
                Term::Variable(v) => Arg::Slot(*names.entry(v.clone()).or_insert_with(|| {
                    slots += 1;
                    slots - 1
                })),
                Term::Anonymous => {
                    slots += 1;
                    Arg::Slot(slots - 1)
                }
            }
        };
        let head: Vec<Arg> = head.iter().map(&mut slot_of).collect();
        let patterns: Vec<Pattern> = atoms
            .iter()
            .map(|(a, b)| Pattern {
                name: a.predicate().to_string(),
                args: a.terms().into_iter().map(&mut slot_of).collect(),
                bound: b.clone(),
            })
            .collect();

        // Head slots first, then greedily the slot sharing most patterns with
        // already chosen slots.
        let mut order: Vec<usize> = Vec::new();
        let mut chosen = vec![false; slots];
        for a in &head {
            if let Arg::Slot(s) = a {
                if !chosen[*s] {
                    chosen[*s] = true;
                    order.push(*s);
                }
            }
        }
        while order.len() < slots {
            let score = |s: usize| -> (usize, usize) {
                let mut linked = 0;
                let mut uses = 0;
                for p in &patterns {
                    let has = p.args.iter().any(|a| matches!(a, Arg::Slot(x) if *x == s));
                    if has {
                        uses += 1;
                        if p.args.iter().any(|a| match a {
                            Arg::Slot(x) => chosen[*x],
                            Arg::Const(_) => true,
                        }) {
                            linked += 1;
                        }
                    }
                }
                (linked, uses)
            };
            let next = (0..slots).filter(|s| !chosen[*s]).max_by_key(|s| (score(*s), std::cmp::Reverse(*s))).unwrap();
            chosen[next] = true;
            order.push(next);
        }
        let mut position = vec![0usize; slots];
        for (i, s) in order.iter().enumerate() {
            position[*s] = i;
        }
        let mut checks = vec![Vec::new(); slots.max(1)];
        let mut ground = Vec::new();
        for (pi, p) in patterns.iter().enumerate() {
            let last = p.args.iter().filter_map(|a| match a {
                Arg::Slot(s) => Some(position[*s]),
                Arg::Const(_) => None,
            });
            match last.max() {
                Some(at) => checks[at].push(pi),
                None => ground.push(pi),
            }
        }
        // Ground patterns are checked before the first assignment.
        let mut all_checks = vec![ground];
        all_checks.extend(checks);
        Plan { patterns, slots, head, order, checks: all_checks }
    }
}

struct Search<'a> {
    i: &'a FuzzyInterpretation,
    plan: &'a Plan,
    k: TNorm,
    assignment: Vec<Option<Element>>,
    /// Degree of each pattern under the current assignment.
    degrees: Vec<Degree>,
}

impl<'a> Search<'a> {
    fn value(&self, a: &Arg) -> Element {
        match a {
            Arg::Const(e) => e.clone(),
            Arg::Slot(s) => self.assignment[*s].clone().expect("slot assigned before use"),
        }
    }

    fn pattern_degree(&self, p: &Pattern) -> Degree {
        match p.args.as_slice() {
            [x] => self.i.concept(&p.name, &self.value(x)),
            [x, y] => self.i.role(&p.name, &self.value(x), &self.value(y)),
            _ => unreachable!("atoms have one or two arguments"),
        }
    }

    /// Evaluates the patterns listed in `checks[level]`; false prunes.
    fn check(&mut self, level: usize) -> bool {
        for &pi in &self.plan.checks[level] {
            let p = &self.plan.patterns[pi];
            let v = self.pattern_degree(p);
            let ok = match &p.bound {
                Some(b) => &v >= b,
                None => !v.is_zero(),
            };
            if !ok {
                return false;
            }
            self.degrees[pi] = v;
        }
        true
    }

    /// Candidate values for a slot given the current partial assignment.
    fn candidates(&self, slot: usize) -> Vec<Element> {
        for p in &self.plan.patterns {
            if let [x, y] = p.args.as_slice() {
                let index = |a: &Arg| matches!(a, Arg::Slot(s) if *s == slot);
                let known = |a: &Arg| match a {
                    Arg::Const(_) => true,
                    Arg::Slot(s) => self.assignment[*s].is_some(),
                };
                if index(y) && known(x) {
                    let src = self.value(x);
                    return self
                        .i
                        .successors(&BasicRole::direct(p.name.clone()), &src)
                        .map(|(e, _)| e.clone())
                        .collect();
                }
                if index(x) && known(y) {
                    let src = self.value(y);
                    return self
                        .i
                        .successors(&BasicRole::inverse(p.name.clone()), &src)
                        .map(|(e, _)| e.clone())
                        .collect();
                }
            }
        }
        for p in &self.plan.patterns {
            match p.args.as_slice() {
                [Arg::Slot(s)] if *s == slot => {
                    return self.i.support(&BasicConcept::named(p.name.clone()));
                }
                [Arg::Slot(s), _] if *s == slot => {
                    return self.i.support(&BasicConcept::exists(BasicRole::direct(p.name.clone())));
                }
                [_, Arg::Slot(s)] if *s == slot => {
                    return self.i.support(&BasicConcept::exists(BasicRole::inverse(p.name.clone())));
                }
                _ => {}
            }
        }
        self.i.domain().iter().cloned().collect()
    }

    /// Visits every full match. `visit` returns false to stop early.
    fn run(&mut self, level: usize, visit: &mut dyn FnMut(&Search<'_>) -> bool) -> bool {
        if level == self.plan.order.len() {
            return visit(self);
        }
        let slot = self.plan.order[level];
        let fixed = self.assignment[slot].clone();
        let values = match &fixed {
            Some(e) => vec![e.clone()],
            None => self.candidates(slot),
        };
        for v in values {
            self.assignment[slot] = Some(v);
            if self.check(level + 1) && !self.run(level + 1, visit) {
                if fixed.is_none() {
                    self.assignment[slot] = None;
                }
                return false;
            }
        }
        if fixed.is_none() {
            self.assignment[slot] = None;
        }
        true
    }

    fn start(i: &'a FuzzyInterpretation, plan: &'a Plan, k: TNorm) -> Self {
        Search { i, plan, k, assignment: vec![None; plan.slots], degrees: vec![Degree::one(); plan.patterns.len()] }
    }

    /// Binds the head to `tuple`; false if the head cannot take these values.
    fn bind_head(&mut self, tuple: &[&str]) -> bool {
        for (a, v) in self.plan.head.iter().zip(tuple) {
            let e = Element::named(*v);
            match a {
                Arg::Const(c) if *c != e => return false,
                Arg::Const(_) => {}
                Arg::Slot(s) => match &self.assignment[*s] {
                    Some(prev) if *prev != e => return false,
                    _ => self.assignment[*s] = Some(e),
                },
            }
        }
        true
    }
}

fn check_arity(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::ArityMismatch { expected, found });
    }
    Ok(())
}

fn cq_plan(q: &ConjunctiveQuery) -> Plan {
    let atoms: Vec<(Atom, Option<Degree>)> = q.atoms.iter().map(|a| (a.clone(), None)).collect();
    Plan::new(&q.head, &atoms)
}

fn tq_plan(q: &ThresholdQuery) -> Plan {
    let atoms: Vec<(Atom, Option<Degree>)> = q.atoms.iter().map(|a| (a.atom.clone(), Some(a.bound.clone()))).collect();
    Plan::new(&q.head, &atoms)
}

/// Degree of `q(tuple)` in `i`: the best match under `k`.
pub fn eval_cq_on(i: &FuzzyInterpretation, q: &ConjunctiveQuery, tuple: &[&str], k: TNorm) -> Result<Degree> {
    check_arity(q.arity(), tuple.len())?;
    let plan = cq_plan(q);
    let mut s = Search::start(i, &plan, k);
    if !s.bind_head(tuple) || !s.check(0) {
        return Ok(Degree::zero());
    }
    let mut best = Degree::zero();
    s.run(0, &mut |m| {
        let v = m.k.conj_fold(&m.degrees);
        if v > best {
            best = v;
        }
        !best.is_one()
    });
    Ok(best)
}

/// Degrees of all tuples of named individuals with a positive degree.
pub fn cq_degrees_on(i: &FuzzyInterpretation, q: &ConjunctiveQuery, k: TNorm) -> BTreeMap<Vec<String>, Degree> {
    let plan = cq_plan(q);
    let mut out: BTreeMap<Vec<String>, Degree> = BTreeMap::new();
    let mut s = Search::start(i, &plan, k);
    if !s.check(0) {
        return out;
    }
    s.run(0, &mut |m| {
        let mut tuple = Vec::with_capacity(m.plan.head.len());
        for a in &m.plan.head {
            match m.value(a) {
                Element::Named(n) => tuple.push(n),
                Element::Anon(_) => return true,
            }
        }
        let v = m.k.conj_fold(&m.degrees);
        if !v.is_zero() {
            let slot = out.entry(tuple).or_insert_with(Degree::zero);
            if v > *slot {
                *slot = v;
            }
        }
        true
    });
    out
}

/// Whether some match of `q` with head `tuple` meets every threshold.
pub fn eval_tq_on(i: &FuzzyInterpretation, q: &ThresholdQuery, tuple: &[&str]) -> Result<bool> {
    check_arity(q.arity(), tuple.len())?;
    let plan = tq_plan(q);
    let mut s = Search::start(i, &plan, TNorm::Godel);
    if !s.bind_head(tuple) || !s.check(0) {
        return Ok(false);
    }
    let mut found = false;
    s.run(0, &mut |_| {
        found = true;
        false
    });
    Ok(found)
}

/// All tuples of named individuals answering `q` in `i`.
pub fn tq_answers_on(i: &FuzzyInterpretation, q: &ThresholdQuery) -> BTreeSet<Vec<String>> {
    let plan = tq_plan(q);
    let mut out = BTreeSet::new();
    let mut s = Search::start(i, &plan, TNorm::Godel);
    if !s.check(0) {
        return out;
    }
    s.run(0, &mut |m| {
        let tuple: Option<Vec<String>> =
            m.plan.head.iter().map(|a| m.value(a).as_named().map(str::to_string)).collect();
        if let Some(t) = tuple {
            out.insert(t);
        }
        true
    });
    out
}

/// True iff the TBox cannot generate an unbounded chain of anonymous
/// elements.
///
/// An anonymous `Q`-successor starts out in `∃Q⁻` and then acquires every
/// basic concept reachable through positive inclusions. The check builds a
/// graph with an edge `Q → Q'` whenever such an element may be forced to
/// have a `Q'`-successor of its own, and reports whether it is acyclic.
pub fn existential_cycle_check(o: &Ontology) -> bool {
    let o = normalize(o);
    let mut concept_edges: BTreeMap<BasicConcept, BTreeSet<BasicConcept>> = BTreeMap::new();
    let mut role_edges: BTreeMap<BasicRole, BTreeSet<BasicRole>> = BTreeMap::new();
    let mut generators: Vec<(BasicConcept, BasicRole)> = Vec::new();
    let mut roles: BTreeSet<BasicRole> = BTreeSet::new();
    for a in o.positive_axioms() {
        match &a.inclusion {
            Inclusion::Concept { lhs, rhs } => {
                let rhs = rhs.basic().clone();
                if let BasicConcept::Exists(q) = &rhs {
                    generators.push((lhs.clone(), q.clone()));
                    roles.insert(q.clone());
                }
                concept_edges.entry(lhs.clone()).or_default().insert(rhs);
            }
            Inclusion::Role { lhs, rhs } => {
                let rhs = rhs.basic();
                role_edges.entry(lhs.clone()).or_default().insert(rhs.clone());
                role_edges.entry(lhs.inverted()).or_default().insert(rhs.inverted());
            }
        }
    }
    let closure = |start: BasicConcept| -> BTreeSet<BasicConcept> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![start];
        while let Some(c) = stack.pop() {
            if !seen.insert(c.clone()) {
                continue;
            }
            if let Some(next) = concept_edges.get(&c) {
                stack.extend(next.iter().cloned());
            }
            if let BasicConcept::Exists(q) = &c {
                if let Some(next) = role_edges.get(q) {
                    stack.extend(next.iter().cloned().map(BasicConcept::Exists));
                }
            }
        }
        seen
    };
    let graph: BTreeMap<BasicRole, Vec<BasicRole>> = roles
        .iter()
        .map(|q| {
            let tau = closure(BasicConcept::Exists(q.inverted()));
            let succ = generators.iter().filter(|(x, _)| tau.contains(x)).map(|(_, r)| r.clone()).collect();
            (q.clone(), succ)
        })
        .collect();

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    fn has_cycle(
        q: &BasicRole,
        graph: &BTreeMap<BasicRole, Vec<BasicRole>>,
        marks: &mut BTreeMap<BasicRole, Mark>,
    ) -> bool {
        match marks.get(q) {
            Some(Mark::Open) => return true,
            Some(Mark::Done) => return false,
            None => {}
        }
        marks.insert(q.clone(), Mark::Open);
        for r in graph.get(q).into_iter().flatten() {
            if has_cycle(r, graph, marks) {
                return true;
            }
        }
        marks.insert(q.clone(), Mark::Done);
        false
    }
    let mut marks = BTreeMap::new();
    !graph.keys().any(|q| has_cycle(q, &graph, &mut marks))
}
