//! The ABox as a graded database and query evaluation over it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::ontology::{Assertion, BasicConcept, Fact};
use crate::query::{Atom, ConjunctiveQuery, Term, ThresholdQuery, UnionTQ};
use crate::tnorm::TNorm;

/// Prefix of the individuals invented for `∃Q(a)` assertions.
pub const ANONYMOUS_PREFIX: &str = "_:";

/// `db(A)`: one row per key holding the largest asserted degree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AboxDatabase {
    concepts: BTreeMap<String, BTreeMap<String, Degree>>,
    roles: BTreeMap<String, BTreeMap<(String, String), Degree>>,
    individuals: BTreeSet<String>,
}

impl AboxDatabase {
    pub fn from_abox<'a>(abox: impl IntoIterator<Item = &'a Assertion>) -> Self {
        let mut db = AboxDatabase::default();
        let mut anonymous = 0usize;
        for a in abox {
            match &a.fact {
                Fact::Concept { concept: BasicConcept::Named(n), individual } => {
                    db.individuals.insert(individual.clone());
                    db.insert_concept(n, individual, &a.degree);
                }
                Fact::Concept { concept: BasicConcept::Exists(q), individual } => {
                    db.individuals.insert(individual.clone());
                    let fresh = format!("{ANONYMOUS_PREFIX}{anonymous}");
                    anonymous += 1;
                    let (s, o) = if q.inverted { (fresh, individual.clone()) } else { (individual.clone(), fresh) };
                    db.insert_role(&q.name, s, o, &a.degree);
                }
                Fact::Role { role, subject, object } => {
                    db.individuals.insert(subject.clone());
                    db.individuals.insert(object.clone());
                    db.insert_role(role, subject.clone(), object.clone(), &a.degree);
                }
            }
        }
        db
    }

    fn insert_concept(&mut self, name: &str, ind: &str, d: &Degree) {
        let slot =
            self.concepts.entry(name.to_string()).or_default().entry(ind.to_string()).or_insert_with(Degree::zero);
        if *d > *slot {
            *slot = d.clone();
        }
    }

    fn insert_role(&mut self, name: &str, s: String, o: String, d: &Degree) {
        let slot = self.roles.entry(name.to_string()).or_default().entry((s, o)).or_insert_with(Degree::zero);
        if *d > *slot {
            *slot = d.clone();
        }
    }

    /// Named individuals occurring in the ABox.
    pub fn individuals(&self) -> &BTreeSet<String> {
        &self.individuals
    }

    pub fn concept_rows(&self) -> impl Iterator<Item = (&str, &str, &Degree)> {
        self.concepts.iter().flat_map(|(n, m)| m.iter().map(move |(i, d)| (n.as_str(), i.as_str(), d)))
    }

    pub fn role_rows(&self) -> impl Iterator<Item = (&str, &str, &str, &Degree)> {
        self.roles.iter().flat_map(|(n, m)| m.iter().map(move |((s, o), d)| (n.as_str(), s.as_str(), o.as_str(), d)))
    }

    pub fn len(&self) -> usize {
        self.concepts.values().map(BTreeMap::len).sum::<usize>() + self.roles.values().map(BTreeMap::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rows of `atom`'s predicate compatible with the bound terms.
    fn rows<'a>(&'a self, atom: &Atom, binding: &BTreeMap<String, String>) -> Vec<(Vec<&'a str>, &'a Degree)> {
        let resolve = |t: &Term| -> Option<String> {
            match t {
                Term::Individual(n) => Some(n.clone()),
                Term::Variable(v) => binding.get(v).cloned(),
                Term::Anonymous => None,
            }
        };
        match atom {
            Atom::Concept { name, term } => {
                let Some(m) = self.concepts.get(name) else { return Vec::new() };
                match resolve(term) {
                    Some(i) => m.get_key_value(&i).map(|(k, d)| (vec![k.as_str()], d)).into_iter().collect(),
                    None => m.iter().map(|(k, d)| (vec![k.as_str()], d)).collect(),
                }
            }
            Atom::Role { name, subject, object } => {
                let Some(m) = self.roles.get(name) else { return Vec::new() };
                let (s, o) = (resolve(subject), resolve(object));
                m.iter()
                    .filter(|((rs, ro), _)| s.as_ref().is_none_or(|x| x == rs) && o.as_ref().is_none_or(|x| x == ro))
                    .map(|((rs, ro), d)| (vec![rs.as_str(), ro.as_str()], d))
                    .collect()
            }
        }
    }
}

/// One answer: a tuple of individuals, with a degree when the producing
/// operation is degree-valued.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub tuple: Vec<String>,
    pub degree: Option<Degree>,
}

/// Answers ordered by degree (descending) and then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerSet {
    arity: usize,
    rows: Vec<Answer>,
}

impl AnswerSet {
    pub fn from_tuples(arity: usize, tuples: impl IntoIterator<Item = Vec<String>>) -> Self {
        let set: BTreeSet<Vec<String>> = tuples.into_iter().collect();
        debug_assert!(set.iter().all(|t| t.len() == arity));
        AnswerSet { arity, rows: set.into_iter().map(|tuple| Answer { tuple, degree: None }).collect() }
    }

    pub fn with_degrees(arity: usize, rows: impl IntoIterator<Item = (Vec<String>, Degree)>) -> Self {
        let mut rows: Vec<Answer> = rows.into_iter().map(|(tuple, d)| Answer { tuple, degree: Some(d) }).collect();
        debug_assert!(rows.iter().all(|r| r.tuple.len() == arity));
        rows.sort_by(|a, b| b.degree.cmp(&a.degree).then_with(|| a.tuple.cmp(&b.tuple)));
        rows.dedup_by(|a, b| a.tuple == b.tuple);
        AnswerSet { arity, rows }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn rows(&self) -> &[Answer] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn tuples(&self) -> BTreeSet<Vec<String>> {
        self.rows.iter().map(|r| r.tuple.clone()).collect()
    }

    pub fn contains(&self, tuple: &[&str]) -> bool {
        self.rows.iter().any(|r| r.tuple.iter().map(String::as_str).eq(tuple.iter().copied()))
    }

    /// Keeps the first `n` rows.
    pub fn truncate(&mut self, n: usize) {
        self.rows.truncate(n);
    }

    /// Set union of two degree-free answer sets.
    pub fn union(&self, other: &AnswerSet) -> AnswerSet {
        AnswerSet::from_tuples(self.arity, self.tuples().into_iter().chain(other.tuples()))
    }
}

impl fmt::Display for AnswerSet {
    /// Tab-separated rows, with the degree as the last column when present.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let mut cols = r.tuple.clone();
            if let Some(d) = &r.degree {
                cols.push(d.to_string());
            }
            writeln!(f, "{}", cols.join("\t"))?;
        }
        Ok(())
    }
}

type Visit<'v> = dyn FnMut(&BTreeMap<String, String>, &[Degree]) -> bool + 'v;

/// Backtracking join, most constrained atom first.
struct Join<'a> {
    db: &'a AboxDatabase,
    atoms: Vec<(&'a Atom, Option<&'a Degree>)>,
    binding: BTreeMap<String, String>,
    degrees: Vec<Degree>,
}

impl<'a> Join<'a> {
    /// Calls `visit` for every match; returns false if `visit` stopped it.
    fn run(&mut self, remaining: &mut Vec<usize>, visit: &mut Visit<'_>) -> bool {
        if remaining.is_empty() {
            return visit(&self.binding, &self.degrees);
        }
        let (pos, rows) = remaining
            .iter()
            .enumerate()
            .map(|(pos, &ai)| {
                let (atom, bound) = self.atoms[ai];
                let rows: Vec<_> = self
                    .db
                    .rows(atom, &self.binding)
                    .into_iter()
                    .filter(|(_, d)| match bound {
                        Some(b) => *d >= b,
                        None => !d.is_zero(),
                    })
                    .collect();
                (pos, rows)
            })
            .min_by_key(|(_, rows)| rows.len())
            .expect("remaining is not empty");
        let ai = remaining.swap_remove(pos);
        let atom = self.atoms[ai].0;
        let mut keep_going = true;
        for (values, d) in rows {
            let mut added = Vec::new();
            let mut ok = true;
            for (t, v) in atom.terms().into_iter().zip(values) {
                if let Term::Variable(var) = t {
                    match self.binding.get(var) {
                        Some(prev) if prev != v => {
                            ok = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            self.binding.insert(var.clone(), v.to_string());
                            added.push(var.clone());
                        }
                    }
                }
            }
            if ok {
                self.degrees[ai] = d.clone();
                keep_going = self.run(remaining, visit);
            }
            for var in added {
                self.binding.remove(&var);
            }
            if !keep_going {
                break;
            }
        }
        remaining.push(ai);
        let last = remaining.len() - 1;
        remaining.swap(pos, last);
        keep_going
    }
}

/// Binds head variables to `tuple`; `None` if the head rejects it.
fn bind_head(head: &[Term], tuple: &[&str]) -> Option<BTreeMap<String, String>> {
    let mut binding = BTreeMap::new();
    for (t, v) in head.iter().zip(tuple) {
        match t {
            Term::Individual(n) if n != v => return None,
            Term::Variable(x) => match binding.insert(x.clone(), v.to_string()) {
                Some(prev) if prev != *v => return None,
                _ => {}
            },
            _ => {}
        }
    }
    Some(binding)
}

fn head_tuple(head: &[Term], binding: &BTreeMap<String, String>) -> Option<Vec<String>> {
    head.iter()
        .map(|t| match t {
            Term::Individual(n) => Some(n.clone()),
            Term::Variable(v) => binding.get(v).filter(|x| !x.starts_with(ANONYMOUS_PREFIX)).cloned(),
            Term::Anonymous => None,
        })
        .collect()
}

fn join<'a>(
    db: &'a AboxDatabase,
    atoms: Vec<(&'a Atom, Option<&'a Degree>)>,
    binding: BTreeMap<String, String>,
) -> Join<'a> {
    let n = atoms.len();
    Join { db, atoms, binding, degrees: vec![Degree::one(); n] }
}

fn tq_atoms(q: &ThresholdQuery) -> Vec<(&Atom, Option<&Degree>)> {
    q.atoms.iter().map(|a| (&a.atom, Some(&a.bound))).collect()
}

/// Answers of one threshold query over `db`.
pub fn eval_tq(db: &AboxDatabase, q: &ThresholdQuery) -> AnswerSet {
    let mut out = BTreeSet::new();
    let mut j = join(db, tq_atoms(q), BTreeMap::new());
    let mut remaining: Vec<usize> = (0..q.atoms.len()).collect();
    j.run(&mut remaining, &mut |b, _| {
        if let Some(t) = head_tuple(&q.head, b) {
            out.insert(t);
        }
        true
    });
    AnswerSet::from_tuples(q.arity(), out)
}

/// Whether `tuple` answers `q` over `db`.
pub fn tq_holds(db: &AboxDatabase, q: &ThresholdQuery, tuple: &[&str]) -> Result<bool> {
    if q.arity() != tuple.len() {
        return Err(Error::ArityMismatch { expected: q.arity(), found: tuple.len() });
    }
    let Some(binding) = bind_head(&q.head, tuple) else { return Ok(false) };
    let mut found = false;
    let mut j = join(db, tq_atoms(q), binding);
    let mut remaining: Vec<usize> = (0..q.atoms.len()).collect();
    j.run(&mut remaining, &mut |_, _| {
        found = true;
        false
    });
    Ok(found)
}

/// Union of the answers of every disjunct.
pub fn eval_utq(db: &AboxDatabase, u: &UnionTQ) -> AnswerSet {
    let mut out = BTreeSet::new();
    for q in u.queries() {
        out.extend(eval_tq(db, q).tuples());
    }
    AnswerSet::from_tuples(u.arity(), out)
}

/// Whether `tuple` answers some disjunct of `u`.
pub fn utq_holds(db: &AboxDatabase, u: &UnionTQ, tuple: &[&str]) -> Result<bool> {
    for q in u.queries() {
        if tq_holds(db, q, tuple)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Best match degree of `q(tuple)` over the rows of `db`; 0 if none.
pub fn eval_cq_degree(db: &AboxDatabase, q: &ConjunctiveQuery, tuple: &[&str], k: TNorm) -> Result<Degree> {
    if q.arity() != tuple.len() {
        return Err(Error::ArityMismatch { expected: q.arity(), found: tuple.len() });
    }
    let Some(binding) = bind_head(&q.head, tuple) else { return Ok(Degree::zero()) };
    let mut best = Degree::zero();
    let mut j = join(db, q.atoms.iter().map(|a| (a, None)).collect(), binding);
    let mut remaining: Vec<usize> = (0..q.atoms.len()).collect();
    j.run(&mut remaining, &mut |_, degrees| {
        let v = k.conj_fold(degrees);
        if v > best {
            best = v;
        }
        !best.is_one()
    });
    Ok(best)
}
