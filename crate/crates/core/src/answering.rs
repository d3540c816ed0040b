//! Consistency checking and query answering pipelines.
//!
//! | operation            | Gödel | product | Łukasiewicz            |
//! |----------------------|-------|---------|------------------------|
//! | consistency          | yes   | yes     | unsupported            |
//! | degree queries       | yes   | no      | no                     |
//! | threshold queries    | yes   | yes     | assumed consistency    |
//! | positive answers     | yes   | yes     | unsupported            |

use std::collections::BTreeMap;

use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::evaluator::{eval_utq, utq_holds, AboxDatabase, AnswerSet};
use crate::ontology::{
    classical_version, cut, degree_set, BasicConcept, GeneralConcept, GeneralRole, Inclusion, Ontology,
};
use crate::query::{Atom, ConjunctiveQuery, Query, Term, ThresholdAtom, ThresholdQuery, UnionTQ};
use crate::rewriter::perfect_ref;
use crate::tnorm::TNorm;

fn unsupported(operation: &'static str, tnorm: TNorm) -> Error {
    Error::Unsupported { operation, tnorm }
}

fn membership(b: &BasicConcept, t: Term) -> Atom {
    match b {
        BasicConcept::Named(a) => Atom::concept(a.clone(), t),
        BasicConcept::Exists(q) if q.inverted => Atom::role(q.name.clone(), Term::Anonymous, t),
        BasicConcept::Exists(q) => Atom::role(q.name.clone(), t, Term::Anonymous),
    }
}

fn one(atom: Atom) -> ThresholdAtom {
    ThresholdAtom::new(atom, Degree::one())
}

/// Boolean queries whose crisp matches witness a violated negative axiom.
fn violation_queries(o: &Ontology) -> Vec<ThresholdQuery> {
    let x = || Term::var("x");
    let y = || Term::var("y");
    o.negative_axioms()
        .map(|a| {
            let atoms = match &a.inclusion {
                Inclusion::Concept { lhs, rhs: GeneralConcept::Negated(b) } => {
                    vec![one(membership(lhs, x())), one(membership(b, x()))]
                }
                Inclusion::Role { lhs, rhs: GeneralRole::Negated(r) } => {
                    let pair = |q: &crate::ontology::BasicRole| {
                        if q.inverted {
                            Atom::role(q.name.clone(), y(), x())
                        } else {
                            Atom::role(q.name.clone(), x(), y())
                        }
                    };
                    vec![one(pair(lhs)), one(pair(r))]
                }
                _ => unreachable!("negative axioms have a negated right-hand side"),
            };
            ThresholdQuery { name: "q".into(), head: vec![], atoms }
        })
        .collect()
}

/// Whether `o` has a model under `k`.
///
/// Under Gödel and product this coincides with consistency of the classical
/// version, decided by rewriting one Boolean query per negative axiom.
pub fn check_consistency(o: &Ontology, k: TNorm) -> Result<bool> {
    if k == TNorm::Lukasiewicz {
        return Err(unsupported("consistency checking", k));
    }
    let crisp = classical_version(o);
    let db = AboxDatabase::from_abox(crisp.abox());
    for q in violation_queries(&crisp) {
        let u = perfect_ref(&q, crisp.tbox(), TNorm::Godel);
        if !eval_utq(&db, &u).is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `TQ(q, d)`: every atom of `q` with bound `d`.
pub fn cq_to_tq(q: &ConjunctiveQuery, d: &Degree) -> Result<ThresholdQuery> {
    if d.is_zero() {
        return Err(Error::ZeroThreshold);
    }
    Ok(ThresholdQuery {
        name: q.name.clone(),
        head: q.head.clone(),
        atoms: q.atoms.iter().map(|a| ThresholdAtom::new(a.clone(), d.clone())).collect(),
    })
}

/// Classical answering of `q` over the classical version of a cut.
struct Level {
    rewriting: UnionTQ,
    db: AboxDatabase,
}

/// Degree-query answering under Gödel for one consistent ontology.
///
/// Rewritings are cached per cut level, so repeated calls for different
/// tuples of the same query are cheap.
pub struct GodelAnswerer<'o> {
    ontology: &'o Ontology,
    degrees: Vec<Degree>,
    query: ConjunctiveQuery,
    levels: BTreeMap<Degree, Level>,
}

impl<'o> GodelAnswerer<'o> {
    /// Fails with [`Error::Inconsistent`] when `o` has no Gödel model.
    pub fn new(ontology: &'o Ontology, query: &ConjunctiveQuery) -> Result<Self> {
        if !check_consistency(ontology, TNorm::Godel)? {
            return Err(Error::Inconsistent(TNorm::Godel));
        }
        Ok(Self::assume_consistent(ontology, query))
    }

    /// Skips the consistency check.
    pub fn assume_consistent(ontology: &'o Ontology, query: &ConjunctiveQuery) -> Self {
        GodelAnswerer { ontology, degrees: degree_set(ontology), query: query.clone(), levels: BTreeMap::new() }
    }

    fn level(&mut self, theta: &Degree) -> Result<&Level> {
        if theta.is_zero() {
            return Err(Error::ZeroThreshold);
        }
        if !self.levels.contains_key(theta) {
            let crisp = classical_version(&cut(self.ontology, theta)?);
            let q = cq_to_tq(&self.query, &Degree::one())?;
            let level = Level {
                rewriting: perfect_ref(&q, crisp.tbox(), TNorm::Godel),
                db: AboxDatabase::from_abox(crisp.abox()),
            };
            self.levels.insert(theta.clone(), level);
        }
        Ok(&self.levels[theta])
    }

    /// Tuples `a` with `O ⊨ q(a) ≥ θ`.
    pub fn at_least(&mut self, theta: &Degree) -> Result<AnswerSet> {
        let level = self.level(theta)?;
        Ok(eval_utq(&level.db, &level.rewriting))
    }

    fn holds(&mut self, theta: &Degree, tuple: &[&str]) -> Result<bool> {
        let level = self.level(theta)?;
        utq_holds(&level.db, &level.rewriting, tuple)
    }

    /// The largest degree `d` with `O ⊨ q(a) ≥ d`, scanning the degree set
    /// downwards; 0 if there is none.
    pub fn degree_of(&mut self, tuple: &[&str]) -> Result<Degree> {
        self.check_arity(tuple)?;
        for d in self.degrees.clone().iter().rev() {
            if self.holds(d, tuple)? {
                return Ok(d.clone());
            }
        }
        Ok(Degree::zero())
    }

    /// Same result as [`GodelAnswerer::degree_of`] using binary search over
    /// the degree set, which is sound because answers are antitone in θ.
    pub fn degree_of_bisect(&mut self, tuple: &[&str]) -> Result<Degree> {
        self.check_arity(tuple)?;
        let degrees = self.degrees.clone();
        // Invariant: degrees[..lo] hold, degrees[hi..] do not.
        let (mut lo, mut hi) = (0usize, degrees.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.holds(&degrees[mid], tuple)? {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        Ok(if lo == 0 { Degree::zero() } else { degrees[lo - 1].clone() })
    }

    /// The first `k` answers found while descending through the degree set,
    /// each paired with its degree.
    pub fn top_k(&mut self, k: usize) -> Result<AnswerSet> {
        let mut found: BTreeMap<Vec<String>, Degree> = BTreeMap::new();
        for d in self.degrees.clone().iter().rev() {
            for t in self.at_least(d)?.tuples() {
                found.entry(t).or_insert_with(|| d.clone());
            }
            if found.len() >= k {
                break;
            }
        }
        let mut answers = AnswerSet::with_degrees(self.query.arity(), found);
        answers.truncate(k);
        Ok(answers)
    }

    fn check_arity(&self, tuple: &[&str]) -> Result<()> {
        if tuple.len() != self.query.arity() {
            return Err(Error::ArityMismatch { expected: self.query.arity(), found: tuple.len() });
        }
        Ok(())
    }
}

/// Tuples `a` with `O ⊨ q(a) ≥ θ` under Gödel.
pub fn answer_at_least(o: &Ontology, q: &ConjunctiveQuery, theta: &Degree) -> Result<AnswerSet> {
    if theta.is_zero() {
        return Err(Error::ZeroThreshold);
    }
    GodelAnswerer::new(o, q)?.at_least(theta)
}

/// The degree of `tuple` as an answer to `q` under Gödel.
pub fn degree_of(o: &Ontology, q: &ConjunctiveQuery, tuple: &[&str]) -> Result<Degree> {
    GodelAnswerer::new(o, q)?.degree_of(tuple)
}

/// Like [`degree_of`] but with binary search over the degree set.
pub fn degree_of_bisect(o: &Ontology, q: &ConjunctiveQuery, tuple: &[&str]) -> Result<Degree> {
    GodelAnswerer::new(o, q)?.degree_of_bisect(tuple)
}

/// The `k` best answers under Gödel, by degree and then lexicographically.
pub fn top_k(o: &Ontology, q: &ConjunctiveQuery, k: usize) -> Result<AnswerSet> {
    GodelAnswerer::new(o, q)?.top_k(k)
}

/// Answers to a threshold query via rewriting.
///
/// Under Gödel and product consistency is checked first unless
/// `assume_consistent` is set. Under Łukasiewicz consistency cannot be
/// decided, so the caller must set `assume_consistent`.
pub fn answer_threshold(o: &Ontology, q: &ThresholdQuery, k: TNorm, assume_consistent: bool) -> Result<AnswerSet> {
    if !assume_consistent {
        if k == TNorm::Lukasiewicz {
            return Err(Error::ConsistencyNotAssumed(k));
        }
        if !check_consistency(o, k)? {
            return Err(Error::Inconsistent(k));
        }
    }
    let db = AboxDatabase::from_abox(o.abox());
    Ok(eval_utq(&db, &perfect_ref(q, o.tbox(), k)))
}

/// Tuples whose degree is positive in every model (Gödel, product).
pub fn positive_answers(o: &Ontology, q: &ConjunctiveQuery, k: TNorm) -> Result<AnswerSet> {
    if k == TNorm::Lukasiewicz {
        return Err(unsupported("positive answering", k));
    }
    if !check_consistency(o, k)? {
        return Err(Error::Inconsistent(k));
    }
    let crisp = classical_version(o);
    let db = AboxDatabase::from_abox(crisp.abox());
    Ok(eval_utq(&db, &perfect_ref(&cq_to_tq(q, &Degree::one())?, crisp.tbox(), TNorm::Godel)))
}

/// What to compute for a query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    AtLeast(Degree),
    DegreeOf { tuple: Vec<String>, bisect: bool },
    TopK(usize),
    Threshold { assume_consistent: bool },
    Positive,
}

/// A query together with the answering mode and t-norm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryRequest {
    pub query: Query,
    pub mode: Mode,
    pub tnorm: TNorm,
}

impl QueryRequest {
    /// Checks that mode, query kind and t-norm fit together.
    pub fn validate(&self) -> Result<()> {
        let wants_cq = !matches!(self.mode, Mode::Threshold { .. });
        match (&self.query, wants_cq) {
            (Query::Threshold(_), true) => {
                return Err(Error::InvalidQuery("this mode expects a query without thresholds".into()))
            }
            (Query::Conjunctive(_), false) => {
                return Err(Error::InvalidQuery("threshold answering expects a threshold query".into()))
            }
            _ => {}
        }
        let k = self.tnorm;
        match &self.mode {
            Mode::AtLeast(_) | Mode::DegreeOf { .. } | Mode::TopK(_) if k != TNorm::Godel => {
                Err(unsupported("degree-query answering", k))
            }
            Mode::Positive if k == TNorm::Lukasiewicz => Err(unsupported("positive answering", k)),
            Mode::AtLeast(d) if d.is_zero() => Err(Error::ZeroThreshold),
            Mode::TopK(0) => Err(Error::InvalidQuery("top-k needs k >= 1".into())),
            Mode::DegreeOf { tuple, .. } if tuple.len() != self.query.arity() => {
                Err(Error::ArityMismatch { expected: self.query.arity(), found: tuple.len() })
            }
            _ => Ok(()),
        }
    }

    pub fn execute(&self, o: &Ontology) -> Result<AnswerSet> {
        self.validate()?;
        match (&self.query, &self.mode) {
            (Query::Threshold(q), Mode::Threshold { assume_consistent }) => {
                answer_threshold(o, q, self.tnorm, *assume_consistent)
            }
            (Query::Conjunctive(q), Mode::AtLeast(d)) => answer_at_least(o, q, d),
            (Query::Conjunctive(q), Mode::DegreeOf { tuple, bisect }) => {
                let t: Vec<&str> = tuple.iter().map(String::as_str).collect();
                let mut a = GodelAnswerer::new(o, q)?;
                let d = if *bisect { a.degree_of_bisect(&t)? } else { a.degree_of(&t)? };
                Ok(AnswerSet::with_degrees(q.arity(), [(tuple.clone(), d)]))
            }
            (Query::Conjunctive(q), Mode::TopK(k)) => top_k(o, q, *k),
            (Query::Conjunctive(q), Mode::Positive) => positive_answers(o, q, self.tnorm),
            _ => unreachable!("validated above"),
        }
    }
}

/// Every tuple over the ontology's individuals with the query's arity.
pub fn candidate_tuples(o: &Ontology, arity: usize) -> Vec<Vec<String>> {
    let inds: Vec<&String> = o.individuals().iter().collect();
    let mut out: Vec<Vec<String>> = vec![vec![]];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                inds.iter().map(move |i| {
                    let mut t = t.clone();
                    t.push((*i).clone());
                    t
                })
            })
            .collect();
    }
    out
}
