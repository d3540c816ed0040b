//! Threshold-query rewriting (fuzzy PerfectRef).
//!
//! A threshold query is rewritten against a TBox into a union of threshold
//! queries that can be evaluated over the ABox alone. Axioms are applied
//! backwards to single atoms, transferring the atom bound according to the
//! t-norm, and pairs of unifiable atoms are merged.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::ontology::{Axiom, BasicConcept, BasicRole, GeneralConcept, GeneralRole, Inclusion};
use crate::query::{Atom, Term, ThresholdAtom, ThresholdQuery, UnionTQ};
use crate::tnorm::TNorm;

/// Whether the positive axiom `axiom` can be applied backwards to `atom`.
///
/// A term counts as unbound only when it is [`Term::Anonymous`]; queries
/// built by [`perfect_ref`] mark unbound variables that way.
pub fn applicable(axiom: &Axiom, atom: &ThresholdAtom) -> bool {
    if axiom.is_negative() || atom.bound > axiom.degree {
        return false;
    }
    match (&axiom.inclusion, &atom.atom) {
        (
            Inclusion::Concept { rhs: GeneralConcept::Positive(BasicConcept::Named(a)), .. },
            Atom::Concept { name, .. },
        ) => a == name,
        (
            Inclusion::Concept { rhs: GeneralConcept::Positive(BasicConcept::Exists(q)), .. },
            Atom::Role { name, subject, object },
        ) => &q.name == name && if q.inverted { *subject == Term::Anonymous } else { *object == Term::Anonymous },
        (Inclusion::Role { rhs: GeneralRole::Positive(q), .. }, Atom::Role { name, .. }) => &q.name == name,
        _ => false,
    }
}

/// Bound required on the rewritten atom so that the axiom yields `d`.
pub fn transfer(k: TNorm, d: &Degree, e: &Degree) -> Degree {
    match k {
        TNorm::Godel => d.clone(),
        TNorm::Product => Degree::clamped(d.as_rational() / e.as_rational()),
        TNorm::Lukasiewicz => {
            let one = Degree::one();
            Degree::clamped(d.as_rational() + one.as_rational() - e.as_rational())
        }
    }
}

/// The atom expressing membership of `t` in the basic concept `b`.
fn concept_atom(b: &BasicConcept, t: Term) -> Atom {
    match b {
        BasicConcept::Named(a) => Atom::concept(a.clone(), t),
        BasicConcept::Exists(q) if q.inverted => Atom::role(q.name.clone(), Term::Anonymous, t),
        BasicConcept::Exists(q) => Atom::role(q.name.clone(), t, Term::Anonymous),
    }
}

/// The atom expressing `Q(t1, t2)`.
fn role_atom(q: &BasicRole, t1: Term, t2: Term) -> Atom {
    if q.inverted {
        Atom::role(q.name.clone(), t2, t1)
    } else {
        Atom::role(q.name.clone(), t1, t2)
    }
}

/// The result of applying `axiom` to `atom`.
pub fn gr(atom: &ThresholdAtom, axiom: &Axiom, k: TNorm) -> Result<ThresholdAtom> {
    if !applicable(axiom, atom) {
        return Err(Error::NotApplicable { axiom: axiom.to_string(), atom: atom.to_string() });
    }
    let bound = transfer(k, &atom.bound, &axiom.degree);
    let rewritten = match (&axiom.inclusion, &atom.atom) {
        (Inclusion::Concept { lhs, .. }, Atom::Concept { term, .. }) => concept_atom(lhs, term.clone()),
        (Inclusion::Concept { lhs, rhs }, Atom::Role { subject, object, .. }) => {
            let BasicConcept::Exists(q) = rhs.basic() else { unreachable!("checked by applicable") };
            let t = if q.inverted { object.clone() } else { subject.clone() };
            concept_atom(lhs, t)
        }
        (Inclusion::Role { lhs, rhs }, Atom::Role { subject, object, .. }) => {
            let q = rhs.basic();
            // Express rhs(subject', object') = P(subject, object) in terms of lhs.
            let (t1, t2) =
                if q.inverted { (object.clone(), subject.clone()) } else { (subject.clone(), object.clone()) };
            role_atom(lhs, t1, t2)
        }
        _ => unreachable!("checked by applicable"),
    };
    Ok(ThresholdAtom::new(rewritten, bound))
}

/// Fresh variable names that cannot clash with the query's own.
struct Fresh {
    taken: BTreeSet<String>,
    next: usize,
}

impl Fresh {
    fn for_query(q: &ThresholdQuery) -> Self {
        let mut taken: BTreeSet<String> = q.head.iter().filter_map(|t| t.as_variable().map(str::to_string)).collect();
        for a in &q.atoms {
            taken.extend(a.atom.variables().map(str::to_string));
        }
        Fresh { taken, next: 0 }
    }

    fn var(&mut self) -> String {
        loop {
            let name = format!("_u{}", self.next);
            self.next += 1;
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }
}

/// Replaces every anonymous body term by a distinct fresh variable.
fn name_anonymous(q: &ThresholdQuery) -> ThresholdQuery {
    let mut fresh = Fresh::for_query(q);
    let mut out = q.clone();
    for a in &mut out.atoms {
        for t in a.atom.terms_mut() {
            if *t == Term::Anonymous {
                *t = Term::Variable(fresh.var());
            }
        }
    }
    out
}

/// Merges identical atoms (keeping the larger bound) and marks non-head
/// variables occurring once as anonymous.
fn tidy(mut q: ThresholdQuery) -> ThresholdQuery {
    let mut merged: Vec<ThresholdAtom> = Vec::with_capacity(q.atoms.len());
    for a in q.atoms.drain(..) {
        let anonymous = a.atom.terms().iter().any(|t| **t == Term::Anonymous);
        match merged.iter_mut().find(|m| !anonymous && m.atom == a.atom) {
            Some(m) if m.bound < a.bound => m.bound = a.bound,
            Some(_) => {}
            None => merged.push(a),
        }
    }
    let head: BTreeSet<&str> = q.head.iter().filter_map(Term::as_variable).collect();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for a in &merged {
        for v in a.atom.variables() {
            *counts.entry(v.to_string()).or_default() += 1;
        }
    }
    let lone: BTreeSet<String> =
        counts.into_iter().filter(|(v, n)| *n == 1 && !head.contains(v.as_str())).map(|(v, _)| v).collect();
    for a in &mut merged {
        for t in a.atom.terms_mut() {
            if matches!(t, Term::Variable(v) if lone.contains(v)) {
                *t = Term::Anonymous;
            }
        }
    }
    q.atoms = merged;
    q
}

/// Term classes used for most general unifiers.
struct Unifier {
    parent: BTreeMap<Term, Term>,
}

impl Unifier {
    fn new() -> Self {
        Unifier { parent: BTreeMap::new() }
    }

    fn find(&mut self, t: &Term) -> Term {
        let mut cur = t.clone();
        while let Some(p) = self.parent.get(&cur) {
            if *p == cur {
                break;
            }
            cur = p.clone();
        }
        cur
    }

    /// Merges the classes of `a` and `b`; `rank` orders preferred
    /// representatives (lower is better).
    fn union(&mut self, a: &Term, b: &Term, rank: &dyn Fn(&Term) -> (u8, usize)) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return true;
        }
        if matches!((&ra, &rb), (Term::Individual(_), Term::Individual(_))) {
            return false;
        }
        let (keep, drop) = if rank(&ra) <= rank(&rb) { (ra, rb) } else { (rb, ra) };
        self.parent.insert(drop, keep.clone());
        self.parent.insert(keep.clone(), keep);
        true
    }
}

/// Applies the most general unifier of `p.atoms[i]` and `p.atoms[j]` to `p`.
///
/// The two atoms collapse into one carrying the larger bound. Anonymous
/// terms are pairwise distinct. Answer variables may be bound to individuals
/// or to each other; the head then shows the unified terms.
pub fn reduce(p: &ThresholdQuery, i: usize, j: usize) -> Result<ThresholdQuery> {
    let named = name_anonymous(p);
    let (g1, g2) = (&named.atoms[i].atom, &named.atoms[j].atom);
    let fail = || Error::NotUnifiable(p.atoms[i].atom.to_string(), p.atoms[j].atom.to_string());
    if g1.predicate() != g2.predicate() || g1.arity() != g2.arity() {
        return Err(fail());
    }
    let head_pos: BTreeMap<String, usize> =
        named.head.iter().enumerate().filter_map(|(i, t)| t.as_variable().map(|v| (v.to_string(), i))).rev().collect();
    let rank = |t: &Term| -> (u8, usize) {
        match t {
            Term::Individual(_) => (0, 0),
            Term::Variable(v) => match head_pos.get(v) {
                Some(pos) => (1, *pos),
                None => (2, 0),
            },
            Term::Anonymous => (3, 0),
        }
    };
    let mut u = Unifier::new();
    for (a, b) in g1.terms().into_iter().zip(g2.terms()) {
        if !u.union(a, b, &rank) {
            return Err(fail());
        }
    }
    let mut out = named.clone();
    let mut apply = |t: &mut Term| {
        if !matches!(t, Term::Individual(_)) {
            *t = u.find(t);
        }
    };
    for t in &mut out.head {
        apply(t);
    }
    for a in &mut out.atoms {
        for t in a.atom.terms_mut() {
            apply(t);
        }
    }
    // Collapse the unified pair explicitly, then merge any other duplicates.
    let bound = out.atoms[i].bound.clone().max(out.atoms[j].bound.clone());
    out.atoms[i].bound = bound;
    out.atoms.remove(j);
    Ok(tidy(out))
}

/// A renaming-invariant key for duplicate elimination.
fn canonical(q: &ThresholdQuery) -> ThresholdQuery {
    let head: BTreeSet<&str> = q.head.iter().filter_map(Term::as_variable).collect();
    let mask = |t: &Term| -> Term {
        match t {
            Term::Variable(v) if !head.contains(v.as_str()) => Term::Variable(String::new()),
            other => other.clone(),
        }
    };
    let mut atoms = q.atoms.clone();
    atoms.sort_by(|a, b| {
        let ka = (a.atom.predicate(), a.atom.terms().into_iter().map(&mask).collect::<Vec<_>>(), &a.bound);
        let kb = (b.atom.predicate(), b.atom.terms().into_iter().map(&mask).collect::<Vec<_>>(), &b.bound);
        ka.cmp(&kb)
    });
    let mut names: BTreeMap<String, String> = BTreeMap::new();
    let mut counter = 0usize;
    for a in &mut atoms {
        for t in a.atom.terms_mut() {
            if let Term::Variable(v) = t {
                if head.contains(v.as_str()) {
                    continue;
                }
                let n = names.entry(v.clone()).or_insert_with(|| {
                    counter += 1;
                    loop {
                        let candidate = format!("y{counter}");
                        if !head.contains(candidate.as_str()) {
                            break candidate;
                        }
                        counter += 1;
                    }
                });
                *t = Term::Variable(n.clone());
            }
        }
    }
    atoms.sort();
    ThresholdQuery { name: q.name.clone(), head: q.head.clone(), atoms }
}

/// Rewrites `q` against the positive axioms of `tbox`.
///
/// The result contains `q` itself first, followed by every query obtained by
/// repeatedly applying axioms to atoms and merging unifiable atoms.
pub fn perfect_ref(q: &ThresholdQuery, tbox: &[Axiom], k: TNorm) -> UnionTQ {
    let positive: Vec<&Axiom> = tbox.iter().filter(|a| a.is_positive()).collect();
    let start = canonical(&tidy(q.clone()));
    let mut seen: HashSet<ThresholdQuery> = HashSet::new();
    let mut result = vec![q.clone()];
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    let mut push =
        |candidate: ThresholdQuery, queue: &mut VecDeque<ThresholdQuery>, result: &mut Vec<ThresholdQuery>| {
            let c = canonical(&candidate);
            if seen.insert(c.clone()) {
                result.push(c.clone());
                queue.push_back(c);
            }
        };
    while let Some(p) = queue.pop_front() {
        for (i, atom) in p.atoms.iter().enumerate() {
            for axiom in &positive {
                if applicable(axiom, atom) {
                    let mut next = p.clone();
                    next.atoms[i] = gr(atom, axiom, k).expect("applicability was checked");
                    push(tidy(next), &mut queue, &mut result);
                }
            }
        }
        for i in 0..p.atoms.len() {
            for j in (i + 1)..p.atoms.len() {
                if let Ok(r) = reduce(&p, i, j) {
                    push(r, &mut queue, &mut result);
                }
            }
        }
    }
    UnionTQ::new(result).expect("the input query is always present")
}
