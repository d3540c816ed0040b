//! Shared generators and brute-force oracles for integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use fuzzy_dllite::answering::check_consistency;
use fuzzy_dllite::canonical::{
    build_canonical, check_model, existential_cycle_check, Budget, Canonical, Element, FuzzyInterpretation,
};
use fuzzy_dllite::hardness::{CnfFormula, Literal};
use fuzzy_dllite::parser::parse_ontology;
use fuzzy_dllite::{Atom, ConjunctiveQuery, Degree, Ontology, TNorm, Term, ThresholdAtom, ThresholdQuery};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub const CORPUS_SEED: u64 = 0x005e_ed0f_d11e;
pub const ORACLE_BUDGET: usize = 10_000;

/// Tenths from 0.2 to 1.
pub fn random_degree(rng: &mut StdRng) -> Degree {
    Degree::from_ratio(rng.gen_range(2..=10), 10).unwrap()
}

pub struct Shape {
    pub concepts: usize,
    pub roles: usize,
    pub individuals: usize,
}

impl Shape {
    pub fn random(rng: &mut StdRng) -> Self {
        Shape { concepts: rng.gen_range(2..=6), roles: rng.gen_range(1..=3), individuals: rng.gen_range(2..=8) }
    }

    pub fn concept(&self, rng: &mut StdRng) -> String {
        format!("A{}", rng.gen_range(0..self.concepts))
    }

    pub fn role(&self, rng: &mut StdRng) -> String {
        format!("p{}", rng.gen_range(0..self.roles))
    }

    pub fn individual(&self, rng: &mut StdRng) -> String {
        format!("i{}", rng.gen_range(0..self.individuals))
    }

    fn basic_role(&self, rng: &mut StdRng) -> String {
        let r = self.role(rng);
        if rng.gen_bool(0.3) {
            format!("{r}-")
        } else {
            r
        }
    }

    fn basic_concept(&self, rng: &mut StdRng) -> String {
        if rng.gen_bool(0.65) {
            self.concept(rng)
        } else {
            format!("EX {}", self.basic_role(rng))
        }
    }
}

/// A random ontology in `.fdl` text. Every concept and role name occurs in
/// the ABox so that the signature is fixed by the shape.
pub fn random_ontology_text(rng: &mut StdRng, shape: &Shape) -> String {
    let mut lines = Vec::new();
    for _ in 0..rng.gen_range(0..=6) {
        let d = random_degree(rng);
        let negative = rng.gen_bool(0.15);
        let not = if negative { "NOT " } else { "" };
        if rng.gen_bool(0.25) {
            lines.push(format!("{} SUBR {not}{} >= {d}", shape.basic_role(rng), shape.basic_role(rng)));
        } else {
            lines.push(format!("{} SUBC {not}{} >= {d}", shape.basic_concept(rng), shape.basic_concept(rng)));
        }
    }
    for c in 0..shape.concepts {
        let i = shape.individual(rng);
        lines.push(format!("A{c}({i}) >= {}", random_degree(rng)));
    }
    for r in 0..shape.roles {
        let (a, b) = (shape.individual(rng), shape.individual(rng));
        lines.push(format!("p{r}({a}, {b}) >= {}", random_degree(rng)));
    }
    for _ in 0..rng.gen_range(0..=6) {
        let d = random_degree(rng);
        if rng.gen_bool(0.5) {
            lines.push(format!("{}({}) >= {d}", shape.concept(rng), shape.individual(rng)));
        } else {
            lines.push(format!("{}({}, {}) >= {d}", shape.role(rng), shape.individual(rng), shape.individual(rng)));
        }
    }
    lines.join("\n") + "\n"
}

pub struct Instance {
    pub shape: Shape,
    pub text: String,
    pub ontology: Ontology,
    pub canonical: Canonical,
}

/// Statistics from corpus generation.
#[derive(Debug, Default)]
pub struct CorpusReport {
    pub rejected_cyclic: usize,
    pub rejected_inconsistent: usize,
    /// Consistency verdict disagreed with `check_model` on the canonical interpretation.
    pub consistency_mismatches: Vec<String>,
    /// Acyclic instances whose materialization still hit the budget.
    pub incomplete: Vec<String>,
}

/// `n` consistent acyclic Gödel instances.
pub fn godel_corpus(seed: u64, n: usize) -> (Vec<Instance>, CorpusReport) {
    let mut rng: StdRng = rand::SeedableRng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut report = CorpusReport::default();
    while out.len() < n {
        let shape = Shape::random(&mut rng);
        let text = random_ontology_text(&mut rng, &shape);
        let ontology = parse_ontology(&text).expect("generated ontology parses");
        if !existential_cycle_check(&ontology) {
            report.rejected_cyclic += 1;
            continue;
        }
        let canonical = build_canonical(&ontology, TNorm::Godel, Budget::new(ORACLE_BUDGET));
        if !canonical.complete {
            report.incomplete.push(text);
            continue;
        }
        let consistent = check_consistency(&ontology, TNorm::Godel).expect("Gödel consistency is decidable");
        let model = check_model(&canonical.interpretation, &ontology, TNorm::Godel).is_empty();
        if consistent != model {
            report.consistency_mismatches.push(text);
            continue;
        }
        if !consistent {
            report.rejected_inconsistent += 1;
            continue;
        }
        out.push(Instance { shape, text, ontology, canonical });
    }
    (out, report)
}

fn random_term(rng: &mut StdRng, shape: &Shape, vars: &[&str]) -> Term {
    match rng.gen_range(0..10) {
        0 => Term::ind(shape.individual(rng)),
        1 => Term::Anonymous,
        _ => Term::var(*vars.choose(rng).unwrap()),
    }
}

/// A random CQ with 1 to 3 atoms and at most two answer variables.
pub fn random_cq(rng: &mut StdRng, shape: &Shape) -> ConjunctiveQuery {
    let vars = ["x", "y", "z"];
    let mut atoms = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        if rng.gen_bool(0.5) {
            atoms.push(Atom::concept(shape.concept(rng), random_term(rng, shape, &vars)));
        } else {
            atoms.push(Atom::role(shape.role(rng), random_term(rng, shape, &vars), random_term(rng, shape, &vars)));
        }
    }
    let mut used: Vec<String> = Vec::new();
    for a in &atoms {
        for v in a.variables() {
            if !used.iter().any(|u| u == v) {
                used.push(v.to_string());
            }
        }
    }
    used.shuffle(rng);
    let arity = rng.gen_range(0..=used.len().min(2));
    let head = used[..arity].iter().map(Term::var).collect();
    ConjunctiveQuery::new("q", head, atoms).expect("head variables occur in the body")
}

pub fn random_tq(rng: &mut StdRng, shape: &Shape) -> ThresholdQuery {
    let cq = random_cq(rng, shape);
    let atoms = cq.atoms.into_iter().map(|a| ThresholdAtom::new(a, random_degree(rng))).collect();
    ThresholdQuery::new("q", cq.head, atoms).unwrap()
}

/// One match of a query body: the variable binding and the degree of each atom.
pub struct Match {
    pub binding: BTreeMap<String, Element>,
    pub degrees: Vec<Degree>,
}

fn bind(binding: &mut BTreeMap<String, Element>, t: &Term, e: &Element, undo: &mut Vec<String>) -> bool {
    match t {
        Term::Anonymous => true,
        Term::Individual(n) => e.as_named() == Some(n.as_str()),
        Term::Variable(v) => match binding.get(v) {
            Some(b) => b == e,
            None => {
                binding.insert(v.clone(), e.clone());
                undo.push(v.clone());
                true
            }
        },
    }
}

/// Every way of matching `atoms` against the positive entries of `i`, by
/// plain enumeration.
pub fn naive_matches(i: &FuzzyInterpretation, atoms: &[Atom]) -> Vec<Match> {
    let concepts: Vec<(String, Element, Degree)> =
        i.concept_entries().map(|(c, e, d)| (c.to_string(), e.clone(), d.clone())).collect();
    let roles: Vec<(String, Element, Element, Degree)> =
        i.role_entries().map(|(r, a, b, d)| (r.to_string(), a.clone(), b.clone(), d.clone())).collect();
    let mut out = Vec::new();
    let mut binding = BTreeMap::new();
    let mut degrees = Vec::new();
    go(atoms, &concepts, &roles, &mut binding, &mut degrees, &mut out);
    out
}

fn go(
    atoms: &[Atom],
    concepts: &[(String, Element, Degree)],
    roles: &[(String, Element, Element, Degree)],
    binding: &mut BTreeMap<String, Element>,
    degrees: &mut Vec<Degree>,
    out: &mut Vec<Match>,
) {
    let Some((first, rest)) = atoms.split_first() else {
        out.push(Match { binding: binding.clone(), degrees: degrees.clone() });
        return;
    };
    let mut attempt = |pairs: &[(&Term, &Element)], d: &Degree, binding: &mut BTreeMap<String, Element>| {
        let mut undo = Vec::new();
        if pairs.iter().all(|(t, e)| bind(binding, t, e, &mut undo)) {
            degrees.push(d.clone());
            go(rest, concepts, roles, binding, degrees, out);
            degrees.pop();
        }
        for v in undo {
            binding.remove(&v);
        }
    };
    match first {
        Atom::Concept { name, term } => {
            for (c, e, d) in concepts.iter().filter(|(c, _, _)| c == name) {
                let _ = c;
                attempt(&[(term, e)], d, binding);
            }
        }
        Atom::Role { name, subject, object } => {
            for (_, a, b, d) in roles.iter().filter(|(r, _, _, _)| r == name) {
                attempt(&[(subject, a), (object, b)], d, binding);
            }
        }
    }
}

fn project(head: &[Term], binding: &BTreeMap<String, Element>) -> Option<Vec<String>> {
    head.iter()
        .map(|t| match t {
            Term::Variable(v) => binding[v].as_named().map(str::to_string),
            Term::Individual(n) => Some(n.clone()),
            Term::Anonymous => None,
        })
        .collect()
}

/// Named answers of a TQ in `i`.
pub fn naive_tq_answers(i: &FuzzyInterpretation, q: &ThresholdQuery) -> BTreeSet<Vec<String>> {
    let atoms: Vec<Atom> = q.atoms.iter().map(|a| a.atom.clone()).collect();
    naive_matches(i, &atoms)
        .into_iter()
        .filter(|m| m.degrees.iter().zip(&q.atoms).all(|(d, a)| *d >= a.bound))
        .filter_map(|m| project(&q.head, &m.binding))
        .collect()
}

/// Named tuples with a positive degree for `q` in `i`, with their degree
/// computed by folding `conj` over each match and maximizing.
pub fn naive_cq_degrees(
    i: &FuzzyInterpretation,
    q: &ConjunctiveQuery,
    conj: impl Fn(&Degree, &Degree) -> Degree,
) -> BTreeMap<Vec<String>, Degree> {
    let mut out: BTreeMap<Vec<String>, Degree> = BTreeMap::new();
    for m in naive_matches(i, &q.atoms) {
        let Some(t) = project(&q.head, &m.binding) else { continue };
        let v = m.degrees.iter().fold(Degree::one(), |acc, d| conj(&acc, d));
        if v.is_zero() {
            continue;
        }
        let slot = out.entry(t).or_insert_with(Degree::zero);
        if v > *slot {
            *slot = v;
        }
    }
    out
}

pub fn godel_min(a: &Degree, b: &Degree) -> Degree {
    a.min(b).clone()
}

pub fn product(a: &Degree, b: &Degree) -> Degree {
    Degree::from_rational(a.as_rational() * b.as_rational()).unwrap()
}

/// Every tuple of the ontology's individuals with the given arity.
pub fn all_tuples(o: &Ontology, arity: usize) -> Vec<Vec<String>> {
    let mut out = vec![vec![]];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t: Vec<String>| {
                o.individuals().iter().map(move |i| {
                    let mut t = t.clone();
                    t.push(i.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// Truth-table satisfiability; returns every satisfying set of true variables.
pub fn brute_force_sat(phi: &CnfFormula) -> Vec<BTreeSet<String>> {
    let vars = phi.variables();
    let mut out = Vec::new();
    for mask in 0u32..(1 << vars.len()) {
        let t: BTreeSet<String> =
            vars.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v.clone()).collect();
        let ok = phi.clauses.iter().all(|c| c.iter().any(|l| t.contains(&l.var) == l.positive));
        if ok {
            out.push(t);
        }
    }
    out
}

/// All valuations of the formula's variables.
pub fn all_valuations(phi: &CnfFormula) -> Vec<BTreeSet<String>> {
    let vars = phi.variables();
    (0u32..(1 << vars.len()))
        .map(|mask| vars.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v.clone()).collect())
        .collect()
}

pub fn literals(vars: usize) -> Vec<Literal> {
    (1..=vars).flat_map(|v| [Literal::pos(v.to_string()), Literal::neg(v.to_string())]).collect()
}

/// Clauses as sorted multisets of three literals.
pub fn all_clauses(vars: usize) -> Vec<[Literal; 3]> {
    let lits = literals(vars);
    let mut out = Vec::new();
    for a in 0..lits.len() {
        for b in a..lits.len() {
            for c in b..lits.len() {
                out.push([lits[a].clone(), lits[b].clone(), lits[c].clone()]);
            }
        }
    }
    out
}

pub fn random_formula(rng: &mut StdRng, vars: usize, clauses: usize) -> CnfFormula {
    let lits = literals(vars);
    CnfFormula::new((0..clauses).map(|_| [0, 1, 2].map(|_| lits.choose(rng).unwrap().clone())).collect())
}
