//! From 3-CNF formulas to Łukasiewicz DL-Lite_Horn ontologies.
//!
//! A formula φ is satisfiable iff the generated ontology has a model. For
//! each variable `v` the ontology forces exactly one of `A_v`, `Ap_v` to 1
//! and the other to 2/3 at the individual `a`; each clause then demands
//! that one of its literals is at 1.
//!
//! [`grid_search_consistent`] looks for single-element models whose degrees
//! lie on a finite grid. Finding none is evidence of inconsistency, not a
//! proof: the search does not cover real-valued or multi-element models.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::degree::Degree;
use crate::error::{Error, Result, SourceError};
use crate::tnorm::TNorm;

/// Node budget used by the CLI and the examples.
pub const DEFAULT_NODE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: String,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: impl Into<String>) -> Self {
        Literal { var: var.into(), positive: true }
    }

    pub fn neg(var: impl Into<String>) -> Self {
        Literal { var: var.into(), positive: false }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            f.write_str(&self.var)
        } else {
            write!(f, "-{}", self.var)
        }
    }
}

/// A conjunction of clauses with exactly three literals each.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    pub clauses: Vec<[Literal; 3]>,
}

impl CnfFormula {
    pub fn new(clauses: Vec<[Literal; 3]>) -> Self {
        CnfFormula { clauses }
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for c in &self.clauses {
            for l in c {
                if seen.insert(l.var.clone()) {
                    out.push(l.var.clone());
                }
            }
        }
        out
    }

    /// Whether the valuation (the set of true variables) satisfies every clause.
    pub fn satisfied_by(&self, true_vars: &BTreeSet<String>) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| true_vars.contains(&l.var) == l.positive))
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let clauses: Vec<String> = self.clauses.iter().map(|c| format!("({} | {} | {})", c[0], c[1], c[2])).collect();
        f.write_str(&clauses.join(" & "))
    }
}

/// Parses DIMACS CNF where every clause has exactly three literals.
/// Variables are named by their number.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut clause_line = 1;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('p') || trimmed.starts_with('%') {
            continue;
        }
        let mut column = 1;
        for token in line.split_whitespace() {
            column = line[column - 1..].find(token).map_or(column, |p| p + column);
            let n: i64 = token
                .parse()
                .map_err(|_| SourceError::new(line_no, column, format!("expected a literal, found `{token}`")))?;
            if current.is_empty() {
                clause_line = line_no;
            }
            if n == 0 {
                let lits: [Literal; 3] = std::mem::take(&mut current).try_into().map_err(|v: Vec<Literal>| {
                    SourceError::new(clause_line, 1, format!("clause has {} literals; exactly 3 are required", v.len()))
                })?;
                clauses.push(lits);
            } else {
                let var = n.unsigned_abs().to_string();
                current.push(if n > 0 { Literal::pos(var) } else { Literal::neg(var) });
            }
            column += token.len();
        }
    }
    if !current.is_empty() {
        let line = text.lines().count().max(1);
        return Err(SourceError::new(line, 1, "last clause is not terminated by 0").into());
    }
    Ok(CnfFormula { clauses })
}

/// A concept in a Horn inclusion: a name or `⊥`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HornConcept {
    Name(String),
    Bottom,
}

impl fmt::Display for HornConcept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HornConcept::Name(n) => f.write_str(n),
            HornConcept::Bottom => f.write_str("BOT"),
        }
    }
}

/// `⟨B1 ⊓ … ⊓ Bn ⊑ C1 ⊓ … ⊓ Cm, d⟩`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornAxiom {
    pub lhs: Vec<String>,
    pub rhs: Vec<HornConcept>,
    pub degree: Degree,
}

impl fmt::Display for HornAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rhs: Vec<String> = self.rhs.iter().map(|c| c.to_string()).collect();
        write!(f, "{} SUBC {} >= {}", self.lhs.join(" & "), rhs.join(" & "), self.degree)
    }
}

/// A Łukasiewicz DL-Lite_Horn ontology with concept assertions only.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HornOntology {
    pub axioms: Vec<HornAxiom>,
    /// `(concept, individual, degree)`
    pub abox: Vec<(String, String, Degree)>,
}

impl HornOntology {
    /// Concept names in order of first occurrence.
    pub fn concept_names(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut add = |n: &String| {
            if seen.insert(n.clone()) {
                out.push(n.clone());
            }
        };
        for (c, _, _) in &self.abox {
            add(c);
        }
        for a in &self.axioms {
            a.lhs.iter().for_each(&mut add);
            for c in &a.rhs {
                if let HornConcept::Name(n) = c {
                    add(n);
                }
            }
        }
        out
    }
}

impl fmt::Display for HornOntology {
    /// The extended `.fdl` dialect: `&` for conjunction and `BOT` for `⊥`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# Lukasiewicz DL-Lite_Horn")?;
        for a in &self.axioms {
            writeln!(f, "{a}")?;
        }
        for (c, i, d) in &self.abox {
            writeln!(f, "{c}({i}) >= {d}")?;
        }
        Ok(())
    }
}

pub const TOP_CONCEPT: &str = "A0";
pub const INDIVIDUAL: &str = "a";

/// Concept standing for "v is true".
pub fn true_concept(var: &str) -> String {
    format!("A_{var}")
}

/// Concept standing for "v is false".
pub fn false_concept(var: &str) -> String {
    format!("Ap_{var}")
}

fn rho(l: &Literal) -> String {
    if l.positive {
        true_concept(&l.var)
    } else {
        false_concept(&l.var)
    }
}

fn names(n: &str, times: usize) -> Vec<String> {
    vec![n.to_string(); times]
}

/// The ontology `O_φ`.
pub fn gen_ontology(phi: &CnfFormula) -> HornOntology {
    let third = Degree::from_ratio(1, 3).expect("1/3 is a degree");
    let two_thirds = Degree::from_ratio(2, 3).expect("2/3 is a degree");
    let mut axioms = Vec::new();
    for v in phi.variables() {
        let (t, f) = (true_concept(&v), false_concept(&v));
        for c in [&t, &f] {
            axioms.push(HornAxiom {
                lhs: names(c, 3),
                rhs: names(c, 4).into_iter().map(HornConcept::Name).collect(),
                degree: Degree::one(),
            });
        }
        axioms.push(HornAxiom {
            lhs: vec![t.clone(), f.clone()],
            rhs: vec![HornConcept::Bottom],
            degree: third.clone(),
        });
        axioms.push(HornAxiom {
            lhs: vec![TOP_CONCEPT.to_string()],
            rhs: vec![HornConcept::Name(t), HornConcept::Name(f)],
            degree: two_thirds.clone(),
        });
    }
    for c in &phi.clauses {
        axioms.push(HornAxiom {
            lhs: vec![TOP_CONCEPT.to_string()],
            rhs: c.iter().map(|l| HornConcept::Name(rho(l))).collect(),
            degree: third.clone(),
        });
    }
    HornOntology { axioms, abox: vec![(TOP_CONCEPT.to_string(), INDIVIDUAL.to_string(), Degree::one())] }
}

/// Degrees of every concept name at the single domain element; missing
/// names have degree 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PointModel(pub BTreeMap<String, Degree>);

impl PointModel {
    pub fn get(&self, name: &str) -> Degree {
        self.0.get(name).cloned().unwrap_or_else(Degree::zero)
    }

    pub fn set(&mut self, name: impl Into<String>, d: Degree) {
        self.0.insert(name.into(), d);
    }
}

impl fmt::Display for PointModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, d) in &self.0 {
            writeln!(f, "{n}\t{d}")?;
        }
        Ok(())
    }
}

/// The model built from a valuation: `A0 = 1`, and for each variable the
/// concept matching its truth value is 1 and the other 2/3.
pub fn valuation_model(phi: &CnfFormula, true_vars: &BTreeSet<String>) -> PointModel {
    let two_thirds = Degree::from_ratio(2, 3).expect("2/3 is a degree");
    let mut m = PointModel::default();
    m.set(TOP_CONCEPT, Degree::one());
    for v in phi.variables() {
        let (hi, lo) = if true_vars.contains(&v) {
            (true_concept(&v), false_concept(&v))
        } else {
            (false_concept(&v), true_concept(&v))
        };
        m.set(hi, Degree::one());
        m.set(lo, two_thirds.clone());
    }
    m
}

/// Whether the single-element interpretation `m` satisfies `h` under
/// Łukasiewicz semantics. Every assertion is read at that element.
pub fn check_point_model(m: &PointModel, h: &HornOntology) -> bool {
    let k = TNorm::Lukasiewicz;
    let value = |c: &HornConcept| match c {
        HornConcept::Name(n) => m.get(n),
        HornConcept::Bottom => Degree::zero(),
    };
    let abox_ok = h.abox.iter().all(|(c, _, d)| m.get(c) >= *d);
    abox_ok
        && h.axioms.iter().all(|a| {
            let lhs: Vec<Degree> = a.lhs.iter().map(|n| m.get(n)).collect();
            let rhs: Vec<Degree> = a.rhs.iter().map(value).collect();
            k.resid(&k.conj_fold(&lhs), &k.conj_fold(&rhs)) >= a.degree
        })
}

/// Integer view of an axiom for grid search: indices into the name list.
struct GridAxiom {
    lhs: Vec<usize>,
    rhs: Vec<usize>,
    bottom: bool,
    /// Least integer `n` with `n / q ≥ degree`.
    need: i64,
    /// The axiom can be checked once names `0..=ready` are assigned.
    ready: usize,
}

fn ceil_scaled(d: &Degree, q: i64) -> i64 {
    let scaled = d.as_rational() * BigRational::from_integer(BigInt::from(q));
    scaled.ceil().to_integer().to_i64().expect("small grid")
}

/// Searches single-element models with all degrees in `{0, step, 2·step, …, 1}`.
///
/// `step` must be `1/q` for a positive integer `q`. Returns
/// [`Error::SearchCapExceeded`] after visiting `node_cap` partial
/// assignments.
pub fn grid_search_consistent(h: &HornOntology, step: &Degree, node_cap: u64) -> Result<Option<PointModel>> {
    if step.is_zero() || !step.numer().is_one() {
        return Err(Error::InvalidStep(step.to_string()));
    }
    let q = step.denom().to_i64().ok_or_else(|| Error::InvalidStep(step.to_string()))?;
    let names = h.concept_names();
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut lower = vec![0i64; names.len()];
    for (c, _, d) in &h.abox {
        let i = index[c.as_str()];
        lower[i] = lower[i].max(ceil_scaled(d, q));
    }
    let grid: Vec<GridAxiom> = h
        .axioms
        .iter()
        .map(|a| {
            let lhs: Vec<usize> = a.lhs.iter().map(|n| index[n.as_str()]).collect();
            let mut rhs = Vec::new();
            let mut bottom = false;
            for c in &a.rhs {
                match c {
                    HornConcept::Name(n) => rhs.push(index[n.as_str()]),
                    HornConcept::Bottom => bottom = true,
                }
            }
            let ready = lhs.iter().chain(&rhs).copied().max().unwrap_or(0);
            GridAxiom { lhs, rhs, bottom, need: ceil_scaled(&a.degree, q), ready }
        })
        .collect();
    let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); names.len().max(1)];
    for (i, a) in grid.iter().enumerate() {
        by_level[a.ready].push(i);
    }

    let conj = |vals: &[i64], ids: &[usize]| ids.iter().fold(q, |acc, &i| (acc + vals[i] - q).max(0));
    let holds = |a: &GridAxiom, vals: &[i64]| {
        let l = conj(vals, &a.lhs);
        let r = if a.bottom { 0 } else { conj(vals, &a.rhs) };
        (q - l + r).min(q) >= a.need
    };

    if names.is_empty() {
        let ok = grid.iter().all(|a| holds(a, &[]));
        return Ok(ok.then(PointModel::default));
    }

    let mut vals = vec![0i64; names.len()];
    let mut nodes = 0u64;
    // Iterative depth-first search; `next[i]` is the next value to try.
    let mut next: Vec<i64> = vec![q; names.len()];
    let mut depth = 0usize;
    loop {
        if next[depth] < lower[depth] {
            if depth == 0 {
                return Ok(None);
            }
            next[depth] = q;
            depth -= 1;
            continue;
        }
        vals[depth] = next[depth];
        next[depth] -= 1;
        nodes += 1;
        if nodes > node_cap {
            return Err(Error::SearchCapExceeded(node_cap));
        }
        if by_level[depth].iter().all(|&i| holds(&grid[i], &vals)) {
            if depth + 1 == names.len() {
                let mut m = PointModel::default();
                for (n, v) in names.iter().zip(&vals) {
                    let d = Degree::from_rational(BigRational::new(BigInt::from(*v), BigInt::from(q)))
                        .expect("grid values lie in [0, 1]");
                    m.set(n.clone(), d);
                }
                debug_assert!(check_point_model(&m, h));
                return Ok(Some(m));
            }
            depth += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::deg;

    fn sixth() -> Degree {
        deg("1/6")
    }

    #[test]
    fn generated_sizes() {
        let phi = CnfFormula::new(vec![[Literal::pos("v"), Literal::pos("v"), Literal::pos("v")]]);
        let h = gen_ontology(&phi);
        assert_eq!(h.axioms.len(), 5);
        assert_eq!(h.abox.len(), 1);
        assert!(gen_ontology(&CnfFormula::default()).axioms.is_empty());
        let two = CnfFormula::new(vec![[Literal::pos("v"), Literal::neg("w"), Literal::pos("v")]]);
        assert_eq!(gen_ontology(&two).axioms.len(), 9);
        let allowed = [deg("1/3"), deg("2/3"), Degree::one()];
        assert!(gen_ontology(&two).axioms.iter().all(|a| allowed.contains(&a.degree)));
    }

    #[test]
    fn point_models() {
        let phi = CnfFormula::new(vec![[Literal::pos("v"), Literal::pos("v"), Literal::pos("v")]]);
        let h = gen_ontology(&phi);
        let good = valuation_model(&phi, &BTreeSet::from(["v".to_string()]));
        assert!(check_point_model(&good, &h));
        let bad = valuation_model(&phi, &BTreeSet::new());
        assert!(!check_point_model(&bad, &h));
        let mut both = good.clone();
        both.set("Ap_v", Degree::one());
        assert!(!check_point_model(&both, &h));
        assert!(check_point_model(&PointModel::default(), &HornOntology::default()));
    }

    #[test]
    fn grid_search() {
        let sat = CnfFormula::new(vec![[Literal::pos("v"), Literal::pos("v"), Literal::pos("v")]]);
        let m = grid_search_consistent(&gen_ontology(&sat), &sixth(), DEFAULT_NODE_CAP).unwrap().unwrap();
        assert_eq!(m.get("A_v"), Degree::one());
        let unsat = CnfFormula::new(vec![
            [Literal::pos("v"), Literal::pos("v"), Literal::pos("v")],
            [Literal::neg("v"), Literal::neg("v"), Literal::neg("v")],
        ]);
        assert_eq!(grid_search_consistent(&gen_ontology(&unsat), &sixth(), DEFAULT_NODE_CAP).unwrap(), None);
        assert!(grid_search_consistent(&HornOntology::default(), &sixth(), 10).unwrap().is_some());
        assert!(matches!(grid_search_consistent(&gen_ontology(&sat), &deg("2/7"), 10), Err(Error::InvalidStep(_))));
        assert!(matches!(grid_search_consistent(&gen_ontology(&unsat), &sixth(), 3), Err(Error::SearchCapExceeded(3))));
    }

    #[test]
    fn dimacs() {
        let phi = parse_dimacs("c demo\np cnf 3 2\n1 2 -3 0\n-1 -2\n3 0\n").unwrap();
        assert_eq!(phi.clauses.len(), 2);
        assert_eq!(phi.to_string(), "(1 | 2 | -3) & (-1 | -2 | 3)");
        assert_eq!(phi.variables(), vec!["1", "2", "3"]);
        assert!(parse_dimacs("1 2 0\n").is_err());
        assert!(parse_dimacs("1 2 3\n").is_err());
        assert!(parse_dimacs("1 x 3 0\n").is_err());
    }

    #[test]
    fn dialect_output() {
        let phi = CnfFormula::new(vec![[Literal::pos("1"), Literal::neg("1"), Literal::pos("1")]]);
        let text = gen_ontology(&phi).to_string();
        assert!(text.contains("A_1 & A_1 & A_1 SUBC A_1 & A_1 & A_1 & A_1 >= 1\n"));
        assert!(text.contains("A_1 & Ap_1 SUBC BOT >= 1/3\n"));
        assert!(text.contains("A0 SUBC A_1 & Ap_1 >= 2/3\n"));
        assert!(text.contains("A0 SUBC A_1 & Ap_1 & A_1 >= 1/3\n"));
        assert!(text.ends_with("A0(a) >= 1\n"));
    }
}
