mod common;

use std::collections::BTreeSet;

use fuzzy_dllite::answering::{answer_at_least, answer_threshold, check_consistency, degree_of, positive_answers};
use fuzzy_dllite::canonical::{build_canonical, build_canonical_ordered, existential_cycle_check, Budget};
use fuzzy_dllite::evaluator::{eval_tq, eval_utq, AboxDatabase};
use fuzzy_dllite::ontology::{classical_version, cut, degree_set, normalize, Assertion, Statement};
use fuzzy_dllite::parser::{parse_ontology, parse_query, serialize_ontology, serialize_query};
use fuzzy_dllite::rewriter::perfect_ref;
use fuzzy_dllite::{Degree, Ontology, Query, TNorm, ThresholdQuery, UnionTQ};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use common::*;

fn random_instance(seed: u64) -> (StdRng, Shape, Ontology) {
    let mut rng = StdRng::seed_from_u64(seed);
    let shape = Shape::random(&mut rng);
    let text = random_ontology_text(&mut rng, &shape);
    let o = parse_ontology(&text).expect("generated ontology parses");
    (rng, shape, o)
}

/// A random consistent acyclic Gödel instance, or `None` to skip.
fn usable(seed: u64) -> Option<(StdRng, Shape, Ontology)> {
    let (rng, shape, o) = random_instance(seed);
    (existential_cycle_check(&o) && check_consistency(&o, TNorm::Godel).unwrap()).then_some((rng, shape, o))
}

fn same_statements(a: &Ontology, b: &Ontology) -> bool {
    a.tbox() == b.tbox() && a.abox() == b.abox()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ontology_text_round_trips(seed in any::<u64>()) {
        let (_, _, o) = random_instance(seed);
        let again = parse_ontology(&serialize_ontology(&o)).unwrap();
        prop_assert!(same_statements(&o, &again));
    }

    #[test]
    fn query_text_round_trips(seed in any::<u64>()) {
        let (mut rng, shape, _) = random_instance(seed);
        let cq = Query::Conjunctive(random_cq(&mut rng, &shape));
        prop_assert_eq!(parse_query(&serialize_query(&cq)).unwrap(), cq);
        let tq = Query::Threshold(random_tq(&mut rng, &shape));
        prop_assert_eq!(parse_query(&serialize_query(&tq)).unwrap(), tq);
    }

    #[test]
    fn cut_keeps_exactly_the_strong_statements(seed in any::<u64>(), tenth in 1i64..=10) {
        let (_, _, o) = random_instance(seed);
        let theta = Degree::from_ratio(tenth, 10).unwrap();
        let c = cut(&o, &theta).unwrap();
        let expected: BTreeSet<String> =
            o.statements().filter(|s| *s.degree() >= theta).map(|s| s.to_string()).collect();
        let got: BTreeSet<String> = c.statements().map(|s| s.to_string()).collect();
        prop_assert_eq!(got, expected);
        let lower = cut(&o, &Degree::from_ratio(tenth.max(2) - 1, 10).unwrap()).unwrap();
        prop_assert!(c.len() <= lower.len());
        prop_assert!(same_statements(&cut(&c, &theta).unwrap(), &c));
    }

    #[test]
    fn normalization_preserves_answers(seed in any::<u64>()) {
        let Some((mut rng, shape, o)) = usable(seed) else { return Ok(()) };
        let n = normalize(&o);
        prop_assert!(n.is_normalized());
        for _ in 0..3 {
            let q = random_tq(&mut rng, &shape);
            let a = answer_threshold(&o, &q, TNorm::Godel, false).unwrap();
            let b = answer_threshold(&n, &q, TNorm::Godel, false).unwrap();
            prop_assert_eq!(a.tuples(), b.tuples(), "{}", q);
        }
    }

    #[test]
    fn more_facts_never_lose_answers(seed in any::<u64>()) {
        let Some((mut rng, shape, o)) = usable(seed) else { return Ok(()) };
        let extra = Assertion::named(&shape.concept(&mut rng), &shape.individual(&mut rng), random_degree(&mut rng));
        let bigger = o.with_statement(Statement::Assertion(extra)).unwrap();
        if !check_consistency(&bigger, TNorm::Godel).unwrap() {
            return Ok(());
        }
        for _ in 0..3 {
            let q = random_tq(&mut rng, &shape);
            let small = answer_threshold(&o, &q, TNorm::Godel, false).unwrap().tuples();
            let big = answer_threshold(&bigger, &q, TNorm::Godel, false).unwrap().tuples();
            prop_assert!(small.is_subset(&big), "{}", q);
        }
    }

    #[test]
    fn canonical_answers_do_not_depend_on_rule_order(seed in any::<u64>()) {
        let (mut rng, shape, o) = random_instance(seed);
        if !existential_cycle_check(&o) {
            return Ok(());
        }
        let n = normalize(&o).len();
        for k in [TNorm::Godel, TNorm::Product] {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let a = build_canonical(&o, k, Budget::new(ORACLE_BUDGET));
            let b = build_canonical_ordered(&o, k, Budget::new(ORACLE_BUDGET), &order);
            prop_assert!(a.complete && b.complete);
            for _ in 0..3 {
                let q = random_cq(&mut rng, &shape);
                let conj = if k == TNorm::Godel { godel_min } else { product };
                prop_assert_eq!(
                    naive_cq_degrees(&a.interpretation, &q, conj),
                    naive_cq_degrees(&b.interpretation, &q, conj),
                    "{} under {}", q, k
                );
                let tq = random_tq(&mut rng, &shape);
                prop_assert_eq!(naive_tq_answers(&a.interpretation, &tq), naive_tq_answers(&b.interpretation, &tq));
            }
        }
    }

    #[test]
    fn godel_canonical_degrees_come_from_the_ontology(seed in any::<u64>()) {
        let (_, _, o) = random_instance(seed);
        if !existential_cycle_check(&o) {
            return Ok(());
        }
        let allowed: BTreeSet<Degree> = degree_set(&o).into_iter().collect();
        let c = build_canonical(&o, TNorm::Godel, Budget::new(ORACLE_BUDGET));
        for (name, e, d) in c.interpretation.concept_entries() {
            prop_assert!(allowed.contains(d), "{}({}) = {}", name, e, d);
        }
        for (name, a, b, d) in c.interpretation.role_entries() {
            prop_assert!(allowed.contains(d), "{}({}, {}) = {}", name, a, b, d);
        }
    }

    #[test]
    fn higher_thresholds_give_fewer_answers(seed in any::<u64>()) {
        let Some((mut rng, shape, o)) = usable(seed) else { return Ok(()) };
        let q = random_cq(&mut rng, &shape);
        let mut previous: Option<BTreeSet<Vec<String>>> = None;
        for tenth in 1..=10 {
            let now = answer_at_least(&o, &q, &Degree::from_ratio(tenth, 10).unwrap()).unwrap().tuples();
            if let Some(p) = &previous {
                prop_assert!(now.is_subset(p));
            }
            previous = Some(now);
        }
        let levels: BTreeSet<Degree> = degree_set(&o).into_iter().collect();
        for t in all_tuples(&o, q.arity()).into_iter().take(8) {
            let t: Vec<&str> = t.iter().map(String::as_str).collect();
            let d = degree_of(&o, &q, &t).unwrap();
            prop_assert!(d.is_zero() || levels.contains(&d));
        }
    }

    #[test]
    fn evaluator_is_antitone_in_bounds(seed in any::<u64>()) {
        let (mut rng, shape, o) = random_instance(seed);
        let db = AboxDatabase::from_abox(o.abox());
        let q = random_tq(&mut rng, &shape);
        let mut raised = q.clone();
        for a in &mut raised.atoms {
            if rng.gen_bool(0.5) {
                a.bound = a.bound.clone().max(random_degree(&mut rng));
            }
        }
        prop_assert!(eval_tq(&db, &raised).tuples().is_subset(&eval_tq(&db, &q).tuples()));
    }

    #[test]
    fn evaluator_distributes_over_union(seed in any::<u64>()) {
        let (mut rng, shape, o) = random_instance(seed);
        let db = AboxDatabase::from_abox(o.abox());
        let arity_of = |q: &ThresholdQuery| q.arity();
        let p = random_tq(&mut rng, &shape);
        let q = loop {
            let q = random_tq(&mut rng, &shape);
            if arity_of(&q) == arity_of(&p) {
                break q;
            }
        };
        let up = UnionTQ::new(vec![p.clone()]).unwrap();
        let uq = UnionTQ::new(vec![q.clone()]).unwrap();
        let both = eval_utq(&db, &up.union(&uq).unwrap());
        prop_assert_eq!(both.tuples(), eval_tq(&db, &p).union(&eval_tq(&db, &q)).tuples());
    }

    #[test]
    fn rewriting_shape(seed in any::<u64>()) {
        let (mut rng, shape, o) = random_instance(seed);
        let q = random_tq(&mut rng, &shape);
        let tbox: Vec<_> = o.positive_axioms().cloned().collect();
        let input_bounds: BTreeSet<Degree> = q.atoms.iter().map(|a| a.bound.clone()).collect();
        for k in TNorm::ALL {
            let u = perfect_ref(&q, &tbox, k);
            prop_assert_eq!(&u.queries()[0], &q);
            for r in u.queries() {
                prop_assert_eq!(r.arity(), q.arity());
                if k == TNorm::Godel {
                    prop_assert!(r.atoms.iter().all(|a| input_bounds.contains(&a.bound)), "{}", r);
                }
            }
        }
    }

    #[test]
    fn positive_answers_match_product_oracle(seed in any::<u64>()) {
        let (mut rng, shape, o) = random_instance(seed);
        if !existential_cycle_check(&o) || !check_consistency(&o, TNorm::Product).unwrap() {
            return Ok(());
        }
        let c = build_canonical(&o, TNorm::Product, Budget::new(ORACLE_BUDGET));
        for _ in 0..3 {
            let q = random_cq(&mut rng, &shape);
            let got = positive_answers(&o, &q, TNorm::Product).unwrap().tuples();
            let oracle: BTreeSet<Vec<String>> = naive_cq_degrees(&c.interpretation, &q, product).into_keys().collect();
            prop_assert_eq!(got, oracle, "{}", q);
        }
    }

    #[test]
    fn consistency_matches_the_classical_version(seed in any::<u64>()) {
        let (_, _, o) = random_instance(seed);
        let g = check_consistency(&o, TNorm::Godel).unwrap();
        prop_assert_eq!(g, check_consistency(&o, TNorm::Product).unwrap());
        prop_assert_eq!(g, check_consistency(&classical_version(&o), TNorm::Godel).unwrap());
    }
}

#[test]
fn cyclic_tbox_stops_at_budget() {
    let o = parse_ontology("A SUBC EX P >= 1\nEX P- SUBC A >= 1\nA(a) >= 0.5\n").unwrap();
    assert!(!existential_cycle_check(&o));
    let c = build_canonical(&o, TNorm::Godel, Budget::new(4));
    assert!(!c.complete);
    assert_eq!(c.interpretation.anonymous_count(), 4);
}
