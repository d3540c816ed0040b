//! Materializes canonical interpretations: a product chain, and a cyclic
//! TBox cut off by the budget.

use fuzzy_dllite::canonical::{build_canonical, eval_cq_on, existential_cycle_check, Budget};
use fuzzy_dllite::parser::{parse_ontology, parse_query};
use fuzzy_dllite::TNorm;

fn main() -> fuzzy_dllite::Result<()> {
    let chain = parse_ontology(include_str!("../data/chain2.fdl"))?;
    let c = build_canonical(&chain, TNorm::Product, Budget::default_for(&chain));
    print!("{}", c.interpretation.to_tsv());
    for step in &c.trace {
        println!("  {step}");
    }
    let q = parse_query("q(x) :- A2(x).")?.into_conjunctive()?;
    for a in ["a", "b"] {
        println!("A2({a}) = {}", eval_cq_on(&c.interpretation, &q, &[a], TNorm::Product)?);
    }

    let cyclic = parse_ontology(include_str!("../data/cycle.fdl"))?;
    println!("acyclic: {}", existential_cycle_check(&cyclic));
    let c = build_canonical(&cyclic, TNorm::Godel, Budget::new(3));
    println!("complete: {}, anonymous elements: {}", c.complete, c.interpretation.anonymous_count());
    print!("{}", c.interpretation.to_tsv());
    Ok(())
}
