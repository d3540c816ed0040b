//! Builds the Łukasiewicz ontology for a 3-CNF formula and searches for a
//! single-element model on the 1/6 grid.

use std::collections::BTreeSet;

use fuzzy_dllite::deg;
use fuzzy_dllite::hardness::{
    check_point_model, gen_ontology, grid_search_consistent, parse_dimacs, valuation_model, DEFAULT_NODE_CAP,
};

fn main() -> fuzzy_dllite::Result<()> {
    let sat = parse_dimacs(include_str!("../data/sat.cnf"))?;
    let unsat = parse_dimacs("1 1 1 0\n-1 -1 -1 0\n")?;
    for phi in [&sat, &unsat] {
        let h = gen_ontology(phi);
        println!("{phi}: {} axioms", h.axioms.len());
        match grid_search_consistent(&h, &deg("1/6"), DEFAULT_NODE_CAP)? {
            Some(m) => print!("model found\n{m}"),
            None => println!("no model on the grid"),
        }
    }
    let h = gen_ontology(&sat);
    let valuation = BTreeSet::from(["1".to_string()]);
    println!("valuation {{1}} gives a model: {}", check_point_model(&valuation_model(&sat, &valuation), &h));
    print!("{h}");
    Ok(())
}
