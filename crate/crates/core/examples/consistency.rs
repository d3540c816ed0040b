//! Consistency under each t-norm, and a hand-made Łukasiewicz model.

use fuzzy_dllite::answering::check_consistency;
use fuzzy_dllite::canonical::{check_model, Element, FuzzyInterpretation};
use fuzzy_dllite::parser::parse_ontology;
use fuzzy_dllite::{deg, TNorm};

fn main() -> fuzzy_dllite::Result<()> {
    let o = parse_ontology(include_str!("../data/o_zero.fdl"))?;
    for k in TNorm::ALL {
        match check_consistency(&o, k) {
            Ok(v) => println!("{k}: {}", if v { "consistent" } else { "inconsistent" }),
            Err(e) => println!("{k}: {e}"),
        }
    }
    let a = Element::named("a");
    let mut point = FuzzyInterpretation::with_individuals(o.individuals());
    point.set_concept("A1", &a, deg("0.5"));
    point.set_concept("A2", &a, deg("0.5"));
    for k in TNorm::ALL {
        let violated = check_model(&point, &o, k);
        println!("A1 = A2 = 0.5 under {k}: {} violated statement(s)", violated.len());
    }
    Ok(())
}
