//! Positive answers and threshold answers under the product t-norm, where
//! degrees shrink along a chain of inclusions.

use fuzzy_dllite::answering::{answer_threshold, positive_answers};
use fuzzy_dllite::parser::{parse_ontology, parse_query};
use fuzzy_dllite::TNorm;

fn main() -> fuzzy_dllite::Result<()> {
    let o = parse_ontology(include_str!("../data/chain2.fdl"))?;
    let q = parse_query("q(x) :- A2(x).")?.into_conjunctive()?;
    println!("positive answers of {q}");
    print!("{}", positive_answers(&o, &q, TNorm::Product)?);
    for bound in ["0.8", "0.85", "0.9"] {
        let tq = parse_query(&format!("q(x) :- A2(x) >= {bound}."))?.into_threshold()?;
        let answers = answer_threshold(&o, &tq, TNorm::Product, false)?;
        println!("A2(x) >= {bound}: {:?}", answers.tuples());
    }
    Ok(())
}
