//! Degree queries over the touristic-location ontology under Gödel semantics.

use fuzzy_dllite::answering::GodelAnswerer;
use fuzzy_dllite::deg;
use fuzzy_dllite::parser::{parse_ontology, parse_query};

fn main() -> fuzzy_dllite::Result<()> {
    let o = parse_ontology(include_str!("../data/o_exa.fdl"))?;
    let q = parse_query("q(x) :- Popular(x).")?.into_conjunctive()?;
    let mut answerer = GodelAnswerer::new(&o, &q)?;

    for theta in ["0.6", "0.8"] {
        let answers = answerer.at_least(&deg(theta))?;
        println!("Popular(x) >= {theta}:");
        print!("{answers}");
    }
    println!("degree of Popular(comic): {}", answerer.degree_of(&["comic"])?);
    println!("top 2:");
    print!("{}", answerer.top_k(2)?);

    let q2 = parse_query(include_str!("../data/exa2.fq"))?.into_conjunctive()?;
    let mut cheap_near_popular = GodelAnswerer::new(&o, &q2)?;
    println!("{q2}");
    print!("{}", cheap_near_popular.at_least(&deg("0.6"))?);
    Ok(())
}
