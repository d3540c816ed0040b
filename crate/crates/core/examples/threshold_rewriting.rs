//! Rewrites a threshold query against a TBox and evaluates the union over
//! the ABox, for each t-norm.

use fuzzy_dllite::evaluator::{eval_utq, AboxDatabase};
use fuzzy_dllite::parser::{parse_ontology, parse_query};
use fuzzy_dllite::rewriter::perfect_ref;
use fuzzy_dllite::TNorm;

fn main() -> fuzzy_dllite::Result<()> {
    let o = parse_ontology(include_str!("../data/o_exa.fdl"))?;
    let q = parse_query("q(x) :- TouristAttraction(x) >= 0.7, Popular(x) >= 0.6.")?.into_threshold()?;
    let db = AboxDatabase::from_abox(o.abox());
    let tbox: Vec<_> = o.positive_axioms().cloned().collect();
    for k in TNorm::ALL {
        let rewriting = perfect_ref(&q, &tbox, k);
        println!("{k}: {} queries", rewriting.len());
        print!("{rewriting}");
        println!("answers:");
        print!("{}", eval_utq(&db, &rewriting));
    }
    Ok(())
}
