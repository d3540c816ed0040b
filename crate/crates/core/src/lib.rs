//! Query answering over fuzzy DL-Lite_R ontologies.
//!
//! Truth degrees are exact rationals in `[0, 1]`. Three t-norms are
//! supported: Gödel, product and Łukasiewicz.
//!
//! * [`answering`] decides consistency and answers degree, top-k, threshold
//!   and positive queries.
//! * [`rewriter`] rewrites threshold queries against a TBox.
//! * [`evaluator`] runs rewritten queries over the ABox as a database.
//! * [`canonical`] materializes the canonical interpretation and evaluates
//!   queries on it directly.
//! * [`hardness`] builds Łukasiewicz DL-Lite_Horn ontologies from 3-CNF
//!   formulas.
//!
//! ```
//! use fuzzy_dllite::{answering, parser, Degree};
//!
//! let o = parser::parse_ontology("Museum SUBC Popular >= 0.6\nMuseum(louvre) >= 1\n").unwrap();
//! let q = parser::parse_query("q(x) :- Popular(x).").unwrap().into_conjunctive().unwrap();
//! let degree = answering::degree_of(&o, &q, &["louvre"]).unwrap();
//! assert_eq!(degree, "0.6".parse::<Degree>().unwrap());
//! ```

pub mod answering;
pub mod canonical;
pub mod cli;
pub mod degree;
pub mod error;
pub mod evaluator;
pub mod hardness;
pub mod ontology;
pub mod parser;
pub mod query;
pub mod rewriter;
pub mod tnorm;

pub use degree::{deg, Degree, DegreeError};
pub use error::{Error, Result, SourceError};
pub use ontology::Ontology;
pub use query::{Atom, ConjunctiveQuery, Query, Term, ThresholdAtom, ThresholdQuery, UnionTQ};
pub use tnorm::TNorm;

#[cfg(test)]
pub(crate) mod testutil {
    use crate::ontology::Ontology;
    use crate::parser::parse_ontology;
    use crate::query::{ConjunctiveQuery, ThresholdQuery};

    pub fn o_exa() -> Ontology {
        parse_ontology(include_str!("../data/o_exa.fdl")).unwrap()
    }

    pub fn o_zero() -> Ontology {
        parse_ontology(include_str!("../data/o_zero.fdl")).unwrap()
    }

    pub fn cq(text: &str) -> ConjunctiveQuery {
        crate::parser::parse_query(text).unwrap().into_conjunctive().unwrap()
    }

    pub fn tq(text: &str) -> ThresholdQuery {
        crate::parser::parse_query(text).unwrap().into_threshold().unwrap()
    }

    pub fn ont(text: &str) -> Ontology {
        parse_ontology(text).unwrap()
    }
}
