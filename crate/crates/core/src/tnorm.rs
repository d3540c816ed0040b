//! The three fundamental continuous t-norms with their residua and negations.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::One;

use crate::degree::Degree;

/// Selects the t-norm that interprets conjunction, implication and negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TNorm {
    Godel,
    Product,
    Lukasiewicz,
}

impl TNorm {
    pub const ALL: [TNorm; 3] = [TNorm::Godel, TNorm::Product, TNorm::Lukasiewicz];

    /// `d ⊗ e`
    pub fn conj(self, d: &Degree, e: &Degree) -> Degree {
        match self {
            TNorm::Godel => d.min(e).clone(),
            TNorm::Product => Degree::clamped(d.as_rational() * e.as_rational()),
            TNorm::Lukasiewicz => Degree::clamped(d.as_rational() + e.as_rational() - BigRational::one()),
        }
    }

    /// `d ⇒ e`; always 1 when `d ≤ e`.
    pub fn resid(self, d: &Degree, e: &Degree) -> Degree {
        if d <= e {
            return Degree::one();
        }
        match self {
            TNorm::Godel => e.clone(),
            TNorm::Product => Degree::clamped(e.as_rational() / d.as_rational()),
            TNorm::Lukasiewicz => Degree::clamped(BigRational::one() - d.as_rational() + e.as_rational()),
        }
    }

    /// `⊖d := d ⇒ 0`
    pub fn neg(self, d: &Degree) -> Degree {
        match self {
            TNorm::Godel | TNorm::Product => {
                if d.is_zero() {
                    Degree::one()
                } else {
                    Degree::zero()
                }
            }
            TNorm::Lukasiewicz => Degree::clamped(BigRational::one() - d.as_rational()),
        }
    }

    /// Left fold of [`TNorm::conj`]; the empty conjunction is 1.
    pub fn conj_fold<'a, I>(self, degrees: I) -> Degree
    where
        I: IntoIterator<Item = &'a Degree>,
    {
        degrees.into_iter().fold(Degree::one(), |acc, d| self.conj(&acc, d))
    }

    pub fn is_idempotent(self) -> bool {
        self == TNorm::Godel
    }

    pub fn name(self) -> &'static str {
        match self {
            TNorm::Godel => "godel",
            TNorm::Product => "product",
            TNorm::Lukasiewicz => "lukasiewicz",
        }
    }
}

impl fmt::Display for TNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TNorm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "godel" | "goedel" | "gödel" | "g" | "min" => Ok(TNorm::Godel),
            "product" | "prod" | "p" | "pi" => Ok(TNorm::Product),
            "lukasiewicz" | "łukasiewicz" | "luk" | "l" => Ok(TNorm::Lukasiewicz),
            other => Err(format!("unknown t-norm `{other}` (expected godel, product or lukasiewicz)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::deg;
    use proptest::prelude::*;

    #[test]
    fn table_values() {
        assert_eq!(TNorm::Godel.conj(&deg("0.3"), &deg("0.7")), deg("0.3"));
        assert_eq!(TNorm::Lukasiewicz.conj(&deg("0.3"), &deg("0.7")), deg("0"));
        assert_eq!(TNorm::Product.conj(&deg("0.3"), &deg("0.7")), deg("0.21"));
        assert_eq!(TNorm::Product.resid(&deg("0.9"), &deg("0.81")), deg("0.9"));
        assert_eq!(TNorm::Godel.resid(&deg("0.4"), &deg("0.4")), deg("1"));
        assert_eq!(TNorm::Godel.resid(&deg("0.8"), &deg("0.5")), deg("0.5"));
        assert_eq!(TNorm::Lukasiewicz.resid(&deg("0.8"), &deg("0.5")), deg("0.7"));
        assert_eq!(TNorm::Godel.neg(&deg("0.5")), deg("0"));
        assert_eq!(TNorm::Product.neg(&deg("0.5")), deg("0"));
        assert_eq!(TNorm::Lukasiewicz.neg(&deg("0.5")), deg("0.5"));
        for k in TNorm::ALL {
            assert_eq!(k.neg(&Degree::zero()), Degree::one());
            assert_eq!(k.conj(&Degree::one(), &deg("0.37")), deg("0.37"));
        }
    }

    #[test]
    fn folds() {
        let v = [deg("0.6"), deg("0.8"), deg("0.7")];
        assert_eq!(TNorm::Godel.conj_fold(&v), deg("0.6"));
        assert_eq!(TNorm::Product.conj_fold(&[deg("0.9"), deg("0.9")]), deg("0.81"));
        for k in TNorm::ALL {
            assert_eq!(k.conj_fold(&[]), Degree::one());
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!("Godel".parse::<TNorm>().unwrap(), TNorm::Godel);
        assert_eq!("lukasiewicz".parse::<TNorm>().unwrap(), TNorm::Lukasiewicz);
        assert!("zadeh".parse::<TNorm>().is_err());
    }

    fn arb_degree() -> impl Strategy<Value = Degree> {
        (0i64..=60, 1i64..=60).prop_map(|(n, d)| Degree::from_ratio(n.min(d), d).unwrap())
    }

    fn arb_tnorm() -> impl Strategy<Value = TNorm> {
        prop_oneof![Just(TNorm::Godel), Just(TNorm::Product), Just(TNorm::Lukasiewicz)]
    }

    proptest! {
        #[test]
        fn adjunction(k in arb_tnorm(), d in arb_degree(), e in arb_degree(), f in arb_degree()) {
            prop_assert_eq!(k.conj(&f, &d) <= e, f <= k.resid(&d, &e));
        }

        #[test]
        fn residuum_is_one_iff_le(k in arb_tnorm(), d in arb_degree(), e in arb_degree()) {
            prop_assert_eq!(k.resid(&d, &e).is_one(), d <= e);
        }
    }
}
