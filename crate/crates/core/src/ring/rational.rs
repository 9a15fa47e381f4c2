use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{valuation_of_int, Valuation};
use crate::error::{Error, Result};

/// A rational number in lowest terms, tagged with the prime whose valuation matters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PValuedRational {
    value: BigRational,
    p: u64,
}

impl PValuedRational {
    pub fn new(num: BigInt, den: BigInt, p: u64) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(PValuedRational {
            value: BigRational::new(num, den),
            p,
        })
    }

    pub fn from_rational(value: BigRational, p: u64) -> Self {
        PValuedRational { value, p }
    }

    pub fn numerator(&self) -> &BigInt {
        self.value.numer()
    }

    /// Always positive.
    pub fn denominator(&self) -> &BigInt {
        self.value.denom()
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn valuation(&self) -> Valuation {
        rational_valuation(&self.value, self.p)
    }

    /// No `p` in the denominator.
    pub fn is_p_integral(&self) -> bool {
        self.valuation().at_least(0)
    }
}

impl fmt::Display for PValuedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational_text(&self.value))
    }
}

/// Exact p-adic valuation of a rational (`Infinite` for zero).
pub fn rational_valuation(x: &BigRational, p: u64) -> Valuation {
    match (
        valuation_of_int(x.numer(), p),
        valuation_of_int(x.denom(), p),
    ) {
        (Valuation::Infinite, _) => Valuation::Infinite,
        (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a - b),
        (Valuation::Finite(_), Valuation::Infinite) => unreachable!("nonzero denominator"),
    }
}

/// `num/den` in lowest terms, or just `num` for integers.
pub fn rational_text(x: &BigRational) -> String {
    if x.denom() == &BigInt::from(1) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `n` or `n/d`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("not a rational: `{text}`"));
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> PValuedRational {
        PValuedRational::new(BigInt::from(n), BigInt::from(d), 5).unwrap()
    }

    #[test]
    fn lowest_terms() {
        let x = PValuedRational::new(BigInt::from(6), BigInt::from(-4), 3).unwrap();
        assert_eq!(x.numerator(), &BigInt::from(-3));
        assert_eq!(x.denominator(), &BigInt::from(2));
        assert_eq!(x.to_string(), "-3/2");
    }

    #[test]
    fn valuations() {
        assert_eq!(q(50, 1).valuation(), Valuation::Finite(2));
        assert_eq!(q(7, 25).valuation(), Valuation::Finite(-2));
        assert_eq!(q(0, 3).valuation(), Valuation::Infinite);
        assert!(!q(7, 25).is_p_integral());
        assert!(q(7, 3).is_p_integral());
    }

    #[test]
    fn text_round_trip() {
        for s in ["3", "-3/2", "0", "7/25"] {
            assert_eq!(rational_text(&parse_rational(s).unwrap()), s);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
