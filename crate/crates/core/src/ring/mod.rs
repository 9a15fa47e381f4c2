//! Exact base rings: the integers, the integers modulo `p^K`, and polynomial rings
//! in named parameters over either of those (optionally truncated at a total degree).
//!
//! Elements are immutable values that carry their ring. Every element is kept in
//! canonical form: residues modulo `p^K` lie in `[0, p^K)`, no zero coefficients are
//! stored, and no monomial exceeds the truncation degree.

mod element;
mod maps;
mod matrix;
mod rational;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use element::{Monomial, RingElement};
pub use maps::{
    derivation_frobenius_valuation, verify_frobenius_lift, DerivationMap, FrobeniusMap,
};
pub use matrix::{int_matrix, MatrixJson, SquareMatrix};
pub use rational::{parse_rational, rational_text, rational_valuation, PValuedRational};

/// Scalar base of a ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaseRing {
    Integers,
    ModPk { p: u64, k: u32 },
}

/// Description of a coefficient ring.
///
/// `params` empty means a scalar ring. A non-empty parameter list gives the
/// polynomial ring `base[params]`; with `trunc = Some(n)` it is the quotient by all
/// monomials of total degree `> n`, which is how power series in the parameters are
/// handled at finite precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingDescriptor {
    pub base: BaseRing,
    pub params: Vec<String>,
    pub trunc: Option<u32>,
}

/// Shared handle to a ring descriptor.
pub type Ring = Arc<RingDescriptor>;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl RingDescriptor {
    pub fn integers() -> Ring {
        Arc::new(RingDescriptor {
            base: BaseRing::Integers,
            params: Vec::new(),
            trunc: None,
        })
    }

    pub fn mod_pk(p: u64, k: u32) -> Result<Ring> {
        Self::new(BaseRing::ModPk { p, k }, Vec::new(), None)
    }

    pub fn new(base: BaseRing, params: Vec<String>, trunc: Option<u32>) -> Result<Ring> {
        if let BaseRing::ModPk { p, k } = base {
            if !is_prime(p) {
                return Err(Error::InvalidArgument(format!("{p} is not prime")));
            }
            if k == 0 {
                return Err(Error::InvalidArgument("precision K must be >= 1".into()));
            }
            if (k as f64) * (p as f64).log2() > 4096.0 {
                return Err(Error::InvalidArgument(format!("modulus {p}^{k} too large")));
            }
        }
        for (i, name) in params.iter().enumerate() {
            if name.is_empty() || params[..i].contains(name) {
                return Err(Error::InvalidArgument(format!(
                    "invalid or duplicate parameter name `{name}`"
                )));
            }
        }
        let trunc = if params.is_empty() { None } else { trunc };
        Ok(Arc::new(RingDescriptor {
            base,
            params,
            trunc,
        }))
    }

    pub fn is_scalar(&self) -> bool {
        self.params.is_empty()
    }

    pub fn nparams(&self) -> usize {
        self.params.len()
    }

    pub fn p(&self) -> Option<u64> {
        match self.base {
            BaseRing::ModPk { p, .. } => Some(p),
            BaseRing::Integers => None,
        }
    }

    pub fn precision(&self) -> Option<u32> {
        match self.base {
            BaseRing::ModPk { k, .. } => Some(k),
            BaseRing::Integers => None,
        }
    }

    /// `p^K` for `MOD_PK` bases.
    pub fn modulus(&self) -> Option<BigInt> {
        match self.base {
            BaseRing::ModPk { p, k } => Some(num_traits::pow(BigInt::from(p), k as usize)),
            BaseRing::Integers => None,
        }
    }

    /// `p^K` as a machine word when it fits comfortably below `2^62`.
    pub fn small_modulus(&self) -> Option<u64> {
        match self.base {
            BaseRing::ModPk { p, k } => {
                let mut m: u64 = 1;
                for _ in 0..k {
                    m = m.checked_mul(p)?;
                }
                (m < (1u64 << 62)).then_some(m)
            }
            BaseRing::Integers => None,
        }
    }

    /// Same parameters, base replaced by `Z/p^k`.
    pub fn with_base(&self, base: BaseRing) -> Result<Ring> {
        Self::new(base, self.params.clone(), self.trunc)
    }

    pub fn with_trunc(&self, trunc: Option<u32>) -> Result<Ring> {
        Self::new(self.base.clone(), self.params.clone(), trunc)
    }

    /// The same ring with the parameters dropped.
    pub fn scalar(&self) -> Ring {
        Arc::new(RingDescriptor {
            base: self.base.clone(),
            params: Vec::new(),
            trunc: None,
        })
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p == name)
    }

    pub(crate) fn normalize(&self, c: &mut BigInt) {
        if let Some(m) = self.modulus() {
            *c = num_integer::Integer::mod_floor(&*c, &m);
        }
    }

    pub(crate) fn keeps(&self, mono: &[u32]) -> bool {
        match self.trunc {
            Some(n) => mono.iter().map(|&e| e as u64).sum::<u64>() <= n as u64,
            None => true,
        }
    }

    /// Whether elements of `self` can be reduced into `target`.
    pub fn reduces_to(&self, target: &RingDescriptor) -> bool {
        if self.params != target.params {
            return false;
        }
        let base_ok = match (&self.base, &target.base) {
            (BaseRing::Integers, _) => true,
            (BaseRing::ModPk { p, k }, BaseRing::ModPk { p: q, k: l }) => p == q && l <= k,
            (BaseRing::ModPk { .. }, BaseRing::Integers) => false,
        };
        let trunc_ok = match (self.trunc, target.trunc) {
            (_, None) => self.trunc.is_none(),
            (None, Some(_)) => true,
            (Some(a), Some(b)) => b <= a,
        };
        base_ok && trunc_ok
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.base {
            BaseRing::Integers => write!(f, "Z")?,
            BaseRing::ModPk { p, k } => write!(f, "Z/{p}^{k}")?,
        }
        if !self.params.is_empty() {
            write!(f, "[{}]", self.params.join(","))?;
            if let Some(n) = self.trunc {
                write!(f, " mod deg>{n}")?;
            }
        }
        Ok(())
    }
}

/// p-adic valuation with a distinguished value for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn at_least(self, e: i64) -> bool {
        match self {
            Valuation::Infinite => true,
            Valuation::Finite(v) => v >= e,
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Exact p-adic valuation of an integer; `None` for zero.
pub fn vp_bigint(n: &BigInt, p: u64) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, &pb);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

pub fn valuation_of_int(n: &BigInt, p: u64) -> Valuation {
    match vp_bigint(n, p) {
        Some(v) => Valuation::Finite(v as i64),
        None => Valuation::Infinite,
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    use num_integer::Integer;
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Base-p digits `d_0..d_(k-1)` of `x mod p^k`.
pub fn padic_digits(x: &BigInt, p: u64, k: u32) -> Vec<u64> {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    let pb = BigInt::from(p);
    let mut r = x.mod_floor(&num_traits::pow(pb.clone(), k as usize));
    (0..k)
        .map(|_| {
            let (q, d) = r.div_mod_floor(&pb);
            r = q;
            d.to_u64().expect("digit")
        })
        .collect()
}

/// `d0 + d1*p + d2*p^2 + ...` with every digit shown, up to `p^(k-1)`.
pub fn padic_text(x: &BigInt, p: u64, k: u32) -> String {
    padic_digits(x, p, k)
        .iter()
        .enumerate()
        .map(|(i, d)| match i {
            0 => d.to_string(),
            1 => format!("{d}*{p}"),
            _ => format!("{d}*{p}^{i}"),
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

#[cfg(test)]
mod proptests;
