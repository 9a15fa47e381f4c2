use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{mod_inverse, valuation_of_int, BaseRing, Ring, Valuation};
use crate::error::{Error, Result};

/// Exponent vector of a parameter monomial; length equals the ring's parameter count.
pub type Monomial = Vec<u32>;

/// An element of a [`super::RingDescriptor`] ring.
///
/// Scalars are stored as the single monomial `[]` (or the all-zero monomial when the
/// ring has parameters).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    ring: Ring,
    terms: BTreeMap<Monomial, BigInt>,
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self.to_text(), self.ring)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn mono_degree(m: &[u32]) -> u64 {
    m.iter().map(|&e| e as u64).sum()
}

impl RingElement {
    pub fn zero(ring: &Ring) -> Self {
        RingElement {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Ring) -> Self {
        Self::from_int(ring, 1)
    }

    pub fn from_int(ring: &Ring, v: i64) -> Self {
        Self::from_bigint(ring, BigInt::from(v))
    }

    pub fn from_bigint(ring: &Ring, v: BigInt) -> Self {
        Self::monomial(ring, vec![0; ring.nparams()], v)
    }

    /// The parameter with index `i` as an element.
    pub fn param(ring: &Ring, i: usize) -> Self {
        let mut m = vec![0; ring.nparams()];
        m[i] = 1;
        Self::monomial(ring, m, BigInt::one())
    }

    pub fn monomial(ring: &Ring, mono: Monomial, mut c: BigInt) -> Self {
        assert_eq!(mono.len(), ring.nparams(), "monomial length");
        let mut terms = BTreeMap::new();
        ring.normalize(&mut c);
        if !c.is_zero() && ring.keeps(&mono) {
            terms.insert(mono, c);
        }
        RingElement {
            ring: ring.clone(),
            terms,
        }
    }

    /// Builds an element from `(monomial, coefficient)` pairs, combining repeats.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigInt)>>(ring: &Ring, it: I) -> Self {
        let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m, c) in it {
            assert_eq!(m.len(), ring.nparams(), "monomial length");
            if !ring.keeps(&m) {
                continue;
            }
            *acc.entry(m).or_insert_with(BigInt::zero) += c;
        }
        Self::from_map(ring, acc)
    }

    fn from_map(ring: &Ring, mut acc: BTreeMap<Monomial, BigInt>) -> Self {
        acc.retain(|m, c| {
            ring.normalize(c);
            !c.is_zero() && ring.keeps(m)
        });
        RingElement {
            ring: ring.clone(),
            terms: acc,
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.iter().all(|&e| e == 0) && c.is_one())
                .unwrap_or(false)
    }

    pub fn constant_term(&self) -> BigInt {
        let zero = vec![0; self.ring.nparams()];
        self.terms.get(&zero).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    /// Largest total degree present; `None` for zero.
    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().map(|m| mono_degree(m)).max()
    }

    pub fn check_same_ring(&self, other: &RingElement) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!(
                "{} vs {}",
                self.ring, other.ring
            )));
        }
        Ok(())
    }

    fn assert_same(&self, other: &RingElement) {
        if let Err(e) = self.check_same_ring(other) {
            panic!("{e}");
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let acc = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        Self::from_map(&self.ring, acc)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Reduction into a compatible quotient ring (see `RingDescriptor::reduces_to`).
    pub fn reduce_to(&self, target: &Ring) -> Result<Self> {
        if !self.ring.reduces_to(target) {
            return Err(Error::RingMismatch(format!(
                "cannot reduce {} into {}",
                self.ring, target
            )));
        }
        Ok(Self::from_map(target, self.terms.clone()))
    }

    /// Reinterprets canonical residues as integers in a ring with the same parameters.
    pub fn lift_to(&self, target: &Ring) -> Result<Self> {
        if self.ring.params != target.params {
            return Err(Error::RingMismatch(format!("{} vs {}", self.ring, target)));
        }
        Ok(Self::from_map(target, self.terms.clone()))
    }

    /// Minimum p-adic valuation over all coefficients; `Infinite` for zero.
    pub fn valuation(&self, p: u64) -> Valuation {
        self.terms
            .values()
            .map(|c| valuation_of_int(c, p))
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    /// Drops every monomial of total degree above `n`.
    pub fn truncate(&self, n: u32) -> Self {
        let acc = self
            .terms
            .iter()
            .filter(|(m, _)| mono_degree(m) <= n as u64)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Self::from_map(&self.ring, acc)
    }

    /// Exponent scaling `t_i -> t_i^factor` (the standard Frobenius when `factor = p^m`).
    pub fn scale_exponents(&self, factor: u64) -> Self {
        let mut acc = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut nm = Vec::with_capacity(m.len());
            let mut ok = true;
            for &e in m {
                match (e as u64)
                    .checked_mul(factor)
                    .and_then(|v| u32::try_from(v).ok())
                {
                    Some(v) => nm.push(v),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && self.ring.keeps(&nm) {
                acc.insert(nm, c.clone());
            } else {
                assert!(
                    self.ring.trunc.is_some(),
                    "exponent overflow in Frobenius on an untruncated ring"
                );
            }
        }
        Self::from_map(&self.ring, acc)
    }

    /// Partial derivative with respect to parameter `i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut acc = BTreeMap::new();
        for (m, c) in &self.terms {
            if m[i] == 0 {
                continue;
            }
            let mut nm = m.clone();
            nm[i] -= 1;
            acc.insert(nm, c * BigInt::from(m[i]));
        }
        Self::from_map(&self.ring, acc)
    }

    /// Substitutes `images[i]` for parameter `i`; images live in the same ring.
    pub fn substitute(&self, images: &[RingElement]) -> Result<Self> {
        if images.len() != self.ring.nparams() {
            return Err(Error::SizeMismatch(format!(
                "{} images for {} parameters",
                images.len(),
                self.ring.nparams()
            )));
        }
        for im in images {
            im.check_same_ring(self)?;
        }
        let mut out = Self::zero(&self.ring);
        for (m, c) in &self.terms {
            let mut t = Self::from_bigint(&self.ring, c.clone());
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = &t * &images[i].pow(e as u64);
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// True when the element is invertible in its ring (power-series sense for
    /// truncated parameter rings).
    pub fn is_unit(&self) -> bool {
        match &self.ring.base {
            BaseRing::Integers => self.is_constant() && self.constant_term().abs().is_one(),
            BaseRing::ModPk { p, .. } => {
                let c0 = self.constant_term();
                if c0.is_zero() || (&c0 % BigInt::from(*p)).is_zero() {
                    return false;
                }
                self.ring.trunc.is_some() || self.is_constant()
            }
        }
    }

    /// Multiplicative inverse of a unit.
    pub fn inverse_unit(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotInvertibleModP(format!("{} is not a unit", self)));
        }
        let ring = &self.ring;
        match &ring.base {
            BaseRing::Integers => Ok(self.clone()),
            BaseRing::ModPk { .. } => {
                let m = ring.modulus().expect("modulus");
                let c0inv = mod_inverse(&self.constant_term(), &m).expect("unit");
                let mut x = Self::from_bigint(ring, c0inv);
                if self.is_constant() {
                    return Ok(x);
                }
                // x <- x (2 - a x): the error 1 - a x squares each step, and it starts
                // in the ideal of positive-degree monomials.
                let n = ring.trunc.expect("truncated") as u64;
                let two = Self::from_int(ring, 2);
                let mut reach = 1u64;
                while reach <= n {
                    x = &x * &(&two - &(self * &x));
                    reach *= 2;
                }
                debug_assert!((self * &x).is_one());
                Ok(x)
            }
        }
    }

    /// Small integer view for scalar elements.
    pub fn to_i64(&self) -> Option<i64> {
        if !self.is_constant() {
            return None;
        }
        self.constant_term().to_i64()
    }

    /// Canonical text form, e.g. `3*a^2*b + 24`.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = format_monomial(&self.ring.params, m);
            if mono.is_empty() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&abs.to_string());
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }

    /// Number of stored terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_divisible_by(&self, d: &BigInt) -> bool {
        self.terms.values().all(|c| c.mod_floor(d).is_zero())
    }

    /// Exact division of every coefficient by `d` (caller guarantees divisibility).
    pub fn div_exact(&self, d: &BigInt) -> Self {
        let acc = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.div_floor(d)))
            .collect();
        Self::from_map(&self.ring, acc)
    }
}

pub(crate) fn format_monomial(names: &[String], m: &[u32]) -> String {
    let mut parts = Vec::new();
    for (name, &e) in names.iter().zip(m) {
        match e {
            0 => {}
            1 => parts.push(name.clone()),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

impl Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        self.assert_same(rhs);
        let mut acc = self.terms.clone();
        for (m, c) in &rhs.terms {
            *acc.entry(m.clone()).or_insert_with(BigInt::zero) += c;
        }
        RingElement::from_map(&self.ring, acc)
    }
}

impl Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        self.assert_same(rhs);
        let mut acc = self.terms.clone();
        for (m, c) in &rhs.terms {
            *acc.entry(m.clone()).or_insert_with(BigInt::zero) -= c;
        }
        RingElement::from_map(&self.ring, acc)
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        let acc = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        RingElement::from_map(&self.ring, acc)
    }
}

impl Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        self.assert_same(rhs);
        let trunc = self.ring.trunc.map(|t| t as u64);
        let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            let d1 = mono_degree(m1);
            for (m2, c2) in &rhs.terms {
                if let Some(t) = trunc {
                    if d1 + mono_degree(m2) > t {
                        continue;
                    }
                }
                let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                *acc.entry(m).or_insert_with(BigInt::zero) += c1 * c2;
            }
        }
        RingElement::from_map(&self.ring, acc)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for RingElement {
            type Output = RingElement;
            fn $f(self, rhs: RingElement) -> RingElement {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingDescriptor;

    fn zab() -> Ring {
        RingDescriptor::new(BaseRing::Integers, vec!["a".into(), "b".into()], None).unwrap()
    }

    #[test]
    fn canonical_residues() {
        let r = RingDescriptor::mod_pk(5, 2).unwrap();
        let x = RingElement::from_int(&r, -1);
        assert_eq!(x.constant_term(), BigInt::from(24));
        assert!(RingElement::from_int(&r, 50).is_zero());
    }

    #[test]
    fn text_form() {
        let r = zab();
        let a = RingElement::param(&r, 0);
        let b = RingElement::param(&r, 1);
        let x = &(&(&a * &a) * &b) - &RingElement::from_int(&r, 3);
        assert_eq!(x.to_text(), "a^2*b - 3");
    }

    #[test]
    fn truncated_unit_inverse() {
        let r =
            RingDescriptor::new(BaseRing::ModPk { p: 5, k: 3 }, vec!["t".into()], Some(6)).unwrap();
        let t = RingElement::param(&r, 0);
        let u = &RingElement::from_int(&r, 2) + &t;
        let inv = u.inverse_unit().unwrap();
        assert!((&u * &inv).is_one());
        let non_unit = &RingElement::from_int(&r, 5) + &t;
        assert!(matches!(
            non_unit.inverse_unit(),
            Err(Error::NotInvertibleModP(_))
        ));
    }

    #[test]
    fn valuations() {
        let r = RingDescriptor::integers();
        assert_eq!(
            RingElement::from_int(&r, 50).valuation(5),
            Valuation::Finite(2)
        );
        assert_eq!(RingElement::zero(&r).valuation(5), Valuation::Infinite);
        let r = zab();
        let x =
            &RingElement::from_int(&r, 25) + &RingElement::param(&r, 0).scale(&BigInt::from(10));
        assert_eq!(x.valuation(5), Valuation::Finite(1));
    }
}
