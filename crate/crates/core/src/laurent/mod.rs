//! Multivariate Laurent polynomials with coefficients in a [`Ring`].

mod dense;
mod parse;
mod polytope;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::ring::{FrobeniusMap, Ring, RingDescriptor, RingElement, Valuation};

pub use dense::PowerSweep;
pub(crate) use dense::{DenseKernel, DensePoly};
pub use parse::{
    parse_poly, parse_poly_with_budget, parse_ring_element, parse_ring_element_with_budget,
};
pub use polytope::{lattice_points, LatticeMode, Polytope};

/// Integer exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<i64>);

impl ExponentVector {
    pub fn zero(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &ExponentVector) -> Self {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &ExponentVector) -> Self {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        ExponentVector(self.0.iter().map(|a| a * k).collect())
    }
}

impl From<Vec<i64>> for ExponentVector {
    fn from(v: Vec<i64>) -> Self {
        ExponentVector(v)
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        f.write_str("(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

/// A Laurent polynomial in named variables. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    ring: Ring,
    vars: Vec<String>,
    terms: BTreeMap<ExponentVector, RingElement>,
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", self.to_text(), self.ring)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl LaurentPoly {
    pub fn zero(ring: &Ring, vars: Vec<String>) -> Self {
        LaurentPoly {
            ring: ring.clone(),
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Ring, vars: Vec<String>, c: RingElement) -> Self {
        let n = vars.len();
        Self::from_terms(ring, vars, [(ExponentVector::zero(n), c)])
            .expect("constant in its own ring")
    }

    pub fn one(ring: &Ring, vars: Vec<String>) -> Self {
        let c = RingElement::one(ring);
        Self::constant(ring, vars, c)
    }

    /// Sums repeated exponents and drops zeros.
    pub fn from_terms<I>(ring: &Ring, vars: Vec<String>, it: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentVector, RingElement)>,
    {
        let mut terms: BTreeMap<ExponentVector, RingElement> = BTreeMap::new();
        for (e, c) in it {
            if e.len() != vars.len() {
                return Err(Error::SizeMismatch(format!(
                    "exponent {e} for {} variables",
                    vars.len()
                )));
            }
            c.check_same_ring(&RingElement::zero(ring))?;
            match terms.get_mut(&e) {
                Some(old) => *old = &*old + &c,
                None => {
                    terms.insert(e, c);
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(LaurentPoly {
            ring: ring.clone(),
            vars,
            terms,
        })
    }

    /// Integer coefficients, convenient for fixtures.
    pub fn from_int_terms(ring: &Ring, vars: &[&str], terms: &[(&[i64], i64)]) -> Self {
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        Self::from_terms(
            ring,
            vars,
            terms
                .iter()
                .map(|(e, c)| (ExponentVector(e.to_vec()), RingElement::from_int(ring, *c))),
        )
        .expect("well-formed fixture")
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> &BTreeMap<ExponentVector, RingElement> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> Vec<ExponentVector> {
        self.terms.keys().cloned().collect()
    }

    /// Stored coefficient, or zero.
    pub fn coeff(&self, u: &[i64]) -> Result<RingElement> {
        if u.len() != self.nvars() {
            return Err(Error::SizeMismatch(format!(
                "exponent of length {} for {} variables",
                u.len(),
                self.nvars()
            )));
        }
        Ok(self
            .terms
            .get(&ExponentVector(u.to_vec()))
            .cloned()
            .unwrap_or_else(|| RingElement::zero(&self.ring)))
    }

    fn check_compatible(&self, other: &LaurentPoly) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!(
                "{} vs {}",
                self.ring, other.ring
            )));
        }
        if self.vars != other.vars {
            return Err(Error::SizeMismatch(format!(
                "variables {:?} vs {:?}",
                self.vars, other.vars
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &LaurentPoly) -> Result<Self> {
        self.check_compatible(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let v = match terms.get(e) {
                Some(old) => old + c,
                None => c.clone(),
            };
            if v.is_zero() {
                terms.remove(e);
            } else {
                terms.insert(e.clone(), v);
            }
        }
        Ok(LaurentPoly {
            ring: self.ring.clone(),
            vars: self.vars.clone(),
            terms,
        })
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn sub(&self, other: &LaurentPoly) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &RingElement) -> Result<Self> {
        c.check_same_ring(&RingElement::zero(&self.ring))?;
        Ok(self.map_coeffs(|x| x * c))
    }

    fn map_coeffs<F: Fn(&RingElement) -> RingElement>(&self, f: F) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), f(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        LaurentPoly {
            ring: self.ring.clone(),
            vars: self.vars.clone(),
            terms,
        }
    }

    /// Bounding box of the support: per-variable `(min, max)`.
    pub fn exponent_box(&self) -> Option<Vec<(i64, i64)>> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let mut b: Vec<(i64, i64)> = first.0.iter().map(|&e| (e, e)).collect();
        for e in it {
            for (k, &v) in e.0.iter().enumerate() {
                b[k].0 = b[k].0.min(v);
                b[k].1 = b[k].1.max(v);
            }
        }
        Some(b)
    }

    pub fn mul(&self, other: &LaurentPoly) -> Result<Self> {
        self.mul_with_budget(other, &Budget::default())
    }

    /// Product, using the dense kernel when both supports are compact.
    pub fn mul_with_budget(&self, other: &LaurentPoly, budget: &Budget) -> Result<Self> {
        self.check_compatible(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.ring, self.vars.clone()));
        }
        let work = self.len() as u128 * other.len() as u128;
        if let Some(kernel) = DenseKernel::for_ring(&self.ring) {
            if let Some(cells) = DensePoly::product_cells(self, other) {
                if cells <= (4 * work).max(1 << 16) {
                    let a = DensePoly::from_poly(self, &kernel, budget)?;
                    let b = DensePoly::from_poly(other, &kernel, budget)?;
                    return a.mul(&b, budget)?.to_poly(&self.ring, &self.vars);
                }
            }
        }
        budget.check_work("sparse product", work)?;
        let mut acc: BTreeMap<ExponentVector, RingElement> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.add(eb);
                let c = ca * cb;
                match acc.get_mut(&e) {
                    Some(old) => *old = &*old + &c,
                    None => {
                        acc.insert(e, c);
                    }
                }
            }
            budget.check_terms("sparse product terms", acc.len() as u128)?;
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(LaurentPoly {
            ring: self.ring.clone(),
            vars: self.vars.clone(),
            terms: acc,
        })
    }

    /// Coefficients reduced into `target` (same parameters, coarser base or truncation).
    pub fn reduce_to(&self, target: &Ring) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| Ok((e.clone(), c.reduce_to(target)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(target, self.vars.clone(), terms)
    }

    /// Residues reinterpreted in a ring with the same parameters (e.g. `Z/p^K -> Z`).
    pub fn lift_to(&self, target: &Ring) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| Ok((e.clone(), c.lift_to(target)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(target, self.vars.clone(), terms)
    }

    /// `f^e` over `target`, by binary powering with reduction after every product.
    pub fn pow_reduced(&self, e: u64, target: &Ring, budget: &Budget) -> Result<Self> {
        let base = if &self.ring == target {
            self.clone()
        } else {
            self.reduce_to(target)?
        };
        if e == 0 {
            return Ok(Self::one(target, self.vars.clone()));
        }
        if base.is_zero() {
            return Ok(base);
        }
        if let Some(kernel) = DenseKernel::for_ring(target) {
            // dense boxes grow linearly in e; fall back to sparse for scattered supports
            let spread = base
                .exponent_box()
                .map(|b| {
                    b.iter()
                        .map(|(lo, hi)| ((hi - lo) as u128) * e as u128 + 1)
                        .product::<u128>()
                })
                .unwrap_or(1);
            let sparse_bound = (base.len() as u128).saturating_pow(e.min(8) as u32);
            if spread <= sparse_bound.max(1 << 16) || e > 8 {
                let d = DensePoly::from_poly(&base, &kernel, budget)?;
                return d.pow(e, budget)?.to_poly(target, &self.vars);
            }
        }
        let mut acc = Self::one(target, self.vars.clone());
        let mut sq = base;
        let mut k = e;
        loop {
            if k & 1 == 1 {
                acc = acc.mul_with_budget(&sq, budget)?;
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            sq = sq.mul_with_budget(&sq, budget)?;
        }
        Ok(acc)
    }

    /// `sigma^i(f)`: exponents multiplied by `p^i`, coefficients mapped by `sigma^i`.
    pub fn frobenius_poly(&self, sigma: &FrobeniusMap, p: u64, i: u32) -> Result<Self> {
        let k = i64::try_from(p)
            .ok()
            .and_then(|p| p.checked_pow(i))
            .ok_or_else(|| Error::InvalidArgument(format!("{p}^{i} overflows")))?;
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| Ok((e.scale(k), sigma.apply(c, i)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(&self.ring, self.vars.clone(), terms)
    }

    /// Minimum p-adic valuation over all coefficients.
    pub fn valuation(&self, p: u64) -> Valuation {
        self.terms
            .values()
            .map(|c| c.valuation(p))
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    pub fn is_divisible_by(&self, d: &BigInt) -> bool {
        self.terms.values().all(|c| c.is_divisible_by(d))
    }

    pub fn newton_polytope(&self) -> Result<Polytope> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Polytope::hull(&self.support())
    }

    /// Canonical text form: terms in increasing exponent order.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let mono = format_var_monomial(&self.vars, e);
            let (neg, body) = coefficient_text(c);
            let body = match (body.as_str(), mono.is_empty()) {
                (b, true) => b.to_string(),
                ("1", false) => mono,
                (b, false) => format!("{b}*{mono}"),
            };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            vars: self.vars.clone(),
            params: self.ring.params.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exp: e.0.clone(),
                    coeff: c.to_text(),
                })
                .collect(),
        }
    }

    /// Reads the JSON form; parameter names must match `ring`.
    pub fn from_json(json: &PolyJson, ring: &Ring) -> Result<Self> {
        if json.params != ring.params {
            return Err(Error::InvalidArgument(format!(
                "polynomial parameters {:?} do not match ring parameters {:?}",
                json.params, ring.params
            )));
        }
        for (i, v) in json.vars.iter().enumerate() {
            if v.is_empty() || json.vars[..i].contains(v) || ring.params.contains(v) {
                return Err(Error::InvalidArgument(format!("bad variable name `{v}`")));
            }
        }
        let terms = json
            .terms
            .iter()
            .map(|t| {
                Ok((
                    ExponentVector(t.exp.clone()),
                    parse_ring_element(&t.coeff, ring)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(ring, json.vars.clone(), terms)
    }

    pub fn from_json_str(text: &str, ring: &Ring) -> Result<Self> {
        let json: PolyJson = serde_json::from_str(text)?;
        Self::from_json(&json, ring)
    }

    /// The ring implied by a JSON document's parameter list over `base`.
    pub fn ring_for_json(json: &PolyJson, base: &Ring) -> Result<Ring> {
        RingDescriptor::new(base.base.clone(), json.params.clone(), base.trunc)
    }
}

/// `(negative, text)` for a coefficient; multi-term parameter coefficients are
/// parenthesised so the product with a variable monomial re-parses unambiguously.
fn coefficient_text(c: &RingElement) -> (bool, String) {
    if c.len() == 1 {
        let (_, v) = c.terms().iter().next().expect("one term");
        if v.is_negative() {
            return (true, (-c).to_text());
        }
        return (false, c.to_text());
    }
    (false, format!("({})", c.to_text()))
}

pub(crate) fn format_var_monomial(names: &[String], e: &ExponentVector) -> String {
    let mut parts = Vec::new();
    for (name, &k) in names.iter().zip(&e.0) {
        match k {
            0 => {}
            1 => parts.push(name.clone()),
            _ => parts.push(format!("{name}^{k}")),
        }
    }
    parts.join("*")
}

/// JSON form of a polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyJson {
    pub vars: Vec<String>,
    #[serde(default)]
    pub params: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub exp: Vec<i64>,
    pub coeff: String,
}
