//! Multivariate power series over the rationals, truncated at a total degree.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{parse_rational, rational_text, rational_valuation, RingElement, Valuation};

/// Sum of `c_e * vars^e` over exponents of total degree at most `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    vars: Vec<String>,
    n: u32,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesTermJson {
    pub exp: Vec<u32>,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesJson {
    pub vars: Vec<String>,
    #[serde(rename = "N")]
    pub n: u32,
    pub terms: Vec<SeriesTermJson>,
}

fn total(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl TruncatedSeries {
    pub fn zero(vars: Vec<String>, n: u32) -> Self {
        TruncatedSeries {
            vars,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: Vec<String>, n: u32, c: BigRational) -> Self {
        let k = vars.len();
        Self::from_terms(vars, n, [(vec![0; k], c)])
    }

    pub fn one(vars: Vec<String>, n: u32) -> Self {
        Self::constant(vars, n, BigRational::one())
    }

    /// The `i`-th variable.
    pub fn var(vars: Vec<String>, n: u32, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::from_terms(vars, n, [(e, BigRational::one())])
    }

    /// Drops zero coefficients and terms above the degree bound; repeated exponents add.
    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, BigRational)>>(
        vars: Vec<String>,
        n: u32,
        it: I,
    ) -> Self {
        let mut terms: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (e, c) in it {
            assert_eq!(e.len(), vars.len(), "exponent length");
            if total(&e) > n {
                continue;
            }
            *terms.entry(e).or_insert_with(BigRational::zero) += c;
        }
        terms.retain(|_, c| !c.is_zero());
        TruncatedSeries { vars, n, terms }
    }

    /// An integer-coefficient parameter polynomial viewed as a series.
    pub fn from_ring_element(x: &RingElement, vars: Vec<String>, n: u32) -> Self {
        Self::from_terms(
            vars,
            n,
            x.terms()
                .iter()
                .map(|(e, c)| (e.clone(), BigRational::from_integer(c.clone()))),
        )
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn degree_bound(&self) -> u32 {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigRational> {
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

    pub fn coeff(&self, e: &[u32]) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&vec![0; self.nvars()])
    }

    fn check(&self, other: &TruncatedSeries) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::SizeMismatch(format!(
                "series in {:?} and {:?}",
                self.vars, other.vars
            )));
        }
        Ok(())
    }

    /// Result precision is the smaller of the two degree bounds.
    pub fn add(&self, other: &TruncatedSeries) -> Result<Self> {
        self.check(other)?;
        let n = self.n.min(other.n);
        Ok(Self::from_terms(
            self.vars.clone(),
            n,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(e, c)| (e.clone(), c.clone())),
        ))
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            vars: self.vars.clone(),
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::from_terms(
            self.vars.clone(),
            self.n,
            self.terms.iter().map(|(e, x)| (e.clone(), x * c)),
        )
    }

    pub fn mul(&self, other: &TruncatedSeries) -> Result<Self> {
        self.check(other)?;
        let n = self.n.min(other.n);
        let mut acc: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (a, x) in &self.terms {
            let da = total(a);
            if da > n {
                continue;
            }
            for (b, y) in &other.terms {
                if da + total(b) > n {
                    continue;
                }
                let e: Vec<u32> = a.iter().zip(b).map(|(i, j)| i + j).collect();
                *acc.entry(e).or_insert_with(BigRational::zero) += x * y;
            }
        }
        Ok(Self::from_terms(self.vars.clone(), n, acc))
    }

    pub fn pow(&self, mut k: u64) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = Self::one(self.vars.clone(), self.n);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::InvalidArgument(
                "series with zero constant term is not invertible".into(),
            ));
        }
        // 1/(c0 (1 + r)) = (1/c0) sum (-r)^k, and r has no constant term
        let inv0 = c0.recip();
        let r = self
            .scale(&inv0)
            .sub(&Self::one(self.vars.clone(), self.n))?;
        let mut acc = Self::one(self.vars.clone(), self.n);
        let mut term = Self::one(self.vars.clone(), self.n);
        for _ in 0..self.n {
            term = term.mul(&r)?.neg();
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term)?;
        }
        Ok(acc.scale(&inv0))
    }

    /// Partial derivative in the `i`-th variable; the degree bound drops by one.
    pub fn partial(&self, i: usize) -> Self {
        let n = self.n.saturating_sub(1);
        Self::from_terms(
            self.vars.clone(),
            n,
            self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
                let mut f = e.clone();
                f[i] -= 1;
                (f, c * BigRational::from_integer(BigInt::from(e[i])))
            }),
        )
    }

    pub fn truncate(&self, n: u32) -> Self {
        Self::from_terms(
            self.vars.clone(),
            n.min(self.n),
            self.terms.iter().map(|(e, c)| (e.clone(), c.clone())),
        )
    }

    /// Homogeneous part of degree `d`.
    pub fn homogeneous(&self, d: u32) -> Self {
        Self::from_terms(
            self.vars.clone(),
            self.n,
            self.terms
                .iter()
                .filter(|(e, _)| total(e) == d)
                .map(|(e, c)| (e.clone(), c.clone())),
        )
    }

    /// Substitutes `images[i]` for the `i`-th variable. Images must have no constant term.
    pub fn compose(&self, images: &[TruncatedSeries]) -> Result<Self> {
        if images.len() != self.nvars() {
            return Err(Error::SizeMismatch(format!(
                "{} images for {} variables",
                images.len(),
                self.nvars()
            )));
        }
        let first = images
            .first()
            .ok_or_else(|| Error::InvalidArgument("composition needs at least one image".into()))?;
        let vars = first.vars.clone();
        let n = images.iter().map(|s| s.n).min().unwrap_or(0).min(self.n);
        for im in images {
            im.check(first)?;
            if !im.constant_term().is_zero() {
                return Err(Error::InvalidArgument(
                    "composition image has a constant term".into(),
                ));
            }
        }
        // powers of each image, built on demand
        let mut powers: Vec<Vec<TruncatedSeries>> = images
            .iter()
            .map(|_| vec![Self::one(vars.clone(), n)])
            .collect();
        let mut acc: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        // prefix[i] is the product of the powers for variables before i; terms come in
        // lexicographic order, so consecutive terms share most of their prefixes
        let k = self.nvars();
        let mut prefix: Vec<TruncatedSeries> = vec![Self::one(vars.clone(), n); k + 1];
        let mut last: Option<&Vec<u32>> = None;
        for (e, c) in &self.terms {
            let start = match last {
                Some(prev) => prev.iter().zip(e).position(|(a, b)| a != b).unwrap_or(k),
                None => 0,
            };
            for i in start..k {
                let d = e[i] as usize;
                while powers[i].len() <= d {
                    let next = powers[i]
                        .last()
                        .expect("power")
                        .mul(&images[i].truncate(n))?;
                    powers[i].push(next);
                }
                prefix[i + 1] = if d == 0 {
                    prefix[i].clone()
                } else {
                    prefix[i].mul(&powers[i][d])?
                };
            }
            last = Some(e);
            for (f, x) in &prefix[k].terms {
                *acc.entry(f.clone()).or_insert_with(BigRational::zero) += c * x;
            }
        }
        Ok(Self::from_terms(vars, n, acc))
    }

    /// Same coefficients over a different (same-length) variable list.
    pub fn rename(&self, vars: Vec<String>) -> Result<Self> {
        if vars.len() != self.nvars() {
            return Err(Error::SizeMismatch(
                "rename needs the same number of variables".into(),
            ));
        }
        Ok(TruncatedSeries {
            vars,
            n: self.n,
            terms: self.terms.clone(),
        })
    }

    /// Embeds into a larger variable list; `slots[i]` is the new position of variable `i`.
    pub fn embed(&self, vars: Vec<String>, slots: &[usize]) -> Self {
        let k = vars.len();
        Self::from_terms(
            vars,
            self.n,
            self.terms.iter().map(|(e, c)| {
                let mut f = vec![0; k];
                for (i, &s) in slots.iter().enumerate() {
                    f[s] += e[i];
                }
                (f, c.clone())
            }),
        )
    }

    /// Smallest p-adic valuation of a coefficient.
    pub fn min_valuation(&self, p: u64) -> Valuation {
        self.terms
            .values()
            .map(|c| rational_valuation(c, p))
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    /// Coefficients with a power of `p` in the denominator.
    pub fn violations(&self, p: u64) -> Vec<(Vec<u32>, BigRational, i64)> {
        self.terms
            .iter()
            .filter_map(|(e, c)| match rational_valuation(c, p) {
                Valuation::Finite(v) if v < 0 => Some((e.clone(), c.clone(), v)),
                _ => None,
            })
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            vars: self.vars.clone(),
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| SeriesTermJson {
                    exp: e.clone(),
                    coeff: rational_text(c),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &SeriesJson) -> Result<Self> {
        let k = json.vars.len();
        let mut terms = Vec::new();
        for t in &json.terms {
            if t.exp.len() != k {
                return Err(Error::Json(format!(
                    "exponent {:?} has wrong length",
                    t.exp
                )));
            }
            terms.push((t.exp.clone(), parse_rational(&t.coeff)?));
        }
        Ok(Self::from_terms(json.vars.clone(), json.n, terms))
    }

    /// Text like `t1 + 1/2*t1^2 - 3*t1*t2` in increasing degree.
    pub fn to_text(&self) -> String {
        let mut items: Vec<(&Vec<u32>, &BigRational)> = self.terms.iter().collect();
        items.sort_by(|a, b| total(a.0).cmp(&total(b.0)).then(b.0.cmp(a.0)));
        let mut out = String::new();
        for (i, (e, c)) in items.iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, k)| **k > 0)
                .map(|(v, k)| {
                    if *k == 1 {
                        self.vars[v].clone()
                    } else {
                        format!("{}^{}", self.vars[v], k)
                    }
                })
                .collect();
            let neg = c.is_negative();
            let a = c.abs();
            let body = match (mono.is_empty(), a.is_one()) {
                (true, _) => rational_text(&a),
                (false, true) => mono.join("*"),
                (false, false) => format!("{}*{}", rational_text(&a), mono.join("*")),
            };
            if i == 0 {
                out.push_str(if neg { "-" } else { "" });
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}
