use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{CongruenceReport, HWContext};
use crate::error::{Error, Result};
use crate::laurent::parse_ring_element;
use crate::ring::{
    mod_inverse, BaseRing, DerivationMap, Ring, RingDescriptor, RingElement, SquareMatrix,
};
use crate::series::TruncatedSeries;

impl HWContext {
    fn ring_at(&self, e: u32) -> Result<Ring> {
        RingDescriptor::new(
            BaseRing::ModPk { p: self.p, k: e },
            self.work.params.clone(),
            self.trunc,
        )
    }

    /// Frobenius limit modulo `p^e`, read off at `alpha_e sigma(alpha_(e-1))^-1`.
    ///
    /// Consecutive quotients agree modulo `p^s`, so level `e` already determines the
    /// limit modulo `p^e`.
    pub fn frobenius_limit(&self, e: u32) -> Result<SquareMatrix> {
        if e == 0 {
            return Err(Error::InvalidArgument(
                "precision must be at least 1".into(),
            ));
        }
        self.require_inverse_ready(e)?;
        self.frobenius_quotient(e)?.reduce_to(&self.ring_at(e)?)
    }

    /// Connection limit `-D(alpha_e) alpha_e^-1` modulo `p^e` and the truncation degree.
    pub fn connection_limit(&self, d: &DerivationMap, e: u32) -> Result<SquareMatrix> {
        if e == 0 {
            return Err(Error::InvalidArgument(
                "precision must be at least 1".into(),
            ));
        }
        let d = d.transport(&self.work)?;
        self.require_inverse_ready(e)?;
        let a = self.alpha_work(e)?;
        a.derive(&d)?
            .mul(&a.inverse_mod_pk()?)?
            .neg()
            .reduce_to(&self.ring_at(e)?)
    }

    /// `Phi = alpha_s sigma^k(alpha_(s-k))^-1` at `s = prec + k - 1`, modulo `p^prec`.
    ///
    /// This is the product `F sigma(F) ... sigma^(k-1)(F)` of Frobenius limits at that
    /// precision; for `k = 1` it is the Frobenius limit itself.
    pub fn frobenius_product(&self, k: u32, prec: u32) -> Result<SquareMatrix> {
        if k == 0 || prec == 0 {
            return Err(Error::InvalidArgument(
                "k and precision must be positive".into(),
            ));
        }
        self.require_inverse_ready(prec)?;
        let s = prec + k - 1;
        let ms = [self.p_pow(s)?, self.p_pow(s - k)?];
        self.betas_work(&ms)?;
        let a = self.alpha_work(s)?;
        let b = self.alpha_work(s - k)?.frobenius(&self.sigma, k)?;
        a.mul(&b.inverse_mod_pk()?)?.reduce_to(&self.ring_at(prec)?)
    }

    /// Checks `alpha_s sigma(alpha_(s-1))^-1 = U F0 sigma(U)^-1` modulo `p^s` and the
    /// truncation degree. This is an experimental relation, so the report is soft.
    pub fn verify_frame_factorization(
        &self,
        u: &[TruncatedSeries],
        f0: &SquareMatrix,
        s: u32,
    ) -> Result<CongruenceReport> {
        let g = self.g();
        if u.len() != g * g || f0.size() != g {
            return Err(Error::SizeMismatch(format!(
                "frame of size {} for g = {g}",
                u.len()
            )));
        }
        self.require_inverse_ready(s)?;
        let ring = self.ring_at(s)?;
        let lhs = self.frobenius_quotient(s)?.reduce_to(&ring)?;
        let entries = u
            .iter()
            .map(|x| series_mod_pk(x, &ring))
            .collect::<Result<Vec<_>>>()?;
        let um = SquareMatrix::from_entries(&ring, g, entries)?;
        if f0.entries().iter().any(|x| !x.is_constant()) {
            return Err(Error::InvalidArgument(
                "F0 must be a constant matrix".into(),
            ));
        }
        let f0 = SquareMatrix::from_entries(
            &ring,
            g,
            f0.entries()
                .iter()
                .map(|x| RingElement::from_bigint(&ring, x.constant_term()))
                .collect(),
        )?;
        let sigma = self.sigma.transport(&ring)?;
        let rhs = um
            .mul(&f0)?
            .mul(&um.frobenius(&sigma, 1)?.inverse_mod_pk()?)?;
        let v = lhs.defect_valuation(&rhs, self.p)?;
        let f0_rows: Vec<Vec<String>> = f0.to_text_rows();
        Ok(
            CongruenceReport::new("frame-factorization", self.p, Some(s as i64), v)
                .with("s", s)
                .with("F0", serde_json::to_value(f0_rows).expect("rows"))
                .soft(),
        )
    }
}

/// Reduces a rational series into `Z/p^k[params]`; denominators must be prime to p.
pub(crate) fn series_mod_pk(x: &TruncatedSeries, ring: &Ring) -> Result<RingElement> {
    let p = ring.p().expect("modular ring");
    let m = ring.modulus().expect("modulus");
    if x.vars() != ring.params.as_slice() {
        return Err(Error::RingMismatch(format!(
            "series in {:?}, ring parameters {:?}",
            x.vars(),
            ring.params
        )));
    }
    let mut terms = Vec::new();
    for (e, c) in x.terms() {
        let inv = mod_inverse(c.denom(), &m).ok_or(Error::DisallowedDivision { prime: p })?;
        terms.push((e.clone(), c.numer() * inv));
    }
    Ok(RingElement::from_terms(ring, terms))
}

/// Connection matrices for coordinate derivations `d/dt_i`, one `g x g` series matrix per
/// parameter (row-major), known to total degree `n`.
#[derive(Clone, Debug)]
pub struct FrameFamily {
    pub params: Vec<String>,
    pub g: usize,
    pub n: u32,
    pub matrices: Vec<Vec<TruncatedSeries>>,
}

/// `(1/disc) M_a` and `(1/disc) M_b` for the cubic `1 + a x + b x^2 + x^3`.
pub fn cubic_connection_matrices(n: u32) -> Result<FrameFamily> {
    let params = vec!["a".to_string(), "b".to_string()];
    let zr = RingDescriptor::new(BaseRing::Integers, params.clone(), None)?;
    let series = |text: &str| -> Result<TruncatedSeries> {
        Ok(TruncatedSeries::from_ring_element(
            &parse_ring_element(text, &zr)?,
            params.clone(),
            n,
        ))
    };
    let inv_disc = series(CUBIC_DISCRIMINANT)?.inverse()?;
    let build = |rows: [&str; 4]| -> Result<Vec<TruncatedSeries>> {
        rows.iter().map(|t| series(t)?.mul(&inv_disc)).collect()
    };
    let na = build([
        "3*b + a*b^2 - 4*a^2",
        "a*b - 9",
        "2*(3*a - b^2)",
        "2*(3*b - a^2)",
    ])?;
    let nb = build([
        "2*(3*a - b^2)",
        "2*(3*b - a^2)",
        "a*b - 9",
        "3*a + b*a^2 - 4*b^2",
    ])?;
    Ok(FrameFamily {
        params,
        g: 2,
        n,
        matrices: vec![na, nb],
    })
}

/// Discriminant of `1 + a x + b x^2 + x^3`.
pub const CUBIC_DISCRIMINANT: &str = "-4*(a^3 + b^3) + a^2*b^2 + 18*a*b - 27";

fn monomials(k: usize, d: u32) -> Vec<Vec<u32>> {
    if k == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in monomials(k - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn rational_primes(den: &BigInt) -> Vec<u64> {
    let mut n = den.abs();
    let mut out = Vec::new();
    let mut q = 2u64;
    while !n.is_one() {
        let bq = BigInt::from(q);
        if &bq * &bq > n {
            out.push(n.to_u64().unwrap_or(u64::MAX));
            break;
        }
        if n.is_multiple_of(&bq) {
            out.push(q);
            while n.is_multiple_of(&bq) {
                n /= &bq;
            }
        }
        q += 1;
    }
    out
}

/// Solves `d/dt_i U + N_i U = 0` for every parameter with `U(0) = I`, degree by degree up
/// to total degree `n`.
///
/// The degree-`k` coefficient at a monomial is forced by any parameter occurring in it;
/// all such choices must agree (integrability). Denominators may only contain primes from
/// `allowed`.
pub fn horizontal_frame(
    family: &FrameFamily,
    n: u32,
    allowed: &[u64],
) -> Result<Vec<TruncatedSeries>> {
    let g = family.g;
    let np = family.params.len();
    if family.matrices.len() != np || family.matrices.iter().any(|m| m.len() != g * g) {
        return Err(Error::SizeMismatch("one g x g matrix per parameter".into()));
    }
    if n > family.n + 1 {
        return Err(Error::InvalidArgument(format!(
            "connection known to degree {}, frame requested to degree {n}",
            family.n
        )));
    }
    let mut u: Vec<BTreeMap<Vec<u32>, BigRational>> = vec![BTreeMap::new(); g * g];
    for i in 0..g {
        u[i * g + i].insert(vec![0; np], BigRational::one());
    }
    // (N_i U)_(r,c) at exponent `at`, using only stored lower-degree coefficients of U
    let apply =
        |u: &Vec<BTreeMap<Vec<u32>, BigRational>>, i: usize, r: usize, c: usize, at: &[u32]| {
            let mut acc = BigRational::zero();
            for j in 0..g {
                for (e, x) in family.matrices[i][r * g + j].terms() {
                    if e.iter().zip(at).any(|(a, b)| a > b) {
                        continue;
                    }
                    let rest: Vec<u32> = at.iter().zip(e).map(|(a, b)| a - b).collect();
                    if let Some(y) = u[j * g + c].get(&rest) {
                        acc += x * y;
                    }
                }
            }
            acc
        };
    for k in 1..=n {
        let mut level: Vec<(usize, Vec<u32>, BigRational)> = Vec::new();
        for alpha in monomials(np, k) {
            for r in 0..g {
                for c in 0..g {
                    let mut value: Option<BigRational> = None;
                    for i in (0..np).filter(|&i| alpha[i] > 0) {
                        let mut below = alpha.clone();
                        below[i] -= 1;
                        let v = -apply(&u, i, r, c, &below)
                            / BigRational::from_integer(alpha[i].into());
                        match &value {
                            None => value = Some(v),
                            Some(w) if *w != v => {
                                return Err(Error::Integrability {
                                    degree: k,
                                    detail: format!(
                                        "entry ({r},{c}) at {alpha:?}: {} from d/d{} vs {} from d/d{}",
                                        w,
                                        family.params[(0..np).find(|&t| alpha[t] > 0).expect("some")],
                                        v,
                                        family.params[i]
                                    ),
                                });
                            }
                            Some(_) => {}
                        }
                    }
                    if let Some(v) = value {
                        if !v.is_zero() {
                            level.push((r * g + c, alpha.clone(), v));
                        }
                    }
                }
            }
        }
        for (idx, e, v) in level {
            for q in rational_primes(v.denom()) {
                if !allowed.contains(&q) {
                    return Err(Error::DisallowedDivision { prime: q });
                }
            }
            u[idx].insert(e, v);
        }
    }
    Ok(u.into_iter()
        .map(|t| TruncatedSeries::from_terms(family.params.clone(), n, t))
        .collect())
}
