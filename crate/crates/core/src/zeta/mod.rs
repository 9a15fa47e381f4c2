//! Ground truth from finite fields: point counts, zeta numerators of curves, unit roots,
//! and their comparison with Hasse–Witt matrices and the Frobenius limit.

mod count;
mod field;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hwmatrix::{CongruenceReport, HWContext};
use crate::ring::{mod_inverse, valuation_of_int, RingElement, Valuation};

pub use count::{count_points, HyperellipticCurve, Variety, MAX_EVALUATIONS};
pub use field::{Field, FiniteFieldSpec, MAX_FIELD_SIZE};

/// Point counts of a curve and the numerator `1 + c_1 T + ... + c_(2g) T^(2g)` of its zeta
/// function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZetaData {
    pub q: u64,
    pub genus: u32,
    /// `#C(F_(q^m))` for `m = 1, 2, ...`.
    pub counts: Vec<u64>,
    /// `c_0 = 1, c_1, ..., c_(2g)`.
    pub numerator: Vec<i64>,
}

impl ZetaData {
    /// `c_(2g-i) = q^(g-i) c_i`.
    pub fn satisfies_functional_equation(&self) -> bool {
        let g = self.genus as usize;
        if self.numerator.len() != 2 * g + 1 {
            return false;
        }
        (0..=g).all(|i| {
            let w = (self.q as i128).pow((g - i) as u32);
            self.numerator[2 * g - i] as i128 == w * self.numerator[i] as i128
        })
    }

    pub fn numerator_big(&self) -> Vec<BigInt> {
        self.numerator.iter().map(|&c| BigInt::from(c)).collect()
    }

    /// Number of reciprocal roots that are p-adic units: the degree of the numerator mod p.
    pub fn unit_root_count(&self, p: u64) -> usize {
        self.numerator
            .iter()
            .rposition(|c| c.rem_euclid(p as i64) != 0)
            .unwrap_or(0)
    }

    pub fn text(&self) -> String {
        poly_text(&self.numerator_big(), "T")
    }
}

/// Text of an integer polynomial in increasing degree, such as `1 + 3*T + 18*T^2`.
pub fn poly_text(coeffs: &[BigInt], var: &str) -> String {
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let a = c.abs();
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        let body = match (mono.is_empty(), a.is_one()) {
            (true, _) => a.to_string(),
            (false, true) => mono,
            (false, false) => format!("{a}*{mono}"),
        };
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Zeta numerator of a genus-`g` curve from `#C(F_(q^m))`, `m = 1..g`, via Newton's identities
/// on the Frobenius eigenvalues. Further counts, if given, must agree with the result.
pub fn zeta_numerator(counts: &[u64], q: u64, genus: u32) -> Result<ZetaData> {
    let g = genus as usize;
    if counts.len() < g {
        return Err(Error::InvalidArgument(format!(
            "genus {g} needs {g} counts, got {}",
            counts.len()
        )));
    }
    let qi = q as i128;
    // power sums of the eigenvalues: S_m = q^m + 1 - N_m
    let s: Vec<i128> = counts
        .iter()
        .enumerate()
        .map(|(i, &n)| qi.pow(i as u32 + 1) + 1 - n as i128)
        .collect();
    let mut c = vec![0i128; 2 * g + 1];
    c[0] = 1;
    for k in 1..=g {
        let mut acc = 0i128;
        for i in 1..=k {
            acc += s[i - 1] * c[k - i];
        }
        if acc % k as i128 != 0 {
            return Err(Error::InconsistentCounts(format!(
                "c_{k} = {}/{k} is not an integer",
                -acc
            )));
        }
        c[k] = -acc / k as i128;
    }
    for i in 0..g {
        c[2 * g - i] = qi.pow((g - i) as u32) * c[i];
    }
    let predicted = power_sums(&c, counts.len());
    for (i, (a, b)) in s.iter().zip(&predicted).enumerate().skip(g) {
        if a != b {
            return Err(Error::InconsistentCounts(format!(
                "count over F_(q^{}) is {}, the numerator predicts {}",
                i + 1,
                counts[i],
                qi.pow(i as u32 + 1) + 1 - b
            )));
        }
    }
    let numerator = c
        .iter()
        .map(|&x| {
            i64::try_from(x).map_err(|_| Error::InconsistentCounts("coefficient overflow".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ZetaData {
        q,
        genus,
        counts: counts.to_vec(),
        numerator,
    })
}

/// `S_1..S_len` from the coefficients of `prod (1 - a_i T)`.
fn power_sums(c: &[i128], len: usize) -> Vec<i128> {
    let r = c.len() - 1;
    let mut s: Vec<i128> = Vec::with_capacity(len);
    for m in 1..=len {
        let mut acc = if m <= r { -(m as i128) * c[m] } else { 0 };
        for i in 1..m.min(r + 1) {
            acc -= c[i] * s[m - i - 1];
        }
        s.push(acc);
    }
    s
}

/// Genus-2 numerator from `#C(F_q)` and `#C(F_(q^2))`.
pub fn zeta_numerator_genus2(n1: u64, n2: u64, q: u64) -> Result<ZetaData> {
    zeta_numerator(&[n1, n2], q, 2)
}

/// Counts the smooth model of a hyperelliptic curve over `F_p, ..., F_(p^extra)` (at least
/// up to the genus) and returns its zeta data.
pub fn curve_zeta(curve: &HyperellipticCurve, extra: u32) -> Result<ZetaData> {
    let counts = curve.counts(extra.max(curve.genus))?;
    zeta_numerator(&counts, curve.p, curve.genus)
}

/// Big integers are written as decimal strings.
fn decimal_strings<S: serde::Serializer>(
    v: &[BigInt],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

/// A polynomial over `Z/p^k`, coefficients in increasing degree, reduced and trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolyModPk {
    pub p: u64,
    pub k: u32,
    #[serde(serialize_with = "decimal_strings")]
    pub coeffs: Vec<BigInt>,
}

impl PolyModPk {
    pub fn new(p: u64, k: u32, coeffs: &[BigInt]) -> Self {
        let m = num_traits::pow(BigInt::from(p), k as usize);
        let mut c: Vec<BigInt> = coeffs.iter().map(|x| x.mod_floor(&m)).collect();
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        PolyModPk { p, k, coeffs: c }
    }

    pub fn modulus(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.p), self.k as usize)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Remainder of `n` divided by `self`; the leading coefficient must be a unit.
    pub fn remainder_of(&self, n: &[BigInt]) -> Result<PolyModPk> {
        let m = self.modulus();
        let d = self
            .degree()
            .ok_or_else(|| Error::InvalidArgument("division by the zero polynomial".into()))?;
        let inv = mod_inverse(&self.coeffs[d], &m).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "leading coefficient {} is not a unit mod {m}",
                self.coeffs[d]
            ))
        })?;
        let mut r = PolyModPk::new(self.p, self.k, n).coeffs;
        while r.len() > d {
            let top = r.len() - 1;
            let c = (&r[top] * &inv).mod_floor(&m);
            for (i, x) in self.coeffs.iter().enumerate() {
                let j = top - d + i;
                r[j] = (&r[j] - &c * x).mod_floor(&m);
            }
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        Ok(PolyModPk::new(self.p, self.k, &r))
    }

    /// Divisibility of an integer polynomial modulo `p^k`, as a report whose defect is the
    /// valuation of the remainder.
    pub fn divisibility(&self, claim: &str, n: &[BigInt]) -> Result<CongruenceReport> {
        let r = self.remainder_of(n)?;
        let v = r
            .coeffs
            .iter()
            .map(|c| valuation_of_int(c, self.p))
            .min()
            .unwrap_or(Valuation::Infinite);
        Ok(CongruenceReport::new(claim, self.p, Some(self.k as i64), v)
            .with("factor", poly_text(&self.coeffs, "T"))
            .with("remainder", poly_text(&r.coeffs, "T")))
    }

    pub fn text(&self) -> String {
        poly_text(&self.coeffs, "T")
    }
}

fn scalar_integer_context(ctx: &HWContext) -> Result<()> {
    if !ctx.work_ring().is_scalar() {
        return Err(Error::InvalidArgument(
            "zeta comparisons need scalar coefficients".into(),
        ));
    }
    Ok(())
}

/// `det(1 - T M)` modulo `p`, with `M` the `k`-fold twisted product of the Hasse–Witt
/// matrix.
pub fn charpoly_hw_modp(ctx: &HWContext, k: u32) -> Result<PolyModPk> {
    scalar_integer_context(ctx)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let (hw, _) = ctx.hasse_witt()?;
    let sigma = ctx.sigma().transport(hw.ring())?;
    let mut prod = hw.clone();
    for i in 1..k {
        prod = prod.mul(&hw.frobenius(&sigma, i)?)?;
    }
    let c: Vec<BigInt> = prod
        .reciprocal_charpoly()
        .iter()
        .map(|x| x.constant_term())
        .collect();
    Ok(PolyModPk::new(ctx.p(), 1, &c))
}

/// `det(1 - T Phi)` modulo `p^K`, with `Phi` the `k`-fold product of Frobenius limits.
pub fn unit_root_factor(ctx: &HWContext, k: u32, precision: u32) -> Result<PolyModPk> {
    scalar_integer_context(ctx)?;
    let phi = ctx.frobenius_product(k, precision)?;
    let c: Vec<BigInt> = phi
        .reciprocal_charpoly()
        .iter()
        .map(|x| x.constant_term())
        .collect();
    Ok(PolyModPk::new(ctx.p(), precision, &c))
}

/// Unit roots of an integer polynomial, lifted modulo `p^K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PadicRootList {
    pub p: u64,
    pub precision: u32,
    #[serde(serialize_with = "decimal_strings")]
    pub roots: Vec<BigInt>,
}

fn eval_mod(poly: &[BigInt], x: &BigInt, m: &BigInt) -> BigInt {
    poly.iter()
        .rev()
        .fold(BigInt::zero(), |acc, c| (acc * x + c).mod_floor(m))
}

fn derivative(poly: &[BigInt]) -> Vec<BigInt> {
    poly.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

/// Every root `r` of `poly` modulo `p^K` with `r` a unit, found from the roots modulo `p`
/// by Newton iteration. Refuses roots that are not simple modulo `p`.
pub fn hensel_unit_roots(poly: &[BigInt], p: u64, precision: u32) -> Result<PadicRootList> {
    if precision == 0 {
        return Err(Error::InvalidArgument("precision must be positive".into()));
    }
    let pb = BigInt::from(p);
    let m = num_traits::pow(pb.clone(), precision as usize);
    let dp = derivative(poly);
    let mut roots = Vec::new();
    for r0 in 1..p {
        let r = BigInt::from(r0);
        if !eval_mod(poly, &r, &pb).is_zero() {
            continue;
        }
        if eval_mod(&dp, &r, &pb).is_zero() {
            return Err(Error::NonSimpleRoot { root: r0, p });
        }
        let mut x = r;
        let mut have = 1u32;
        while have < precision {
            have = (2 * have).min(precision);
            let md = num_traits::pow(pb.clone(), have as usize);
            let fx = eval_mod(poly, &x, &md);
            let inv = mod_inverse(&eval_mod(&dp, &x, &md), &md).expect("simple root");
            x = (&x - fx * inv).mod_floor(&md);
        }
        debug_assert!(eval_mod(poly, &x, &m).is_zero());
        roots.push(x);
    }
    roots.sort();
    Ok(PadicRootList {
        p,
        precision,
        roots,
    })
}

/// Reversed polynomial `T^d P(1/T)`: its roots are the reciprocal roots of `P`.
pub fn reversed(poly: &[BigInt]) -> Vec<BigInt> {
    let mut r = poly.to_vec();
    while r.last().is_some_and(|x| x.is_zero()) {
        r.pop();
    }
    r.reverse();
    r
}

/// Trace and determinant of the Frobenius limit modulo `p^K` against the sum and product of
/// the unit roots.
pub fn verify_unit_eigenvalue_match(
    ctx: &HWContext,
    roots: &PadicRootList,
    precision: u32,
) -> Result<Vec<CongruenceReport>> {
    scalar_integer_context(ctx)?;
    if roots.roots.len() != ctx.g() {
        return Err(Error::SizeMismatch(format!(
            "{} unit roots for g = {}",
            roots.roots.len(),
            ctx.g()
        )));
    }
    if roots.p != ctx.p() || roots.precision < precision {
        return Err(Error::InvalidArgument(format!(
            "roots known mod {}^{}, comparison needs {}^{precision}",
            roots.p,
            roots.precision,
            ctx.p()
        )));
    }
    let phi = ctx.frobenius_product(1, precision)?;
    let m = num_traits::pow(BigInt::from(ctx.p()), precision as usize);
    let sum: BigInt = roots.roots.iter().sum();
    let prod: BigInt = roots.roots.iter().product();
    let tr = phi.trace().constant_term();
    let det = phi.det().constant_term();
    let p = ctx.p();
    let report = |claim: &str, a: &BigInt, b: &BigInt| {
        let v = valuation_of_int(&(a - b).mod_floor(&m), p);
        CongruenceReport::new(claim, p, Some(precision as i64), v)
            .with("limit", a.mod_floor(&m).to_string())
            .with("roots", b.mod_floor(&m).to_string())
    };
    Ok(vec![
        report("unit-root-trace", &tr, &sum),
        report("unit-root-det", &det, &prod),
    ])
}

/// Outcome of the Atkin–Swinnerton-Dyer type check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsdResult {
    /// Least `c` in the tested range for which every congruence holds.
    pub minimal_c: Option<i64>,
    pub reports: Vec<CongruenceReport>,
}

fn ord(m: u64, p: u64) -> u32 {
    let mut m = m;
    let mut k = 0;
    while m.is_multiple_of(p) {
        m /= p;
        k += 1;
    }
    k
}

/// For each `m`, the valuation of `beta_m + c_1 beta_(m/q) + ... + c_r beta_(m/q^r)`, where
/// `beta_(m/q^i)` is zero unless `q^i` divides `m`. The congruence asks for valuation at
/// least `ord_p(m) - c`; reports use the least `c` in `c_range` that works for every `m`
/// (or the top of the range) and are soft.
pub fn asd_check(
    ctx: &HWContext,
    zeta: &ZetaData,
    ms: &[u64],
    c_range: (i64, i64),
) -> Result<AsdResult> {
    scalar_integer_context(ctx)?;
    let p = ctx.p();
    let mut qk = 1u32;
    while p.checked_pow(qk).is_some_and(|x| x < zeta.q) {
        qk += 1;
    }
    if p.checked_pow(qk) != Some(zeta.q) {
        return Err(Error::InvalidArgument(format!(
            "q = {} is not a power of {p}",
            zeta.q
        )));
    }
    let ring = ctx.report_ring().clone();
    let mut observed: Vec<(u64, u32, Valuation)> = Vec::new();
    for &m in ms {
        if m == 0 {
            return Err(Error::InvalidArgument("m must be positive".into()));
        }
        let mut acc = ctx.beta_matrix(m)?;
        let mut div = m;
        for c in zeta.numerator.iter().skip(1) {
            if div % zeta.q != 0 {
                break;
            }
            div /= zeta.q;
            let b = ctx.beta_matrix(div)?;
            acc = acc.add(&b.scale(&RingElement::from_int(&ring, *c)))?;
        }
        observed.push((m, ord(m, p), acc.min_valuation(p)));
    }
    let works = |c: i64| observed.iter().all(|(_, o, v)| v.at_least(*o as i64 - c));
    let minimal_c = (c_range.0..=c_range.1).find(|&c| works(c));
    let c = minimal_c.unwrap_or(c_range.1);
    let reports = observed
        .iter()
        .map(|(m, o, v)| {
            CongruenceReport::new("asd", p, Some(*o as i64 - c), *v)
                .with("m", *m)
                .with("ord", *o)
                .with("c", c)
                .soft()
        })
        .collect();
    Ok(AsdResult { minimal_c, reports })
}

#[cfg(test)]
mod tests;
