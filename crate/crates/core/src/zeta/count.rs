//! Naive point counts of `f = 0` over finite fields.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{Field, FiniteFieldSpec};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;

/// Enumeration limit for naive counting.
pub const MAX_EVALUATIONS: u128 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variety {
    /// Solutions with every coordinate nonzero.
    Torus,
    /// Solutions in affine space; negative exponents are not allowed.
    Affine,
    /// A plane curve in two variables, counted in the affine plane. Curves of the form
    /// `c y^2 + h(x)` are counted through the quadratic character.
    AffineCurve,
}

/// Coefficients reduced into the prime field, zero terms dropped.
fn reduced_terms(f: &LaurentPoly, field: &Field) -> Result<Vec<(u32, Vec<i64>)>> {
    let ring = f.ring();
    if !ring.is_scalar() {
        return Err(Error::InvalidArgument(
            "point counts need scalar coefficients".into(),
        ));
    }
    if let Some(q) = ring.p() {
        if q != field.p() {
            return Err(Error::RingMismatch(format!(
                "coefficients mod {q}, field of characteristic {}",
                field.p()
            )));
        }
    }
    let p = num_bigint::BigInt::from(field.p());
    let mut out = Vec::new();
    for (e, c) in f.terms() {
        let r = num_integer::Integer::mod_floor(&c.constant_term(), &p);
        let r: u32 = u32::try_from(&r).expect("residue");
        if r != 0 {
            out.push((r, e.0.clone()));
        }
    }
    Ok(out)
}

/// Index of the `y` variable, the constant `c` and `h` as (x-exponent, coefficient) pairs.
type HyperellipticForm = (usize, u32, Vec<(i64, u32)>);

/// Recognizes `c y^2 + h(x)`.
fn hyperelliptic_form(terms: &[(u32, Vec<i64>)]) -> Option<HyperellipticForm> {
    'outer: for y in (0..2).rev() {
        let x = 1 - y;
        let mut c = None;
        let mut h = Vec::new();
        for (coef, e) in terms {
            match (e[y], e[x]) {
                (2, 0) if c.is_none() => c = Some(*coef),
                (0, k) if k >= 0 => h.push((k, *coef)),
                _ => continue 'outer,
            }
        }
        if let Some(c) = c {
            return Some((y, c, h));
        }
    }
    None
}

fn eval(field: &Field, terms: &[(u32, Vec<i64>)], point: &[u32]) -> u32 {
    let n = field.size() as u64 - 1;
    let mut acc = 0u32;
    'terms: for (c, e) in terms {
        let mut lg = field.log(*c) as u64;
        for (x, k) in point.iter().zip(e) {
            if *k == 0 {
                continue;
            }
            if *x == 0 {
                continue 'terms;
            }
            lg += (field.log(*x) as i64 * k).rem_euclid(n as i64) as u64;
        }
        acc = field.add(acc, field.exp(lg));
    }
    acc
}

/// Number of points of `f = 0` over `F_(q^m)`, `q = p^k` from `spec`. Coefficients must lie
/// in the prime field.
pub fn count_points(
    f: &LaurentPoly,
    spec: &FiniteFieldSpec,
    m: u32,
    variety: Variety,
    budget: &Budget,
) -> Result<u64> {
    let ext = spec.extension(m)?;
    let field = Field::new(&ext);
    let terms = reduced_terms(f, &field)?;
    let nv = f.nvars();
    if variety != Variety::Torus && terms.iter().any(|(_, e)| e.iter().any(|&k| k < 0)) {
        return Err(Error::InvalidArgument(
            "negative exponents are only allowed on the torus".into(),
        ));
    }
    if variety == Variety::AffineCurve {
        if nv != 2 {
            return Err(Error::InvalidArgument(
                "an affine curve needs exactly two variables".into(),
            ));
        }
        if let Some(form) = hyperelliptic_form(&terms) {
            return Ok(count_hyperelliptic(&field, &form));
        }
    }
    let q = field.size() as u64;
    let (lo, side) = match variety {
        Variety::Torus => (1u32, q - 1),
        _ => (0u32, q),
    };
    let points = (side as u128).checked_pow(nv as u32).unwrap_or(u128::MAX);
    if points > MAX_EVALUATIONS {
        return Err(Error::Budget {
            what: "point enumeration",
            needed: points,
            limit: MAX_EVALUATIONS,
        });
    }
    budget.check_work(
        "point enumeration",
        points.saturating_mul(terms.len().max(1) as u128),
    )?;
    if nv == 0 {
        return Ok(u64::from(eval(&field, &terms, &[]) == 0));
    }
    let count = (lo..lo + side as u32)
        .into_par_iter()
        .map(|first| {
            let mut point = vec![lo; nv];
            point[0] = first;
            let mut n = 0u64;
            loop {
                if eval(&field, &terms, &point) == 0 {
                    n += 1;
                }
                // odometer over the remaining coordinates
                let mut i = 1;
                loop {
                    if i == nv {
                        return n;
                    }
                    point[i] += 1;
                    if point[i] < lo + side as u32 {
                        break;
                    }
                    point[i] = lo;
                    i += 1;
                }
            }
        })
        .sum();
    Ok(count)
}

fn count_hyperelliptic(field: &Field, form: &(usize, u32, Vec<(i64, u32)>)) -> u64 {
    let (_, c, h) = form;
    let q = field.size();
    if field.p() == 2 {
        // squaring is a bijection
        return q as u64;
    }
    let scale = field.neg(field.inv(*c).expect("nonzero"));
    let terms: Vec<(u32, Vec<i64>)> = h.iter().map(|(k, a)| (*a, vec![*k])).collect();
    let total: i64 = (0..q)
        .into_par_iter()
        .map(|x| 1 + field.chi(field.mul(scale, eval(field, &terms, &[x]))))
        .sum();
    total as u64
}

/// A curve `c y^2 + h(x) = 0` over `F_p` with `p` odd, that is `y^2 = -h(x)/c`.
#[derive(Clone, Debug)]
pub struct HyperellipticCurve {
    pub p: u64,
    /// Degree of `h` modulo `p`.
    pub degree: u32,
    pub genus: u32,
    terms: Vec<(u32, Vec<i64>)>,
    /// Leading coefficient of `-h/c` modulo `p`.
    lead: i64,
}

impl HyperellipticCurve {
    pub fn new(f: &LaurentPoly, p: u64) -> Result<Self> {
        if p == 2 {
            return Err(Error::InvalidArgument(
                "hyperelliptic models need odd characteristic".into(),
            ));
        }
        if f.nvars() != 2 {
            return Err(Error::InvalidArgument(
                "a curve needs exactly two variables".into(),
            ));
        }
        let field = Field::new(&FiniteFieldSpec::new(p, 1)?);
        let terms = reduced_terms(f, &field)?;
        let (_, c, h) = hyperelliptic_form(&terms).ok_or_else(|| {
            Error::InvalidArgument("expected a curve of the form c*y^2 + h(x)".into())
        })?;
        let (degree, a) = h.iter().max_by_key(|(k, _)| *k).copied().unwrap_or((0, 0));
        if degree < 3 {
            return Err(Error::InvalidArgument(
                "h must have degree at least 3 modulo p".into(),
            ));
        }
        let lead = field.mul(field.neg(a), field.inv(c).expect("nonzero")) as i64;
        Ok(HyperellipticCurve {
            p,
            degree: degree as u32,
            genus: (degree as u32 - 1) / 2,
            terms,
            lead,
        })
    }

    /// Points of the smooth projective model over `F_(p^m)`: the affine count plus one point
    /// at infinity for odd degree, or two or none for even degree depending on whether the
    /// leading coefficient is a square.
    pub fn count(&self, m: u32) -> Result<u64> {
        let spec = FiniteFieldSpec::new(self.p, m)?;
        let field = Field::new(&spec);
        let form = hyperelliptic_form(&self.terms).expect("checked");
        let affine = count_hyperelliptic(&field, &form);
        let infinity = if self.degree % 2 == 1 {
            1
        } else {
            (1 + field.chi(field.from_int(self.lead))) as u64
        };
        Ok(affine + infinity)
    }

    pub fn counts(&self, upto: u32) -> Result<Vec<u64>> {
        (1..=upto).map(|m| self.count(m)).collect()
    }
}
