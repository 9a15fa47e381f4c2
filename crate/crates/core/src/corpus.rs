//! Seeded random Laurent polynomials for property suites.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::hwmatrix::{HWContext, HWOptions};
use crate::laurent::{ExponentVector, LatticeMode, LaurentPoly};
use crate::ring::{BaseRing, RingDescriptor, RingElement};

const VAR_NAMES: [&str; 3] = ["x", "y", "z"];

/// Shape of the generated polynomials and the filters they must pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusSpec {
    pub seed: u64,
    pub count: usize,
    /// Members cycle through one to `max_vars` variables.
    pub max_vars: usize,
    pub max_support: usize,
    /// Coefficients are nonzero integers in `[-coeff_bound, coeff_bound]`.
    pub coeff_bound: i64,
    /// Every exponent lies in this closed range.
    pub exponent_range: (i64, i64),
    pub mode: LatticeMode,
    /// Upper bound on the size of the index set.
    pub max_g: usize,
    /// The Hasse–Witt matrix must be invertible modulo each of these primes.
    pub primes: Vec<u64>,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            seed: 0x5eed,
            count: 20,
            max_vars: 2,
            max_support: 6,
            coeff_bound: 3,
            exponent_range: (-1, 2),
            mode: LatticeMode::Interior,
            max_g: 4,
            primes: vec![2, 3, 5, 7],
        }
    }
}

const MAX_ATTEMPTS_PER_MEMBER: usize = 5_000;

impl CorpusSpec {
    fn validate(&self) -> Result<()> {
        if self.max_vars == 0 || self.max_vars > VAR_NAMES.len() {
            return Err(Error::InvalidArgument(format!(
                "max_vars must be 1..={}",
                VAR_NAMES.len()
            )));
        }
        if self.max_support < 2 || self.coeff_bound < 1 || self.max_g == 0 {
            return Err(Error::InvalidArgument(
                "support >= 2, coefficient bound >= 1 and max_g >= 1".into(),
            ));
        }
        if self.exponent_range.0 >= self.exponent_range.1 {
            return Err(Error::InvalidArgument(
                "exponent range must contain two values".into(),
            ));
        }
        Ok(())
    }

    fn draw(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<LaurentPoly> {
        let (lo, hi) = self.exponent_range;
        let width = (hi - lo + 1) as usize;
        let cells = width.pow(n as u32);
        let k = rng.gen_range(2..=self.max_support.min(cells));
        let mut all: Vec<usize> = (0..cells).collect();
        all.shuffle(rng);
        let mut terms = BTreeMap::new();
        for idx in all.into_iter().take(k) {
            let mut e = Vec::with_capacity(n);
            let mut r = idx;
            for _ in 0..n {
                e.push(lo + (r % width) as i64);
                r /= width;
            }
            let mut c = 0;
            while c == 0 {
                c = rng.gen_range(-self.coeff_bound..=self.coeff_bound);
            }
            terms.insert(ExponentVector(e), c);
        }
        let ring = RingDescriptor::integers();
        let vars = VAR_NAMES[..n].iter().map(|s| s.to_string()).collect();
        LaurentPoly::from_terms(
            &ring,
            vars,
            terms
                .into_iter()
                .map(|(e, c)| (e, RingElement::from_int(&ring, c))),
        )
    }

    /// Whether `f` meets the index-set and invertibility filters.
    fn accepts(&self, f: &LaurentPoly, budget: &Budget) -> Result<bool> {
        let opts = |_| HWOptions {
            mode: self.mode,
            precision: Some(1),
            budget: *budget,
            ..HWOptions::default()
        };
        let Some(&first) = self.primes.first() else {
            return match HWContext::new(f, 2, opts(2)) {
                Ok(c) => Ok(c.g() <= self.max_g),
                Err(Error::EmptyJ) => Ok(false),
                Err(e) => Err(e),
            };
        };
        for &p in &self.primes {
            let ctx = match HWContext::new(f, p, opts(p)) {
                Ok(c) => c,
                Err(Error::EmptyJ) => return Ok(false),
                Err(e) => return Err(e),
            };
            if p == first && ctx.g() > self.max_g {
                return Ok(false);
            }
            // a reduction that vanishes has no invertible matrix either
            match ctx.hasse_witt() {
                Ok((_, true)) => {}
                Ok((_, false)) | Err(Error::ZeroPolynomial) => return Ok(false),
                Err(e) => return Err(e),
            }
        }
        Ok(true)
    }
}

/// Draws distinct polynomials until `spec.count` pass the filters. The output depends only
/// on `spec`.
pub fn generate(spec: &CorpusSpec, budget: &Budget) -> Result<Vec<LaurentPoly>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(spec.count);
    let mut attempts = 0usize;
    while out.len() < spec.count {
        attempts += 1;
        if attempts > MAX_ATTEMPTS_PER_MEMBER * spec.count.max(1) {
            return Err(Error::InvalidArgument(format!(
                "only {} of {} members found; relax the filters",
                out.len(),
                spec.count
            )));
        }
        let f = spec.draw(1 + out.len() % spec.max_vars, &mut rng)?;
        if !seen.insert(f.to_text()) {
            continue;
        }
        if spec.accepts(&f, budget)? {
            out.push(f);
        }
    }
    Ok(out)
}

/// The same polynomial over `Z[param]` with `param` added to the coefficient at one
/// support point chosen by `seed`. At `param = 0` it specializes back to `f`.
pub fn parametric_variant(f: &LaurentPoly, param: &str, seed: u64) -> Result<LaurentPoly> {
    if !f.ring().is_scalar() || f.ring().base != BaseRing::Integers {
        return Err(Error::InvalidArgument(
            "variants start from integer coefficients".into(),
        ));
    }
    if f.vars().iter().any(|v| v == param) {
        return Err(Error::InvalidArgument(format!(
            "`{param}` is already a variable"
        )));
    }
    let ring = RingDescriptor::new(BaseRing::Integers, vec![param.to_string()], None)?;
    let support = f.support();
    if support.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = rng.gen_range(0..support.len());
    let t = RingElement::param(&ring, 0);
    let terms = f.terms().iter().enumerate().map(|(i, (e, c))| {
        let c = RingElement::from_bigint(&ring, c.constant_term());
        let c = if i == pick { &c + &t } else { c };
        (e.clone(), c)
    });
    LaurentPoly::from_terms(&ring, f.vars().to_vec(), terms)
}

/// Integer coefficients of `f` as plain values, for oracles.
pub fn integer_terms(f: &LaurentPoly) -> Result<Vec<(Vec<i64>, BigInt)>> {
    if !f.ring().is_scalar() {
        return Err(Error::InvalidArgument(
            "scalar coefficients expected".into(),
        ));
    }
    Ok(f.terms()
        .iter()
        .map(|(e, c)| (e.0.clone(), c.constant_term()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_filtered() {
        let spec = CorpusSpec {
            count: 8,
            ..CorpusSpec::default()
        };
        let a = generate(&spec, &Budget::default()).unwrap();
        let b = generate(&spec, &Budget::default()).unwrap();
        let text = |v: &[LaurentPoly]| v.iter().map(|f| f.to_text()).collect::<Vec<_>>();
        assert_eq!(text(&a), text(&b));
        for f in &a {
            assert!(f.nvars() <= 2 && f.len() <= 6 && f.len() >= 2);
            for (e, c) in integer_terms(f).unwrap() {
                assert!(e.iter().all(|&x| (-1..=2).contains(&x)));
                assert!(c != BigInt::from(0) && c.magnitude() <= &3u32.into());
            }
            for p in [2, 3, 5, 7] {
                let ctx = HWContext::new(
                    f,
                    p,
                    HWOptions {
                        precision: Some(1),
                        ..HWOptions::default()
                    },
                )
                .unwrap();
                assert!(ctx.g() <= 4);
                assert!(ctx.hasse_witt().unwrap().1);
            }
        }
        let other = generate(&CorpusSpec { seed: 1, ..spec }, &Budget::default()).unwrap();
        assert_ne!(text(&a), text(&other));
    }

    #[test]
    fn variant_specializes_back() {
        let ring = RingDescriptor::integers();
        let f = LaurentPoly::from_int_terms(&ring, &["x"], &[(&[0], 1), (&[1], 2), (&[3], 1)]);
        let v = parametric_variant(&f, "t", 3).unwrap();
        assert_eq!(v.ring().params, vec!["t".to_string()]);
        let zero = RingElement::zero(v.ring());
        let back: Vec<(Vec<i64>, BigInt)> = v
            .terms()
            .iter()
            .map(|(e, c)| {
                (
                    e.0.clone(),
                    c.substitute(std::slice::from_ref(&zero))
                        .unwrap()
                        .constant_term(),
                )
            })
            .collect();
        assert_eq!(back, integer_terms(&f).unwrap());
        assert!(parametric_variant(&f, "x", 0).is_err());
    }

    #[test]
    fn impossible_filters_are_reported() {
        let spec = CorpusSpec {
            count: 1,
            max_vars: 1,
            exponent_range: (0, 1),
            ..CorpusSpec::default()
        };
        assert!(generate(&spec, &Budget::default()).is_err());
    }
}
