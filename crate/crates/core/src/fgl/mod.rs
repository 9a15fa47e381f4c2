//! Formal group laws attached to a Laurent polynomial.
//!
//! The logarithm is `l_u(t) = sum_m (1/m) sum_v (beta_m)_(u,v) t_v^m` with coordinates
//! indexed by `J`; the law is `G(t, t') = l^-1(l(t) + l(t'))`. Both are computed over the
//! rationals so that every prime can be inspected at once.

mod solve;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::hwmatrix::HWContext;
use crate::ring::{rational_text, SquareMatrix, Valuation};
use crate::series::{SeriesJson, TruncatedSeries};

/// A `g`-tuple of series over shared variables and a shared degree bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesTuple {
    components: Vec<TruncatedSeries>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesTupleJson {
    pub components: Vec<SeriesJson>,
}

impl SeriesTuple {
    pub fn new(components: Vec<TruncatedSeries>) -> Result<Self> {
        let first = components.first().ok_or_else(|| {
            Error::InvalidArgument("a series tuple needs at least one component".into())
        })?;
        for c in &components {
            if c.vars() != first.vars() || c.degree_bound() != first.degree_bound() {
                return Err(Error::SizeMismatch(
                    "tuple components disagree on variables or degree".into(),
                ));
            }
        }
        Ok(SeriesTuple { components })
    }

    /// `(t_1, ..., t_g)` itself.
    pub fn identity(vars: Vec<String>, n: u32) -> Self {
        let comps = (0..vars.len())
            .map(|i| TruncatedSeries::var(vars.clone(), n, i))
            .collect();
        SeriesTuple { components: comps }
    }

    pub fn g(&self) -> usize {
        self.components.len()
    }

    pub fn vars(&self) -> &[String] {
        self.components[0].vars()
    }

    pub fn degree_bound(&self) -> u32 {
        self.components[0].degree_bound()
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.components
    }

    /// Substitutes the components of `images` for the variables of every component.
    pub fn compose(&self, images: &SeriesTuple) -> Result<Self> {
        Self::new(
            self.components
                .iter()
                .map(|c| c.compose(&images.components))
                .collect::<Result<_>>()?,
        )
    }

    pub fn truncate(&self, n: u32) -> Self {
        SeriesTuple {
            components: self.components.iter().map(|c| c.truncate(n)).collect(),
        }
    }

    pub fn to_json(&self) -> SeriesTupleJson {
        SeriesTupleJson {
            components: self.components.iter().map(|c| c.to_json()).collect(),
        }
    }

    pub fn from_json(json: &SeriesTupleJson) -> Result<Self> {
        Self::new(
            json.components
                .iter()
                .map(TruncatedSeries::from_json)
                .collect::<Result<_>>()?,
        )
    }

    pub fn to_text(&self) -> Vec<String> {
        self.components.iter().map(|c| c.to_text()).collect()
    }
}

/// `t1, ..., tg` followed by an optional suffix, e.g. `t1'`.
pub fn coordinate_names(g: usize, suffix: &str) -> Vec<String> {
    (1..=g).map(|i| format!("t{i}{suffix}")).collect()
}

fn require_exact_scalar(ctx: &HWContext) -> Result<()> {
    if ctx.precision().is_some() || ctx.work_ring().p().is_some() {
        return Err(Error::InvalidArgument(
            "formal group laws need an exact context over the integers".into(),
        ));
    }
    if !ctx.work_ring().is_scalar() {
        return Err(Error::InvalidArgument(
            "formal group laws are computed for integer coefficients only".into(),
        ));
    }
    Ok(())
}

fn integer_entries(m: &SquareMatrix) -> Result<Vec<BigInt>> {
    if m.ring().p().is_some() || !m.ring().is_scalar() {
        return Err(Error::InvalidArgument("expected an integer matrix".into()));
    }
    Ok(m.entries().iter().map(|x| x.constant_term()).collect())
}

/// The logarithm from `betas[m-1] = beta_m`, to degree `betas.len()`.
pub fn logarithm_from_betas(betas: &[SquareMatrix]) -> Result<SeriesTuple> {
    let first = betas
        .first()
        .ok_or_else(|| Error::InvalidArgument("need at least beta_1".into()))?;
    let g = first.size();
    let n = betas.len() as u32;
    let vars = coordinate_names(g, "");
    let mut terms: Vec<Vec<(Vec<u32>, BigRational)>> = vec![Vec::new(); g];
    for (i, b) in betas.iter().enumerate() {
        if b.size() != g {
            return Err(Error::SizeMismatch(format!(
                "beta_{} has size {}",
                i + 1,
                b.size()
            )));
        }
        let m = i as u32 + 1;
        let e = integer_entries(b)?;
        for u in 0..g {
            for v in 0..g {
                let mut exp = vec![0; g];
                exp[v] = m;
                terms[u].push((exp, BigRational::new(e[u * g + v].clone(), BigInt::from(m))));
            }
        }
    }
    SeriesTuple::new(
        terms
            .into_iter()
            .map(|t| TruncatedSeries::from_terms(vars.clone(), n, t))
            .collect(),
    )
}

/// `l(t) = sum_m (1/m) beta_m t^m` to degree `n`, with `beta_m` computed exactly.
pub fn logarithm(ctx: &HWContext, n: u32) -> Result<SeriesTuple> {
    require_exact_scalar(ctx)?;
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    let ms: Vec<u64> = (1..=n as u64).collect();
    let betas = ctx.betas_work(&ms)?;
    logarithm_from_betas(&betas)
}

/// Compositional inverse of a tuple with identity linear part, to degree `n`.
pub fn invert_series(l: &SeriesTuple, n: u32, budget: &Budget) -> Result<SeriesTuple> {
    solve::check_identity_linear_part(l)?;
    let id = SeriesTuple::identity(l.vars().to_vec(), n.min(l.degree_bound()));
    solve::solve(l, &id, n, budget)
}

/// `l^-1(l(t) + l(t'))` in the variables `t1..tg, t1'..tg'`, to total degree `n`.
pub fn group_law_from_log(l: &SeriesTuple, n: u32, budget: &Budget) -> Result<SeriesTuple> {
    solve::check_identity_linear_part(l)?;
    let g = l.g();
    let mut vars = coordinate_names(g, "");
    vars.extend(coordinate_names(g, "'"));
    let left: Vec<usize> = (0..g).collect();
    let right: Vec<usize> = (g..2 * g).collect();
    let rhs = l
        .components()
        .iter()
        .map(|c| {
            c.embed(vars.clone(), &left)
                .add(&c.embed(vars.clone(), &right))
        })
        .collect::<Result<Vec<_>>>()?;
    solve::solve(l, &SeriesTuple::new(rhs)?, n, budget)
}

/// The formal group law of the context's polynomial to total degree `n`.
pub fn group_law(ctx: &HWContext, n: u32) -> Result<SeriesTuple> {
    group_law_from_log(&logarithm(ctx, n)?, n, ctx.budget())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// 1-based component index.
    pub component: usize,
    pub exp: Vec<u32>,
    pub coeff: String,
    pub valuation: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegralityReport {
    pub p: u64,
    pub min_valuation: Valuation,
    pub violations: Vec<Violation>,
    pub pass: bool,
}

fn violations_of(t: &SeriesTuple, p: u64) -> Vec<Violation> {
    t.components()
        .iter()
        .enumerate()
        .flat_map(|(i, c)| {
            c.violations(p)
                .into_iter()
                .map(move |(exp, x, v)| Violation {
                    component: i + 1,
                    exp,
                    coeff: rational_text(&x),
                    valuation: v,
                })
        })
        .collect()
}

fn min_valuation_of(t: &SeriesTuple, p: u64) -> Valuation {
    t.components()
        .iter()
        .map(|c| c.min_valuation(p))
        .min()
        .unwrap_or(Valuation::Infinite)
}

/// Every coefficient with negative p-adic valuation.
pub fn check_integrality(t: &SeriesTuple, p: u64) -> IntegralityReport {
    let violations = violations_of(t, p);
    IntegralityReport {
        p,
        min_valuation: min_valuation_of(t, p),
        pass: violations.is_empty(),
        violations,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u32,
    /// Number of `gamma_s` used, the largest `s` with `p^s <= N`.
    pub levels: u32,
    pub min_valuation: Valuation,
    pub violations: Vec<Violation>,
    /// Whether each coefficient of `h` agrees with the closed form in `beta` and `gamma`.
    pub coefficient_identity: bool,
    pub pass: bool,
}

/// `t_v -> t_v^(p^s)` on every exponent, dropping what leaves the degree bound.
fn frobenius_twist(c: &TruncatedSeries, q: u64) -> TruncatedSeries {
    let n = c.degree_bound();
    TruncatedSeries::from_terms(
        c.vars().to_vec(),
        n,
        c.terms()
            .iter()
            .filter(|(e, _)| e.iter().map(|&x| x as u64).sum::<u64>() * q <= n as u64)
            .map(|(e, x)| (e.iter().map(|&k| k * q as u32).collect(), x.clone())),
    )
}

/// Builds `h = l - sum_s (gamma_s / p^s) (sigma^s l)` and checks that it is p-integral.
///
/// Over the integers the Frobenius lift is the identity on coefficients and acts on series
/// by `t_v -> t_v^p`. Each coefficient of `h` is also compared with
/// `(1/k) (beta_k - sum_s gamma_s beta_(k/p^s))`.
pub fn functional_equation_witness(ctx: &HWContext, n: u32) -> Result<WitnessReport> {
    require_exact_scalar(ctx)?;
    let p = ctx.p();
    let g = ctx.g();
    let l = logarithm(ctx, n)?;
    let mut levels = 0u32;
    while p.checked_pow(levels + 1).is_some_and(|q| q <= n as u64) {
        levels += 1;
    }
    let gammas: Vec<Vec<BigInt>> = if levels == 0 {
        Vec::new()
    } else {
        ctx.gamma_matrices(levels)?
            .iter()
            .map(integer_entries)
            .collect::<Result<_>>()?
    };
    let mut h = l.components().to_vec();
    for (i, gm) in gammas.iter().enumerate() {
        let s = i as u32 + 1;
        let q = p.pow(s);
        let twisted: Vec<TruncatedSeries> = l
            .components()
            .iter()
            .map(|c| frobenius_twist(c, q))
            .collect();
        for (u, hu) in h.iter_mut().enumerate() {
            for (w, tw) in twisted.iter().enumerate() {
                let c = BigRational::new(gm[u * g + w].clone(), BigInt::from(q));
                if !c.is_zero() {
                    *hu = hu.sub(&tw.scale(&c))?;
                }
            }
        }
    }
    let h = SeriesTuple::new(h)?;

    let ms: Vec<u64> = (1..=n as u64).collect();
    let betas: Vec<Vec<BigInt>> = ctx
        .betas_work(&ms)?
        .iter()
        .map(integer_entries)
        .collect::<Result<_>>()?;
    let mut identity = true;
    for (u, hu) in h.components().iter().enumerate() {
        // only pure powers may occur
        if hu
            .terms()
            .keys()
            .any(|e| e.iter().filter(|&&x| x > 0).count() > 1)
        {
            identity = false;
        }
        for v in 0..g {
            for k in 1..=n as u64 {
                let mut acc = betas[k as usize - 1][u * g + v].clone();
                for (i, gm) in gammas.iter().enumerate() {
                    let q = p.pow(i as u32 + 1);
                    if k % q == 0 {
                        let b = &betas[(k / q) as usize - 1];
                        for w in 0..g {
                            acc -= &gm[u * g + w] * &b[w * g + v];
                        }
                    }
                }
                let mut e = vec![0; g];
                e[v] = k as u32;
                if hu.coeff(&e) != BigRational::new(acc, BigInt::from(k)) {
                    identity = false;
                }
            }
        }
    }
    let violations = violations_of(&h, p);
    Ok(WitnessReport {
        p,
        n,
        levels,
        min_valuation: min_valuation_of(&h, p),
        pass: violations.is_empty() && identity,
        violations,
        coefficient_identity: identity,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    #[serde(rename = "N")]
    pub n: u32,
    pub unit: bool,
    pub commutative: bool,
    pub associative: bool,
    /// `exact`, or the number of random lines the associativity check was run on.
    pub associativity_check: String,
    pub pass: bool,
}

/// Associativity is checked symbolically when `3g` variables to degree `N` have at most
/// this many monomials, otherwise on random lines through the origin.
const EXACT_ASSOCIATIVITY_MONOMIALS: u64 = 1000;
const ASSOCIATIVITY_LINES: usize = 8;
const ASSOCIATIVITY_SEED: u64 = 0x5eed;

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Checks `G(t,0) = t`, `G(0,t') = t'`, `G(t,t') = G(t',t)` and associativity modulo degree
/// `n + 1`.
pub fn check_fgl_axioms(law: &SeriesTuple, n: u32) -> Result<AxiomReport> {
    let g = law.g();
    if law.vars().len() != 2 * g {
        return Err(Error::SizeMismatch(format!(
            "{g} components in {} variables",
            law.vars().len()
        )));
    }
    let n = n.min(law.degree_bound());
    let law = law.truncate(n);
    let comps = law.components();

    let mut unit = true;
    for (u, c) in comps.iter().enumerate() {
        for half in 0..2 {
            let keep = |e: &Vec<u32>| e[(1 - half) * g..(2 - half) * g].iter().all(|&x| x == 0);
            let restricted: Vec<(&Vec<u32>, &BigRational)> =
                c.terms().iter().filter(|(e, _)| keep(e)).collect();
            let mut want = vec![0; 2 * g];
            want[half * g + u] = 1;
            if restricted.len() != 1 || *restricted[0].0 != want || !restricted[0].1.is_one() {
                unit = false;
            }
        }
    }

    let swapped: Vec<usize> = (g..2 * g).chain(0..g).collect();
    let commutative = comps
        .iter()
        .all(|c| c.embed(c.vars().to_vec(), &swapped) == *c);

    // substitute triples of g-tuples as the two arguments
    let apply = |a: &[TruncatedSeries], b: &[TruncatedSeries]| -> Result<Vec<TruncatedSeries>> {
        let images: Vec<TruncatedSeries> = a.iter().chain(b).cloned().collect();
        comps.iter().map(|c| c.compose(&images)).collect()
    };
    let assoc_on =
        |x: &[TruncatedSeries], y: &[TruncatedSeries], z: &[TruncatedSeries]| -> Result<bool> {
            let lhs = apply(&apply(x, y)?, z)?;
            let rhs = apply(x, &apply(y, z)?)?;
            Ok(lhs == rhs)
        };
    let (associative, associativity_check) =
        if binomial(n as u64 + 3 * g as u64, 3 * g as u64) <= EXACT_ASSOCIATIVITY_MONOMIALS {
            let mut vars = coordinate_names(g, "");
            vars.extend(coordinate_names(g, "'"));
            vars.extend(coordinate_names(g, "''"));
            let v: Vec<TruncatedSeries> = (0..3 * g)
                .map(|i| TruncatedSeries::var(vars.clone(), n, i))
                .collect();
            (
                assoc_on(&v[..g], &v[g..2 * g], &v[2 * g..])?,
                "exact".to_string(),
            )
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(ASSOCIATIVITY_SEED);
            let eps = vec!["e".to_string()];
            let mut ok = true;
            for _ in 0..ASSOCIATIVITY_LINES {
                let mut line = || -> Vec<TruncatedSeries> {
                    (0..g)
                        .map(|_| {
                            let c: i64 = rng.gen_range(-9..=9);
                            TruncatedSeries::var(eps.clone(), n, 0)
                                .scale(&BigRational::from_integer(c.into()))
                        })
                        .collect()
                };
                let (x, y, z) = (line(), line(), line());
                if !assoc_on(&x, &y, &z)? {
                    ok = false;
                    break;
                }
            }
            (ok, format!("{ASSOCIATIVITY_LINES} random lines"))
        };
    Ok(AxiomReport {
        n,
        unit,
        commutative,
        associative,
        associativity_check,
        pass: unit && commutative && associative,
    })
}

#[cfg(test)]
mod tests;
