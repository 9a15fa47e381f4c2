//! Degree-by-degree solver for `l(X) = rhs` when `l` has identity linear part.
//!
//! Writing `l(y) = y + sum_a c_a y^a`, the degree-`d` part of `X` is
//! `rhs_d - sum_a c_a (X^a)_d`, and `(X^a)_d` only involves parts of `X` below degree `d`.
//! With `Q` a common denominator of the `c_a` and of `rhs`, the degree-`d` part of `X^a`
//! has denominator dividing `Q^(d-|a|)`, so everything is kept as integer numerators over
//! known powers of `Q` and no gcds are taken until the end.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::SeriesTuple;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

/// Homogeneous pieces indexed by degree; each piece maps a packed exponent to a numerator.
type Parts = Vec<Vec<(u128, BigInt)>>;

struct Packing {
    radix: u128,
    nvars: usize,
}

impl Packing {
    fn new(nvars: usize, n: u32) -> Result<Self> {
        let radix = n as u128 + 1;
        let mut cap: u128 = 1;
        for _ in 0..nvars {
            cap = cap.checked_mul(radix).ok_or_else(|| {
                Error::InvalidArgument(format!("{nvars} variables to degree {n} is too many"))
            })?;
        }
        Ok(Packing { radix, nvars })
    }

    fn pack(&self, e: &[u32]) -> u128 {
        e.iter()
            .rev()
            .fold(0u128, |acc, &x| acc * self.radix + x as u128)
    }

    fn unpack(&self, mut k: u128) -> Vec<u32> {
        let mut e = Vec::with_capacity(self.nvars);
        for _ in 0..self.nvars {
            e.push((k % self.radix) as u32);
            k /= self.radix;
        }
        e
    }
}

fn degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

/// Product of two homogeneous pieces; keys add because no exponent can carry.
fn mul_parts(a: &[(u128, BigInt)], b: &[(u128, BigInt)], out: &mut HashMap<u128, BigInt>) {
    for (ka, xa) in a {
        for (kb, xb) in b {
            let v = xa * xb;
            out.entry(ka + kb).and_modify(|s| *s += &v).or_insert(v);
        }
    }
}

fn finish(map: HashMap<u128, BigInt>) -> Vec<(u128, BigInt)> {
    let mut v: Vec<(u128, BigInt)> = map.into_iter().filter(|(_, x)| !x.is_zero()).collect();
    v.sort_unstable_by_key(|(k, _)| *k);
    v
}

/// Checks that `l` is `tau + (terms of degree >= 2)` in each coordinate.
pub(super) fn check_identity_linear_part(l: &SeriesTuple) -> Result<()> {
    let g = l.g();
    if l.vars().len() != g {
        return Err(Error::SizeMismatch(format!(
            "{g} components in {} variables",
            l.vars().len()
        )));
    }
    for (u, c) in l.components().iter().enumerate() {
        for (e, x) in c.terms() {
            let d = degree(e);
            let ok = match d {
                0 => false,
                1 => *x == BigRational::from_integer((e[u] as i64).into()),
                _ => true,
            };
            if !ok {
                return Err(Error::InvalidArgument(format!(
                    "linear part of component {} is not the identity",
                    u + 1
                )));
            }
        }
        let mut e = vec![0; g];
        e[u] = 1;
        if c.coeff(&e) != BigRational::one() {
            return Err(Error::InvalidArgument(format!(
                "linear part of component {} is not the identity",
                u + 1
            )));
        }
    }
    Ok(())
}

/// Solves `l(X) = rhs` to total degree `n`. The tuple `rhs` lives in its own variables,
/// must have no constant term and an integral linear part.
pub(super) fn solve(
    l: &SeriesTuple,
    rhs: &SeriesTuple,
    n: u32,
    budget: &Budget,
) -> Result<SeriesTuple> {
    check_identity_linear_part(l)?;
    let g = l.g();
    if rhs.g() != g {
        return Err(Error::SizeMismatch(format!(
            "{} right-hand sides for {g} components",
            rhs.g()
        )));
    }
    let n = n.min(l.degree_bound()).min(rhs.degree_bound());
    let vars = rhs.vars().to_vec();
    let pk = Packing::new(vars.len(), n)?;

    // nonlinear coefficients per component, and the common denominator
    let mut q = BigInt::one();
    let mut nonlinear: Vec<Vec<(Vec<u32>, BigRational)>> = Vec::with_capacity(g);
    for c in l.components() {
        let terms: Vec<(Vec<u32>, BigRational)> = c
            .terms()
            .iter()
            .filter(|(e, _)| (2..=n).contains(&degree(e)))
            .map(|(e, x)| (e.clone(), x.clone()))
            .collect();
        for (_, x) in &terms {
            q = q.lcm(x.denom());
        }
        nonlinear.push(terms);
    }
    for c in rhs.components() {
        for (e, x) in c.terms() {
            match degree(e) {
                0 => {
                    return Err(Error::InvalidArgument(
                        "right-hand side has a constant term".into(),
                    ))
                }
                1 if !x.is_integer() => {
                    return Err(Error::InvalidArgument(
                        "right-hand side has a non-integral linear part".into(),
                    ))
                }
                _ => q = q.lcm(x.denom()),
            }
        }
    }
    let qpow: Vec<BigInt> = (0..=n)
        .map(|k| num_traits::pow(q.clone(), k as usize))
        .collect();

    // every monomial needed, closed under dropping one power of its last variable
    let mut needed: BTreeMap<Vec<u32>, ()> = BTreeMap::new();
    let mut stack: Vec<Vec<u32>> = nonlinear.iter().flatten().map(|(e, _)| e.clone()).collect();
    while let Some(e) = stack.pop() {
        if degree(&e) < 2 || needed.contains_key(&e) {
            continue;
        }
        let i = e.iter().rposition(|&x| x > 0).expect("nonconstant");
        let mut parent = e.clone();
        parent[i] -= 1;
        needed.insert(e, ());
        stack.push(parent);
    }
    let mut monos: Vec<Vec<u32>> = needed.into_keys().collect();
    monos.sort_by(|a, b| degree(a).cmp(&degree(b)).then(a.cmp(b)));
    let index: HashMap<Vec<u32>, usize> = monos
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), i))
        .collect();
    // (variable multiplied in, parent: Ok(monomial index) or Err(variable) for degree one)
    let recipe: Vec<(usize, std::result::Result<usize, usize>)> = monos
        .iter()
        .map(|e| {
            let i = e.iter().rposition(|&x| x > 0).expect("nonconstant");
            let mut parent = e.clone();
            parent[i] -= 1;
            let src = if degree(&parent) == 1 {
                Err(parent.iter().position(|&x| x > 0).expect("variable"))
            } else {
                Ok(index[&parent])
            };
            (i, src)
        })
        .collect();
    // integer multipliers c_a * Q^(|a|-1)
    let mults: Vec<Vec<(usize, BigInt)>> = nonlinear
        .iter()
        .map(|terms| {
            terms
                .iter()
                .map(|(e, x)| {
                    let k = degree(e) as usize;
                    (index[e], x.numer() * (&qpow[k - 1] / x.denom()))
                })
                .collect()
        })
        .collect();
    let rhs_parts: Vec<Vec<HashMap<u128, BigInt>>> = rhs
        .components()
        .iter()
        .map(|c| {
            let mut by_deg: Vec<HashMap<u128, BigInt>> = vec![HashMap::new(); n as usize + 1];
            for (e, x) in c.terms() {
                let d = degree(e) as usize;
                if d <= n as usize {
                    // x * Q^(d-1) is an integer since den(x) | Q and d >= 1
                    let num = x.numer() * (&qpow[d - 1] / x.denom());
                    by_deg[d].insert(pk.pack(e), num);
                }
            }
            by_deg
        })
        .collect();

    let mut xs: Vec<Parts> = vec![vec![Vec::new(); n as usize + 1]; g];
    for u in 0..g {
        xs[u][1] = finish(rhs_parts[u][1].clone());
    }
    let mut pw: Vec<Parts> = vec![vec![Vec::new(); n as usize + 1]; monos.len()];
    let mut work: u128 = 0;
    for d in 2..=n as usize {
        // pieces of every needed power at degree d, from lower-degree data only
        let fresh: Vec<(Vec<(u128, BigInt)>, u128)> = (0..monos.len())
            .into_par_iter()
            .map(|a| {
                let k = degree(&monos[a]) as usize;
                if k > d {
                    return (Vec::new(), 0);
                }
                let (var, src) = recipe[a];
                let mut acc = HashMap::new();
                let mut ops = 0u128;
                let lo = k - 1;
                for j in lo..d {
                    let left = match src {
                        Ok(b) => &pw[b][j],
                        Err(v) => &xs[v][j],
                    };
                    let right = &xs[var][d - j];
                    ops += (left.len() * right.len()) as u128;
                    mul_parts(left, right, &mut acc);
                }
                (finish(acc), ops)
            })
            .collect();
        for (a, (piece, ops)) in fresh.into_iter().enumerate() {
            work += ops;
            pw[a][d] = piece;
        }
        budget.check_work("series inversion", work)?;
        for u in 0..g {
            let mut acc = rhs_parts[u][d].clone();
            for (a, m) in &mults[u] {
                for (key, x) in &pw[*a][d] {
                    let v = m * x;
                    acc.entry(*key).and_modify(|s| *s -= &v).or_insert(-v);
                }
            }
            xs[u][d] = finish(acc);
        }
        let size: usize = xs.iter().map(|x| x[d].len()).sum();
        budget.check_terms("series inversion", size as u128)?;
    }

    let comps = xs
        .into_iter()
        .map(|parts| {
            let terms = parts.into_iter().enumerate().flat_map(|(d, piece)| {
                let den = if d == 0 {
                    BigInt::one()
                } else {
                    qpow[d - 1].clone()
                };
                let pk = &pk;
                piece
                    .into_iter()
                    .map(move |(k, x)| (pk.unpack(k), BigRational::new(x, den.clone())))
            });
            TruncatedSeries::from_terms(vars.clone(), n, terms.collect::<Vec<_>>())
        })
        .collect();
    SeriesTuple::new(comps)
}
