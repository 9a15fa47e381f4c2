//! Higher Hasse–Witt matrices of a Laurent polynomial and the congruences they satisfy.
//!
//! A [`HWContext`] fixes `f`, the prime, the Frobenius lift, the index set `J` and the
//! working precision. Every matrix it returns is indexed by `J` in lexicographic order.

mod limits;
mod report;
mod verify;

use std::collections::BTreeMap;
use std::sync::Mutex;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::laurent::{
    lattice_points, ExponentVector, LatticeMode, LaurentPoly, Polytope, PowerSweep,
};
use crate::ring::{
    is_prime, BaseRing, FrobeniusMap, Ring, RingDescriptor, RingElement, SquareMatrix, Valuation,
};

pub use limits::{cubic_connection_matrices, horizontal_frame, FrameFamily, CUBIC_DISCRIMINANT};
pub use report::CongruenceReport;
pub use verify::{verify_lemma31, TheoremPart};

/// Construction options for [`HWContext`].
#[derive(Clone, Debug)]
pub struct HWOptions {
    pub mode: LatticeMode,
    /// Working p-adic precision `K`; `None` computes exactly over the integers.
    pub precision: Option<u32>,
    /// Total-degree truncation `N` for parameter rings.
    pub trunc: Option<u32>,
    /// Images of the parameters under the Frobenius lift; `None` means `t -> t^p`.
    pub frobenius_images: Option<Vec<RingElement>>,
    pub budget: Budget,
}

impl Default for HWOptions {
    fn default() -> Self {
        HWOptions {
            mode: LatticeMode::Interior,
            precision: None,
            trunc: None,
            frobenius_images: None,
            budget: Budget::default(),
        }
    }
}

/// One level of the `delta` recursion together with its side checks.
#[derive(Clone, Debug)]
pub struct DeltaStep {
    pub level: u32,
    pub delta: LaurentPoly,
    pub valuation: Valuation,
    /// Support points outside `(p^s - 1)` times the Newton polytope of `f`.
    pub outside_polytope: usize,
}

#[derive(Default)]
struct Memo {
    betas: BTreeMap<u64, SquareMatrix>,
    sweep: Option<PowerSweep>,
    deltas: Vec<DeltaStep>,
    powers: BTreeMap<u64, LaurentPoly>,
}

pub struct HWContext {
    f: LaurentPoly,
    p: u64,
    sigma: FrobeniusMap,
    mode: LatticeMode,
    polytope: Polytope,
    j: Vec<ExponentVector>,
    precision: Option<u32>,
    trunc: Option<u32>,
    work: Ring,
    report: Ring,
    budget: Budget,
    memo: Mutex<Memo>,
}

fn convert(x: &RingElement, ring: &Ring) -> Result<RingElement> {
    x.reduce_to(ring).or_else(|_| x.lift_to(ring))
}

fn convert_poly(f: &LaurentPoly, ring: &Ring) -> Result<LaurentPoly> {
    f.reduce_to(ring).or_else(|_| f.lift_to(ring))
}

impl HWContext {
    pub fn new(f: &LaurentPoly, p: u64, opts: HWOptions) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        let src = f.ring();
        let precision = match (&src.base, opts.precision) {
            (BaseRing::Integers, k) => k,
            (BaseRing::ModPk { p: q, k }, want) => {
                if *q != p {
                    return Err(Error::RingMismatch(format!(
                        "coefficients mod {q}, prime {p}"
                    )));
                }
                match want {
                    Some(w) if w > *k => {
                        return Err(Error::PrecisionTooLow {
                            needed: w,
                            available: *k,
                        })
                    }
                    Some(w) => Some(w),
                    None => Some(*k),
                }
            }
        };
        if precision == Some(0) {
            return Err(Error::InvalidArgument(
                "precision must be at least 1".into(),
            ));
        }
        let trunc = opts.trunc.or(src.trunc);
        if trunc.is_some() && src.is_scalar() {
            return Err(Error::InvalidArgument(
                "truncation needs a parameter ring".into(),
            ));
        }
        let base = match precision {
            Some(k) => BaseRing::ModPk { p, k },
            None => BaseRing::Integers,
        };
        let work = RingDescriptor::new(base.clone(), src.params.clone(), trunc.map(|n| n + 1))?;
        let report = RingDescriptor::new(base, src.params.clone(), trunc)?;
        let fw = convert_poly(f, &work)?;
        let sigma = match &opts.frobenius_images {
            None => FrobeniusMap::standard(&work, p),
            Some(ims) => FrobeniusMap::substitution(
                &work,
                p,
                ims.iter()
                    .map(|e| convert(e, &work))
                    .collect::<Result<Vec<_>>>()?,
            )?,
        };
        let polytope = f.newton_polytope()?;
        let j = lattice_points(&polytope, opts.mode);
        if j.is_empty() {
            return Err(Error::EmptyJ);
        }
        Ok(HWContext {
            f: fw,
            p,
            sigma,
            mode: opts.mode,
            polytope,
            j,
            precision,
            trunc,
            work,
            report,
            budget: opts.budget,
            memo: Mutex::new(Memo::default()),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn f(&self) -> &LaurentPoly {
        &self.f
    }

    pub fn index_set(&self) -> &[ExponentVector] {
        &self.j
    }

    pub fn g(&self) -> usize {
        self.j.len()
    }

    pub fn mode(&self) -> LatticeMode {
        self.mode
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn precision(&self) -> Option<u32> {
        self.precision
    }

    pub fn trunc(&self) -> Option<u32> {
        self.trunc
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    /// Ring used internally: the reported ring with one extra degree of parameter precision.
    pub fn work_ring(&self) -> &Ring {
        &self.work
    }

    /// Ring of reported matrices.
    pub fn report_ring(&self) -> &Ring {
        &self.report
    }

    pub fn sigma(&self) -> &FrobeniusMap {
        &self.sigma
    }

    /// Whether the Hasse–Witt polytope is lower-dimensional (J is then the relative interior).
    pub fn is_deficient(&self) -> bool {
        !self.polytope.is_full_dimensional()
    }

    fn identity(&self) -> SquareMatrix {
        SquareMatrix::identity(&self.work, self.g()).with_labels(self.j.clone())
    }

    pub(crate) fn to_report(&self, m: &SquareMatrix) -> Result<SquareMatrix> {
        m.reduce_to(&self.report)
    }

    fn entry_targets(&self, m: u64) -> Result<Vec<Vec<i64>>> {
        let mi =
            i64::try_from(m).map_err(|_| Error::InvalidArgument(format!("index {m} too large")))?;
        let mut out = Vec::with_capacity(self.g() * self.g());
        for u in &self.j {
            for v in &self.j {
                let w: Option<Vec<i64>> =
                    u.0.iter()
                        .zip(&v.0)
                        .map(|(a, b)| b.checked_mul(mi).and_then(|x| x.checked_sub(*a)))
                        .collect();
                out.push(w.ok_or_else(|| Error::InvalidArgument(format!("index {m} too large")))?);
            }
        }
        Ok(out)
    }

    /// `beta_m` in the working ring.
    pub(crate) fn beta_work(&self, m: u64) -> Result<SquareMatrix> {
        Ok(self.betas_work(&[m])?.remove(0))
    }

    /// Several `beta_m` at once; requests are served in increasing order from one sweep.
    pub(crate) fn betas_work(&self, ms: &[u64]) -> Result<Vec<SquareMatrix>> {
        if ms.contains(&0) {
            return Err(Error::InvalidArgument("beta index must be positive".into()));
        }
        let mut memo = self.memo.lock().expect("memo lock");
        let mut todo: Vec<u64> = ms
            .iter()
            .copied()
            .filter(|m| !memo.betas.contains_key(m))
            .collect();
        todo.sort_unstable();
        todo.dedup();
        for m in todo {
            let mat = if m == 1 {
                self.identity()
            } else {
                let fresh = match &memo.sweep {
                    Some(s) => !s.can_serve(m - 1),
                    None => true,
                };
                if fresh {
                    memo.sweep = Some(PowerSweep::new(&self.f, &self.budget)?);
                }
                let sweep = memo.sweep.as_mut().expect("sweep");
                let targets = self.entry_targets(m)?;
                let entries = sweep.coeffs_of_power(m - 1, &targets)?;
                SquareMatrix::from_entries(&self.work, self.g(), entries)?
                    .with_labels(self.j.clone())
            };
            memo.betas.insert(m, mat);
        }
        Ok(ms.iter().map(|m| memo.betas[m].clone()).collect())
    }

    fn p_pow(&self, s: u32) -> Result<u64> {
        self.p
            .checked_pow(s)
            .ok_or_else(|| Error::InvalidArgument(format!("{}^{s} overflows", self.p)))
    }

    pub(crate) fn alpha_work(&self, s: u32) -> Result<SquareMatrix> {
        self.beta_work(self.p_pow(s)?)
    }

    /// `beta_m`: coefficients of `x^(m v - u)` in `f^(m-1)`.
    pub fn beta_matrix(&self, m: u64) -> Result<SquareMatrix> {
        self.to_report(&self.beta_work(m)?)
    }

    /// `alpha_s = beta_(p^s)`.
    pub fn alpha_matrix(&self, s: u32) -> Result<SquareMatrix> {
        self.to_report(&self.alpha_work(s)?)
    }

    /// `alpha_1` reduced modulo p, with its invertibility over `R/pR`.
    ///
    /// Over parameter rings invertibility is in the power-series sense: the determinant
    /// has a unit constant term.
    pub fn hasse_witt(&self) -> Result<(SquareMatrix, bool)> {
        let a1 = self.alpha_work(1)?;
        let ring_p = RingDescriptor::new(
            BaseRing::ModPk { p: self.p, k: 1 },
            self.work.params.clone(),
            self.trunc,
        )?;
        let hw = a1.reduce_to(&ring_p)?;
        let c0 = hw.det().constant_term();
        let unit = !c0.is_zero_mod(self.p);
        Ok((hw, unit))
    }

    /// Fails with [`Error::NotInvertibleModP`] unless the Hasse-Witt matrix is invertible.
    pub fn require_invertible(&self) -> Result<()> {
        let (hw, unit) = self.hasse_witt()?;
        if unit {
            Ok(())
        } else {
            Err(Error::NotInvertibleModP(format!(
                "Hasse-Witt determinant {}",
                hw.det()
            )))
        }
    }

    pub(crate) fn require_precision(&self, e: u32) -> Result<()> {
        match self.precision {
            Some(k) if k >= e => Ok(()),
            Some(k) => Err(Error::PrecisionTooLow {
                needed: e,
                available: k,
            }),
            None => Err(Error::PrecisionTooLow {
                needed: e,
                available: 0,
            }),
        }
    }

    /// `f^(p^k - 1)` in the working ring.
    fn big_power(&self, k: u32) -> Result<LaurentPoly> {
        let e = self.p_pow(k)? - 1;
        if let Some(x) = self.memo.lock().expect("memo lock").powers.get(&e) {
            return Ok(x.clone());
        }
        let x = self.f.pow_reduced(e, &self.work, &self.budget)?;
        self.memo
            .lock()
            .expect("memo lock")
            .powers
            .insert(e, x.clone());
        Ok(x)
    }

    /// `delta_1 .. delta_S` from `f^(p^s-1) = sum_i delta_i * sigma^i(f^(p^(s-i)-1))`.
    ///
    /// Each level is checked for divisibility by `p^(s-1)` and for support inside
    /// `(p^s - 1)` times the Newton polytope; a violation is an error.
    pub fn delta_sequence(&self, levels: u32) -> Result<Vec<DeltaStep>> {
        if levels == 0 {
            return Err(Error::InvalidArgument("need at least one level".into()));
        }
        if let Some(k) = self.precision {
            if k < levels {
                return Err(Error::PrecisionTooLow {
                    needed: levels,
                    available: k,
                });
            }
        }
        loop {
            let have = self.memo.lock().expect("memo lock").deltas.len() as u32;
            if have >= levels {
                break;
            }
            let s = have + 1;
            let mut delta = self.big_power(s)?;
            {
                let prev: Vec<LaurentPoly> = self
                    .memo
                    .lock()
                    .expect("memo lock")
                    .deltas
                    .iter()
                    .map(|d| d.delta.clone())
                    .collect();
                for (i0, di) in prev.iter().enumerate() {
                    let i = i0 as u32 + 1;
                    let tail = self
                        .big_power(s - i)?
                        .frobenius_poly(&self.sigma, self.p, i)?;
                    delta = delta.sub(&di.mul_with_budget(&tail, &self.budget)?)?;
                }
            }
            let valuation = delta.valuation(self.p);
            let bound = self.polytope.dilate(self.p_pow(s)? as i64 - 1);
            let outside = delta
                .support()
                .iter()
                .filter(|u| !bound.contains(&u.0, false))
                .count();
            if !valuation.at_least(s as i64 - 1) {
                return Err(Error::CheckFailed(format!(
                    "delta_{s} has valuation {valuation}, expected at least {}",
                    s - 1
                )));
            }
            if outside > 0 {
                return Err(Error::CheckFailed(format!(
                    "delta_{s} has {outside} support points outside the dilated polytope"
                )));
            }
            self.memo.lock().expect("memo lock").deltas.push(DeltaStep {
                level: s,
                delta,
                valuation,
                outside_polytope: outside,
            });
        }
        Ok(self.memo.lock().expect("memo lock").deltas[..levels as usize].to_vec())
    }

    fn gammas_work(&self, levels: u32) -> Result<Vec<SquareMatrix>> {
        let deltas = self.delta_sequence(levels)?;
        let mut out = Vec::new();
        for d in deltas {
            let targets = self.entry_targets(self.p_pow(d.level)?)?;
            let entries = targets
                .iter()
                .map(|w| d.delta.coeff(w))
                .collect::<Result<Vec<_>>>()?;
            let gm = SquareMatrix::from_entries(&self.work, self.g(), entries)?
                .with_labels(self.j.clone());
            let v = gm.min_valuation(self.p);
            if !v.at_least(d.level as i64 - 1) {
                return Err(Error::CheckFailed(format!(
                    "gamma_{} has valuation {v}, expected at least {}",
                    d.level,
                    d.level - 1
                )));
            }
            out.push(gm);
        }
        Ok(out)
    }

    /// `gamma_s`: coefficients of `x^(p^s v - u)` in `delta_s`, for `s = 1..S`.
    pub fn gamma_matrices(&self, levels: u32) -> Result<Vec<SquareMatrix>> {
        self.gammas_work(levels)?
            .iter()
            .map(|m| self.to_report(m))
            .collect()
    }
}

trait ZeroMod {
    fn is_zero_mod(&self, p: u64) -> bool;
}

impl ZeroMod for num_bigint::BigInt {
    fn is_zero_mod(&self, p: u64) -> bool {
        use num_traits::Zero;
        (self % num_bigint::BigInt::from(p)).is_zero()
    }
}

#[cfg(test)]
mod tests;
