use serde::{Deserialize, Serialize};

use super::{CongruenceReport, HWContext};
use crate::error::{Error, Result};
use crate::ring::{DerivationMap, FrobeniusMap, RingElement, SquareMatrix, Valuation};

/// Which of the three congruences of the main theorem to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoremPart {
    /// `alpha_s = alpha_1 sigma(alpha_1) ... sigma^(s-1)(alpha_1) mod p`.
    I,
    /// `alpha_(s+1) sigma(alpha_s)^-1 = alpha_s sigma(alpha_(s-1))^-1 mod p^s`.
    II,
    /// `D(sigma^m(alpha_(s+1))) sigma^m(alpha_(s+1))^-1 = D(sigma^m(alpha_s)) sigma^m(alpha_s)^-1
    /// mod p^(s+m)`.
    III,
}

impl std::str::FromStr for TheoremPart {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(TheoremPart::I),
            "ii" | "2" => Ok(TheoremPart::II),
            "iii" | "3" => Ok(TheoremPart::III),
            _ => Err(Error::InvalidArgument(format!(
                "unknown theorem part `{s}`"
            ))),
        }
    }
}

impl HWContext {
    /// Difference valuation of two working-ring matrices, compared in the report ring.
    fn defect(&self, a: &SquareMatrix, b: &SquareMatrix) -> Result<Valuation> {
        let a = self.to_report(a)?;
        let b = self.to_report(b)?;
        a.defect_valuation(&b, self.p)
    }

    /// Everything an inverse needs: enough precision, a truncation for parameter rings,
    /// and an invertible Hasse–Witt matrix.
    pub(crate) fn require_inverse_ready(&self, e: u32) -> Result<()> {
        self.require_precision(e.max(1))?;
        if !self.work.is_scalar() && self.trunc.is_none() {
            return Err(Error::InvalidArgument(
                "inverses over parameter rings need a truncation degree".into(),
            ));
        }
        self.require_invertible()
    }

    /// `X_s = alpha_s sigma(alpha_(s-1))^-1` in the working ring.
    pub(crate) fn frobenius_quotient(&self, s: u32) -> Result<SquareMatrix> {
        let a = self.alpha_work(s)?;
        let b = self.alpha_work(s - 1)?.frobenius(&self.sigma, 1)?;
        a.mul(&b.inverse_mod_pk()?)
    }

    fn log_derivative(&self, d: &DerivationMap, s: u32, m: u32) -> Result<SquareMatrix> {
        let a = self.alpha_work(s)?.frobenius(&self.sigma, m)?;
        a.derive(d)?.mul(&a.inverse_mod_pk()?)
    }

    pub fn verify_theorem1(
        &self,
        part: TheoremPart,
        s_max: u32,
        m_max: u32,
        d: Option<&DerivationMap>,
    ) -> Result<Vec<CongruenceReport>> {
        let p = self.p;
        let mut out = Vec::new();
        match part {
            TheoremPart::I => {
                let a1 = self.alpha_work(1)?;
                let mut prod = a1.clone();
                for s in 1..=s_max {
                    if s > 1 {
                        prod = prod.mul(&a1.frobenius(&self.sigma, s - 1)?)?;
                    }
                    let v = self.defect(&self.alpha_work(s)?, &prod)?;
                    out.push(CongruenceReport::new("theorem1-i", p, Some(1), v).with("s", s));
                }
            }
            TheoremPart::II => {
                self.require_inverse_ready(s_max)?;
                let ps: Vec<u64> = (0..=s_max + 1)
                    .map(|s| self.p_pow(s))
                    .collect::<Result<_>>()?;
                self.betas_work(&ps)?;
                for s in 1..=s_max {
                    let v = self.defect(
                        &self.frobenius_quotient(s + 1)?,
                        &self.frobenius_quotient(s)?,
                    )?;
                    out.push(
                        CongruenceReport::new("theorem1-ii", p, Some(s as i64), v).with("s", s),
                    );
                }
            }
            TheoremPart::III => {
                let d =
                    d.ok_or_else(|| Error::InvalidArgument("part iii needs a derivation".into()))?;
                let d = d.transport(&self.work)?;
                self.require_inverse_ready(s_max + m_max)?;
                let ps: Vec<u64> = (0..=s_max + 1)
                    .map(|s| self.p_pow(s))
                    .collect::<Result<_>>()?;
                self.betas_work(&ps)?;
                for s in 0..=s_max {
                    for m in 0..=m_max {
                        let v = self.defect(
                            &self.log_derivative(&d, s + 1, m)?,
                            &self.log_derivative(&d, s, m)?,
                        )?;
                        out.push(
                            CongruenceReport::new("theorem1-iii", p, Some((s + m) as i64), v)
                                .with("s", s)
                                .with("m", m)
                                .with("D", derivation_text(&d)),
                        );
                    }
                }
            }
        }
        Ok(out)
    }

    /// Divisibility and support checks on `delta_s` and `gamma_s`.
    pub fn verify_lemma21(&self, levels: u32) -> Result<Vec<CongruenceReport>> {
        let p = self.p;
        let mut out = Vec::new();
        for d in self.delta_sequence(levels)? {
            let s = d.level;
            out.push(
                CongruenceReport::new("delta-divisibility", p, Some(s as i64 - 1), d.valuation)
                    .with("s", s),
            );
            let support = if d.outside_polytope == 0 {
                Valuation::Infinite
            } else {
                Valuation::Finite(0)
            };
            out.push(
                CongruenceReport::new("delta-support", p, None, support)
                    .with("s", s)
                    .with("outside", d.outside_polytope as u64),
            );
        }
        for (i, g) in self.gammas_work(levels)?.iter().enumerate() {
            let s = i as u32 + 1;
            out.push(
                CongruenceReport::new(
                    "gamma-divisibility",
                    p,
                    Some(s as i64 - 1),
                    g.min_valuation(p),
                )
                .with("s", s),
            );
        }
        Ok(out)
    }

    fn exactness(&self) -> Option<i64> {
        self.precision.map(|k| k as i64)
    }

    /// `alpha_s = sum_(i=1..s) gamma_i sigma^i(alpha_(s-i))`, an identity.
    pub fn verify_lemma23_ii(&self, levels: u32) -> Result<Vec<CongruenceReport>> {
        let gammas = self.gammas_work(levels)?;
        let mut out = Vec::new();
        for s in 1..=levels {
            let mut rhs = SquareMatrix::zero(&self.work, self.g());
            for i in 1..=s {
                let t = self.alpha_work(s - i)?.frobenius(&self.sigma, i)?;
                rhs = rhs.add(&gammas[i as usize - 1].mul(&t)?)?;
            }
            let v = self.defect(&self.alpha_work(s)?, &rhs)?;
            out.push(
                CongruenceReport::new("gamma-recursion", self.p, self.exactness(), v).with("s", s),
            );
        }
        Ok(out)
    }

    /// `beta_(m p^s) - sum_(i=1..s) gamma_i sigma^i(beta_(m p^(s-i)))` is divisible by `p^s`.
    pub fn verify_lemma23_iii(&self, ms: &[u64], s_max: u32) -> Result<Vec<CongruenceReport>> {
        if let Some(k) = self.precision {
            if k < s_max {
                return Err(Error::PrecisionTooLow {
                    needed: s_max,
                    available: k,
                });
            }
        }
        let gammas = self.gammas_work(s_max)?;
        let mut out = Vec::new();
        for &m in ms {
            if m == 0 {
                return Err(Error::InvalidArgument("m must be positive".into()));
            }
            let idx: Vec<u64> = (0..=s_max)
                .map(|s| Ok(m * self.p_pow(s)?))
                .collect::<Result<_>>()?;
            self.betas_work(&idx)?;
            for s in 1..=s_max {
                let mut acc = self.beta_work(idx[s as usize])?;
                for i in 1..=s {
                    let t = self
                        .beta_work(idx[(s - i) as usize])?
                        .frobenius(&self.sigma, i)?;
                    acc = acc.sub(&gammas[i as usize - 1].mul(&t)?)?;
                }
                let v = self.to_report(&acc)?.min_valuation(self.p);
                out.push(
                    CongruenceReport::new("beta-gamma-congruence", self.p, Some(s as i64), v)
                        .with("m", m)
                        .with("s", s),
                );
            }
        }
        Ok(out)
    }
}

fn derivation_text(d: &DerivationMap) -> String {
    let ring = d.ring();
    let parts: Vec<String> = d
        .coefficients()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| {
            let name = &ring.params[i];
            if c.is_one() {
                format!("d/d{name}")
            } else {
                format!("({c})*d/d{name}")
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// `D(sigma^m(a))` is divisible by `p^m` for each sample and each `m <= m_max`.
pub fn verify_lemma31(
    sigma: &FrobeniusMap,
    d: &DerivationMap,
    samples: &[RingElement],
    m_max: u32,
) -> Result<Vec<CongruenceReport>> {
    let mut out = Vec::new();
    for (k, a) in samples.iter().enumerate() {
        for m in 0..=m_max {
            let v = d.apply(&sigma.apply(a, m)?)?.valuation(sigma.p());
            out.push(
                CongruenceReport::new("derivation-frobenius", sigma.p(), Some(m as i64), v)
                    .with("sample", k as u64)
                    .with("m", m),
            );
        }
    }
    Ok(out)
}
