use super::{Ring, RingElement, Valuation};
use crate::error::{Error, Result};

/// A lift of the p-th power map.
///
/// The standard lift fixes scalars and sends every parameter `t_i` to `t_i^p`.
/// An explicit substitution can be supplied instead (used to test candidate lifts).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusMap {
    ring: Ring,
    p: u64,
    images: Option<Vec<RingElement>>,
}

impl FrobeniusMap {
    pub fn standard(ring: &Ring, p: u64) -> Self {
        FrobeniusMap {
            ring: ring.clone(),
            p,
            images: None,
        }
    }

    pub fn substitution(ring: &Ring, p: u64, images: Vec<RingElement>) -> Result<Self> {
        if images.len() != ring.nparams() {
            return Err(Error::SizeMismatch(format!(
                "{} images for {} parameters",
                images.len(),
                ring.nparams()
            )));
        }
        for im in &images {
            if im.ring() != ring {
                return Err(Error::RingMismatch("Frobenius image ring".into()));
            }
        }
        Ok(FrobeniusMap {
            ring: ring.clone(),
            p,
            images: Some(images),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_standard(&self) -> bool {
        self.images.is_none()
    }

    /// The same rule on another ring with identical parameters.
    pub fn transport(&self, ring: &Ring) -> Result<Self> {
        match &self.images {
            None => Ok(Self::standard(ring, self.p)),
            Some(ims) => {
                let ims = ims
                    .iter()
                    .map(|e| e.reduce_to(ring))
                    .collect::<Result<Vec<_>>>()?;
                Self::substitution(ring, self.p, ims)
            }
        }
    }

    /// `sigma^m(r)`.
    pub fn apply(&self, r: &RingElement, m: u32) -> Result<RingElement> {
        if r.ring() != &self.ring {
            return Err(Error::RingMismatch(format!(
                "element in {}, Frobenius on {}",
                r.ring(),
                self.ring
            )));
        }
        Ok(self.apply_unchecked(r, m))
    }

    pub(crate) fn apply_unchecked(&self, r: &RingElement, m: u32) -> RingElement {
        if m == 0 || r.ring().is_scalar() {
            return r.clone();
        }
        match &self.images {
            None => {
                let factor = self.p.checked_pow(m).unwrap_or(u64::MAX);
                r.scale_exponents(factor)
            }
            Some(ims) => {
                let mut x = r.clone();
                for _ in 0..m {
                    x = x.substitute(ims).expect("validated images");
                }
                x
            }
        }
    }
}

/// `sigma(r) - r^p` vanishes modulo p for every sample.
pub fn verify_frobenius_lift(sigma: &FrobeniusMap, samples: &[RingElement], p: u64) -> bool {
    samples.iter().all(|r| match sigma.apply(r, 1) {
        Ok(s) => (&s - &r.pow(p)).valuation(p).at_least(1),
        Err(_) => false,
    })
}

/// A derivation `sum_i c_i d/dt_i` of a parameter ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationMap {
    ring: Ring,
    coefficients: Vec<RingElement>,
}

impl DerivationMap {
    pub fn new(ring: &Ring, coefficients: Vec<RingElement>) -> Result<Self> {
        if coefficients.len() != ring.nparams() {
            return Err(Error::SizeMismatch(format!(
                "{} coefficients for {} parameters",
                coefficients.len(),
                ring.nparams()
            )));
        }
        if coefficients.iter().any(|c| c.ring() != ring) {
            return Err(Error::RingMismatch("derivation coefficient ring".into()));
        }
        Ok(DerivationMap {
            ring: ring.clone(),
            coefficients,
        })
    }

    pub fn zero(ring: &Ring) -> Self {
        DerivationMap {
            ring: ring.clone(),
            coefficients: vec![RingElement::zero(ring); ring.nparams()],
        }
    }

    /// `d/dt_i`.
    pub fn partial(ring: &Ring, i: usize) -> Result<Self> {
        if i >= ring.nparams() {
            return Err(Error::InvalidArgument(format!(
                "no parameter with index {i}"
            )));
        }
        let mut c = vec![RingElement::zero(ring); ring.nparams()];
        c[i] = RingElement::one(ring);
        Self::new(ring, c)
    }

    /// Parses `d/dname`.
    pub fn parse(ring: &Ring, text: &str) -> Result<Self> {
        let name = text.trim().strip_prefix("d/d").ok_or_else(|| {
            Error::InvalidArgument(format!("derivation `{text}` is not d/d<param>"))
        })?;
        let i = ring
            .param_index(name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown parameter `{name}`")))?;
        Self::partial(ring, i)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn coefficients(&self) -> &[RingElement] {
        &self.coefficients
    }

    /// Index `i` when this derivation is exactly `d/dt_i`.
    pub fn coordinate_index(&self) -> Option<usize> {
        let mut found = None;
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !c.is_one() || found.is_some() {
                return None;
            }
            found = Some(i);
        }
        found
    }

    pub fn transport(&self, ring: &Ring) -> Result<Self> {
        let c = self
            .coefficients
            .iter()
            .map(|e| e.reduce_to(ring).or_else(|_| e.lift_to(ring)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ring, c)
    }

    pub fn apply(&self, r: &RingElement) -> Result<RingElement> {
        if r.ring() != &self.ring {
            return Err(Error::RingMismatch(format!(
                "element in {}, derivation on {}",
                r.ring(),
                self.ring
            )));
        }
        Ok(self.apply_unchecked(r))
    }

    pub(crate) fn apply_unchecked(&self, r: &RingElement) -> RingElement {
        let mut out = RingElement::zero(r.ring());
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out = &out + &(c * &r.partial(i));
        }
        out
    }
}

/// `D(sigma^m(a))` has valuation at least `m`.
pub fn derivation_frobenius_valuation(
    sigma: &FrobeniusMap,
    d: &DerivationMap,
    a: &RingElement,
    m: u32,
) -> Result<Valuation> {
    let s = sigma.apply(a, m)?;
    Ok(d.apply(&s)?.valuation(sigma.p()))
}
