use std::fmt;

use serde::Serialize;

use super::{BaseRing, DerivationMap, FrobeniusMap, Ring, RingElement, Valuation};
use crate::error::{Error, Result};
use crate::laurent::ExponentVector;

/// Square matrix over a [`Ring`], optionally labelled by lattice points.
#[derive(Clone, PartialEq, Eq)]
pub struct SquareMatrix {
    ring: Ring,
    n: usize,
    entries: Vec<RingElement>,
    labels: Option<Vec<ExponentVector>>,
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.n {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.n {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl SquareMatrix {
    pub fn from_entries(ring: &Ring, n: usize, entries: Vec<RingElement>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::SizeMismatch(format!(
                "{} entries for a {n}x{n} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|e| e.ring() != ring) {
            return Err(Error::RingMismatch("matrix entries".into()));
        }
        Ok(SquareMatrix {
            ring: ring.clone(),
            n,
            entries,
            labels: None,
        })
    }

    pub fn from_int_rows(ring: &Ring, rows: &[&[i64]]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::SizeMismatch("ragged rows".into()));
            }
            entries.extend(r.iter().map(|&v| RingElement::from_int(ring, v)));
        }
        Self::from_entries(ring, n, entries)
    }

    pub fn identity(ring: &Ring, n: usize) -> Self {
        let mut entries = vec![RingElement::zero(ring); n * n];
        for i in 0..n {
            entries[i * n + i] = RingElement::one(ring);
        }
        SquareMatrix {
            ring: ring.clone(),
            n,
            entries,
            labels: None,
        }
    }

    pub fn zero(ring: &Ring, n: usize) -> Self {
        SquareMatrix {
            ring: ring.clone(),
            n,
            entries: vec![RingElement::zero(ring); n * n],
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<ExponentVector>) -> Self {
        assert_eq!(labels.len(), self.n);
        self.labels = Some(labels);
        self
    }

    pub fn labels(&self) -> Option<&[ExponentVector]> {
        self.labels.as_deref()
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElement {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[RingElement] {
        &self.entries
    }

    fn check_compatible(&self, other: &SquareMatrix) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!(
                "{} vs {}",
                self.ring, other.ring
            )));
        }
        if self.n != other.n {
            return Err(Error::SizeMismatch(format!("{} vs {}", self.n, other.n)));
        }
        Ok(())
    }

    fn rebuild(&self, entries: Vec<RingElement>) -> Self {
        SquareMatrix {
            ring: self.ring.clone(),
            n: self.n,
            entries,
            labels: self.labels.clone(),
        }
    }

    pub fn mul(&self, other: &SquareMatrix) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = RingElement::zero(&self.ring);
                for k in 0..n {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = &acc + &(a * b);
                }
                out.push(acc);
            }
        }
        Ok(self.rebuild(out))
    }

    pub fn add(&self, other: &SquareMatrix) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.rebuild(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &SquareMatrix) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.rebuild(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }

    pub fn neg(&self) -> Self {
        self.map(|e| -e)
    }

    pub fn scale(&self, c: &RingElement) -> Self {
        self.map(|e| e * c)
    }

    pub fn map<F: Fn(&RingElement) -> RingElement>(&self, f: F) -> Self {
        self.rebuild(self.entries.iter().map(f).collect())
    }

    pub fn try_map<F: Fn(&RingElement) -> Result<RingElement>>(&self, f: F) -> Result<Self> {
        Ok(self.rebuild(self.entries.iter().map(f).collect::<Result<Vec<_>>>()?))
    }

    /// Entrywise `sigma^m`.
    pub fn frobenius(&self, sigma: &FrobeniusMap, m: u32) -> Result<Self> {
        self.try_map(|e| sigma.apply(e, m))
    }

    /// Entrywise derivation.
    pub fn derive(&self, d: &DerivationMap) -> Result<Self> {
        self.try_map(|e| d.apply(e))
    }

    pub fn reduce_to(&self, ring: &Ring) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.reduce_to(ring))
            .collect::<Result<Vec<_>>>()?;
        Ok(SquareMatrix {
            ring: ring.clone(),
            n: self.n,
            entries,
            labels: self.labels.clone(),
        })
    }

    pub fn truncate(&self, n: u32) -> Self {
        self.map(|e| e.truncate(n))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn pow(&self, e: u64) -> Result<Self> {
        let mut acc = Self::identity(&self.ring, self.n);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn trace(&self) -> RingElement {
        let mut acc = RingElement::zero(&self.ring);
        for i in 0..self.n {
            acc = &acc + self.get(i, i);
        }
        acc
    }

    /// Coefficients `c_0..c_n` of `det(x I - A) = c_0 x^n + c_1 x^(n-1) + ... + c_n`,
    /// computed division-free (Berkowitz), so they are valid over any of our rings.
    pub fn charpoly(&self) -> Vec<RingElement> {
        let ring = &self.ring;
        let n = self.n;
        if n == 0 {
            return vec![RingElement::one(ring)];
        }
        let mut c = vec![RingElement::one(ring), -self.get(0, 0)];
        for k in 1..n {
            // leading (k+1)x(k+1) block: [[M, col], [row, a_kk]]
            let a_kk = self.get(k, k);
            let col: Vec<RingElement> = (0..k).map(|i| self.get(i, k).clone()).collect();
            let row: Vec<RingElement> = (0..k).map(|j| self.get(k, j).clone()).collect();
            let mut toeplitz = Vec::with_capacity(k + 1);
            toeplitz.push(RingElement::one(ring));
            toeplitz.push(-a_kk);
            let mut v = col;
            for _ in 0..k {
                let mut rv = RingElement::zero(ring);
                for j in 0..k {
                    rv = &rv + &(&row[j] * &v[j]);
                }
                toeplitz.push(-&rv);
                if toeplitz.len() == k + 2 {
                    break;
                }
                let nv: Vec<RingElement> = (0..k)
                    .map(|i| {
                        let mut acc = RingElement::zero(ring);
                        for j in 0..k {
                            acc = &acc + &(self.get(i, j) * &v[j]);
                        }
                        acc
                    })
                    .collect();
                v = nv;
            }
            let mut next = Vec::with_capacity(k + 2);
            for i in 0..k + 2 {
                let mut acc = RingElement::zero(ring);
                for j in 0..=i.min(k) {
                    if i - j < toeplitz.len() {
                        acc = &acc + &(&toeplitz[i - j] * &c[j]);
                    }
                }
                next.push(acc);
            }
            c = next;
        }
        c
    }

    /// Coefficients of `det(1 - T A)` in increasing powers of `T`.
    pub fn reciprocal_charpoly(&self) -> Vec<RingElement> {
        self.charpoly()
    }

    pub fn det(&self) -> RingElement {
        let c = self.charpoly();
        let last = c[self.n].clone();
        if self.n.is_multiple_of(2) {
            last
        } else {
            -&last
        }
    }

    /// Minimum p-adic valuation of `self - other` over all entries.
    pub fn defect_valuation(&self, other: &SquareMatrix, p: u64) -> Result<Valuation> {
        let d = self.sub(other)?;
        Ok(d.min_valuation(p))
    }

    pub fn min_valuation(&self, p: u64) -> Valuation {
        self.entries
            .iter()
            .map(|e| e.valuation(p))
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    /// Inverse over `Z/p^K` (or a parameter ring over it): Gauss-Jordan elimination
    /// modulo `p`, then Newton lifting `X <- X (2I - A X)`.
    pub fn inverse_mod_pk(&self) -> Result<Self> {
        let (p, k) = match self.ring.base {
            BaseRing::ModPk { p, k } => (p, k),
            BaseRing::Integers => {
                return Err(Error::InvalidArgument(
                    "matrix inversion needs a Z/p^K base ring".into(),
                ))
            }
        };
        let ring_p = self.ring.with_base(BaseRing::ModPk { p, k: 1 })?;
        let a_p = self.reduce_to(&ring_p)?;
        let x_p = a_p.gauss_jordan_inverse()?;
        let mut x = x_p.lift_into(&self.ring)?;
        let two = RingElement::from_int(&self.ring, 2);
        let two_i = Self::identity(&self.ring, self.n).scale(&two);
        let mut reach = 1u32;
        while reach < k {
            let ax = self.mul(&x)?;
            x = x.mul(&two_i.sub(&ax)?)?;
            reach *= 2;
        }
        debug_assert!(self.mul(&x)?.entries == Self::identity(&self.ring, self.n).entries);
        Ok(x)
    }

    fn lift_into(&self, ring: &Ring) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.lift_to(ring))
            .collect::<Result<Vec<_>>>()?;
        Ok(SquareMatrix {
            ring: ring.clone(),
            n: self.n,
            entries,
            labels: self.labels.clone(),
        })
    }

    /// Gauss-Jordan over a local ring whose units are detected by `is_unit`.
    fn gauss_jordan_inverse(&self) -> Result<Self> {
        let n = self.n;
        let ring = &self.ring;
        let mut a: Vec<Vec<RingElement>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut inv: Vec<Vec<RingElement>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            RingElement::one(ring)
                        } else {
                            RingElement::zero(ring)
                        }
                    })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| a[r][col].is_unit()).ok_or_else(|| {
                Error::NotInvertibleModP(format!("no unit pivot in column {col} of {self}"))
            })?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let pinv = a[col][col].inverse_unit()?;
            for j in 0..n {
                a[col][j] = &a[col][j] * &pinv;
                inv[col][j] = &inv[col][j] * &pinv;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for j in 0..n {
                    let t = &factor * &a[col][j];
                    a[r][j] = &a[r][j] - &t;
                    let t = &factor * &inv[col][j];
                    inv[r][j] = &inv[r][j] - &t;
                }
            }
        }
        let entries = inv.into_iter().flatten().collect();
        Ok(SquareMatrix {
            ring: ring.clone(),
            n,
            entries,
            labels: self.labels.clone(),
        })
    }

    /// Whether the matrix is invertible modulo `p`.
    pub fn is_invertible_mod_p(&self) -> bool {
        let p = match self.ring.p() {
            Some(p) => p,
            None => return false,
        };
        let Ok(ring_p) = self.ring.with_base(BaseRing::ModPk { p, k: 1 }) else {
            return false;
        };
        self.reduce_to(&ring_p)
            .map(|m| m.det().is_unit())
            .unwrap_or(false)
    }

    /// Rows of canonical entry texts.
    pub fn to_text_rows(&self) -> Vec<Vec<String>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_text()).collect())
            .collect()
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            ring: self.ring.to_string(),
            labels: self
                .labels
                .as_ref()
                .map(|ls| ls.iter().map(|l| l.as_slice().to_vec()).collect()),
            rows: self.to_text_rows(),
        }
    }
}

/// Serialized matrix: entries in canonical text, rows/columns labelled by J.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct MatrixJson {
    pub ring: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<i64>>>,
    pub rows: Vec<Vec<String>>,
}

/// Integer matrix helper used by fixtures and tests.
pub fn int_matrix(ring: &Ring, rows: &[&[i64]]) -> SquareMatrix {
    SquareMatrix::from_int_rows(ring, rows).expect("square rows")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingDescriptor;

    #[test]
    fn small_products() {
        let r = RingDescriptor::mod_pk(5, 2).unwrap();
        let a = int_matrix(&r, &[&[1, 1], &[0, 1]]);
        let b = int_matrix(&r, &[&[1, 0], &[1, 1]]);
        assert_eq!(a.mul(&b).unwrap(), int_matrix(&r, &[&[2, 1], &[1, 1]]));
        let i = SquareMatrix::identity(&r, 2);
        assert_eq!(i.mul(&a).unwrap(), a);
    }

    #[test]
    fn mismatched_sizes_error() {
        let r = RingDescriptor::integers();
        let a = SquareMatrix::identity(&r, 2);
        let b = SquareMatrix::identity(&r, 3);
        assert!(matches!(a.mul(&b), Err(Error::SizeMismatch(_))));
    }

    #[test]
    fn charpoly_matches_cofactor_det() {
        let r = RingDescriptor::integers();
        let a = int_matrix(&r, &[&[2, -1, 3], &[0, 4, 1], &[5, 2, -2]]);
        // cofactor expansion along the first row: 2(-8 - 2) + (0 - 5) + 3(0 - 20)
        let det = -85;
        assert_eq!(a.det().to_i64(), Some(det));
        let c = a.charpoly();
        assert_eq!(c[1].to_i64(), Some(-(2 + 4 - 2)));
    }

    #[test]
    fn inverse_identity_and_singular() {
        let r = RingDescriptor::mod_pk(3, 4).unwrap();
        let i = SquareMatrix::identity(&r, 3);
        assert_eq!(i.inverse_mod_pk().unwrap(), i);
        let r3 = RingDescriptor::mod_pk(3, 1).unwrap();
        let s = int_matrix(&r3, &[&[1, 1], &[1, 1]]);
        assert!(matches!(
            s.inverse_mod_pk(),
            Err(Error::NotInvertibleModP(_))
        ));
    }

    #[test]
    fn inverse_needs_pivoting() {
        let r = RingDescriptor::mod_pk(7, 3).unwrap();
        let a = int_matrix(&r, &[&[7, 1, 0], &[1, 0, 2], &[3, 5, 1]]);
        let x = a.inverse_mod_pk().unwrap();
        assert_eq!(a.mul(&x).unwrap(), SquareMatrix::identity(&r, 3));
        assert_eq!(x.mul(&a).unwrap(), SquareMatrix::identity(&r, 3));
    }
}
