//! Dense box-shaped coefficient arrays for fast powering.
//!
//! Layout: parameter dimensions first (always starting at exponent 0, clipped by the
//! ring's truncation degree), then the Laurent variables, shifted by the minimum
//! corner of the support. Coefficients are machine words modulo `p^K` when that fits,
//! otherwise big integers. Word arithmetic accumulates lazily and reduces only when
//! the next batch of products could overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{ExponentVector, LaurentPoly};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::ring::{Ring, RingElement};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum DenseKernel {
    /// Residues modulo a word-sized modulus.
    Word(u64),
    /// Exact integers.
    Exact,
    /// Residues modulo a large modulus, held as big integers.
    BigMod(BigInt),
}

impl DenseKernel {
    pub(crate) fn for_ring(ring: &Ring) -> Option<Self> {
        if let Some(m) = ring.small_modulus() {
            return Some(DenseKernel::Word(m));
        }
        match ring.modulus() {
            Some(m) => Some(DenseKernel::BigMod(m)),
            None => Some(DenseKernel::Exact),
        }
    }

    /// How many products of reduced residues can be added to a reduced residue
    /// without overflowing a `u64`; zero means every product needs a full reduction.
    fn word_headroom(m: u64) -> usize {
        let r = (m - 1) as u128;
        if r == 0 {
            return usize::MAX;
        }
        let h = (u64::MAX as u128 - r) / (r * r);
        h.min(usize::MAX as u128) as usize
    }
}

#[derive(Clone, Debug)]
enum Cells {
    Word(Vec<u64>),
    Big(Vec<BigInt>),
}

impl Cells {
    fn len(&self) -> usize {
        match self {
            Cells::Word(v) => v.len(),
            Cells::Big(v) => v.len(),
        }
    }
}

/// Coefficient of one cell, in the kernel's representation.
#[derive(Clone, Debug)]
enum Scalar {
    Word(u64),
    Big(BigInt),
}

/// One nonzero cell used as a multiplier.
#[derive(Clone, Debug)]
struct Term {
    pos: Vec<usize>,
    pdeg: u64,
    c: Scalar,
}

#[derive(Clone, Debug)]
pub(crate) struct DensePoly {
    kernel: DenseKernel,
    np: usize,
    /// Laurent variables plus a phantom one when the polynomial has none.
    nv: usize,
    phantom: bool,
    cap: Option<u32>,
    lo: Vec<i64>,
    ext: Vec<usize>,
    cells: Cells,
}

fn strides(ext: &[usize]) -> Vec<usize> {
    let mut s = vec![1; ext.len()];
    for k in (0..ext.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * ext[k + 1];
    }
    s
}

fn cells_of(ext: &[usize]) -> u128 {
    ext.iter().map(|&e| e as u128).product()
}

impl DensePoly {
    fn dims(&self) -> usize {
        self.np + self.nv
    }

    fn reduce_big(&self, c: &mut BigInt) {
        if let DenseKernel::BigMod(m) = &self.kernel {
            *c = c.mod_floor(m);
        }
    }

    /// Dense cell count of `a * b` (parameter dimensions clipped), if representable.
    pub(crate) fn product_cells(a: &LaurentPoly, b: &LaurentPoly) -> Option<u128> {
        let ba = a.exponent_box()?;
        let bb = b.exponent_box()?;
        let mut cells: u128 = 1;
        for (x, y) in ba.iter().zip(&bb) {
            cells = cells.checked_mul(((x.1 - x.0) + (y.1 - y.0) + 1) as u128)?;
        }
        let pa = param_extents(a);
        let pb = param_extents(b);
        let cap = a.ring().trunc;
        for (x, y) in pa.iter().zip(&pb) {
            let mut e = (x + y - 1) as u128;
            if let Some(n) = cap {
                e = e.min(n as u128 + 1);
            }
            cells = cells.checked_mul(e)?;
        }
        Some(cells)
    }

    pub(crate) fn from_poly(
        f: &LaurentPoly,
        kernel: &DenseKernel,
        budget: &Budget,
    ) -> Result<Self> {
        let ring = f.ring();
        let np = ring.nparams();
        let phantom = f.nvars() == 0;
        let nv = f.nvars().max(1);
        let mut lo = vec![0i64; np + nv];
        let mut ext = param_extents(f);
        match f.exponent_box() {
            Some(b) if !phantom => {
                for (k, (l, h)) in b.iter().enumerate() {
                    lo[np + k] = *l;
                    ext.push((h - l + 1) as usize);
                }
            }
            _ => ext.extend(std::iter::repeat_n(1, nv)),
        }
        budget.check_terms("dense polynomial cells", cells_of(&ext))?;
        let n = cells_of(&ext) as usize;
        let st = strides(&ext);
        let mut cells = match kernel {
            DenseKernel::Word(_) => Cells::Word(vec![0; n]),
            _ => Cells::Big(vec![BigInt::zero(); n]),
        };
        for (e, c) in f.terms() {
            let mut xoff = 0usize;
            if !phantom {
                for (k, &v) in e.0.iter().enumerate() {
                    xoff += (v - lo[np + k]) as usize * st[np + k];
                }
            }
            for (m, v) in c.terms() {
                let mut off = xoff;
                for (k, &d) in m.iter().enumerate() {
                    off += d as usize * st[k];
                }
                match &mut cells {
                    Cells::Word(w) => w[off] = v.to_u64().expect("canonical residue"),
                    Cells::Big(b) => b[off] = v.clone(),
                }
            }
        }
        Ok(DensePoly {
            kernel: kernel.clone(),
            np,
            nv,
            phantom,
            cap: ring.trunc,
            lo,
            ext,
            cells,
        })
    }

    fn one_like(&self) -> Self {
        let dims = self.dims();
        let cells = match self.kernel {
            DenseKernel::Word(m) => Cells::Word(vec![1 % m]),
            _ => Cells::Big(vec![BigInt::from(1)]),
        };
        DensePoly {
            kernel: self.kernel.clone(),
            np: self.np,
            nv: self.nv,
            phantom: self.phantom,
            cap: self.cap,
            lo: vec![0; dims],
            ext: vec![1; dims],
            cells,
        }
    }

    fn nonzero_terms(&self) -> Vec<Term> {
        let st = strides(&self.ext);
        let dims = self.dims();
        let mut out = Vec::new();
        let mut push = |idx: usize, c: Scalar| {
            let mut pos = vec![0usize; dims];
            let mut r = idx;
            for k in 0..dims {
                pos[k] = r / st[k];
                r %= st[k];
            }
            let pdeg = pos[..self.np].iter().map(|&d| d as u64).sum();
            out.push(Term { pos, pdeg, c });
        };
        match &self.cells {
            Cells::Word(v) => {
                for (i, &c) in v.iter().enumerate() {
                    if c != 0 {
                        push(i, Scalar::Word(c));
                    }
                }
            }
            Cells::Big(v) => {
                for (i, c) in v.iter().enumerate() {
                    if !c.is_zero() {
                        push(i, Scalar::Big(c.clone()));
                    }
                }
            }
        }
        out
    }

    pub(crate) fn nnz(&self) -> usize {
        match &self.cells {
            Cells::Word(v) => v.iter().filter(|&&c| c != 0).count(),
            Cells::Big(v) => v.iter().filter(|c| !c.is_zero()).count(),
        }
    }

    pub(crate) fn mul(&self, other: &DensePoly, budget: &Budget) -> Result<Self> {
        // the operand with fewer nonzero cells plays the multiplier
        let (a, b) = if self.nnz() >= other.nnz() {
            (self, other)
        } else {
            (other, self)
        };
        let terms = b.nonzero_terms();
        a.mul_terms(&b.lo, &b.ext, &terms, budget)
    }

    fn out_shape(&self, blo: &[i64], bext: &[usize]) -> (Vec<i64>, Vec<usize>) {
        let dims = self.dims();
        let mut lo = vec![0i64; dims];
        let mut ext = vec![0usize; dims];
        for k in 0..dims {
            lo[k] = self.lo[k] + blo[k];
            ext[k] = self.ext[k] + bext[k] - 1;
            if k < self.np {
                if let Some(n) = self.cap {
                    ext[k] = ext[k].min(n as usize + 1);
                }
            }
        }
        (lo, ext)
    }

    /// `self * B` where `B` is given by its nonzero cells positioned in a box
    /// with corner `blo` and extents `bext`.
    fn mul_terms(
        &self,
        blo: &[i64],
        bext: &[usize],
        terms: &[Term],
        budget: &Budget,
    ) -> Result<Self> {
        let (lo, ext) = self.out_shape(blo, bext);
        let ncells = cells_of(&ext);
        budget.check_terms("dense product cells", ncells)?;
        budget.check_work(
            "dense product multiply-adds",
            terms.len() as u128 * self.cells.len() as u128,
        )?;
        let dims = self.dims();
        let sto = strides(&ext);
        let sts = strides(&self.ext);
        let last = dims - 1;
        let row_len = self.ext[last];
        let rows = self.cells.len() / row_len.max(1);
        let cap = self.cap.map(|n| n as u64);
        let term_off: Vec<usize> = terms
            .iter()
            .map(|t| t.pos.iter().zip(&sto).map(|(p, s)| p * s).sum())
            .collect();

        // per source row: output offset and parameter degree
        let mut row_info = Vec::with_capacity(rows);
        let mut idx = vec![0usize; last];
        for _ in 0..rows {
            let mut out_off = 0;
            let mut pdeg = 0u64;
            for k in 0..last {
                out_off += idx[k] * sto[k];
                if k < self.np {
                    pdeg += idx[k] as u64;
                }
            }
            row_info.push((out_off, pdeg));
            for k in (0..last).rev() {
                idx[k] += 1;
                if idx[k] < self.ext[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        debug_assert_eq!(sts[last], 1);

        let cells = match (&self.cells, &self.kernel) {
            (Cells::Word(src), DenseKernel::Word(m)) => {
                let m = *m;
                let mut out = vec![0u64; ncells as usize];
                let headroom = DenseKernel::word_headroom(m);
                let mut pending = 0usize;
                for (t, toff) in terms.iter().zip(&term_off) {
                    let c = match t.c {
                        Scalar::Word(c) => c,
                        Scalar::Big(_) => unreachable!(),
                    };
                    if headroom > 0 && pending == headroom {
                        out.iter_mut().for_each(|v| *v %= m);
                        pending = 0;
                    }
                    for (r, &(roff, pdeg)) in row_info.iter().enumerate() {
                        if let Some(n) = cap {
                            if pdeg + t.pdeg > n {
                                continue;
                            }
                        }
                        let s = &src[r * row_len..(r + 1) * row_len];
                        let d = &mut out[roff + toff..roff + toff + row_len];
                        if headroom > 0 {
                            for (o, &v) in d.iter_mut().zip(s) {
                                *o += c * v;
                            }
                        } else {
                            for (o, &v) in d.iter_mut().zip(s) {
                                *o = ((*o as u128 + c as u128 * v as u128) % m as u128) as u64;
                            }
                        }
                    }
                    pending += 1;
                }
                out.iter_mut().for_each(|v| *v %= m);
                Cells::Word(out)
            }
            (Cells::Big(src), _) => {
                let mut out = vec![BigInt::zero(); ncells as usize];
                for (t, toff) in terms.iter().zip(&term_off) {
                    let c = match &t.c {
                        Scalar::Big(c) => c,
                        Scalar::Word(_) => unreachable!(),
                    };
                    for (r, &(roff, pdeg)) in row_info.iter().enumerate() {
                        if let Some(n) = cap {
                            if pdeg + t.pdeg > n {
                                continue;
                            }
                        }
                        let s = &src[r * row_len..(r + 1) * row_len];
                        let d = &mut out[roff + toff..roff + toff + row_len];
                        for (o, v) in d.iter_mut().zip(s) {
                            if !v.is_zero() {
                                *o += c * v;
                            }
                        }
                    }
                }
                if let DenseKernel::BigMod(m) = &self.kernel {
                    out.iter_mut().for_each(|v| *v = v.mod_floor(m));
                }
                Cells::Big(out)
            }
            _ => unreachable!("cell type follows kernel"),
        };
        Ok(DensePoly {
            kernel: self.kernel.clone(),
            np: self.np,
            nv: self.nv,
            phantom: self.phantom,
            cap: self.cap,
            lo,
            ext,
            cells,
        })
    }

    pub(crate) fn pow(&self, e: u64, budget: &Budget) -> Result<Self> {
        let mut acc: Option<DensePoly> = None;
        let mut sq = self.clone();
        let mut k = e;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq, budget)?,
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            sq = sq.mul(&sq, budget)?;
        }
        Ok(acc.unwrap_or_else(|| self.one_like()))
    }

    fn cell_big(&self, i: usize) -> BigInt {
        match &self.cells {
            Cells::Word(v) => BigInt::from(v[i]),
            Cells::Big(v) => v[i].clone(),
        }
    }

    fn cell_is_zero(&self, i: usize) -> bool {
        match &self.cells {
            Cells::Word(v) => v[i] == 0,
            Cells::Big(v) => v[i].is_zero(),
        }
    }

    pub(crate) fn to_poly(&self, ring: &Ring, vars: &[String]) -> Result<LaurentPoly> {
        let st = strides(&self.ext);
        let dims = self.dims();
        let np = self.np;
        let mut by_exp: std::collections::BTreeMap<ExponentVector, Vec<(Vec<u32>, BigInt)>> =
            Default::default();
        for i in 0..self.cells.len() {
            if self.cell_is_zero(i) {
                continue;
            }
            let mut r = i;
            let mut pos = vec![0usize; dims];
            for k in 0..dims {
                pos[k] = r / st[k];
                r %= st[k];
            }
            let mono: Vec<u32> = pos[..np].iter().map(|&d| d as u32).collect();
            let exp = if self.phantom {
                ExponentVector(Vec::new())
            } else {
                ExponentVector(
                    (0..self.nv)
                        .map(|k| self.lo[np + k] + pos[np + k] as i64)
                        .collect(),
                )
            };
            by_exp
                .entry(exp)
                .or_default()
                .push((mono, self.cell_big(i)));
        }
        let terms = by_exp
            .into_iter()
            .map(|(e, cs)| (e, RingElement::from_terms(ring, cs)));
        LaurentPoly::from_terms(ring, vars.to_vec(), terms)
    }

    /// Coefficient of `x^w` (Laurent variables only) as a parameter polynomial.
    pub(crate) fn coeff(&self, ring: &Ring, w: &[i64]) -> RingElement {
        let st = strides(&self.ext);
        let np = self.np;
        let mut xoff = 0usize;
        if !self.phantom {
            for (k, &v) in w.iter().enumerate() {
                let p = v - self.lo[np + k];
                if p < 0 || p as usize >= self.ext[np + k] {
                    return RingElement::zero(ring);
                }
                xoff += p as usize * st[np + k];
            }
        }
        let mut terms = Vec::new();
        for_each_param(&self.ext[..np], self.cap, |mono, off| {
            let i = xoff + off.iter().zip(&st).map(|(a, b)| a * b).sum::<usize>();
            if !self.cell_is_zero(i) {
                terms.push((mono.to_vec(), self.cell_big(i)));
            }
        });
        RingElement::from_terms(ring, terms)
    }

    /// Coefficient of `x^w` in `a * b` without forming the product.
    pub(crate) fn product_coeff(
        a: &DensePoly,
        b: &DensePoly,
        ring: &Ring,
        w: &[i64],
    ) -> RingElement {
        let np = a.np;
        let nv = a.nv;
        let sta = strides(&a.ext);
        let stb = strides(&b.ext);
        // target position relative to the two corners
        let mut wt = vec![0i64; nv];
        if !a.phantom {
            for k in 0..nv {
                wt[k] = w[k] - a.lo[np + k] - b.lo[np + k];
            }
        }
        // var index ranges: xa in [max(0, wt-(extb-1)), min(exta-1, wt)]
        let mut ranges = Vec::with_capacity(nv);
        for k in 0..nv {
            let ea = a.ext[np + k] as i64;
            let eb = b.ext[np + k] as i64;
            let lo = 0.max(wt[k] - (eb - 1));
            let hi = (ea - 1).min(wt[k]);
            if lo > hi {
                return RingElement::zero(ring);
            }
            ranges.push((lo, hi));
        }
        let mut out: std::collections::BTreeMap<Vec<u32>, BigInt> = Default::default();
        let cap = a.cap.map(|n| n as u64);
        let mut pa_list = Vec::new();
        for_each_param(&a.ext[..np], a.cap, |m, off| {
            pa_list.push((
                m.to_vec(),
                off.iter().zip(&sta).map(|(x, s)| x * s).sum::<usize>(),
            ))
        });
        let mut pb_list = Vec::new();
        for_each_param(&b.ext[..np], b.cap, |m, off| {
            pb_list.push((
                m.to_vec(),
                off.iter().zip(&stb).map(|(x, s)| x * s).sum::<usize>(),
            ))
        });
        for (ma, offa) in &pa_list {
            let da: u64 = ma.iter().map(|&d| d as u64).sum();
            for (mb, offb) in &pb_list {
                let db: u64 = mb.iter().map(|&d| d as u64).sum();
                if let Some(n) = cap {
                    if da + db > n {
                        continue;
                    }
                }
                let v = correlate(a, b, &sta, &stb, *offa, *offb, &ranges, &wt);
                if v.is_zero() {
                    continue;
                }
                let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                *out.entry(m).or_insert_with(BigInt::zero) += v;
            }
        }
        RingElement::from_terms(ring, out)
    }
}

/// `sum_x a[offa + x] * b[offb + (wt - x)]` over the var box.
#[allow(clippy::too_many_arguments)]
fn correlate(
    a: &DensePoly,
    b: &DensePoly,
    sta: &[usize],
    stb: &[usize],
    offa: usize,
    offb: usize,
    ranges: &[(i64, i64)],
    wt: &[i64],
) -> BigInt {
    let np = a.np;
    let nv = a.nv;
    let last = nv - 1;
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut total = BigInt::zero();
    let (l0, l1) = ranges[last];
    let mut word_acc: u128 = 0;
    let mut pending: u128 = 0;
    let word = match (&a.kernel, &a.cells, &b.cells) {
        (DenseKernel::Word(m), Cells::Word(va), Cells::Word(vb)) => Some((*m, va, vb)),
        _ => None,
    };
    let headroom: u128 = match word {
        Some((m, _, _)) => {
            let r = (m - 1).max(1) as u128;
            u128::MAX / (r * r) - 1
        }
        None => 0,
    };
    loop {
        let mut ra = offa;
        let mut rb = offb;
        for k in 0..last {
            ra += idx[k] as usize * sta[np + k];
            rb += (wt[k] - idx[k]) as usize * stb[np + k];
        }
        match word {
            Some((m, va, vb)) => {
                for j in l0..=l1 {
                    let x = va[ra + j as usize];
                    if x == 0 {
                        continue;
                    }
                    let y = vb[rb + (wt[last] - j) as usize];
                    word_acc += x as u128 * y as u128;
                    pending += 1;
                    if pending == headroom {
                        word_acc %= m as u128;
                        pending = 0;
                    }
                }
            }
            None => {
                let (va, vb) = match (&a.cells, &b.cells) {
                    (Cells::Big(va), Cells::Big(vb)) => (va, vb),
                    _ => unreachable!(),
                };
                for j in l0..=l1 {
                    let x = &va[ra + j as usize];
                    if x.is_zero() {
                        continue;
                    }
                    total += x * &vb[rb + (wt[last] - j) as usize];
                }
            }
        }
        // advance the outer indices
        let mut k = last;
        loop {
            if k == 0 {
                return finish(a, word, word_acc, total);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] <= ranges[k].1 {
                break;
            }
            idx[k] = ranges[k].0;
        }
    }
}

fn finish(
    a: &DensePoly,
    word: Option<(u64, &Vec<u64>, &Vec<u64>)>,
    acc: u128,
    mut total: BigInt,
) -> BigInt {
    match word {
        Some((m, _, _)) => BigInt::from((acc % m as u128) as u64),
        None => {
            a.reduce_big(&mut total);
            total
        }
    }
}

/// Visits every parameter position in the box `ext` within the degree cap.
fn for_each_param<F: FnMut(&[u32], &[usize])>(ext: &[usize], cap: Option<u32>, mut f: F) {
    let np = ext.len();
    if np == 0 {
        f(&[], &[]);
        return;
    }
    let mut pos = vec![0usize; np];
    let mut mono = vec![0u32; np];
    loop {
        let deg: u64 = pos.iter().map(|&d| d as u64).sum();
        if cap.is_none_or(|n| deg <= n as u64) {
            for k in 0..np {
                mono[k] = pos[k] as u32;
            }
            f(&mono, &pos);
        }
        let mut k = np;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            pos[k] += 1;
            if pos[k] < ext[k] {
                break;
            }
            pos[k] = 0;
        }
    }
}

fn param_extents(f: &LaurentPoly) -> Vec<usize> {
    let np = f.ring().nparams();
    let mut ext = vec![1usize; np];
    for c in f.terms().values() {
        for m in c.terms().keys() {
            for (k, &d) in m.iter().enumerate() {
                ext[k] = ext[k].max(d as usize + 1);
            }
        }
    }
    ext
}

/// Successive powers `f^0, f^1, ...` computed by repeated multiplication with `f`.
///
/// Each step costs `|supp f|` passes over the current power, far cheaper than
/// squaring once the power's box is large. The previous power is retained so a
/// coefficient of `f^(2a)` or `f^(2a-1)` can be read as a correlation of stored
/// powers (see [`PowerSweep::coeff_of_power`]).
pub struct PowerSweep {
    ring: Ring,
    vars: Vec<String>,
    base: DensePoly,
    terms: Vec<Term>,
    prev: Option<DensePoly>,
    cur: DensePoly,
    exp: u64,
    budget: Budget,
}

impl PowerSweep {
    /// `f` must already live in the working ring.
    pub fn new(f: &LaurentPoly, budget: &Budget) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let kernel = DenseKernel::for_ring(f.ring()).expect("dense kernel");
        let base = DensePoly::from_poly(f, &kernel, budget)?;
        let terms = base.nonzero_terms();
        let cur = base.one_like();
        Ok(PowerSweep {
            ring: f.ring().clone(),
            vars: f.vars().to_vec(),
            base,
            terms,
            prev: None,
            cur,
            exp: 0,
            budget: *budget,
        })
    }

    pub fn exponent(&self) -> u64 {
        self.exp
    }

    /// Estimated cells and multiply-adds to reach `f^e` from scratch.
    pub fn estimate(&self, e: u64) -> (u128, u128) {
        let mut cells: u128 = 1;
        for (k, &x) in self.base.ext.iter().enumerate() {
            let mut d = (x as u128 - 1) * e as u128 + 1;
            if k < self.base.np {
                if let Some(n) = self.base.cap {
                    d = d.min(n as u128 + 1);
                }
            }
            cells = cells.saturating_mul(d);
        }
        let work = cells
            .saturating_mul(self.terms.len() as u128)
            .saturating_mul(e as u128)
            / 2;
        (cells, work)
    }

    pub fn advance_to(&mut self, e: u64) -> Result<()> {
        if e < self.exp {
            return Err(Error::InvalidArgument(format!(
                "power sweep is at {}, cannot rewind to {e}",
                self.exp
            )));
        }
        if e > self.exp {
            let (cells, work) = self.estimate(e);
            self.budget.check_terms("power sweep cells", cells)?;
            self.budget.check_work("power sweep multiply-adds", work)?;
        }
        while self.exp < e {
            let next = self.cur.mul_terms(
                &self.base.lo,
                &self.base.ext,
                &self.terms,
                &Budget::default(),
            )?;
            self.prev = Some(std::mem::replace(&mut self.cur, next));
            self.exp += 1;
        }
        Ok(())
    }

    pub fn current(&self) -> Result<LaurentPoly> {
        self.cur.to_poly(&self.ring, &self.vars)
    }

    /// Coefficient of `x^w` in the current power.
    pub fn coeff(&self, w: &[i64]) -> RingElement {
        self.cur.coeff(&self.ring, w)
    }

    /// Coefficient of `x^w` in `f^n`, advancing the sweep only to `ceil(n/2)`.
    pub fn coeff_of_power(&mut self, n: u64, w: &[i64]) -> Result<RingElement> {
        if n == self.exp {
            return Ok(self.coeff(w));
        }
        if n + 1 == self.exp {
            let prev = self.prev.as_ref().expect("previous power retained");
            return Ok(prev.coeff(&self.ring, w));
        }
        if n == 1 {
            return Ok(self.base.coeff(&self.ring, w));
        }
        if n <= 2 {
            self.advance_to(n)?;
            return Ok(self.coeff(w));
        }
        let a = n.div_ceil(2);
        self.advance_to(a)?;
        let other = if n - a == a {
            &self.cur
        } else {
            self.prev.as_ref().expect("previous power retained")
        };
        Ok(DensePoly::product_coeff(&self.cur, other, &self.ring, w))
    }

    /// Whether [`Self::coeff_of_power`] can answer for `n` without rewinding.
    pub fn can_serve(&self, n: u64) -> bool {
        n == self.exp
            || n + 1 == self.exp
            || n == 1
            || (n <= 2 && n >= self.exp)
            || n.div_ceil(2) >= self.exp
    }

    /// Coefficients of `f^n` at several exponents; the correlations run in parallel.
    pub fn coeffs_of_power(&mut self, n: u64, ws: &[Vec<i64>]) -> Result<Vec<RingElement>> {
        use rayon::prelude::*;
        if n == 0 {
            return Ok(ws
                .iter()
                .map(|w| {
                    if w.iter().all(|&x| x == 0) {
                        RingElement::one(&self.ring)
                    } else {
                        RingElement::zero(&self.ring)
                    }
                })
                .collect());
        }
        if n <= 2 || n == self.exp || n + 1 == self.exp {
            return ws.iter().map(|w| self.coeff_of_power(n, w)).collect();
        }
        let a = n.div_ceil(2);
        self.advance_to(a)?;
        let other = if n - a == a {
            &self.cur
        } else {
            self.prev.as_ref().expect("previous power retained")
        };
        let cur = &self.cur;
        let ring = &self.ring;
        Ok(ws
            .par_iter()
            .map(|w| DensePoly::product_coeff(cur, other, ring, w))
            .collect())
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }
}
