//! Small finite fields `F_(p^k)` with log/antilog tables.
//!
//! An element is encoded as the integer `c_0 + c_1 p + ... + c_(k-1) p^(k-1)` of its
//! coefficients in the power basis of the chosen modulus.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::is_prime;

/// Largest field for which tables are built.
pub const MAX_FIELD_SIZE: u64 = 1 << 22;

/// `F_p[x] / (modulus)` with the least irreducible monic modulus of degree `k`.
///
/// Monic polynomials of degree `k` are ordered by the integer encoding of their lower
/// coefficients, so the choice is deterministic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteFieldSpec {
    pub p: u64,
    pub k: u32,
    /// Coefficients in increasing degree, monic, length `k + 1`.
    pub modulus: Vec<u64>,
}

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let inv_lead = mod_pow(m[dm], p - 2, p);
    while r.len() > dm {
        let top = r.len() - 1;
        let c = r[top] * inv_lead % p;
        let shift = top - dm;
        for (i, mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
        }
        trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_rem(&out, m, p)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// `x^(p^e) mod m`.
fn frobenius_power(m: &[u64], p: u64, e: u32) -> Vec<u64> {
    let mut x = poly_rem(&[0, 1], m, p);
    for _ in 0..e {
        let mut acc = vec![1u64];
        let mut base = x.clone();
        let mut k = p;
        while k > 0 {
            if k & 1 == 1 {
                acc = poly_mulmod(&acc, &base, m, p);
            }
            base = poly_mulmod(&base, &base, m, p);
            k >>= 1;
        }
        x = acc;
    }
    x
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Rabin's test: `x^(p^k) = x mod m` and `gcd(x^(p^(k/r)) - x, m) = 1` for primes `r | k`.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let k = (m.len() - 1) as u32;
    if k == 1 {
        return true;
    }
    let x = poly_rem(&[0, 1], m, p);
    let sub_x = |mut a: Vec<u64>| {
        a.resize(a.len().max(2), 0);
        a[1] = (a[1] + p - 1) % p;
        trim(&mut a);
        a
    };
    if frobenius_power(m, p, k) != x {
        return false;
    }
    for r in prime_factors(k as u64) {
        let t = sub_x(frobenius_power(m, p, k / r as u32));
        if poly_gcd(&t, m, p).len() != 1 {
            return false;
        }
    }
    true
}

impl FiniteFieldSpec {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::InvalidArgument(
                "extension degree must be positive".into(),
            ));
        }
        let size = (p as u128)
            .checked_pow(k)
            .filter(|&q| q <= MAX_FIELD_SIZE as u128);
        if size.is_none() {
            return Err(Error::Budget {
                what: "finite field size",
                needed: (p as u128).saturating_pow(k),
                limit: MAX_FIELD_SIZE as u128,
            });
        }
        let count = p.pow(k);
        for code in 0..count {
            let mut m: Vec<u64> = Vec::with_capacity(k as usize + 1);
            let mut c = code;
            for _ in 0..k {
                m.push(c % p);
                c /= p;
            }
            m.push(1);
            if k > 1 && m[0] == 0 {
                continue;
            }
            if is_irreducible(&m, p) {
                return Ok(FiniteFieldSpec { p, k, modulus: m });
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.k)
    }

    /// The field of degree `m` over this one.
    pub fn extension(&self, m: u32) -> Result<Self> {
        Self::new(self.p, self.k * m)
    }
}

/// Arithmetic in a [`FiniteFieldSpec`].
pub struct Field {
    spec: FiniteFieldSpec,
    q: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl Field {
    pub fn new(spec: &FiniteFieldSpec) -> Self {
        let p = spec.p;
        let q = spec.q();
        let decode = |mut x: u64| {
            let mut v = Vec::with_capacity(spec.k as usize);
            for _ in 0..spec.k {
                v.push(x % p);
                x /= p;
            }
            trim(&mut v);
            v
        };
        let encode = |v: &[u64]| v.iter().rev().fold(0u64, |acc, d| acc * p + d);
        let mul_slow =
            |a: u64, b: u64| encode(&poly_mulmod(&decode(a), &decode(b), &spec.modulus, p));
        let order = q - 1;
        let factors = prime_factors(order);
        let pow_slow = |mut b: u64, mut e: u64| {
            let mut acc = 1u64;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul_slow(acc, b);
                }
                b = mul_slow(b, b);
                e >>= 1;
            }
            acc
        };
        let generator = (1..q)
            .find(|&g| factors.iter().all(|r| pow_slow(g, order / r) != 1))
            .expect("multiplicative group is cyclic");
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u64;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = x as u32;
            log[x as usize] = i as u32;
            x = mul_slow(x, generator);
        }
        Field {
            spec: spec.clone(),
            q: q as u32,
            exp,
            log,
        }
    }

    pub fn spec(&self) -> &FiniteFieldSpec {
        &self.spec
    }

    pub fn size(&self) -> u32 {
        self.q
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    /// The image of an integer in the prime field.
    pub fn from_int(&self, v: i64) -> u32 {
        v.rem_euclid(self.spec.p as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let p = self.spec.p as u32;
        if self.spec.k == 1 {
            return (a + b) % p;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.spec.k {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        let p = self.spec.p as u32;
        if self.spec.k == 1 {
            return (p - a % p) % p;
        }
        let mut a = a;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.spec.k {
            out += ((p - a % p) % p) * place;
            a /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    /// Discrete logarithm to the table generator; `a` must be nonzero.
    pub fn log(&self, a: u32) -> u32 {
        debug_assert!(a != 0);
        self.log[a as usize]
    }

    pub fn exp(&self, e: u64) -> u32 {
        self.exp[(e % (self.q as u64 - 1)) as usize]
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp(self.log(a) as u64 + self.log(b) as u64)
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.q as u64 - 1;
        Some(self.exp((n - self.log(a) as u64) % n))
    }

    /// Quadratic character: 0 at 0, 1 on nonzero squares, -1 otherwise. Odd `p` only.
    pub fn chi(&self, a: u32) -> i64 {
        if a == 0 {
            0
        } else if self.log(a).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}
