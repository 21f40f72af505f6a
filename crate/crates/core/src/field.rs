//! Arithmetic in 𝔽_p for an odd prime p < 2^31, and the projective line 𝔽_p ∪ {∞}.
//!
//! Residues are plain `u32` values kept fully reduced into `[0, p)`. Every
//! product of two residues fits in a `u64`, so no reduction tricks are needed.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of 𝔽_p, always stored in `[0, p)`.
pub type Residue = u32;

/// Largest supported modulus (exclusive).
pub const MAX_MODULUS: u64 = 1 << 31;

/// An odd prime modulus with its arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeContext {
    p: u32,
    inv2: u32,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if p >= MAX_MODULUS {
            return Err(Error::ModulusTooLarge(p));
        }
        if p < 2 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 {
            return Err(Error::EvenModulus(p));
        }
        let p = p as u32;
        Ok(Self { p, inv2: p.div_ceil(2) })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn p64(&self) -> u64 {
        self.p as u64
    }

    /// Reduce an arbitrary signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(&self, x: i64) -> Residue {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn reduce_u64(&self, x: u64) -> Residue {
        (x % self.p as u64) as u32
    }

    #[inline]
    pub fn add(&self, a: Residue, b: Residue) -> Residue {
        let s = a as u64 + b as u64;
        if s >= self.p as u64 {
            (s - self.p as u64) as u32
        } else {
            s as u32
        }
    }

    #[inline]
    pub fn sub(&self, a: Residue, b: Residue) -> Residue {
        if a >= b {
            a - b
        } else {
            a + (self.p - b)
        }
    }

    #[inline]
    pub fn neg(&self, a: Residue) -> Residue {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: Residue, b: Residue) -> Residue {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn square(&self, a: Residue) -> Residue {
        self.mul(a, a)
    }

    /// Multiply by the inverse of 2.
    #[inline]
    pub fn half(&self, a: Residue) -> Residue {
        self.mul(a, self.inv2)
    }

    pub fn pow(&self, base: Residue, mut exp: u64) -> Residue {
        let p = self.p as u64;
        let mut acc = 1 % p;
        let mut b = base as u64 % p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            exp >>= 1;
        }
        acc as u32
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(&self, a: Residue) -> Result<Residue> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::ZeroInverse(a));
        }
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce(t0))
    }

    /// Whether `a` is a nonzero square.
    pub fn is_nonzero_square(&self, a: Residue) -> bool {
        a != 0 && self.pow(a, (self.p as u64 - 1) / 2) == 1
    }

    /// Multiplicative order of a nonzero residue.
    pub fn order(&self, a: Residue) -> Result<u64> {
        if a.is_multiple_of(self.p) {
            return Err(Error::ZeroInverse(a));
        }
        let n = self.p as u64 - 1;
        let mut ord = n;
        for q in prime_factors(n) {
            while ord.is_multiple_of(q) && self.pow(a, ord / q) == 1 {
                ord /= q;
            }
        }
        Ok(ord)
    }

    pub fn check_same(&self, other: &PrimeContext) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::ContextMismatch(self.p, other.p))
        }
    }
}

impl TryFrom<u64> for PrimeContext {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        PrimeContext::new(p)
    }
}

impl From<PrimeContext> for u64 {
    fn from(ctx: PrimeContext) -> u64 {
        ctx.p as u64
    }
}

impl fmt::Display for PrimeContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

/// A point of the projective line 𝔽_p ∪ {∞}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjPoint {
    Finite(Residue),
    Infinity,
}

impl ProjPoint {
    pub fn finite(self) -> Option<Residue> {
        match self {
            ProjPoint::Finite(x) => Some(x),
            ProjPoint::Infinity => None,
        }
    }
}

impl From<Residue> for ProjPoint {
    fn from(x: Residue) -> Self {
        ProjPoint::Finite(x)
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
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
