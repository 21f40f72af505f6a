//! Brute-force oracles shared by the integration tests. Nothing here calls the
//! library's counting code; everything is direct enumeration.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vmv::{PrimeContext, ResidueSet};

pub const SMALL_PRIMES: [u64; 21] = [11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

pub fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

pub fn inv(a: u64, p: u64) -> u64 {
    assert!(!a.is_multiple_of(p));
    powmod(a, p - 2, p)
}

/// Calls `f` on every `k`-tuple over `a`.
pub fn for_each_tuple(a: &[u64], k: usize, f: &mut impl FnMut(&[u64])) {
    let mut idx = vec![0usize; k];
    let mut buf: Vec<u64> = vec![a[0]; k];
    loop {
        for (b, &i) in buf.iter_mut().zip(&idx) {
            *b = a[i];
        }
        f(&buf);
        let mut pos = 0;
        loop {
            if pos == k {
                return;
            }
            idx[pos] += 1;
            if idx[pos] < a.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// `J_s(A)` by enumerating all `2s`-tuples.
pub fn brute_j(p: u64, a: &[u64], s: usize) -> u128 {
    let mut count = 0u128;
    for_each_tuple(a, 2 * s, &mut |t| {
        let (mut lin, mut quad) = (0u64, 0u64);
        for (i, &x) in t.iter().enumerate() {
            if i < s {
                lin += x;
                quad += x * x % p;
            } else {
                lin += p - x;
                quad += p - x * x % p;
            }
        }
        if lin % p == 0 && quad % p == 0 {
            count += 1;
        }
    });
    count
}

/// `K_s(A)`: `a₁² + … + a_s² = a_{s+1}² + … + a_{2s}²`.
pub fn brute_k(p: u64, a: &[u64], s: usize) -> u128 {
    let mut count = 0u128;
    for_each_tuple(a, 2 * s, &mut |t| {
        let q: u64 = t.iter().enumerate().map(|(i, &x)| if i < s { x * x % p } else { p - x * x % p }).sum();
        if q.is_multiple_of(p) {
            count += 1;
        }
    });
    count
}

/// `T(A)`: `a₁+a₂+a₃ = a₄+a₅+a₆` and `a₁a₂a₃ = a₄a₅a₆`.
pub fn brute_t(p: u64, a: &[u64]) -> u128 {
    let mut count = 0u128;
    for_each_tuple(a, 6, &mut |t| {
        let sum_l = (t[0] + t[1] + t[2]) % p;
        let sum_r = (t[3] + t[4] + t[5]) % p;
        let prod_l = t[0] * t[1] % p * t[2] % p;
        let prod_r = t[3] * t[4] % p * t[5] % p;
        if sum_l == sum_r && prod_l == prod_r {
            count += 1;
        }
    });
    count
}

/// `r(m, n)` over `2𝒜 − 𝒜` by enumerating triples.
pub fn brute_r3(p: u64, a: &[u64]) -> HashMap<(u64, u64), u64> {
    let mut r = HashMap::new();
    for_each_tuple(a, 3, &mut |t| {
        let m = (t[0] + t[1] + p - t[2]) % p;
        let n = (t[0] * t[0] + t[1] * t[1] + p * p - t[2] * t[2]) % p;
        *r.entry((m, n)).or_insert(0) += 1;
    });
    r
}

/// `|h_{m,n} ∩ A²|` with `h_{m,n}: (m−x)(m−y) = (m²−n)/2`.
pub fn hyperbola_count(p: u64, a: &[u64], m: u64, n: u64) -> u64 {
    let c = (m * m % p + p - n) % p * inv(2, p) % p;
    let mut count = 0;
    for &x in a {
        for &y in a {
            if (m + p - x) % p * ((m + p - y) % p) % p == c {
                count += 1;
            }
        }
    }
    count
}

/// `|s𝒜|`: distinct `(Σx, Σx²)` over `s`-tuples.
pub fn moment_sumset_size(p: u64, a: &[u64], s: usize) -> usize {
    let mut seen = BTreeSet::new();
    for_each_tuple(a, s, &mut |t| {
        let lin = t.iter().sum::<u64>() % p;
        let quad = t.iter().map(|x| x * x % p).sum::<u64>() % p;
        seen.insert((lin, quad));
    });
    seen.len()
}

/// `|kA − lA|` by enumeration.
pub fn signed_sumset_size(p: u64, a: &[u64], k: usize, l: usize) -> usize {
    let mut seen = BTreeSet::new();
    for_each_tuple(a, k + l, &mut |t| {
        let v = t.iter().enumerate().map(|(i, &x)| if i < k { x } else { p - x }).sum::<u64>() % p;
        seen.insert(v);
    });
    seen.len()
}

pub fn sumset_size(p: u64, a: &[u64], b: &[u64]) -> usize {
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x + y) % p)).collect::<BTreeSet<_>>().len()
}

/// Seeded instance generator.
pub struct Instances {
    rng: ChaCha8Rng,
}

impl Instances {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.rng.next_u64() % n
    }

    pub fn prime(&mut self) -> u64 {
        SMALL_PRIMES[self.below(SMALL_PRIMES.len() as u64) as usize]
    }

    /// Between 1 and `max` distinct residues mod `p`.
    pub fn subset(&mut self, p: u64, max: usize) -> Vec<u64> {
        let n = 1 + self.below(max.min(p as usize) as u64) as usize;
        let mut out = BTreeSet::new();
        while out.len() < n {
            out.insert(self.below(p));
        }
        out.into_iter().collect()
    }

    pub fn set(&mut self, max: usize) -> (u64, Vec<u64>, ResidueSet) {
        let p = self.prime();
        let a = self.subset(p, max);
        let set = residue_set(p, &a);
        (p, a, set)
    }
}

pub fn residue_set(p: u64, a: &[u64]) -> ResidueSet {
    let ctx = PrimeContext::new(p).unwrap();
    ResidueSet::from_residues(ctx, a.iter().map(|&x| x as u32), "explicit").unwrap()
}

/// A point `(x, y)` lies on the translate `{(t, t²)} + (a, b)` iff `y − b = (x − a)²`.
pub fn on_translate(p: u64, (x, y): (u64, u64), (a, b): (u64, u64)) -> bool {
    let d = (x + p - a) % p;
    (y + p - b) % p == d * d % p
}

/// Down-parabola `y = β − (x − α)²`.
pub fn on_down_parabola(p: u64, (x, y): (u64, u64), (alpha, beta): (u64, u64)) -> bool {
    let d = (x + p - alpha) % p;
    y == (beta + p - d * d % p) % p
}

/// Canonical `PGL₂` form: first nonzero entry scaled to 1.
pub fn canon(p: u64, m: [u64; 4]) -> [u64; 4] {
    let lead = *m.iter().find(|&&x| x % p != 0).expect("nonzero matrix");
    let s = inv(lead, p);
    m.map(|x| x * s % p)
}

pub fn matmul(p: u64, a: [u64; 4], b: [u64; 4]) -> [u64; 4] {
    canon(
        p,
        [
            (a[0] * b[0] + a[1] * b[2]) % p,
            (a[0] * b[1] + a[1] * b[3]) % p,
            (a[2] * b[0] + a[3] * b[2]) % p,
            (a[2] * b[1] + a[3] * b[3]) % p,
        ],
    )
}

pub fn matinv(p: u64, a: [u64; 4]) -> [u64; 4] {
    canon(p, [a[3], (p - a[1]) % p, (p - a[2]) % p, a[0]])
}

/// `x ↦ (ax + b)/(cx + d)` on `𝔽_p ∪ {∞}`, with `∞` encoded as `p`.
pub fn mobius_apply(p: u64, m: [u64; 4], x: u64) -> u64 {
    let [a, b, c, d] = m;
    if x == p {
        return if c == 0 { p } else { a * inv(c, p) % p };
    }
    let num = (a * x + b) % p;
    let den = (c * x + d) % p;
    if den == 0 {
        p
    } else {
        num * inv(den, p) % p
    }
}

/// `|{(h₁,h₂,h₃,h₄) : h₁⁻¹h₂ = h₃⁻¹h₄}|` by enumerating all quadruples.
pub fn brute_eh(p: u64, h: &[[u64; 4]]) -> u128 {
    let quotients: Vec<[u64; 4]> =
        h.iter().flat_map(|&a| h.iter().map(move |&b| matmul(p, matinv(p, a), b))).collect();
    let mut count = 0u128;
    for x in &quotients {
        for y in &quotients {
            if x == y {
                count += 1;
            }
        }
    }
    count
}

/// `F(x, y) = Σ_n 𝔞(n) e((xn + yn²)/p)` evaluated term by term.
pub fn direct_f(p: u64, w: &[(u64, f64)], x: u64, y: u64) -> (f64, f64) {
    let mut re = 0.0;
    let mut im = 0.0;
    for &(n, v) in w {
        let phase = (x * n + y * (n * n % p)) % p;
        let theta = std::f64::consts::TAU * phase as f64 / p as f64;
        re += v * theta.cos();
        im += v * theta.sin();
    }
    (re, im)
}

/// `Σ_{x,y} |F(x,y)|^q` by direct summation.
pub fn direct_power_sum(p: u64, w: &[(u64, f64)], q: i32) -> f64 {
    let mut total = 0.0;
    for x in 0..p {
        for y in 0..p {
            let (re, im) = direct_f(p, w, x, y);
            total += (re * re + im * im).powf(q as f64 / 2.0);
        }
    }
    total
}
