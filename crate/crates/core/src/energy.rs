//! Solution-counting energies: `J_s(A)`, `K_s(A)`, `T(A)`, the three-variable
//! representation function `r(m, n)` and the pruning of `2𝒜 − 𝒜`.

use std::collections::HashMap;
use std::fmt;
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{PrimeContext, Residue};
use crate::gridfn::{dyadic_partition, representation_function, DyadicDecomposition, GridFunction, Scale};
use crate::incidence::hyperbola_richness;
use crate::setlib::{pack, ResidueSet};
use crate::{ceil_root, Limits};

pub type Point = (Residue, Residue);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Auto,
    Brute,
    Mitm,
    Conv,
    Incidence,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::Brute => "brute",
            Algorithm::Mitm => "mitm",
            Algorithm::Conv => "conv",
            Algorithm::Incidence => "incidence",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Algorithm::Auto),
            "brute" => Ok(Algorithm::Brute),
            "mitm" => Ok(Algorithm::Mitm),
            "conv" => Ok(Algorithm::Conv),
            "incidence" => Ok(Algorithm::Incidence),
            other => Err(Error::InvalidArgument(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyResult {
    pub value: BigUint,
    pub algo: Algorithm,
    pub elapsed_ms: f64,
}

fn timed(algo: Algorithm, f: impl FnOnce() -> Result<BigUint>) -> Result<EnergyResult> {
    let start = Instant::now();
    let value = f()?;
    Ok(EnergyResult { value, algo, elapsed_ms: start.elapsed().as_secs_f64() * 1e3 })
}

fn pow_u128(base: usize, exp: usize) -> u128 {
    (base as u128).checked_pow(exp as u32).unwrap_or(u128::MAX)
}

fn check_s(s: usize) -> Result<()> {
    if s == 0 {
        Err(Error::InvalidArgument("s must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Brute force if `|A|^{2s}` fits the op cap, else meet-in-the-middle if
/// `|A|^s` fits the sparse cap, else convolution.
pub fn auto_algorithm(a_len: usize, s: usize, limits: &Limits) -> Algorithm {
    if pow_u128(a_len, 2 * s) <= limits.brute_ops as u128 {
        Algorithm::Brute
    } else if pow_u128(a_len, s) <= limits.sparse_entries as u128 {
        Algorithm::Mitm
    } else {
        Algorithm::Conv
    }
}

/// `J_s(A)`: the number of `2s`-tuples of `A` with equal sums and equal sums of squares.
pub fn j_energy(a: &ResidueSet, s: usize, algo: Algorithm, limits: &Limits) -> Result<EnergyResult> {
    check_s(s)?;
    let algo = match algo {
        Algorithm::Auto => auto_algorithm(a.len(), s, limits),
        other => other,
    };
    match algo {
        Algorithm::Brute => {
            limits.check("brute J_s", pow_u128(a.len(), 2 * s), limits.brute_ops)?;
            timed(algo, || Ok(BigUint::from(j_brute(a, s))))
        }
        Algorithm::Mitm => {
            limits.check("mitm J_s", pow_u128(a.len(), s), limits.sparse_entries)?;
            timed(algo, || Ok(sum_squares(s_fold_counts(a, s).into_values())))
        }
        Algorithm::Conv => timed(algo, || Ok(representation_function(a, s, limits)?.moment(2))),
        _ => Err(Error::UnsupportedAlgorithm { op: "j_energy", algo: algo.name() }),
    }
}

fn j_brute(a: &ResidueSet, s: usize) -> u64 {
    let f = a.ctx();
    let elems = a.elements();
    // Variables 0..s enter with sign +, s..2s with sign −.
    fn rec(f: PrimeContext, elems: &[Residue], s: usize, depth: usize, sum: Residue, sq: Residue) -> u64 {
        if depth == 2 * s {
            return (sum == 0 && sq == 0) as u64;
        }
        elems
            .iter()
            .map(|&x| {
                let (ns, nq) = if depth < s {
                    (f.add(sum, x), f.add(sq, f.square(x)))
                } else {
                    (f.sub(sum, x), f.sub(sq, f.square(x)))
                };
                rec(f, elems, s, depth + 1, ns, nq)
            })
            .sum()
    }
    elems.par_iter().map(|&x| rec(f, elems, s, 1, x, f.square(x))).sum()
}

/// `r_s` as a hash map keyed by the packed point `(Σa, Σa²)`, by enumerating `s`-tuples.
fn s_fold_counts(a: &ResidueSet, s: usize) -> HashMap<u64, u64> {
    let f = a.ctx();
    let elems = a.elements();
    fn rec(f: PrimeContext, elems: &[Residue], left: usize, sum: Residue, sq: Residue, out: &mut HashMap<u64, u64>) {
        if left == 0 {
            *out.entry(pack(sum, sq)).or_insert(0) += 1;
            return;
        }
        for &x in elems {
            rec(f, elems, left - 1, f.add(sum, x), f.add(sq, f.square(x)), out);
        }
    }
    elems
        .par_iter()
        .fold(HashMap::new, |mut acc, &x| {
            rec(f, elems, s - 1, x, f.square(x), &mut acc);
            acc
        })
        .reduce(HashMap::new, |mut a, mut b| {
            if a.len() < b.len() {
                std::mem::swap(&mut a, &mut b);
            }
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        })
}

/// `Σ c²`, exact.
pub(crate) fn sum_squares(values: impl IntoIterator<Item = u64>) -> BigUint {
    let mut fast: u128 = 0;
    let mut slow = BigUint::default();
    for c in values {
        let sq = c as u128 * c as u128;
        match fast.checked_add(sq) {
            Some(t) => fast = t,
            None => {
                slow += BigUint::from(fast);
                fast = sq;
            }
        }
    }
    slow + BigUint::from(fast)
}

/// Sparse cyclic convolution of two functions on `ℤ/p`.
fn convolve_1d(f: PrimeContext, x: &HashMap<Residue, u64>, y: &HashMap<Residue, u64>, limits: &Limits) -> Result<HashMap<Residue, u64>> {
    limits.check("1-D convolution", x.len() as u128 * y.len() as u128, limits.brute_ops)?;
    let mut out = HashMap::new();
    for (&u, &cu) in x {
        for (&v, &cv) in y {
            *out.entry(f.add(u, v)).or_insert(0) += cu * cv;
        }
    }
    Ok(out)
}

fn fold_1d(f: PrimeContext, base: &HashMap<Residue, u64>, s: usize, limits: &Limits) -> Result<HashMap<Residue, u64>> {
    let mut acc: HashMap<Residue, u64> = HashMap::from([(0, 1)]);
    for _ in 0..s {
        acc = convolve_1d(f, &acc, base, limits)?;
    }
    Ok(acc)
}

/// `K_s(A)`: `2s`-tuples with `a₁² + … + a_s² = a_{s+1}² + … + a_{2s}²`.
pub fn k_energy(a: &ResidueSet, s: usize, limits: &Limits) -> Result<EnergyResult> {
    check_s(s)?;
    let f = a.ctx();
    timed(Algorithm::Conv, || {
        let mut squares: HashMap<Residue, u64> = HashMap::new();
        for x in a.iter() {
            *squares.entry(f.square(x)).or_insert(0) += 1;
        }
        Ok(sum_squares(fold_1d(f, &squares, s, limits)?.into_values()))
    })
}

/// `r(m, n) = #{(a₁, a₂, a₃) ∈ A³ : a₁ + a₂ − a₃ = m, a₁² + a₂² − a₃² = n}`.
pub fn rep_r3(a: &ResidueSet, limits: &Limits) -> Result<GridFunction> {
    let r2 = representation_function(a, 2, limits)?;
    let r1 = GridFunction::indicator_grid(a);
    r2.cyclic_convolve(&r1.reflect(), limits)
}

/// The split of `2𝒜 − 𝒜` into the degenerate pieces `S₁, S₂, S₃`, the rest `S`,
/// and `S = U ∪ V` at the threshold `Δ = ⌈|A|^{8/9}⌉`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrunedPartition {
    pub delta: u64,
    /// `m = 0`.
    pub s1: Vec<Point>,
    /// `n = 0`.
    pub s2: Vec<Point>,
    /// `m² = n`.
    pub s3: Vec<Point>,
    pub s: Vec<Point>,
    /// `r(m, n) ≤ Δ`.
    pub u: Vec<Point>,
    pub v: Vec<Point>,
    /// `|h_{m,n} ∩ A²|` for every point of `V`, in the order of `v`.
    pub v_richness: Vec<u64>,
    /// Classes `2^{i−1}Δ < |h_{m,n} ∩ A²| ≤ 2^iΔ` of `V`.
    pub v_classes: DyadicDecomposition<Point>,
    /// `Σ_{S_i} r²` for `i = 1, 2, 3`.
    pub diagonal_sums: [BigUint; 3],
    pub u_sum: BigUint,
    pub v_sum: BigUint,
    /// `Σ_V |h_{m,n} ∩ A²|²`.
    pub v_hyperbola_sum: BigUint,
    /// `Σ r²` over all of `2𝒜 − 𝒜`, which is `J₃(A)`.
    pub total: BigUint,
}

/// `⌈|A|^{8/9}⌉`.
pub fn delta_threshold(a_len: usize) -> u64 {
    ceil_root(&BigUint::from(a_len).pow(8), 9)
}

pub fn prune_partition(a: &ResidueSet, limits: &Limits) -> Result<PrunedPartition> {
    let f = a.ctx();
    let r = rep_r3(a, limits)?;
    let delta = delta_threshold(a.len());
    let member = a.membership();
    let total = r.moment(2);
    let mut sets: [Vec<Point>; 3] = Default::default();
    let mut diag: [Vec<u64>; 3] = Default::default();
    let (mut s, mut u, mut v) = (Vec::new(), Vec::new(), Vec::new());
    let (mut u_vals, mut v_vals, mut v_richness) = (Vec::new(), Vec::new(), Vec::new());
    for ((m, n), c) in r.entries() {
        let pt = (m, n);
        let hits = [m == 0, n == 0, f.square(m) == n];
        for i in 0..3 {
            if hits[i] {
                sets[i].push(pt);
                diag[i].push(c);
            }
        }
        if hits.iter().any(|&h| h) {
            continue;
        }
        s.push(pt);
        if c <= delta {
            u.push(pt);
            u_vals.push(c);
        } else {
            v.push(pt);
            v_vals.push(c);
            v_richness.push(hyperbola_richness(f, m, n, a, &member));
        }
    }
    let v_classes = dyadic_partition(v.iter().copied().zip(v_richness.iter().copied()), Scale::integer(delta.max(1)));
    let [d1, d2, d3] = diag;
    let [s1, s2, s3] = sets;
    Ok(PrunedPartition {
        delta,
        s1,
        s2,
        s3,
        s,
        u,
        v_hyperbola_sum: sum_squares(v_richness.iter().copied()),
        v,
        v_richness,
        v_classes,
        diagonal_sums: [sum_squares(d1), sum_squares(d2), sum_squares(d3)],
        u_sum: sum_squares(u_vals),
        v_sum: sum_squares(v_vals),
        total,
    })
}

/// `T(A)`: 6-tuples with `a₁ + a₂ + a₃ = a₄ + a₅ + a₆` and `a₁a₂a₃ = a₄a₅a₆`.
pub fn t_energy(a: &ResidueSet, algo: Algorithm, limits: &Limits) -> Result<EnergyResult> {
    let algo = match algo {
        Algorithm::Auto if pow_u128(a.len(), 6) <= limits.brute_ops as u128 => Algorithm::Brute,
        Algorithm::Auto => Algorithm::Incidence,
        other => other,
    };
    match algo {
        Algorithm::Brute => {
            limits.check("brute T", pow_u128(a.len(), 6), limits.brute_ops)?;
            timed(algo, || Ok(BigUint::from(t_brute(a))))
        }
        Algorithm::Incidence => timed(algo, || t_incidence(a, limits)),
        _ => Err(Error::UnsupportedAlgorithm { op: "t_energy", algo: algo.name() }),
    }
}

fn t_brute(a: &ResidueSet) -> u64 {
    let f = a.ctx();
    let elems = a.elements();
    fn rec(f: PrimeContext, elems: &[Residue], depth: usize, sum: Residue, l: Residue, r: Residue) -> u64 {
        if depth == 6 {
            return (sum == 0 && l == r) as u64;
        }
        elems
            .iter()
            .map(|&x| {
                if depth < 3 {
                    rec(f, elems, depth + 1, f.add(sum, x), f.mul(l, x), r)
                } else {
                    rec(f, elems, depth + 1, f.sub(sum, x), l, f.mul(r, x))
                }
            })
            .sum()
    }
    elems.par_iter().map(|&x| rec(f, elems, 1, x, x, 1)).sum()
}

/// The incidence route. For `0 ∉ A`, `s(m, n)` counts lines `l_{u,v}` with
/// `(u, v) = (a₁ + a₂, (a₁a₂)⁻¹)` through `(m, n)` whose third coordinate
/// `m − u` lies in `A`, and `T(A) = Σ s(m, n)²`. Solutions containing a zero
/// are added back by splitting on the first zero position on each side.
fn t_incidence(a: &ResidueSet, limits: &Limits) -> Result<BigUint> {
    let f = a.ctx();
    if !a.contains(0) {
        return t_incidence_nonzero(a, limits);
    }
    let star = a.without(0);
    let mut total = t_incidence_nonzero(&star, limits)?;

    let ones = |set: &ResidueSet| -> HashMap<Residue, u64> { set.iter().map(|x| (x, 1)).collect() };
    let (full, nonzero) = (ones(a), ones(&star));
    // L_i(t): triples whose first zero sits at position i, with coordinate sum t.
    let mut zero_sums: HashMap<Residue, u64> = HashMap::new();
    for i in 0..3 {
        let before = fold_1d(f, &nonzero, i, limits)?;
        let after = fold_1d(f, &full, 2 - i, limits)?;
        for (t, c) in convolve_1d(f, &before, &after, limits)? {
            *zero_sums.entry(t).or_insert(0) += c;
        }
    }
    total += sum_squares(zero_sums.into_values());
    Ok(total)
}

fn t_incidence_nonzero(a: &ResidueSet, limits: &Limits) -> Result<BigUint> {
    let f = a.ctx();
    limits.check("incidence T", pow_u128(a.len(), 3), limits.brute_ops)?;
    let mut lines: HashMap<(Residue, Residue), u64> = HashMap::new();
    for a1 in a.iter() {
        for a2 in a.iter() {
            let v = f.inv(f.mul(a1, a2))?;
            *lines.entry((f.add(a1, a2), v)).or_insert(0) += 1;
        }
    }
    let v_inv: HashMap<Residue, Residue> = lines.keys().map(|&(_, v)| (v, f.inv(v).expect("v ≠ 0"))).collect();
    // The point of l_{u,v} with m − u = a₃ is (u + a₃, a₃ / v).
    let mut s: HashMap<u64, u64> = HashMap::new();
    for (&(u, v), &mult) in &lines {
        for a3 in a.iter() {
            let pt = (f.add(u, a3), f.mul(a3, v_inv[&v]));
            debug_assert_eq!(pt.0, f.add(f.mul(pt.1, v), u));
            *s.entry(pack(pt.0, pt.1)).or_insert(0) += mult;
        }
    }
    Ok(sum_squares(s.into_values()))
}
