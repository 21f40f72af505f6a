//! Möbius transformations of the projective line over 𝔽_p, the transforms
//! `g_{m,n}` attached to the hyperbolae `h_{m,n}`, and the composition energy
//! `E(H)` of a family.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::sum_squares;
use crate::error::{Error, Result};
use crate::field::{PrimeContext, ProjPoint, Residue};
use crate::setlib::ResidueSet;
use crate::Limits;

/// `x ↦ (ax + b)/(cx + d)`, stored in canonical form: the first nonzero of
/// `(a, b, c, d)` is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mobius {
    ctx: PrimeContext,
    m: [Residue; 4],
}

impl Mobius {
    pub fn canonicalize(ctx: PrimeContext, a: Residue, b: Residue, c: Residue, d: Residue) -> Result<Self> {
        let m = [a, b, c, d].map(|x| ctx.reduce_u64(x as u64));
        if ctx.mul(m[0], m[3]) == ctx.mul(m[1], m[2]) {
            return Err(Error::SingularMatrix(m[0], m[1], m[2], m[3]));
        }
        let lead = *m.iter().find(|&&x| x != 0).expect("nonsingular matrix has a nonzero entry");
        let s = ctx.inv(lead)?;
        Ok(Self { ctx, m: m.map(|x| ctx.mul(x, s)) })
    }

    pub fn identity(ctx: PrimeContext) -> Self {
        Self { ctx, m: [1, 0, 0, 1] }
    }

    /// `g_{m,n}(x) = (mx − (m² + n)/2)/(x − m)`.
    pub fn from_hyperbola(ctx: PrimeContext, m: Residue, n: Residue) -> Result<Self> {
        let f = ctx;
        let b = f.neg(f.half(f.add(f.square(m), n)));
        Self::canonicalize(f, m, b, 1, f.neg(m))
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn entries(&self) -> [Residue; 4] {
        self.m
    }

    /// Collision-free 128-bit key of the canonical matrix.
    pub fn key(&self) -> u128 {
        self.m.iter().fold(0u128, |acc, &x| (acc << 32) | x as u128)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        self.ctx.check_same(&other.ctx).expect("transforms over the same field");
        let f = self.ctx;
        let [a, b, c, d] = self.m;
        let [e, g, h, k] = other.m;
        Self::canonicalize(
            f,
            f.add(f.mul(a, e), f.mul(b, h)),
            f.add(f.mul(a, g), f.mul(b, k)),
            f.add(f.mul(c, e), f.mul(d, h)),
            f.add(f.mul(c, g), f.mul(d, k)),
        )
        .expect("product of nonsingular matrices")
    }

    pub fn inverse(&self) -> Mobius {
        let f = self.ctx;
        let [a, b, c, d] = self.m;
        Self::canonicalize(f, d, f.neg(b), f.neg(c), a).expect("adjugate of a nonsingular matrix")
    }

    pub fn apply(&self, x: ProjPoint) -> ProjPoint {
        let f = self.ctx;
        let [a, b, c, d] = self.m;
        match x {
            ProjPoint::Infinity if c == 0 => ProjPoint::Infinity,
            ProjPoint::Infinity => ProjPoint::Finite(f.mul(a, f.inv(c).expect("c ≠ 0"))),
            ProjPoint::Finite(x) => {
                let den = f.add(f.mul(c, x), d);
                if den == 0 {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(f.mul(f.add(f.mul(a, x), b), f.inv(den).expect("den ≠ 0")))
                }
            }
        }
    }

    /// `#{(a₁, a₂) ∈ A² : g(a₁) = a₂}`.
    pub fn richness(&self, a: &ResidueSet) -> u64 {
        let member = a.membership();
        a.iter()
            .filter(|&x| matches!(self.apply(ProjPoint::Finite(x)), ProjPoint::Finite(y) if member.contains(y)))
            .count() as u64
    }
}

impl fmt::Display for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.m;
        write!(f, "({a} {b}; {c} {d})")
    }
}

/// Distinct transforms, optionally tagged with the `(m, n)` they came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformFamily {
    members: Vec<Mobius>,
    tags: Option<Vec<(Residue, Residue)>>,
}

impl TransformFamily {
    /// Keeps the first occurrence of each canonical transform.
    pub fn new(members: impl IntoIterator<Item = Mobius>) -> Self {
        let mut seen = HashSet::new();
        let members = members.into_iter().filter(|g| seen.insert(*g)).collect();
        Self { members, tags: None }
    }

    /// `{g_{m,n} : (m, n) ∈ points}`.
    pub fn from_hyperbolae(ctx: PrimeContext, points: &[(Residue, Residue)]) -> Result<Self> {
        let mut seen = HashSet::new();
        let (mut members, mut tags) = (Vec::new(), Vec::new());
        for &(m, n) in points {
            let g = Mobius::from_hyperbola(ctx, m, n)?;
            if seen.insert(g) {
                members.push(g);
                tags.push((m, n));
            }
        }
        Ok(Self { members, tags: Some(tags) })
    }

    pub fn members(&self) -> &[Mobius] {
        &self.members
    }

    pub fn tags(&self) -> Option<&[(Residue, Residue)]> {
        self.tags.as_deref()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EhAlgorithm {
    Brute,
    Hash,
}

/// Which quotient the energy is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quotient {
    /// `h₁⁻¹ ∘ h₂`.
    Left,
    /// `h₁ ∘ h₂⁻¹`.
    Right,
}

fn quotient(q: Quotient, h1: &Mobius, h2: &Mobius) -> Mobius {
    match q {
        Quotient::Left => h1.inverse().compose(h2),
        Quotient::Right => h1.compose(&h2.inverse()),
    }
}

/// `q(g) = #{(h₁, h₂) ∈ H² : g = h₁⁻¹ ∘ h₂}` (or `h₁ ∘ h₂⁻¹`), keyed by [`Mobius::key`].
pub fn quotient_counts(h: &TransformFamily, q: Quotient, limits: &Limits) -> Result<HashMap<u128, u64>> {
    let n = h.len() as u128;
    limits.check("E(H) pairs", n * n, limits.sparse_entries)?;
    let inverses: Vec<Mobius> = h.members.iter().map(Mobius::inverse).collect();
    Ok(h.members
        .par_iter()
        .enumerate()
        .fold(HashMap::new, |mut acc, (i, h1)| {
            for (j, h2) in h.members.iter().enumerate() {
                let g = match q {
                    Quotient::Left => inverses[i].compose(h2),
                    Quotient::Right => h1.compose(&inverses[j]),
                };
                *acc.entry(g.key()).or_insert(0u64) += 1;
            }
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
        }))
}

/// `E(H) = |{h₁⁻¹ ∘ h₂ = h₃⁻¹ ∘ h₄}|`.
pub fn energy_eh(h: &TransformFamily, algo: EhAlgorithm, limits: &Limits) -> Result<BigUint> {
    energy_eh_with(h, algo, Quotient::Left, limits)
}

pub fn energy_eh_with(h: &TransformFamily, algo: EhAlgorithm, q: Quotient, limits: &Limits) -> Result<BigUint> {
    match algo {
        EhAlgorithm::Hash => Ok(sum_squares(quotient_counts(h, q, limits)?.into_values())),
        EhAlgorithm::Brute => {
            let n = h.len();
            limits.check("brute E(H)", (n as u128).pow(4), limits.brute_ops)?;
            let table: Vec<u128> = (0..n * n)
                .map(|ij| quotient(q, &h.members[ij / n], &h.members[ij % n]).key())
                .collect();
            let count: u64 = table
                .par_iter()
                .map(|&x| table.iter().filter(|&&y| y == x).count() as u64)
                .sum();
            Ok(BigUint::from(count))
        }
    }
}

/// One dyadic level of a richness spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichnessRow {
    /// `k = 2^i`.
    pub k: u64,
    /// Members with richness at least `k`.
    pub count: u64,
    /// `count / (|A|⁷ k⁻⁵)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichnessSpectrum {
    /// Exact histogram: richness value to number of members.
    pub histogram: BTreeMap<u64, u64>,
    pub rows: Vec<RichnessRow>,
}

pub fn richness_spectrum(h: &TransformFamily, a: &ResidueSet) -> RichnessSpectrum {
    let mut histogram = BTreeMap::new();
    for g in h.members() {
        *histogram.entry(g.richness(a)).or_insert(0) += 1;
    }
    let max = histogram.keys().next_back().copied().unwrap_or(0);
    let a7 = (a.len() as f64).powi(7);
    let mut rows = Vec::new();
    let mut k = 1u64;
    while k <= max {
        let count: u64 = histogram.range(k..).map(|(_, &c)| c).sum();
        rows.push(RichnessRow { k, count, ratio: count as f64 / (a7 / (k as f64).powi(5)) });
        k *= 2;
    }
    RichnessSpectrum { histogram, rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    #[test]
    fn canonical_examples() {
        let f = ctx(7);
        assert_eq!(Mobius::canonicalize(f, 2, 4, 6, 2).unwrap().entries(), [1, 2, 3, 1]);
        assert_eq!(Mobius::canonicalize(f, 0, 3, 3, 0).unwrap().entries(), [0, 1, 1, 0]);
        assert_eq!(Mobius::canonicalize(f, 1, 2, 2, 4), Err(Error::SingularMatrix(1, 2, 2, 4)));
    }

    #[test]
    fn group_examples() {
        let f = ctx(7);
        let g = Mobius::canonicalize(f, 1, 2, 3, 1).unwrap();
        let id = Mobius::identity(f);
        assert_eq!(g.compose(&id), g);
        assert_eq!(g.compose(&g.inverse()), id);
        assert_eq!(g.apply(ProjPoint::Finite(2)), ProjPoint::Infinity);
        assert_eq!(g.apply(ProjPoint::Infinity), ProjPoint::Finite(5));
    }

    #[test]
    fn hyperbola_transform() {
        let f = ctx(7);
        let g = Mobius::from_hyperbola(f, 1, 2).unwrap();
        assert_eq!(g, Mobius::canonicalize(f, 1, 2, 1, 6).unwrap());
        assert!(matches!(Mobius::from_hyperbola(f, 1, 1), Err(Error::SingularMatrix(..))));
    }

    #[test]
    fn richness_examples() {
        let f = ctx(7);
        let a = ResidueSet::of(f, &[1, 2, 3]);
        assert_eq!(Mobius::identity(f).richness(&a), 3);
        assert_eq!(Mobius::canonicalize(f, 1, 1, 0, 1).unwrap().richness(&a), 2);
    }

    #[test]
    fn energy_examples() {
        let f = ctx(7);
        let lim = Limits::default();
        let one = TransformFamily::new([Mobius::identity(f)]);
        let pair = TransformFamily::new([Mobius::identity(f), Mobius::canonicalize(f, 6, 0, 0, 1).unwrap()]);
        for algo in [EhAlgorithm::Brute, EhAlgorithm::Hash] {
            assert_eq!(energy_eh(&one, algo, &lim).unwrap(), BigUint::from(1u32));
            assert_eq!(energy_eh(&pair, algo, &lim).unwrap(), BigUint::from(8u32));
        }
        let counts = quotient_counts(&pair, Quotient::Left, &lim).unwrap();
        assert_eq!(counts.values().sum::<u64>(), 4);
    }

    #[test]
    fn spectrum_of_identity() {
        let f = ctx(11);
        let a = ResidueSet::of(f, &[1, 4, 5, 9]);
        let s = richness_spectrum(&TransformFamily::new([Mobius::identity(f)]), &a);
        assert_eq!(s.histogram, BTreeMap::from([(4, 1)]));
        assert_eq!(s.rows.iter().map(|r| r.k).collect::<Vec<_>>(), vec![1, 2, 4]);
        assert!(s.rows.iter().all(|r| r.count == 1));
    }
}
