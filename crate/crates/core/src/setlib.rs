//! Finite subsets of 𝔽_p: generation, the set file format, and sumset algebra.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigUint;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{PrimeContext, Residue};
use crate::Limits;

/// Above this modulus, sumsets are deduplicated by sorting instead of a bitmap.
const BITMAP_MAX_P: u32 = 1 << 24;

/// How a set is generated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SetKind {
    /// `{1, …, N}` reduced mod p.
    Interval,
    /// `N` distinct residues drawn uniformly without replacement.
    Random,
    /// The `N` smallest nonzero squares.
    QuadraticResidues,
    /// `{1, g, g², …, g^{N−1}}`.
    Geometric { base: Residue },
    Explicit { elements: Vec<u64> },
}

impl SetKind {
    pub fn name(&self) -> &'static str {
        match self {
            SetKind::Interval => "interval",
            SetKind::Random => "random",
            SetKind::QuadraticResidues => "quadratic-residues",
            SetKind::Geometric { .. } => "geometric",
            SetKind::Explicit { .. } => "explicit",
        }
    }
}

/// Generation descriptor: kind, size and seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSpec {
    #[serde(flatten)]
    pub kind: SetKind,
    pub n: u64,
    #[serde(default)]
    pub seed: u64,
}

impl SetSpec {
    pub fn interval(n: u64) -> Self {
        Self { kind: SetKind::Interval, n, seed: 0 }
    }

    pub fn random(n: u64, seed: u64) -> Self {
        Self { kind: SetKind::Random, n, seed }
    }

    pub fn quadratic_residues(n: u64) -> Self {
        Self { kind: SetKind::QuadraticResidues, n, seed: 0 }
    }

    pub fn geometric(n: u64, base: Residue) -> Self {
        Self { kind: SetKind::Geometric { base }, n, seed: 0 }
    }

    pub fn explicit(elements: Vec<u64>) -> Self {
        Self { n: elements.len() as u64, kind: SetKind::Explicit { elements }, seed: 0 }
    }

    /// The provenance string stored on the `kind=` line of a set file.
    pub fn provenance(&self) -> String {
        match &self.kind {
            SetKind::Interval | SetKind::QuadraticResidues | SetKind::Explicit { .. } => {
                format!("{};n={}", self.kind.name(), self.n)
            }
            SetKind::Random => format!("random;n={};seed={}", self.n, self.seed),
            SetKind::Geometric { base } => format!("geometric;n={};base={}", self.n, base),
        }
    }
}

/// A strictly sorted subset of 𝔽_p.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueSet {
    ctx: PrimeContext,
    elements: Vec<Residue>,
    provenance: String,
}

impl ResidueSet {
    /// Build from arbitrary residues; duplicates are merged.
    pub fn from_residues(
        ctx: PrimeContext,
        elements: impl IntoIterator<Item = Residue>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let mut v: Vec<Residue> = elements.into_iter().collect();
        if let Some(&bad) = v.iter().find(|&&x| x >= ctx.p()) {
            return Err(Error::InvalidSet(format!("residue {bad} is not below p={}", ctx.p())));
        }
        v.sort_unstable();
        v.dedup();
        let provenance = provenance.into();
        check_provenance(&provenance)?;
        Ok(Self { ctx, elements: v, provenance })
    }

    /// Convenience constructor for literal sets; panics on out-of-range input.
    pub fn of(ctx: PrimeContext, elements: &[Residue]) -> Self {
        Self::from_residues(ctx, elements.iter().copied(), "explicit")
            .expect("residues must lie in [0, p)")
    }

    pub fn empty(ctx: PrimeContext) -> Self {
        Self { ctx, elements: Vec::new(), provenance: "empty".into() }
    }

    /// The whole field.
    pub fn full(ctx: PrimeContext) -> Self {
        Self { ctx, elements: (0..ctx.p()).collect(), provenance: "full".into() }
    }

    fn derived(ctx: PrimeContext, elements: Vec<Residue>, provenance: &str) -> Self {
        Self { ctx, elements, provenance: provenance.to_string() }
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn elements(&self) -> &[Residue] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn contains(&self, x: Residue) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Residue> + '_ {
        self.elements.iter().copied()
    }

    /// Dense membership table indexed by residue.
    pub fn membership(&self) -> Membership {
        Membership::new(self)
    }

    pub fn without(&self, x: Residue) -> Self {
        let elements = self.elements.iter().copied().filter(|&a| a != x).collect();
        Self::derived(self.ctx, elements, &self.provenance)
    }

    pub fn sumset(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.ctx.check_same(&other.ctx)?;
        let f = self.ctx;
        let sums = self.iter().flat_map(|a| other.iter().map(move |b| f.add(a, b)));
        Ok(Self::derived(f, collect_sorted(f, sums), "sumset"))
    }

    pub fn difference(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.sumset(&other.negation())
    }

    pub fn negation(&self) -> ResidueSet {
        let f = self.ctx;
        Self::derived(f, collect_sorted(f, self.iter().map(|a| f.neg(a))), "negation")
    }

    /// `sA`; `0A = {0}`.
    pub fn s_fold(&self, s: usize) -> ResidueSet {
        let mut acc = Self::derived(self.ctx, vec![0], "s-fold");
        for _ in 0..s {
            acc = acc.sumset(self).expect("same context");
        }
        acc.provenance = "s-fold".into();
        acc
    }

    /// `kA − kA`.
    pub fn signed_fold(&self, k: usize) -> ResidueSet {
        let ka = self.s_fold(k);
        let mut out = ka.difference(&ka).expect("same context");
        out.provenance = "signed-fold".into();
        out
    }

    pub fn product_set(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.ctx.check_same(&other.ctx)?;
        let f = self.ctx;
        let prods = self.iter().flat_map(|a| other.iter().map(move |b| f.mul(a, b)));
        Ok(Self::derived(f, collect_sorted(f, prods), "product-set"))
    }

    pub fn inverse_set(&self) -> Result<ResidueSet> {
        let f = self.ctx;
        let inv = self.iter().map(|b| f.inv(b)).collect::<Result<Vec<_>>>()?;
        Ok(Self::derived(f, collect_sorted(f, inv.into_iter()), "inverse-set"))
    }

    pub fn squares(&self) -> ResidueSet {
        let f = self.ctx;
        Self::derived(f, collect_sorted(f, self.iter().map(|a| f.square(a))), "squares")
    }

    /// Serialize in the set file format: `p=…`, `kind=…`, then one residue per line.
    pub fn to_file_string(&self) -> String {
        let mut s = format!("p={}\nkind={}\n", self.ctx.p(), self.provenance);
        for x in &self.elements {
            s.push_str(&x.to_string());
            s.push('\n');
        }
        s
    }

    /// Parse the set file format. Only the canonical byte layout is accepted,
    /// so that parse followed by [`ResidueSet::to_file_string`] is the identity.
    pub fn parse_file(text: &str) -> Result<ResidueSet> {
        let mut lines = text.split('\n');
        let p_line = lines.next().unwrap_or_default();
        let p = p_line
            .strip_prefix("p=")
            .and_then(parse_canonical_u64)
            .ok_or_else(|| Error::Parse(format!("expected `p=<modulus>`, got {p_line:?}")))?;
        let ctx = PrimeContext::new(p)?;
        let kind_line = lines.next().unwrap_or_default();
        let provenance = kind_line
            .strip_prefix("kind=")
            .ok_or_else(|| Error::Parse(format!("expected `kind=<provenance>`, got {kind_line:?}")))?;
        let mut elements = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let x = parse_canonical_u64(line)
                .ok_or_else(|| Error::Parse(format!("line {}: bad residue {line:?}", i + 3)))?;
            if x >= p {
                return Err(Error::Parse(format!("line {}: residue {x} is not below p={p}", i + 3)));
            }
            if let Some(&last) = elements.last() {
                if x as u32 <= last {
                    return Err(Error::Parse(format!("line {}: residues must be strictly increasing", i + 3)));
                }
            }
            elements.push(x as u32);
        }
        check_provenance(provenance)?;
        let set = Self::derived(ctx, elements, provenance);
        if set.to_file_string() != text {
            return Err(Error::Parse("set file is not in canonical form (blank lines or missing final newline)".into()));
        }
        Ok(set)
    }
}

impl fmt::Display for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}} ⊆ {}", self.ctx)
    }
}

fn check_provenance(s: &str) -> Result<()> {
    if s.contains('\n') || s.contains('\r') {
        return Err(Error::InvalidSet("provenance must be a single line".into()));
    }
    Ok(())
}

fn parse_canonical_u64(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
        return None;
    }
    s.parse().ok()
}

/// Constant-time membership for a fixed set.
#[derive(Debug, Clone)]
pub struct Membership {
    table: Option<Vec<bool>>,
    sorted: Vec<Residue>,
}

impl Membership {
    fn new(set: &ResidueSet) -> Self {
        let table = (set.ctx.p() <= BITMAP_MAX_P).then(|| {
            let mut t = vec![false; set.ctx.p() as usize];
            for &a in &set.elements {
                t[a as usize] = true;
            }
            t
        });
        Self { table, sorted: set.elements.clone() }
    }

    #[inline]
    pub fn contains(&self, x: Residue) -> bool {
        match &self.table {
            Some(t) => t[x as usize],
            None => self.sorted.binary_search(&x).is_ok(),
        }
    }
}

fn collect_sorted(ctx: PrimeContext, items: impl Iterator<Item = Residue>) -> Vec<Residue> {
    if ctx.p() <= BITMAP_MAX_P {
        let mut seen = vec![false; ctx.p() as usize];
        for x in items {
            seen[x as usize] = true;
        }
        seen.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u32).collect()
    } else {
        let mut v: Vec<Residue> = items.collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Uniform integer in `[0, n)` by rejection from 64-bit draws.
pub(crate) fn uniform_below(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    let zone = n * (u64::MAX / n);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % n;
        }
    }
}

/// Generate a set from its descriptor. The output depends only on `(ctx, spec)`.
///
/// Random sets use ChaCha8 seeded with `seed_from_u64(seed)` and Floyd's
/// sampling algorithm; each draw is a rejection-sampled `next_u64() % bound`.
pub fn generate_set(ctx: PrimeContext, spec: &SetSpec) -> Result<ResidueSet> {
    let p = ctx.p64();
    let n = spec.n;
    if n > p {
        return Err(Error::SpecTooLarge { requested: n, available: p });
    }
    let elements: Vec<Residue> = match &spec.kind {
        SetKind::Interval => (1..=n).map(|x| ctx.reduce_u64(x)).collect(),
        SetKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let mut chosen: HashSet<u64> = HashSet::with_capacity(n as usize);
            for j in (p - n)..p {
                let t = uniform_below(&mut rng, j + 1);
                if !chosen.insert(t) {
                    chosen.insert(j);
                }
            }
            chosen.into_iter().map(|x| x as u32).collect()
        }
        SetKind::QuadraticResidues => {
            let available = (p - 1) / 2;
            if n > available {
                return Err(Error::SpecTooLarge { requested: n, available });
            }
            let squares = collect_sorted(ctx, (1..ctx.p()).map(|x| ctx.square(x)));
            squares.into_iter().take(n as usize).collect()
        }
        SetKind::Geometric { base } => {
            let base = *base;
            if base >= ctx.p() {
                return Err(Error::BadBase { base, reason: "not reduced mod p" });
            }
            if base == 0 || base == 1 {
                return Err(Error::BadBase { base, reason: "base must differ from 0 and 1" });
            }
            if ctx.order(base)? < n {
                return Err(Error::BadBase { base, reason: "multiplicative order is shorter than N" });
            }
            let mut out = Vec::with_capacity(n as usize);
            let mut x = 1;
            for _ in 0..n {
                out.push(x);
                x = ctx.mul(x, base);
            }
            out
        }
        SetKind::Explicit { elements } => {
            if let Some(&bad) = elements.iter().find(|&&x| x >= p) {
                return Err(Error::InvalidSet(format!("residue {bad} is not below p={p}")));
            }
            let mut v: Vec<Residue> = elements.iter().map(|&x| x as u32).collect();
            v.sort_unstable();
            v.dedup();
            if v.len() as u64 != n || elements.len() as u64 != n {
                return Err(Error::InvalidSet("explicit elements must be distinct and number N".into()));
            }
            v
        }
    };
    ResidueSet::from_residues(ctx, elements, spec.provenance())
}

/// Both sides of the Plünnecke–Ruzsa inequality `|kA − kA| ≤ K^{2k}|B|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlunneckeReport {
    pub k: u32,
    /// `K = |A+B| / |B|` as a reduced fraction.
    pub doubling_num: u64,
    pub doubling_den: u64,
    pub lhs: u64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn plunnecke_check(a: &ResidueSet, b: &ResidueSet, k: u32) -> Result<PlunneckeReport> {
    a.ctx.check_same(&b.ctx)?;
    if a.is_empty() || b.is_empty() || k == 0 {
        return Err(Error::InvalidArgument("Plünnecke check needs nonempty A, B and k ≥ 1".into()));
    }
    let sum = a.sumset(b)?.len() as u64;
    let bl = b.len() as u64;
    let lhs = a.signed_fold(k as usize).len() as u64;
    let g = gcd(sum, bl);
    // lhs·|B|^{2k−1} ≤ |A+B|^{2k}
    let left = BigUint::from(lhs) * BigUint::from(bl).pow(2 * k - 1);
    let right = BigUint::from(sum).pow(2 * k);
    let rhs = (sum as f64 / bl as f64).powi(2 * k as i32) * bl as f64;
    Ok(PlunneckeReport { k, doubling_num: sum / g, doubling_den: bl / g, lhs, rhs, holds: left <= right })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Pack a point of 𝔽_p² into one word.
#[inline]
pub(crate) fn pack(x: Residue, y: Residue) -> u64 {
    ((x as u64) << 32) | y as u64
}

#[inline]
pub(crate) fn unpack(k: u64) -> (Residue, Residue) {
    ((k >> 32) as u32, k as u32)
}

/// The points of `s𝒜` for `𝒜 = {(a, a²)}`, sorted.
pub fn moment_curve_sumset(a: &ResidueSet, s: usize, limits: &Limits) -> Result<Vec<(Residue, Residue)>> {
    let f = a.ctx;
    let lift: Vec<(Residue, Residue)> = a.iter().map(|x| (x, f.square(x))).collect();
    let mut cur: Vec<u64> = vec![pack(0, 0)];
    for _ in 0..s {
        let work = cur.len() as u128 * lift.len() as u128;
        if work > limits.sparse_entries as u128 {
            return Err(Error::ResourceLimit { what: "moment-curve sumset", needed: work, cap: limits.sparse_entries as u128 });
        }
        let mut next = Vec::with_capacity(work as usize);
        for &c in &cur {
            let (x, y) = unpack(c);
            for &(u, v) in &lift {
                next.push(pack(f.add(x, u), f.add(y, v)));
            }
        }
        next.sort_unstable();
        next.dedup();
        cur = next;
    }
    Ok(cur.into_iter().map(unpack).collect())
}

/// `|s𝒜|`, the size of the `s`-fold sumset of the moment-curve lift.
pub fn moment_curve_sumset_size(a: &ResidueSet, s: usize, limits: &Limits) -> Result<u64> {
    Ok(moment_curve_sumset(a, s, limits)?.len() as u64)
}
