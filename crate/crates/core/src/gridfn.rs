//! Nonnegative integer functions on 𝔽_p × 𝔽_p.
//!
//! A [`GridFunction`] is stored either as a dense row-major `p×p` array or as a
//! sparse map; the two are interchangeable and compare equal when they agree
//! pointwise. Cyclic convolution has a dense route (floating FFT with a
//! certified rounding guard) and a sparse route (direct accumulation over
//! support pairs), and both give exact integers.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_complex::Complex64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fft::fft2d;
use crate::field::{PrimeContext, Residue};
use crate::setlib::{pack, unpack, ResidueSet};
use crate::Limits;

/// Largest rounding residual accepted from the FFT route.
pub const FFT_ROUNDING_GUARD: f64 = 0.25;

/// Above this total mass product the FFT route is not attempted.
const FFT_MASS_LIMIT: u128 = 1 << 50;

#[derive(Debug, Clone)]
enum Storage {
    Dense(Vec<u64>),
    Sparse(HashMap<u64, u64>),
}

#[derive(Debug, Clone)]
pub struct GridFunction {
    ctx: PrimeContext,
    storage: Storage,
}

/// Which convolution route produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvolutionRoute {
    Sparse,
    DenseFft,
    DenseExact,
}

impl GridFunction {
    pub fn zero(ctx: PrimeContext) -> Self {
        Self { ctx, storage: Storage::Sparse(HashMap::new()) }
    }

    /// Build a sparse function from `(x, y, value)` triples; repeated points add up.
    pub fn from_entries(ctx: PrimeContext, entries: impl IntoIterator<Item = (Residue, Residue, u64)>) -> Self {
        let mut map = HashMap::new();
        for (x, y, v) in entries {
            assert!(x < ctx.p() && y < ctx.p(), "point ({x},{y}) outside F_{}²", ctx.p());
            if v > 0 {
                *map.entry(pack(x, y)).or_insert(0) += v;
            }
        }
        Self { ctx, storage: Storage::Sparse(map) }
    }

    /// Point mass 1 on every point of the moment-curve lift `{(a, a²)}`.
    pub fn indicator_grid(a: &ResidueSet) -> Self {
        let f = a.ctx();
        Self::from_entries(f, a.iter().map(|x| (x, f.square(x), 1)))
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    #[inline]
    fn index(&self, x: Residue, y: Residue) -> usize {
        x as usize * self.ctx.p() as usize + y as usize
    }

    pub fn get(&self, x: Residue, y: Residue) -> u64 {
        match &self.storage {
            Storage::Dense(v) => v[self.index(x, y)],
            Storage::Sparse(m) => m.get(&pack(x, y)).copied().unwrap_or(0),
        }
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> Vec<((Residue, Residue), u64)> {
        match &self.storage {
            Storage::Dense(v) => {
                let p = self.ctx.p() as usize;
                v.iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(i, &c)| (((i / p) as u32, (i % p) as u32), c))
                    .collect()
            }
            Storage::Sparse(m) => {
                let mut out: Vec<_> = m.iter().filter(|(_, &c)| c > 0).map(|(&k, &c)| (unpack(k), c)).collect();
                out.sort_unstable();
                out
            }
        }
    }

    /// Nonzero entries in unspecified order.
    fn raw_entries(&self) -> Box<dyn Iterator<Item = (u64, u64)> + '_> {
        match &self.storage {
            Storage::Dense(v) => {
                let p = self.ctx.p() as usize;
                Box::new(
                    v.iter()
                        .enumerate()
                        .filter(|(_, &c)| c > 0)
                        .map(move |(i, &c)| (pack((i / p) as u32, (i % p) as u32), c)),
                )
            }
            Storage::Sparse(m) => Box::new(m.iter().filter(|(_, &c)| c > 0).map(|(&k, &c)| (k, c))),
        }
    }

    pub fn support(&self) -> Vec<(Residue, Residue)> {
        self.entries().into_iter().map(|(pt, _)| pt).collect()
    }

    pub fn support_len(&self) -> usize {
        match &self.storage {
            Storage::Dense(v) => v.iter().filter(|&&c| c > 0).count(),
            Storage::Sparse(m) => m.values().filter(|&&c| c > 0).count(),
        }
    }

    /// `Σ f`.
    pub fn mass(&self) -> u128 {
        self.raw_entries().map(|(_, c)| c as u128).sum()
    }

    /// `max f` (0 for the zero function).
    pub fn sup(&self) -> u64 {
        self.raw_entries().map(|(_, c)| c).max().unwrap_or(0)
    }

    pub fn to_dense(&self) -> Self {
        let p = self.ctx.p() as usize;
        let mut v = vec![0u64; p * p];
        for (k, c) in self.raw_entries() {
            let (x, y) = unpack(k);
            v[x as usize * p + y as usize] = c;
        }
        Self { ctx: self.ctx, storage: Storage::Dense(v) }
    }

    pub fn to_sparse(&self) -> Self {
        Self { ctx: self.ctx, storage: Storage::Sparse(self.raw_entries().collect()) }
    }

    /// `f(−n̄)`.
    pub fn reflect(&self) -> Self {
        let f = self.ctx;
        let map = self
            .raw_entries()
            .map(|(k, c)| {
                let (x, y) = unpack(k);
                (pack(f.neg(x), f.neg(y)), c)
            })
            .collect();
        let out = Self { ctx: self.ctx, storage: Storage::Sparse(map) };
        if self.is_dense() {
            out.to_dense()
        } else {
            out
        }
    }

    /// `Σ f(n̄)^k`, exactly.
    pub fn moment(&self, k: u32) -> BigUint {
        assert!(k >= 1, "moment order must be at least 1");
        let mut fast: u128 = 0;
        let mut slow = BigUint::default();
        for (_, c) in self.raw_entries() {
            match (c as u128).checked_pow(k).and_then(|t| fast.checked_add(t)) {
                Some(s) => fast = s,
                None => slow += BigUint::from(c).pow(k),
            }
        }
        slow + BigUint::from(fast)
    }

    /// Cyclic convolution `(f⊛g)(n̄) = Σ_{ū+v̄=n̄} f(ū)g(v̄)`, choosing the cheaper exact route.
    pub fn cyclic_convolve(&self, other: &GridFunction, limits: &Limits) -> Result<GridFunction> {
        Ok(self.cyclic_convolve_traced(other, limits)?.0)
    }

    pub fn cyclic_convolve_traced(&self, other: &GridFunction, limits: &Limits) -> Result<(GridFunction, ConvolutionRoute)> {
        self.ctx.check_same(&other.ctx)?;
        let work = self.support_len() as u128 * other.support_len() as u128;
        let cells = self.ctx.p64() as u128 * self.ctx.p64() as u128;
        if limits.dense_ok(self.ctx) && work > 4 * cells {
            return self.convolve_dense(other, limits);
        }
        Ok((self.convolve_sparse(other, limits)?, ConvolutionRoute::Sparse))
    }

    /// Direct accumulation over all pairs of support points.
    pub fn convolve_sparse(&self, other: &GridFunction, limits: &Limits) -> Result<GridFunction> {
        self.ctx.check_same(&other.ctx)?;
        let work = self.support_len() as u128 * other.support_len() as u128;
        limits.check("sparse convolution", work, limits.brute_ops)?;
        let f = self.ctx;
        let rhs: Vec<(u64, u64)> = other.raw_entries().collect();
        let mut out: HashMap<u64, u64> = HashMap::with_capacity((work as usize).min(1 << 22));
        for (k1, c1) in self.raw_entries() {
            let (x1, y1) = unpack(k1);
            for &(k2, c2) in &rhs {
                let (x2, y2) = unpack(k2);
                *out.entry(pack(f.add(x1, x2), f.add(y1, y2))).or_insert(0) += c1 * c2;
            }
        }
        Ok(GridFunction { ctx: f, storage: Storage::Sparse(out) })
    }

    /// Dense route: FFT with nearest-integer rounding, falling back to exact
    /// accumulation when any cell's rounding residual reaches the guard.
    pub fn convolve_dense(&self, other: &GridFunction, limits: &Limits) -> Result<(GridFunction, ConvolutionRoute)> {
        self.ctx.check_same(&other.ctx)?;
        let cells = self.ctx.p64() as u128 * self.ctx.p64() as u128;
        limits.check("dense grid", cells, limits.dense_cells)?;
        if self.mass() * other.mass() < FFT_MASS_LIMIT {
            if let Some(v) = self.fft_product(other) {
                return Ok((GridFunction { ctx: self.ctx, storage: Storage::Dense(v) }, ConvolutionRoute::DenseFft));
            }
        }
        let work = self.support_len() as u128 * other.support_len() as u128;
        limits.check("exact dense convolution", work, limits.brute_ops)?;
        let dense = self.convolve_sparse(other, &Limits { brute_ops: u64::MAX, ..*limits })?.to_dense();
        Ok((dense, ConvolutionRoute::DenseExact))
    }

    fn fft_product(&self, other: &GridFunction) -> Option<Vec<u64>> {
        let p = self.ctx.p() as usize;
        let lift = |g: &GridFunction| {
            let mut buf = vec![Complex64::new(0.0, 0.0); p * p];
            for (k, c) in g.raw_entries() {
                let (x, y) = unpack(k);
                buf[x as usize * p + y as usize] = Complex64::new(c as f64, 0.0);
            }
            fft2d(&mut buf, p, FftDirection::Forward);
            buf
        };
        let mut a = lift(self);
        let b = lift(other);
        for (u, v) in a.iter_mut().zip(&b) {
            *u *= v;
        }
        fft2d(&mut a, p, FftDirection::Inverse);
        let scale = 1.0 / (p * p) as f64;
        let mut out = Vec::with_capacity(p * p);
        for z in &a {
            let re = z.re * scale;
            let r = re.round();
            if (re - r).abs() >= FFT_ROUNDING_GUARD || (z.im * scale).abs() >= FFT_ROUNDING_GUARD || r < 0.0 {
                return None;
            }
            out.push(r as u64);
        }
        Some(out)
    }

    /// Partition the support into dyadic level sets relative to `base`.
    pub fn dyadic_levels(&self, base: Scale) -> DyadicDecomposition<(Residue, Residue)> {
        dyadic_partition(self.entries(), base)
    }

    /// Debug dump: dense grids as a row-major array, sparse ones as sorted triples.
    pub fn to_json(&self) -> serde_json::Value {
        match &self.storage {
            Storage::Dense(v) => serde_json::json!({ "p": self.ctx.p(), "dense": true, "values": v }),
            Storage::Sparse(_) => {
                let triples: Vec<(u32, u32, u64)> = self.entries().into_iter().map(|((x, y), c)| (x, y, c)).collect();
                serde_json::json!({ "p": self.ctx.p(), "dense": false, "entries": triples })
            }
        }
    }
}

impl PartialEq for GridFunction {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.entries() == other.entries()
    }
}

impl Eq for GridFunction {}

/// `r_s`, the number of representations of each point as a sum of `s` points of `{(a, a²)}`.
pub fn representation_function(a: &ResidueSet, s: usize, limits: &Limits) -> Result<GridFunction> {
    let r1 = GridFunction::indicator_grid(a);
    if s == 0 {
        return Ok(GridFunction::from_entries(a.ctx(), [(0, 0, 1)]));
    }
    let mut acc = r1.clone();
    for _ in 1..s {
        acc = acc.cyclic_convolve(&r1, limits)?;
    }
    Ok(acc)
}

/// A positive rational scale `num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scale {
    pub num: u64,
    pub den: u64,
}

impl Scale {
    pub fn integer(n: u64) -> Self {
        assert!(n > 0, "scale must be positive");
        Self { num: n, den: 1 }
    }

    pub fn ratio(num: u64, den: u64) -> Self {
        assert!(num > 0 && den > 0, "scale must be positive");
        Self { num, den }
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Whether `value ≤ 2^level · self`.
    pub fn bounds(&self, value: u64, level: u32) -> bool {
        (value as u128) * (self.den as u128) <= ((self.num as u128) << level)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicClass<K> {
    pub level: u32,
    pub members: Vec<K>,
}

/// Level sets `{x : 2^{j−1}·base < f(x) ≤ 2^j·base}` for `j ≥ 1`, plus the
/// sub-base class `{x : 0 < f(x) ≤ base}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicDecomposition<K> {
    pub base: Scale,
    pub sub_base: Vec<K>,
    /// Nonempty classes in increasing level order.
    pub classes: Vec<DyadicClass<K>>,
}

impl<K> DyadicDecomposition<K> {
    pub fn class(&self, level: u32) -> Option<&[K]> {
        self.classes.iter().find(|c| c.level == level).map(|c| c.members.as_slice())
    }

    pub fn member_count(&self) -> usize {
        self.sub_base.len() + self.classes.iter().map(|c| c.members.len()).sum::<usize>()
    }
}

/// The dyadic level of a positive value: 0 for the sub-base class.
pub fn dyadic_level(value: u64, base: Scale) -> u32 {
    let mut j = 0;
    while !base.bounds(value, j) {
        j += 1;
    }
    j
}

/// Dyadic partition of `(key, value)` pairs; zero values are not in the support and are dropped.
pub fn dyadic_partition<K>(items: impl IntoIterator<Item = (K, u64)>, base: Scale) -> DyadicDecomposition<K> {
    let mut sub_base = Vec::new();
    let mut classes: Vec<DyadicClass<K>> = Vec::new();
    for (k, v) in items {
        if v == 0 {
            continue;
        }
        match dyadic_level(v, base) {
            0 => sub_base.push(k),
            level => match classes.iter_mut().find(|c| c.level == level) {
                Some(c) => c.members.push(k),
                None => classes.push(DyadicClass { level, members: vec![k] }),
            },
        }
    }
    classes.sort_by_key(|c| c.level);
    DyadicDecomposition { base, sub_base, classes }
}
