//! Exponential sums `F_𝔞(x, y) = Σ_n 𝔞(n) e((xn + yn²)/p)` along the moment
//! curve, their normalized `L^q` norms, and the dyadic amplitude split.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_bigint::BigUint;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::fft2d;
use crate::field::{PrimeContext, Residue};
use crate::setlib::ResidueSet;
use crate::Limits;

/// Largest `p` for which full grids are evaluated.
pub const MAX_GRID_P: u32 = 1 << 13;

/// Largest rounding residual accepted when reading an integer off a float sum.
pub const ROUNDING_GUARD: f64 = 0.25;

/// A real weight on 𝔽_p with finite support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightFunction {
    ctx: PrimeContext,
    values: BTreeMap<Residue, f64>,
}

impl WeightFunction {
    /// Zero values are dropped from the support.
    pub fn new(ctx: PrimeContext, values: impl IntoIterator<Item = (Residue, f64)>) -> Self {
        let values = values
            .into_iter()
            .inspect(|&(n, _)| assert!(n < ctx.p(), "residue {n} not reduced"))
            .filter(|&(_, v)| v != 0.0)
            .collect();
        Self { ctx, values }
    }

    pub fn indicator(a: &ResidueSet) -> Self {
        Self::new(a.ctx(), a.iter().map(|n| (n, 1.0)))
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn get(&self, n: Residue) -> f64 {
        self.values.get(&n).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Residue, f64)> + '_ {
        self.values.iter().map(|(&n, &v)| (n, v))
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    /// `(Σ |𝔞|^q)^{1/q}`, unnormalized.
    pub fn lq_norm(&self, q: u32) -> f64 {
        self.values.values().map(|v| v.abs().powi(q as i32)).sum::<f64>().powf(1.0 / q as f64)
    }

    pub fn l2_norm(&self) -> f64 {
        self.lq_norm(2)
    }

    pub fn sup(&self) -> f64 {
        self.values.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `𝔞 / ‖𝔞‖₂`.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.l2_norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized("zero weight cannot be normalized".into()));
        }
        Ok(Self::new(self.ctx, self.iter().map(|(n, v)| (n, v / norm))))
    }

    pub fn is_normalized(&self) -> bool {
        (self.l2_norm() - 1.0).abs() <= 1e-9 && self.sup() <= 1.0 + 1e-12
    }
}

/// `F_𝔞` on all of 𝔽_p², row-major with `x` indexing rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSumGrid {
    ctx: PrimeContext,
    values: Vec<Complex64>,
    provenance: String,
}

impl ExpSumGrid {
    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn get(&self, x: Residue, y: Residue) -> Complex64 {
        let p = self.ctx.p() as usize;
        self.values[x as usize * p + y as usize]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    /// `Σ_{x,y} |F|^q`, summed per row and then over rows in row order.
    pub fn power_sum(&self, q: u32) -> f64 {
        let p = self.ctx.p() as usize;
        let rows: Vec<f64> = self
            .values
            .par_chunks(p)
            .map(|row| row.iter().map(|z| z.norm_sqr().powf(q as f64 / 2.0)).sum())
            .collect();
        rows.iter().sum()
    }

    /// `‖F‖_{L^q}^q = p⁻² Σ |F|^q`.
    pub fn lq_power(&self, q: u32) -> f64 {
        self.power_sum(q) / (self.ctx.p64() as f64).powi(2)
    }

    pub fn lq_norm(&self, q: u32) -> f64 {
        self.lq_power(q).powf(1.0 / q as f64)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

fn check_grid(w: &WeightFunction, limits: &Limits) -> Result<()> {
    let p = w.ctx.p();
    if w.support_len() == 0 {
        return Err(Error::InvalidArgument("weight has empty support".into()));
    }
    if p > MAX_GRID_P {
        return Err(Error::ResourceLimit { what: "exponential-sum grid side", needed: p as u128, cap: MAX_GRID_P as u128 });
    }
    limits.check("exponential-sum grid", w.ctx.p64() as u128 * w.ctx.p64() as u128, limits.dense_cells)
}

/// `e(k/p)` for `k ∈ [0, p)`.
fn roots_of_unity(p: u32) -> Vec<Complex64> {
    (0..p).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / p as f64)).collect()
}

/// Direct evaluation: every cell sums over the support.
pub fn eval_f(w: &WeightFunction, limits: &Limits) -> Result<ExpSumGrid> {
    check_grid(w, limits)?;
    let f = w.ctx;
    let p = f.p() as usize;
    limits.check("direct exponential sum", (p * p) as u128 * w.support_len() as u128, limits.brute_ops)?;
    let roots = roots_of_unity(f.p());
    let terms: Vec<(Residue, Residue, f64)> = w.iter().map(|(n, v)| (n, f.square(n), v)).collect();
    let mut values = vec![Complex64::new(0.0, 0.0); p * p];
    values.par_chunks_mut(p).enumerate().for_each(|(x, row)| {
        let x = x as u32;
        for (y, cell) in row.iter_mut().enumerate() {
            *cell = terms
                .iter()
                .map(|&(n, n2, v)| roots[f.add(f.mul(x, n), f.mul(y as u32, n2)) as usize] * v)
                .sum();
        }
    });
    Ok(ExpSumGrid { ctx: f, values, provenance: String::new() })
}

/// FFT evaluation: the inverse 2-D DFT of the weights lifted to `(n, n²)`.
pub fn eval_f_fft(w: &WeightFunction, limits: &Limits) -> Result<ExpSumGrid> {
    check_grid(w, limits)?;
    let f = w.ctx;
    let p = f.p() as usize;
    let mut values = vec![Complex64::new(0.0, 0.0); p * p];
    for (n, v) in w.iter() {
        values[n as usize * p + f.square(n) as usize] += v;
    }
    fft2d(&mut values, p, FftDirection::Inverse);
    Ok(ExpSumGrid { ctx: f, values, provenance: String::new() })
}

/// Reads `J_s` off `Σ |F_{𝟙_A}|^{2s} = p² J_s(A)`.
pub fn orthogonality_count(grid: &ExpSumGrid, s: u32) -> Result<BigUint> {
    let total = grid.power_sum(2 * s);
    let rounded = total.round();
    let residual = (total - rounded).abs();
    if residual >= ROUNDING_GUARD || !rounded.is_finite() || rounded < 0.0 || rounded >= 2f64.powi(52) {
        return Err(Error::InsufficientData(format!("power sum {total} is not certifiably an integer")));
    }
    let p2 = grid.ctx.p64() as u128 * grid.ctx.p64() as u128;
    let n = rounded as u128;
    if !n.is_multiple_of(p2) {
        return Err(Error::InsufficientData(format!("power sum {n} is not a multiple of p² = {p2}")));
    }
    Ok(BigUint::from(n / p2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VachReport {
    /// `‖F‖_{L⁶}⁶`.
    pub l6_sixth: f64,
    /// `‖F‖_{L⁴}⁴`.
    pub l4_fourth: f64,
    /// `|A|·‖𝔞‖₂²·‖F‖_{L⁴}⁴`.
    pub step1: f64,
    /// `2‖𝔞‖₂⁴`.
    pub l4_bound: f64,
    /// `2|A|·‖𝔞‖₂⁶`.
    pub step2: f64,
    /// `(‖F‖_{L⁶}⁶ ≤ step1, ‖F‖_{L⁴}⁴ ≤ 2‖𝔞‖₂⁴)`, each to relative tolerance `1e−6`.
    pub holds: (bool, bool),
}

pub const VACH_TOLERANCE: f64 = 1e-6;

pub fn vach_chain_check(w: &WeightFunction, limits: &Limits) -> Result<VachReport> {
    let grid = eval_f(w, limits)?;
    let a = w.support_len() as f64;
    let n2 = w.l2_norm().powi(2);
    let l6_sixth = grid.lq_power(6);
    let l4_fourth = grid.lq_power(4);
    let step1 = a * n2 * l4_fourth;
    let l4_bound = 2.0 * n2 * n2;
    let step2 = 2.0 * a * n2.powi(3);
    let le = |x: f64, y: f64| x <= y * (1.0 + VACH_TOLERANCE);
    Ok(VachReport { l6_sixth, l4_fourth, step1, l4_bound, step2, holds: (le(l6_sixth, step1), le(l4_fourth, l4_bound)) })
}

/// The classes `A₀ = {|𝔞| ≤ 1/|A|}` and `A_j = {2^{j−1}/|A| < |𝔞| ≤ 2^j/|A|}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeDecomposition {
    /// `(j, 𝔞_j)` for each nonempty class, `j` increasing.
    pub classes: Vec<(u32, WeightFunction)>,
    /// `Σ_{j≥1} |A_j| 2^{2j} |A|⁻²`.
    pub mass_sum: f64,
}

impl AmplitudeDecomposition {
    pub fn class(&self, j: u32) -> Option<&WeightFunction> {
        self.classes.iter().find(|(k, _)| *k == j).map(|(_, w)| w)
    }
}

/// Level of an amplitude `v` relative to `1/|A|`.
pub fn amplitude_level(v: f64, a_len: usize) -> u32 {
    let scaled = v.abs() * a_len as f64;
    let mut j = 0;
    while scaled > 2f64.powi(j as i32) {
        j += 1;
    }
    j
}

pub fn amplitude_dyadic(w: &WeightFunction) -> Result<AmplitudeDecomposition> {
    if !w.is_normalized() {
        return Err(Error::NotNormalized(format!("‖𝔞‖₂ = {}, sup |𝔞| = {}", w.l2_norm(), w.sup())));
    }
    let a_len = w.support_len();
    let mut levels: BTreeMap<u32, Vec<(Residue, f64)>> = BTreeMap::new();
    for (n, v) in w.iter() {
        levels.entry(amplitude_level(v, a_len)).or_default().push((n, v));
    }
    let mass_sum = levels
        .iter()
        .filter(|(&j, _)| j >= 1)
        .map(|(&j, m)| m.len() as f64 * 4f64.powi(j as i32) / (a_len as f64).powi(2))
        .sum();
    let classes = levels.into_iter().map(|(j, m)| (j, WeightFunction::new(w.ctx, m))).collect();
    Ok(AmplitudeDecomposition { classes, mass_sum })
}

/// `‖F‖_{L^q} / (|A|^{(q−4)/(2q)} ‖𝔞‖₂)` for `q ≥ 4`, and `‖F‖_{L^q} / ‖𝔞‖₂` below.
pub fn cs_bound_ratio(lq: f64, a_len: usize, l2: f64, q: u32) -> f64 {
    let exponent = if q >= 4 { (q as f64 - 4.0) / (2.0 * q as f64) } else { 0.0 };
    lq / ((a_len as f64).powf(exponent) * l2)
}

/// `‖F‖_{L⁶} / ((log|A| + 1)^{1/2} |A|^{4/27} ‖𝔞‖₂)`.
pub fn restriction_ratio(l6: f64, a_len: usize, l2: f64) -> f64 {
    let a = a_len as f64;
    l6 / ((a.ln() + 1.0).sqrt() * a.powf(4.0 / 27.0) * l2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpSumRow {
    pub p: u64,
    #[serde(rename = "|A|")]
    pub a_len: u64,
    pub q: u32,
    #[serde(rename = "Lq_norm")]
    pub lq_norm: f64,
    #[serde(rename = "ratio_to_CS_bound")]
    pub ratio_to_cs_bound: f64,
    /// Only reported for `q = 6`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub restriction_ratio: Option<f64>,
}
