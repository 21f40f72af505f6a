//! Size sweeps of `J_s` over a set family, with theorem-exponent and
//! lower-bound ratios, and the recursion report for `s ∈ {4, 5}`.

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::energy::{j_energy, Algorithm};
use crate::error::Result;
use crate::field::{next_prime, PrimeContext};
use crate::setlib::{generate_set, moment_curve_sumset_size, SetKind, SetSpec};
use crate::Limits;

/// Default constant in the prime rule `p ≥ c·N²`.
pub const DEFAULT_PRIME_FACTOR: u64 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: String,
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "|A|")]
    pub a_len: u64,
    pub s: u64,
    #[serde(rename = "J_s")]
    pub j_s: String,
    /// `J_s / |A|^{2s−2−1/9}`.
    pub ratio_19: f64,
    /// `J_s / max(|A|^s, |A|^{2s}/|s𝒜|)`.
    pub ratio_lower: f64,
    /// `J_s ≥ |A|^s` and `J_s·|s𝒜| ≥ |A|^{2s}`, checked in integers.
    pub lower_exact: bool,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionRow {
    pub family: String,
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "|A|")]
    pub a_len: u64,
    pub s: u64,
    #[serde(rename = "J_s")]
    pub j_s: String,
    #[serde(rename = "J_s-1")]
    pub j_prev: String,
    /// `J_s / (J_{s−1}^{4/11} |A|^{(14s−7)/11} + |A|^{2s−3})`.
    pub lemma53_ratio: f64,
    /// `J_s / (|A|^{2s−1}/p + p·J_{s−1}·(ln|A|)²)`.
    pub udp_ratio_ln: f64,
    pub elapsed_ms: f64,
}

/// Least prime `≥ max(c·N², N + 1, 3)`.
pub fn sweep_prime(n: u64, c: u64) -> u64 {
    next_prime((c * n * n).max(n + 1).max(3))
}

/// Least prime `≥ max(c·N^{13(s−1)/15}, N + 1, 3)`.
pub fn recursion_prime(n: u64, s: u64, c: u64) -> u64 {
    let bound = (c as f64 * (n as f64).powf(13.0 * (s as f64 - 1.0) / 15.0)).ceil() as u64;
    next_prime(bound.max(n + 1).max(3))
}

fn spec_with_size(template: &SetSpec, n: u64) -> SetSpec {
    SetSpec { n, ..template.clone() }
}

pub fn family_name(kind: &SetKind) -> &'static str {
    kind.name()
}

/// `J_s ≥ |A|^s` and `J_s·|s𝒜| ≥ |A|^{2s}`.
pub fn lower_bounds_hold(j: &BigUint, a_len: u64, s: u32, sumset: u64) -> bool {
    let a = BigUint::from(a_len);
    *j >= a.pow(s) && j * BigUint::from(sumset) >= a.pow(2 * s)
}

/// One row per size, with `p` the least prime `≥ c·N²`.
pub fn run_sweep(template: &SetSpec, sizes: &[u64], s: usize, c: u64, limits: &Limits) -> Result<Vec<SweepRow>> {
    sizes
        .iter()
        .map(|&n| {
            let start = Instant::now();
            let ctx = PrimeContext::new(sweep_prime(n, c))?;
            let a = generate_set(ctx, &spec_with_size(template, n))?;
            let j = j_energy(&a, s, Algorithm::Auto, limits)?.value;
            let sumset = moment_curve_sumset_size(&a, s, limits)?;
            let al = a.len() as f64;
            let jf = j.to_f64().unwrap_or(f64::INFINITY);
            let lower = al.powi(s as i32).max(al.powi(2 * s as i32) / sumset as f64);
            Ok(SweepRow {
                family: family_name(&template.kind).to_string(),
                p: ctx.p64(),
                n,
                a_len: a.len() as u64,
                s: s as u64,
                j_s: j.to_string(),
                ratio_19: jf / al.powf(2.0 * s as f64 - 2.0 - 1.0 / 9.0),
                ratio_lower: jf / lower,
                lower_exact: lower_bounds_hold(&j, a.len() as u64, s as u32, sumset),
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect()
}

/// Recursion rows over the regime `|A| ≤ p^{15/(13(s−1))}`.
pub fn run_recursion(template: &SetSpec, sizes: &[u64], s: usize, c: u64, limits: &Limits) -> Result<Vec<RecursionRow>> {
    sizes
        .iter()
        .map(|&n| {
            let start = Instant::now();
            let ctx = PrimeContext::new(recursion_prime(n, s as u64, c))?;
            let a = generate_set(ctx, &spec_with_size(template, n))?;
            let j = j_energy(&a, s, Algorithm::Auto, limits)?.value;
            let jp = j_energy(&a, s - 1, Algorithm::Auto, limits)?.value;
            let (jf, jpf) = (j.to_f64().unwrap_or(f64::INFINITY), jp.to_f64().unwrap_or(f64::INFINITY));
            let al = a.len() as f64;
            let sf = s as f64;
            let p = ctx.p64() as f64;
            let lemma = jpf.powf(4.0 / 11.0) * al.powf((14.0 * sf - 7.0) / 11.0) + al.powf(2.0 * sf - 3.0);
            let udp = al.powf(2.0 * sf - 1.0) / p + p * jpf * al.ln().powi(2);
            Ok(RecursionRow {
                family: family_name(&template.kind).to_string(),
                p: ctx.p64(),
                n,
                a_len: a.len() as u64,
                s: s as u64,
                j_s: j.to_string(),
                j_prev: jp.to_string(),
                lemma53_ratio: jf / lemma,
                udp_ratio_ln: jf / udp,
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect()
}
