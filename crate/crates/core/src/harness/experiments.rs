//! Report builders shared by the CLI and the verification suite.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::energy::prune_partition;
use crate::error::{Error, Result};
use crate::field::Residue;
use crate::incidence::{
    default_tau, family_tau, incidence_count, phi_line_image, phi_map, prune_rich_curves, Curve, CurveFamily, CurveKind,
    IncidenceRow, PointSet2D,
};
use crate::moebius::{energy_eh, quotient_counts, richness_spectrum, EhAlgorithm, Quotient, RichnessSpectrum, TransformFamily};
use crate::setlib::{moment_curve_sumset, ResidueSet};
use crate::Limits;

type Point = (Residue, Residue);

fn check_work(what: &'static str, points: usize, curves: usize, limits: &Limits) -> Result<()> {
    limits.check(what, points as u128 * curves as u128, limits.brute_ops)
}

/// Incidence experiments on one set: hyperbolae against `A × A`, translated
/// parabolae and their line images against `2𝒜`, and the sum-product lines.
pub fn incidence_rows(a: &ResidueSet, limits: &Limits) -> Result<Vec<IncidenceRow>> {
    let f = a.ctx();
    let mut rows = Vec::new();

    let part = prune_partition(a, limits)?;
    let grid = PointSet2D::product(a, a);
    let hyperbolae: Vec<Curve> = part.s.iter().map(|&(m, n)| Curve::hyperbola(f, m, n)).collect::<Result<_>>()?;
    check_work("hyperbola incidences", grid.len(), hyperbolae.len(), limits)?;
    rows.push(IncidenceRow::new("hyperbola", grid.len(), hyperbolae.len(), incidence_count(&grid, &hyperbolae)));

    let two = PointSet2D::new(f, moment_curve_sumset(a, 2, limits)?);
    let lift: Vec<Point> = a.iter().map(|x| (x, f.square(x))).collect();
    let parabolae: Vec<Curve> = lift.iter().map(|&x| Curve::trans_parabola(f, x)).collect();
    check_work("parabola incidences", two.len(), parabolae.len(), limits)?;
    rows.push(IncidenceRow::new("trans-parabola", two.len(), parabolae.len(), incidence_count(&two, &parabolae)));

    let image = two.map(|pt| phi_map(f, pt));
    let lines: Vec<Curve> = lift.iter().map(|&x| phi_line_image(f, x)).collect();
    rows.push(IncidenceRow::new("phi-line", image.len(), lines.len(), incidence_count(&image, &lines)));

    let star = a.without(0);
    if !star.is_empty() {
        let (points, lines) = sum_product_configuration(&star)?;
        check_work("sum-product incidences", points.len(), lines.len(), limits)?;
        rows.push(IncidenceRow::new("sum-product-line", points.len(), lines.len(), incidence_count(&points, &lines)));
    }
    Ok(rows)
}

/// Points `{(a₁ + a₂ + a₃, a₁a₂a₃)}` and lines `l_{u,v}` for `(u, v) = (a₁ + a₂, (a₁a₂)⁻¹)`.
pub fn sum_product_configuration(a: &ResidueSet) -> Result<(PointSet2D, Vec<Curve>)> {
    let f = a.ctx();
    if a.contains(0) {
        return Err(Error::InvalidArgument("sum-product configuration needs 0 ∉ A".into()));
    }
    let mut pts = Vec::new();
    let mut params = HashSet::new();
    for a1 in a.iter() {
        for a2 in a.iter() {
            params.insert((f.add(a1, a2), f.inv(f.mul(a1, a2))?));
            for a3 in a.iter() {
                pts.push((f.add(f.add(a1, a2), a3), f.mul(f.mul(a1, a2), a3)));
            }
        }
    }
    let mut params: Vec<Point> = params.into_iter().collect();
    params.sort_unstable();
    let lines = params
        .into_iter()
        .map(|(u, v)| Curve::new(f, CurveKind::Line { u, v }))
        .collect::<Result<_>>()?;
    Ok((PointSet2D::new(f, pts), lines))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSize {
    pub level: u32,
    pub size: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneSummary {
    pub p: u64,
    #[serde(rename = "|A|")]
    pub a_len: u64,
    pub delta: u64,
    #[serde(rename = "|S1|")]
    pub s1: u64,
    #[serde(rename = "|S2|")]
    pub s2: u64,
    #[serde(rename = "|S3|")]
    pub s3: u64,
    #[serde(rename = "|S|")]
    pub s: u64,
    #[serde(rename = "|U|")]
    pub u: u64,
    #[serde(rename = "|V|")]
    pub v: u64,
    pub v_classes: Vec<ClassSize>,
    pub j3: String,
    pub diagonal_sums: [String; 3],
    pub u_sum: String,
    /// `Δ·|A|³`, the bound on the `U` part.
    pub u_bound: String,
    pub v_sum: String,
    pub v_hyperbola_sum: String,
    pub tau: u64,
    /// `|W| ≥ |A|^{3/2}` for `W = V`.
    pub w_large: bool,
    pub removed_classes: u64,
    #[serde(rename = "|W''|")]
    pub remaining: u64,
    pub tau_after: u64,
}

/// The `2𝒜 − 𝒜` partition followed by rich-curve pruning of `W = V`.
pub fn prune_summary(a: &ResidueSet, tau: Option<u64>, limits: &Limits) -> Result<PruneSummary> {
    let f = a.ctx();
    let part = prune_partition(a, limits)?;
    let w = PointSet2D::new(f, part.v.iter().copied());
    let tau = tau.unwrap_or_else(|| default_tau(a.len(), w.len()));
    let pruned = prune_rich_curves(&w, tau, &CurveFamily::DEFAULT_ORDER)?;
    let a_len = a.len() as u64;
    Ok(PruneSummary {
        p: f.p64(),
        a_len,
        delta: part.delta,
        s1: part.s1.len() as u64,
        s2: part.s2.len() as u64,
        s3: part.s3.len() as u64,
        s: part.s.len() as u64,
        u: part.u.len() as u64,
        v: part.v.len() as u64,
        v_classes: part.v_classes.classes.iter().map(|c| ClassSize { level: c.level, size: c.members.len() as u64 }).collect(),
        j3: part.total.to_string(),
        diagonal_sums: part.diagonal_sums.clone().map(|x| x.to_string()),
        u_sum: part.u_sum.to_string(),
        u_bound: (BigUint::from(part.delta) * BigUint::from(a_len).pow(3)).to_string(),
        v_sum: part.v_sum.to_string(),
        v_hyperbola_sum: part.v_hyperbola_sum.to_string(),
        tau,
        w_large: (w.len() as u128).pow(2) >= (a_len as u128).pow(3),
        removed_classes: pruned.removed.len() as u64,
        remaining: pruned.remaining.len() as u64,
        tau_after: family_tau(pruned.remaining.points(), f),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobiusSummary {
    pub p: u64,
    #[serde(rename = "|A|")]
    pub a_len: u64,
    pub source: String,
    #[serde(rename = "|W|")]
    pub w_len: u64,
    pub prune_tau: u64,
    /// `max_{l ∈ 𝓛₁ ∪ 𝓛₂} |l ∩ V′|`.
    pub tau: u64,
    #[serde(rename = "|H|")]
    pub h_len: u64,
    pub algo: String,
    #[serde(rename = "E(H)")]
    pub energy: String,
    pub q_sum: String,
    /// `E(H) / (|H|²τ)`.
    pub eh_ratio: f64,
    pub richness: RichnessSpectrum,
}

/// Where the family `H` is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HSource {
    /// `V` after rich-curve pruning.
    V,
    /// All of `S`, unpruned.
    S,
}

pub fn mobius_summary(a: &ResidueSet, source: HSource, algo: EhAlgorithm, tau: Option<u64>, limits: &Limits) -> Result<MobiusSummary> {
    let f = a.ctx();
    let part = prune_partition(a, limits)?;
    let (w, prune_tau, v_prime) = match source {
        HSource::V => {
            let w = PointSet2D::new(f, part.v.iter().copied());
            let t = tau.unwrap_or_else(|| default_tau(a.len(), w.len()));
            let pruned = prune_rich_curves(&w, t, &CurveFamily::DEFAULT_ORDER)?;
            (w.len(), t, pruned.remaining.points().to_vec())
        }
        HSource::S => (part.s.len(), 0, part.s.clone()),
    };
    let h = TransformFamily::from_hyperbolae(f, &v_prime)?;
    let energy = energy_eh(&h, algo, limits)?;
    let q_sum: u64 = quotient_counts(&h, Quotient::Left, limits)?.values().sum();
    let tau_measured = family_tau(&v_prime, f);
    let denom = (h.len() as f64).powi(2) * tau_measured as f64;
    Ok(MobiusSummary {
        p: f.p64(),
        a_len: a.len() as u64,
        source: match source {
            HSource::V => "v",
            HSource::S => "s",
        }
        .into(),
        w_len: w as u64,
        prune_tau,
        tau: tau_measured,
        h_len: h.len() as u64,
        algo: match algo {
            EhAlgorithm::Brute => "brute",
            EhAlgorithm::Hash => "hash",
        }
        .into(),
        eh_ratio: if denom > 0.0 { energy.to_f64().unwrap_or(f64::INFINITY) / denom } else { 0.0 },
        energy: energy.to_string(),
        q_sum: q_sum.to_string(),
        richness: richness_spectrum(&h, a),
    })
}
