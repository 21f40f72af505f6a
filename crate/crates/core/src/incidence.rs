//! Curves in 𝔽_p², incidence counting, and greedy pruning of rich curves.
//!
//! Curves are membership predicates. Counting loops never materialize point
//! lists; [`Curve::points`] exists for oracles and small experiments.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{PrimeContext, Residue};
use crate::gridfn::GridFunction;
use crate::setlib::{pack, unpack, Membership, ResidueSet};
use crate::{ceil_root, Limits};

pub type Point = (Residue, Residue);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CurveKind {
    /// `(m − x)(m − y) = (m² − n)/2`, nondegenerate when `m² ≠ n`.
    Hyperbola { m: Residue, n: Residue },
    /// `{(t, t²) : t ∈ 𝔽_p} + (x1, x2)`, i.e. `y = (x − x1)² + x2`.
    TransParabola { x1: Residue, x2: Residue },
    /// `x = y·v + u`.
    Line { u: Residue, v: Residue },
    /// `x = m`.
    VLine { m: Residue },
    /// `y = −(x − α)² + β`.
    DownParabola { alpha: Residue, beta: Residue },
    /// `y = slope·x + intercept`.
    Graph { slope: Residue, intercept: Residue },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Curve {
    ctx: PrimeContext,
    kind: CurveKind,
}

impl Curve {
    pub fn new(ctx: PrimeContext, kind: CurveKind) -> Result<Self> {
        let params: [Residue; 2] = match kind {
            CurveKind::Hyperbola { m, n } => [m, n],
            CurveKind::TransParabola { x1, x2 } => [x1, x2],
            CurveKind::Line { u, v } => [u, v],
            CurveKind::VLine { m } => [m, 0],
            CurveKind::DownParabola { alpha, beta } => [alpha, beta],
            CurveKind::Graph { slope, intercept } => [slope, intercept],
        };
        if params.iter().any(|&x| x >= ctx.p()) {
            return Err(Error::InvalidArgument(format!("curve parameters {params:?} are not reduced mod {}", ctx.p())));
        }
        if let CurveKind::Hyperbola { m, n } = kind {
            if ctx.square(m) == n {
                return Err(Error::DegenerateCurve(format!("hyperbola with m²=n (m={m}, n={n})")));
            }
        }
        Ok(Self { ctx, kind })
    }

    pub fn hyperbola(ctx: PrimeContext, m: Residue, n: Residue) -> Result<Self> {
        Self::new(ctx, CurveKind::Hyperbola { m, n })
    }

    pub fn trans_parabola(ctx: PrimeContext, x: Point) -> Self {
        Self::new(ctx, CurveKind::TransParabola { x1: x.0, x2: x.1 }).expect("reduced point")
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    #[inline]
    pub fn contains(&self, (x, y): Point) -> bool {
        let f = &self.ctx;
        match self.kind {
            CurveKind::Hyperbola { m, n } => {
                f.mul(f.sub(m, x), f.sub(m, y)) == f.half(f.sub(f.square(m), n))
            }
            CurveKind::TransParabola { x1, x2 } => y == f.add(f.square(f.sub(x, x1)), x2),
            CurveKind::Line { u, v } => x == f.add(f.mul(y, v), u),
            CurveKind::VLine { m } => x == m,
            CurveKind::DownParabola { alpha, beta } => y == f.sub(beta, f.square(f.sub(x, alpha))),
            CurveKind::Graph { slope, intercept } => y == f.add(f.mul(slope, x), intercept),
        }
    }

    /// Every point of the curve, sorted.
    pub fn points(&self) -> Vec<Point> {
        let f = self.ctx;
        let mut pts: Vec<Point> = match self.kind {
            CurveKind::Hyperbola { m, n } => {
                let c = f.half(f.sub(f.square(m), n));
                (0..f.p())
                    .filter(|&x| x != m)
                    .map(|x| (x, f.sub(m, f.mul(c, f.inv(f.sub(m, x)).expect("x ≠ m")))))
                    .collect()
            }
            CurveKind::TransParabola { x1, x2 } => {
                (0..f.p()).map(|t| (f.add(t, x1), f.add(f.square(t), x2))).collect()
            }
            CurveKind::Line { u, v } => (0..f.p()).map(|y| (f.add(f.mul(y, v), u), y)).collect(),
            CurveKind::VLine { m } => (0..f.p()).map(|y| (m, y)).collect(),
            CurveKind::DownParabola { alpha, beta } => {
                (0..f.p()).map(|x| (x, f.sub(beta, f.square(f.sub(x, alpha))))).collect()
            }
            CurveKind::Graph { slope, intercept } => {
                (0..f.p()).map(|x| (x, f.add(f.mul(slope, x), intercept))).collect()
            }
        };
        pts.sort_unstable();
        pts
    }

    pub fn point_set(&self) -> PointSet2D {
        PointSet2D::new(self.ctx, self.points())
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CurveKind::Hyperbola { m, n } => write!(f, "h[{m},{n}]"),
            CurveKind::TransParabola { x1, x2 } => write!(f, "l[{x1},{x2}]"),
            CurveKind::Line { u, v } => write!(f, "line[{u},{v}]"),
            CurveKind::VLine { m } => write!(f, "x={m}"),
            CurveKind::DownParabola { alpha, beta } => write!(f, "down[{alpha},{beta}]"),
            CurveKind::Graph { slope, intercept } => write!(f, "y={slope}x+{intercept}"),
        }
    }
}

/// `|h_{m,n} ∩ (A × A)|`, counted by solving for `a₂` from each `a₁ ≠ m`.
pub fn hyperbola_richness(ctx: PrimeContext, m: Residue, n: Residue, a: &ResidueSet, member: &Membership) -> u64 {
    let f = ctx;
    let c = f.half(f.sub(f.square(m), n));
    a.iter()
        .filter(|&a1| a1 != m)
        .filter(|&a1| {
            let a2 = f.sub(m, f.mul(c, f.inv(f.sub(m, a1)).expect("a1 ≠ m")));
            member.contains(a2)
        })
        .count() as u64
}

/// A deduplicated sorted point set, optionally weighted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet2D {
    ctx: PrimeContext,
    points: Vec<Point>,
    weights: Option<Vec<u64>>,
}

impl PointSet2D {
    pub fn new(ctx: PrimeContext, points: impl IntoIterator<Item = Point>) -> Self {
        let mut pts: Vec<Point> = points.into_iter().collect();
        assert!(pts.iter().all(|&(x, y)| x < ctx.p() && y < ctx.p()), "points must be reduced");
        pts.sort_unstable();
        pts.dedup();
        Self { ctx, points: pts, weights: None }
    }

    /// Weighted points; repeated points add their weights, zero weights are dropped.
    pub fn weighted(ctx: PrimeContext, items: impl IntoIterator<Item = (Point, u64)>) -> Self {
        let mut map: HashMap<Point, u64> = HashMap::new();
        for (pt, w) in items {
            assert!(pt.0 < ctx.p() && pt.1 < ctx.p(), "points must be reduced");
            *map.entry(pt).or_insert(0) += w;
        }
        let mut items: Vec<(Point, u64)> = map.into_iter().filter(|&(_, w)| w > 0).collect();
        items.sort_unstable();
        let (points, weights) = items.into_iter().unzip();
        Self { ctx, points, weights: Some(weights) }
    }

    /// The support of a grid function, weighted by its values.
    pub fn from_grid(g: &GridFunction) -> Self {
        Self::weighted(g.ctx(), g.entries())
    }

    pub fn product(a: &ResidueSet, b: &ResidueSet) -> Self {
        Self::new(a.ctx(), a.iter().flat_map(|x| b.iter().map(move |y| (x, y))))
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weight(&self, i: usize) -> u64 {
        self.weights.as_ref().map_or(1, |w| w[i])
    }

    pub fn iter_weighted(&self) -> impl Iterator<Item = (Point, u64)> + '_ {
        self.points.iter().enumerate().map(|(i, &pt)| (pt, self.weight(i)))
    }

    pub fn contains(&self, pt: Point) -> bool {
        self.points.binary_search(&pt).is_ok()
    }

    pub fn map(&self, f: impl Fn(Point) -> Point) -> Self {
        match &self.weights {
            None => Self::new(self.ctx, self.points.iter().map(|&pt| f(pt))),
            Some(_) => Self::weighted(self.ctx, self.iter_weighted().map(|(pt, w)| (f(pt), w))),
        }
    }
}

/// `Σ_{p∈P} Σ_{c∈C} [p ∈ c]`.
pub fn incidence_count(points: &PointSet2D, curves: &[Curve]) -> u64 {
    points
        .points()
        .par_iter()
        .map(|&pt| curves.iter().filter(|c| c.contains(pt)).count() as u64)
        .sum()
}

/// `Σ_{p∈P} Σ_{c∈C} w(p) w′(c) [p ∈ c]`, with point weights taken from `points`.
pub fn weighted_incidence_count(points: &PointSet2D, curves: &[(Curve, u64)]) -> u128 {
    let items: Vec<(Point, u64)> = points.iter_weighted().collect();
    items
        .par_iter()
        .map(|&(pt, w)| {
            curves.iter().filter(|(c, _)| c.contains(pt)).map(|(_, wc)| w as u128 * *wc as u128).sum::<u128>()
        })
        .sum()
}

/// The second moment `Σ_x̄ I(x̄)²` of incidences with all `p²` translates of the
/// parabola, split into its linear and pair terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecondMomentReport {
    pub total: u128,
    /// `p·|P|`: every point lies on exactly `p` translates.
    pub linear_term: u128,
    /// Ordered pairs of distinct points with distinct abscissae; each lies on exactly one common translate.
    pub pair_term: u128,
    /// `|P|(|P| − 1)`, which assumes every distinct pair shares a translate.
    pub all_pairs_term: u128,
}

impl SecondMomentReport {
    /// Pairs that share an abscissa and hence no translate.
    pub fn same_abscissa_pairs(&self) -> u128 {
        self.all_pairs_term - self.pair_term
    }
}

/// Incidence counts `I(x̄) = |P ∩ l_x̄|` for every translate with `I > 0`.
pub fn translate_incidences(points: &PointSet2D, limits: &Limits) -> Result<HashMap<Point, u64>> {
    let f = points.ctx;
    let work = points.len() as u128 * f.p64() as u128;
    limits.check("translate incidences", work, limits.brute_ops)?;
    let squares: Vec<Residue> = (0..f.p()).map(|t| f.square(t)).collect();
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for &(a, b) in points.points() {
        for (t, &t2) in squares.iter().enumerate() {
            *counts.entry(pack(f.sub(a, t as u32), f.sub(b, t2))).or_insert(0) += 1;
        }
    }
    Ok(counts.into_iter().map(|(k, c)| (unpack(k), c)).collect())
}

pub fn parabola_second_moment(points: &PointSet2D, limits: &Limits) -> Result<SecondMomentReport> {
    let counts = translate_incidences(points, limits)?;
    let total = counts.values().map(|&c| c as u128 * c as u128).sum();
    let n = points.len() as u128;
    let mut per_abscissa: HashMap<Residue, u128> = HashMap::new();
    for &(x, _) in points.points() {
        *per_abscissa.entry(x).or_insert(0) += 1;
    }
    let same: u128 = per_abscissa.values().map(|&c| c * (c - 1)).sum();
    let all_pairs_term = n * n.saturating_sub(1);
    Ok(SecondMomentReport {
        total,
        linear_term: points.ctx.p64() as u128 * n,
        pair_term: all_pairs_term - same,
        all_pairs_term,
    })
}

/// `Σ_{x̄∈X} |P ∩ l_x̄|` against `|P||X|/p + ((p−1)|P||X|)^{1/2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslateBoundReport {
    pub incidences: u64,
    pub bound: f64,
    pub holds: bool,
}

pub fn translate_incidence_bound(points: &PointSet2D, translates: &[Point], limits: &Limits) -> Result<TranslateBoundReport> {
    let counts = translate_incidences(points, limits)?;
    let mut xs = translates.to_vec();
    xs.sort_unstable();
    xs.dedup();
    let incidences: u64 = xs.iter().map(|x| counts.get(x).copied().unwrap_or(0)).sum();
    let (np, nx, p) = (points.len() as f64, xs.len() as f64, points.ctx.p64() as f64);
    let bound = np * nx / p + ((p - 1.0) * np * nx).sqrt();
    Ok(TranslateBoundReport { incidences, bound, holds: incidences as f64 <= bound * (1.0 + 1e-12) })
}

/// `φ(x, y) = (x, x² − y)`, an involution taking translated parabolae to lines.
pub fn phi_map(ctx: PrimeContext, (x, y): Point) -> Point {
    (x, ctx.sub(ctx.square(x), y))
}

/// The line `y = 2x₁t − x₁² − x₂` that `φ` maps `l_x̄` onto.
pub fn phi_line_image(ctx: PrimeContext, (x1, x2): Point) -> Curve {
    let slope = ctx.add(x1, x1);
    let intercept = ctx.neg(ctx.add(ctx.square(x1), x2));
    Curve::new(ctx, CurveKind::Graph { slope, intercept }).expect("reduced parameters")
}

/// Curve families scanned by [`prune_rich_curves`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveFamily {
    /// `y = −(x − α)² + β`, all `(α, β)`.
    DownParabolas,
    /// `x = m`, all `m`.
    VerticalLines,
}

impl CurveFamily {
    /// Default scan order: down-parabolae, then vertical lines.
    pub const DEFAULT_ORDER: [CurveFamily; 2] = [CurveFamily::DownParabolas, CurveFamily::VerticalLines];

    /// Keys of the family's curves through `pt`; key order is the canonical scan order.
    fn keys_through(self, ctx: PrimeContext, (x, y): Point, out: &mut Vec<u64>) {
        out.clear();
        match self {
            CurveFamily::DownParabolas => {
                for alpha in 0..ctx.p() {
                    out.push(pack(alpha, ctx.add(y, ctx.square(ctx.sub(x, alpha)))));
                }
            }
            CurveFamily::VerticalLines => out.push(x as u64),
        }
    }

    fn curve(self, ctx: PrimeContext, key: u64) -> Curve {
        let kind = match self {
            CurveFamily::DownParabolas => {
                let (alpha, beta) = unpack(key);
                CurveKind::DownParabola { alpha, beta }
            }
            CurveFamily::VerticalLines => CurveKind::VLine { m: key as u32 },
        };
        Curve::new(ctx, kind).expect("reduced parameters")
    }
}

/// `|l ∩ W|` for every curve of the family meeting `W`, keyed canonically.
pub fn family_counts(points: &[Point], ctx: PrimeContext, family: CurveFamily) -> HashMap<u64, u64> {
    let mut counts = HashMap::new();
    let mut keys = Vec::new();
    for &pt in points {
        family.keys_through(ctx, pt, &mut keys);
        for &k in &keys {
            *counts.entry(k).or_insert(0) += 1;
        }
    }
    counts
}

/// `max_{l ∈ 𝓛₁ ∪ 𝓛₂} |l ∩ W|`.
pub fn family_tau(points: &[Point], ctx: PrimeContext) -> u64 {
    CurveFamily::DEFAULT_ORDER
        .iter()
        .flat_map(|&fam| family_counts(points, ctx, fam).into_values())
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovedClass {
    pub curve: Curve,
    pub members: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneReport {
    pub tau: u64,
    pub remaining: PointSet2D,
    pub removed: Vec<RemovedClass>,
}

/// Greedily strip curves carrying more than `tau` points of `W`.
///
/// Families are processed in the given order. Within a family, the first curve
/// in canonical parameter order with `|l ∩ W| > tau` is removed, and the scan
/// restarts from the beginning of the family, until no curve exceeds `tau`.
pub fn prune_rich_curves(w: &PointSet2D, tau: u64, families: &[CurveFamily]) -> Result<PruneReport> {
    if tau == 0 {
        return Err(Error::InvalidArgument("tau must be at least 1".into()));
    }
    let ctx = w.ctx;
    let mut alive: BTreeSet<Point> = w.points().iter().copied().collect();
    let mut removed = Vec::new();
    let mut keys = Vec::new();
    for &family in families {
        let current: Vec<Point> = alive.iter().copied().collect();
        let mut counts = family_counts(&current, ctx, family);
        let mut rich: BTreeSet<u64> = counts.iter().filter(|&(_, &c)| c > tau).map(|(&k, _)| k).collect();
        while let Some(key) = rich.pop_first() {
            let curve = family.curve(ctx, key);
            let members: Vec<Point> = alive.iter().copied().filter(|&pt| curve.contains(pt)).collect();
            debug_assert!(members.len() as u64 > tau);
            for &pt in &members {
                alive.remove(&pt);
                family.keys_through(ctx, pt, &mut keys);
                for k in &keys {
                    let c = counts.get_mut(k).expect("curve through a live point");
                    *c -= 1;
                    if *c == tau {
                        rich.remove(k);
                    }
                }
            }
            removed.push(RemovedClass { curve, members });
        }
    }
    Ok(PruneReport { tau, remaining: PointSet2D::new(ctx, alive), removed })
}

/// `⌈|A|^{8/11} |W|^{2/11}⌉`, computed exactly.
pub fn default_tau(a_len: usize, w_len: usize) -> u64 {
    let n = BigUint::from(a_len).pow(8) * BigUint::from(w_len).pow(2);
    ceil_root(&n, 11).max(1)
}

/// `I / (|P|^{11/15}|L|^{11/15} + |P| + |L|)`.
pub fn szdz_ratio(incidences: u64, points: usize, curves: usize) -> f64 {
    let (np, nl) = (points as f64, curves as f64);
    let denom = (np * nl).powf(11.0 / 15.0) + np + nl;
    if denom == 0.0 {
        0.0
    } else {
        incidences as f64 / denom
    }
}

/// One row of an incidence experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncidenceRow {
    pub family: String,
    #[serde(rename = "|P|")]
    pub points: u64,
    #[serde(rename = "|C|")]
    pub curves: u64,
    pub incidences: u64,
    pub szdz_ratio: f64,
}

impl IncidenceRow {
    pub fn new(family: &str, points: usize, curves: usize, incidences: u64) -> Self {
        Self {
            family: family.to_string(),
            points: points as u64,
            curves: curves as u64,
            incidences,
            szdz_ratio: szdz_ratio(incidences, points, curves),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    #[test]
    fn hyperbola_points() {
        let f = ctx(7);
        let h = Curve::hyperbola(f, 0, 5).unwrap();
        let pts = h.points();
        assert_eq!(pts.len(), 6);
        assert!(pts.iter().all(|&(x, y)| f.mul(x, y) == 1));
        assert!(matches!(Curve::hyperbola(f, 3, 2), Err(Error::DegenerateCurve(_))));
        let t = Curve::trans_parabola(ctx(5), (0, 0)).points();
        assert_eq!(t, vec![(0, 0), (1, 1), (2, 4), (3, 4), (4, 1)]);
    }

    #[test]
    fn every_curve_kind_has_consistent_points() {
        let f = ctx(11);
        let kinds = [
            CurveKind::Hyperbola { m: 3, n: 1 },
            CurveKind::TransParabola { x1: 2, x2: 7 },
            CurveKind::Line { u: 4, v: 9 },
            CurveKind::VLine { m: 5 },
            CurveKind::DownParabola { alpha: 1, beta: 6 },
            CurveKind::Graph { slope: 3, intercept: 10 },
        ];
        for kind in kinds {
            let c = Curve::new(f, kind).unwrap();
            let pts = c.points();
            let expected = if matches!(kind, CurveKind::Hyperbola { .. }) { 10 } else { 11 };
            assert_eq!(pts.len(), expected, "{c}");
            let all: Vec<Point> = (0..11).flat_map(|x| (0..11).map(move |y| (x, y))).filter(|&pt| c.contains(pt)).collect();
            assert_eq!(all, pts, "{c}");
        }
    }

    #[test]
    fn incidence_examples() {
        let f = ctx(5);
        let line = Curve::new(f, CurveKind::Line { u: 1, v: 2 }).unwrap();
        let p = PointSet2D::new(f, [(3, 1)]);
        assert_eq!(incidence_count(&p, &[line]), 1);
        let all: Vec<Curve> = (0..5).flat_map(|a| (0..5).map(move |b| Curve::trans_parabola(f, (a, b)))).collect();
        let p = PointSet2D::new(f, [(0, 0), (1, 3), (4, 4)]);
        assert_eq!(incidence_count(&p, &all), 15);
        let weighted: Vec<(Curve, u64)> = all.iter().map(|&c| (c, 1)).collect();
        assert_eq!(weighted_incidence_count(&p, &weighted), 15);
        let heavy = PointSet2D::weighted(f, [((0, 0), 2), ((1, 3), 1), ((4, 4), 1)]);
        assert_eq!(weighted_incidence_count(&heavy, &weighted), 20);
    }

    #[test]
    fn second_moment_examples() {
        let lim = Limits::default();
        let f = ctx(5);
        let r = parabola_second_moment(&PointSet2D::new(f, [(0, 0), (0, 1)]), &lim).unwrap();
        assert_eq!((r.total, r.pair_term, r.all_pairs_term), (10, 0, 2));
        let r = parabola_second_moment(&PointSet2D::new(f, [(0, 0), (1, 1)]), &lim).unwrap();
        assert_eq!((r.total, r.pair_term), (12, 2));
        let r = parabola_second_moment(&PointSet2D::new(f, [(3, 3)]), &lim).unwrap();
        assert_eq!(r.total, 5);
    }

    #[test]
    fn phi_examples() {
        let f = ctx(13);
        for t in 0..13 {
            assert_eq!(phi_map(f, (t, f.square(t))), (t, 0));
        }
        let pt = (4, 9);
        assert_eq!(phi_map(f, phi_map(f, pt)), pt);
        let x = (3, 5);
        let image: Vec<Point> = Curve::trans_parabola(f, x).points().into_iter().map(|q| phi_map(f, q)).collect();
        let line = phi_line_image(f, x);
        assert!(image.iter().all(|&q| line.contains(q)));
    }

    #[test]
    fn prune_fixed_point_and_single_curve() {
        let f = ctx(11);
        let w = PointSet2D::new(f, [(0, 0), (1, 5), (2, 9)]);
        let r = prune_rich_curves(&w, 5, &CurveFamily::DEFAULT_ORDER).unwrap();
        assert_eq!(r.remaining, w);
        assert!(r.removed.is_empty());

        let down = Curve::new(f, CurveKind::DownParabola { alpha: 2, beta: 3 }).unwrap();
        let on: Vec<Point> = down.points().into_iter().take(6).collect();
        let w = PointSet2D::new(f, on.clone());
        let r = prune_rich_curves(&w, 4, &CurveFamily::DEFAULT_ORDER).unwrap();
        assert_eq!(r.removed.len(), 1);
        assert_eq!(r.removed[0].curve, down);
        assert_eq!(r.removed[0].members, on);
        assert!(r.remaining.is_empty());
    }

    #[test]
    fn default_tau_rounds_up() {
        // 10^8 · 500^2 = 2.5e13, eleventh root ≈ 17.0...
        let t = default_tau(10, 500);
        let n = BigUint::from(10u32).pow(8) * BigUint::from(500u32).pow(2);
        assert!(BigUint::from(t).pow(11) >= n);
        assert!(BigUint::from(t - 1).pow(11) < n);
        assert_eq!(default_tau(1, 1), 1);
    }
}
