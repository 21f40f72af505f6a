//! The desk-scale verification suite: every exact identity, algorithm
//! agreement and explicit-constant inequality, rechecked against direct scans.

use std::collections::{BTreeSet, HashMap};
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigUint;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{j_energy, k_energy, prune_partition, t_energy, Algorithm, PrunedPartition};
use crate::error::{Error, Result};
use crate::expsum::{eval_f, orthogonality_count, vach_chain_check, WeightFunction};
use crate::field::{PrimeContext, ProjPoint, Residue};
use crate::gridfn::dyadic_level;
use crate::gridfn::Scale;
use crate::harness::sweep::{run_sweep, DEFAULT_PRIME_FACTOR};
use crate::incidence::{
    parabola_second_moment, phi_line_image, phi_map, prune_rich_curves, Curve, CurveFamily, CurveKind, PointSet2D,
};
use crate::moebius::{energy_eh, energy_eh_with, quotient_counts, EhAlgorithm, Mobius, Quotient, TransformFamily};
use crate::setlib::{generate_set, moment_curve_sumset_size, plunnecke_check, uniform_below, ResidueSet, SetSpec};
use crate::Limits;

type Point = (Residue, Residue);

/// Deliberate faults for checking that the suite catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Admit points with `m = 0` into `S`.
    DropMNonzero,
}

impl FromStr for Fault {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop-m-nonzero" => Ok(Fault::DropMNonzero),
            other => Err(Error::InvalidArgument(format!("unknown fault {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Time budget in seconds; below a minute, trial counts shrink proportionally.
    pub budget_secs: f64,
    pub seed: u64,
    pub inject: Option<Fault>,
    pub limits: Limits,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { budget_secs: 60.0, seed: 0x5eed, inject: None, limits: Limits::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub trials: u64,
    pub passed: bool,
    pub failures: Vec<String>,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &str)> {
        self.checks.iter().flat_map(|c| c.failures.iter().map(move |f| (c.name.as_str(), f.as_str())))
    }
}

const TEST_PRIMES: [u64; 18] = [11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 79, 101];
const MAX_FAILURES: usize = 8;

struct Ctx {
    rng: ChaCha8Rng,
    factor: f64,
    limits: Limits,
    inject: Option<Fault>,
}

impl Ctx {
    fn below(&mut self, n: u64) -> u64 {
        uniform_below(&mut self.rng, n)
    }

    /// Scaled trial count, never below 3.
    fn trials(&self, full: u64) -> u64 {
        ((full as f64 * self.factor).ceil() as u64).clamp(3.min(full), full)
    }

    fn prime(&mut self) -> PrimeContext {
        let p = TEST_PRIMES[self.below(TEST_PRIMES.len() as u64) as usize];
        PrimeContext::new(p).expect("table of primes")
    }

    fn random_set(&mut self, ctx: PrimeContext, max_n: u64) -> ResidueSet {
        let n = 1 + self.below(max_n.min(ctx.p64()));
        let seed = self.rng.next_u64();
        generate_set(ctx, &SetSpec::random(n, seed)).expect("n ≤ p")
    }

    fn instance(&mut self, max_n: u64) -> ResidueSet {
        let ctx = self.prime();
        self.random_set(ctx, max_n)
    }
}

fn describe(a: &ResidueSet) -> String {
    format!("p={} A={:?}", a.ctx().p(), a.elements())
}

type CheckFn = fn(&mut Ctx) -> Result<(u64, Vec<String>)>;

pub fn verify_suite(opts: &VerifyOptions) -> VerifyReport {
    let mut ctx = Ctx {
        rng: ChaCha8Rng::seed_from_u64(opts.seed),
        factor: (opts.budget_secs / 60.0).clamp(0.05, 1.0),
        limits: opts.limits,
        inject: opts.inject,
    };
    let checks: [(&str, CheckFn); 11] = [
        ("j-agreement", check_j_agreement),
        ("closed-forms", check_closed_forms),
        ("energy-bounds", check_bounds),
        ("s-partition", check_partition),
        ("mobius", check_mobius),
        ("incidence", check_incidence),
        ("prune", check_prune),
        ("expsum", check_expsum),
        ("corollary-chains", check_corollaries),
        ("t-agreement", check_t),
        ("sweep", check_sweep),
    ];
    let checks = checks
        .iter()
        .map(|&(name, f)| {
            let start = Instant::now();
            let (trials, mut failures) = match f(&mut ctx) {
                Ok(r) => r,
                Err(e) => (0, vec![format!("error: {e}")]),
            };
            failures.truncate(MAX_FAILURES);
            CheckOutcome {
                name: name.to_string(),
                trials,
                passed: failures.is_empty(),
                failures,
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            }
        })
        .collect();
    VerifyReport { checks }
}

fn check_j_agreement(cx: &mut Ctx) -> Result<(u64, Vec<String>)> {
    let n = cx.trials(30);
    let mut fails = Vec::new();
    for _ in 0..n {
        let a = cx.instance(10);
        let s = 2 + cx.below(2) as usize;
        let vals: Vec<BigUint> = [Algorithm::Brute, Algorithm::Mitm, Algorithm::Conv]
            .iter()
            .map(|&al| j_energy(&a, s, al, &cx.limits).map(|r| r.value))
            .collect::<Result<_>>()?;
        if vals[0] != vals[1] || vals[1] != vals[2] {
            fails.push(format!("{} s={s}: brute/mitm/conv = {}/{}/{}", describe(&a), vals[0], vals[1], vals[2]));
        }
    }
    Ok((n, fails))
}

fn check_closed_forms(cx: &mut Ctx) -> Result<(u64, Vec<String>)> {
    let mut fails = Vec::new();
    let f5 = ResidueSet::full(PrimeContext::new(5)?);
    let boot = j_energy(&f5, 3, Algorithm::Brute, &cx.limits)?.value;
    if boot != BigUint::from(725u32) {
        fails.push(format!("J_3(F_5) by brute force is {boot}, expected 725"));
    }
    for p in [3u64, 5, 7] {
        let full = ResidueSet::full(PrimeContext::new(p)?);
        let j = j_energy(&full, 3, Algorithm::Auto, &cx.limits)?.value;
        let formula = BigUint::from(p.pow(4) + (p - 1) * p * p);
        if j != formula {
            fails.push(format!("J_3(F_{p}) = {j}, formula gives {formula}"));
        }
    }
    let n = cx.trials(20);
    for _ in 0..n {
        let a = cx.instance(12);
        let j = j_energy(&a, 2, Algorithm::Auto, &cx.limits)?.value;
        let k = a.len() as u64;
        if j != BigUint::from(2 * k * k - k) {
            fails.push(format!("{}: J_2 = {j}, expected {}", describe(&a), 2 * k * k - k));
        }
    }
    Ok((n + 4, fails))
}

fn check_bounds(cx: &mut Ctx) -> Result<(u64, Vec<String>)> {
    let n = cx.trials(20);
    let mut fails = Vec::new();
    for _ in 0..n {
        let a = cx.instance(10);
        let al = BigUint::from(a.len());
        let mut prev = BigUint::from(a.len());
        for s in 2..=3u32 {
            let j = j_energy(&a, s as usize, Algorithm::Auto, &cx.limits)?.value;
            let sumset = moment_curve_sumset_size(&a, s as usize, &cx.limits)?;
            if j < al.pow(s) || &j * BigUint::from(sumset) < al.pow(2 * s) {
                fails.push(format!("{} s={s}: J={j} below max(|A|^s, |A|^2s/|sA|) with |sA|={sumset}", describe(&a)));
            }
            let upper = &al * &prev + al.pow(2 * s - 2);
            if j > upper {
                fails.push(format!("{} s={s}: J={j} exceeds |A|J_(s-1)+|A|^(2s-2) = {upper}", describe(&a)));
            }
            prev = j;
        }
    }
    Ok((n, fails))
}

/// `r(m, n)` by enumerating triples.
fn direct_r3(a: &ResidueSet) -> HashMap<Point, u64> {
    let f = a.ctx();
    let mut r = HashMap::new();
    for a1 in a.iter() {
        for a2 in a.iter() {
            for a3 in a.iter() {
                let m = f.sub(f.add(a1, a2), a3);
                let n = f.sub(f.add(f.square(a1), f.square(a2)), f.square(a3));
                *r.entry((m, n)).or_insert(0) += 1;
            }
        }
    }
    r
}

/// `|h_{m,n} ∩ A²|` by enumerating pairs.
fn direct_hyperbola(a: &ResidueSet, m: Residue, n: Residue) -> u64 {
    let f = a.ctx();
    let c = f.half(f.sub(f.square(m), n));
    let mut count = 0;
    for x in a.iter() {
        for y in a.iter() {
            if f.mul(f.sub(m, x), f.sub(m, y)) == c {
                count += 1;
            }
        }
    }
    count
}

fn apply_fault(part: &mut PrunedPartition, fault: Option<Fault>, ctx: PrimeContext) {
    if fault == Some(Fault::DropMNonzero) {
        let extra: Vec<Point> = part.s1.iter().copied().filter(|&(m, n)| n != 0 && ctx.square(m) != n).collect();
        part.s.extend(extra);
        part.s.sort_unstable();
    }
}

/// Memberwise check of a partition against a direct rescan; returns failure messages.
pub fn partition_failures(a: &ResidueSet, part: &PrunedPartition) -> Vec<String> {
    let f = a.ctx();
    let tag = describe(a);
    let mut fails = Vec::new();
    let r = direct_r3(a);
    let mut support: Vec<Point> = r.keys().copied().collect();
    support.sort_unstable();
    let want = |pred: &dyn Fn(Point) -> bool| -> Vec<Point> { support.iter().copied().filter(|&pt| pred(pt)).collect() };
    for (name, got, exp) in [
        ("S1", &part.s1, want(&|(m, _)| m == 0)),
        ("S2", &part.s2, want(&|(_, n)| n == 0)),
        ("S3", &part.s3, want(&|(m, n)| f.square(m) == n)),
    ] {
        if *got != exp {
            fails.push(format!("{tag}: {name} differs from rescan"));
        }
    }
    for &(m, n) in &part.s {
        let reason = if !r.contains_key(&(m, n)) {
            Some("not in 2A-A")
        } else if m == 0 {
            Some("m = 0")
        } else if n == 0 {
            Some("n = 0")
        } else if f.square(m) == n {
            Some("m^2 = n")
        } else {
            None
        };
        if let Some(why) = reason {
            fails.push(format!("{tag}: S-partition witness ({m}, {n}) in S but {why}"));
        }
    }
    let s_expected = want(&|(m, n)| m != 0 && n != 0 && f.square(m) != n);
    for pt in &s_expected {
        if part.s.binary_search(pt).is_err() {
            fails.push(format!("{tag}: S-partition witness {pt:?} missing from S"));
        }
    }
    let mut union: BTreeSet<Point> = part.s.iter().copied().collect();
    union.extend(part.s1.iter().chain(&part.s2).chain(&part.s3).copied());
    if union.into_iter().collect::<Vec<_>>() != support {
        fails.push(format!("{tag}: S and S1-S3 do not cover 2A-A"));
    }
    let k = BigUint::from(a.len());
    let d = BigUint::from(part.delta);
    if d.pow(9) < k.pow(8) || (part.delta > 0 && BigUint::from(part.delta - 1).pow(9) >= k.pow(8)) {
        fails.push(format!("{tag}: delta {} is not the ceiling of |A|^(8/9)", part.delta));
    }
    let u_exp: Vec<Point> = s_expected.iter().copied().filter(|pt| r[pt] <= part.delta).collect();
    let v_exp: Vec<Point> = s_expected.iter().copied().filter(|pt| r[pt] > part.delta).collect();
    if part.u != u_exp || part.v != v_exp {
        fails.push(format!("{tag}: U/V split differs from rescan"));
    }
    for &(m, n) in &s_expected {
        let h = direct_hyperbola(a, m, n);
        if r[&(m, n)] > h {
            fails.push(format!("{tag}: r({m},{n}) = {} exceeds hyperbola count {h}", r[&(m, n)]));
        }
    }
    let mut classified = 0;
    for class in &part.v_classes.classes {
        for &(m, n) in &class.members {
            classified += 1;
            let h = direct_hyperbola(a, m, n) as u128;
            let base = part.delta as u128;
            let i = class.level;
            if !((base << (i - 1)) < h && h <= (base << i)) {
                fails.push(format!("{tag}: ({m},{n}) with hyperbola count {h} is not in class V_{i}"));
            }
        }
    }
    if classified + part.v_classes.sub_base.len() != part.v.len() || !part.v_classes.sub_base.is_empty() {
        fails.push(format!("{tag}: V classes do not partition V"));
    }
    let total: BigUint = r.values().map(|&c| BigUint::from(c).pow(2)).sum();
    if total != part.total {
        fails.push(format!("{tag}: sum of r^2 is {}, rescan gives {total}", part.total));
    }
    fails
}

fn check_partition(cx: &mut Ctx) -> Result<(u64, Vec<String>)> {
    let n = cx.trials(20);
    let mut fails = Vec::new();
    let mut sets = vec![generate_set(PrimeContext::new(101)?, &SetSpec::interval(10))?];
    while (sets.len() as u64) < n {
        sets.push(cx.instance(12));
    }
    for a in &sets {
        let mut part = prune_partition(a, &cx.limits)?;
        apply_fault(&mut part, cx.inject, a.ctx());
        fails.extend(partition_failures(a, &part));
        let j3 = j_energy(a, 3, Algorithm::Auto, &cx.limits)?.value;
        if j3 != part.total {
            fails.push(format!("{}: J_3 = {j3} but sum of r^2 = {}", describe(a), part.total));
        }
    }
    Ok((n, fails))
}

fn random_mobius(cx: &mut Ctx, ctx: PrimeContext) -> Mobius {
    loop {
        let m: Vec<u32> = (0..4).map(|_| cx.below(ctx.p64()) as u32).collect();
        if let Ok(g) = Mobius::canonicalize(ctx, m[0], m[1], m[2], m[3]) {
            return g;
        }
    }
}

fn random_proj(cx: &mut Ctx, ctx: PrimeContext) -> ProjPoint {
    match cx.below(ctx.p64() + 1) {
        x if x == ctx.p64() => ProjPoint::Infinity,
        x => ProjPoint::Finite(x as u32),
    }
}

fn check_mobius(cx: &mut Ctx) -> Result<(u64, Vec<String>)> {
    let mut fails = Vec::new();
    let mut trials = 0;
    let per_prime = cx.trials(1000);
    for p in [7u64, 13, 101] {
        let ctx = PrimeContext::new(p)?;
        for _ in 0..per_prime {
            let (g, h, x) = (random_mobius(cx, ctx), random_mobius(cx, ctx), random_proj(cx, ctx));
            if g.compose(&h).apply(x) != g.apply(h.apply(x)) {
                fails.push(format!("p={p}: homomorphism fails for g={g} h={h} x={x:?}"));
            }
        }
        trials += per_prime;
    }
    let n = cx.trials(10);
    for _ in 0..n {
        let a = cx.instance(10);
        let f = a.ctx();
        let part = prune_partition(&a, &cx.limits)?;
        for &(m, n) in &part.s {
            let g = Mobius::from_hyperbola(f, m, n)?;
            let c = f.half(f.sub(f.square(m), n));
            for a1 in a.iter().filter(|&x| x != m) {
                for a2 in a.iter() {
                    let on = f.mul(f.sub(m, a1), f.sub(m, a2)) == c;
                    if on != (g.apply(ProjPoint::Finite(a1)) == ProjPoint::Finite(a2)) {
                        fails.push(format!("{}: g_({m},{n}) disagrees with h_({m},{n}) at ({a1},{a2})", describe(&a)));
                    }
                }
            }
        }
        let ctx = cx.prime();
        let size = 1 + cx.below(40) as usize;
        let h = TransformFamily::new((0..size).map(|_| random_mobius(cx, ctx)).collect::<Vec<_>>());
        let brute = energy_eh(&h, EhAlgorithm::Brute, &cx.limits)?;
        let hash = energy_eh(&h, EhAlgorithm::Hash, &cx.limits)?;
        let right = energy_eh_with(&h, EhAlgorithm::Hash, Quotient::Right, &cx.limits)?;
        let q_sum: u64 = quotient_counts(&h, Quotient::Left, &cx.limits)?.values().sum();
        let hl = h.len() as u64;
        if brute != hash || hash != right {
            fails.push(format!("p={} |H|={hl}: E(H) brute/hash/right = {brute}/{hash}/{right}", ctx.p()));
        }
        if q_sum != hl * hl {
            fails.push(format!("p={} |H|={hl}: sum of q is {q_sum}", ctx.p()));
        }
        if hash < BigUint::from(hl * hl) {
            fails.push(format!("p={} |H|={hl}: E(H) = {hash} below |H|^2", ctx.p()));
        }
    }
    Ok((trials + n, fails))
}

fn random_points(cx: &mut Ctx, ctx: PrimeContext, max: u64) -> PointSet2D {
    let count = 1 + cx.below(max);
    let p = ctx.p64();
    PointSet2D::new(ctx, (0..count).map(|_| (cx.below(p) as u32, cx.below(p) as u32)).collect::<Vec<_>>())
}

fn all_translates(ctx: PrimeContext) -> Vec<Curve> {
    (0..ctx.p()).flat_map(|a| (0..ctx.p()).map(move |b| Curve::trans_parabola(ctx, (a, b)))).collect()
}

fn check_incidence(cx: &mut Ctx) -> Result<(u64, Vec<String>)> {
    let mut fails = Vec::new();
    let n = cx.trials(20);
    for i in 0..n {
        let ctx = PrimeContext::new([5u64, 7, 11, 13, 31, 101][i as usize % 6])?;
        let pts = random_points(cx, ctx, 40);
        let rep = parabola_second_moment(&pts, &cx.limits)?;
        if rep.total != rep.linear_term + rep.pair_term {
            fails.push(format!("p={}: second moment {} != {} + {}", ctx.p(), rep.total, rep.linear_term, rep.pair_term));
        }
        if ctx.p() <= 13 {
            let direct: u128 = all_translates(ctx)
                .iter()
                .map(|c| pts.points().iter().filter(|&&q| c.contains(q)).count() as u128)
                .map(|k| k * k)
                .sum();
            if direct != rep.total {
                fails.push(format!("p={}: enumerated second moment {direct} != {}", ctx.p(), rep.total));
            }
        }
    }
    let f13 = PrimeContext::new(13)?;
    let a = cx.random_set(f13, 8);
    let grid = PointSet2D::product(&a, &a);
    for q in grid.points() {
        if phi_map(f13, phi_map(f13, *q)) != *q {
            fails.push(format!("phi is not an involution at {q:?}"));
        }
    }
    let image = grid.map(|q| phi_map(f13, q));
    for x in a.iter().map(|t| (t, f13.square(t))) {
        let lhs = grid.points().iter().filter(|&&q| Curve::trans_parabola(f13, x).contains(q)).count();
        let rhs = image.points().iter().filter(|&&q| phi_line_image(f13, x).contains(q)).count();
        if lhs != rhs {
            fails.push(format!("p=13 {}: translate {x:?} meets {lhs} points, its line image {rhs}", describe(&a)));
        }
    }
    let budget_primes: &[u64] = if cx.factor >= 0.5 { &[5, 7, 11, 13] } else { &[5, 7] };
    for &p in budget_primes {
        let ctx = PrimeContext::new(p)?;
        let translates = all_translates(ctx);
        let pts: Vec<Point> = (0..ctx.p()).flat_map(|x| (0..ctx.p()).map(move |y| (x, y))).collect();
        let mut through: Vec<Vec<usize>> = vec![Vec::new(); pts.len()];
        for (ci, c) in translates.iter().enumerate() {
            for (pi, &q) in pts.iter().enumerate() {
                if c.contains(q) {
                    through[pi].push(ci);
                }
            }
        }
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let common = through[i].iter().filter(|c| through[j].binary_search(c).is_ok()).count();
                let expected = usize::from(pts[i].0 != pts[j].0);
                if common != expected {
                    fails.push(format!("p={p}: {:?} and {:?} share {common} translates", pts[i], pts[j]));
                }
            }
        }
    }
    Ok((n + 1 + budget_primes.len() as u64, fails))
}

/// Postconditions of a pruning run, checked against every curve of both families.
pub fn prune_failures(w: &PointSet2D, tau: u64, report: &crate::incidence::PruneReport) -> Vec<String> {
    let ctx = w.ctx();
    let mut fails = Vec::new();
    let mut seen: BTreeSet<Point> = report.remaining.points().iter().copied().collect();
    for class in &report.removed {
        if class.members.len() as u64 <= tau {
            fails.push(format!("class on {} has only {} members", class.curve, class.members.len()));
        }
        for &q in &class.members {
            if !class.curve.contains(q) {
                fails.push(format!("{q:?} is not on {}", class.curve));
            }
            if !seen.insert(q) {
                fails.push(format!("{q:?} appears twice"));
            }
        }
    }
    if seen.into_iter().collect::<Vec<_>>() != w.points() {
        fails.push("removed classes and W'' do not partition W".into());
    }
    if !w.is_empty() && report.removed.len() as u64 * tau >= w.len() as u64 {
        fails.push(format!("{} classes removed from |W| = {} at tau = {tau}", report.removed.len(), w.len()));
    }
    let mut curves: Vec<Curve> = (0..ctx.p()).map(|m| Curve::new(ctx, CurveKind::VLine { m }).expect("reduced")).collect();
    for alpha in 0..ctx.p() {
        for beta in 0..ctx.p() {
            curves.push(Curve::new(ctx, CurveKind::DownParabola { alpha, beta }).expect("reduced"));
        }
    }
    for c in &curves {
        let k = report.remaining.points().iter().filter(|&&q| c.contains(q)).count() as u64;
        if k > tau {
            fails.push(format!("{c} still carries {k} > {tau} points"));
        }
    }
    fails
}

fn check_prune(cx: &mut Ctx) -> Result<(u64, Vec<String>)> {
    let mut fails = Vec::new();
    let f101 = PrimeContext::new(101)?;
    let a = generate_set(f101, &SetSpec::interval(10))?;
    // 2𝒜 − 𝒜 is the support of r.
    let mut runs = vec![(PointSet2D::new(f101, crate::energy::rep_r3(&a, &cx.limits)?.support()), 4)];
    let n = cx.trials(10);
    while (runs.len() as u64) < n {
        let ctx = PrimeContext::new([11u64, 13, 17, 23][cx.below(4) as usize])?;
        let w = random_points(cx, ctx, 80);
        let tau = 1 + cx.below(4);
        runs.push((w, tau));
    }
    for (w, tau) in &runs {
        let report = prune_rich_curves(w, *tau, &CurveFamily::DEFAULT_ORDER)?;
        fails.extend(prune_failures(w, *tau, &report).into_iter().map(|e| format!("p={} tau={tau}: {e}", w.ctx().p())));
    }
    Ok((runs.len() as u64, fails))
}

fn random_weight(cx: &mut Ctx, ctx: PrimeContext, max: u64) -> WeightFunction {
    let count = 1 + cx.below(max);
    let vals: Vec<(Residue, f64)> = (0..count)
        .map(|_| {
            let n = cx.below(ctx.p64()) as u32;
            let v = (cx.below(2001) as f64 - 1000.0) / 250.0;
            (n, v)
        })
        .collect();
    let w = WeightFunction::new(ctx, vals);
    if w.support_len() == 0 {
        WeightFunction::new(ctx, [(0, 1.0)])
    } else {
        w
    }
}

fn check_expsum(cx: &mut Ctx) -> Result<(u64, Vec<String>)> {
    let mut fails = Vec::new();
    let n = cx.trials(20);
    for i in 0..n {
        let ctx = cx.prime();
        let mut w = random_weight(cx, ctx, 12);
        if i % 4 == 0 {
            // One large amplitude among many small ones.
            w = WeightFunction::new(ctx, w.iter().enumerate().map(|(j, (n, _))| (n, if j == 0 { 50.0 } else { 0.01 })));
        }
        let g = eval_f(&w, &cx.limits)?;
        let l2 = w.l2_norm().powi(2);
        if (g.lq_power(2) - l2).abs() > 1e-9 * l2 {
            fails.push(format!("p={}: Parseval gives {} vs {l2}", ctx.p(), g.lq_power(2)));
        }
        let v = vach_chain_check(&w, &cx.limits)?;
        if v.holds != (true, true) {
            fails.push(format!("p={}: L6/L4 chain fails: {v:?}", ctx.p()));
        }
    }
    let m = cx.trials(10);
    for _ in 0..m {
        let a = cx.instance(10);
        let g = eval_f(&WeightFunction::indicator(&a), &cx.limits)?;
        for s in [2u32, 3] {
            let got = orthogonality_count(&g, s)?;
            let want = j_energy(&a, s as usize, Algorithm::Auto, &cx.limits)?.value;
            if got != want {
                fails.push(format!("{} s={s}: orthogonality gives {got}, J_s = {want}", describe(&a)));
            }
        }
    }
    Ok((n + m, fails))
}

fn check_corollaries(cx: &mut Ctx) -> Result<(u64, Vec<String>)> {
    let mut fails = Vec::new();
    let n = cx.trials(10);
    for _ in 0..n {
        let a = cx.instance(8);
        let k3 = k_energy(&a, 3, &cx.limits)?.value;
        let j3 = j_energy(&a, 3, Algorithm::Auto, &cx.limits)?.value;
        let diff = a.signed_fold(3).len();
        if k3 > BigUint::from(diff) * &j3 {
            fails.push(format!("{}: K_3 = {k3} exceeds |3A-3A| J_3 = {diff}*{j3}", describe(&a)));
        }
        let sq = a.squares();
        let three = sq.s_fold(3).len();
        if BigUint::from(three) * &k3 < BigUint::from(sq.len()).pow(6) {
            fails.push(format!("{}: |3S| = {three} below |S|^6/K_3 with K_3 = {k3}", describe(&a)));
        }
    }
    let m = cx.trials(20);
    for _ in 0..m {
        let ctx = cx.prime();
        let a = cx.random_set(ctx, 8);
        let b = cx.random_set(ctx, 8);
        let k = 1 + cx.below(3) as u32;
        let rep = plunnecke_check(&a, &b, k)?;
        if !rep.holds {
            fails.push(format!("p={} A={:?} B={:?} k={k}: {rep:?}", ctx.p(), a.elements(), b.elements()));
        }
    }
    Ok((n + m, fails))
}

fn check_t(cx: &mut Ctx) -> Result<(u64, Vec<String>)> {
    let mut fails = Vec::new();
    let boot = t_energy(&ResidueSet::of(PrimeContext::new(7)?, &[1, 2]), Algorithm::Brute, &cx.limits)?.value;
    if boot != BigUint::from(20u32) {
        fails.push(format!("T({{1,2}} mod 7) = {boot}, expected 20"));
    }
    let n = cx.trials(15);
    for i in 0..n {
        let mut a = cx.instance(8);
        if i % 3 == 0 && !a.contains(0) {
            let mut e = a.elements().to_vec();
            e.push(0);
            a = ResidueSet::from_residues(a.ctx(), e, "with-zero")?;
        }
        let brute = t_energy(&a, Algorithm::Brute, &cx.limits)?.value;
        let inc = t_energy(&a, Algorithm::Incidence, &cx.limits)?.value;
        if brute != inc {
            fails.push(format!("{}: T brute {brute} != incidence {inc}", describe(&a)));
        }
    }
    Ok((n + 1, fails))
}

fn check_sweep(cx: &mut Ctx) -> Result<(u64, Vec<String>)> {
    let rows = run_sweep(&SetSpec::interval(1), &[1, 4, 6, 8], 3, DEFAULT_PRIME_FACTOR, &cx.limits)?;
    let fails = rows
        .iter()
        .filter(|r| !(r.lower_exact && r.ratio_lower >= 1.0))
        .map(|r| format!("N={}: lower bound ratio {}", r.n, r.ratio_lower))
        .collect();
    Ok((rows.len() as u64, fails))
}

/// Level of a hyperbola count relative to `Δ`, as used by the partition.
pub fn hyperbola_level(count: u64, delta: u64) -> u32 {
    dyadic_level(count, Scale::integer(delta.max(1)))
}
