//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use common::*;
use num_bigint::BigUint;
use vmv::energy::{j_energy, k_energy, prune_partition, t_energy, Algorithm};
use vmv::expsum::{eval_f, orthogonality_count, vach_chain_check, WeightFunction};
use vmv::harness::cli::run_with_io;
use vmv::harness::fit::fit_exponent;
use vmv::harness::manifest::Manifest;
use vmv::harness::sweep::{run_sweep, DEFAULT_PRIME_FACTOR};
use vmv::incidence::{
    parabola_second_moment, phi_line_image, phi_map, prune_rich_curves, CurveFamily, PointSet2D,
};
use vmv::moebius::{energy_eh, energy_eh_with, quotient_counts, EhAlgorithm, Mobius, Quotient, TransformFamily};
use vmv::setlib::plunnecke_check;
use vmv::{Limits, PrimeContext, ProjPoint, ResidueSet, SetSpec};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn big(x: u128) -> BigUint {
    BigUint::from(x)
}

fn limits() -> Limits {
    Limits::default()
}

fn j(set: &ResidueSet, s: usize, algo: Algorithm) -> Result<BigUint, String> {
    j_energy(set, s, algo, &limits()).map(|r| r.value).map_err(|e| e.to_string())
}

fn c1_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut inst = Instances::new(1);
    for i in 0..50 {
        let (p, a, set) = inst.set(10);
        let s = 2 + i % 2;
        let oracle = big(brute_j(p, &a, s));
        for algo in [Algorithm::Brute, Algorithm::Mitm, Algorithm::Conv] {
            let got = j(&set, s, algo)?;
            ensure!(got == oracle, "p={p} A={a:?} s={s}: {algo} gives {got}, enumeration gives {oracle}");
        }
    }
    let t = start.elapsed();
    ensure!(t <= Duration::from_secs(60), "took {t:?}");
    Ok(format!("50 instances in {:.2} s", t.as_secs_f64()))
}

fn c2_closed_forms() -> Outcome {
    let boot = brute_j(5, &[0, 1, 2, 3, 4], 3);
    ensure!(boot == 725, "enumeration of F_5 gives {boot}, expected 725");
    for p in [3u64, 5, 7] {
        let full = ResidueSet::full(PrimeContext::new(p).unwrap());
        let got = j(&full, 3, Algorithm::Auto)?;
        let formula = big((p.pow(4) + (p - 1) * p * p) as u128);
        ensure!(got == formula, "J_3(F_{p}) = {got}, formula {formula}");
    }
    let mut inst = Instances::new(2);
    let mut tested = 0;
    for _ in 0..60 {
        let (p, a, set) = inst.set(12);
        let k = a.len() as u128;
        let got = j(&set, 2, Algorithm::Auto)?;
        ensure!(got == big(2 * k * k - k), "p={p} A={a:?}: J_2 = {got}");
        tested += 1;
    }
    Ok(format!("F_3, F_5, F_7 and {tested} J_2 instances"))
}

fn c3_lower_bounds() -> Outcome {
    let mut inst = Instances::new(3);
    for _ in 0..40 {
        let (p, a, set) = inst.set(9);
        let k = a.len() as u128;
        let mut prev = big(k);
        for s in 2..=3usize {
            let js = j(&set, s, Algorithm::Auto)?;
            let sumset = moment_sumset_size(p, &a, s) as u128;
            let ceil = (k.pow(2 * s as u32)).div_ceil(sumset);
            ensure!(js >= big(k.pow(s as u32)), "p={p} A={a:?} s={s}: J = {js} < |A|^s");
            ensure!(js >= big(ceil), "p={p} A={a:?} s={s}: J = {js} < ceil(|A|^2s/|sA|) = {ceil}");
            let upper = big(k) * &prev + big(k.pow(2 * s as u32 - 2));
            ensure!(js <= upper, "p={p} A={a:?} s={s}: J = {js} > {upper}");
            prev = js;
        }
    }
    Ok("40 instances, s = 2, 3".into())
}

fn c4_partition() -> Outcome {
    let mut inst = Instances::new(4);
    let mut cases = vec![(101u64, (1..=10).collect::<Vec<u64>>())];
    while cases.len() < 20 {
        let (p, a, _) = inst.set(12);
        cases.push((p, a));
    }
    for (p, a) in &cases {
        let (p, set) = (*p, residue_set(*p, a));
        let tag = format!("p={p} A={a:?}");
        let r = brute_r3(p, a);
        let part = prune_partition(&set, &limits()).map_err(|e| e.to_string())?;
        let total: u128 = r.values().map(|&c| (c as u128).pow(2)).sum();
        let j3 = j(&set, 3, Algorithm::Auto)?;
        ensure!(j3 == big(total) && part.total == big(total), "{tag}: J_3 {j3}, partition {}, oracle {total}", part.total);
        let conv = |v: &[(u32, u32)]| -> BTreeSet<(u64, u64)> { v.iter().map(|&(m, n)| (m as u64, n as u64)).collect() };
        let pick = |f: &dyn Fn(u64, u64) -> bool| -> BTreeSet<(u64, u64)> {
            r.keys().copied().filter(|&(m, n)| f(m, n)).collect()
        };
        ensure!(conv(&part.s1) == pick(&|m, _| m == 0), "{tag}: S1");
        ensure!(conv(&part.s2) == pick(&|_, n| n == 0), "{tag}: S2");
        ensure!(conv(&part.s3) == pick(&|m, n| m * m % p == n), "{tag}: S3");
        let s = pick(&|m, n| m != 0 && n != 0 && m * m % p != n);
        ensure!(conv(&part.s) == s, "{tag}: S");
        let k = a.len() as u128;
        let delta = part.delta as u128;
        ensure!(delta.pow(9) >= k.pow(8) && (delta == 0 || (delta - 1).pow(9) < k.pow(8)), "{tag}: delta {delta}");
        let u: BTreeSet<_> = s.iter().copied().filter(|pt| r[pt] as u128 <= delta).collect();
        let v: BTreeSet<_> = s.iter().copied().filter(|pt| r[pt] as u128 > delta).collect();
        ensure!(conv(&part.u) == u && conv(&part.v) == v, "{tag}: U/V");
        let mut classified = BTreeSet::new();
        for class in &part.v_classes.classes {
            for &(m, n) in &class.members {
                let h = hyperbola_count(p, a, m as u64, n as u64) as u128;
                let i = class.level;
                ensure!((delta << (i - 1)) < h && h <= (delta << i), "{tag}: ({m},{n}) h={h} not in V_{i}");
                classified.insert((m as u64, n as u64));
            }
        }
        ensure!(classified == v && part.v_classes.sub_base.is_empty(), "{tag}: V_i do not partition V");
        for &(m, n) in &s {
            let h = hyperbola_count(p, a, m, n);
            ensure!(r[&(m, n)] <= h, "{tag}: r({m},{n}) = {} > {h}", r[&(m, n)]);
        }
    }
    Ok("20 instances".into())
}

fn random_matrix(inst: &mut Instances, p: u64) -> [u64; 4] {
    loop {
        let m = [inst.below(p), inst.below(p), inst.below(p), inst.below(p)];
        if !(m[0] * m[3] + p * p - m[1] * m[2]).is_multiple_of(p) {
            return canon(p, m);
        }
    }
}

fn to_mobius(p: u64, m: [u64; 4]) -> Mobius {
    let ctx = PrimeContext::new(p).unwrap();
    Mobius::canonicalize(ctx, m[0] as u32, m[1] as u32, m[2] as u32, m[3] as u32).unwrap()
}

fn proj(p: u64, x: u64) -> ProjPoint {
    if x == p {
        ProjPoint::Infinity
    } else {
        ProjPoint::Finite(x as u32)
    }
}

fn c5_mobius() -> Outcome {
    let mut inst = Instances::new(5);
    for p in [7u64, 13, 101] {
        for _ in 0..1000 {
            let (g, h) = (random_matrix(&mut inst, p), random_matrix(&mut inst, p));
            let x = inst.below(p + 1);
            let (mg, mh) = (to_mobius(p, g), to_mobius(p, h));
            let lhs = mg.compose(&mh).apply(proj(p, x));
            let rhs = mg.apply(mh.apply(proj(p, x)));
            let oracle = mobius_apply(p, g, mobius_apply(p, h, x));
            ensure!(lhs == rhs && lhs == proj(p, oracle), "p={p} g={g:?} h={h:?} x={x}");
            ensure!(mg.compose(&mh).entries().map(u64::from) == matmul(p, g, h), "p={p}: product of {g:?}, {h:?}");
        }
    }
    for _ in 0..10 {
        let (p, a, set) = inst.set(10);
        let part = prune_partition(&set, &limits()).map_err(|e| e.to_string())?;
        let ctx = set.ctx();
        let c2 = inv(2, p);
        for &(m, n) in &part.s {
            let (m, n) = (m as u64, n as u64);
            let g = Mobius::from_hyperbola(ctx, m as u32, n as u32).map_err(|e| e.to_string())?;
            let expected = canon(p, [m, (2 * p * p - m * m - n) % p * c2 % p, 1, p - m]);
            ensure!(g.entries().map(u64::from) == expected, "p={p}: g_({m},{n}) = {g}");
            let c = (m * m + p - n) % p * c2 % p;
            for &x in &a {
                for &y in &a {
                    let on = (m + p - x) % p * ((m + p - y) % p) % p == c;
                    let maps = g.apply(proj(p, x)) == proj(p, y);
                    ensure!(x == m || on == maps, "p={p} A={a:?}: h_({m},{n}) vs g at ({x},{y})");
                }
            }
        }
    }
    for trial in 0..12 {
        let p = [7u64, 11, 13, 101][trial % 4];
        let size = 1 + inst.below(40) as usize;
        let mats: Vec<[u64; 4]> = {
            let set: BTreeSet<[u64; 4]> = (0..size).map(|_| random_matrix(&mut inst, p)).collect();
            set.into_iter().collect()
        };
        let h = TransformFamily::new(mats.iter().map(|&m| to_mobius(p, m)).collect::<Vec<_>>());
        let oracle = big(brute_eh(p, &mats));
        let lim = limits();
        let brute = energy_eh(&h, EhAlgorithm::Brute, &lim).map_err(|e| e.to_string())?;
        let hash = energy_eh(&h, EhAlgorithm::Hash, &lim).map_err(|e| e.to_string())?;
        let right = energy_eh_with(&h, EhAlgorithm::Hash, Quotient::Right, &lim).map_err(|e| e.to_string())?;
        ensure!(brute == oracle && hash == oracle && right == oracle, "p={p} |H|={}: {brute} {hash} {right} vs {oracle}", mats.len());
        let q_sum: u64 = quotient_counts(&h, Quotient::Left, &lim).map_err(|e| e.to_string())?.values().sum();
        ensure!(q_sum as usize == mats.len().pow(2), "q sum {q_sum}");
    }
    Ok("3000 triples, 10 hyperbola instances, 12 families".into())
}

fn random_points(inst: &mut Instances, p: u64, max: u64) -> Vec<(u64, u64)> {
    let n = 1 + inst.below(max);
    let set: BTreeSet<(u64, u64)> = (0..n).map(|_| (inst.below(p), inst.below(p))).collect();
    set.into_iter().collect()
}

fn point_set(p: u64, pts: &[(u64, u64)]) -> PointSet2D {
    PointSet2D::new(PrimeContext::new(p).unwrap(), pts.iter().map(|&(x, y)| (x as u32, y as u32)))
}

fn c6_incidence() -> Outcome {
    let mut inst = Instances::new(6);
    for i in 0..20 {
        let p = [5u64, 7, 11, 13, 31, 101][i % 6];
        let pts = random_points(&mut inst, p, 30);
        let rep = parabola_second_moment(&point_set(p, &pts), &limits()).map_err(|e| e.to_string())?;
        let pairs = pts.iter().flat_map(|a| pts.iter().map(move |b| (a, b))).filter(|(a, b)| a.0 != b.0).count() as u128;
        let linear = (p as u128) * pts.len() as u128;
        ensure!(rep.total == linear + pairs && rep.pair_term == pairs && rep.linear_term == linear, "p={p}: {rep:?}, pairs {pairs}");
        if p <= 13 {
            let mut total = 0u128;
            for a in 0..p {
                for b in 0..p {
                    let k = pts.iter().filter(|&&q| on_translate(p, q, (a, b))).count() as u128;
                    total += k * k;
                }
            }
            ensure!(total == rep.total, "p={p}: enumerated {total} vs {}", rep.total);
        }
    }
    let p = 13;
    let f = PrimeContext::new(p).unwrap();
    let a = inst.subset(p, 8);
    let grid: Vec<(u64, u64)> = a.iter().flat_map(|&x| a.iter().map(move |&y| (x, y))).collect();
    for &(x, y) in &grid {
        let img = phi_map(f, (x as u32, y as u32));
        ensure!(img == (x as u32, ((x * x + p - y) % p) as u32), "phi({x},{y}) = {img:?}");
        ensure!(phi_map(f, img) == (x as u32, y as u32), "phi not an involution at ({x},{y})");
    }
    let image: Vec<(u64, u64)> = grid.iter().map(|&(x, y)| (x, (x * x + p - y) % p)).collect();
    for x1 in 0..p {
        for x2 in 0..p {
            let line = phi_line_image(f, (x1 as u32, x2 as u32));
            let lhs = grid.iter().filter(|&&q| on_translate(p, q, (x1, x2))).count();
            let on_line = |&(t, y): &(u64, u64)| y == (2 * x1 * t + 2 * p * p - x1 * x1 - x2) % p;
            let rhs = image.iter().filter(|q| on_line(q)).count();
            let lib = image.iter().filter(|&&(t, y)| line.contains((t as u32, y as u32))).count();
            ensure!(lhs == rhs && rhs == lib, "p=13 translate ({x1},{x2}): {lhs} vs {rhs} vs {lib}");
        }
    }
    for p in [5u64, 7, 11, 13] {
        let all: Vec<(u64, u64)> = (0..p).flat_map(|x| (0..p).map(move |y| (x, y))).collect();
        for &u in &all {
            for &v in all.iter().filter(|&&v| v > u) {
                let common = (0..p)
                    .flat_map(|a| (0..p).map(move |b| (a, b)))
                    .filter(|&t| on_translate(p, u, t) && on_translate(p, v, t))
                    .count();
                ensure!(common == usize::from(u.0 != v.0), "p={p}: {u:?}, {v:?} share {common} translates");
            }
        }
    }
    let mut w: Vec<(u64, u64)> = brute_r3(101, &(1..=10).collect::<Vec<_>>()).into_keys().collect();
    w.sort_unstable();
    let mut runs: Vec<(u64, Vec<(u64, u64)>, u64)> = vec![(101, w, 4)];
    while runs.len() < 10 {
        let p = [11u64, 13, 17, 23][inst.below(4) as usize];
        let mut pts = random_points(&mut inst, p, 60);
        // Plant a rich parabola so removals actually happen.
        let (alpha, beta) = (inst.below(p), inst.below(p));
        pts.extend((0..p).step_by(2).map(|x| (x, (beta + p - (x + p - alpha) % p * ((x + p - alpha) % p) % p) % p)));
        pts.sort_unstable();
        pts.dedup();
        runs.push((p, pts, 1 + inst.below(4)));
    }
    let mut removed_total = 0;
    for (p, pts, tau) in &runs {
        let (p, tau) = (*p, *tau);
        let rep = prune_rich_curves(&point_set(p, pts), tau, &CurveFamily::DEFAULT_ORDER).map_err(|e| e.to_string())?;
        let remaining: Vec<(u64, u64)> = rep.remaining.points().iter().map(|&(x, y)| (x as u64, y as u64)).collect();
        let mut seen: BTreeSet<(u64, u64)> = remaining.iter().copied().collect();
        for class in &rep.removed {
            ensure!(class.members.len() as u64 > tau, "p={p}: class on {} has {} members", class.curve, class.members.len());
            for &(x, y) in &class.members {
                ensure!(class.curve.contains((x, y)), "p={p}: ({x},{y}) off {}", class.curve);
                ensure!(seen.insert((x as u64, y as u64)), "p={p}: ({x},{y}) removed twice");
            }
        }
        ensure!(seen.into_iter().collect::<Vec<_>>() == *pts, "p={p}: removed and W'' do not partition W");
        ensure!((rep.removed.len() as u64) * tau < pts.len() as u64, "p={p}: {} removals", rep.removed.len());
        for alpha in 0..p {
            for beta in 0..p {
                let k = remaining.iter().filter(|&&q| on_down_parabola(p, q, (alpha, beta))).count() as u64;
                ensure!(k <= tau, "p={p}: down-parabola ({alpha},{beta}) keeps {k} > {tau}");
            }
        }
        for m in 0..p {
            let k = remaining.iter().filter(|q| q.0 == m).count() as u64;
            ensure!(k <= tau, "p={p}: vertical line x={m} keeps {k} > {tau}");
        }
        removed_total += rep.removed.len();
    }
    Ok(format!("20 second moments, phi at p=13, dichotomy at p<=13, 10 prune runs ({removed_total} classes removed)"))
}

fn c7_expsum() -> Outcome {
    let mut inst = Instances::new(7);
    let lim = limits();
    for i in 0..20 {
        let p = inst.prime();
        let support = inst.subset(p, 12);
        let w: Vec<(u64, f64)> = support
            .iter()
            .enumerate()
            .map(|(j, &n)| {
                let v = if i % 4 == 0 {
                    if j == 0 { 50.0 } else { 0.01 }
                } else {
                    (inst.below(2001) as f64 - 1000.0) / 250.0
                };
                (n, if v == 0.0 { 0.5 } else { v })
            })
            .collect();
        let wf = WeightFunction::new(PrimeContext::new(p).unwrap(), w.iter().map(|&(n, v)| (n as u32, v)));
        let grid = eval_f(&wf, &lim).map_err(|e| e.to_string())?;
        let l2sq: f64 = w.iter().map(|&(_, v)| v * v).sum();
        let parseval = grid.lq_power(2);
        ensure!((parseval - l2sq).abs() <= 1e-9 * l2sq, "p={p}: ||F||_2^2 = {parseval}, ||a||^2 = {l2sq}");
        let p2 = (p * p) as f64;
        let (l4, l6) = (direct_power_sum(p, &w, 4) / p2, direct_power_sum(p, &w, 6) / p2);
        let rep = vach_chain_check(&wf, &lim).map_err(|e| e.to_string())?;
        ensure!((rep.l6_sixth - l6).abs() <= 1e-9 * l6 && (rep.l4_fourth - l4).abs() <= 1e-9 * l4, "p={p}: norms {rep:?} vs {l4}, {l6}");
        let k = w.len() as f64;
        let tol = 1.0 + 1e-6;
        ensure!(l4 <= 2.0 * l2sq * l2sq * tol, "p={p}: L4^4 = {l4} > 2||a||^4");
        ensure!(l6 <= k * l2sq * l4 * tol, "p={p}: L6^6 = {l6} > |A| ||a||^2 L4^4");
        ensure!(k * l2sq * l4 <= 2.0 * k * l2sq.powi(3) * tol, "p={p}: step 2");
        ensure!(rep.holds == (true, true), "p={p}: report {rep:?}");
    }
    for _ in 0..10 {
        let (p, a, set) = inst.set(10);
        let w: Vec<(u64, f64)> = a.iter().map(|&n| (n, 1.0)).collect();
        let j3 = brute_j(p, &a, 3);
        let scaled = direct_power_sum(p, &w, 6) / (p * p) as f64;
        ensure!((scaled - j3 as f64).abs() < 0.25, "p={p} A={a:?}: L6^6 = {scaled}, J_3 = {j3}");
        let grid = eval_f(&WeightFunction::indicator(&set), &lim).map_err(|e| e.to_string())?;
        for s in [2u32, 3] {
            let got = orthogonality_count(&grid, s).map_err(|e| e.to_string())?;
            ensure!(got == big(brute_j(p, &a, s as usize)), "p={p} A={a:?} s={s}: {got}");
        }
    }
    Ok("20 weight functions, 10 orthogonality instances".into())
}

fn c8_corollaries() -> Outcome {
    let mut inst = Instances::new(8);
    for _ in 0..10 {
        let (p, a, set) = inst.set(8);
        let k3 = brute_k(p, &a, 3);
        let lib = k_energy(&set, 3, &limits()).map_err(|e| e.to_string())?.value;
        ensure!(lib == big(k3), "p={p} A={a:?}: K_3 {lib} vs {k3}");
        let j3 = brute_j(p, &a, 3);
        let diff = signed_sumset_size(p, &a, 3, 3) as u128;
        ensure!(k3 <= diff * j3, "p={p} A={a:?}: K_3 = {k3} > |3A-3A| J_3 = {diff}*{j3}");
        let squares: Vec<u64> = a.iter().map(|x| x * x % p).collect::<BTreeSet<_>>().into_iter().collect();
        let three_s = signed_sumset_size(p, &squares, 3, 0) as u128;
        let need = (squares.len() as u128).pow(6).div_ceil(k3);
        ensure!(three_s >= need, "p={p} A={a:?}: |3S| = {three_s} < {need}");
        ensure!(three_s * k3 >= (a.len() as u128).pow(6), "p={p} A={a:?}: |3S| K_3 < |A|^6");
    }
    for _ in 0..20 {
        let p = inst.prime();
        let (a, b) = (inst.subset(p, 6), inst.subset(p, 6));
        let k = 1 + inst.below(3) as u32;
        let rep = plunnecke_check(&residue_set(p, &a), &residue_set(p, &b), k).map_err(|e| e.to_string())?;
        let lhs = signed_sumset_size(p, &a, k as usize, k as usize) as u128;
        let ab = sumset_size(p, &a, &b) as u128;
        let bl = b.len() as u128;
        let holds = lhs * bl.pow(2 * k) <= ab.pow(2 * k) * bl;
        ensure!(rep.lhs as u128 == lhs, "p={p}: |kA-kA| {} vs {lhs}", rep.lhs);
        ensure!(holds && rep.holds, "p={p} A={a:?} B={b:?} k={k}: {rep:?}");
    }
    Ok("10 corollary chains, 20 Plunnecke instances".into())
}

fn c9_t_energy() -> Outcome {
    let boot = brute_t(7, &[1, 2]);
    ensure!(boot == 20, "enumeration gives T({{1,2}}) = {boot}");
    let lim = limits();
    let lib = t_energy(&residue_set(7, &[1, 2]), Algorithm::Incidence, &lim).map_err(|e| e.to_string())?.value;
    ensure!(lib == big(20), "incidence path gives T({{1,2}}) = {lib}");
    let mut inst = Instances::new(9);
    let mut with_zero = 0;
    for i in 0..15 {
        let p = inst.prime();
        let mut a = inst.subset(p, 8);
        if i % 3 == 0 && !a.contains(&0) {
            a.insert(0, 0);
        }
        with_zero += usize::from(a.contains(&0));
        let set = residue_set(p, &a);
        let oracle = big(brute_t(p, &a));
        let brute = t_energy(&set, Algorithm::Brute, &lim).map_err(|e| e.to_string())?.value;
        let inc = t_energy(&set, Algorithm::Incidence, &lim).map_err(|e| e.to_string())?.value;
        ensure!(brute == oracle && inc == oracle, "p={p} A={a:?}: brute {brute}, incidence {inc}, oracle {oracle}");
    }
    ensure!(with_zero >= 5, "only {with_zero} instances contain 0");
    Ok(format!("15 instances, {with_zero} with 0"))
}

fn cli(argv: &[&str], dir: &std::path::Path) -> (i32, String) {
    let argv: Vec<String> = std::iter::once("vmv").chain(argv.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let prev = std::env::current_dir().unwrap();
    std::env::set_current_dir(dir).unwrap();
    let code = run_with_io(&argv, &mut out, &mut err);
    std::env::set_current_dir(prev).unwrap();
    (code, String::from_utf8_lossy(&out).into_owned() + &String::from_utf8_lossy(&err))
}

fn c10_reports() -> Outcome {
    let start = Instant::now();
    let sizes = [8u64, 12, 16, 24, 32];
    let rows = run_sweep(&SetSpec::interval(1), &sizes, 3, DEFAULT_PRIME_FACTOR, &limits()).map_err(|e| e.to_string())?;
    ensure!(rows.len() == sizes.len(), "{} rows", rows.len());
    for r in &rows {
        ensure!(r.p >= 4 * r.n * r.n && r.p < 8 * r.n * r.n, "N={}: p = {}", r.n, r.p);
        ensure!(r.ratio_lower >= 1.0 && r.lower_exact, "N={}: ratio_lower {}", r.n, r.ratio_lower);
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.a_len as f64, r.j_s.parse().unwrap())).collect();
    let fit = fit_exponent(&pts).map_err(|e| e.to_string())?;
    ensure!(fit.slope > 3.0 && fit.slope < 4.0, "fitted exponent {}", fit.slope);

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (code, msg) = cli(&["sweep", "--kind", "interval", "--sizes", "8,12,16,24,32", "--s", "3", "--out", "sweep.csv"], dir.path());
    ensure!(code == 0, "sweep exited {code}: {msg}");
    let first = std::fs::read(dir.path().join("sweep.csv")).map_err(|e| e.to_string())?;
    let manifest = Manifest::path_for(std::path::Path::new("sweep.csv"));
    let (code, msg) = cli(&["replay", manifest.to_str().unwrap()], dir.path());
    ensure!(code == 0, "replay exited {code}: {msg}");
    let (code, _) = cli(&["sweep", "--kind", "interval", "--sizes", "8,12,16,24,32", "--s", "3", "--out", "again.csv"], dir.path());
    ensure!(code == 0, "second sweep exited {code}");
    let second = std::fs::read(dir.path().join("again.csv")).map_err(|e| e.to_string())?;
    let strip = |b: &[u8]| -> Vec<String> {
        String::from_utf8_lossy(b).lines().map(|l| l.rsplit_once(',').map(|(h, _)| h.to_string()).unwrap_or_default()).collect()
    };
    ensure!(strip(&first) == strip(&second), "sweep rows differ between runs");
    let t = start.elapsed();
    ensure!(t <= Duration::from_secs(300), "took {t:?}");
    let counts: HashMap<_, _> = rows.iter().map(|r| (r.n, r.j_s.clone())).collect();
    Ok(format!("slope {:.4}, J_3(N=32) = {}, {:.2} s, replay matched", fit.slope, counts[&32], t.as_secs_f64()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle equivalence", c1_oracle_equivalence),
        ("closed forms", c2_closed_forms),
        ("lower and upper bounds", c3_lower_bounds),
        ("partition pipeline", c4_partition),
        ("mobius layer", c5_mobius),
        ("incidence layer", c6_incidence),
        ("exponential sums", c7_expsum),
        ("corollary chains", c8_corollaries),
        ("T energy", c9_t_energy),
        ("reports", c10_reports),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
