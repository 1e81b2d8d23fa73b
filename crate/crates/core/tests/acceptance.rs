//! Acceptance suite. Each criterion recomputes its reference values with
//! test-side oracles and prints one PASS/FAIL line.

use std::collections::{HashMap, HashSet, VecDeque};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use boxlab::arith;
use boxlab::boxspace::{self, rational, DAlphaParams, ExpansionVerdict, KConstant};
use boxlab::cayley::{
    central_distortion_heisenberg, cheeger_exact, spectral_gap, CayleyGraph, GraphMetrics, MetricsConfig,
    DEFAULT_MAX_VERTICES,
};
use boxlab::census;
use boxlab::coarse::{self, AlmostPermutation, MatchingVerdict, Side, VolumeSequence};
use boxlab::groups::{lamplighter_modulus, Element, Group, GroupSpec, Lamp, ZxZ2Kind};
use boxlab::report::{self, VerifyConfig};
use boxlab::wreath::{self, LampBijection, WreathMap};
use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MAXV: u64 = DEFAULT_MAX_VERTICES;

// ---- oracles ----------------------------------------------------------

fn pisano_naive(n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    let (mut a, mut b, mut k) = (0u64, 1u64, 0u64);
    loop {
        (a, b) = (b, (a + b) % n);
        k += 1;
        if a == 0 && b == 1 {
            return k;
        }
    }
}

fn rank_naive(n: u64) -> u64 {
    let (mut a, mut b, mut k) = (0u64, 1u64, 0u64);
    loop {
        (a, b) = (b, (a + b) % n);
        k += 1;
        if a == 0 {
            return k;
        }
    }
}

fn fib_u64(n: u64) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

fn lucas_u64(n: u64) -> u64 {
    let (mut a, mut b) = (2u64, 1u64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

fn det_mod(m: &[i64], k: usize, n: i64) -> i64 {
    if k == 1 {
        return m[0].rem_euclid(n);
    }
    let mut total = 0i64;
    for col in 0..k {
        let minor: Vec<i64> =
            (1..k).flat_map(|r| (0..k).filter(move |&c| c != col).map(move |c| (r, c))).map(|(r, c)| m[r * k + c]).collect();
        let sign = if col % 2 == 0 { 1 } else { -1 };
        total = (total + sign * m[col] * det_mod(&minor, k - 1, n)).rem_euclid(n);
    }
    total
}

fn sl_count_naive(k: usize, n: i64) -> u64 {
    let cells = k * k;
    let mut m = vec![0i64; cells];
    let mut count = 0;
    loop {
        if det_mod(&m, k, n) == 1 % n {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == cells {
                return count;
            }
            m[i] += 1;
            if m[i] < n {
                break;
            }
            m[i] = 0;
            i += 1;
        }
    }
}

/// Breadth-first distances straight from the group law, without the
/// Cayley graph builder.
fn bfs_group(spec: &GroupSpec) -> HashMap<Element, u32> {
    let g = Group::new(spec).expect("valid spec");
    let gens = g.generator_elements();
    let mut dist = HashMap::new();
    let id = g.identity();
    dist.insert(id, 0);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        for s in &gens {
            let y = g.mul_unchecked(&x, s);
            dist.entry(y).or_insert_with(|| {
                queue.push_back(y);
                d + 1
            });
        }
    }
    dist
}

fn diameter_group(spec: &GroupSpec) -> (u64, u32) {
    let d = bfs_group(spec);
    (d.len() as u64, d.values().copied().max().unwrap_or(0))
}

fn dense_lambda1(g: &CayleyGraph) -> f64 {
    let n = g.order();
    let d = g.degree() as f64;
    let mut a = DMatrix::<f64>::zeros(n, n);
    for u in 0..n {
        for &v in g.neighbors(u) {
            a[(u, v as usize)] += 1.0 / d;
        }
    }
    let mut ev: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    1.0 - ev[1]
}

fn cheeger_naive(g: &CayleyGraph) -> f64 {
    let n = g.order();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) - 1 {
        let size = mask.count_ones() as usize;
        if size > n / 2 {
            continue;
        }
        let mut boundary = 0usize;
        for u in 0..n {
            if mask >> u & 1 == 1 {
                boundary += g.neighbors(u).iter().filter(|&&v| mask >> v & 1 == 0).count();
            }
        }
        best = best.min(boundary as f64 / size as f64);
    }
    best
}

/// Re-checks a matching verdict from scratch with big-integer ratios.
fn recheck_verdict(a: &[BigUint], b: &[BigUint], v: &MatchingVerdict, d: u64, r: &BigRational, h: u64) -> bool {
    let ok_pair = |i: u64, j: u64| {
        if i.abs_diff(j) > d {
            return false;
        }
        let (x, y) = (BigRational::from_integer(a[i as usize - 1].clone().into()), BigRational::from_integer(b[j as usize - 1].clone().into()));
        x <= (r * &y) && y <= (r * &x)
    };
    let (lo, hi) = (d + 1, h - d);
    match (&v.assignment, &v.obstruction) {
        (Some(pairs), _) => {
            let left: HashSet<u64> = pairs.iter().map(|p| p.0).collect();
            let right: HashSet<u64> = pairs.iter().map(|p| p.1).collect();
            left.len() == pairs.len()
                && right.len() == pairs.len()
                && pairs.iter().all(|&(i, j)| ok_pair(i, j))
                && (lo..=hi).all(|k| left.contains(&k) && right.contains(&k))
        }
        (None, Some(hv)) => {
            let nbrs: HashSet<u64> = hv
                .indices
                .iter()
                .flat_map(|&i| (1..=h).filter(move |&j| if hv.side == Side::A { ok_pair(i, j) } else { ok_pair(j, i) }))
                .collect();
            hv.indices.iter().all(|&i| (lo..=hi).contains(&i)) && nbrs.len() < hv.indices.len()
        }
        _ => false,
    }
}

// ---- criteria ---------------------------------------------------------

fn c1_fibonacci_pisano() -> bool {
    let mut ok = true;
    for n in (5..=17).step_by(2) {
        let f = fib_u64(n);
        ok &= pisano_naive(f) == 4 * n && arith::pisano(f).unwrap() == 4 * n;
    }
    for n in 2..=5000u64 {
        let p = pisano_naive(n);
        ok &= arith::pisano(n).unwrap() == p && p <= 6 * n;
        let t = (1..).take_while(|&t| lucas_u64(t) <= n).last().unwrap_or(0);
        ok &= p >= 2 * t;
    }
    for k in 1..=6 {
        let m = 5u64.pow(k);
        ok &= rank_naive(m) == m && arith::rank_of_apparition(m).unwrap() == m;
    }
    ok &= [(2, 3), (3, 4), (4, 6)].iter().all(|&(n, a)| rank_naive(n) == a && arith::rank_of_apparition(n).unwrap() == a);
    // δ(F_3) = δ(2) = 3, not 12; the suite has to say so.
    ok &= pisano_naive(fib_u64(3)) == 3;
    let r = report::fibonacci_pisano(&VerifyConfig::default()).unwrap();
    ok &= r.passed && r.details["delta_F3"] == 3 && r.notes.iter().any(|n| n.contains("anomaly"));
    ok
}

fn c2_sl_order() -> bool {
    let mut cases: Vec<(u32, u64)> = (2..=9).map(|n| (2, n)).collect();
    cases.extend([(3, 2), (3, 3)]);
    let mut ok = cases
        .iter()
        .all(|&(m, n)| arith::sl_order(m, n).unwrap() == BigUint::from(sl_count_naive(m as usize, n as i64)));
    ok &= sl_count_naive(2, 2) == 6 && sl_count_naive(3, 2) == 168;
    ok && report::sl_order(&VerifyConfig::default()).unwrap().passed
}

fn c3_lamplighter() -> bool {
    let mut ok = true;
    let mut metrics = Vec::new();
    for (k, (ell, order)) in [(3u64, 12u64), (21, 672), (651, 666_624)].into_iter().enumerate() {
        let k = k + 1;
        // Order of X modulo P_1⋯P_k by repeated multiplication.
        let m = lamplighter_modulus(k).unwrap().bits();
        let deg = 63 - m.leading_zeros();
        let mut x = 2u64;
        let mut t = 1u64;
        while x != 1 {
            x <<= 1;
            if x >> deg & 1 == 1 {
                x ^= m;
            }
            t += 1;
        }
        ok &= t == ell && ell << deg == order;
        let spec = GroupSpec::LamplighterCongruence { k };
        let (size, diam) = diameter_group(&spec);
        ok &= size == order && 2 * diam as u64 >= ell;
        let mcfg = MetricsConfig { spectral_max: 0, ..MetricsConfig::default() };
        let gm = GraphMetrics::compute(&CayleyGraph::build(&spec, MAXV).unwrap(), &mcfg).unwrap();
        ok &= gm.diameter == diam;
        metrics.push(gm);
    }
    let alpha = rational(1, 2);
    let k = boxspace::measured_k(&metrics, &alpha);
    ok &= k > 0.0 && boxspace::dalpha_check(&metrics, &DAlphaParams::new(alpha, KConstant::Real(k)).unwrap()).verdict;
    ok
}

fn c4_sol() -> bool {
    let mut ok = true;
    let mut ratios = Vec::new();
    let mut metrics = Vec::new();
    for (k, want) in [(1u32, 500u64), (2, 62_500)] {
        let n = 5u64.pow(k);
        let delta = pisano_naive(n);
        let spec = GroupSpec::SolQuotient { n };
        let (size, diam) = diameter_group(&spec);
        ok &= size == n * n * delta && size == want;
        ratios.push(diam as f64 / delta as f64);
        let mcfg = MetricsConfig { spectral_max: 0, ..MetricsConfig::default() };
        metrics.push(GraphMetrics::compute(&CayleyGraph::build(&spec, MAXV).unwrap(), &mcfg).unwrap());
    }
    let alpha = rational(1, 3);
    let k = boxspace::measured_k(&metrics, &alpha);
    ok &= k > 0.0 && boxspace::dalpha_check(&metrics, &DAlphaParams::new(alpha, KConstant::Real(k)).unwrap()).verdict;
    ok &= ratios[0].max(ratios[1]) <= 2.0 * ratios[0].min(ratios[1]);
    let (mut n, mut prod_q) = (1u64, 1u64);
    for (i, q) in [5u64, 7, 11, 13].into_iter().enumerate() {
        n *= fib_u64(q);
        prod_q *= q;
        let claimed = 4u64.pow(i as u32 + 1) * prod_q;
        let actual = pisano_naive(n);
        if actual != claimed {
            println!("    δ(F_q1⋯F_q{}) = δ({n}) = {actual}, claimed {claimed}", i + 1);
            ok = false;
        }
    }
    ok
}

fn c5_cheeger() -> bool {
    let mut ok = true;
    for spec in report::small_instances(22) {
        let g = CayleyGraph::build(&spec, MAXV).unwrap();
        let d = g.degree() as f64;
        let mu2 = d * (1.0 - dense_lambda1(&g));
        let h = cheeger_exact(&g).unwrap().value();
        if g.order() <= 16 {
            ok &= (h - cheeger_naive(&g)).abs() <= 1e-12;
        }
        ok &= (d - mu2) / 2.0 <= h + 1e-9 && h <= (2.0 * d * (d - mu2)).max(0.0).sqrt() + 1e-9;
    }
    for spec in report::small_instances(200) {
        let g = CayleyGraph::build(&spec, MAXV).unwrap();
        ok &= (spectral_gap(&g, 1e-12).unwrap().lambda1 - dense_lambda1(&g)).abs() <= 1e-7;
    }
    for n in 3..=64u64 {
        let g = CayleyGraph::build(&GroupSpec::Cyclic { n }, MAXV).unwrap();
        let exact = 1.0 - (2.0 * std::f64::consts::PI / n as f64).cos();
        ok &= (spectral_gap(&g, 1e-12).unwrap().lambda1 - exact).abs() <= 1e-9;
    }
    ok
}

fn c6_expansion() -> bool {
    let mut ok = true;
    let mcfg = MetricsConfig::default();
    let mut sl = Vec::new();
    for k in 1..=4 {
        let g = CayleyGraph::build(&GroupSpec::SlModN { m: 2, n: 1 << k }, MAXV).unwrap();
        let m = GraphMetrics::compute(&g, &mcfg).unwrap();
        if k <= 3 {
            ok &= (m.lambda1.unwrap() - dense_lambda1(&g)).abs() <= 1e-7;
        }
        sl.push(m);
    }
    let r = boxspace::expansion_report(&sl);
    ok &= r.non_conclusive && r.min_cheeger_lower.is_some_and(|x| x > 0.0);
    let mut cyc = Vec::new();
    for k in 1..=10 {
        let n = 1u64 << k;
        let m = GraphMetrics::compute(&CayleyGraph::build(&GroupSpec::Cyclic { n }, MAXV).unwrap(), &mcfg).unwrap();
        // The half-cycle cut gives h(C_n) ≤ 2/(n/2).
        ok &= m.cheeger_upper.unwrap() <= 4.0 / n as f64 + 1e-12 || n == 2;
        cyc.push(m);
    }
    let r = boxspace::expansion_report(&cyc);
    ok &= r.verdict == ExpansionVerdict::ExpansionFailsEmpirically && (r.upper_decay_exponent.unwrap() + 1.0).abs() <= 0.1;
    ok
}

fn c7_coarse_matching() -> bool {
    let mut ok = true;
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1 + seed % 8;
        let mut values: Vec<u64> = (1..=1000).collect();
        for chunk in values.chunks_mut(n as usize) {
            chunk.shuffle(&mut rng);
        }
        // Hypothesis by brute force, then the displacement bound.
        let hyp = (0..1000).all(|k| ((k + n as usize)..1000).all(|l| values[l] > values[k]));
        let bounded = (n..=1000 - n).all(|k| values[k as usize - 1].abs_diff(k) <= n);
        let ap = AlmostPermutation::from_values(&values).unwrap();
        let lib = coarse::permut_hypothesis(&ap, n);
        ok &= hyp && bounded && lib.holds && lib.bounds_hold == Some(true);
    }
    let bc = AlmostPermutation::block_cyclic(105);
    let max = bc.pairs().map(|(k, v)| k.abs_diff(v)).max().unwrap();
    ok &= max == 13 && coarse::displacement(&bc).max == 13;
    ok &= (0..=12).all(|d| bc.pairs().any(|(k, v)| k.abs_diff(v) > d));

    let r16 = coarse::parse_ratio_bound("2^16").unwrap();
    for (s, t, h, matched) in
        [("1", "1", 200, true), ("2", "2", 200, true), ("1", "3/2", 200, false), ("1", "2", 200, false), ("3/2", "17/10", 400, false)]
    {
        let (s, t) = (boxspace::parse_rational(s).unwrap(), boxspace::parse_rational(t).unwrap());
        let v = coarse::distinguish_nks(&s, &t, 8, &r16, h).unwrap();
        let a = VolumeSequence::Nks(s).terms(h).unwrap();
        let b = VolumeSequence::Nks(t).terms(h).unwrap();
        ok &= v.is_matched() == matched && recheck_verdict(&a, &b, &v, 8, &r16, h);
    }
    let r32 = coarse::parse_ratio_bound("2^32").unwrap();
    for ((m, p), (n, q)) in [((2, 2), (2, 3)), ((2, 2), (3, 2))] {
        let v = coarse::distinguish_sl_volumes(m, p, n, q, 8, &r32, 100).unwrap();
        let a = VolumeSequence::Sl { m, p }.terms(100).unwrap();
        let b = VolumeSequence::Sl { m: n, p: q }.terms(100).unwrap();
        ok &= !v.is_matched() && recheck_verdict(&a, &b, &v, 8, &r32, 100);
    }
    ok
}

/// Homomorphisms ℤ²⋊D₄ → ℤ/2 that are onto, counted by checking every
/// relator of a presentation on generators x, y, r (rotation), s (reflection).
fn index_two_subgroups_z2d4() -> u64 {
    const X: usize = 0;
    const Y: usize = 1;
    const R: usize = 2;
    const S: usize = 3;
    // Relators as (generator, exponent) words.
    let relators: [&[(usize, i64)]; 8] = [
        &[(X, 1), (Y, 1), (X, -1), (Y, -1)],
        &[(R, 1), (X, 1), (R, -1), (Y, -1)],
        &[(R, 1), (Y, 1), (R, -1), (X, 1)],
        &[(S, 1), (X, 1), (S, -1), (X, -1)],
        &[(S, 1), (Y, 1), (S, -1), (Y, 1)],
        &[(R, 4)],
        &[(S, 2)],
        &[(S, 1), (R, 1), (S, 1), (R, 1)],
    ];
    (1u32..16)
        .filter(|bits| {
            let img = |g: usize| i64::from(bits >> g & 1);
            relators.iter().all(|w| w.iter().map(|&(g, e)| e * img(g)).sum::<i64>().rem_euclid(2) == 0)
        })
        .count() as u64
}

fn c8_census() -> bool {
    let mut ok = true;
    let lattices = census::enumerate_sublattices(200);
    for n in 1..=200i64 {
        let sigma: i64 = (1..=n).filter(|d| n % d == 0).sum();
        ok &= lattices.iter().filter(|l| l.index() == n).count() as i64 == sigma;
    }
    let closed = census::census_z2d4_closedform(400);
    let oracle = census::census_z2d4_oracle(64).unwrap();
    // Independent check of the oracle at index 2: the abelianization is (ℤ/2)³.
    ok &= oracle.a_n(2) == Some(index_two_subgroups_z2d4()) && index_two_subgroups_z2d4() == 7;
    for n in 1..=64 {
        if closed.a_n(n) != oracle.a_n(n) {
            println!("    a_{n}: closed form {:?}, oracle {:?}", closed.a_n(n).unwrap(), oracle.a_n(n).unwrap());
            ok = false;
        }
    }
    ok &= (1..=400u64).all(|n| {
        let s = closed.s_n(n).unwrap() as f64;
        (n as f64).sqrt() <= s && s <= 10.0 * (n as f64).sqrt()
    });
    let g = census::census_z2_sigma(10_000).unwrap();
    let h = census::census_z2d4_closedform(20_000);
    let rep = census::growth_inequality_check(&g, &h, &rational(1, 2), &rational(2, 1), 10_000).unwrap();
    match rep.first_violation {
        Some(n) => {
            let window: u64 = (n.div_ceil(2)..=2 * n).map(|k| h.a_n(k).unwrap()).sum();
            ok &= g.a_n(n).unwrap() > window;
        }
        None => ok = false,
    }
    ok
}

fn c9_fullbox() -> bool {
    let mut ok = true;
    // Subgroups of ℤ×ℤ/2 with p(M) = nℤ contain (2n, 0), so they are
    // subgroups of ℤ/2n × ℤ/2 projecting onto ⟨n⟩; count them by brute force.
    for n in 1..=12u64 {
        let m = 2 * n;
        let elems: Vec<(u64, u64)> = (0..m).flat_map(|a| (0..2).map(move |e| (a, e))).collect();
        let close = |gens: &[(u64, u64)]| {
            let mut set: HashSet<(u64, u64)> = HashSet::from([(0, 0)]);
            loop {
                let next: HashSet<(u64, u64)> =
                    set.iter().flat_map(|&(a, e)| gens.iter().map(move |&(b, f)| ((a + b) % m, (e + f) % 2))).chain(set.iter().copied()).collect();
                if next.len() == set.len() {
                    let mut v: Vec<_> = set.into_iter().collect();
                    v.sort();
                    return v;
                }
                set = next;
            }
        };
        let mut subs = HashSet::new();
        for &x in &elems {
            for &y in &elems {
                let s = close(&[x, y]);
                let proj: HashSet<u64> = s.iter().map(|p| p.0).collect();
                if proj == HashSet::from([0, n % m]) || (n == 1 && proj.len() == 2) {
                    subs.insert(s);
                }
            }
        }
        ok &= subs.len() == 3;
    }
    ok &= census::census_z_cross_z2(100).k.iter().all(|&k| k == 3);

    // Retraction constants for ℤ/n × ℤ/2 from the closed-form distance.
    let rep = census::fullbox_cycle_retraction(200).unwrap();
    for e in &rep.entries {
        if let GroupSpec::ZxZ2Quotient { kind: ZxZ2Kind::Plain, n } = e.quotient {
            if n <= 50 {
                let cyc = |i: u64, j: u64| (i.abs_diff(j)).min(n - i.abs_diff(j));
                let mut a = 1.0f64;
                for (x, ex) in (0..n).flat_map(|x| [(x, 0u64), (x, 1)]) {
                    for (y, ey) in (0..n).flat_map(|y| [(y, 0u64), (y, 1)]) {
                        let d = (cyc(x, y) + (ex ^ ey)) as f64;
                        let img = cyc(x, y) as f64;
                        a = a.max(img / (d + 1.0)).max((-img + (img * img + 4.0 * d).sqrt()) / 2.0);
                    }
                }
                ok &= (a - e.a).abs() <= 1e-12 && a <= 2.0;
            }
        }
    }
    ok && rep.max_a.is_finite() && rep.attained_at_order <= 20
}

fn c10_wreath() -> bool {
    let mut ok = true;
    let b = LampBijection::standard();
    for n in [2u32, 4] {
        let src = CayleyGraph::build(&GroupSpec::WreathOverCycle { lamp: Lamp::Z4, n }, MAXV).unwrap();
        let dst = CayleyGraph::build(&GroupSpec::WreathOverCycle { lamp: Lamp::Z2xZ2, n }, MAXV).unwrap();
        let phi: Vec<usize> =
            src.vertices().iter().map(|v| dst.index_of(&wreath::induced_map(&b, n, v).unwrap()).unwrap()).collect();
        let image: HashSet<usize> = phi.iter().copied().collect();
        ok &= image.len() == src.order() && src.order() == dst.order();
        for u in 0..src.order() {
            let mut mine: Vec<usize> = src.neighbors(u).iter().map(|&v| phi[v as usize]).collect();
            let mut theirs: Vec<usize> = dst.neighbors(phi[u]).iter().map(|&v| v as usize).collect();
            mine.sort();
            theirs.sort();
            ok &= mine == theirs;
        }
    }
    for n in [2u32, 4, 8] {
        ok &= wreath::verify_isomorphism(&b, n).unwrap().isomorphism;
    }
    for n in 1..=4 {
        let spectrum = |lamp| {
            let d = bfs_group(&GroupSpec::WreathOverCycle { lamp, n });
            let mut hist = vec![0u64; *d.values().max().unwrap() as usize + 1];
            d.values().for_each(|&x| hist[x as usize] += 1);
            hist
        };
        let (s, t) = (spectrum(Lamp::Z4), spectrum(Lamp::Z2xZ2));
        ok &= s == t && wreath::compare_distance_spectra(n, MAXV).unwrap().source == s;
    }
    let swap = wreath::verify_map(WreathMap::SwapPositions { table: b.table(), i: 0, j: 1 }, 2).unwrap();
    ok && !swap.isomorphism && swap.witness.is_some()
}

fn c11_heisenberg() -> bool {
    let lengths = central_distortion_heisenberg(6, MAXV).unwrap();
    let mut ok = true;
    for &(j, w) in &lengths {
        let n = 1u64 << j;
        let d = bfs_group(&GroupSpec::HeisenbergModN { n });
        ok &= d[&Element::Heisenberg { a: 0, b: 0, c: n / 2 }] == w;
    }
    let sqrt_ratio: Vec<f64> = lengths.iter().map(|&(j, w)| w as f64 / 2f64.powf((j as f64 - 1.0) / 2.0)).collect();
    let lo = sqrt_ratio.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sqrt_ratio.iter().copied().fold(0.0, f64::max);
    ok &= hi <= 1.25 * lo;
    let linear: Vec<f64> = lengths.iter().map(|&(j, w)| w as f64 / 2f64.powi(j as i32 - 1)).collect();
    ok &= linear.windows(2).all(|p| p[1] < p[0]);
    let residual = |m: usize| {
        let pts = &lengths[..m];
        let sxx: f64 = pts.iter().map(|&(j, _)| 4f64.powi(j as i32 - 1)).sum();
        let sxw: f64 = pts.iter().map(|&(j, w)| 2f64.powi(j as i32 - 1) * w as f64).sum();
        let c = sxw / sxx;
        pts.iter().map(|&(j, w)| (w as f64 - c * 2f64.powi(j as i32 - 1)).abs()).fold(0.0, f64::max)
    };
    ok && (3..6).all(|m| residual(m + 1) > residual(m))
}

fn c12_determinism() -> bool {
    let cfg = VerifyConfig::default();
    let first = report::verify_all(&cfg).unwrap();
    let second = report::verify_all(&cfg).unwrap();
    report::payload_bytes(&first.payload) == report::payload_bytes(&second.payload)
}

type Criterion = (u32, &'static str, fn() -> bool);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, "fibonacci/pisano suite", c1_fibonacci_pisano),
        (2, "SL order formula vs brute force", c2_sl_order),
        (3, "lamplighter box space", c3_lamplighter),
        (4, "SOL box space", c4_sol),
        (5, "cheeger sandwich", c5_cheeger),
        (6, "expansion evidence", c6_expansion),
        (7, "coarse matching suite", c7_coarse_matching),
        (8, "subgroup census", c8_census),
        (9, "full-box retraction", c9_fullbox),
        (10, "wreath isometry", c10_wreath),
        (11, "heisenberg distortion", c11_heisenberg),
        (12, "determinism", c12_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || *f == id.to_string()) {
            continue;
        }
        let passed = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or(false);
        println!("criterion {id}: {} ({name})", if passed { "PASS" } else { "FAIL" });
        failed += usize::from(!passed);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
