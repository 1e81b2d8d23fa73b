//! Almost permutations with bounded displacement and ratio-bounded
//! matchings between volume sequences.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::boxspace::{format_rational, parse_rational};
use crate::error::{Error, Result};

/// An injective partial map on `{1..H}` whose values may leave `{1..H}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlmostPermutation {
    horizon: u64,
    map: BTreeMap<u64, u64>,
}

impl AlmostPermutation {
    pub fn new(horizon: u64, pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<AlmostPermutation> {
        let mut map = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for (k, v) in pairs {
            if k == 0 || k > horizon {
                return Err(Error::InvalidInput(format!("index {k} outside 1..={horizon}")));
            }
            if v == 0 {
                return Err(Error::InvalidInput("values are positive integers".into()));
            }
            if map.insert(k, v).is_some() {
                return Err(Error::InvalidInput(format!("index {k} assigned twice")));
            }
            if !seen.insert(v) {
                return Err(Error::InvalidInput(format!("value {v} hit twice")));
            }
        }
        Ok(AlmostPermutation { horizon, map })
    }

    pub fn identity(horizon: u64) -> AlmostPermutation {
        AlmostPermutation { horizon, map: (1..=horizon).map(|k| (k, k)).collect() }
    }

    /// `k ↦ k+1` on `{1..H-1}`.
    pub fn shift(horizon: u64) -> AlmostPermutation {
        AlmostPermutation { horizon, map: (1..horizon).map(|k| (k, k + 1)).collect() }
    }

    /// Cycles each block of `{1}, {2,3}, {4,5,6}, …` one step forward, the
    /// last element returning to the first; the final block may be partial.
    pub fn block_cyclic(horizon: u64) -> AlmostPermutation {
        let mut map = BTreeMap::new();
        let (mut start, mut len) = (1u64, 1u64);
        while start <= horizon {
            let end = (start + len - 1).min(horizon);
            for k in start..end {
                map.insert(k, k + 1);
            }
            map.insert(end, start);
            start = end + 1;
            len += 1;
        }
        AlmostPermutation { horizon, map }
    }

    /// From the values `α(1), …, α(H)`.
    pub fn from_values(values: &[u64]) -> Result<AlmostPermutation> {
        AlmostPermutation::new(values.len() as u64, values.iter().enumerate().map(|(i, &v)| (i as u64 + 1, v)))
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn get(&self, k: u64) -> Option<u64> {
        self.map.get(&k).copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.map.iter().map(|(&k, &v)| (k, v))
    }

    /// Indices of `{1..H}` outside the domain.
    pub fn domain_excluded(&self) -> Vec<u64> {
        (1..=self.horizon).filter(|k| !self.map.contains_key(k)).collect()
    }

    /// Indices of `{1..H}` outside the image.
    pub fn image_excluded(&self) -> Vec<u64> {
        let image: BTreeSet<u64> = self.map.values().copied().collect();
        (1..=self.horizon).filter(|k| !image.contains(k)).collect()
    }

    pub fn is_total(&self) -> bool {
        self.map.len() as u64 == self.horizon
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Displacement {
    pub max: u64,
    /// Least index attaining `max`.
    pub argmax: Option<u64>,
    /// The running maximum still increased within the top tenth of the
    /// horizon, so no bound is certified beyond it.
    pub growing_near_horizon: bool,
}

pub fn displacement(ap: &AlmostPermutation) -> Displacement {
    let cutoff = ap.horizon - ap.horizon / 10;
    let mut best = Displacement { max: 0, argmax: None, growing_near_horizon: false };
    for (k, v) in ap.pairs() {
        let d = k.abs_diff(v);
        if best.argmax.is_none() || d > best.max {
            if best.argmax.is_some() && k > cutoff {
                best.growing_near_horizon = true;
            }
            best.max = d;
            best.argmax = Some(k);
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutHypothesis {
    pub n: u64,
    pub holds: bool,
    /// A pair `k < ℓ` with `ℓ ≥ k + N` and `α(ℓ) ≤ α(k)`.
    pub violation: Option<(u64, u64)>,
    /// Whether `k - N ≤ α(k) ≤ k + N` for `N ≤ k ≤ H - N`; checked only when
    /// the hypothesis holds.
    pub bounds_hold: Option<bool>,
}

/// Checks `ℓ ≥ k + N ⇒ α(ℓ) > α(k)` over all pairs of the domain.
pub fn permut_hypothesis(ap: &AlmostPermutation, n: u64) -> PermutHypothesis {
    let pairs: Vec<(u64, u64)> = ap.pairs().collect();
    // For each ℓ, α(ℓ) must exceed the largest α(k) with k ≤ ℓ - N.
    let mut violation = None;
    let mut prefix_max: Option<(u64, u64)> = None;
    let mut lo = 0usize;
    for &(l, vl) in &pairs {
        while lo < pairs.len() && pairs[lo].0 + n <= l {
            let (k, vk) = pairs[lo];
            if prefix_max.is_none_or(|(_, m)| vk > m) {
                prefix_max = Some((k, vk));
            }
            lo += 1;
        }
        if let Some((k, vk)) = prefix_max {
            if vl <= vk {
                violation = Some((k, l));
                break;
            }
        }
    }
    let holds = violation.is_none();
    let bounds_hold = holds.then(|| {
        let h = ap.horizon;
        (n.max(1)..=h.saturating_sub(n))
            .filter_map(|k| ap.get(k).map(|v| (k, v)))
            .all(|(k, v)| v + n >= k && v <= k + n)
    });
    PermutHypothesis { n, holds, violation, bounds_hold }
}

/// Which side of the bipartite graph a Hall obstruction lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

/// A set `S` of window indices on one side whose admissible partners
/// `N(S)` are fewer than `|S|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallViolator {
    pub side: Side,
    pub indices: Vec<u64>,
    pub neighbors: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchingStatus {
    Matched,
    /// No admissible assignment at these `(D, R, H)`; says nothing beyond them.
    DistinguishedAt,
}

/// The outcome of a matching search. `Matched` carries an assignment,
/// `DistinguishedAt` a Hall violator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingVerdict {
    pub status: MatchingStatus,
    pub d: u64,
    /// The ratio bound `R` as `a/b`.
    pub r: String,
    pub h: u64,
    pub window: (u64, u64),
    pub assignment: Option<Vec<(u64, u64)>>,
    pub obstruction: Option<HallViolator>,
}

impl MatchingVerdict {
    pub fn is_matched(&self) -> bool {
        self.status == MatchingStatus::Matched
    }

    /// `matched` or `distinguished-at(D, R, H)`.
    pub fn label(&self) -> String {
        match self.status {
            MatchingStatus::Matched => "matched".into(),
            MatchingStatus::DistinguishedAt => format!("distinguished-at({}, {}, {})", self.d, self.r, self.h),
        }
    }
}

struct Problem<'a> {
    a: &'a [BigUint],
    b: &'a [BigUint],
    d: u64,
    r: BigRational,
    h: u64,
}

impl Problem<'_> {
    /// `max(a_k/b_j, b_j/a_k) ≤ R` by cross-multiplication.
    fn admissible(&self, k: u64, j: u64) -> bool {
        if k == 0 || j == 0 || k > self.h || j > self.h || k.abs_diff(j) > self.d {
            return false;
        }
        let (num, den) = (
            self.r.numer().to_biguint().expect("R positive"),
            self.r.denom().to_biguint().expect("R positive"),
        );
        let (ak, bj) = (&self.a[k as usize - 1], &self.b[j as usize - 1]);
        ak * &den <= &num * bj && bj * &den <= &num * ak
    }

    fn band(&self, k: u64) -> std::ops::RangeInclusive<u64> {
        k.saturating_sub(self.d).max(1)..=(k + self.d).min(self.h)
    }

    fn in_window(&self, k: u64) -> bool {
        k > self.d && k + self.d <= self.h
    }
}

/// Adjacency on `{1..H}`, 0-based, for one orientation.
fn adjacency(p: &Problem, side: Side) -> Vec<Vec<usize>> {
    (1..=p.h)
        .into_par_iter()
        .map(|x| {
            p.band(x)
                .filter(|&y| match side {
                    Side::A => p.admissible(x, y),
                    Side::B => p.admissible(y, x),
                })
                .map(|y| y as usize - 1)
                .collect()
        })
        .collect()
}

/// Kuhn's augmenting search from left vertex `u`.
fn augment(u: usize, adj: &[Vec<usize>], match_r: &mut [Option<usize>], match_l: &mut [Option<usize>], seen: &mut [bool], seen_l: &mut Vec<usize>) -> bool {
    seen_l.push(u);
    for &v in &adj[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        let free = match match_r[v] {
            None => true,
            Some(w) => augment(w, adj, match_r, match_l, seen, seen_l),
        };
        if free {
            match_r[v] = Some(u);
            match_l[u] = Some(v);
            return true;
        }
    }
    false
}

/// Maximum matching of the window vertices of the left side; on failure the
/// alternating tree from the first unmatched vertex is a Hall violator.
fn cover_left(p: &Problem, adj: &[Vec<usize>], side: Side) -> std::result::Result<(Vec<Option<usize>>, Vec<Option<usize>>), HallViolator> {
    let n = p.h as usize;
    let mut match_l = vec![None; n];
    let mut match_r = vec![None; n];
    for u in 0..n {
        if !p.in_window(u as u64 + 1) {
            continue;
        }
        let mut seen = vec![false; n];
        let mut seen_l = Vec::new();
        if !augment(u, adj, &mut match_r, &mut match_l, &mut seen, &mut seen_l) {
            let mut indices: Vec<u64> = seen_l.iter().map(|&x| x as u64 + 1).collect();
            indices.sort_unstable();
            let neighbors: BTreeSet<u64> =
                seen_l.iter().flat_map(|&x| adj[x].iter().map(|&y| y as u64 + 1)).collect();
            return Err(HallViolator { side, indices, neighbors: neighbors.into_iter().collect() });
        }
    }
    Ok((match_l, match_r))
}

/// Extends a matching covering the left window so it also covers the right
/// window, along alternating paths that may drop only right vertices outside
/// the window. Succeeds whenever both one-sided coverings exist.
fn extend_right(
    p: &Problem,
    adj_r: &[Vec<usize>],
    match_l: &mut [Option<usize>],
    match_r: &mut [Option<usize>],
) -> bool {
    let n = p.h as usize;
    for j in 0..n {
        if !p.in_window(j as u64 + 1) || match_r[j].is_some() {
            continue;
        }
        // Breadth-first over right vertices; parent[i] records how left
        // vertex i was reached.
        let mut from_right = vec![None; n];
        let mut visited_r = vec![false; n];
        visited_r[j] = true;
        let mut queue = std::collections::VecDeque::from([j]);
        let mut end: Option<(usize, bool)> = None;
        'search: while let Some(r) = queue.pop_front() {
            for &l in &adj_r[r] {
                if match_r[r] == Some(l) || from_right[l].is_some() {
                    continue;
                }
                from_right[l] = Some(r);
                match match_l[l] {
                    None => {
                        end = Some((l, true));
                        break 'search;
                    }
                    Some(r2) => {
                        if !visited_r[r2] {
                            visited_r[r2] = true;
                            if !p.in_window(r2 as u64 + 1) {
                                end = Some((l, false));
                                break 'search;
                            }
                            queue.push_back(r2);
                        }
                    }
                }
            }
        }
        let Some((mut l, _)) = end else {
            return false;
        };
        // Flip the path back to j. If it ended at a matched left vertex its
        // old partner, outside the window, is released.
        if let Some(r_old) = match_l[l] {
            match_r[r_old] = None;
        }
        loop {
            let r = from_right[l].expect("path vertex");
            let prev_l = match_r[r];
            match_r[r] = Some(l);
            match_l[l] = Some(r);
            if r == j {
                break;
            }
            l = prev_l.expect("interior right vertices are matched");
        }
    }
    true
}

/// Searches for an injective assignment `k ↦ j` on `{1..H}` with
/// `|j - k| ≤ D` and `max(a_k/b_j, b_j/a_k) ≤ R` that is defined on every
/// `k` and hits every `j` in the window `[D+1, H-D]`. Requiring coverage on
/// both sides mirrors a bijection between cofinite sets and makes the
/// verdict symmetric in `(a, b)`.
pub fn ratio_bounded_matching(a: &[BigUint], b: &[BigUint], d: u64, r: &BigRational, h: u64) -> Result<MatchingVerdict> {
    if h <= 2 * d {
        return Err(Error::InvalidHorizon {
            lo: d as i64 + 1,
            hi: h as i64 - d as i64,
        });
    }
    if !r.is_positive() {
        return Err(Error::InvalidInput("ratio bound must be positive".into()));
    }
    for (name, seq) in [("first", a), ("second", b)] {
        if (seq.len() as u64) < h {
            return Err(Error::InvalidInput(format!("{name} sequence has {} terms, horizon is {h}", seq.len())));
        }
        if seq[..h as usize].windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(format!("{name} sequence is not strictly increasing")));
        }
    }
    let p = Problem { a, b, d, r: r.clone(), h };
    let window = (d + 1, h - d);
    let distinguished = |obstruction: HallViolator| MatchingVerdict {
        status: MatchingStatus::DistinguishedAt,
        d,
        r: format_rational(r),
        h,
        window,
        assignment: None,
        obstruction: Some(obstruction),
    };
    let adj_a = adjacency(&p, Side::A);
    let adj_b = adjacency(&p, Side::B);
    let (mut match_l, mut match_r) = match cover_left(&p, &adj_a, Side::A) {
        Ok(m) => m,
        Err(v) => return Ok(distinguished(v)),
    };
    if !extend_right(&p, &adj_b, &mut match_l, &mut match_r) {
        // By Mendelsohn–Dulmage the right window alone cannot be covered.
        return match cover_left(&p, &adj_b, Side::B) {
            Err(v) => Ok(distinguished(v)),
            Ok(_) => Err(Error::Verification("two-sided matching extension failed".into())),
        };
    }
    let assignment = match_l
        .iter()
        .enumerate()
        .filter_map(|(k, j)| j.map(|j| (k as u64 + 1, j as u64 + 1)))
        .collect();
    Ok(MatchingVerdict {
        status: MatchingStatus::Matched,
        d,
        r: format_rational(r),
        h,
        window,
        assignment: Some(assignment),
        obstruction: None,
    })
}

/// Recomputes every constraint of a verdict from the sequences alone.
pub fn verify_verdict(a: &[BigUint], b: &[BigUint], v: &MatchingVerdict) -> bool {
    let Ok(r) = parse_rational(&v.r) else {
        return false;
    };
    if v.h <= 2 * v.d || v.window != (v.d + 1, v.h - v.d) || (a.len() as u64) < v.h || (b.len() as u64) < v.h {
        return false;
    }
    let p = Problem { a, b, d: v.d, r, h: v.h };
    match (&v.status, &v.assignment, &v.obstruction) {
        (MatchingStatus::Matched, Some(assignment), None) => {
            let mut dom = BTreeSet::new();
            let mut img = BTreeSet::new();
            for &(k, j) in assignment {
                if !dom.insert(k) || !img.insert(j) || !p.admissible(k, j) {
                    return false;
                }
            }
            (v.d + 1..=v.h - v.d).all(|k| dom.contains(&k) && img.contains(&k))
        }
        (MatchingStatus::DistinguishedAt, None, Some(ob)) => {
            if ob.indices.iter().any(|&k| !p.in_window(k)) {
                return false;
            }
            let neighbors: BTreeSet<u64> = ob
                .indices
                .iter()
                .flat_map(|&x| {
                    let p = &p;
                    p.band(x).filter(move |&y| match ob.side {
                        Side::A => p.admissible(x, y),
                        Side::B => p.admissible(y, x),
                    })
                })
                .collect();
            let distinct: BTreeSet<u64> = ob.indices.iter().copied().collect();
            neighbors.len() < distinct.len()
        }
        _ => false,
    }
}

/// A named volume sequence, indexed from 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VolumeSequence {
    /// `N_k(s) = 2^⌊ks⌋`.
    Nks(BigRational),
    /// `|SL_m(ℤ/p^k)|`.
    Sl { m: u32, p: u64 },
    Explicit(Vec<BigUint>),
}

impl VolumeSequence {
    pub fn terms(&self, h: u64) -> Result<Vec<BigUint>> {
        match self {
            VolumeSequence::Nks(s) => (1..=h).map(|k| arith::nks(s, k)).collect(),
            VolumeSequence::Sl { m, p } => (1..=h)
                .map(|k| {
                    let k = u32::try_from(k).map_err(|_| Error::InvalidInput("horizon too large".into()))?;
                    arith::sl_order_prime_power(*m, *p, k)
                })
                .collect(),
            VolumeSequence::Explicit(v) => {
                if (v.len() as u64) < h {
                    return Err(Error::InvalidInput(format!("sequence has {} terms, horizon is {h}", v.len())));
                }
                Ok(v[..h as usize].to_vec())
            }
        }
    }

    /// One decimal integer per line; blank lines and `#` comments skipped.
    pub fn parse_list(text: &str) -> Result<VolumeSequence> {
        let terms = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| BigUint::from_str(l).map_err(|_| Error::InvalidInput(format!("not a nonnegative integer: {l:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(VolumeSequence::Explicit(terms))
    }
}

impl FromStr for VolumeSequence {
    type Err = Error;

    /// `nks:3/2` or `sl:2,3`.
    fn from_str(s: &str) -> Result<VolumeSequence> {
        let bad = || Error::InvalidInput(format!("unknown sequence {s:?}; use nks:S or sl:M,P"));
        let (head, arg) = s.split_once(':').ok_or_else(bad)?;
        match head {
            "nks" => {
                let s = parse_rational(arg)?;
                check_slope(&s)?;
                Ok(VolumeSequence::Nks(s))
            }
            "sl" => {
                let (m, p) = arg.split_once(',').ok_or_else(bad)?;
                let m: u32 = m.trim().parse().map_err(|_| bad())?;
                let p: u64 = p.trim().parse().map_err(|_| bad())?;
                check_sl(m, p)?;
                Ok(VolumeSequence::Sl { m, p })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for VolumeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VolumeSequence::Nks(s) => write!(f, "nks:{}", format_rational(s)),
            VolumeSequence::Sl { m, p } => write!(f, "sl:{m},{p}"),
            VolumeSequence::Explicit(v) => write!(f, "explicit[{}]", v.len()),
        }
    }
}

fn check_slope(s: &BigRational) -> Result<()> {
    if *s < BigRational::from_integer(1.into()) {
        return Err(Error::OutOfRange { what: "slope", value: format_rational(s), bound: ">= 1".into() });
    }
    Ok(())
}

fn check_sl(m: u32, p: u64) -> Result<()> {
    if m < 2 {
        return Err(Error::OutOfRange { what: "matrix size", value: m.to_string(), bound: ">= 2".into() });
    }
    if !arith::is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    Ok(())
}

/// Compares the sequences `N_k(s)` and `N_k(t)`.
pub fn distinguish_nks(s: &BigRational, t: &BigRational, d: u64, r: &BigRational, h: u64) -> Result<MatchingVerdict> {
    check_slope(s)?;
    check_slope(t)?;
    let a = VolumeSequence::Nks(s.clone()).terms(h)?;
    let b = VolumeSequence::Nks(t.clone()).terms(h)?;
    ratio_bounded_matching(&a, &b, d, r, h)
}

/// Compares `|SL_m(ℤ/p^k)|` with `|SL_n(ℤ/q^k)|`.
#[allow(clippy::too_many_arguments)]
pub fn distinguish_sl_volumes(m: u32, p: u64, n: u32, q: u64, d: u64, r: &BigRational, h: u64) -> Result<MatchingVerdict> {
    check_sl(m, p)?;
    check_sl(n, q)?;
    let a = VolumeSequence::Sl { m, p }.terms(h)?;
    let b = VolumeSequence::Sl { m: n, p: q }.terms(h)?;
    ratio_bounded_matching(&a, &b, d, r, h)
}

/// Parses `2^16`, `65536` or `a/b`.
pub fn parse_ratio_bound(s: &str) -> Result<BigRational> {
    if let Some((base, exp)) = s.split_once('^') {
        let base = BigUint::from_str(base.trim()).map_err(|_| Error::InvalidInput(format!("bad ratio {s:?}")))?;
        let exp: u32 = exp.trim().parse().map_err(|_| Error::InvalidInput(format!("bad ratio {s:?}")))?;
        return Ok(BigRational::from_integer(base.pow(exp).into()));
    }
    parse_rational(s)
}

/// `log₂` of a positive big integer, accurate to double precision.
pub fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(53);
    (x >> shift).to_f64().unwrap_or(f64::NAN).log2() + shift as f64
}
