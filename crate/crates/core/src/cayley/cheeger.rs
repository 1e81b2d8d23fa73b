use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::CayleyGraph;
use crate::error::{Error, Result};

/// Largest order for exhaustive subset enumeration.
pub const CHEEGER_MAX_ORDER: usize = 22;

/// A vertex set `A` summarized by `|∂A|` (edges leaving `A`, with
/// multiplicity) and `|A|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    pub boundary: u64,
    pub size: u64,
}

impl Cut {
    pub fn value(&self) -> f64 {
        self.boundary as f64 / self.size as f64
    }

    /// Exact comparison of the ratios by cross-multiplication.
    pub fn cmp_ratio(&self, other: &Cut) -> Ordering {
        (self.boundary as u128 * other.size as u128).cmp(&(other.boundary as u128 * self.size as u128))
    }
}

/// Targets of the non-loop slots of each vertex.
fn slot_targets(g: &CayleyGraph) -> Vec<Vec<usize>> {
    (0..g.order())
        .map(|u| {
            g.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(|&v| v != u)
                .collect()
        })
        .collect()
}

/// `h = min |∂A|/|A|` over nonempty `A` with `|A| ≤ n/2`, by Gray-code
/// enumeration of all subsets.
pub fn cheeger_exact(g: &CayleyGraph) -> Result<Cut> {
    let n = g.order();
    if n > CHEEGER_MAX_ORDER {
        return Err(Error::Budget {
            what: "exhaustive Cheeger enumeration".into(),
            needed: n as u64,
            limit: CHEEGER_MAX_ORDER as u64,
        });
    }
    if n < 2 {
        return Err(Error::InvalidInput("Cheeger constant needs at least two vertices".into()));
    }
    let targets = slot_targets(g);
    let mut mask = 0u32;
    let mut size = 0u64;
    let mut boundary = 0i64;
    let mut best: Option<Cut> = None;
    for step in 1u32..(1 << n) {
        let u = step.trailing_zeros() as usize;
        let without = mask & !(1 << u);
        let inside = targets[u].iter().filter(|&&t| without >> t & 1 == 1).count() as i64;
        let change = targets[u].len() as i64 - 2 * inside;
        if mask >> u & 1 == 1 {
            boundary -= change;
            size -= 1;
        } else {
            boundary += change;
            size += 1;
        }
        mask ^= 1 << u;
        if size as usize * 2 <= n {
            let cut = Cut { boundary: boundary as u64, size };
            if best.is_none_or(|b| cut.cmp_ratio(&b) == Ordering::Less) {
                best = Some(cut);
            }
        }
    }
    Ok(best.expect("some subset has size one"))
}

/// Best ratio among the breadth-first prefixes of size at most `n/2`; an
/// upper bound on the Cheeger constant realized by an explicit cut.
pub fn bfs_prefix_cut(g: &CayleyGraph) -> Option<Cut> {
    let n = g.order();
    let mut inside = vec![false; n];
    let mut boundary = 0i64;
    let mut best: Option<Cut> = None;
    for u in 0..n / 2 {
        let mut change = 0i64;
        for &v in g.neighbors(u) {
            let v = v as usize;
            if v == u {
                continue;
            }
            change += if inside[v] { -1 } else { 1 };
        }
        boundary += change;
        inside[u] = true;
        let cut = Cut { boundary: boundary as u64, size: u as u64 + 1 };
        if best.is_none_or(|b| cut.cmp_ratio(&b) == Ordering::Less) {
            best = Some(cut);
        }
    }
    best
}
