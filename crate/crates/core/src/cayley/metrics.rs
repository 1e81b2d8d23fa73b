use serde::{Deserialize, Serialize};

use super::{bfs_prefix_cut, cheeger_exact, spectral_gap, CayleyGraph, Girth, CHEEGER_MAX_ORDER};
use crate::error::{Error, Result};
use crate::groups::{Element, GroupSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsConfig {
    /// Largest order for which the spectral gap is computed.
    pub spectral_max: usize,
    /// Largest order for exhaustive Cheeger enumeration.
    pub cheeger_max: usize,
    pub tol: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig { spectral_max: 5000, cheeger_max: CHEEGER_MAX_ORDER, tol: 1e-9 }
    }
}

/// Per-component invariants. Optional fields are absent when the order
/// exceeds the corresponding budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphMetrics {
    pub spec: GroupSpec,
    pub order: u64,
    pub degree: u64,
    pub diameter: u32,
    pub girth: Girth,
    pub lambda1: Option<f64>,
    pub cheeger_exact: Option<f64>,
    /// `(d - μ₂)/2 = d·λ₁/2`.
    pub cheeger_lower: Option<f64>,
    /// Least of `√(2d(d - μ₂))` and the best breadth-first prefix cut.
    pub cheeger_upper: Option<f64>,
}

impl GraphMetrics {
    pub fn compute(g: &CayleyGraph, cfg: &MetricsConfig) -> Result<GraphMetrics> {
        let n = g.order();
        let d = g.degree() as f64;
        let spectral = if n >= 2 && n <= cfg.spectral_max {
            Some(spectral_gap(g, cfg.tol)?)
        } else {
            None
        };
        let cheeger = if n >= 2 && n <= cfg.cheeger_max.min(CHEEGER_MAX_ORDER) {
            Some(cheeger_exact(g)?.value())
        } else {
            None
        };
        let prefix = bfs_prefix_cut(g).map(|c| c.value());
        let spectral_upper = spectral.map(|s| (2.0 * d * (d - s.mu2).max(0.0)).sqrt());
        let cheeger_upper = match (prefix, spectral_upper) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Ok(GraphMetrics {
            spec: g.spec().clone(),
            order: n as u64,
            degree: g.degree() as u64,
            diameter: g.diameter(),
            girth: g.girth(),
            lambda1: spectral.map(|s| s.lambda1),
            cheeger_exact: cheeger,
            cheeger_lower: spectral.map(|s| d * s.lambda1 / 2.0),
            cheeger_upper,
        })
    }
}

/// Word length of the central element `e₁₃(2^{j-1})` in `Heis(ℤ/2^j)` for
/// `j = 1..=k`, as `(j, length)` pairs.
pub fn central_distortion_heisenberg(k: u32, max_size: u64) -> Result<Vec<(u32, u32)>> {
    if k == 0 || k > 20 {
        return Err(Error::OutOfRange {
            what: "Heisenberg level",
            value: k.to_string(),
            bound: "1..=20".into(),
        });
    }
    let mut out = Vec::new();
    for j in 1..=k {
        let n = 1u64 << j;
        let g = CayleyGraph::build(&GroupSpec::HeisenbergModN { n }, max_size)?;
        let target = Element::Heisenberg { a: 0, b: 0, c: n / 2 };
        let v = g.index_of(&target).expect("central element is a vertex");
        out.push((j, g.distances_from_identity()[v]));
    }
    Ok(out)
}
