//! Filtrations, box spaces as coarse disjoint unions of their quotients,
//! property `D_α`, and expansion summaries.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::cayley::{first_hit, CayleyGraph, GraphMetrics, MetricsConfig};
use crate::error::{Error, Result};
use crate::groups::{
    group_order, parent_membership, Group, GroupSpec, Lamp, ParentSchedule, ZxZ2Kind,
};

/// Parses `a/b` or `a` as an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("expected a rational a/b, got {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s.trim(), "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SlSchedule {
    /// `N_k = p^k`.
    PrimePower(u64),
    /// `N_k = 2^⌊ks⌋`.
    Nks(BigRational),
}

/// A schedule of nested finite-index normal subgroups, indexed from 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Filtration {
    /// `Γ(b^k)` in the SOL lattice.
    SolCongruence { base: u64 },
    /// Reduction modulo `P_1⋯P_k` in the lamplighter group.
    Lamplighter,
    /// `N_k(s)ℤ` with `N_k(s) = 2^⌊ks⌋`.
    Z { s: BigRational },
    SlCongruence { m: u32, schedule: SlSchedule },
    /// Subgroups of `ℤ×ℤ/2` of the given kind with `n_k = 2^k`.
    ZxZ2 { kind: ZxZ2Kind },
    /// `lamp ≀ ℤ/2^k`.
    Wreath { lamp: Lamp },
}

impl Filtration {
    pub fn component(&self, k: usize) -> Result<GroupSpec> {
        if k == 0 {
            return Err(Error::OutOfRange {
                what: "filtration index",
                value: "0".into(),
                bound: ">= 1".into(),
            });
        }
        let pow2 = |e: u64| {
            1u64.checked_shl(e as u32)
                .filter(|_| e < 64)
                .ok_or_else(|| Error::InvalidInput(format!("2^{e} overflows u64")))
        };
        let spec = match self {
            Filtration::SolCongruence { base } => GroupSpec::SolQuotient {
                n: base
                    .checked_pow(k as u32)
                    .ok_or_else(|| Error::InvalidInput("modulus overflows u64".into()))?,
            },
            Filtration::Lamplighter => GroupSpec::LamplighterCongruence { k },
            Filtration::Z { s } => GroupSpec::Cyclic { n: pow2(arith::floor_ks(s, k as u64)?)? },
            Filtration::SlCongruence { m, schedule } => {
                let n = match schedule {
                    SlSchedule::PrimePower(p) => p
                        .checked_pow(k as u32)
                        .ok_or_else(|| Error::InvalidInput("modulus overflows u64".into()))?,
                    SlSchedule::Nks(s) => pow2(arith::floor_ks(s, k as u64)?)?,
                };
                GroupSpec::SlModN { m: *m, n }
            }
            Filtration::ZxZ2 { kind } => GroupSpec::ZxZ2Quotient { kind: *kind, n: pow2(k as u64)? },
            Filtration::Wreath { lamp } => GroupSpec::WreathOverCycle { lamp: *lamp, n: 1 << k.min(31) },
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The first `count` quotients, each within the vertex budget.
    pub fn components(&self, count: usize, max_size: u64) -> Result<Vec<GroupSpec>> {
        if count == 0 {
            return Err(Error::InvalidInput("component count must be at least 1".into()));
        }
        let mut out = Vec::with_capacity(count);
        for k in 1..=count {
            let spec = self.component(k)?;
            let order = group_order(&spec)?;
            if order > BigUint::from(max_size) {
                return Err(Error::Budget {
                    what: format!("component k={k} ({spec})"),
                    needed: order.to_u64().unwrap_or(u64::MAX),
                    limit: max_size,
                });
            }
            out.push(spec);
        }
        Ok(out)
    }

    /// The parent filtration when exact parent arithmetic is available.
    pub fn parent_schedule(&self) -> Option<ParentSchedule> {
        match self {
            Filtration::SolCongruence { base } => Some(ParentSchedule::Sol { base: *base }),
            Filtration::Lamplighter => Some(ParentSchedule::Lamplighter),
            Filtration::Z { s } => Some(ParentSchedule::Integers { s: s.clone() }),
            _ => None,
        }
    }
}

impl fmt::Display for Filtration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Filtration::SolCongruence { base } => write!(f, "sol:{base}^k"),
            Filtration::Lamplighter => write!(f, "lamplighter"),
            Filtration::Z { s } => write!(f, "z:{}", format_rational(s)),
            Filtration::SlCongruence { m, schedule: SlSchedule::PrimePower(p) } => {
                write!(f, "sl:{m},{p}")
            }
            Filtration::SlCongruence { m, schedule: SlSchedule::Nks(s) } => {
                write!(f, "sl:{m},nks:{}", format_rational(s))
            }
            Filtration::ZxZ2 { kind } => write!(f, "zxz2:{}", kind.name()),
            Filtration::Wreath { lamp } => write!(f, "wreath:{}", lamp.name()),
        }
    }
}

impl FromStr for Filtration {
    type Err = Error;

    /// `sol:5^k` (or `sol:5`), `lamplighter`, `z:3/2`, `sl:2,3`,
    /// `sl:2,nks:3/2`, `zxz2:plain`, `wreath:z4`.
    fn from_str(s: &str) -> Result<Filtration> {
        let bad = || Error::InvalidInput(format!("unknown schedule {s:?}"));
        let (head, arg) = s.split_once(':').unwrap_or((s, ""));
        let int = |t: &str| t.trim().parse::<u64>().map_err(|_| bad());
        let f = match head {
            "sol" => {
                let base = int(arg.strip_suffix("^k").unwrap_or(arg))?;
                Filtration::SolCongruence { base }
            }
            "lamplighter" if arg.is_empty() => Filtration::Lamplighter,
            "z" => {
                let s = parse_rational(arg)?;
                if s < BigRational::one() {
                    return Err(Error::OutOfRange {
                        what: "schedule slope s",
                        value: format_rational(&s),
                        bound: ">= 1".into(),
                    });
                }
                Filtration::Z { s }
            }
            "sl" => {
                let (m, rest) = arg.split_once(',').ok_or_else(bad)?;
                let m = u32::try_from(int(m)?).map_err(|_| bad())?;
                let schedule = match rest.strip_prefix("nks:") {
                    Some(r) => SlSchedule::Nks(parse_rational(r)?),
                    None => {
                        let p = int(rest)?;
                        if !arith::is_prime(p) {
                            return Err(Error::InvalidInput(format!("{p} is not prime")));
                        }
                        SlSchedule::PrimePower(p)
                    }
                };
                Filtration::SlCongruence { m, schedule }
            }
            "zxz2" => Filtration::ZxZ2 { kind: ZxZ2Kind::parse(arg)? },
            "wreath" => Filtration::Wreath { lamp: Lamp::parse(arg)? },
            _ => return Err(bad()),
        };
        if let Filtration::SolCongruence { base } = f {
            if base < 2 {
                return Err(bad());
            }
        }
        f.component(1)?;
        Ok(f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiltrationReport {
    pub filtration: String,
    pub orders: Vec<String>,
    pub nested: bool,
    pub strict: bool,
    pub radius: u32,
    /// Least word length of a nontrivial element of the `k`-th subgroup, or
    /// `None` when none exists within `radius`. Empty when the parent has no
    /// exact arithmetic here.
    pub injectivity_radius: Vec<Option<u32>>,
    pub injectivity_nondecreasing: bool,
    /// First `k` whose subgroup misses the whole ball of radius `radius`.
    pub exceeds_radius_from: Option<usize>,
}

/// Nestedness, strictness and injectivity-radius evidence for the first
/// `count` terms of a filtration.
pub fn verify_filtration(f: &Filtration, count: usize, radius: u32, max_size: u64) -> Result<FiltrationReport> {
    let specs = f.components(count, max_size)?;
    let groups: Vec<Group> = specs.iter().map(Group::new).collect::<Result<_>>()?;
    for k in 1..groups.len() {
        let (small, big) = (&groups[k - 1], &groups[k]);
        let violation = |detail: String| Error::NestednessViolation { k, next: k + 1, detail };
        let gens_big = big.generator_elements();
        let gens_small = small.generator_elements();
        for (i, (a, b)) in gens_big.iter().zip(&gens_small).enumerate() {
            let image = big.project(small, a).map_err(|e| violation(e.to_string()))?;
            if image != *b {
                return Err(violation(format!("generator {i} maps to {image}, expected {b}")));
            }
        }
        // π(x·s) = π(x)·π(s) for every x and generator s makes π a
        // homomorphism by induction on word length.
        let graph = CayleyGraph::build(big.spec(), max_size)?;
        let images: Vec<_> = graph
            .vertices()
            .iter()
            .map(|x| big.project(small, x))
            .collect::<Result<_>>()
            .map_err(|e| violation(e.to_string()))?;
        for (v, img) in images.iter().enumerate() {
            for (slot, s) in gens_small.iter().enumerate() {
                let lhs = images[graph.neighbor(v, slot)];
                if lhs != small.mul_unchecked(img, s) {
                    return Err(violation(format!(
                        "projection is not multiplicative at {} times generator {slot}",
                        graph.vertices()[v]
                    )));
                }
            }
        }
    }
    let strict = groups.windows(2).all(|w| w[0].order() < w[1].order());

    let mut injectivity = Vec::new();
    if let Some(schedule) = f.parent_schedule() {
        let parent = schedule.parent();
        for k in 1..=count {
            let hit = first_hit(&parent, radius, max_size, |g| parent_membership(&schedule, g, k))?;
            injectivity.push(hit);
        }
    }
    let key = |r: &Option<u32>| r.unwrap_or(u32::MAX);
    let injectivity_nondecreasing = injectivity.windows(2).all(|w| key(&w[0]) <= key(&w[1]));
    let exceeds_radius_from = injectivity.iter().position(Option::is_none).map(|i| i + 1);
    Ok(FiltrationReport {
        filtration: f.to_string(),
        orders: groups.iter().map(|g| g.order().to_string()).collect(),
        nested: true,
        strict,
        radius,
        injectivity_radius: injectivity,
        injectivity_nondecreasing,
        exceeds_radius_from,
    })
}

/// Places components on a line: `o_1 = 0`, `o_{k+1} = o_k + diam_k + diam_{k+1}`.
/// With `d((m,x),(n,y)) = |x| + |o_m - o_n| + |y|` distinct components are at
/// least `diam_m + diam_n` apart.
pub fn coarse_union_offsets(diameters: &[u32]) -> Vec<u64> {
    let mut out = Vec::with_capacity(diameters.len());
    let mut o = 0u64;
    for (k, &d) in diameters.iter().enumerate() {
        if k > 0 {
            o += diameters[k - 1] as u64 + d as u64;
        }
        out.push(o);
    }
    out
}

/// Checks `d(X_m, X_n) ≥ max(diam X_m, diam X_n)` for all pairs.
pub fn offsets_respect_gap_rule(diameters: &[u32], offsets: &[u64]) -> bool {
    (0..diameters.len()).all(|m| {
        (m + 1..diameters.len()).all(|n| {
            offsets[m].abs_diff(offsets[n]) >= diameters[m].max(diameters[n]) as u64
        })
    })
}

/// Distance between `(m, x)` and `(n, y)` in the coarse disjoint union,
/// where `x`, `y` are vertices of the respective components.
pub fn coarse_union_distance(
    graphs: &[CayleyGraph],
    offsets: &[u64],
    (m, x): (usize, usize),
    (n, y): (usize, usize),
) -> u64 {
    if m == n {
        return graphs[m].bfs_from(x)[y] as u64;
    }
    let dx = graphs[m].distances_from_identity()[x] as u64;
    let dy = graphs[n].distances_from_identity()[y] as u64;
    dx + offsets[m].abs_diff(offsets[n]) + dy
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxSpace {
    pub filtration: String,
    pub components: Vec<GraphMetrics>,
    pub offsets: Vec<u64>,
}

impl BoxSpace {
    /// Builds the first `count` components and their metrics. Components are
    /// computed in parallel and assembled in index order.
    pub fn assemble(f: &Filtration, count: usize, max_size: u64, cfg: &MetricsConfig) -> Result<BoxSpace> {
        let specs = f.components(count, max_size)?;
        let components = specs
            .par_iter()
            .map(|spec| GraphMetrics::compute(&CayleyGraph::build(spec, max_size)?, cfg))
            .collect::<Result<Vec<_>>>()?;
        let diameters: Vec<u32> = components.iter().map(|m| m.diameter).collect();
        Ok(BoxSpace {
            filtration: f.to_string(),
            offsets: coarse_union_offsets(&diameters),
            components,
        })
    }
}

/// The constant `K` in `diam ≥ K·|G/M|^α`.
#[derive(Clone, Debug, PartialEq)]
pub enum KConstant {
    Exact(BigRational),
    /// A floating value such as a measured minimum ratio.
    Real(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DAlphaParams {
    pub alpha: BigRational,
    pub k: KConstant,
}

impl DAlphaParams {
    pub fn new(alpha: BigRational, k: KConstant) -> Result<DAlphaParams> {
        if !alpha.is_positive() || alpha > BigRational::one() {
            return Err(Error::OutOfRange {
                what: "alpha",
                value: format_rational(&alpha),
                bound: "0 < alpha <= 1".into(),
            });
        }
        let k_ok = match &k {
            KConstant::Exact(r) => r.is_positive(),
            KConstant::Real(x) => x.is_finite() && *x > 0.0,
        };
        if !k_ok {
            return Err(Error::InvalidInput("K must be positive".into()));
        }
        Ok(DAlphaParams { alpha, k })
    }
}

/// Relative slack granted to floating comparisons.
pub const FLOAT_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DAlphaCheck {
    pub alpha: String,
    pub k: String,
    pub per_component: Vec<bool>,
    pub verdict: bool,
    /// Whether the comparison was exact; otherwise `FLOAT_SLACK` applied.
    pub exact: bool,
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// `diam_k / order_k^α` per component.
pub fn diam_over_order_alpha(metrics: &[GraphMetrics], alpha: f64) -> Vec<f64> {
    metrics.iter().map(|m| m.diameter as f64 / (m.order as f64).powf(alpha)).collect()
}

/// Least `diam/order^α`; the best `K` for which `D_α` holds on these components.
pub fn measured_k(metrics: &[GraphMetrics], alpha: &BigRational) -> f64 {
    diam_over_order_alpha(metrics, ratio_to_f64(alpha))
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// Whether `diam ≥ K·order^α` for each component.
pub fn dalpha_check(metrics: &[GraphMetrics], p: &DAlphaParams) -> DAlphaCheck {
    let alpha_num = p.alpha.numer().to_u32().expect("alpha numerator fits");
    let alpha_den = p.alpha.denom().to_u32().expect("alpha denominator fits");
    let (per_component, exact, k) = match &p.k {
        KConstant::Exact(k) => {
            // diam^q · b^q ≥ a^q · order^p with α = p/q, K = a/b
            let a = k.numer().to_biguint().expect("K positive");
            let b = k.denom().to_biguint().expect("K positive");
            let flags: Vec<bool> = metrics
                .iter()
                .map(|m| {
                    let lhs = BigUint::from(m.diameter).pow(alpha_den) * b.pow(alpha_den);
                    let rhs = a.pow(alpha_den) * BigUint::from(m.order).pow(alpha_num);
                    lhs >= rhs
                })
                .collect();
            (flags, true, format_rational(k))
        }
        KConstant::Real(k) => {
            let alpha = alpha_num as f64 / alpha_den as f64;
            let flags: Vec<bool> = metrics
                .iter()
                .map(|m| {
                    let rhs = k * (m.order as f64).powf(alpha);
                    m.diameter as f64 >= rhs * (1.0 - FLOAT_SLACK)
                })
                .collect();
            (flags, false, format!("{k}"))
        }
    };
    let verdict = per_component.iter().all(|&b| b);
    DAlphaCheck { alpha: format_rational(&p.alpha), k, per_component, verdict, exact }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DAlphaEstimate {
    pub alpha_hat: f64,
    pub k_hat: f64,
    /// `log diam - (log K₀ + α̂·log order)` per component for the fitted intercept.
    pub residuals: Vec<f64>,
    pub points: usize,
}

/// Least-squares slope `y = a + b x`.
fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

/// Fits `log diam = log K + α log order`.
pub fn dalpha_estimate(metrics: &[GraphMetrics]) -> Result<DAlphaEstimate> {
    let usable: Vec<&GraphMetrics> = metrics.iter().filter(|m| m.order >= 2).collect();
    let mut orders: Vec<u64> = usable.iter().map(|m| m.order).collect();
    orders.sort_unstable();
    orders.dedup();
    if orders.len() < 2 {
        return Err(Error::Estimation("need two components with distinct orders ≥ 2".into()));
    }
    let xs: Vec<f64> = usable.iter().map(|m| (m.order as f64).ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|m| (m.diameter as f64).ln()).collect();
    let (intercept, slope) = fit_line(&xs, &ys);
    let residuals = xs.iter().zip(&ys).map(|(x, y)| y - (intercept + slope * x)).collect();
    let k_hat = usable
        .iter()
        .map(|m| m.diameter as f64 / (m.order as f64).powf(slope))
        .fold(f64::INFINITY, f64::min);
    Ok(DAlphaEstimate { alpha_hat: slope, k_hat, residuals, points: usable.len() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpansionVerdict {
    NoCounterexample,
    ExpansionFailsEmpirically,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub components: usize,
    pub min_cheeger_lower: Option<f64>,
    pub min_cheeger_upper: Option<f64>,
    /// Log-log slope of the Cheeger lower bounds against order.
    pub lower_decay_exponent: Option<f64>,
    /// Log-log slope of the Cheeger upper bounds against order.
    pub upper_decay_exponent: Option<f64>,
    pub verdict: ExpansionVerdict,
    /// Desk-scale evidence only.
    pub non_conclusive: bool,
    pub normalization: String,
}

fn decay_exponent(metrics: &[GraphMetrics], pick: impl Fn(&GraphMetrics) -> Option<f64>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = metrics
        .iter()
        .filter_map(|m| pick(m).filter(|v| *v > 0.0).map(|v| ((m.order as f64).ln(), v.ln())))
        .collect();
    let mut xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let distinct = {
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs.len()
    };
    if distinct < 2 {
        return None;
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    Some(fit_line(&xs, &ys).1)
}

/// Upper bounds come from explicit cuts, so a clear downward trend in them
/// is evidence that expansion fails; lower bounds alone cannot show that.
pub fn expansion_report(metrics: &[GraphMetrics]) -> ExpansionReport {
    let min_of = |f: fn(&GraphMetrics) -> Option<f64>| {
        metrics.iter().filter_map(f).reduce(f64::min)
    };
    let upper_exp = decay_exponent(metrics, |m| m.cheeger_upper);
    let first_last = {
        let ups: Vec<f64> = metrics.iter().filter_map(|m| m.cheeger_upper).collect();
        (ups.first().copied(), ups.last().copied())
    };
    let fails = match (upper_exp, first_last) {
        (Some(e), (Some(first), Some(last))) => metrics.len() >= 2 && e < -0.25 && last < first / 2.0,
        _ => false,
    };
    ExpansionReport {
        components: metrics.len(),
        min_cheeger_lower: min_of(|m| m.cheeger_lower),
        min_cheeger_upper: min_of(|m| m.cheeger_upper),
        lower_decay_exponent: decay_exponent(metrics, |m| m.cheeger_lower),
        upper_decay_exponent: upper_exp,
        verdict: if fails {
            ExpansionVerdict::ExpansionFailsEmpirically
        } else {
            ExpansionVerdict::NoCounterexample
        },
        non_conclusive: true,
        normalization: "h = |∂A|/|A| (edge boundary over vertex count); divide by the degree for the other convention".into(),
    }
}

/// CSV: `k, family, params, order, diameter, girth, lambda1, cheeger_lower,
/// cheeger_upper, diam_over_order_alpha`.
pub fn write_metrics_csv<W: std::io::Write>(out: W, metrics: &[GraphMetrics], alpha: &BigRational) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidInput(format!("CSV write failed: {e}"));
    w.write_record([
        "k",
        "family",
        "params",
        "order",
        "diameter",
        "girth",
        "lambda1",
        "cheeger_lower",
        "cheeger_upper",
        "diam_over_order_alpha",
    ])
    .map_err(io)?;
    let ratios = diam_over_order_alpha(metrics, ratio_to_f64(alpha));
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.12}")).unwrap_or_default();
    for (i, m) in metrics.iter().enumerate() {
        let params: Vec<String> = m.spec.params().iter().map(u64::to_string).collect();
        w.write_record([
            (i + 1).to_string(),
            m.spec.family(),
            params.join(";"),
            m.order.to_string(),
            m.diameter.to_string(),
            m.girth.to_string(),
            opt(m.lambda1),
            opt(m.cheeger_lower),
            opt(m.cheeger_upper),
            format!("{:.12}", ratios[i]),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("CSV write failed: {e}")))?;
    Ok(())
}

/// `gcd`-reduced `a/b` helper for callers that build exact constants.
pub fn rational(a: i64, b: i64) -> BigRational {
    let g = a.gcd(&b).max(1);
    BigRational::new((a / g).into(), (b / g).into())
}
