//! Finite group families with exact element arithmetic, their canonical
//! symmetric generating sets, and the infinite parents they are quotients of.

mod element;
mod parent;

use std::fmt;
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::f2poly::{find_primitive_poly, PolyF2, QuotientRingF2};

pub use element::Element;
pub use parent::{parent_membership, LaurentF2, Parent, ParentElement, ParentSchedule};

/// Largest lamplighter level: `p_1 + … + p_6 = 41` keeps the modulus within a word.
pub const LAMPLIGHTER_MAX_LEVEL: usize = 6;
/// Largest lamp count for wreath products (two bits per lamp in a `u64`).
pub const WREATH_MAX_N: u32 = 32;
/// Largest modulus for `SL_m(ℤ/Nℤ)`; entries are stored as `u32`.
pub const SL_MAX_MODULUS: u64 = 1 << 16;

/// Something with an identity, a product and an ordered generating list.
/// Implemented by finite quotients and by the infinite parents, so the same
/// breadth-first search serves both.
pub trait Multiplication {
    type Elem: Clone + Eq + Hash;
    fn identity(&self) -> Self::Elem;
    fn generator_list(&self) -> Vec<Self::Elem>;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lamp {
    Z2,
    Z4,
    Z2xZ2,
}

impl Lamp {
    pub fn order(self) -> u64 {
        match self {
            Lamp::Z2 => 2,
            Lamp::Z4 | Lamp::Z2xZ2 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Lamp::Z2 => "z2",
            Lamp::Z4 => "z4",
            Lamp::Z2xZ2 => "z2xz2",
        }
    }

    pub fn parse(s: &str) -> Result<Lamp> {
        match s {
            "z2" => Ok(Lamp::Z2),
            "z4" => Ok(Lamp::Z4),
            "z2xz2" => Ok(Lamp::Z2xZ2),
            _ => Err(Error::InvalidInput(format!("unknown lamp group {s:?}"))),
        }
    }

    /// Lamp product on a single value.
    pub fn op(self, a: u8, b: u8) -> u8 {
        match self {
            Lamp::Z4 => (a + b) & 3,
            Lamp::Z2 | Lamp::Z2xZ2 => a ^ b,
        }
    }

    pub fn inv(self, a: u8) -> u8 {
        match self {
            Lamp::Z4 => (4 - a) & 3,
            Lamp::Z2 | Lamp::Z2xZ2 => a,
        }
    }

    /// Lane-wise product of two packed lamp words, two bits per lane.
    fn op_packed(self, a: u64, b: u64) -> u64 {
        match self {
            Lamp::Z4 => (a ^ b) ^ ((a & b & 0x5555_5555_5555_5555) << 1),
            Lamp::Z2 | Lamp::Z2xZ2 => a ^ b,
        }
    }
}

/// Which finite-index subgroup of `ℤ×ℤ/2` is quotiented out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZxZ2Kind {
    /// `nℤ×ℤ/2`, quotient `ℤ/n`.
    Full,
    /// `⟨(n,0)⟩`, quotient `ℤ/n×ℤ/2`.
    Plain,
    /// `⟨(n,1)⟩`, quotient `ℤ/2n`.
    Twisted,
}

impl ZxZ2Kind {
    pub const ALL: [ZxZ2Kind; 3] = [ZxZ2Kind::Full, ZxZ2Kind::Plain, ZxZ2Kind::Twisted];

    pub fn name(self) -> &'static str {
        match self {
            ZxZ2Kind::Full => "full",
            ZxZ2Kind::Plain => "plain",
            ZxZ2Kind::Twisted => "twisted",
        }
    }

    pub fn parse(s: &str) -> Result<ZxZ2Kind> {
        match s {
            "full" => Ok(ZxZ2Kind::Full),
            "plain" => Ok(ZxZ2Kind::Plain),
            "twisted" => Ok(ZxZ2Kind::Twisted),
            _ => Err(Error::InvalidInput(format!("unknown ℤ×ℤ/2 subgroup kind {s:?}"))),
        }
    }

    /// Index of the subgroup in `ℤ×ℤ/2`.
    pub fn index(self, n: u64) -> u64 {
        match self {
            ZxZ2Kind::Full => n,
            ZxZ2Kind::Plain | ZxZ2Kind::Twisted => 2 * n,
        }
    }
}

/// A finite group family with its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupSpec {
    Cyclic { n: u64 },
    /// `(ℤ/N)² ⋊ ℤ/δ(N)` with `ℤ` acting through `A = [[1,1],[1,0]]`.
    SolQuotient { n: u64 },
    SlModN { m: u32, n: u64 },
    WreathOverCycle { lamp: Lamp, n: u32 },
    /// The lamplighter group reduced modulo `P_1⋯P_k`.
    LamplighterCongruence { k: usize },
    HeisenbergModN { n: u64 },
    ZxZ2Quotient { kind: ZxZ2Kind, n: u64 },
}

impl GroupSpec {
    pub fn family(&self) -> String {
        match self {
            GroupSpec::Cyclic { .. } => "cyclic".into(),
            GroupSpec::SolQuotient { .. } => "sol".into(),
            GroupSpec::SlModN { .. } => "sl".into(),
            GroupSpec::WreathOverCycle { lamp, .. } => format!("wreath-{}", lamp.name()),
            GroupSpec::LamplighterCongruence { .. } => "lamplighter".into(),
            GroupSpec::HeisenbergModN { .. } => "heisenberg".into(),
            GroupSpec::ZxZ2Quotient { kind, .. } => format!("zxz2-{}", kind.name()),
        }
    }

    pub fn params(&self) -> Vec<u64> {
        match *self {
            GroupSpec::Cyclic { n }
            | GroupSpec::SolQuotient { n }
            | GroupSpec::HeisenbergModN { n }
            | GroupSpec::ZxZ2Quotient { n, .. } => vec![n],
            GroupSpec::SlModN { m, n } => vec![m as u64, n],
            GroupSpec::WreathOverCycle { n, .. } => vec![n as u64],
            GroupSpec::LamplighterCongruence { k } => vec![k as u64],
        }
    }

    pub fn from_parts(family: &str, params: &[u64]) -> Result<GroupSpec> {
        let arity = |want: usize| {
            if params.len() == want {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!(
                    "family {family:?} takes {want} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let spec = match family {
            "cyclic" => {
                arity(1)?;
                GroupSpec::Cyclic { n: params[0] }
            }
            "sol" => {
                arity(1)?;
                GroupSpec::SolQuotient { n: params[0] }
            }
            "sl" => {
                arity(2)?;
                let m = u32::try_from(params[0])
                    .map_err(|_| Error::InvalidInput("matrix size too large".into()))?;
                GroupSpec::SlModN { m, n: params[1] }
            }
            "lamplighter" => {
                arity(1)?;
                GroupSpec::LamplighterCongruence { k: params[0] as usize }
            }
            "heisenberg" => {
                arity(1)?;
                GroupSpec::HeisenbergModN { n: params[0] }
            }
            _ => {
                if let Some(lamp) = family.strip_prefix("wreath-") {
                    arity(1)?;
                    let n = u32::try_from(params[0])
                        .map_err(|_| Error::InvalidInput("wreath n too large".into()))?;
                    GroupSpec::WreathOverCycle { lamp: Lamp::parse(lamp)?, n }
                } else if let Some(kind) = family.strip_prefix("zxz2-") {
                    arity(1)?;
                    GroupSpec::ZxZ2Quotient { kind: ZxZ2Kind::parse(kind)?, n: params[0] }
                } else {
                    return Err(Error::InvalidInput(format!("unknown group family {family:?}")));
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let range = |what: &'static str, value: u64, ok: bool, bound: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::OutOfRange {
                    what,
                    value: value.to_string(),
                    bound: bound.to_string(),
                })
            }
        };
        match *self {
            GroupSpec::Cyclic { n } => range("cyclic order", n, n >= 1, ">= 1"),
            GroupSpec::SolQuotient { n } => {
                range("SOL modulus", n, (2..=1 << 20).contains(&n), "2..=2^20")
            }
            GroupSpec::SlModN { m, n } => {
                range("SL matrix size", m as u64, (2..=3).contains(&m), "2..=3")?;
                range("SL modulus", n, (2..=SL_MAX_MODULUS).contains(&n), "2..=2^16")
            }
            GroupSpec::WreathOverCycle { n, .. } => {
                range("wreath n", n as u64, (1..=WREATH_MAX_N).contains(&n), "1..=32")
            }
            GroupSpec::LamplighterCongruence { k } => range(
                "lamplighter level",
                k as u64,
                (1..=LAMPLIGHTER_MAX_LEVEL).contains(&k),
                "1..=6",
            ),
            GroupSpec::HeisenbergModN { n } => {
                range("Heisenberg modulus", n, (2..=1 << 20).contains(&n), "2..=2^20")
            }
            GroupSpec::ZxZ2Quotient { n, .. } => {
                range("ℤ×ℤ/2 quotient n", n, (1..=1 << 40).contains(&n), "1..=2^40")
            }
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params().iter().map(u64::to_string).collect();
        write!(f, "{}({})", self.family(), params.join(","))
    }
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    family: String,
    params: Vec<u64>,
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecRepr { family: self.family(), params: self.params() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SpecRepr::deserialize(d)?;
        GroupSpec::from_parts(&repr.family, &repr.params).map_err(serde::de::Error::custom)
    }
}

/// The `i`-th lamplighter modulus factor: the least primitive polynomial of
/// degree `p_i`.
pub fn lamplighter_factor(i: usize) -> Result<PolyF2> {
    find_primitive_poly(arith::nth_prime(i) as u32)
}

/// `P_1⋯P_k`.
pub fn lamplighter_modulus(k: usize) -> Result<PolyF2> {
    let mut m = PolyF2::ONE;
    for i in 1..=k {
        m = m.checked_mul(lamplighter_factor(i)?)?;
    }
    Ok(m)
}

/// Exact group order from the closed forms.
pub fn group_order(spec: &GroupSpec) -> Result<BigUint> {
    spec.validate()?;
    Ok(match *spec {
        GroupSpec::Cyclic { n } => BigUint::from(n),
        GroupSpec::SolQuotient { n } => BigUint::from(n) * n * arith::pisano(n)?,
        GroupSpec::SlModN { m, n } => arith::sl_order(m, n)?,
        GroupSpec::WreathOverCycle { lamp, n } => BigUint::from(lamp.order()).pow(n) * n,
        GroupSpec::LamplighterCongruence { k } => {
            let bits: u64 = (1..=k).map(arith::nth_prime).sum();
            arith::ell(k)? << bits
        }
        GroupSpec::HeisenbergModN { n } => BigUint::from(n).pow(3),
        GroupSpec::ZxZ2Quotient { kind, n } => BigUint::from(kind.index(n)),
    })
}

/// An ordered generating multiset together with the slot of each
/// generator's inverse. Self-inverse generators are paired with themselves;
/// otherwise slot `i` is paired with the first free later slot holding its
/// inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSet {
    elems: Vec<Element>,
    inverse: Vec<usize>,
}

impl GenSet {
    pub fn new(group: &Group, elems: Vec<Element>) -> Result<GenSet> {
        for e in &elems {
            group.check(e)?;
        }
        let mut inverse = vec![usize::MAX; elems.len()];
        for i in 0..elems.len() {
            if inverse[i] != usize::MAX {
                continue;
            }
            let inv = group.inverse_unchecked(&elems[i]);
            if inv == elems[i] {
                inverse[i] = i;
                continue;
            }
            let j = (i + 1..elems.len())
                .find(|&j| inverse[j] == usize::MAX && elems[j] == inv)
                .ok_or_else(|| {
                    Error::InvalidInput(format!("generator {} has no inverse in the set", elems[i]))
                })?;
            inverse[i] = j;
            inverse[j] = i;
        }
        Ok(GenSet { elems, inverse })
    }

    pub fn elems(&self) -> &[Element] {
        &self.elems
    }

    /// Slot holding the inverse of the generator in slot `i`.
    pub fn inverse_slot(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }
}

#[derive(Clone, Debug)]
enum Tables {
    None,
    Sol { delta: u64, apow: Vec<[u64; 4]> },
    Lamp { ring: QuotientRingF2, ell: u64, xpow: Vec<PolyF2> },
}

/// A group family instantiated with the tables its product needs.
#[derive(Clone, Debug)]
pub struct Group {
    spec: GroupSpec,
    order: BigUint,
    tables: Tables,
}

impl Group {
    pub fn new(spec: &GroupSpec) -> Result<Group> {
        let order = group_order(spec)?;
        let tables = match *spec {
            GroupSpec::SolQuotient { n } => {
                let delta = arith::pisano(n)?;
                let mut apow = Vec::with_capacity(delta as usize);
                // A^j = [[F_{j+1}, F_j], [F_j, F_{j-1}]]
                let (mut f_prev, mut f, mut f_next) = (1 % n, 0u64, 1 % n);
                for _ in 0..delta {
                    apow.push([f_next, f, f, f_prev]);
                    let g = (f + f_next) % n;
                    f_prev = f;
                    f = f_next;
                    f_next = g;
                }
                Tables::Sol { delta, apow }
            }
            GroupSpec::LamplighterCongruence { k } => {
                let ring = QuotientRingF2::new(lamplighter_modulus(k)?)?;
                let ell = arith::ell(k)?.to_u64().expect("ℓ_6 fits in u64");
                let xpow = if ell <= 1 << 20 {
                    let mut v = Vec::with_capacity(ell as usize);
                    let mut x = PolyF2::ONE;
                    for _ in 0..ell {
                        v.push(x);
                        x = ring.mul_by_x_pow(x, 1);
                    }
                    v
                } else {
                    Vec::new()
                };
                Tables::Lamp { ring, ell, xpow }
            }
            _ => Tables::None,
        };
        Ok(Group { spec: spec.clone(), order, tables })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// `δ(N)` for SOL quotients.
    pub fn sol_delta(&self) -> Option<u64> {
        match self.tables {
            Tables::Sol { delta, .. } => Some(delta),
            _ => None,
        }
    }

    /// `(ring, ℓ_k)` for lamplighter quotients.
    pub fn lamplighter_ring(&self) -> Option<(QuotientRingF2, u64)> {
        match &self.tables {
            Tables::Lamp { ring, ell, .. } => Some((*ring, *ell)),
            _ => None,
        }
    }

    fn apow(&self, j: u64) -> [u64; 4] {
        match &self.tables {
            Tables::Sol { apow, .. } => apow[j as usize],
            _ => unreachable!("A^j requested outside a SOL quotient"),
        }
    }

    fn xpow(&self, j: u64) -> PolyF2 {
        match &self.tables {
            Tables::Lamp { ring, xpow, .. } => {
                if xpow.is_empty() {
                    ring.pow(PolyF2::X, j)
                } else {
                    xpow[j as usize]
                }
            }
            _ => unreachable!("X^j requested outside a lamplighter quotient"),
        }
    }

    pub fn identity(&self) -> Element {
        match self.spec {
            GroupSpec::Cyclic { .. } => Element::Cyclic(0),
            GroupSpec::SolQuotient { .. } => Element::Sol { v: [0, 0], j: 0 },
            GroupSpec::SlModN { m, .. } => Element::sl_identity(m),
            GroupSpec::WreathOverCycle { .. } => Element::Wreath { lamps: 0, shift: 0 },
            GroupSpec::LamplighterCongruence { .. } => {
                Element::Lamplighter { p: PolyF2::ZERO, j: 0 }
            }
            GroupSpec::HeisenbergModN { .. } => Element::Heisenberg { a: 0, b: 0, c: 0 },
            GroupSpec::ZxZ2Quotient { .. } => Element::ZxZ2 { a: 0, e: 0 },
        }
    }

    /// Checks that `e` is the canonical encoding of an element of this group.
    pub fn check(&self, e: &Element) -> Result<()> {
        let ok = match (&self.spec, e) {
            (GroupSpec::Cyclic { n }, Element::Cyclic(a)) => a < n,
            (GroupSpec::SolQuotient { n }, Element::Sol { v, j }) => {
                v[0] < *n && v[1] < *n && *j < self.sol_delta().expect("SOL tables")
            }
            (GroupSpec::SlModN { m, n }, Element::Sl { m: em, a }) => {
                let mm = (*m * *m) as usize;
                em == m
                    && a[..mm].iter().all(|&x| (x as u64) < *n)
                    && a[mm..].iter().all(|&x| x == 0)
                    && element::sl_det(*m, a, *n) == 1 % n
            }
            (GroupSpec::WreathOverCycle { lamp, n }, Element::Wreath { lamps, shift }) => {
                let width = 2 * *n;
                let in_range = width == 64 || lamps >> width == 0;
                let lane_ok = *lamp != Lamp::Z2 || lamps & 0xAAAA_AAAA_AAAA_AAAA == 0;
                in_range && lane_ok && shift < n
            }
            (GroupSpec::LamplighterCongruence { .. }, Element::Lamplighter { p, j }) => {
                let (ring, ell) = self.lamplighter_ring().expect("lamplighter tables");
                ring.is_reduced(*p) && *j < ell
            }
            (GroupSpec::HeisenbergModN { n }, Element::Heisenberg { a, b, c }) => {
                a < n && b < n && c < n
            }
            (GroupSpec::ZxZ2Quotient { kind, n }, Element::ZxZ2 { a, e }) => {
                a < n && *e <= 1 && (*kind != ZxZ2Kind::Full || *e == 0)
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidElement(format!("{e} for {}", self.spec)))
        }
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub fn inverse(&self, a: &Element) -> Result<Element> {
        self.check(a)?;
        Ok(self.inverse_unchecked(a))
    }

    /// Product of two canonical elements; the caller guarantees canonicity.
    pub fn mul_unchecked(&self, a: &Element, b: &Element) -> Element {
        match (&self.spec, a, b) {
            (GroupSpec::Cyclic { n }, Element::Cyclic(x), Element::Cyclic(y)) => {
                Element::Cyclic(((*x as u128 + *y as u128) % *n as u128) as u64)
            }
            (GroupSpec::SolQuotient { n }, Element::Sol { v, j }, Element::Sol { v: w, j: k }) => {
                let n = *n;
                let m = self.apow(*j);
                let delta = self.sol_delta().expect("SOL tables");
                let x = (v[0] + (m[0] * w[0] + m[1] * w[1]) % n) % n;
                let y = (v[1] + (m[2] * w[0] + m[3] * w[1]) % n) % n;
                Element::Sol { v: [x, y], j: (j + k) % delta }
            }
            (GroupSpec::SlModN { m, n }, Element::Sl { a: x, .. }, Element::Sl { a: y, .. }) => {
                element::sl_mul(*m, x, y, *n)
            }
            (
                GroupSpec::WreathOverCycle { lamp, n },
                Element::Wreath { lamps: f, shift: s },
                Element::Wreath { lamps: g, shift: t },
            ) => Element::Wreath {
                lamps: lamp.op_packed(*f, element::rotate_lamps(*g, *s, *n)),
                shift: (s + t) % n,
            },
            (
                GroupSpec::LamplighterCongruence { .. },
                Element::Lamplighter { p, j },
                Element::Lamplighter { p: q, j: k },
            ) => {
                let (ring, ell) = self.lamplighter_ring().expect("lamplighter tables");
                let shifted = if q.is_zero() { *q } else { ring.mul(self.xpow(*j), *q) };
                Element::Lamplighter { p: *p + shifted, j: (j + k) % ell }
            }
            (
                GroupSpec::HeisenbergModN { n },
                Element::Heisenberg { a, b, c },
                Element::Heisenberg { a: a2, b: b2, c: c2 },
            ) => {
                let n = *n;
                Element::Heisenberg {
                    a: (a + a2) % n,
                    b: (b + b2) % n,
                    c: (c + c2 + a * b2 % n) % n,
                }
            }
            (GroupSpec::ZxZ2Quotient { kind, n }, Element::ZxZ2 { a, e }, Element::ZxZ2 { a: b, e: f }) => {
                zxz2_reduce(*kind, *n, *a as i128 + *b as i128, e ^ f)
            }
            _ => panic!("element family does not match {}", self.spec),
        }
    }

    pub fn inverse_unchecked(&self, a: &Element) -> Element {
        match (&self.spec, a) {
            (GroupSpec::Cyclic { n }, Element::Cyclic(x)) => Element::Cyclic((n - x) % n),
            (GroupSpec::SolQuotient { n }, Element::Sol { v, j }) => {
                let delta = self.sol_delta().expect("SOL tables");
                let jinv = (delta - j) % delta;
                let m = self.apow(jinv);
                let x = (m[0] * v[0] + m[1] * v[1]) % n;
                let y = (m[2] * v[0] + m[3] * v[1]) % n;
                Element::Sol { v: [(n - x) % n, (n - y) % n], j: jinv }
            }
            (GroupSpec::SlModN { m, n }, Element::Sl { a: x, .. }) => element::sl_inverse(*m, x, *n),
            (GroupSpec::WreathOverCycle { lamp, n }, Element::Wreath { lamps, shift }) => {
                let back = (n - shift) % n;
                let rotated = element::rotate_lamps(*lamps, back, *n);
                let mut out = 0u64;
                for i in 0..*n {
                    let v = ((rotated >> (2 * i)) & 3) as u8;
                    out |= (lamp.inv(v) as u64) << (2 * i);
                }
                Element::Wreath { lamps: out, shift: back }
            }
            (GroupSpec::LamplighterCongruence { .. }, Element::Lamplighter { p, j }) => {
                let (ring, ell) = self.lamplighter_ring().expect("lamplighter tables");
                let jinv = (ell - j) % ell;
                Element::Lamplighter { p: ring.mul(self.xpow(jinv), *p), j: jinv }
            }
            (GroupSpec::HeisenbergModN { n }, Element::Heisenberg { a, b, c }) => {
                let n = *n;
                Element::Heisenberg {
                    a: (n - a) % n,
                    b: (n - b) % n,
                    c: ((n - c) % n + a * b % n) % n,
                }
            }
            (GroupSpec::ZxZ2Quotient { kind, n }, Element::ZxZ2 { a, e }) => {
                zxz2_reduce(*kind, *n, -(*a as i128), *e)
            }
            _ => panic!("element family does not match {}", self.spec),
        }
    }

    /// The canonical generating list, before inverse pairing.
    pub fn generator_elements(&self) -> Vec<Element> {
        match self.spec {
            GroupSpec::Cyclic { n } => vec![Element::Cyclic(1 % n), Element::Cyclic((n - 1) % n)],
            GroupSpec::SolQuotient { n } => {
                let delta = self.sol_delta().expect("SOL tables");
                let t = |x: u64, y: u64| Element::Sol { v: [x % n, y % n], j: 0 };
                vec![
                    t(1, 0),
                    t(n - 1, 0),
                    t(0, 1),
                    t(0, n - 1),
                    Element::Sol { v: [0, 0], j: 1 % delta },
                    Element::Sol { v: [0, 0], j: (delta - 1) % delta },
                ]
            }
            GroupSpec::SlModN { m, n } => {
                let mut out = Vec::new();
                for i in 0..m {
                    for j in 0..m {
                        if i != j {
                            out.push(element::transvection(m, i, j, 1, n));
                            out.push(element::transvection(m, i, j, n - 1, n));
                        }
                    }
                }
                out
            }
            GroupSpec::WreathOverCycle { lamp, n } => {
                let mut out = vec![
                    Element::Wreath { lamps: 0, shift: 1 % n },
                    Element::Wreath { lamps: 0, shift: (n - 1) % n },
                ];
                for v in 1..lamp.order() {
                    out.push(Element::Wreath { lamps: v, shift: 0 });
                }
                out
            }
            GroupSpec::LamplighterCongruence { .. } => {
                let (_, ell) = self.lamplighter_ring().expect("lamplighter tables");
                vec![
                    Element::Lamplighter { p: PolyF2::ZERO, j: 1 % ell },
                    Element::Lamplighter { p: PolyF2::ZERO, j: (ell - 1) % ell },
                    Element::Lamplighter { p: PolyF2::ONE, j: 0 },
                ]
            }
            GroupSpec::HeisenbergModN { n } => vec![
                Element::Heisenberg { a: 1, b: 0, c: 0 },
                Element::Heisenberg { a: n - 1, b: 0, c: 0 },
                Element::Heisenberg { a: 0, b: 1, c: 0 },
                Element::Heisenberg { a: 0, b: n - 1, c: 0 },
            ],
            GroupSpec::ZxZ2Quotient { kind, n } => vec![
                zxz2_reduce(kind, n, 1, 0),
                zxz2_reduce(kind, n, -1, 0),
                zxz2_reduce(kind, n, 0, 1),
            ],
        }
    }

    pub fn generators(&self) -> GenSet {
        GenSet::new(self, self.generator_elements()).expect("canonical generating sets are symmetric")
    }

    /// The natural projection onto a quotient of this group in the same
    /// family. Errors if `target` is not such a quotient.
    pub fn project(&self, target: &Group, e: &Element) -> Result<Element> {
        self.check(e)?;
        let incompatible = || {
            Err(Error::InvalidInput(format!(
                "{} is not a quotient of {}",
                target.spec, self.spec
            )))
        };
        let out = match (&self.spec, &target.spec, e) {
            (GroupSpec::Cyclic { n }, GroupSpec::Cyclic { n: m }, Element::Cyclic(a)) => {
                if n % m != 0 {
                    return incompatible();
                }
                Element::Cyclic(a % m)
            }
            (GroupSpec::SolQuotient { n }, GroupSpec::SolQuotient { n: m }, Element::Sol { v, j }) => {
                let (d, dm) = (self.sol_delta().unwrap(), target.sol_delta().unwrap());
                if n % m != 0 || d % dm != 0 {
                    return incompatible();
                }
                Element::Sol { v: [v[0] % m, v[1] % m], j: j % dm }
            }
            (GroupSpec::SlModN { m, n }, GroupSpec::SlModN { m: tm, n: tn }, Element::Sl { a, .. }) => {
                if m != tm || n % tn != 0 {
                    return incompatible();
                }
                let mut b = *a;
                for x in b.iter_mut() {
                    *x = (*x as u64 % tn) as u32;
                }
                Element::Sl { m: *m, a: b }
            }
            (
                GroupSpec::WreathOverCycle { lamp, n },
                GroupSpec::WreathOverCycle { lamp: tl, n: tn },
                Element::Wreath { lamps, shift },
            ) => {
                if lamp != tl || n % tn != 0 {
                    return incompatible();
                }
                let mut out = 0u64;
                for i in 0..*n {
                    let v = (lamps >> (2 * i)) & 3;
                    let pos = 2 * (i % tn);
                    let cur = (out >> pos) & 3;
                    let sum = lamp.op(cur as u8, v as u8) as u64;
                    out = (out & !(3 << pos)) | (sum << pos);
                }
                Element::Wreath { lamps: out, shift: shift % tn }
            }
            (
                GroupSpec::LamplighterCongruence { k },
                GroupSpec::LamplighterCongruence { k: tk },
                Element::Lamplighter { p, j },
            ) => {
                if tk > k {
                    return incompatible();
                }
                let (ring, ell) = target.lamplighter_ring().unwrap();
                Element::Lamplighter { p: ring.reduce(*p), j: j % ell }
            }
            (GroupSpec::HeisenbergModN { n }, GroupSpec::HeisenbergModN { n: m }, Element::Heisenberg { a, b, c }) => {
                if n % m != 0 {
                    return incompatible();
                }
                Element::Heisenberg { a: a % m, b: b % m, c: c % m }
            }
            (
                GroupSpec::ZxZ2Quotient { kind, n },
                GroupSpec::ZxZ2Quotient { kind: tk, n: tn },
                Element::ZxZ2 { a, e },
            ) => {
                // The source kernel must die in the target.
                let kernel: &[(i128, u8)] = match kind {
                    ZxZ2Kind::Full => &[(*n as i128, 0), (0, 1)],
                    ZxZ2Kind::Plain => &[(*n as i128, 0)],
                    ZxZ2Kind::Twisted => &[(*n as i128, 1)],
                };
                let id = Element::ZxZ2 { a: 0, e: 0 };
                if kernel.iter().any(|&(x, f)| zxz2_reduce(*tk, *tn, x, f) != id) {
                    return incompatible();
                }
                zxz2_reduce(*tk, *tn, *a as i128, *e)
            }
            _ => return incompatible(),
        };
        Ok(out)
    }
}

impl Multiplication for Group {
    type Elem = Element;

    fn identity(&self) -> Element {
        Group::identity(self)
    }

    fn generator_list(&self) -> Vec<Element> {
        self.generator_elements()
    }

    fn mul(&self, a: &Element, b: &Element) -> Element {
        self.mul_unchecked(a, b)
    }
}

/// Canonical representative of the image of `(a, e) ∈ ℤ×ℤ/2`.
pub fn zxz2_reduce(kind: ZxZ2Kind, n: u64, a: i128, e: u8) -> Element {
    let n = n as i128;
    let q = a.div_euclid(n);
    let r = a.rem_euclid(n) as u64;
    let e = e & 1;
    match kind {
        ZxZ2Kind::Full => Element::ZxZ2 { a: r, e: 0 },
        ZxZ2Kind::Plain => Element::ZxZ2 { a: r, e },
        ZxZ2Kind::Twisted => Element::ZxZ2 { a: r, e: e ^ (q.rem_euclid(2) as u8) },
    }
}
