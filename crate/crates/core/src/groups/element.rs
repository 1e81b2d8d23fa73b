use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2poly::PolyF2;

/// A group element in canonical encoding. Equality is equality of the
/// encoding, so canonical elements hash and compare in O(1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Cyclic(u64),
    /// `(v mod N, j mod δ(N))`.
    Sol { v: [u64; 2], j: u64 },
    /// Row-major `m×m` residues in the first `m²` slots, the rest zero.
    Sl { m: u32, a: [u32; 9] },
    /// Lamp values packed two bits per position; position `i` sits at bits `2i..2i+2`.
    Wreath { lamps: u64, shift: u32 },
    Lamplighter { p: PolyF2, j: u64 },
    /// `[[1,a,c],[0,1,b],[0,0,1]]`.
    Heisenberg { a: u64, b: u64, c: u64 },
    ZxZ2 { a: u64, e: u8 },
}

impl Element {
    pub fn sl_identity(m: u32) -> Element {
        let mut a = [0u32; 9];
        for i in 0..m as usize {
            a[i * m as usize + i] = 1;
        }
        Element::Sl { m, a }
    }

    pub fn sl_from_rows(rows: &[Vec<u64>], n: u64) -> Result<Element> {
        let m = rows.len();
        if !(2..=3).contains(&m) || rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidInput("SL elements are square 2×2 or 3×3 matrices".into()));
        }
        let mut a = [0u32; 9];
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                a[i * m + j] = (x % n) as u32;
            }
        }
        Ok(Element::Sl { m: m as u32, a })
    }

    /// Lamp value at `pos` of a wreath element.
    pub fn lamp_at(&self, pos: u32) -> Option<u8> {
        match self {
            Element::Wreath { lamps, .. } => Some(((lamps >> (2 * pos)) & 3) as u8),
            _ => None,
        }
    }

    pub fn family_tag(&self) -> &'static str {
        match self {
            Element::Cyclic(_) => "cyclic",
            Element::Sol { .. } => "sol",
            Element::Sl { .. } => "sl",
            Element::Wreath { .. } => "wreath",
            Element::Lamplighter { .. } => "lamplighter",
            Element::Heisenberg { .. } => "heisenberg",
            Element::ZxZ2 { .. } => "zxz2",
        }
    }

    /// The integer array used in JSON; wreath lamps are listed per position
    /// up to the highest lit one, followed by the shift.
    pub fn values(&self) -> Vec<u64> {
        match *self {
            Element::Cyclic(a) => vec![a],
            Element::Sol { v, j } => vec![v[0], v[1], j],
            Element::Sl { m, a } => a[..(m * m) as usize].iter().map(|&x| x as u64).collect(),
            Element::Wreath { lamps, shift } => {
                let used = (64 - lamps.leading_zeros()).div_ceil(2);
                let mut out: Vec<u64> = (0..used).map(|i| (lamps >> (2 * i)) & 3).collect();
                out.push(shift as u64);
                out
            }
            Element::Lamplighter { p, j } => vec![p.bits(), j],
            Element::Heisenberg { a, b, c } => vec![a, b, c],
            Element::ZxZ2 { a, e } => vec![a, e as u64],
        }
    }

    pub fn from_values(family: &str, values: &[u64]) -> Result<Element> {
        let bad = || Error::InvalidInput(format!("bad {family} element encoding {values:?}"));
        let need = |k: usize| if values.len() == k { Ok(()) } else { Err(bad()) };
        Ok(match family {
            "cyclic" => {
                need(1)?;
                Element::Cyclic(values[0])
            }
            "sol" => {
                need(3)?;
                Element::Sol { v: [values[0], values[1]], j: values[2] }
            }
            "sl" => {
                let m = match values.len() {
                    4 => 2,
                    9 => 3,
                    _ => return Err(bad()),
                };
                let mut a = [0u32; 9];
                for (slot, &x) in a.iter_mut().zip(values) {
                    *slot = u32::try_from(x).map_err(|_| bad())?;
                }
                Element::Sl { m, a }
            }
            "wreath" => {
                let (shift, lamps) = values.split_last().ok_or_else(bad)?;
                if lamps.len() > 32 || lamps.iter().any(|&v| v > 3) {
                    return Err(bad());
                }
                let packed = lamps.iter().enumerate().fold(0u64, |acc, (i, &v)| acc | v << (2 * i));
                Element::Wreath { lamps: packed, shift: u32::try_from(*shift).map_err(|_| bad())? }
            }
            "lamplighter" => {
                need(2)?;
                Element::Lamplighter { p: PolyF2::from_bits(values[0]), j: values[1] }
            }
            "heisenberg" => {
                need(3)?;
                Element::Heisenberg { a: values[0], b: values[1], c: values[2] }
            }
            "zxz2" => {
                need(2)?;
                Element::ZxZ2 { a: values[0], e: u8::try_from(values[1]).map_err(|_| bad())? }
            }
            _ => return Err(Error::InvalidInput(format!("unknown element family {family:?}"))),
        })
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Element::Cyclic(a) => write!(f, "{a}"),
            Element::Sol { v, j } => write!(f, "(({},{}),{})", v[0], v[1], j),
            Element::Sl { m, a } => {
                let m = m as usize;
                let rows: Vec<String> = (0..m)
                    .map(|i| {
                        let r: Vec<String> = a[i * m..(i + 1) * m].iter().map(u32::to_string).collect();
                        format!("[{}]", r.join(","))
                    })
                    .collect();
                write!(f, "[{}]", rows.join(","))
            }
            Element::Wreath { shift, .. } => {
                let v = self.values();
                let lamps: Vec<String> = v[..v.len() - 1].iter().map(u64::to_string).collect();
                write!(f, "([{}],{})", lamps.join(","), shift)
            }
            Element::Lamplighter { p, j } => write!(f, "({p},{j})"),
            Element::Heisenberg { a, b, c } => write!(f, "[[1,{a},{c}],[0,1,{b}],[0,0,1]]"),
            Element::ZxZ2 { a, e } => write!(f, "({a},{e})"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    family: String,
    value: Vec<u64>,
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementRepr { family: self.family_tag().into(), value: self.values() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ElementRepr::deserialize(d)?;
        Element::from_values(&repr.family, &repr.value).map_err(serde::de::Error::custom)
    }
}

/// Moves the lamp at position `i` to position `i + s mod n`.
pub(super) fn rotate_lamps(g: u64, s: u32, n: u32) -> u64 {
    if s == 0 || g == 0 {
        return g;
    }
    let width = 2 * n;
    let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
    ((g << (2 * s)) | (g >> (width - 2 * s))) & mask
}

pub(super) fn sl_det(m: u32, a: &[u32; 9], n: u64) -> u64 {
    let x = |i: usize| a[i] as u64;
    if m == 2 {
        return (x(0) * x(3) % n + n - x(1) * x(2) % n) % n;
    }
    let minor = |p: usize, q: usize, r: usize, s: usize| (x(p) * x(q) % n + n - x(r) * x(s) % n) % n;
    let t0 = x(0) * minor(4, 8, 5, 7) % n;
    let t1 = x(1) * minor(3, 8, 5, 6) % n;
    let t2 = x(2) * minor(3, 7, 4, 6) % n;
    (t0 + n - t1 + t2) % n
}

pub(super) fn sl_mul(m: u32, x: &[u32; 9], y: &[u32; 9], n: u64) -> Element {
    let m = m as usize;
    let mut out = [0u32; 9];
    for i in 0..m {
        for j in 0..m {
            let mut acc = 0u64;
            for k in 0..m {
                acc += x[i * m + k] as u64 * y[k * m + j] as u64 % n;
            }
            out[i * m + j] = (acc % n) as u32;
        }
    }
    Element::Sl { m: m as u32, a: out }
}

/// Inverse of a determinant-one matrix: its adjugate.
pub(super) fn sl_inverse(m: u32, a: &[u32; 9], n: u64) -> Element {
    let x = |i: usize| a[i] as u64;
    let neg = |v: u64| (n - v % n) % n;
    let mut out = [0u32; 9];
    if m == 2 {
        out[0] = x(3) as u32;
        out[1] = neg(x(1)) as u32;
        out[2] = neg(x(2)) as u32;
        out[3] = x(0) as u32;
        return Element::Sl { m, a: out };
    }
    for i in 0..3 {
        for j in 0..3 {
            // adj[i][j] = cofactor C[j][i]
            let rows: Vec<usize> = (0..3).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..3).filter(|&c| c != i).collect();
            let p = x(rows[0] * 3 + cols[0]) * x(rows[1] * 3 + cols[1]) % n;
            let q = x(rows[0] * 3 + cols[1]) * x(rows[1] * 3 + cols[0]) % n;
            let minor = (p + n - q) % n;
            let c = if (i + j) % 2 == 0 { minor } else { neg(minor) };
            out[i * 3 + j] = c as u32;
        }
    }
    Element::Sl { m, a: out }
}

/// `e_ij(t)`: the identity with `t` added in row `i`, column `j`.
pub(super) fn transvection(m: u32, i: u32, j: u32, t: u64, n: u64) -> Element {
    let mut e = Element::sl_identity(m);
    if let Element::Sl { a, .. } = &mut e {
        a[(i * m + j) as usize] = (t % n) as u32;
    }
    e
}
