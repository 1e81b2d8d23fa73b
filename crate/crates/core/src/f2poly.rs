//! Polynomials over 𝔽₂ and their quotient rings.
//!
//! A [`PolyF2`] packs its coefficients into a `u64`, bit `i` being the
//! coefficient of `X^i`, so degrees up to 63 are representable. Products are
//! formed carry-less in a `u128` and reduced immediately, which is all the
//! lamplighter construction needs: its moduli are products of a handful of
//! primitive polynomials of small prime degree.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::factor_u64;
use crate::error::{Error, Result};

/// Largest degree accepted by [`find_primitive_poly`].
pub const PRIMITIVE_DEGREE_BOUND: u32 = 20;

/// Largest degree of an irreducible factor whose unit group we are willing
/// to factor by trial division in [`multiplicative_order`].
const ORDER_FACTOR_DEGREE_BOUND: u32 = 40;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PolyF2(u64);

impl PolyF2 {
    pub const ZERO: PolyF2 = PolyF2(0);
    pub const ONE: PolyF2 = PolyF2(1);
    pub const X: PolyF2 = PolyF2(2);

    pub const fn from_bits(bits: u64) -> Self {
        PolyF2(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// `X^e` for `e <= 63`.
    pub fn monomial(e: u32) -> Result<Self> {
        if e > 63 {
            return Err(Error::OutOfRange {
                what: "monomial degree",
                value: e.to_string(),
                bound: "<= 63".into(),
            });
        }
        Ok(PolyF2(1u64 << e))
    }

    /// Builds a polynomial from the exponents with coefficient 1.
    pub fn from_exponents(exps: &[u32]) -> Result<Self> {
        exps.iter()
            .try_fold(PolyF2::ZERO, |acc, &e| Ok(acc + PolyF2::monomial(e)?))
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(self) -> Option<u32> {
        if self.0 == 0 {
            None
        } else {
            Some(63 - self.0.leading_zeros())
        }
    }

    pub fn coeff(self, i: u32) -> bool {
        i < 64 && (self.0 >> i) & 1 == 1
    }

    /// Full product; fails if the degree would exceed 63.
    pub fn checked_mul(self, other: PolyF2) -> Result<PolyF2> {
        let p = clmul(self.0, other.0);
        if p >> 64 != 0 {
            return Err(Error::OutOfRange {
                what: "product degree",
                value: (127 - p.leading_zeros()).to_string(),
                bound: "<= 63".into(),
            });
        }
        Ok(PolyF2(p as u64))
    }

    /// Quotient and remainder of division by a nonzero `m`.
    pub fn div_rem(self, m: PolyF2) -> Result<(PolyF2, PolyF2)> {
        let dm = m
            .degree()
            .ok_or_else(|| Error::InvalidModulus("division by the zero polynomial".into()))?;
        let mut r = self.0;
        let mut q = 0u64;
        while r != 0 {
            let dr = 63 - r.leading_zeros();
            if dr < dm {
                break;
            }
            q |= 1 << (dr - dm);
            r ^= m.0 << (dr - dm);
        }
        Ok((PolyF2(q), PolyF2(r)))
    }

    pub fn rem(self, m: PolyF2) -> Result<PolyF2> {
        Ok(self.div_rem(m)?.1)
    }

    pub fn gcd(self, other: PolyF2) -> PolyF2 {
        let (mut a, mut b) = (self, other);
        while !b.is_zero() {
            let r = a.div_rem(b).expect("b is nonzero").1;
            a = b;
            b = r;
        }
        a
    }

    /// Lowercase hex of the little-endian coefficient bytes, e.g. `X²+X+1` is `"07"`.
    pub fn to_hex(self) -> String {
        let bytes = self.0.to_le_bytes();
        let used = (8 - self.0.leading_zeros() as usize / 8).max(1);
        bytes[..used].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Result<PolyF2> {
        let bad = || Error::InvalidInput(format!("malformed polynomial hex {s:?}"));
        if s.is_empty() || !s.len().is_multiple_of(2) || s.len() > 16 {
            return Err(bad());
        }
        let mut bits = 0u64;
        for (i, chunk) in s.as_bytes().chunks(2).enumerate() {
            let byte = std::str::from_utf8(chunk)
                .ok()
                .and_then(|c| u8::from_str_radix(c, 16).ok())
                .ok_or_else(bad)?;
            bits |= (byte as u64) << (8 * i);
        }
        Ok(PolyF2(bits))
    }
}

impl Add for PolyF2 {
    type Output = PolyF2;
    fn add(self, rhs: PolyF2) -> PolyF2 {
        poly_add(self, rhs)
    }
}

impl fmt::Debug for PolyF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyF2({self})")
    }
}

impl fmt::Display for PolyF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..64).rev() {
            if !self.coeff(i) {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "1")?,
                1 => write!(f, "X")?,
                _ => write!(f, "X^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for PolyF2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for PolyF2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        PolyF2::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

fn clmul(a: u64, b: u64) -> u128 {
    let mut acc = 0u128;
    let mut b = b;
    let a = a as u128;
    while b != 0 {
        let i = b.trailing_zeros();
        acc ^= a << i;
        b &= b - 1;
    }
    acc
}

fn reduce_wide(mut v: u128, m: PolyF2, dm: u32) -> PolyF2 {
    let mw = m.0 as u128;
    while v != 0 {
        let dv = 127 - v.leading_zeros();
        if dv < dm {
            break;
        }
        v ^= mw << (dv - dm);
    }
    PolyF2(v as u64)
}

fn check_modulus(m: PolyF2) -> Result<u32> {
    match m.degree() {
        Some(d) if d >= 1 => Ok(d),
        _ => Err(Error::InvalidModulus(format!(
            "modulus {m} must have degree at least 1"
        ))),
    }
}

pub fn poly_add(a: PolyF2, b: PolyF2) -> PolyF2 {
    PolyF2(a.0 ^ b.0)
}

/// `a·b mod m`. Inputs need not be reduced.
pub fn poly_mul_mod(a: PolyF2, b: PolyF2, m: PolyF2) -> Result<PolyF2> {
    let dm = check_modulus(m)?;
    let a = reduce_wide(a.0 as u128, m, dm);
    let b = reduce_wide(b.0 as u128, m, dm);
    Ok(reduce_wide(clmul(a.0, b.0), m, dm))
}

pub fn poly_pow_mod(a: PolyF2, mut e: u64, m: PolyF2) -> Result<PolyF2> {
    let dm = check_modulus(m)?;
    let mut base = reduce_wide(a.0 as u128, m, dm);
    let mut acc = reduce_wide(1, m, dm);
    while e > 0 {
        if e & 1 == 1 {
            acc = reduce_wide(clmul(acc.0, base.0), m, dm);
        }
        base = reduce_wide(clmul(base.0, base.0), m, dm);
        e >>= 1;
    }
    Ok(acc)
}

/// `X^(2^j) mod m` by `j` squarings.
fn frobenius_power_of_x(j: u32, m: PolyF2, dm: u32) -> PolyF2 {
    let mut v = reduce_wide(2, m, dm);
    for _ in 0..j {
        v = reduce_wide(clmul(v.0, v.0), m, dm);
    }
    v
}

/// Rabin's test: `p` of degree `d` is irreducible iff `X^(2^d) ≡ X (mod p)`
/// and `gcd(X^(2^(d/q)) - X, p) = 1` for every prime `q | d`.
pub fn is_irreducible(p: PolyF2) -> Result<bool> {
    let d = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => {
            return Err(Error::InvalidInput(format!(
                "irreducibility is undefined for the constant polynomial {p}"
            )))
        }
    };
    if d == 1 {
        return Ok(true);
    }
    let x = reduce_wide(2, p, d);
    if frobenius_power_of_x(d, p, d) != x {
        return Ok(false);
    }
    for (q, _) in factor_u64(d as u64) {
        let h = frobenius_power_of_x(d / q as u32, p, d) + x;
        if h.gcd(p).degree() != Some(0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Factors `p` into irreducibles with multiplicity, smallest factors first.
pub fn factor(p: PolyF2) -> Result<Vec<(PolyF2, u32)>> {
    if p.degree().is_none_or(|d| d == 0) {
        return Err(Error::InvalidInput(format!("cannot factor constant {p}")));
    }
    let mut rest = p;
    let mut out: Vec<(PolyF2, u32)> = Vec::new();
    let mut cand = 2u64;
    while let Some(dr) = rest.degree() {
        if dr == 0 {
            break;
        }
        let c = PolyF2(cand);
        let dc = c.degree().expect("candidate is nonzero");
        if 2 * dc > dr {
            out.push((rest, 1));
            break;
        }
        let mut mult = 0;
        loop {
            let (q, r) = rest.div_rem(c)?;
            if !r.is_zero() {
                break;
            }
            rest = q;
            mult += 1;
        }
        if mult > 0 {
            out.push((c, mult));
        }
        cand += 1;
    }
    // Merge a trailing factor equal to one already found.
    out.sort();
    let mut merged: Vec<(PolyF2, u32)> = Vec::new();
    for (f, e) in out {
        match merged.last_mut() {
            Some((g, m)) if *g == f => *m += e,
            _ => merged.push((f, e)),
        }
    }
    Ok(merged)
}

/// Least `e >= 1` with `a^e ≡ 1 (mod m)`.
///
/// Works from the exponent of the unit group of `𝔽₂[X]/(m)`, obtained from
/// the factorization `m = ∏ f^e` as `∏ 2^(deg f·(e-1))·(2^deg f - 1)`, and
/// strips prime factors while the power stays trivial.
pub fn multiplicative_order(a: PolyF2, m: PolyF2) -> Result<u64> {
    let dm = check_modulus(m)?;
    let a = reduce_wide(a.0 as u128, m, dm);
    if a.gcd(m).degree() != Some(0) {
        return Err(Error::NonUnit {
            modulus: m.to_string(),
        });
    }
    let mut group_order: u64 = 1;
    let mut primes: Vec<u64> = Vec::new();
    for (f, e) in factor(m)? {
        let df = f.degree().expect("factor is nonconstant");
        if df > ORDER_FACTOR_DEGREE_BOUND {
            return Err(Error::OutOfRange {
                what: "irreducible factor degree",
                value: df.to_string(),
                bound: format!("<= {ORDER_FACTOR_DEGREE_BOUND}"),
            });
        }
        let cyc = (1u64 << df) - 1;
        group_order *= cyc << (df * (e - 1));
        primes.extend(factor_u64(cyc).into_iter().map(|(q, _)| q));
        if e > 1 {
            primes.push(2);
        }
    }
    primes.sort_unstable();
    primes.dedup();
    let mut ord = group_order;
    for q in primes {
        while ord.is_multiple_of(q) && poly_pow_mod(a, ord / q, m)? == PolyF2::ONE {
            ord /= q;
        }
    }
    Ok(ord)
}

/// The least (as a bit pattern) irreducible polynomial of degree `d` in which
/// `X` has multiplicative order `2^d - 1`.
pub fn find_primitive_poly(d: u32) -> Result<PolyF2> {
    if d == 0 || d > PRIMITIVE_DEGREE_BOUND {
        return Err(Error::OutOfRange {
            what: "primitive polynomial degree",
            value: d.to_string(),
            bound: format!("1..={PRIMITIVE_DEGREE_BOUND}"),
        });
    }
    let full = (1u64 << d) - 1;
    let cofactors: Vec<u64> = factor_u64(full).into_iter().map(|(q, _)| full / q).collect();
    for bits in (1u64 << d)..(1u64 << (d + 1)) {
        let p = PolyF2(bits);
        if bits & 1 == 0 || !is_irreducible(p)? {
            continue;
        }
        let mut primitive = true;
        for &c in &cofactors {
            if poly_pow_mod(PolyF2::X, c, p)? == PolyF2::ONE {
                primitive = false;
                break;
            }
        }
        if primitive {
            return Ok(p);
        }
    }
    unreachable!("a primitive polynomial exists in every degree")
}

/// The ring `𝔽₂[X]/(modulus)`; elements are residues of degree below the
/// modulus degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuotientRingF2 {
    modulus: PolyF2,
    #[serde(skip)]
    degree: u32,
}

impl QuotientRingF2 {
    pub fn new(modulus: PolyF2) -> Result<Self> {
        let degree = check_modulus(modulus)?;
        Ok(QuotientRingF2 { modulus, degree })
    }

    pub fn modulus(&self) -> PolyF2 {
        self.modulus
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Number of elements, `2^deg(modulus)`.
    pub fn size(&self) -> u64 {
        1u64 << self.degree
    }

    pub fn is_reduced(&self, a: PolyF2) -> bool {
        a.degree().is_none_or(|d| d < self.degree)
    }

    pub fn reduce(&self, a: PolyF2) -> PolyF2 {
        reduce_wide(a.0 as u128, self.modulus, self.degree)
    }

    pub fn mul(&self, a: PolyF2, b: PolyF2) -> PolyF2 {
        reduce_wide(clmul(a.0, b.0), self.modulus, self.degree)
    }

    /// `a·X^e` for reduced `a`, with `e` taken modulo the order of `X`
    /// by the caller. Runs in `e` shift-and-reduce steps.
    pub fn mul_by_x_pow(&self, a: PolyF2, e: u64) -> PolyF2 {
        let top = 1u64 << self.degree;
        let mut v = a.0;
        for _ in 0..e {
            v <<= 1;
            if v & top != 0 {
                v ^= self.modulus.0;
            }
        }
        PolyF2(v)
    }

    pub fn pow(&self, a: PolyF2, e: u64) -> PolyF2 {
        poly_pow_mod(a, e, self.modulus).expect("modulus validated at construction")
    }

    pub fn is_unit(&self, a: PolyF2) -> bool {
        self.reduce(a).gcd(self.modulus).degree() == Some(0)
    }

    pub fn order(&self, a: PolyF2) -> Result<u64> {
        multiplicative_order(a, self.modulus)
    }

    /// Inverse of a unit via the extended Euclidean algorithm.
    pub fn inverse(&self, a: PolyF2) -> Result<PolyF2> {
        let (mut r0, mut r1) = (self.modulus, self.reduce(a));
        let (mut t0, mut t1) = (PolyF2::ZERO, PolyF2::ONE);
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(r1)?;
            let t = t0 + self.mul(q, t1);
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = t;
        }
        if r0 != PolyF2::ONE {
            return Err(Error::NonUnit {
                modulus: self.modulus.to_string(),
            });
        }
        Ok(self.reduce(t0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(bits: u64) -> PolyF2 {
        PolyF2::from_bits(bits)
    }

    // Schoolbook product followed by long division; shares no code with
    // the carry-less multiply above.
    fn schoolbook_mul_mod(a: u64, b: u64, m: u64) -> u64 {
        let mut coeffs = [0u8; 128];
        for i in 0..64 {
            for j in 0..64 {
                if (a >> i) & 1 == 1 && (b >> j) & 1 == 1 {
                    coeffs[i + j] ^= 1;
                }
            }
        }
        let dm = 63 - m.leading_zeros() as usize;
        for i in (dm..128).rev() {
            if coeffs[i] == 1 {
                for j in 0..=dm {
                    if (m >> j) & 1 == 1 {
                        coeffs[i - dm + j] ^= 1;
                    }
                }
            }
        }
        (0..dm).fold(0, |acc, i| acc | ((coeffs[i] as u64) << i))
    }

    fn trial_division_irreducible(bits: u64) -> bool {
        let d = 63 - bits.leading_zeros();
        (2u64..(1 << (d / 2 + 1))).all(|c| {
            let dc = 63 - c.leading_zeros();
            dc == 0 || dc > d / 2 || !p(bits).div_rem(p(c)).unwrap().1.is_zero()
        })
    }

    fn repeated_mul_order(a: u64, m: u64) -> u64 {
        let mut v = schoolbook_mul_mod(a, 1, m);
        let mut e = 1;
        while v != 1 {
            v = schoolbook_mul_mod(v, a, m);
            e += 1;
        }
        e
    }

    #[test]
    fn addition_examples() {
        assert_eq!(p(0b11) + p(0b11), PolyF2::ZERO);
        assert_eq!(p(0b100) + p(0b111), p(0b11));
        assert_eq!(PolyF2::ZERO + p(0b1011), p(0b1011));
    }

    #[test]
    fn mul_mod_examples() {
        assert_eq!(schoolbook_mul_mod(0b11, 0b11, 0b111), 0b10);
        assert_eq!(poly_mul_mod(p(0b11), p(0b11), p(0b111)).unwrap(), PolyF2::X);
        assert_eq!(schoolbook_mul_mod(0b10, 0b100, 0b1011), 0b11);
        assert_eq!(poly_mul_mod(p(0b10), p(0b100), p(0b1011)).unwrap(), p(0b11));
        assert_eq!(
            poly_mul_mod(p(0b110101), PolyF2::ONE, p(0b1011)).unwrap(),
            p(0b110101).rem(p(0b1011)).unwrap()
        );
    }

    #[test]
    fn mul_mod_rejects_constant_modulus() {
        assert!(matches!(
            poly_mul_mod(p(3), p(3), PolyF2::ONE),
            Err(Error::InvalidModulus(_))
        ));
        assert!(matches!(
            poly_mul_mod(p(3), p(3), PolyF2::ZERO),
            Err(Error::InvalidModulus(_))
        ));
    }

    #[test]
    fn mul_mod_matches_schoolbook_on_small_inputs() {
        for m in 2u64..64 {
            for a in 0u64..64 {
                for b in 0u64..16 {
                    assert_eq!(
                        poly_mul_mod(p(a), p(b), p(m)).unwrap().bits(),
                        schoolbook_mul_mod(a, b, m)
                    );
                }
            }
        }
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(p(0b111)).unwrap());
        assert!(!is_irreducible(p(0b101)).unwrap());
        assert!(is_irreducible(p(0b1011)).unwrap());
        assert!(matches!(is_irreducible(PolyF2::ONE), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn irreducibility_agrees_with_trial_division_up_to_degree_8() {
        for bits in 2u64..(1 << 9) {
            assert_eq!(
                is_irreducible(p(bits)).unwrap(),
                trial_division_irreducible(bits),
                "{}",
                p(bits)
            );
        }
    }

    #[test]
    fn order_examples() {
        assert_eq!(repeated_mul_order(0b10, 0b111), 3);
        assert_eq!(multiplicative_order(PolyF2::X, p(0b111)).unwrap(), 3);
        assert_eq!(repeated_mul_order(0b10, 0b1011), 7);
        assert_eq!(multiplicative_order(PolyF2::X, p(0b1011)).unwrap(), 7);
        assert_eq!(multiplicative_order(PolyF2::ONE, p(0b1011)).unwrap(), 1);
    }

    #[test]
    fn order_rejects_non_units() {
        // X+1 divides X²+1.
        assert!(matches!(
            multiplicative_order(p(0b11), p(0b101)),
            Err(Error::NonUnit { .. })
        ));
    }

    #[test]
    fn order_matches_repeated_multiplication_for_composite_moduli() {
        for m in 2u64..(1 << 8) {
            for a in 1u64..(1 << 7) {
                if p(a).gcd(p(m)).degree() != Some(0) {
                    continue;
                }
                assert_eq!(
                    multiplicative_order(p(a), p(m)).unwrap(),
                    repeated_mul_order(a, m),
                    "a={} m={}",
                    p(a),
                    p(m)
                );
            }
        }
    }

    fn exhaustive_primitive(d: u32) -> u64 {
        ((1u64 << d)..(1u64 << (d + 1)))
            .find(|&b| {
                b & 1 == 1
                    && trial_division_irreducible(b)
                    && repeated_mul_order(2 % b, b) == (1 << d) - 1
            })
            .unwrap()
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(exhaustive_primitive(2), 0b111);
        assert_eq!(exhaustive_primitive(3), 0b1011);
        assert_eq!(exhaustive_primitive(5), 0b100101);
        assert_eq!(find_primitive_poly(2).unwrap(), p(0b111));
        assert_eq!(find_primitive_poly(3).unwrap(), p(0b1011));
        assert_eq!(find_primitive_poly(5).unwrap(), p(0b100101));
        for d in 1..=10 {
            assert_eq!(find_primitive_poly(d).unwrap().bits(), exhaustive_primitive(d));
        }
    }

    #[test]
    fn primitive_degree_bound() {
        assert!(find_primitive_poly(20).is_ok());
        assert!(matches!(find_primitive_poly(21), Err(Error::OutOfRange { .. })));
        assert!(matches!(find_primitive_poly(0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn hex_encoding() {
        assert_eq!(p(0b111).to_hex(), "07");
        assert_eq!(p(0x101).to_hex(), "0101");
        assert_eq!(PolyF2::ZERO.to_hex(), "00");
        assert_eq!(PolyF2::from_hex("0101").unwrap(), p(0x101));
        assert_eq!(serde_json::to_string(&p(7)).unwrap(), "\"07\"");
        assert!(PolyF2::from_hex("7").is_err());
    }

    #[test]
    fn quotient_ring_inverse() {
        let r = QuotientRingF2::new(p(0b1011)).unwrap();
        assert_eq!(r.size(), 8);
        for a in 1..8 {
            let inv = r.inverse(p(a)).unwrap();
            assert_eq!(r.mul(p(a), inv), PolyF2::ONE);
        }
        let r = QuotientRingF2::new(p(0b101)).unwrap();
        assert!(r.inverse(p(0b11)).is_err());
        assert!(!r.is_unit(p(0b11)));
    }

    #[test]
    fn shift_multiplication_matches_mul() {
        let r = QuotientRingF2::new(p(0b100101 * 0b111)).unwrap();
        for a in 0..64 {
            for e in 0..20 {
                assert_eq!(
                    r.mul_by_x_pow(p(a), e),
                    r.mul(p(a), r.pow(PolyF2::X, e))
                );
            }
        }
    }

    #[test]
    fn factorization_round_trip() {
        let m = p(0b111).checked_mul(p(0b1011)).unwrap().checked_mul(p(0b111)).unwrap();
        assert_eq!(factor(m).unwrap(), vec![(p(0b111), 2), (p(0b1011), 1)]);
    }
}
