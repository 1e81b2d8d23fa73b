use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{lamplighter_modulus, Multiplication};
use crate::arith;
use crate::error::{Error, Result};
use crate::f2poly::{PolyF2, QuotientRingF2};

/// The infinite groups whose quotients form the filtrations: `ℤ`, the SOL
/// lattice `ℤ²⋊_A ℤ`, and the lamplighter group `𝔽₂[X,X⁻¹]⋊ℤ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parent {
    Integers,
    Sol,
    Lamplighter,
}

/// A finitely supported 𝔽₂ Laurent polynomial, stored as its support.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentF2(BTreeSet<i64>);

impl LaurentF2 {
    pub fn zero() -> Self {
        LaurentF2(BTreeSet::new())
    }

    pub fn from_exponents(exps: impl IntoIterator<Item = i64>) -> Self {
        let mut out = LaurentF2::zero();
        for e in exps {
            out.toggle(e);
        }
        out
    }

    /// Embeds an ordinary polynomial.
    pub fn from_poly(p: PolyF2) -> Self {
        LaurentF2::from_exponents((0..64).filter(|&i| p.coeff(i)).map(i64::from))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.0.iter().copied()
    }

    fn toggle(&mut self, e: i64) {
        if !self.0.remove(&e) {
            self.0.insert(e);
        }
    }

    pub fn add(&self, other: &LaurentF2) -> LaurentF2 {
        LaurentF2(self.0.symmetric_difference(&other.0).copied().collect())
    }

    /// Multiplication by `X^j`.
    pub fn shift(&self, j: i64) -> LaurentF2 {
        LaurentF2(self.0.iter().map(|e| e + j).collect())
    }

    /// Whether `self` lies in the ideal generated by `m` in `𝔽₂[X,X⁻¹]`.
    /// Since `X` is a unit this reduces to the polynomial `X^{-min}·self`.
    pub fn divisible_by(&self, ring: &QuotientRingF2) -> bool {
        let Some(&low) = self.0.first() else {
            return true;
        };
        let mut acc = PolyF2::ZERO;
        for &e in &self.0 {
            acc = acc + ring.mul_by_x_pow(PolyF2::ONE, (e - low) as u64);
        }
        acc.is_zero()
    }
}

impl fmt::Display for LaurentF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self.0.iter().rev().map(|e| format!("X^{e}")).collect();
        write!(f, "{}", terms.join("+"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ParentElement {
    Int(i64),
    /// `(v, n)` with `v ∈ ℤ²`, acting matrix `A^n`.
    Sol { v: [i128; 2], n: i64 },
    /// The matrix `[[X^n, p], [0, 1]]`.
    Lamp { p: LaurentF2, n: i64 },
}

/// `A^n = [[F_{n+1}, F_n], [F_n, F_{n-1}]]` for any integer `n`.
fn sol_power(n: i64) -> [i128; 4] {
    let fib = |k: i64| -> i128 {
        let a = k.unsigned_abs();
        let f = arith::fib(a).to_i128().expect("Fibonacci index within i128 range");
        if k < 0 && a.is_multiple_of(2) {
            -f
        } else {
            f
        }
    };
    [fib(n + 1), fib(n), fib(n), fib(n - 1)]
}

impl Multiplication for Parent {
    type Elem = ParentElement;

    fn identity(&self) -> ParentElement {
        match self {
            Parent::Integers => ParentElement::Int(0),
            Parent::Sol => ParentElement::Sol { v: [0, 0], n: 0 },
            Parent::Lamplighter => ParentElement::Lamp { p: LaurentF2::zero(), n: 0 },
        }
    }

    /// Same order as the quotient generating lists, so generator `i` of a
    /// quotient is the image of parent generator `i`.
    fn generator_list(&self) -> Vec<ParentElement> {
        match self {
            Parent::Integers => vec![ParentElement::Int(1), ParentElement::Int(-1)],
            Parent::Sol => {
                let t = |x: i128, y: i128| ParentElement::Sol { v: [x, y], n: 0 };
                vec![
                    t(1, 0),
                    t(-1, 0),
                    t(0, 1),
                    t(0, -1),
                    ParentElement::Sol { v: [0, 0], n: 1 },
                    ParentElement::Sol { v: [0, 0], n: -1 },
                ]
            }
            Parent::Lamplighter => vec![
                ParentElement::Lamp { p: LaurentF2::zero(), n: 1 },
                ParentElement::Lamp { p: LaurentF2::zero(), n: -1 },
                ParentElement::Lamp { p: LaurentF2::from_exponents([0]), n: 0 },
            ],
        }
    }

    fn mul(&self, a: &ParentElement, b: &ParentElement) -> ParentElement {
        match (a, b) {
            (ParentElement::Int(x), ParentElement::Int(y)) => {
                ParentElement::Int(x.checked_add(*y).expect("integer overflow in ℤ"))
            }
            (ParentElement::Sol { v, n }, ParentElement::Sol { v: w, n: m }) => {
                let a = sol_power(*n);
                let x = v[0] + a[0] * w[0] + a[1] * w[1];
                let y = v[1] + a[2] * w[0] + a[3] * w[1];
                ParentElement::Sol { v: [x, y], n: n + m }
            }
            (ParentElement::Lamp { p, n }, ParentElement::Lamp { p: q, n: m }) => {
                ParentElement::Lamp { p: p.add(&q.shift(*n)), n: n + m }
            }
            _ => panic!("parent elements from different groups"),
        }
    }
}

/// A filtration of one of the infinite parents, indexed by `k ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParentSchedule {
    /// `N_k(s)ℤ` with `N_k(s) = 2^⌊ks⌋`.
    Integers { s: BigRational },
    /// `Γ(base^k)`.
    Sol { base: u64 },
    /// Kernels of reduction modulo `P_1⋯P_k`.
    Lamplighter,
}

impl ParentSchedule {
    pub fn parent(&self) -> Parent {
        match self {
            ParentSchedule::Integers { .. } => Parent::Integers,
            ParentSchedule::Sol { .. } => Parent::Sol,
            ParentSchedule::Lamplighter => Parent::Lamplighter,
        }
    }
}

/// Whether `g` lies in the `k`-th subgroup of the schedule.
pub fn parent_membership(schedule: &ParentSchedule, g: &ParentElement, k: usize) -> Result<bool> {
    if k == 0 {
        return Err(Error::OutOfRange {
            what: "filtration index",
            value: "0".into(),
            bound: ">= 1".into(),
        });
    }
    match (schedule, g) {
        (ParentSchedule::Integers { s }, ParentElement::Int(x)) => {
            let m = arith::nks(s, k as u64)?;
            Ok((BigUint::from(x.unsigned_abs()) % m) == BigUint::from(0u32))
        }
        (ParentSchedule::Sol { base }, ParentElement::Sol { v, n }) => {
            let modulus = base
                .checked_pow(k as u32)
                .ok_or_else(|| Error::InvalidInput("SOL modulus overflows u64".into()))?;
            let delta = arith::pisano(modulus)? as i64;
            let m = modulus as i128;
            Ok(v[0] % m == 0 && v[1] % m == 0 && n % delta == 0)
        }
        (ParentSchedule::Lamplighter, ParentElement::Lamp { p, n }) => {
            let ring = QuotientRingF2::new(lamplighter_modulus(k)?)?;
            let ell = arith::ell(k)?.to_i64().expect("ℓ_k fits in i64");
            Ok(n % ell == 0 && p.divisible_by(&ring))
        }
        _ => Err(Error::InvalidInput("element does not belong to the scheduled parent".into())),
    }
}
