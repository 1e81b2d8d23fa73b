//! Number-theoretic kernel: Fibonacci and Lucas numbers, Pisano periods,
//! ranks of apparition, `|SL_m(ℤ/Nℤ)|`, divisor sums and the `2^⌊ks⌋`
//! schedules.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Trial-division factorization, primes in increasing order.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factor_u64(n) == [(n, 1)]
}

/// The `i`-th prime, 1-indexed: `nth_prime(1) == 2`.
pub fn nth_prime(i: usize) -> u64 {
    assert!(i >= 1, "primes are 1-indexed");
    (2u64..).filter(|&n| is_prime(n)).nth(i - 1).expect("infinitely many primes")
}

/// `(F_n, F_{n+1})` by fast doubling.
fn fib_pair(n: u64) -> (BigUint, BigUint) {
    if n == 0 {
        return (BigUint::zero(), BigUint::one());
    }
    let (a, b) = fib_pair(n / 2);
    // F_2k = F_k (2F_{k+1} - F_k), F_2k+1 = F_k^2 + F_{k+1}^2
    let c = &a * (&b + &b - &a);
    let d = &a * &a + &b * &b;
    if n.is_multiple_of(2) {
        (c, d)
    } else {
        let e = &c + &d;
        (d, e)
    }
}

pub fn fib(n: u64) -> BigInt {
    BigInt::from(fib_pair(n).0)
}

/// Lucas numbers, `L_0 = 2`, `L_1 = 1`, via `L_n = F_{n-1} + F_{n+1}`.
pub fn lucas(n: u64) -> BigInt {
    if n == 0 {
        return BigInt::from(2);
    }
    let (f, f_next) = fib_pair(n);
    let f_prev = &f_next - &f;
    BigInt::from(f_prev + f_next)
}

fn require_modulus(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "modulus",
            value: n.to_string(),
            bound: ">= 2".into(),
        });
    }
    Ok(())
}

/// Order of `[[1,1],[1,0]]` in `GL_2(ℤ/Nℤ)`, found by walking the
/// Fibonacci pair modulo `N` until it returns to `(0, 1)`.
pub fn pisano(n: u64) -> Result<u64> {
    require_modulus(n)?;
    let (mut a, mut b) = (0u64, 1u64);
    let mut e = 0u64;
    loop {
        let next = (a + b) % n;
        a = b;
        b = next;
        e += 1;
        if a == 0 && b == 1 {
            return Ok(e);
        }
    }
}

/// Least `e >= 1` with `N | F_e`.
pub fn rank_of_apparition(n: u64) -> Result<u64> {
    require_modulus(n)?;
    let (mut a, mut b) = (1u64 % n, 1u64 % n);
    let mut e = 1u64;
    while a != 0 {
        let next = (a + b) % n;
        a = b;
        b = next;
        e += 1;
    }
    Ok(e)
}

/// `|SL_m(ℤ/Nℤ)|`: for each prime power `p^k || N` contribute
/// `p^(k(m²-1)) ∏_{i=2}^{m} (1 - p^(-i))`, and multiply over primes.
pub fn sl_order(m: u32, n: u64) -> Result<BigUint> {
    require_modulus(n)?;
    let mut total = BigUint::one();
    for (p, k) in factor_u64(n) {
        total *= sl_order_prime_power(m, p, k)?;
    }
    Ok(total)
}

/// `|SL_m(ℤ/N)|` by enumerating all `N^{m²}` matrices.
pub fn sl_order_by_enumeration(m: u32, n: u64) -> Result<u64> {
    require_modulus(n)?;
    let cells = (m * m) as usize;
    let total = n.checked_pow(m * m).filter(|&t| t <= 1 << 26).ok_or_else(|| Error::Budget {
        what: format!("enumeration of {m}x{m} matrices mod {n}"),
        needed: u64::MAX,
        limit: 1 << 26,
    })?;
    if !(2..=3).contains(&m) {
        return Err(Error::OutOfRange { what: "matrix size", value: m.to_string(), bound: "2..=3".into() });
    }
    let mut count = 0u64;
    let mut a = vec![0u64; cells];
    for mut code in 0..total {
        for x in a.iter_mut() {
            *x = code % n;
            code /= n;
        }
        let det = if m == 2 {
            (a[0] * a[3] + n * n - a[1] * a[2]) % n
        } else {
            let t = a[0] * (a[4] * a[8] + n * n - a[5] * a[7]) % n
                + a[1] * (a[5] * a[6] + n * n - a[3] * a[8]) % n
                + a[2] * (a[3] * a[7] + n * n - a[4] * a[6]) % n;
            t % n
        };
        if det == 1 % n {
            count += 1;
        }
    }
    Ok(count)
}

/// `|SL_m(ℤ/p^k)|` for a prime `p`, without forming `p^k` as a machine word.
pub fn sl_order_prime_power(m: u32, p: u64, k: u32) -> Result<BigUint> {
    if m < 2 {
        return Err(Error::OutOfRange {
            what: "matrix size",
            value: m.to_string(),
            bound: ">= 2".into(),
        });
    }
    if !is_prime(p) || k == 0 {
        return Err(Error::InvalidModulus(format!("{p}^{k} is not a prime power")));
    }
    let p = BigUint::from(p);
    // p^(k(m²-1)) ∏ (1 - p^-i) = p^((k-1)(m²-1)) · p^(m²-1-(2+…+m)) · ∏ (p^i - 1)
    let dim = m * m - 1;
    let tri = (2..=m).sum::<u32>();
    let mut local = p.pow((k - 1) * dim + (dim - tri));
    for i in 2..=m {
        local *= p.pow(i) - BigUint::one();
    }
    Ok(local)
}

/// `σ(n)`, the sum of the divisors of `n`.
pub fn sigma_divisors(n: u64) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "divisor-sum argument",
            value: "0".into(),
            bound: ">= 1".into(),
        });
    }
    let mut total = BigUint::one();
    for (p, e) in factor_u64(n) {
        let p = BigUint::from(p);
        total *= (p.pow(e + 1) - BigUint::one()) / (&p - BigUint::one());
    }
    Ok(total)
}

/// `ℓ_k = ∏_{i≤k} (2^{p_i} - 1)` with `p_i` the `i`-th prime.
pub fn ell(k: usize) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::OutOfRange {
            what: "lamplighter level",
            value: "0".into(),
            bound: ">= 1".into(),
        });
    }
    Ok((1..=k)
        .map(|i| (BigUint::one() << nth_prime(i)) - BigUint::one())
        .product())
}

/// `⌊k·s⌋` for an exact rational `s >= 1`.
pub fn floor_ks(s: &BigRational, k: u64) -> Result<u64> {
    if *s < BigRational::one() {
        return Err(Error::OutOfRange {
            what: "schedule slope s",
            value: s.to_string(),
            bound: ">= 1".into(),
        });
    }
    let ks = s * BigRational::from_integer(BigInt::from(k));
    ks.floor()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::InvalidInput(format!("⌊{k}·{s}⌋ does not fit in u64")))
}

/// `N_k(s) = 2^⌊ks⌋`.
pub fn nks(s: &BigRational, k: u64) -> Result<BigUint> {
    Ok(BigUint::one() << floor_ks(s, k)?)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Largest `t >= 1` with `L_t <= n`; the Lucas lower bound is `pisano(n) >= 2t`.
pub fn lucas_index_below(n: u64) -> u64 {
    let bound = BigInt::from(n);
    let mut t = 1;
    while lucas(t + 1) <= bound {
        t += 1;
    }
    t
}
