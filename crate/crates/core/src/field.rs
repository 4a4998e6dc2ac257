//! Prime field arithmetic.
//!
//! A [`PrimeField`] is a verified prime modulus `3 <= p < 2^62`; elements are
//! canonical residues in `[0, p)`. The bound keeps every product of two
//! residues inside a `u128`, and for `p < 2^32` inside a `u64`.
//!
//! Everything here is deterministic: primality uses a strong-pseudoprime
//! witness set that is complete far beyond 64 bits, and multiplicative
//! orders are computed from a trial-division factorization of `p - 1`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Exclusive upper bound on supported moduli.
pub const MODULUS_BOUND: u64 = 1 << 62;

const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        (a * b) % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test for `2 <= m < 2^62`.
pub fn is_prime(m: u64) -> Result<bool> {
    if m < 2 {
        return Err(Error::Parameter(format!("is_prime: {m} is below 2")));
    }
    if m >= MODULUS_BOUND {
        return Err(Error::Parameter(format!("is_prime: {m} is not below 2^62")));
    }
    Ok(is_prime_unchecked(m))
}

fn is_prime_unchecked(m: u64) -> bool {
    for &w in &MR_WITNESSES {
        if m == w {
            return true;
        }
        if m % w == 0 {
            return false;
        }
    }
    let mut d = m - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, m);
            if x == m - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime in `[lo, hi]`.
pub fn find_prime_in_range(lo: u64, hi: u64) -> Result<u64> {
    if lo < 2 || lo > hi {
        return Err(Error::Parameter(format!(
            "find_prime_in_range: need 2 <= lo <= hi, got [{lo}, {hi}]"
        )));
    }
    let hi = hi.min(MODULUS_BOUND - 1);
    (lo..=hi)
        .find(|&m| is_prime_unchecked(m))
        .ok_or_else(|| Error::NotFound(format!("no prime in [{lo}, {hi}]")))
}

/// Smallest prime `>= lo`.
pub fn next_prime(lo: u64) -> Result<u64> {
    let lo = lo.max(2);
    find_prime_in_range(lo, lo.saturating_mul(2))
}

/// Prime factors of `m` (without multiplicity), by trial division.
pub fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= m {
        if m % f == 0 {
            out.push(f);
            while m % f == 0 {
                m /= f;
            }
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// The prime field `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 {
            return Err(Error::Parameter(format!("field modulus must be at least 3, got {p}")));
        }
        if !is_prime(p)? {
            return Err(Error::Parameter(format!("field modulus {p} is not prime")));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// The residue of `v` modulo `p`.
    #[inline]
    pub fn elem(&self, v: u64) -> FpElem {
        FpElem { value: v % self.p, p: self.p }
    }

    pub fn from_i64(&self, v: i64) -> FpElem {
        self.elem(v.rem_euclid(self.p as i64) as u64)
    }

    #[inline]
    pub fn zero(&self) -> FpElem {
        FpElem { value: 0, p: self.p }
    }

    #[inline]
    pub fn one(&self) -> FpElem {
        FpElem { value: 1, p: self.p }
    }

    // Raw residue helpers for the linear-algebra inner loops.

    #[inline]
    pub(crate) fn add_raw(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub_raw(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.p)
    }

    pub(crate) fn inv_raw(&self, a: u64) -> Option<u64> {
        inv_mod(a, self.p)
    }
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    // Extended Euclid on signed 128-bit values.
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

/// A canonical residue modulo the prime of its field.
///
/// Mixing elements of different fields in an arithmetic operator panics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpElem {
    value: u64,
    p: u64,
}

impl FpElem {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    #[inline]
    pub fn is_one(&self) -> bool {
        self.value == 1
    }

    pub fn pow(&self, exp: u64) -> FpElem {
        FpElem { value: pow_mod(self.value, exp, self.p), p: self.p }
    }

    /// Multiplicative inverse via extended Euclid.
    pub fn inverse(&self) -> Result<FpElem> {
        inv_mod(self.value, self.p)
            .map(|value| FpElem { value, p: self.p })
            .ok_or_else(|| Error::Domain("inverse of zero".into()))
    }

    #[inline]
    fn check(&self, other: &FpElem) {
        assert_eq!(
            self.p, other.p,
            "arithmetic between elements of F_{} and F_{}",
            self.p, other.p
        );
    }
}

impl fmt::Display for FpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FpElem {
    type Output = FpElem;
    #[inline]
    fn add(self, rhs: FpElem) -> FpElem {
        self.check(&rhs);
        FpElem { value: self.field().add_raw(self.value, rhs.value), p: self.p }
    }
}

impl Sub for FpElem {
    type Output = FpElem;
    #[inline]
    fn sub(self, rhs: FpElem) -> FpElem {
        self.check(&rhs);
        FpElem { value: self.field().sub_raw(self.value, rhs.value), p: self.p }
    }
}

impl Mul for FpElem {
    type Output = FpElem;
    #[inline]
    fn mul(self, rhs: FpElem) -> FpElem {
        self.check(&rhs);
        FpElem { value: mul_mod(self.value, rhs.value, self.p), p: self.p }
    }
}

impl Div for FpElem {
    type Output = FpElem;
    /// Panics on division by zero.
    fn div(self, rhs: FpElem) -> FpElem {
        self.check(&rhs);
        self * rhs.inverse().expect("division by zero in F_p")
    }
}

impl Neg for FpElem {
    type Output = FpElem;
    #[inline]
    fn neg(self) -> FpElem {
        if self.value == 0 {
            self
        } else {
            FpElem { value: self.p - self.value, p: self.p }
        }
    }
}

impl AddAssign for FpElem {
    fn add_assign(&mut self, rhs: FpElem) {
        *self = *self + rhs;
    }
}

impl SubAssign for FpElem {
    fn sub_assign(&mut self, rhs: FpElem) {
        *self = *self - rhs;
    }
}

impl MulAssign for FpElem {
    fn mul_assign(&mut self, rhs: FpElem) {
        *self = *self * rhs;
    }
}

/// Least `m >= 1` with `a^m = 1`.
pub fn element_order(a: FpElem) -> Result<u64> {
    if a.is_zero() {
        return Err(Error::Domain("element_order of zero".into()));
    }
    let group = a.p - 1;
    Ok(order_with_factors(a, group, &prime_factors(group)))
}

fn order_with_factors(a: FpElem, group: u64, factors: &[u64]) -> u64 {
    let mut m = group;
    for &f in factors {
        while m % f == 0 && a.pow(m / f).is_one() {
            m /= f;
        }
    }
    m
}

/// Smallest residue `a >= 2` whose multiplicative order exceeds `min_order`.
pub fn find_high_order_element(field: PrimeField, min_order: u64) -> Result<FpElem> {
    let group = field.p - 1;
    if min_order >= group {
        return Err(Error::UnsupportedField {
            reason: format!(
                "need an element of order > {min_order}, but |F_{}^*| = {group}",
                field.p
            ),
            min_p: next_prime(min_order.saturating_add(2)).unwrap_or(0),
        });
    }
    let factors = prime_factors(group);
    (2..field.p)
        .map(|v| field.elem(v))
        .find(|&a| order_with_factors(a, group, &factors) > min_order)
        // A generator always exists, so the scan cannot come up empty.
        .ok_or_else(|| Error::InternalInvariant("no generator found".into()))
}
