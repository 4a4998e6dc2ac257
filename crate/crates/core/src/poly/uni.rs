use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{FpElem, PrimeField};

/// Dense univariate polynomial over `F_p`; `coeffs[i]` multiplies `x^i`.
///
/// Trailing zeros are never stored, so the zero polynomial has no
/// coefficients and `degree()` returns `None` for it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly {
    field: PrimeField,
    coeffs: Vec<u64>,
}

impl UniPoly {
    pub fn zero(field: PrimeField) -> Self {
        UniPoly { field, coeffs: Vec::new() }
    }

    pub fn one(field: PrimeField) -> Self {
        Self::constant(field.one())
    }

    pub fn constant(c: FpElem) -> Self {
        Self::from_raw(c.field(), vec![c.value()])
    }

    /// The polynomial `x`.
    pub fn x(field: PrimeField) -> Self {
        Self::from_raw(field, vec![0, 1])
    }

    /// `c * x^deg`.
    pub fn monomial(c: FpElem, deg: usize) -> Self {
        let mut coeffs = vec![0; deg + 1];
        coeffs[deg] = c.value();
        Self::from_raw(c.field(), coeffs)
    }

    pub fn new(field: PrimeField, coeffs: Vec<FpElem>) -> Self {
        let raw = coeffs
            .into_iter()
            .map(|c| {
                assert_eq!(c.field(), field, "coefficient from a different field");
                c.value()
            })
            .collect();
        Self::from_raw(field, raw)
    }

    /// Coefficients given as integers, reduced mod `p`; lowest degree first.
    pub fn from_u64s(field: PrimeField, coeffs: &[u64]) -> Self {
        Self::from_raw(field, coeffs.iter().map(|&c| c % field.modulus()).collect())
    }

    pub fn from_i64s(field: PrimeField, coeffs: &[i64]) -> Self {
        Self::from_raw(field, coeffs.iter().map(|&c| field.from_i64(c).value()).collect())
    }

    /// Monic linear polynomial `x + c`.
    pub fn linear(field: PrimeField, c: u64) -> Self {
        Self::from_u64s(field, &[c, 1])
    }

    pub(crate) fn from_raw(field: PrimeField, mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        UniPoly { field, coeffs }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub(crate) fn raw(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeffs(&self) -> Vec<FpElem> {
        self.coeffs.iter().map(|&c| self.field.elem(c)).collect()
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> FpElem {
        self.field.elem(self.coeffs.get(i).copied().unwrap_or(0))
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn leading_coeff(&self) -> Option<FpElem> {
        self.coeffs.last().map(|&c| self.field.elem(c))
    }

    pub fn eval(&self, x: FpElem) -> FpElem {
        assert_eq!(x.field(), self.field, "evaluation point from a different field");
        let f = &self.field;
        let v = self
            .coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add_raw(f.mul_raw(acc, x.value()), c));
        f.elem(v)
    }

    pub fn scale(&self, c: FpElem) -> Self {
        assert_eq!(c.field(), self.field, "scalar from a different field");
        if c.is_zero() {
            return Self::zero(self.field);
        }
        let f = &self.field;
        let coeffs = self.coeffs.iter().map(|&a| f.mul_raw(a, c.value())).collect();
        UniPoly { field: self.field, coeffs }
    }

    /// Divides by the leading coefficient. The zero polynomial stays zero.
    pub fn monic(&self) -> Self {
        match self.leading_coeff() {
            None => self.clone(),
            Some(lc) => self.scale(lc.inverse().expect("nonzero leading coefficient")),
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul_raw(c, i as u64 % f.modulus()))
            .collect();
        Self::from_raw(self.field, coeffs)
    }

    /// The `k`-th formal derivative.
    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |g, _| g.derivative())
    }

    /// Euclidean division `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        self.check(divisor);
        let Some(dd) = divisor.degree() else {
            return Err(Error::Domain("polynomial division by zero".into()));
        };
        let f = &self.field;
        let inv_lc = f.inv_raw(divisor.coeffs[dd]).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(self.field), self.clone()));
        }
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let q = f.mul_raw(c, inv_lc);
            quot[i - dd] = q;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                if b != 0 {
                    rem[i - dd + j] = f.sub_raw(rem[i - dd + j], f.mul_raw(q, b));
                }
            }
        }
        rem.truncate(dd);
        Ok((Self::from_raw(self.field, quot), Self::from_raw(self.field, rem)))
    }

    pub fn rem(&self, divisor: &UniPoly) -> Result<UniPoly> {
        self.div_rem(divisor).map(|(_, r)| r)
    }

    /// `self / divisor` when the division is exact.
    pub fn exact_div(&self, divisor: &UniPoly) -> Option<UniPoly> {
        match self.div_rem(divisor) {
            Ok((q, r)) if r.is_zero() => Some(q),
            _ => None,
        }
    }

    pub fn divides(&self, other: &UniPoly) -> bool {
        other.exact_div(self).is_some()
    }

    /// Total order used for every set-valued output: field, then degree,
    /// then coefficients from the constant term upward.
    pub fn canonical_cmp(&self, other: &UniPoly) -> Ordering {
        self.cmp(other)
    }

    fn check(&self, other: &UniPoly) {
        assert_eq!(
            self.field, other.field,
            "polynomials over {} and {}",
            self.field, other.field
        );
    }
}

impl Ord for UniPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.field
            .cmp(&other.field)
            .then(self.coeffs.len().cmp(&other.coeffs.len()))
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for UniPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 if c == 1 => write!(f, "x")?,
                1 => write!(f, "{c}*x")?,
                _ if c == 1 => write!(f, "x^{i}")?,
                _ => write!(f, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        self.check(rhs);
        let f = &self.field;
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (a, &b) in coeffs.iter_mut().zip(&short.coeffs) {
            *a = f.add_raw(*a, b);
        }
        UniPoly::from_raw(self.field, coeffs)
    }
}

impl<'a> Sub<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        self + &(-rhs)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        let f = &self.field;
        let coeffs = self.coeffs.iter().map(|&c| f.sub_raw(0, c)).collect();
        UniPoly { field: self.field, coeffs }
    }
}

impl<'a> Mul<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        self.check(rhs);
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero(self.field);
        }
        let f = &self.field;
        let mut out = vec![0u64; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                if b != 0 {
                    out[i + j] = f.add_raw(out[i + j], f.mul_raw(a, b));
                }
            }
        }
        UniPoly::from_raw(self.field, out)
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<UniPoly> for UniPoly {
            type Output = UniPoly;
            fn $method(self, rhs: UniPoly) -> UniPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        -&self
    }
}

/// Monic gcd by the Euclidean algorithm; `gcd(a, 0) = monic(a)`.
pub fn gcd_monic(a: &UniPoly, b: &UniPoly) -> Result<UniPoly> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::Domain("gcd of two zero polynomials".into()));
    }
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let r = x.rem(&y)?;
        x = y;
        y = r;
    }
    Ok(x.monic())
}

/// The polynomial of degree at most `degree_bound` through `points`.
///
/// The first `degree_bound + 1` points determine the result; any further
/// points must agree with it.
pub fn interpolate_univariate(points: &[(FpElem, FpElem)], degree_bound: usize) -> Result<UniPoly> {
    let Some(&(x0, _)) = points.first() else {
        return Err(Error::Parameter("interpolation needs at least one point".into()));
    };
    let field = x0.field();
    if points.len() < degree_bound + 1 {
        return Err(Error::Parameter(format!(
            "interpolation with degree bound {degree_bound} needs {} points, got {}",
            degree_bound + 1,
            points.len()
        )));
    }
    if field.modulus() <= degree_bound as u64 {
        return Err(Error::Parameter(format!(
            "degree bound {degree_bound} needs p > {degree_bound}, got p = {}",
            field.modulus()
        )));
    }
    let mut xs: Vec<u64> = points.iter().map(|(x, _)| x.value()).collect();
    xs.sort_unstable();
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Parameter("duplicate interpolation abscissae".into()));
    }

    let (head, tail) = points.split_at(degree_bound + 1);
    let f = &field;
    // Master polynomial prod (x - x_i), then one synthetic division per node.
    let mut master = vec![1u64];
    for (x, _) in head {
        let mut next = vec![0u64; master.len() + 1];
        for (i, &c) in master.iter().enumerate() {
            next[i + 1] = f.add_raw(next[i + 1], c);
            next[i] = f.sub_raw(next[i], f.mul_raw(c, x.value()));
        }
        master = next;
    }
    let mut acc = vec![0u64; degree_bound + 1];
    for (xi, yi) in head {
        if yi.is_zero() {
            continue;
        }
        let mut quot = vec![0u64; degree_bound + 1];
        let mut carry = 0u64;
        for k in (0..=degree_bound).rev() {
            carry = f.add_raw(master[k + 1], f.mul_raw(carry, xi.value()));
            quot[k] = carry;
        }
        let denom = quot
            .iter()
            .rev()
            .fold(0, |a, &c| f.add_raw(f.mul_raw(a, xi.value()), c));
        let w = f.mul_raw(yi.value(), f.inv_raw(denom).expect("distinct abscissae"));
        for (a, &q) in acc.iter_mut().zip(&quot) {
            *a = f.add_raw(*a, f.mul_raw(w, q));
        }
    }
    let poly = UniPoly::from_raw(field, acc);
    for &(x, y) in tail {
        if poly.eval(x) != y {
            return Err(Error::Inconsistent(format!(
                "point ({x}, {y}) disagrees with the degree-{degree_bound} interpolant"
            )));
        }
    }
    Ok(poly)
}

/// Largest `e` with `phi^e | g`.
pub fn ord_factor(g: &UniPoly, phi: &UniPoly) -> Result<usize> {
    if g.is_zero() {
        return Err(Error::Domain("ord of the zero polynomial".into()));
    }
    if phi.is_constant() {
        return Err(Error::Domain("ord with respect to a constant".into()));
    }
    let mut e = 0;
    let mut cur = g.clone();
    while let Some(q) = cur.exact_div(phi) {
        cur = q;
        e += 1;
    }
    Ok(e)
}
