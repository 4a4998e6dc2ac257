use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FpElem, PrimeField};
use crate::poly::UniPoly;

/// Exponent vector of a monomial in `n` variables.
///
/// Ordered by total degree first, then lexicographically, so iterating a
/// `BTreeMap` keyed by it walks the monomials in graded-lex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(exps: Vec<u32>) -> Self {
        ExponentVector(exps)
    }

    pub fn zero(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    /// `x_i` for a zero-based variable index.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        ExponentVector(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    fn plus(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in `n` variables over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    field: PrimeField,
    n: usize,
    terms: BTreeMap<ExponentVector, FpElem>,
}

impl SparsePoly {
    pub fn zero(field: PrimeField, n: usize) -> Self {
        SparsePoly { field, n, terms: BTreeMap::new() }
    }

    pub fn constant(c: FpElem, n: usize) -> Self {
        Self::from_terms(c.field(), n, [(ExponentVector::zero(n), c)])
    }

    /// The variable `x_{i+1}` (zero-based `i`).
    pub fn variable(field: PrimeField, n: usize, i: usize) -> Self {
        Self::from_terms(field, n, [(ExponentVector::unit(n, i), field.one())])
    }

    /// Collects terms, summing repeated exponents and dropping zeros.
    ///
    /// Panics if an exponent vector has the wrong length or a coefficient
    /// lives in another field.
    pub fn from_terms<I>(field: PrimeField, n: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (ExponentVector, FpElem)>,
    {
        let mut out = Self::zero(field, n);
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    fn add_term(&mut self, e: ExponentVector, c: FpElem) {
        assert_eq!(e.len(), self.n, "exponent vector length");
        assert_eq!(c.field(), self.field, "coefficient from a different field");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVector, &FpElem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &ExponentVector) -> FpElem {
        self.terms.get(e).copied().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero terms.
    pub fn sparsity(&self) -> usize {
        self.terms.len()
    }

    /// Maximum total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(ExponentVector::total_degree).max()
    }

    /// Coefficient of the graded-lex largest monomial.
    pub fn leading_coeff(&self) -> Option<FpElem> {
        self.terms.values().next_back().copied()
    }

    /// Scales so the graded-lex leading coefficient is 1.
    pub fn monic(&self) -> Self {
        match self.leading_coeff() {
            None => self.clone(),
            Some(lc) => self.scale(lc.inverse().expect("nonzero leading coefficient")),
        }
    }

    pub fn scale(&self, c: FpElem) -> Self {
        Self::from_terms(self.field, self.n, self.terms.iter().map(|(e, &v)| (e.clone(), v * c)))
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        self.check(other);
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        self.add(&other.scale(-self.field.one()))
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        self.check(other);
        let mut out = Self::zero(self.field, self.n);
        for (ea, &a) in &self.terms {
            for (eb, &b) in &other.terms {
                out.add_term(ea.plus(eb), a * b);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> SparsePoly {
        let mut acc = Self::constant(self.field.one(), self.n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn eval(&self, point: &[FpElem]) -> Result<FpElem> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: point.len() });
        }
        let mut acc = self.field.zero();
        for (e, &c) in &self.terms {
            let mut m = c;
            for (&x, &k) in point.iter().zip(e.exps()) {
                if k > 0 {
                    m *= x.pow(k as u64);
                }
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Whether `other = c * self` for some nonzero scalar `c`.
    pub fn is_associate(&self, other: &SparsePoly) -> bool {
        if self.is_zero() || other.is_zero() || self.sparsity() != other.sparsity() {
            return self.is_zero() && other.is_zero();
        }
        self.monic() == other.monic()
    }

    fn check(&self, other: &SparsePoly) {
        assert_eq!(self.field, other.field, "polynomials over different fields");
        assert_eq!(self.n, other.n, "polynomials in different variable counts");
    }
}

impl fmt::Display for SparsePoly {
    /// Descending graded-lex, e.g. `2*x1^2*x2+1*x3+5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            if idx > 0 {
                write!(f, "+")?;
            }
            write!(f, "{c}")?;
            for (i, &k) in e.exps().iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{k}", i + 1)?,
                }
            }
        }
        Ok(())
    }
}

/// The univariate polynomial `t -> f(u + t (v - u))`.
pub fn restrict_to_line(f: &SparsePoly, u: &[FpElem], v: &[FpElem]) -> Result<UniPoly> {
    let n = f.nvars();
    for pt in [u, v] {
        if pt.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: pt.len() });
        }
    }
    let field = f.field();
    let max_exp: Vec<u32> = (0..n)
        .map(|i| f.terms().map(|(e, _)| e.exps()[i]).max().unwrap_or(0))
        .collect();
    // powers[i][k] = (u_i + t (v_i - u_i))^k
    let powers: Vec<Vec<UniPoly>> = (0..n)
        .map(|i| {
            let line = UniPoly::new(field, vec![u[i], v[i] - u[i]]);
            let mut pw = vec![UniPoly::one(field)];
            for k in 1..=max_exp[i] as usize {
                pw.push(&pw[k - 1] * &line);
            }
            pw
        })
        .collect();
    let mut acc = UniPoly::zero(field);
    for (e, &c) in f.terms() {
        let mut m = UniPoly::constant(c);
        for (i, &k) in e.exps().iter().enumerate() {
            if k > 0 {
                m = &m * &powers[i][k as usize];
            }
        }
        acc = &acc + &m;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fld() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    fn pt(v: &[u64]) -> Vec<FpElem> {
        v.iter().map(|&x| fld().elem(x)).collect()
    }

    #[test]
    fn restriction_examples() {
        let f = fld();
        let x1 = SparsePoly::variable(f, 2, 0);
        let x2 = SparsePoly::variable(f, 2, 1);
        let sum = x1.add(&x2);
        assert_eq!(restrict_to_line(&sum, &pt(&[1, 0]), &pt(&[0, 1])).unwrap(), UniPoly::one(f));
        let prod = x1.mul(&x2);
        assert_eq!(
            restrict_to_line(&prod, &pt(&[1, 0]), &pt(&[0, 1])).unwrap(),
            UniPoly::from_i64s(f, &[0, 1, -1])
        );
        let g = prod.add(&x1.pow(3)).scale(f.elem(4));
        let u = pt(&[3, 7]);
        let r = restrict_to_line(&g, &u, &u).unwrap();
        assert_eq!(r, UniPoly::constant(g.eval(&u).unwrap()));
        assert!(restrict_to_line(&g, &pt(&[1]), &u).is_err());
    }

    #[test]
    fn display_descending_grlex() {
        let f = fld();
        let x1 = SparsePoly::variable(f, 3, 0);
        let x2 = SparsePoly::variable(f, 3, 1);
        let x3 = SparsePoly::variable(f, 3, 2);
        let g = x1.pow(2).mul(&x2).scale(f.elem(2)).add(&x3).add(&SparsePoly::constant(f.elem(5), 3));
        assert_eq!(g.to_string(), "2*x1^2*x2+1*x3+5");
        assert_eq!(x1.add(&x2).to_string(), "1*x1+1*x2");
    }

    #[test]
    fn associates() {
        let f = fld();
        let a = SparsePoly::variable(f, 2, 0).add(&SparsePoly::variable(f, 2, 1));
        assert!(a.is_associate(&a.scale(f.elem(5))));
        assert!(!a.is_associate(&a.add(&SparsePoly::constant(f.one(), 2))));
    }
}
