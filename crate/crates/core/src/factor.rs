//! Deterministic factorization of univariate polynomials over `F_p`.
//!
//! Pipeline: squarefree decomposition (Yun, valid for `p > deg g`), then
//! distinct-degree splitting via `gcd(f, x^{p^i} - x)`, then equal-degree
//! splitting with a Berlekamp subalgebra basis. The splitting probes scan
//! `c = 0, 1, 2, ...` and try both `gcd(f, b + c)` and
//! `gcd(f, (b + c)^{(p-1)/2} - 1)`; the first probe alone is guaranteed to
//! succeed for some `c < p`, the second usually succeeds at `c = 0`.

use crate::error::{Error, Result};
use crate::field::FpElem;
use crate::linalg;
use crate::poly::{gcd_monic, UniPoly};

/// `g = unit * prod factor^multiplicity` with monic irreducible factors in
/// canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: FpElem,
    pub factors: Vec<(UniPoly, usize)>,
}

impl Factorization {
    pub fn expand(&self) -> UniPoly {
        self.factors
            .iter()
            .fold(UniPoly::constant(self.unit), |acc, (f, m)| &acc * &f.pow(*m as u64))
    }
}

fn check_char(g: &UniPoly) -> Result<()> {
    let Some(deg) = g.degree() else {
        return Err(Error::Domain("factoring the zero polynomial".into()));
    };
    let p = g.field().modulus();
    if p <= deg as u64 {
        return Err(Error::UnsupportedParameters(format!(
            "factoring a degree-{deg} polynomial needs p > {deg}, got p = {p}"
        )));
    }
    Ok(())
}

/// Pairwise coprime monic squarefree parts with their multiplicities,
/// ascending by multiplicity. Constant inputs give an empty list.
pub fn squarefree_decomposition(g: &UniPoly) -> Result<Vec<(UniPoly, usize)>> {
    check_char(g)?;
    let g = g.monic();
    let mut out = Vec::new();
    if g.is_constant() {
        return Ok(out);
    }
    // Yun's algorithm.
    let dg = g.derivative();
    let a0 = gcd_monic(&g, &dg)?;
    let mut b = g.exact_div(&a0).expect("gcd divides");
    let mut c = dg.exact_div(&a0).expect("gcd divides");
    let mut dpoly = &c - &b.derivative();
    let mut i = 1;
    while !b.is_constant() {
        let a = gcd_monic(&b, &dpoly)?;
        if !a.is_constant() {
            out.push((a.clone(), i));
        }
        b = b.exact_div(&a).expect("gcd divides");
        c = dpoly.exact_div(&a).expect("gcd divides");
        dpoly = &c - &b.derivative();
        i += 1;
    }
    Ok(out)
}

/// `base^e mod modulus`.
pub fn pow_mod(base: &UniPoly, mut e: u64, modulus: &UniPoly) -> Result<UniPoly> {
    let mut acc = UniPoly::one(base.field()).rem(modulus)?;
    let mut b = base.rem(modulus)?;
    while e > 0 {
        if e & 1 == 1 {
            acc = (&acc * &b).rem(modulus)?;
        }
        e >>= 1;
        if e > 0 {
            b = (&b * &b).rem(modulus)?;
        }
    }
    Ok(acc)
}

/// Splits a monic squarefree polynomial into `(product of all degree-i
/// irreducible factors, i)` pairs.
fn distinct_degree(f: &UniPoly) -> Result<Vec<(UniPoly, usize)>> {
    let field = f.field();
    let p = field.modulus();
    let x = UniPoly::x(field);
    let mut rest = f.clone();
    let mut h = x.rem(&rest)?;
    let mut out = Vec::new();
    let mut i = 0;
    while rest.degree().unwrap_or(0) >= 2 * (i + 1) {
        i += 1;
        h = pow_mod(&h, p, &rest)?;
        let g = gcd_monic(&rest, &(&h - &x))?;
        if !g.is_constant() {
            rest = rest.exact_div(&g).expect("gcd divides");
            h = h.rem(&rest)?;
            out.push((g, i));
        }
    }
    if let Some(deg) = rest.degree().filter(|&d| d > 0) {
        out.push((rest, deg));
    }
    Ok(out)
}

/// Basis of `{b : deg b < deg f, b^p = b mod f}` for monic squarefree `f`.
fn berlekamp_basis(f: &UniPoly) -> Result<Vec<UniPoly>> {
    let field = f.field();
    let n = f.degree().expect("nonzero");
    let xp = pow_mod(&UniPoly::x(field), field.modulus(), f)?;
    // Row j of q holds x^{p j} mod f.
    let mut q: Vec<Vec<u64>> = Vec::with_capacity(n);
    let mut cur = UniPoly::one(field);
    for _ in 0..n {
        let mut row = cur.raw().to_vec();
        row.resize(n, 0);
        q.push(row);
        cur = (&cur * &xp).rem(f)?;
    }
    let rows: Vec<Vec<u64>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|j| {
                    let v = q[j][k];
                    if j == k {
                        field.sub_raw(v, 1)
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    Ok(linalg::nullspace(&field, &rows, n)
        .into_iter()
        .map(|v| UniPoly::from_raw(field, v))
        .collect())
}

/// Proper monic factor of `f` found from `b`, or `None` if `b` is constant
/// modulo every irreducible factor of `f` with the same value.
fn split_with(f: &UniPoly, b: &UniPoly) -> Result<Option<UniPoly>> {
    let field = f.field();
    let p = field.modulus();
    let b = b.rem(f)?;
    if b.is_constant() {
        return Ok(None);
    }
    let one = UniPoly::one(field);
    let proper = |g: &UniPoly| !g.is_constant() && g.degree() != f.degree();
    for c in 0..p {
        let shifted = &b + &UniPoly::constant(field.elem(c));
        let g = gcd_monic(f, &shifted)?;
        if proper(&g) {
            return Ok(Some(g));
        }
        let g = gcd_monic(f, &(&pow_mod(&shifted, (p - 1) / 2, f)? - &one))?;
        if proper(&g) {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// Splits a monic product of distinct degree-`i` irreducibles.
fn equal_degree(f: &UniPoly, i: usize) -> Result<Vec<UniPoly>> {
    if f.degree() == Some(i) {
        return Ok(vec![f.clone()]);
    }
    let basis = berlekamp_basis(f)?;
    let mut done = Vec::new();
    let mut todo = vec![f.clone()];
    while let Some(g) = todo.pop() {
        if g.degree() == Some(i) {
            done.push(g);
            continue;
        }
        let mut split = None;
        for b in &basis {
            if let Some(h) = split_with(&g, b)? {
                split = Some(h);
                break;
            }
        }
        let h = split.ok_or_else(|| {
            Error::InternalInvariant(format!("equal-degree splitting stalled on {g}"))
        })?;
        let other = g.exact_div(&h).expect("factor divides");
        todo.push(h);
        todo.push(other);
    }
    Ok(done)
}

/// Complete factorization into monic irreducibles; needs `p > deg g`.
pub fn factor_univariate(g: &UniPoly) -> Result<Factorization> {
    check_char(g)?;
    let unit = g.leading_coeff().expect("nonzero");
    let mut factors = Vec::new();
    for (part, mult) in squarefree_decomposition(g)? {
        for (block, i) in distinct_degree(&part)? {
            for irr in equal_degree(&block, i)? {
                factors.push((irr, mult));
            }
        }
    }
    factors.sort();
    Ok(Factorization { unit, factors })
}

/// Irreducibility test for polynomials with `p > deg g`.
pub fn is_irreducible(g: &UniPoly) -> Result<bool> {
    if g.is_constant() {
        return Ok(false);
    }
    let fac = factor_univariate(g)?;
    Ok(fac.factors.len() == 1 && fac.factors[0].1 == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    fn u(p: u64, c: &[u64]) -> UniPoly {
        UniPoly::from_u64s(PrimeField::new(p).unwrap(), c)
    }

    #[test]
    fn squarefree_examples() {
        let f = PrimeField::new(11).unwrap();
        let g = &UniPoly::linear(f, 1).pow(2) * &UniPoly::linear(f, 2);
        assert_eq!(
            squarefree_decomposition(&g).unwrap(),
            vec![(UniPoly::linear(f, 2), 1), (UniPoly::linear(f, 1), 2)]
        );
        let sq = u(11, &[3, 1, 2]);
        assert_eq!(squarefree_decomposition(&sq).unwrap(), vec![(sq.monic(), 1)]);
        let f31 = PrimeField::new(31).unwrap();
        let h = (&UniPoly::x(f31) * &UniPoly::linear(f31, 1)).pow(3);
        assert_eq!(squarefree_decomposition(&h).unwrap(), vec![(u(31, &[0, 1, 1]), 3)]);
        assert!(matches!(
            squarefree_decomposition(&UniPoly::x(f).pow(11)),
            Err(Error::UnsupportedParameters(_))
        ));
    }

    #[test]
    fn factor_examples() {
        let fac = factor_univariate(&u(7, &[6, 0, 1])).unwrap();
        assert_eq!(fac.unit.value(), 1);
        assert_eq!(fac.factors, vec![(u(7, &[1, 1]), 1), (u(7, &[6, 1]), 1)]);
        let fac = factor_univariate(&u(7, &[1, 0, 1])).unwrap();
        assert_eq!(fac.factors, vec![(u(7, &[1, 0, 1]), 1)]);
        let g = u(11, &[3, 1]).pow(2).scale(PrimeField::new(11).unwrap().elem(3));
        let fac = factor_univariate(&g).unwrap();
        assert_eq!(fac.unit.value(), 3);
        assert_eq!(fac.factors, vec![(u(11, &[3, 1]), 2)]);
    }

    #[test]
    fn splits_products_of_equal_degree_quadratics() {
        // x^2+1, x^2+x+3 and x^2+2 are irreducible over F_7 (checked below).
        let irr = [u(7, &[1, 0, 1]), u(7, &[3, 1, 1]), u(7, &[2, 0, 1])];
        let f7 = PrimeField::new(7).unwrap();
        for q in &irr {
            assert!((0..7).all(|a| !q.eval(f7.elem(a)).is_zero()));
        }
        let g = irr.iter().fold(UniPoly::one(f7), |acc, q| &acc * q);
        let fac = factor_univariate(&g).unwrap();
        let mut want: Vec<_> = irr.iter().map(|q| (q.clone(), 1)).collect();
        want.sort();
        assert_eq!(fac.factors, want);
    }
}
