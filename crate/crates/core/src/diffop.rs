//! Wronskians and linear differential operators `L = sum Q_i(x) D^i` with
//! polynomial coefficients, where `D` is the formal derivative.
//!
//! The central routine, [`solve_annihilator`], finds the operator of least
//! order annihilating a univariate `f`. When `f` is a combination of `r'`
//! powers `f_i^d` in the right regime that operator is unique after
//! normalization and its kernel is exactly the span of the `f_i^d`.

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg;
use crate::poly::{gcd_monic, UniPoly};

/// `sum_i coeffs[i] * D^i`, with a nonzero top coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOperator {
    coeffs: Vec<UniPoly>,
}

impl DiffOperator {
    /// Trailing zero coefficients are dropped; an operator needs at least
    /// one nonzero coefficient.
    pub fn new(mut coeffs: Vec<UniPoly>) -> Result<Self> {
        while coeffs.last().is_some_and(UniPoly::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::Parameter("differential operator with all coefficients zero".into()));
        }
        let field = coeffs[0].field();
        if coeffs.iter().any(|q| q.field() != field) {
            return Err(Error::Parameter("operator coefficients over different fields".into()));
        }
        Ok(DiffOperator { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[UniPoly] {
        &self.coeffs
    }

    /// `Q_{order}`.
    pub fn leading(&self) -> &UniPoly {
        self.coeffs.last().expect("nonempty")
    }

    pub fn field(&self) -> PrimeField {
        self.coeffs[0].field()
    }

    /// Largest coefficient degree.
    pub fn coeff_degree(&self) -> usize {
        self.coeffs.iter().filter_map(UniPoly::degree).max().unwrap_or(0)
    }
}

/// `sum_i Q_i * D^i g`.
pub fn apply_operator(l: &DiffOperator, g: &UniPoly) -> UniPoly {
    let mut acc = UniPoly::zero(l.field());
    let mut deriv = g.clone();
    for q in &l.coeffs {
        if deriv.is_zero() {
            break;
        }
        acc = &acc + &(q * &deriv);
        deriv = deriv.derivative();
    }
    acc
}

/// Determinant of `(D^i g_j)` by fraction-free elimination over `F_p[x]`.
pub fn wronskian(gs: &[UniPoly]) -> Result<UniPoly> {
    let Some(first) = gs.first() else {
        return Err(Error::Parameter("Wronskian of an empty family".into()));
    };
    let field = first.field();
    let n = gs.len();
    let mut m: Vec<Vec<UniPoly>> = Vec::with_capacity(n);
    let mut row: Vec<UniPoly> = gs.to_vec();
    for _ in 0..n {
        let next = row.iter().map(UniPoly::derivative).collect();
        m.push(row);
        row = next;
    }
    bareiss_det(field, m)
}

/// Bareiss determinant; every division is exact over an integral domain.
fn bareiss_det(field: PrimeField, mut m: Vec<Vec<UniPoly>>) -> Result<UniPoly> {
    let n = m.len();
    let mut negate = false;
    let mut prev = UniPoly::one(field);
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return Ok(UniPoly::zero(field));
        };
        if piv != k {
            m.swap(piv, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.exact_div(&prev).ok_or_else(|| {
                    Error::InternalInvariant("inexact division in fraction-free elimination".into())
                })?;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { -det } else { det })
}

/// Coefficients `(D^i f)` for `i = 0..=order`, as raw residue vectors.
fn derivative_table(f: &UniPoly, order: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::with_capacity(order + 1);
    let mut g = f.clone();
    for _ in 0..=order {
        out.push(g.raw().to_vec());
        g = g.derivative();
    }
    out
}

/// Finds the annihilating operator of least order `r' <= r` with
/// `deg Q_i <= r'^2 delta`, normalized so that `deg Q_{r'}` is minimal,
/// `Q_{r'}` is monic and the `Q_i` have no common factor.
///
/// Every coefficient of `L(f)` up to `r'^2 delta + deg f` is constrained.
pub fn solve_annihilator(f: &UniPoly, r: usize, delta: usize) -> Result<(usize, DiffOperator)> {
    solve_annihilator_inner(f, r, delta, None)
}

/// [`solve_annihilator`] with the equations of each linear system visited
/// in a shuffled order. The normalized result does not depend on the order.
pub fn solve_annihilator_permuted(f: &UniPoly, r: usize, delta: usize, seed: u64) -> Result<(usize, DiffOperator)> {
    solve_annihilator_inner(f, r, delta, Some(seed))
}

fn shuffle<T>(items: &mut [T], seed: u64) {
    let mut state = seed ^ 0x9e37_79b9_7f4a_7c15;
    for i in (1..items.len()).rev() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        items.swap(i, (state % (i as u64 + 1)) as usize);
    }
}

fn solve_annihilator_inner(f: &UniPoly, r: usize, delta: usize, seed: Option<u64>) -> Result<(usize, DiffOperator)> {
    let Some(deg_f) = f.degree() else {
        return Err(Error::Domain("annihilator of the zero polynomial".into()));
    };
    if r == 0 {
        return Err(Error::Parameter("annihilator search needs r >= 1".into()));
    }
    let field = f.field();
    for order in 1..=r {
        let bound = order * order * delta;
        let table = derivative_table(f, order);
        let width = bound + 1;
        let ncols = (order + 1) * width;
        // Column of gamma_{i,j}: blocks from Q_order down to Q_0, each block
        // listing x^bound down to x^0, so RREF pivots favour low deg Q_order.
        let col = |i: usize, j: usize| (order - i) * width + (bound - j);
        let nrows = bound + deg_f + 1;
        let mut rows = vec![vec![0u64; ncols]; nrows];
        for (i, di) in table.iter().enumerate() {
            for j in 0..=bound {
                let c = col(i, j);
                for (e, &v) in di.iter().enumerate() {
                    if v != 0 {
                        rows[e + j][c] = v;
                    }
                }
            }
        }
        if let Some(seed) = seed {
            shuffle(&mut rows, seed ^ order as u64);
        }
        let mut ns = linalg::nullspace(&field, &rows, ncols);
        if ns.is_empty() {
            continue;
        }
        let pivots = linalg::rref(&field, &mut ns, ncols);
        // Rows whose pivot lies in the Q_order block have Q_order leading
        // degree equal to the pivot degree; the last such row is minimal.
        let Some(best) = pivots.iter().rposition(|&c| c < width) else {
            continue;
        };
        let v = &ns[best];
        let coeffs: Vec<UniPoly> = (0..=order)
            .map(|i| {
                let raw = (0..=bound).map(|j| v[col(i, j)]).collect();
                UniPoly::from_raw(field, raw)
            })
            .collect();
        let g = coeffs
            .iter()
            .filter(|q| !q.is_zero())
            .try_fold(UniPoly::zero(field), |acc, q| gcd_monic(&acc, q))?;
        let coeffs: Vec<UniPoly> = coeffs
            .iter()
            .map(|q| q.exact_div(&g).expect("gcd divides"))
            .collect();
        let lc = coeffs[order].leading_coeff().expect("nonzero top coefficient");
        let inv = lc.inverse()?;
        let coeffs = coeffs.iter().map(|q| q.scale(inv)).collect();
        return Ok((order, DiffOperator::new(coeffs)?));
    }
    Err(Error::NotInClass(format!(
        "no annihilating operator of order <= {r} with coefficient degree <= r'^2 * {delta}"
    )))
}

/// Linearly independent polynomials of degree at most `bound`, kept in
/// canonical echelon form: leading exponents strictly decreasing, each
/// element monic and zero at the other elements' leading exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBasis {
    field: PrimeField,
    bound: usize,
    basis: Vec<UniPoly>,
}

impl KernelBasis {
    /// Canonical basis of the span of `polys`, which must have degree at
    /// most `bound`.
    pub fn from_polys(field: PrimeField, bound: usize, polys: &[UniPoly]) -> Result<Self> {
        let mut rows = Vec::with_capacity(polys.len());
        for g in polys {
            if g.degree().is_some_and(|dg| dg > bound) {
                return Err(Error::Parameter(format!(
                    "basis element of degree {} exceeds bound {bound}",
                    g.degree().unwrap_or(0)
                )));
            }
            rows.push(to_desc_row(g, bound));
        }
        Ok(Self::from_desc_rows(field, bound, rows))
    }

    fn from_desc_rows(field: PrimeField, bound: usize, mut rows: Vec<Vec<u64>>) -> Self {
        linalg::rref(&field, &mut rows, bound + 1);
        let basis = rows.iter().map(|row| from_desc_row(field, row)).collect();
        KernelBasis { field, bound, basis }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn basis(&self) -> &[UniPoly] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Whether `g` lies in the span.
    pub fn contains(&self, g: &UniPoly) -> bool {
        if g.degree().is_some_and(|dg| dg > self.bound) {
            return false;
        }
        let rows: Vec<Vec<u64>> = self.basis.iter().map(|h| to_desc_row(h, self.bound)).collect();
        linalg::in_span(&self.field, &rows, &to_desc_row(g, self.bound), self.bound + 1)
    }

    /// Whether every element of `other` lies in this span.
    pub fn contains_span(&self, other: &KernelBasis) -> bool {
        other.basis.iter().all(|g| self.contains(g))
    }
}

/// Coefficients of `g` from `x^bound` down to `x^0`.
fn to_desc_row(g: &UniPoly, bound: usize) -> Vec<u64> {
    (0..=bound).map(|c| g.coeff(bound - c).value()).collect()
}

fn from_desc_row(field: PrimeField, row: &[u64]) -> UniPoly {
    UniPoly::from_raw(field, row.iter().rev().copied().collect())
}

/// Basis of `{g : deg g <= bound, L(g) = 0}`; needs `p > bound`.
pub fn kernel_basis(l: &DiffOperator, bound: usize) -> Result<KernelBasis> {
    let field = l.field();
    let p = field.modulus();
    if p <= bound as u64 {
        return Err(Error::Parameter(format!("kernel with degree bound {bound} needs p > {bound}, got {p}")));
    }
    let nrows = bound + l.coeff_degree() + 1;
    let ncols = bound + 1;
    let mut rows = vec![vec![0u64; ncols]; nrows];
    for m in 0..=bound {
        let c = bound - m;
        // L(x^m) = sum_i Q_i * m (m-1) ... (m-i+1) x^(m-i)
        let mut falling = 1u64;
        for (i, q) in l.coeffs().iter().enumerate() {
            if i > m {
                break;
            }
            if i > 0 {
                falling = field.mul_raw(falling, (m - i + 1) as u64 % p);
            }
            if falling == 0 {
                break;
            }
            for (e, &v) in q.raw().iter().enumerate() {
                if v != 0 {
                    let r = e + m - i;
                    rows[r][c] = field.add_raw(rows[r][c], field.mul_raw(v, falling));
                }
            }
        }
    }
    let ns = linalg::nullspace(&field, &rows, ncols);
    Ok(KernelBasis::from_desc_rows(field, bound, ns))
}

/// Basis of `{g in span(kb) : phi^e | g}`.
///
/// The defining system `phi^e * a = sum b_i h_i` is solved with the
/// quotient `a` eliminated: `phi^e | g` iff `g mod phi^e = 0`, which is
/// linear in the `b_i`.
pub fn subspace_with_factor(kb: &KernelBasis, phi: &UniPoly, e: usize) -> Result<KernelBasis> {
    let field = kb.field;
    if phi.is_constant() {
        return Err(Error::Domain("factor subspace for a constant polynomial".into()));
    }
    let deg_phi = phi.degree().expect("nonconstant");
    if e * deg_phi > kb.bound {
        return Ok(KernelBasis { field, bound: kb.bound, basis: Vec::new() });
    }
    if e == 0 || kb.is_empty() {
        return Ok(kb.clone());
    }
    let modulus = phi.pow(e as u64);
    let width = e * deg_phi;
    let rems: Vec<UniPoly> = kb.basis.iter().map(|h| h.rem(&modulus)).collect::<Result<_>>()?;
    // Rows: coefficient of x^c in sum b_i (h_i mod phi^e); columns: b_i.
    let rows: Vec<Vec<u64>> = (0..width)
        .map(|c| rems.iter().map(|rem| rem.coeff(c).value()).collect())
        .collect();
    let ns = linalg::nullspace(&field, &rows, kb.dim());
    let polys: Vec<UniPoly> = ns
        .iter()
        .map(|b| {
            kb.basis
                .iter()
                .zip(b)
                .fold(UniPoly::zero(field), |acc, (h, &bi)| &acc + &h.scale(field.elem(bi)))
        })
        .collect();
    KernelBasis::from_polys(field, kb.bound, &polys)
}
