use crate::diffop::{kernel_basis, solve_annihilator};
use crate::error::{Error, Result};
use crate::factor::factor_univariate;
use crate::field::{FpElem, PrimeField};
use crate::linalg;
use crate::poly::{interpolate_univariate, perfect_dth_root, UniPoly};

use super::dfs::dfs_recover;
use super::{PowCircuitUni, PowerTermUni};

/// Checks `d > (r+1)^4 delta` and `p > 2 r d delta`.
pub fn univariate_regime(field: PrimeField, r: usize, d: usize, delta: usize) -> Result<()> {
    let (r64, d64, dl) = (r as u128, d as u128, delta as u128);
    if r == 0 || delta == 0 {
        return Err(Error::Parameter("reconstruction needs r, delta >= 1".into()));
    }
    if d64 <= (r64 + 1).pow(4) * dl {
        return Err(Error::UnsupportedParameters(format!(
            "reconstruction needs d > (r+1)^4 delta; got r = {r}, d = {d}, delta = {delta}"
        )));
    }
    if (field.modulus() as u128) <= 2 * r64 * d64 * dl {
        return Err(Error::UnsupportedParameters(format!(
            "reconstruction needs p > 2 r d delta = {}; got p = {}",
            2 * r64 * d64 * dl,
            field.modulus()
        )));
    }
    Ok(())
}

/// Queries `oracle` at `0, 1, ..., d delta` and reconstructs the
/// interpolated polynomial.
pub fn reconstruct_univariate_oracle<O>(
    field: PrimeField,
    mut oracle: O,
    r: usize,
    d: usize,
    delta: usize,
) -> Result<PowCircuitUni>
where
    O: FnMut(FpElem) -> Result<FpElem>,
{
    univariate_regime(field, r, d, delta)?;
    let bound = d * delta;
    let mut points = Vec::with_capacity(bound + 1);
    for t in 0..=bound as u64 {
        let x = field.elem(t);
        points.push((x, oracle(x)?));
    }
    let f = interpolate_univariate(&points, bound)?;
    reconstruct_univariate(&f, r, d, delta)
}

/// Writes `f` as `sum alpha_i f_i^d` with at most `r` monic non-associate
/// bases of degree at most `delta`. The zero polynomial gives the empty
/// circuit.
pub fn reconstruct_univariate(f: &UniPoly, r: usize, d: usize, delta: usize) -> Result<PowCircuitUni> {
    let field = f.field();
    univariate_regime(field, r, d, delta)?;
    let bound = d * delta;
    let Some(deg) = f.degree() else {
        return PowCircuitUni::new(field, d, Vec::new());
    };
    if deg > bound {
        return Err(Error::NotInClass(format!("degree {deg} exceeds d delta = {bound}")));
    }
    if let Some((alpha, g)) = perfect_dth_root(f, d) {
        if g.degree().unwrap_or(0) <= delta {
            return PowCircuitUni::new(field, d, vec![PowerTermUni::new(alpha, g)?]);
        }
    }

    let (order, l) = solve_annihilator(f, r, delta)?;
    let lead = l.leading();
    let factors: Vec<UniPoly> = if lead.is_constant() {
        Vec::new()
    } else {
        factor_univariate(lead)?
            .factors
            .into_iter()
            .map(|(phi, _)| phi)
            .filter(|phi| phi.degree().unwrap_or(0) <= delta)
            .collect()
    };
    let kb = kernel_basis(&l, bound)?;
    let powers = dfs_recover(&kb, &factors, d, delta).map_err(|e| match e {
        Error::InternalInvariant(msg) => Error::NotInClass(msg),
        other => other,
    })?;
    if powers.len() != order {
        return Err(Error::NotInClass(format!(
            "recovered {} powers for an operator of order {order}",
            powers.len()
        )));
    }

    let mut bases = Vec::with_capacity(order);
    for p in &powers {
        match perfect_dth_root(p, d) {
            Some((_, g)) if g.degree().unwrap_or(0) <= delta => bases.push(g),
            _ => return Err(Error::NotInClass("recovered element is not a d-th power".into())),
        }
    }

    // Columns are the powers, rows the coefficients of x^0..x^bound.
    let rows: Vec<Vec<u64>> = (0..=bound)
        .map(|c| powers.iter().map(|p| p.coeff(c).value()).collect())
        .collect();
    let rhs: Vec<u64> = (0..=bound).map(|c| f.coeff(c).value()).collect();
    let alphas = linalg::solve(&field, &rows, &rhs, powers.len())
        .ok_or_else(|| Error::NotInClass("input is not in the span of the recovered powers".into()))?;
    let mut terms = Vec::with_capacity(order);
    for (g, a) in bases.into_iter().zip(alphas) {
        if a == 0 {
            return Err(Error::NotInClass("recovered representation is not minimal".into()));
        }
        terms.push(PowerTermUni::new(field.elem(a), g)?);
    }
    PowCircuitUni::new(field, d, terms)
}
