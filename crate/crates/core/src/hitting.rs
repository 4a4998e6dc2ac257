//! Explicit hitting sets for sums of powers of sparse polynomials and a
//! black-box identity test over them.
//!
//! For `k = 1..=t` the set contains `Psi_{k,q}[alpha]` for the first `m_k`
//! residues `alpha = 0, 1, ...`. A nonzero circuit in the class has a nonzero
//! univariate image for all but few `k`, and each nonzero image of degree at
//! most `delta q d` vanishes on at most an `eps/2` fraction of its abscissae.

use std::io::{self, Write};

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{find_prime_in_range, next_prime, FpElem, PrimeField};
use crate::ks_gen::ks_point;

/// Size parameters that do not depend on the field: `(q, t, m_k)`.
///
/// `q` is the smallest prime in `[r^2 s^2 n + delta + 1, 2 r^2 s^2 n + 2 delta]`,
/// `t = 2 r^2 s^2 n + 2 delta + 1` and `m_k = ceil(delta q d / (eps / 2))`.
pub fn hitting_params(
    n: usize,
    r: usize,
    s: usize,
    d: usize,
    delta: usize,
    eps: Ratio<u64>,
) -> Result<(u64, u64, u64)> {
    if n == 0 || r == 0 || s == 0 || d == 0 || delta == 0 {
        return Err(Error::Parameter("hitting set needs n, r, s, d, delta >= 1".into()));
    }
    if *eps.numer() == 0 || eps > Ratio::new(1, 2) {
        return Err(Error::UnsupportedParameters(format!(
            "hitting set needs 0 < eps <= 1/2, got {eps}"
        )));
    }
    if (r - 1) * (r - 1) > d + 1 {
        return Err(Error::UnsupportedParameters(format!(
            "hitting set needs (r-1)^2 <= d+1, got r = {r}, d = {d}"
        )));
    }
    let base = (r * r * s * s * n) as u64;
    let dl = delta as u64;
    let q = find_prime_in_range(base + dl + 1, 2 * base + 2 * dl)?;
    let t = 2 * base + 2 * dl + 1;
    let internal = eps / 2;
    let mk = (Ratio::from_integer(dl * q * d as u64) / internal).ceil().to_integer();
    Ok((q, t, mk))
}

/// Smallest prime `p` accepted by [`HittingSet::build`] for these parameters.
pub fn min_field_prime(n: usize, r: usize, s: usize, d: usize, delta: usize, eps: Ratio<u64>) -> Result<u64> {
    let (q, _, mk) = hitting_params(n, r, s, d, delta, eps)?;
    let (r64, d64, dl) = (r as u64, d as u64, delta as u64);
    let need = [
        r64 * d64 * dl * ((s * s * n) as u64 + dl),
        r64 * d64 * dl * q + 1,
        mk,
        3,
    ];
    next_prime(need.into_iter().max().expect("nonempty"))
}

/// Verdict of [`pit_test`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Zero,
    NonZero { point: Vec<FpElem>, value: FpElem },
}

/// The hitting set with its generation parameters. Points are recomputed
/// on demand in canonical order: `k` ascending, then `alpha` ascending.
#[derive(Clone, Debug)]
pub struct HittingSet {
    field: PrimeField,
    n: usize,
    r: usize,
    s: usize,
    d: usize,
    delta: usize,
    eps: Ratio<u64>,
    q: u64,
    t: u64,
    mk: u64,
}

impl HittingSet {
    pub fn build(
        field: PrimeField,
        n: usize,
        r: usize,
        s: usize,
        d: usize,
        delta: usize,
        eps: Ratio<u64>,
    ) -> Result<Self> {
        let (q, t, mk) = hitting_params(n, r, s, d, delta, eps)?;
        let p = field.modulus();
        let (r64, d64, dl) = (r as u64, d as u64, delta as u64);
        let checks = [
            (
                p >= r64 * d64 * dl * ((s * s * n) as u64 + dl),
                "p >= r d delta (s^2 n + delta)",
            ),
            (p > r64 * d64 * dl * q, "p > r d delta q"),
            (p >= mk, "p >= m_k (distinct abscissae per k)"),
        ];
        for (ok, what) in checks {
            if !ok {
                return Err(Error::UnsupportedParameters(format!(
                    "hitting set needs {what}; p = {p}, q = {q}, m_k = {mk}, smallest valid p = {}",
                    min_field_prime(n, r, s, d, delta, eps)?
                )));
            }
        }
        Ok(HittingSet { field, n, r, s, d, delta, eps, q, t, mk })
    }

    /// A set over `k = 1..=t` with `m` abscissae each, skipping the size
    /// and field checks. Used for small anchor sets.
    pub fn with_sizes(field: PrimeField, n: usize, q: u64, t: u64, m: u64) -> Result<Self> {
        if m > field.modulus() || t == 0 || m == 0 || q < 2 {
            return Err(Error::Parameter(format!(
                "hitting set with t = {t}, m = {m} over F_{}",
                field.modulus()
            )));
        }
        Ok(HittingSet {
            field,
            n,
            r: 0,
            s: 0,
            d: 0,
            delta: 0,
            eps: Ratio::from_integer(0),
            q,
            t,
            mk: m,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn t(&self) -> u64 {
        self.t
    }
    pub fn mk(&self) -> u64 {
        self.mk
    }
    pub fn eps(&self) -> Ratio<u64> {
        self.eps
    }

    /// `t * m_k`.
    pub fn len(&self) -> usize {
        (self.t * self.mk) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(k, alpha)` of the `i`-th point.
    pub fn tag(&self, i: usize) -> (u64, u64) {
        assert!(i < self.len(), "hitting set index out of range");
        (i as u64 / self.mk + 1, i as u64 % self.mk)
    }

    pub fn point(&self, i: usize) -> Vec<FpElem> {
        let (k, alpha) = self.tag(i);
        ks_point(self.n, k, self.q, self.field.elem(alpha), None)
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<FpElem>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "hittingset n={} r={} s={} d={} delta={} eps_num={} eps_den={} p={} q={} t={} mk={}",
            self.n,
            self.r,
            self.s,
            self.d,
            self.delta,
            self.eps.numer(),
            self.eps.denom(),
            self.field.modulus(),
            self.q,
            self.t,
            self.mk
        )?;
        for i in 0..self.len() {
            let (k, alpha) = self.tag(i);
            writeln!(w, "plain k={k} alpha={alpha}")?;
        }
        Ok(())
    }
}

/// Evaluates the oracle over the set and reports the first nonzero point.
pub fn pit_test<F>(hs: &HittingSet, oracle: F) -> Result<Verdict>
where
    F: Fn(&[FpElem]) -> Result<FpElem>,
{
    for i in 0..hs.len() {
        let point = hs.point(i);
        let value = oracle(&point)?;
        if !value.is_zero() {
            return Ok(Verdict::NonZero { point, value });
        }
    }
    Ok(Verdict::Zero)
}

/// Same verdict as [`pit_test`], evaluating on the current rayon pool. The
/// witness is still the first nonzero point in canonical order.
pub fn pit_test_parallel<F>(hs: &HittingSet, oracle: F) -> Result<Verdict>
where
    F: Fn(&[FpElem]) -> Result<FpElem> + Sync,
{
    let hit = (0..hs.len()).into_par_iter().find_map_first(|i| {
        let point = hs.point(i);
        match oracle(&point) {
            Ok(v) if v.is_zero() => None,
            Ok(value) => Some(Ok(Verdict::NonZero { point, value })),
            Err(e) => Some(Err(e)),
        }
    });
    hit.unwrap_or(Ok(Verdict::Zero))
}

/// Number of points on which the oracle is nonzero.
pub fn nonzero_count<F>(hs: &HittingSet, oracle: F) -> Result<usize>
where
    F: Fn(&[FpElem]) -> Result<FpElem>,
{
    let mut count = 0;
    for i in 0..hs.len() {
        if !oracle(&hs.point(i))?.is_zero() {
            count += 1;
        }
    }
    Ok(count)
}
