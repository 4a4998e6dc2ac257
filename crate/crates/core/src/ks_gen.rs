//! Klivans-Spielman substitutions and the erasure-tolerant interpolating set.
//!
//! `Psi_{k,q}` sends `x_i` to `y^(k^(i-1) mod q)`. The robust set evaluates
//! that map (and a variant with coordinate `j` scaled by a high-order
//! element `lambda`) at many abscissae `alpha`, so that a sparse polynomial
//! can be decoded even after a fraction of the evaluations is lost.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, Write};

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::field::{find_high_order_element, find_prime_in_range, next_prime, FpElem, PrimeField};
use crate::poly::{interpolate_univariate, ExponentVector, SparsePoly, UniPoly};

/// `k^(i-1) mod q` for `i = 1..=n`.
pub fn ks_weights(n: usize, k: u64, q: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut w = 1 % q;
    for _ in 0..n {
        out.push(w);
        w = (w as u128 * k as u128 % q as u128) as u64;
    }
    out
}

/// Exponent of `y` in `Psi_{k,q}(x^e)`.
pub fn psi_exponent(e: &ExponentVector, k: u64, q: u64) -> u64 {
    e.exps()
        .iter()
        .zip(ks_weights(e.len(), k, q))
        .map(|(&ei, w)| ei as u64 * w)
        .sum()
}

/// The univariate image `Psi_{k,q}(f)`.
pub fn psi_apply(f: &SparsePoly, k: u64, q: u64) -> UniPoly {
    let field = f.field();
    let weights = ks_weights(f.nvars(), k, q);
    let mut coeffs: BTreeMap<usize, FpElem> = BTreeMap::new();
    for (e, &c) in f.terms() {
        let m: u64 = e.exps().iter().zip(&weights).map(|(&ei, &w)| ei as u64 * w).sum();
        let slot = coeffs.entry(m as usize).or_insert_with(|| field.zero());
        *slot += c;
    }
    let deg = coeffs.keys().next_back().copied().unwrap_or(0);
    let mut dense = vec![field.zero(); deg + 1];
    for (m, c) in coeffs {
        dense[m] = c;
    }
    UniPoly::new(field, dense)
}

/// The point `(alpha^(k^0 mod q), ..., alpha^(k^(n-1) mod q))`, with
/// coordinate `j` (1-based) additionally multiplied by `scale`.
pub fn ks_point(n: usize, k: u64, q: u64, alpha: FpElem, scaled: Option<(usize, FpElem)>) -> Vec<FpElem> {
    let mut pt: Vec<FpElem> = ks_weights(n, k, q).into_iter().map(|w| alpha.pow(w)).collect();
    if let Some((j, lambda)) = scaled {
        pt[j - 1] *= lambda;
    }
    pt
}

/// Identifies one point of a [`RobustSet`]. `alpha` is the canonical
/// residue used as abscissa; `j` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointTag {
    Plain { k: u64, alpha: u64 },
    Scaled { j: usize, k: u64, alpha: u64 },
}

impl PointTag {
    pub fn k(&self) -> u64 {
        match *self {
            PointTag::Plain { k, .. } | PointTag::Scaled { k, .. } => k,
        }
    }

    pub fn alpha(&self) -> u64 {
        match *self {
            PointTag::Plain { alpha, .. } | PointTag::Scaled { alpha, .. } => alpha,
        }
    }

    /// 0 for the plain block, `j` for the block scaling coordinate `j`.
    fn block(&self) -> usize {
        match *self {
            PointTag::Plain { .. } => 0,
            PointTag::Scaled { j, .. } => j,
        }
    }
}

/// Source of (possibly erased) evaluations for [`robust_decode`].
pub trait EvalSource {
    fn get(&self, tag: &PointTag) -> Option<FpElem>;

    /// Number of available evaluations, when cheaply known.
    fn available(&self) -> Option<usize> {
        None
    }
}

impl<F: Fn(&PointTag) -> Option<FpElem>> EvalSource for F {
    fn get(&self, tag: &PointTag) -> Option<FpElem> {
        self(tag)
    }
}

impl EvalSource for HashMap<PointTag, FpElem> {
    fn get(&self, tag: &PointTag) -> Option<FpElem> {
        HashMap::get(self, tag).copied()
    }

    fn available(&self) -> Option<usize> {
        Some(self.len())
    }
}

impl EvalSource for BTreeMap<PointTag, FpElem> {
    fn get(&self, tag: &PointTag) -> Option<FpElem> {
        BTreeMap::get(self, tag).copied()
    }

    fn available(&self) -> Option<usize> {
        Some(self.len())
    }
}

/// The prime `q` and abscissa count `|A|` of the robust set, which do not
/// depend on the field.
///
/// `q` is the smallest prime with `2 delta s^2 n^2 / eps < q < 4 delta s^2 n^2 / eps`
/// and `|A| = ceil(2 n delta q / eps)`.
pub fn robust_params(n: usize, s: usize, delta: usize, eps: Ratio<u64>) -> Result<(u64, usize)> {
    if n == 0 || s == 0 || delta == 0 {
        return Err(Error::Parameter("robust set needs n, s, delta >= 1".into()));
    }
    if *eps.numer() == 0 {
        return Err(Error::Parameter("robust set needs eps > 0".into()));
    }
    let (n64, s64, d64) = (n as u64, s as u64, delta as u64);
    let lower = Ratio::from_integer(2 * d64 * s64 * s64 * n64 * n64) / eps;
    let upper = lower * 2;
    let lo = lower.floor().to_integer() + 1;
    let hi = upper.ceil().to_integer() - 1;
    let q = find_prime_in_range(lo.max(2), hi)?;
    let a_size = (Ratio::from_integer(2 * n64 * d64 * q) / eps).ceil().to_integer();
    Ok((q, a_size as usize))
}

/// Smallest prime field that supports a robust set with these sizes.
pub fn robust_min_prime(delta: usize, q: u64, a_size: usize) -> u64 {
    let need = (a_size as u64 + 1).max(delta as u64 * q + 2);
    next_prime(need).expect("prime below 2^62")
}

/// The robust interpolating set. Points are not stored: the `i`-th point is
/// recomputed from its tag. Canonical order is `k` ascending, then the plain
/// block followed by the scaled blocks `j = 1..=n`, then `alpha` ascending.
#[derive(Clone, Debug)]
pub struct RobustSet {
    field: PrimeField,
    n: usize,
    s: usize,
    delta: usize,
    eps: Ratio<u64>,
    q: u64,
    a_size: usize,
    lambda: FpElem,
    theorem_sized: bool,
}

impl RobustSet {
    /// Builds the set with the sizes of the construction.
    pub fn build(field: PrimeField, n: usize, s: usize, delta: usize, eps: Ratio<u64>) -> Result<Self> {
        let (q, a_size) = robust_params(n, s, delta, eps)?;
        let mut set = Self::with_sizes(field, n, s, delta, q, a_size)?;
        set.eps = eps;
        set.theorem_sized = true;
        Ok(set)
    }

    /// Builds a set with explicit `q` and `|A|`, below the construction's
    /// constants. The recorded `eps` is the one these sizes correspond to.
    pub fn with_sizes(field: PrimeField, n: usize, s: usize, delta: usize, q: u64, a_size: usize) -> Result<Self> {
        if n == 0 || s == 0 || delta == 0 || q < 2 || a_size == 0 {
            return Err(Error::Parameter("robust set needs n, s, delta, |A| >= 1 and q >= 2".into()));
        }
        let min_p = robust_min_prime(delta, q, a_size);
        if field.modulus() < min_p {
            return Err(Error::UnsupportedField {
                reason: format!(
                    "robust set with q = {q} and |A| = {a_size} needs {a_size} distinct abscissae and an element of order > {}",
                    delta as u64 * q
                ),
                min_p,
            });
        }
        let lambda = find_high_order_element(field, delta as u64 * q)?;
        let eps = Ratio::new(2 * (n * delta) as u64 * q, a_size as u64);
        Ok(RobustSet { field, n, s, delta, eps, q, a_size, lambda, theorem_sized: false })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn s(&self) -> usize {
        self.s
    }
    pub fn delta(&self) -> usize {
        self.delta
    }
    pub fn eps(&self) -> Ratio<u64> {
        self.eps
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn lambda(&self) -> FpElem {
        self.lambda
    }
    pub fn a_size(&self) -> usize {
        self.a_size
    }

    /// Whether the sizes come from the construction and `eps < 1/(50 n)`,
    /// the range in which decoding from any `(1 - eps)` fraction is proven.
    pub fn in_proof_regime(&self) -> bool {
        self.theorem_sized && self.eps * Ratio::from_integer(50 * self.n as u64) < Ratio::from_integer(1)
    }

    /// `(n + 1)(q - 1)|A|`.
    pub fn len(&self) -> usize {
        (self.n + 1) * (self.q as usize - 1) * self.a_size
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn tag(&self, index: usize) -> PointTag {
        assert!(index < self.len(), "robust set index out of range");
        let per_k = (self.n + 1) * self.a_size;
        let k = (index / per_k) as u64 + 1;
        let block = (index % per_k) / self.a_size;
        let alpha = (index % self.a_size) as u64 + 1;
        if block == 0 {
            PointTag::Plain { k, alpha }
        } else {
            PointTag::Scaled { j: block, k, alpha }
        }
    }

    pub fn index_of(&self, tag: &PointTag) -> Option<usize> {
        let (k, alpha, block) = (tag.k(), tag.alpha(), tag.block());
        if k == 0 || k >= self.q || alpha == 0 || alpha > self.a_size as u64 || block > self.n {
            return None;
        }
        let per_k = (self.n + 1) * self.a_size;
        Some((k as usize - 1) * per_k + block * self.a_size + alpha as usize - 1)
    }

    pub fn contains(&self, tag: &PointTag) -> bool {
        self.index_of(tag).is_some()
    }

    pub fn point_of(&self, tag: &PointTag) -> Vec<FpElem> {
        let alpha = self.field.elem(tag.alpha());
        let scaled = match *tag {
            PointTag::Plain { .. } => None,
            PointTag::Scaled { j, .. } => Some((j, self.lambda)),
        };
        ks_point(self.n, tag.k(), self.q, alpha, scaled)
    }

    pub fn point(&self, index: usize) -> Vec<FpElem> {
        self.point_of(&self.tag(index))
    }

    pub fn tags(&self) -> impl Iterator<Item = PointTag> + '_ {
        (0..self.len()).map(|i| self.tag(i))
    }

    /// Tags of one `(k, block)` slice in `alpha` order; block 0 is plain.
    pub fn block_tags(&self, k: u64, block: usize) -> impl Iterator<Item = PointTag> {
        let a = self.a_size as u64;
        (1..=a).map(move |alpha| {
            if block == 0 {
                PointTag::Plain { k, alpha }
            } else {
                PointTag::Scaled { j: block, k, alpha }
            }
        })
    }

    /// Line-oriented text export; coordinates are implied by the tags.
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "robustset n={} s={} delta={} eps_num={} eps_den={} p={} q={} lambda={}",
            self.n,
            self.s,
            self.delta,
            self.eps.numer(),
            self.eps.denom(),
            self.field.modulus(),
            self.q,
            self.lambda
        )?;
        for tag in self.tags() {
            match tag {
                PointTag::Plain { k, alpha } => writeln!(w, "plain k={k} alpha={alpha}")?,
                PointTag::Scaled { j, k, alpha } => writeln!(w, "scaled j={j} k={k} alpha={alpha}")?,
            }
        }
        Ok(())
    }
}

/// Surviving `(alpha, value)` pairs of one block, stopping once `want`
/// are collected.
fn survivors<S: EvalSource + ?Sized>(
    set: &RobustSet,
    evals: &S,
    k: u64,
    block: usize,
    want: usize,
) -> Vec<(FpElem, FpElem)> {
    let mut out = Vec::with_capacity(want);
    for tag in set.block_tags(k, block) {
        if let Some(v) = evals.get(&tag) {
            out.push((set.field.elem(tag.alpha()), v));
            if out.len() == want {
                break;
            }
        }
    }
    out
}

enum Attempt {
    Decoded(SparsePoly),
    /// Block counts too small to interpolate.
    Sparse,
    /// Enough data, but the readout or the cross-check failed.
    Rejected(String),
}

/// Recovers the `s`-sparse polynomial of degree at most `delta` whose
/// evaluations on the set are given, tolerating missing entries.
///
/// Scans `k = 1, 2, ...` and uses the first `k` whose blocks each keep more
/// than `delta * q` evaluations and whose exponent readout is consistent.
/// A candidate is accepted only after it matches the plain blocks of
/// enough further `k` to rule out a monomial collision at `k`.
pub fn robust_decode<S: EvalSource + ?Sized>(set: &RobustSet, evals: &S) -> Result<SparsePoly> {
    if let Some(avail) = evals.available() {
        let total = set.len() as u64;
        let need = (Ratio::from_integer(1) - set.eps) * Ratio::from_integer(total);
        if Ratio::from_integer(avail as u64) < need {
            return Err(Error::DecodeFailure(format!(
                "only {avail} of {total} evaluations available"
            )));
        }
    }
    let mut last_rejection = None;
    for k in 1..set.q {
        match decode_at(set, evals, k)? {
            Attempt::Decoded(f) => return Ok(f),
            Attempt::Sparse => {}
            Attempt::Rejected(why) => last_rejection = Some(why),
        }
    }
    Err(match last_rejection {
        Some(why) => Error::Inconsistent(why),
        None => Error::DecodeFailure(format!(
            "no k in [1, {}] keeps more than {} evaluations in every block",
            set.q - 1,
            set.delta as u64 * set.q
        )),
    })
}

fn decode_at<S: EvalSource + ?Sized>(set: &RobustSet, evals: &S, k: u64) -> Result<Attempt> {
    let field = set.field;
    let q = set.q;
    let bound = set.delta * (q as usize - 1);
    let want = set.delta * q as usize + 1;
    let mut images = Vec::with_capacity(set.n + 1);
    for block in 0..=set.n {
        let pts = survivors(set, evals, k, block, want);
        if pts.len() < want {
            return Ok(Attempt::Sparse);
        }
        match interpolate_univariate(&pts, bound) {
            Ok(g) => images.push(g),
            Err(Error::Inconsistent(why)) => return Ok(Attempt::Rejected(why)),
            Err(e) => return Err(e),
        }
    }

    // Powers lambda^0..lambda^delta for the exponent readout.
    let lambda_pows: Vec<FpElem> = (0..=set.delta as u64).map(|e| set.lambda.pow(e)).collect();
    let plain = &images[0];
    let mut terms = Vec::new();
    for (m, c) in plain.coeffs().into_iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut exps = Vec::with_capacity(set.n);
        for img in &images[1..] {
            let ratio = img.coeff(m) / c;
            match lambda_pows.iter().position(|&l| l == ratio) {
                Some(e) => exps.push(e as u32),
                None => {
                    return Ok(Attempt::Rejected(format!(
                        "k = {k}: coefficient ratio {ratio} at y^{m} is not a power lambda^e with e <= {}",
                        set.delta
                    )))
                }
            }
        }
        let e = ExponentVector::new(exps);
        if e.total_degree() > set.delta || psi_exponent(&e, k, q) != m as u64 {
            return Ok(Attempt::Rejected(format!("k = {k}: exponent readout at y^{m} is inconsistent")));
        }
        terms.push((e, c));
    }
    for (m, img) in images[1..].iter().enumerate() {
        let extra = (0..img.raw().len()).any(|i| !img.coeff(i).is_zero() && plain.coeff(i).is_zero());
        if extra {
            return Ok(Attempt::Rejected(format!("k = {k}: block j = {} has extra monomials", m + 1)));
        }
    }
    if terms.len() > set.s {
        return Ok(Attempt::Rejected(format!("k = {k}: {} monomials exceed sparsity {}", terms.len(), set.s)));
    }
    let cand = SparsePoly::from_terms(field, set.n, terms);
    if !cross_check(set, evals, k, &cand)? {
        return Ok(Attempt::Rejected(format!("k = {k}: candidate disagrees with other blocks")));
    }
    Ok(Attempt::Decoded(cand))
}

/// Compares `cand` with the plain blocks of other `k'`. A wrong candidate
/// differs from the truth by a nonzero `2s`-sparse polynomial, whose image
/// vanishes for at most `(2s - 1)(n - 1)` values of `k'`; on any other `k'`
/// it cannot vanish on `delta (q - 1) + 1` abscissae.
fn cross_check<S: EvalSource + ?Sized>(set: &RobustSet, evals: &S, k: u64, cand: &SparsePoly) -> Result<bool> {
    let want = set.delta * (set.q as usize - 1) + 1;
    let needed_blocks = (2 * set.s - 1) * (set.n - 1) + 1;
    let mut full_blocks = 0;
    for k2 in (1..set.q).filter(|&k2| k2 != k) {
        if full_blocks == needed_blocks {
            break;
        }
        let pts = survivors(set, evals, k2, 0, want);
        if pts.len() == want {
            full_blocks += 1;
        }
        let img = psi_apply(cand, k2, set.q);
        if pts.iter().any(|&(a, v)| img.eval(a) != v) {
            return Ok(false);
        }
    }
    Ok(true)
}
