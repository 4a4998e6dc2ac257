//! Recovery of sums of powers from black-box access.
//!
//! [`dfs_recover`] extracts the individual powers `f_i^d` from the kernel of
//! the annihilating operator, [`reconstruct_univariate`] wraps it into the
//! full univariate algorithm and [`reconstruct_multivariate`] lifts that to
//! `n` variables by restricting to lines and re-interpolating each base.

mod dfs;
mod multivariate;
mod univariate;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{FpElem, PrimeField};
use crate::poly::{ExponentVector, SparsePoly, UniPoly};

pub use dfs::{brute_force_recover, dfs_recover, dfs_recover_with_stats, DfsOutcome};
pub use multivariate::{
    profile_sizes, reconstruct_multivariate, reconstruct_multivariate_with_report, AnchorStat, MultiReport,
    Profile, ProfileSizes,
};
pub use univariate::{reconstruct_univariate, reconstruct_univariate_oracle, univariate_regime};

/// One term `alpha * base^d` of a univariate circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerTermUni {
    pub alpha: FpElem,
    pub base: UniPoly,
}

impl PowerTermUni {
    pub fn new(alpha: FpElem, base: UniPoly) -> Result<Self> {
        if alpha.is_zero() {
            return Err(Error::Parameter("term with zero coefficient".into()));
        }
        if !base.is_monic() {
            return Err(Error::Parameter(format!("term base {base} is not monic")));
        }
        Ok(PowerTermUni { alpha, base })
    }
}

/// `sum alpha_i * base_i^d` with distinct monic bases, sorted by base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowCircuitUni {
    field: PrimeField,
    d: usize,
    terms: Vec<PowerTermUni>,
}

impl PowCircuitUni {
    pub fn new(field: PrimeField, d: usize, mut terms: Vec<PowerTermUni>) -> Result<Self> {
        if terms.iter().any(|t| t.base.field() != field || t.alpha.field() != field) {
            return Err(Error::Parameter("circuit terms over different fields".into()));
        }
        terms.sort_by(|a, b| a.base.cmp(&b.base));
        if terms.windows(2).any(|w| w[0].base == w[1].base) {
            return Err(Error::Parameter("circuit has repeated bases".into()));
        }
        Ok(PowCircuitUni { field, d, terms })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &[PowerTermUni] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn expand(&self) -> UniPoly {
        self.terms.iter().fold(UniPoly::zero(self.field), |acc, t| {
            &acc + &t.base.pow(self.d as u64).scale(t.alpha)
        })
    }

    pub fn eval(&self, x: FpElem) -> FpElem {
        self.terms
            .iter()
            .fold(self.field.zero(), |acc, t| acc + t.alpha * t.base.eval(x).pow(self.d as u64))
    }
}

/// One term `lambda * base^d` of a multivariate circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerTermMulti {
    pub lambda: FpElem,
    pub base: SparsePoly,
}

/// `sum lambda_i * base_i^d` over `F_p^n`.
///
/// Terms are stored canonically: every base has graded-lex leading
/// coefficient 1 (the scalar moves into `lambda`) and bases are sorted by
/// their descending term lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowCircuitMulti {
    field: PrimeField,
    n: usize,
    d: usize,
    terms: Vec<PowerTermMulti>,
}

/// Descending graded-lex term list, used as the sort key for bases.
fn base_key(g: &SparsePoly) -> Vec<(ExponentVector, u64)> {
    g.terms().rev().map(|(e, c)| (e.clone(), c.value())).collect()
}

/// Canonical order of two sparse polynomials: descending term lists
/// compared lexicographically.
pub fn sparse_canonical_cmp(a: &SparsePoly, b: &SparsePoly) -> Ordering {
    base_key(a).cmp(&base_key(b))
}

impl PowCircuitMulti {
    /// Normalizes and sorts the terms; rejects zero coefficients, zero
    /// bases and associate bases.
    pub fn new(field: PrimeField, n: usize, d: usize, terms: Vec<PowerTermMulti>) -> Result<Self> {
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            if t.base.field() != field || t.lambda.field() != field || t.base.nvars() != n {
                return Err(Error::Parameter("circuit term does not match field or variable count".into()));
            }
            if t.lambda.is_zero() {
                return Err(Error::Parameter("term with zero coefficient".into()));
            }
            let lc = t
                .base
                .leading_coeff()
                .ok_or_else(|| Error::Parameter("term with zero base".into()))?;
            out.push(PowerTermMulti {
                lambda: t.lambda * lc.pow(d as u64),
                base: t.base.monic(),
            });
        }
        out.sort_by(|a, b| sparse_canonical_cmp(&a.base, &b.base));
        if out.windows(2).any(|w| w[0].base == w[1].base) {
            return Err(Error::Parameter("circuit has associate bases".into()));
        }
        Ok(PowCircuitMulti { field, n, d, terms: out })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &[PowerTermMulti] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest sparsity among the bases.
    pub fn max_sparsity(&self) -> usize {
        self.terms.iter().map(|t| t.base.sparsity()).max().unwrap_or(0)
    }

    /// Largest total degree among the bases.
    pub fn max_degree(&self) -> usize {
        self.terms.iter().filter_map(|t| t.base.degree()).max().unwrap_or(0)
    }

    /// The polynomial as a sparse expansion.
    pub fn expand(&self) -> SparsePoly {
        self.terms.iter().fold(SparsePoly::zero(self.field, self.n), |acc, t| {
            acc.add(&t.base.pow(self.d as u64).scale(t.lambda))
        })
    }

    pub fn eval(&self, point: &[FpElem]) -> Result<FpElem> {
        let mut acc = self.field.zero();
        for t in &self.terms {
            acc += t.lambda * t.base.eval(point)?.pow(self.d as u64);
        }
        Ok(acc)
    }
}

/// Univariate output for one line `(u, v)`, with label
/// `lambda * h(0)^d` attached to each pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledUniOutput {
    pub d: usize,
    pub pairs: Vec<(FpElem, UniPoly)>,
}

impl LabeledUniOutput {
    pub fn from_circuit(c: &PowCircuitUni) -> Self {
        LabeledUniOutput {
            d: c.d(),
            pairs: c.terms().iter().map(|t| (t.alpha, t.base.clone())).collect(),
        }
    }

    pub fn labels(&self) -> Vec<FpElem> {
        self.pairs.iter().map(|(l, h)| self.label_of(*l, h)).collect()
    }

    fn label_of(&self, lambda: FpElem, h: &UniPoly) -> FpElem {
        lambda * h.eval(lambda.field().zero()).pow(self.d as u64)
    }

    /// Whether all labels are nonzero and pairwise distinct and every
    /// `h(0)` is nonzero.
    pub fn labels_usable(&self) -> bool {
        let mut labels = self.labels();
        if labels.iter().any(FpElem::is_zero) {
            return false;
        }
        if self.pairs.iter().any(|(l, h)| h.eval(l.field().zero()).is_zero()) {
            return false;
        }
        labels.sort_by_key(FpElem::value);
        labels.windows(2).all(|w| w[0] != w[1])
    }

    fn sorted_by_label(&self) -> Self {
        let mut pairs = self.pairs.clone();
        pairs.sort_by_key(|(l, h)| self.label_of(*l, h).value());
        LabeledUniOutput { d: self.d, pairs }
    }
}

/// Reorders every output so position `i` carries the `i`-th smallest label.
/// All outputs must have the same label set with distinct labels.
pub fn align_by_labels<K: Ord + Clone>(
    outputs: &BTreeMap<K, LabeledUniOutput>,
) -> Result<BTreeMap<K, LabeledUniOutput>> {
    let mut reference: Option<Vec<FpElem>> = None;
    let mut out = BTreeMap::new();
    for (key, o) in outputs {
        let sorted = o.sorted_by_label();
        let labels = sorted.labels();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Alignment("duplicate label within one output".into()));
        }
        match &reference {
            None => reference = Some(labels),
            Some(r) if *r != labels => {
                return Err(Error::Alignment("label sets differ between outputs".into()));
            }
            Some(_) => {}
        }
        out.insert(key.clone(), sorted);
    }
    Ok(out)
}
