//! Extraction of the individual powers from the kernel of the annihilator.

use crate::diffop::{subspace_with_factor, KernelBasis};
use crate::error::{Error, Result};
use crate::poly::UniPoly;

/// Exhaustive search: every monic `g = prod phi_j^{e_j}` with
/// `sum e_j deg phi_j <= delta` and `g^d` in the span of `kb`.
pub fn brute_force_recover(kb: &KernelBasis, factors: &[UniPoly], d: usize, delta: usize) -> Vec<UniPoly> {
    let field = kb.field();
    let mut out = Vec::new();
    let mut stack = vec![(0usize, UniPoly::one(field), 0usize)];
    while let Some((j, g, deg)) = stack.pop() {
        if j == factors.len() {
            if kb.contains(&g.pow(d as u64)) {
                out.push(g);
            }
            continue;
        }
        let step = factors[j].degree().unwrap_or(0).max(1);
        let mut cur = g;
        let mut cur_deg = deg;
        while cur_deg <= delta {
            stack.push((j + 1, cur.clone(), cur_deg));
            cur = &cur * &factors[j];
            cur_deg += step;
        }
    }
    out.sort();
    out
}

/// Output of [`dfs_recover_with_stats`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DfsOutcome {
    /// The recovered powers, monic and sorted.
    pub powers: Vec<UniPoly>,
    /// Number of descents from a node to a child.
    pub descents: usize,
}

/// The powers `f_i^d` spanning `kb`, found by walking multiplicity
/// vectors over `factors`.
pub fn dfs_recover(kb: &KernelBasis, factors: &[UniPoly], d: usize, delta: usize) -> Result<Vec<UniPoly>> {
    Ok(dfs_recover_with_stats(kb, factors, d, delta)?.powers)
}

/// [`dfs_recover`] together with the number of descents. Fails with an
/// internal-invariant error once the descents exceed `dim(kb) * delta`.
pub fn dfs_recover_with_stats(kb: &KernelBasis, factors: &[UniPoly], d: usize, delta: usize) -> Result<DfsOutcome> {
    if factors.iter().any(|phi| phi.is_constant() || phi.field() != kb.field()) {
        return Err(Error::Parameter("factors must be nonconstant and over the kernel's field".into()));
    }
    let factor_powers: Vec<UniPoly> = factors.iter().map(|phi| phi.pow(d as u64)).collect();
    let mut walk = Walk {
        factors,
        factor_powers: &factor_powers,
        d,
        found: Vec::new(),
        descents: 0,
        budget: kb.dim() * delta,
    };
    walk.visit(&UniPoly::one(kb.field()), kb.clone())?;
    let mut powers = walk.found;
    powers.sort();
    Ok(DfsOutcome { powers, descents: walk.descents })
}

struct Walk<'a> {
    factors: &'a [UniPoly],
    factor_powers: &'a [UniPoly],
    d: usize,
    found: Vec<UniPoly>,
    descents: usize,
    budget: usize,
}

impl Walk<'_> {
    fn emit(&mut self, g: UniPoly) {
        if !self.found.contains(&g) {
            self.found.push(g);
        }
    }

    /// `prefix = prod phi_j^{e_j}`; `b` spans the elements of the current
    /// space divided by `prefix^d`.
    fn visit(&mut self, prefix: &UniPoly, b: KernelBasis) -> Result<()> {
        let field = b.field();
        let prefix_d = prefix.pow(self.d as u64);
        match b.dim() {
            0 => return Ok(()),
            1 => {
                self.emit(&prefix_d * &b.basis()[0].monic());
                return Ok(());
            }
            _ => {}
        }
        // The walk only emits at one-dimensional nodes, which misses a
        // power whose base is exactly `prefix` when a multiple of it
        // (in the divisibility order) is also present.
        if b.contains(&UniPoly::one(field)) {
            self.emit(prefix_d.clone());
        }
        for j in 0..self.factors.len() {
            let a = subspace_with_factor(&b, &self.factors[j], self.d)?;
            if a.is_empty() {
                continue;
            }
            let quotients: Vec<UniPoly> = self.found.iter().filter_map(|q| q.exact_div(&prefix_d)).collect();
            let covered = KernelBasis::from_polys(field, b.bound(), &quotients)?;
            if covered.contains_span(&a) {
                continue;
            }
            self.descents += 1;
            if self.descents > self.budget {
                return Err(Error::InternalInvariant(format!(
                    "power recovery exceeded its budget of {} descents",
                    self.budget
                )));
            }
            let step = self.factor_powers[j].degree().expect("nonconstant");
            let reduced: Vec<UniPoly> = a
                .basis()
                .iter()
                .map(|g| g.exact_div(&self.factor_powers[j]).expect("divisible by construction"))
                .collect();
            let child = KernelBasis::from_polys(field, b.bound() - step, &reduced)?;
            self.visit(&(prefix * &self.factors[j]), child)?;
        }
        Ok(())
    }
}
