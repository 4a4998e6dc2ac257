use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{next_prime, FpElem, PrimeField};
use crate::hitting::{hitting_params, pit_test, HittingSet, Verdict};
use crate::ks_gen::{robust_decode, PointTag, RobustSet};

use super::univariate::{reconstruct_univariate_oracle, univariate_regime};
use super::{align_by_labels, LabeledUniOutput, PowCircuitMulti, PowerTermMulti};

/// Sizes of the anchor and direction sets.
///
/// `Theorem` uses the constants under which the algorithm is proved
/// correct. Their sets are large and need big fields. `Fast` keeps the
/// same structure with small sets: 4 x 4 anchor points, a direction set
/// with `q` the smallest prime above `delta s^2 n` and `4 delta q`
/// abscissae, and an acceptance threshold of half the directions per
/// label pair. `Fast` carries no correctness guarantee; a wrong answer
/// shows up as an error or fails verification.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Profile {
    Theorem,
    #[default]
    Fast,
}

/// Point counts of the two sets for a profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProfileSizes {
    pub anchors: usize,
    pub directions: usize,
}

impl ProfileSizes {
    pub fn pairs(&self) -> usize {
        self.anchors * self.directions
    }
}

struct Sets {
    anchors: HittingSet,
    directions: RobustSet,
    /// `eps` in the threshold `(1 - eps C(r,2)) |directions|`.
    threshold_eps: Ratio<u64>,
}

fn build_sets(field: PrimeField, n: usize, r: usize, s: usize, d: usize, delta: usize, profile: Profile) -> Result<Sets> {
    let r64 = r as u64;
    match profile {
        Profile::Theorem => {
            let anchors = HittingSet::build(field, n, 2, 2 * s, d, delta, Ratio::new(1, 2 * r64 * r64))?;
            let eps = Ratio::new(1, 100 * n as u64 * r64 * r64);
            let directions = RobustSet::build(field, n, s, delta, eps)?;
            Ok(Sets { anchors, directions, threshold_eps: eps })
        }
        Profile::Fast => {
            let (q1, _, _) = hitting_params(n, 2, 2 * s, d, delta, Ratio::new(1, 2))?;
            let anchors = HittingSet::with_sizes(field, n, q1, 4, 4)?;
            let q2 = next_prime((delta * s * s * n) as u64 + 1)?;
            let directions = RobustSet::with_sizes(field, n, s, delta, q2, 4 * delta * q2 as usize)?;
            let pairs = (r64 * r64.saturating_sub(1) / 2).max(1);
            Ok(Sets { anchors, directions, threshold_eps: Ratio::new(1, 2 * pairs) })
        }
    }
}

/// Set sizes the driver would use, without querying anything.
pub fn profile_sizes(
    field: PrimeField,
    n: usize,
    r: usize,
    s: usize,
    d: usize,
    delta: usize,
    profile: Profile,
) -> Result<ProfileSizes> {
    let sets = build_sets(field, n, r, s, d, delta, profile)?;
    Ok(ProfileSizes { anchors: sets.anchors.len(), directions: sets.directions.len() })
}

/// Per-anchor summary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchorStat {
    pub index: usize,
    /// Largest number of terms recovered on a line through this anchor.
    pub max_terms: usize,
    /// Directions with the full number of terms and usable labels.
    pub good_directions: usize,
}

/// Diagnostics of a multivariate run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiReport {
    pub sizes: ProfileSizes,
    /// Number of terms, the maximum over all processed lines.
    pub r: usize,
    /// Index of the anchor used for decoding.
    pub anchor: Option<usize>,
    /// Anchors processed, in order.
    pub anchors: Vec<AnchorStat>,
    /// Lines on which univariate recovery failed.
    pub failed_lines: usize,
    /// Total oracle evaluations, repeated points included.
    pub oracle_queries: usize,
}

/// Reconstructs `f = sum lambda_i h_i^d` from black-box access, with at
/// most `r` terms whose bases are `s`-sparse of degree at most `delta`.
pub fn reconstruct_multivariate<O>(
    field: PrimeField,
    oracle: &O,
    n: usize,
    r: usize,
    s: usize,
    delta: usize,
    d: usize,
    profile: Profile,
) -> Result<PowCircuitMulti>
where
    O: Fn(&[FpElem]) -> Result<FpElem> + Sync,
{
    Ok(reconstruct_multivariate_with_report(field, oracle, n, r, s, delta, d, profile)?.0)
}

/// The field bound `p >= r d delta (s^2 n + delta)` is enforced for the
/// theorem profile only; the fast profile needs what its sets need.
fn multivariate_regime(
    field: PrimeField,
    n: usize,
    r: usize,
    s: usize,
    d: usize,
    delta: usize,
    profile: Profile,
) -> Result<()> {
    if n == 0 || s == 0 {
        return Err(Error::Parameter("reconstruction needs n, s >= 1".into()));
    }
    univariate_regime(field, r, d, delta)?;
    if profile == Profile::Fast {
        return Ok(());
    }
    let need = (r * d * delta) as u128 * (s * s * n + delta) as u128;
    if (field.modulus() as u128) < need {
        return Err(Error::UnsupportedParameters(format!(
            "reconstruction needs p >= r d delta (s^2 n + delta) = {need}; got p = {}",
            field.modulus()
        )));
    }
    Ok(())
}

/// [`reconstruct_multivariate`] together with run diagnostics.
#[allow(clippy::too_many_arguments)]
pub fn reconstruct_multivariate_with_report<O>(
    field: PrimeField,
    oracle: &O,
    n: usize,
    r: usize,
    s: usize,
    delta: usize,
    d: usize,
    profile: Profile,
) -> Result<(PowCircuitMulti, MultiReport)>
where
    O: Fn(&[FpElem]) -> Result<FpElem> + Sync,
{
    multivariate_regime(field, n, r, s, d, delta, profile)?;
    let queries = AtomicUsize::new(0);
    let counted = |pt: &[FpElem]| -> Result<FpElem> {
        if pt.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: pt.len() });
        }
        queries.fetch_add(1, Ordering::Relaxed);
        oracle(pt)
    };
    let sets = build_sets(field, n, r, s, d, delta, profile)?;
    let sizes = ProfileSizes { anchors: sets.anchors.len(), directions: sets.directions.len() };
    let mut report = MultiReport {
        sizes,
        r: 0,
        anchor: None,
        anchors: Vec::new(),
        failed_lines: 0,
        oracle_queries: 0,
    };

    let precheck_nonzero = match profile {
        Profile::Theorem => {
            let hs = HittingSet::build(field, n, r, s, d, delta, Ratio::new(1, 2))?;
            match pit_test(&hs, counted)? {
                Verdict::Zero => {
                    report.oracle_queries = queries.load(Ordering::Relaxed);
                    return Ok((PowCircuitMulti::new(field, n, d, Vec::new())?, report));
                }
                Verdict::NonZero { .. } => true,
            }
        }
        Profile::Fast => false,
    };

    let directions: Vec<Vec<FpElem>> = sets.directions.tags().map(|t| sets.directions.point_of(&t)).collect();
    let mut lines: Vec<Vec<Option<LabeledUniOutput>>> = Vec::new();
    let mut best_r = 0;
    let mut checked = 0;
    let mut chosen = None;
    for ui in 0..sets.anchors.len() {
        let u = sets.anchors.point(ui);
        let outputs: Vec<Option<LabeledUniOutput>> = directions
            .par_iter()
            .map(|v| recover_line(field, &counted, &u, v, r, d, delta))
            .collect::<Result<_>>()?;
        report.failed_lines += outputs.iter().filter(|o| o.is_none()).count();
        let max_terms = outputs.iter().flatten().map(|o| o.pairs.len()).max().unwrap_or(0);
        best_r = best_r.max(max_terms);
        report.anchors.push(AnchorStat { index: ui, max_terms, good_directions: 0 });
        lines.push(outputs);
        // No line can yield more than r terms, so once r is reached the
        // final maximum is known and earlier anchors can be judged.
        if best_r == r {
            if let Some(found) = first_good_anchor(&mut report, &lines, checked, best_r, &sets) {
                chosen = Some(found);
                break;
            }
            checked = lines.len();
        }
    }
    report.r = best_r;
    if chosen.is_none() && best_r > 0 && best_r < r {
        chosen = first_good_anchor(&mut report, &lines, 0, best_r, &sets);
    }
    report.oracle_queries = queries.load(Ordering::Relaxed);
    if best_r == 0 {
        if precheck_nonzero {
            return Err(Error::Reconstruction("nonzero input but no line admits a recovery".into()));
        }
        return Ok((PowCircuitMulti::new(field, n, d, Vec::new())?, report));
    }
    let ui = chosen.ok_or_else(|| {
        Error::Reconstruction(format!("no anchor has enough good directions for {best_r} terms"))
    })?;
    report.anchor = Some(ui);

    let good: BTreeMap<usize, LabeledUniOutput> = lines[ui]
        .iter()
        .enumerate()
        .filter_map(|(vi, o)| o.as_ref().filter(|o| is_good(o, best_r)).map(|o| (vi, o.clone())))
        .collect();
    let aligned = align_by_labels(&good)?;
    let labels = aligned.values().next().expect("nonempty").labels();
    let zero = field.zero();
    let one = field.one();
    let mut terms = Vec::with_capacity(best_r);
    for (i, &label) in labels.iter().enumerate() {
        let values: BTreeMap<PointTag, FpElem> = aligned
            .iter()
            .map(|(&vi, o)| {
                let h = &o.pairs[i].1;
                let ratio = h.eval(one) / h.eval(zero);
                (sets.directions.tag(vi), ratio)
            })
            .collect();
        let lookup = |tag: &PointTag| values.get(tag).copied();
        let base = robust_decode(&sets.directions, &lookup)?;
        terms.push(PowerTermMulti { lambda: label, base });
    }
    report.oracle_queries = queries.load(Ordering::Relaxed);
    Ok((PowCircuitMulti::new(field, n, d, terms)?, report))
}

fn is_good(o: &LabeledUniOutput, r: usize) -> bool {
    o.pairs.len() == r && o.labels_usable()
}

/// Scans anchors from `from` on and returns the first one whose good
/// directions reach the threshold for `r` terms.
fn first_good_anchor(
    report: &mut MultiReport,
    lines: &[Vec<Option<LabeledUniOutput>>],
    from: usize,
    r: usize,
    sets: &Sets,
) -> Option<usize> {
    let pairs = (r * r.saturating_sub(1) / 2) as u64;
    let total = sets.directions.len() as u64;
    let need = (Ratio::from_integer(1u64) - sets.threshold_eps * pairs) * total;
    for (ui, outputs) in lines.iter().enumerate().skip(from) {
        let good = outputs.iter().flatten().filter(|o| is_good(o, r)).count();
        report.anchors[ui].good_directions = good;
        if Ratio::from_integer(good as u64) >= need {
            return Some(ui);
        }
    }
    None
}

/// Univariate recovery of `t -> f(u + t (v - u))`. Failures other than
/// oracle errors mark the line as unusable.
fn recover_line<O>(
    field: PrimeField,
    oracle: &O,
    u: &[FpElem],
    v: &[FpElem],
    r: usize,
    d: usize,
    delta: usize,
) -> Result<Option<LabeledUniOutput>>
where
    O: Fn(&[FpElem]) -> Result<FpElem>,
{
    if u == v {
        return Ok(None);
    }
    let diff: Vec<FpElem> = u.iter().zip(v).map(|(&a, &b)| b - a).collect();
    let restricted = |t: FpElem| {
        let pt: Vec<FpElem> = u.iter().zip(&diff).map(|(&a, &w)| a + t * w).collect();
        oracle(&pt)
    };
    match reconstruct_univariate_oracle(field, restricted, r, d, delta) {
        Ok(c) => Ok(Some(LabeledUniOutput::from_circuit(&c))),
        Err(e @ Error::Oracle(_)) | Err(e @ Error::DimensionMismatch { .. }) => Err(e),
        Err(_) => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::SparsePoly;

    #[test]
    fn single_term() {
        let field = PrimeField::new(1009).unwrap();
        // r = 1, s = 1, n = 2, delta = 1, d = 17 > 2^4
        let x1 = SparsePoly::variable(field, 2, 0);
        let d = 17;
        let oracle = |pt: &[FpElem]| Ok(field.elem(7) * x1.eval(pt)?.pow(d as u64));
        let c = reconstruct_multivariate(field, &oracle, 2, 1, 1, 1, d, Profile::Fast).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.terms()[0].lambda, field.elem(7));
        assert_eq!(c.terms()[0].base, x1);
    }

    #[test]
    fn two_terms_fast_profile() {
        let field = PrimeField::new(1481).unwrap();
        let x1 = SparsePoly::variable(field, 2, 0);
        let x2 = SparsePoly::variable(field, 2, 1);
        let a = x1.add(&x2);
        let b = x1.add(&x2.scale(field.elem(2)));
        let d = 82;
        let oracle = |pt: &[FpElem]| {
            Ok(field.elem(2) * a.eval(pt)?.pow(d as u64) + field.elem(3) * b.eval(pt)?.pow(d as u64))
        };
        let (c, report) =
            reconstruct_multivariate_with_report(field, &oracle, 2, 2, 2, 1, d, Profile::Fast).unwrap();
        assert_eq!(report.r, 2);
        assert_eq!(c.len(), 2);
        assert_eq!(c.terms()[0].base, a);
        assert_eq!(c.terms()[0].lambda, field.elem(2));
        assert_eq!(c.terms()[1].base, b);
        assert_eq!(c.terms()[1].lambda, field.elem(3));
    }
}
