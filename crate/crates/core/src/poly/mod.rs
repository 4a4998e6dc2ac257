//! Univariate dense and multivariate sparse polynomials over `F_p`.

mod sparse;
mod uni;

pub use sparse::{restrict_to_line, ExponentVector, SparsePoly};
pub use uni::{gcd_monic, interpolate_univariate, ord_factor, UniPoly};

use crate::factor::squarefree_decomposition;
use crate::field::FpElem;

/// Writes `g = alpha * h^d` with `h` monic, if such a decomposition exists.
///
/// Needs `p > deg g`; outside that range the answer is `None`.
pub fn perfect_dth_root(g: &UniPoly, d: usize) -> Option<(FpElem, UniPoly)> {
    let lc = g.leading_coeff()?;
    if d == 0 {
        return None;
    }
    let parts = squarefree_decomposition(g).ok()?;
    let mut root = UniPoly::one(g.field());
    for (part, mult) in parts {
        if mult % d != 0 {
            return None;
        }
        root = &root * &part.pow((mult / d) as u64);
    }
    Some((lc, root))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    #[test]
    fn dth_root_examples() {
        let f = PrimeField::new(101).unwrap();
        let h = UniPoly::linear(f, 5);
        let g = h.pow(20).scale(f.elem(3));
        assert_eq!(perfect_dth_root(&g, 20), Some((f.elem(3), h)));
        assert_eq!(perfect_dth_root(&UniPoly::from_u64s(f, &[0, 1, 1]), 2), None);
        let f37 = PrimeField::new(37).unwrap();
        let x17 = UniPoly::x(f37).pow(17);
        assert_eq!(perfect_dth_root(&x17, 17), Some((f37.one(), UniPoly::x(f37))));
        let c = UniPoly::constant(f.elem(9));
        assert_eq!(perfect_dth_root(&c, 4), Some((f.elem(9), UniPoly::one(f))));
        assert_eq!(perfect_dth_root(&UniPoly::zero(f), 3), None);
    }

    #[test]
    fn dth_root_exhaustive_small() {
        // Every monic h of degree <= 2 over F_7, with d = 2 (p > d * deg h).
        let f = PrimeField::new(7).unwrap();
        for a in 0..7 {
            for b in 0..7 {
                for h in [UniPoly::from_u64s(f, &[a, 1]), UniPoly::from_u64s(f, &[a, b, 1])] {
                    if 2 * h.degree().unwrap() >= 7 {
                        continue;
                    }
                    assert_eq!(perfect_dth_root(&h.pow(2), 2), Some((f.one(), h.clone())));
                }
            }
        }
    }
}
