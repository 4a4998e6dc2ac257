//! Exact Gaussian elimination over `F_p` on raw residue rows.
//!
//! Pivots are chosen as the first row (from the top of the unreduced part)
//! with a nonzero entry in the current column, so every result is a pure
//! function of the input matrix.

use crate::field::PrimeField;

/// Dense row-major matrix of canonical residues.
pub type Rows = Vec<Vec<u64>>;

/// Reduces `rows` in place to reduced row echelon form and returns the pivot
/// columns. Zero rows are dropped, so afterwards `rows.len()` is the rank.
pub fn rref(field: &PrimeField, rows: &mut Rows, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..ncols {
        if top == rows.len() {
            break;
        }
        let Some(found) = (top..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(top, found);
        let inv = field.inv_raw(rows[top][col]).expect("nonzero pivot");
        if inv != 1 {
            for v in rows[top][col..].iter_mut() {
                *v = field.mul_raw(*v, inv);
            }
        }
        let pivot_row = std::mem::take(&mut rows[top]);
        for (i, row) in rows.iter_mut().enumerate() {
            if i == top {
                continue;
            }
            let factor = row[col];
            if factor == 0 {
                continue;
            }
            for (x, &y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                if y != 0 {
                    *x = field.sub_raw(*x, field.mul_raw(factor, y));
                }
            }
        }
        rows[top] = pivot_row;
        pivots.push(col);
        top += 1;
    }
    rows.truncate(top);
    pivots
}

pub fn rank(field: &PrimeField, rows: &[Vec<u64>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(field, &mut m, ncols).len()
}

/// Basis of the right nullspace `{x : A x = 0}`.
///
/// One vector per free column `f`, with a 1 at `f` and zeros at every other
/// free column, listed in increasing `f`.
pub fn nullspace(field: &PrimeField, rows: &[Vec<u64>], ncols: usize) -> Rows {
    let mut m = rows.to_vec();
    let pivots = rref(field, &mut m, ncols);
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut out = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u64; ncols];
        v[free] = 1;
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = field.sub_raw(0, row[free]);
        }
        out.push(v);
    }
    out
}

/// Some solution of `A x = b`, or `None` if the system is inconsistent.
/// The returned solution sets every free variable to zero.
pub fn solve(field: &PrimeField, rows: &[Vec<u64>], rhs: &[u64], ncols: usize) -> Option<Vec<u64>> {
    let mut m: Rows = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut row = r.clone();
            row.push(b);
            row
        })
        .collect();
    let pivots = rref(field, &mut m, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![0u64; ncols];
    for (row, &pc) in m.iter().zip(&pivots) {
        x[pc] = row[ncols];
    }
    Some(x)
}

/// Whether `v` lies in the row span of `rows`.
pub fn in_span(field: &PrimeField, rows: &[Vec<u64>], v: &[u64], ncols: usize) -> bool {
    let base = rank(field, rows, ncols);
    let mut ext = rows.to_vec();
    ext.push(v.to_vec());
    rank(field, &ext, ncols) == base
}
