use crate::rational::Rational;
use num_traits::{One, Zero};

/// Row-reduces `m` in place to reduced row echelon form, choosing pivots only among
/// the first `ncols` columns (later columns are carried along, e.g. a right-hand side).
/// Pivots are the first nonzero entry in column order. Returns the pivot columns; pivot
/// rows come first in that order.
pub fn rref(m: &mut [Vec<Rational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        if !inv.is_one() {
            for x in m[row].iter_mut() {
                *x *= &inv;
            }
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let f = other[col].clone();
            for (x, p) in other.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// `r = N·s + o`, optionally with side conditions `a·s = b` on the sources.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    pub matrix: Vec<Vec<Rational>>,
    pub offsets: Vec<Rational>,
    pub side_conditions: Vec<(Vec<Rational>, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GaussResult {
    Inconsistent,
    Solved {
        rank: usize,
        /// `m × rank`: the linearly independent (pivot) columns of `N`.
        basis: Vec<Vec<Rational>>,
        /// `rank × n`: nonzero rows of the reduced `N`, so that `N = basis · change_of_basis`.
        change_of_basis: Vec<Vec<Rational>>,
    },
}

pub fn gaussian_solve(sys: &LinearSystem) -> GaussResult {
    let n = sys.matrix.first().map_or_else(
        || sys.side_conditions.first().map_or(0, |r| r.0.len()),
        Vec::len,
    );
    if !sys.side_conditions.is_empty() {
        let mut aug: Vec<Vec<Rational>> = sys
            .side_conditions
            .iter()
            .map(|(a, b)| a.iter().cloned().chain([b.clone()]).collect())
            .collect();
        rref(&mut aug, n);
        if aug
            .iter()
            .any(|r| r[..n].iter().all(Zero::is_zero) && !r[n].is_zero())
        {
            return GaussResult::Inconsistent;
        }
    }
    let mut red = sys.matrix.clone();
    let pivots = rref(&mut red, n);
    let rank = pivots.len();
    let basis = sys
        .matrix
        .iter()
        .map(|row| pivots.iter().map(|&c| row[c].clone()).collect())
        .collect();
    red.truncate(rank);
    GaussResult::Solved {
        rank,
        basis,
        change_of_basis: red,
    }
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = Rational::zero();
                    for k in 0..inner {
                        s += &row[k] * &b[k][j];
                    }
                    s
                })
                .collect()
        })
        .collect()
}
