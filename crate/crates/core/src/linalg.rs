//! Dense Gaussian elimination over a [`Scalar`].

use crate::scalar::Scalar;

/// Reduced row echelon form of an augmented matrix `[A | b]` (in place).
///
/// Returns the pivot column of each nonzero row. Rows that reduce to zero are
/// moved to the bottom; a zero row with a nonzero right-hand side means the
/// system is inconsistent (see [`Echelon::consistent`]).
pub(crate) struct Echelon<S> {
    pub rows: Vec<Vec<S>>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl<S: Scalar> Echelon<S> {
    pub fn new(mut rows: Vec<Vec<S>>, cols: usize) -> Self {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows.len() {
                break;
            }
            let best = (r..rows.len())
                .filter(|&i| !rows[i][c].near_zero())
                .max_by(|&a, &b| {
                    rows[a][c]
                        .abs()
                        .partial_cmp(&rows[b][c].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                        // prefer the earliest row among equals
                        .then(b.cmp(&a))
                });
            let Some(best) = best else { continue };
            rows.swap(r, best);
            let pivot = rows[r][c].clone();
            for v in rows[r].iter_mut() {
                *v = v.clone() / pivot.clone();
            }
            for i in 0..rows.len() {
                if i == r || rows[i][c].is_zero() {
                    continue;
                }
                let factor = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (x, p) in rows[i].iter_mut().zip(pivot_row) {
                    *x = x.clone() - factor.clone() * p;
                }
                rows[i][c] = S::zero();
            }
            pivots.push(c);
            r += 1;
        }
        Self { rows, pivots, cols }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn consistent(&self) -> bool {
        self.rows[self.rank()..]
            .iter()
            .all(|row| row[self.cols].near_zero())
    }
}

/// Unique solution of `a x = b` for a square or overdetermined consistent
/// system, `None` when singular or inconsistent.
pub(crate) fn solve_unique<S: Scalar>(a: &[Vec<S>], b: &[S], cols: usize) -> Option<Vec<S>> {
    let rows = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let ech = Echelon::new(rows, cols);
    if ech.rank() < cols || !ech.consistent() {
        return None;
    }
    Some((0..cols).map(|i| ech.rows[i][cols].clone()).collect())
}

pub(crate) fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}
