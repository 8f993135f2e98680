//! Polytopes inside the probability simplex and exact vertex enumeration.
//!
//! Vertices are found by basis enumeration: the affine hull fixed by the
//! equalities (always including `Σw = 1`) is parametrised, and every square
//! subsystem of active inequalities (nonnegativity facets included) is solved
//! and kept when feasible. This is exponential in the dimension, hence the cap.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::{dot, solve_unique, Echelon};
use crate::scalar::Scalar;

/// Default cap on the number of coordinates accepted by [`enumerate_vertices`].
pub const DEFAULT_DIMENSION_CAP: usize = 12;

/// `{ w : w ≥ 0, Σw = 1, a·w ≤ b for every row, e·w = f for every equality }`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraintSet<S> {
    pub dimension: usize,
    pub rows: Vec<(Vec<S>, S)>,
    pub equalities: Vec<(Vec<S>, S)>,
}

impl<S: Scalar> LinearConstraintSet<S> {
    pub fn new(dimension: usize) -> Self {
        Self {
            dimension,
            rows: Vec::new(),
            equalities: Vec::new(),
        }
    }

    pub fn push_le(&mut self, coefficients: Vec<S>, bound: S) {
        assert_eq!(coefficients.len(), self.dimension, "row length");
        self.rows.push((coefficients, bound));
    }

    pub fn push_ge(&mut self, coefficients: Vec<S>, bound: S) {
        self.push_le(coefficients.into_iter().map(|c| -c).collect(), -bound);
    }

    pub fn push_eq(&mut self, coefficients: Vec<S>, bound: S) {
        assert_eq!(coefficients.len(), self.dimension, "row length");
        self.equalities.push((coefficients, bound));
    }

    /// Whether `w` lies in the polytope (within the scalar tolerance).
    pub fn contains(&self, w: &[S]) -> bool {
        if w.len() != self.dimension || w.iter().any(|v| v.is_neg()) {
            return false;
        }
        let total = w.iter().fold(S::zero(), |a, v| a + v.clone());
        if !total.approx_eq(&S::one()) {
            return false;
        }
        self.rows.iter().all(|(a, b)| dot(a, w).approx_le(b))
            && self.equalities.iter().all(|(a, b)| dot(a, w).approx_eq(b))
    }

    /// Converts every coefficient into another scalar type.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LinearConstraintSet<T> {
        let conv = |rows: &[(Vec<S>, S)]| -> Vec<(Vec<T>, T)> {
            rows.iter()
                .map(|(a, b)| (a.iter().map(&f).collect(), f(b)))
                .collect()
        };
        LinearConstraintSet {
            dimension: self.dimension,
            rows: conv(&self.rows),
            equalities: conv(&self.equalities),
        }
    }
}

/// Extreme points of a polytope, sorted lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSet<S> {
    pub points: Vec<Vec<S>>,
}

impl<S> VertexSet<S> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// An empty vertex set flags an empty polytope.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<S>> {
        self.points.iter()
    }
}

/// Box constraints from per-coordinate bounds. Rows implied by the simplex
/// (`lower = 0`, `upper = 1`) are left out.
pub fn intervals_to_constraints<S: Scalar>(lower: &[S], upper: &[S]) -> LinearConstraintSet<S> {
    assert_eq!(lower.len(), upper.len(), "bound vectors differ in length");
    let n = lower.len();
    let mut cs = LinearConstraintSet::new(n);
    let unit = |j: usize, v: S| -> Vec<S> {
        (0..n).map(|i| if i == j { v.clone() } else { S::zero() }).collect()
    };
    for j in 0..n {
        if lower[j].is_pos() {
            cs.push_le(unit(j, -S::one()), -lower[j].clone());
        }
        if (upper[j].clone() - S::one()).is_neg() {
            cs.push_le(unit(j, S::one()), upper[j].clone());
        }
    }
    cs
}

/// Keeps the first of every group of points within `tol` of each other
/// (max-coordinate distance).
pub fn dedup<S: Scalar>(points: Vec<Vec<S>>, tol: &S) -> Vec<Vec<S>> {
    let mut kept: Vec<Vec<S>> = Vec::with_capacity(points.len());
    for p in points {
        let duplicate = kept.iter().any(|q| {
            q.iter()
                .zip(&p)
                .all(|(a, b)| (a.clone() - b.clone()).abs() <= *tol)
        });
        if !duplicate {
            kept.push(p);
        }
    }
    kept
}

pub fn enumerate_vertices<S: Scalar>(cs: &LinearConstraintSet<S>) -> Result<VertexSet<S>> {
    enumerate_vertices_capped(cs, DEFAULT_DIMENSION_CAP)
}

pub fn enumerate_vertices_capped<S: Scalar>(
    cs: &LinearConstraintSet<S>,
    cap: usize,
) -> Result<VertexSet<S>> {
    let n = cs.dimension;
    if n > cap {
        return Err(Error::DimensionTooLarge { dimension: n, cap });
    }
    if n == 0 {
        return Ok(VertexSet { points: Vec::new() });
    }

    // affine hull: w = base + Σ_f u_f · direction_f over free columns f
    let mut eq_rows: Vec<Vec<S>> = Vec::with_capacity(cs.equalities.len() + 1);
    let mut ones = vec![S::one(); n];
    ones.push(S::one());
    eq_rows.push(ones);
    for (a, b) in &cs.equalities {
        let mut row = a.clone();
        row.push(b.clone());
        eq_rows.push(row);
    }
    let ech = Echelon::new(eq_rows, n);
    if !ech.consistent() {
        return Ok(VertexSet { points: Vec::new() });
    }
    let free: Vec<usize> = (0..n).filter(|c| !ech.pivots.contains(c)).collect();
    let mut base = vec![S::zero(); n];
    for (r, &p) in ech.pivots.iter().enumerate() {
        base[p] = ech.rows[r][n].clone();
    }
    let directions: Vec<Vec<S>> = free
        .iter()
        .map(|&f| {
            let mut d = vec![S::zero(); n];
            d[f] = S::one();
            for (r, &p) in ech.pivots.iter().enumerate() {
                d[p] = -ech.rows[r][f].clone();
            }
            d
        })
        .collect();

    // inequalities in the reduced coordinates: g·u ≤ h
    let mut reduced: Vec<(Vec<S>, S)> = Vec::with_capacity(cs.rows.len() + n);
    for j in 0..n {
        let mut a = vec![S::zero(); n];
        a[j] = -S::one();
        reduced.push(project(&a, &S::zero(), &base, &directions));
    }
    for (a, b) in &cs.rows {
        reduced.push(project(a, b, &base, &directions));
    }

    let k = free.len();
    let lift = |u: &[S]| -> Vec<S> {
        let mut w = base.clone();
        for (coef, d) in u.iter().zip(&directions) {
            for (wi, di) in w.iter_mut().zip(d) {
                *wi = wi.clone() + coef.clone() * di.clone();
            }
        }
        w
    };
    let feasible = |u: &[S]| reduced.iter().all(|(g, h)| dot(g, u).approx_le(h));

    let mut found = Vec::new();
    if k == 0 {
        if feasible(&[]) {
            found.push(base.clone());
        }
    } else {
        for subset in Combinations::new(reduced.len(), k) {
            let a: Vec<Vec<S>> = subset.iter().map(|&i| reduced[i].0.clone()).collect();
            let b: Vec<S> = subset.iter().map(|&i| reduced[i].1.clone()).collect();
            let Some(u) = solve_unique(&a, &b, k) else { continue };
            if feasible(&u) {
                found.push(lift(&u));
            }
        }
    }

    let mut points = dedup(found, &S::tolerance());
    points.sort_by(|a, b| lex_cmp(a, b));
    Ok(VertexSet { points })
}

fn project<S: Scalar>(a: &[S], b: &S, base: &[S], directions: &[Vec<S>]) -> (Vec<S>, S) {
    let g = directions.iter().map(|d| dot(a, d)).collect();
    (g, b.clone() - dot(a, base))
}

pub(crate) fn lex_cmp<S: Scalar>(a: &[S], b: &[S]) -> Ordering {
    if !S::EXACT {
        // compare on the tolerance grid so that rounding noise cannot reorder
        let grid = |v: &S| (v.to_f64() / S::tolerance().to_f64()).round() as i64;
        return a.iter().map(grid).cmp(b.iter().map(grid));
    }
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(ord) => return ord,
        }
    }
    a.len().cmp(&b.len())
}

/// k-subsets of `0..n` in lexicographic order.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}
