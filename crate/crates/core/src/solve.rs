//! Linear and linear-fractional programming.
//!
//! [`solve_lp`] is a dense two-phase tableau simplex using Bland's rule
//! (lowest-index entering column, lowest-index leaving basic variable on ratio
//! ties), which cannot cycle on the degenerate bases that replicated
//! constraints produce. With `BigRational` every pivot is exact.
//!
//! Fractional programs are turned into LPs with the Charnes–Cooper change of
//! variables `y = t·w`, after checking the denominator's range.

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

/// `optimise c·y` subject to `a·y ≤ b`, `e·y = f` and `y ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<S> {
    pub objective: Vec<S>,
    pub sense: Sense,
    pub le_rows: Vec<(Vec<S>, S)>,
    pub eq_rows: Vec<(Vec<S>, S)>,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new(objective: Vec<S>, sense: Sense) -> Self {
        Self {
            objective,
            sense,
            le_rows: Vec::new(),
            eq_rows: Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.objective.len()
    }

    pub fn with_le(mut self, a: Vec<S>, b: S) -> Self {
        self.le_rows.push((a, b));
        self
    }

    pub fn with_eq(mut self, a: Vec<S>, b: S) -> Self {
        self.eq_rows.push((a, b));
        self
    }

    pub fn is_feasible_point(&self, y: &[S]) -> bool {
        y.iter().all(|v| !v.is_neg())
            && self.le_rows.iter().all(|(a, b)| dot(a, y).approx_le(b))
            && self.eq_rows.iter().all(|(a, b)| dot(a, y).approx_eq(b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<S> {
    pub status: LpStatus,
    /// Objective value; zero unless optimal.
    pub value: S,
    /// Optimal basic point; empty unless optimal.
    pub point: Vec<S>,
    pub pivots: usize,
}

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    basis: Vec<usize>,
    cols: usize,
    pivots: usize,
}

impl<S: Scalar> Tableau<S> {
    fn rhs(&self, i: usize) -> &S {
        &self.rows[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v = v.clone() / p.clone();
                }
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nonzero: Vec<usize> = (0..=self.cols).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for &j in &nonzero {
                row[j] = row[j].clone() - factor.clone() * pivot_row[j].clone();
            }
            row[c] = S::zero();
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Maximises `cost·x` over columns flagged in `allowed`. Returns `false`
    /// when the objective is unbounded.
    fn maximise(&mut self, cost: &[S], allowed: &[bool]) -> bool {
        loop {
            // reduced cost of column j: c_B · column_j − c_j
            let entering = (0..self.cols).filter(|&j| allowed[j]).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut reduced = -cost[j].clone();
                for (i, row) in self.rows.iter().enumerate() {
                    let cb = &cost[self.basis[i]];
                    if !cb.is_zero() && !row[j].is_zero() {
                        reduced = reduced + cb.clone() * row[j].clone();
                    }
                }
                reduced.is_neg()
            });
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, S)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_pos() {
                    continue;
                }
                let ratio = self.rhs(i).clone() / row[c].clone();
                let better = match &leave {
                    None => true,
                    Some((best_i, best)) => {
                        if ratio.approx_eq(best) {
                            self.basis[i] < self.basis[*best_i]
                        } else {
                            ratio < *best
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, c);
        }
    }

    fn objective(&self, cost: &[S]) -> S {
        self.basis
            .iter()
            .enumerate()
            .fold(S::zero(), |acc, (i, &b)| acc + cost[b].clone() * self.rhs(i).clone())
    }
}

pub fn solve_lp<S: Scalar>(lp: &LinearProgram<S>) -> LpSolution<S> {
    let n = lp.dimension();
    let m = lp.le_rows.len() + lp.eq_rows.len();
    let n_slack = lp.le_rows.len();

    // normalised rows (rhs ≥ 0) with their slack sign and artificial need
    struct Row<S> {
        a: Vec<S>,
        b: S,
        slack: Option<(usize, S)>,
        artificial: bool,
    }
    let mut rows: Vec<Row<S>> = Vec::with_capacity(m);
    for (k, (a, b)) in lp.le_rows.iter().enumerate() {
        assert_eq!(a.len(), n, "row length");
        if b.is_neg() {
            rows.push(Row {
                a: a.iter().map(|v| -v.clone()).collect(),
                b: -b.clone(),
                slack: Some((k, -S::one())),
                artificial: true,
            });
        } else {
            rows.push(Row {
                a: a.clone(),
                b: b.clone(),
                slack: Some((k, S::one())),
                artificial: false,
            });
        }
    }
    for (a, b) in &lp.eq_rows {
        assert_eq!(a.len(), n, "row length");
        let flip = b.is_neg();
        rows.push(Row {
            a: a.iter().map(|v| if flip { -v.clone() } else { v.clone() }).collect(),
            b: if flip { -b.clone() } else { b.clone() },
            slack: None,
            artificial: true,
        });
    }
    let n_art = rows.iter().filter(|r| r.artificial).count();
    let cols = n + n_slack + n_art;
    let art_start = n + n_slack;

    let mut tableau_rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = art_start;
    for row in rows {
        let mut t = row.a;
        t.resize(cols + 1, S::zero());
        if let Some((k, sign)) = &row.slack {
            t[n + k] = sign.clone();
        }
        if row.artificial {
            t[next_art] = S::one();
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(n + row.slack.as_ref().expect("slack row").0);
        }
        t[cols] = row.b;
        tableau_rows.push(t);
    }
    let mut tab = Tableau {
        rows: tableau_rows,
        basis,
        cols,
        pivots: 0,
    };

    // phase 1: maximise −Σ artificials
    if n_art > 0 {
        let cost: Vec<S> = (0..cols)
            .map(|j| if j >= art_start { -S::one() } else { S::zero() })
            .collect();
        let allowed = vec![true; cols];
        tab.maximise(&cost, &allowed);
        if tab.objective(&cost).is_neg() {
            return LpSolution {
                status: LpStatus::Infeasible,
                value: S::zero(),
                point: Vec::new(),
                pivots: tab.pivots,
            };
        }
        // drive remaining artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= art_start {
                match (0..art_start).find(|&j| !tab.rows[i][j].near_zero()) {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    // phase 2
    let mut cost: Vec<S> = vec![S::zero(); cols];
    for (j, c) in lp.objective.iter().enumerate() {
        cost[j] = match lp.sense {
            Sense::Max => c.clone(),
            Sense::Min => -c.clone(),
        };
    }
    let allowed: Vec<bool> = (0..cols).map(|j| j < art_start).collect();
    if !tab.maximise(&cost, &allowed) {
        return LpSolution {
            status: LpStatus::Unbounded,
            value: S::zero(),
            point: Vec::new(),
            pivots: tab.pivots,
        };
    }
    let mut point = vec![S::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            point[b] = tab.rhs(i).clone();
        }
    }
    let value = dot(&lp.objective, &point);
    LpSolution {
        status: LpStatus::Optimal,
        value,
        point,
        pivots: tab.pivots,
    }
}

/// `optimise (c·w)/(d·w)` over `{w ≥ 0, Σw = 1, A w ≤ 0, E w = 0, a·w ≤ b}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalProgram<S> {
    pub numerator: Vec<S>,
    pub denominator: Vec<S>,
    /// Homogeneous rows `a·w ≤ 0`.
    pub le_rows: Vec<Vec<S>>,
    /// Homogeneous rows `a·w = 0`.
    pub eq_rows: Vec<Vec<S>>,
    /// Inhomogeneous rows `a·w ≤ b`.
    pub extra_rows: Vec<(Vec<S>, S)>,
}

impl<S: Scalar> FractionalProgram<S> {
    pub fn new(numerator: Vec<S>, denominator: Vec<S>) -> Self {
        assert_eq!(numerator.len(), denominator.len(), "objective lengths");
        Self {
            numerator,
            denominator,
            le_rows: Vec::new(),
            eq_rows: Vec::new(),
            extra_rows: Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.numerator.len()
    }

    /// The feasible set as an LP over `w` with objective `objective`.
    pub fn base_program(&self, objective: Vec<S>, sense: Sense) -> LinearProgram<S> {
        let n = self.dimension();
        let mut lp = LinearProgram::new(objective, sense);
        for a in &self.le_rows {
            lp.le_rows.push((a.clone(), S::zero()));
        }
        for a in &self.eq_rows {
            lp.eq_rows.push((a.clone(), S::zero()));
        }
        lp.le_rows.extend(self.extra_rows.iter().cloned());
        lp.eq_rows.push((vec![S::one(); n], S::one()));
        lp
    }

    /// The feasible set in the form used by vertex enumeration.
    pub fn constraint_set(&self) -> crate::geometry::LinearConstraintSet<S> {
        let n = self.dimension();
        let mut cs = crate::geometry::LinearConstraintSet::new(n);
        for a in &self.le_rows {
            cs.push_le(a.clone(), S::zero());
        }
        for a in &self.eq_rows {
            cs.push_eq(a.clone(), S::zero());
        }
        for (a, b) in &self.extra_rows {
            cs.push_le(a.clone(), b.clone());
        }
        cs
    }

    /// Ratio at a point, `None` when the denominator vanishes.
    pub fn ratio_at(&self, w: &[S]) -> Option<S> {
        let den = dot(&self.denominator, w);
        if den.is_pos() {
            Some(dot(&self.numerator, w) / den)
        } else {
            None
        }
    }
}

/// Charnes–Cooper: with `y = t·w`, `t ≥ 0` the program becomes
/// `optimise c·y` s.t. `A y ≤ 0`, `E y = 0`, `a·y − b·t ≤ 0`, `d·y = 1`,
/// `Σy − t = 0`. The last variable of the result is `t`.
pub fn charnes_cooper<S: Scalar>(fp: &FractionalProgram<S>, sense: Sense) -> LinearProgram<S> {
    let n = fp.dimension();
    let extend = |a: &[S], last: S| -> Vec<S> {
        let mut row = a.to_vec();
        row.push(last);
        row
    };
    let mut lp = LinearProgram::new(extend(&fp.numerator, S::zero()), sense);
    for a in &fp.le_rows {
        lp.le_rows.push((extend(a, S::zero()), S::zero()));
    }
    for (a, b) in &fp.extra_rows {
        lp.le_rows.push((extend(a, -b.clone()), S::zero()));
    }
    for a in &fp.eq_rows {
        lp.eq_rows.push((extend(a, S::zero()), S::zero()));
    }
    lp.eq_rows.push((extend(&fp.denominator, S::zero()), S::one()));
    lp.eq_rows.push((extend(&vec![S::one(); n], -S::one()), S::zero()));
    lp
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FractionalStatus {
    /// The optimum is attained at a feasible point.
    Optimal,
    /// Minimisation with a denominator whose lower envelope is zero; the
    /// value is reported as zero.
    LowerEnvelopeZero,
    /// The denominator vanishes on the whole feasible set.
    VacuousEvidence,
    /// Maximisation with a zero lower envelope of the denominator: the value
    /// is the supremum over points where the denominator is positive.
    SupremumPositiveEvidence,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution<S> {
    pub value: S,
    pub status: FractionalStatus,
    /// An optimal `w` when one was recovered.
    pub point: Option<Vec<S>>,
    pub pivots: usize,
}

pub fn solve_fractional<S: Scalar>(fp: &FractionalProgram<S>, sense: Sense) -> Result<FractionalSolution<S>> {
    let mut pivots = 0;
    let low = solve_lp(&fp.base_program(fp.denominator.clone(), Sense::Min));
    pivots += low.pivots;
    if low.status != LpStatus::Optimal {
        return Err(Error::InfeasibleModel);
    }
    let denominator_vanishes = low.value.near_zero();
    if denominator_vanishes {
        let high = solve_lp(&fp.base_program(fp.denominator.clone(), Sense::Max));
        pivots += high.pivots;
        if high.status == LpStatus::Optimal && high.value.near_zero() {
            return Ok(FractionalSolution {
                value: S::zero(),
                status: FractionalStatus::VacuousEvidence,
                point: None,
                pivots,
            });
        }
        if sense == Sense::Min {
            return Ok(FractionalSolution {
                value: S::zero(),
                status: FractionalStatus::LowerEnvelopeZero,
                point: Some(low.point),
                pivots,
            });
        }
    }

    let lp = charnes_cooper(fp, sense);
    let sol = solve_lp(&lp);
    pivots += sol.pivots;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(Error::InfeasibleModel),
        LpStatus::Unbounded => {
            return Err(Error::Unsupported(
                "ratio is unbounded: numerator weight outside the denominator's support".into(),
            ))
        }
    }
    let n = fp.dimension();
    let t = sol.point[n].clone();
    let point = t
        .is_pos()
        .then(|| sol.point[..n].iter().map(|y| y.clone() / t.clone()).collect());
    Ok(FractionalSolution {
        value: sol.value,
        status: if denominator_vanishes {
            FractionalStatus::SupremumPositiveEvidence
        } else {
            FractionalStatus::Optimal
        },
        point,
        pivots,
    })
}
