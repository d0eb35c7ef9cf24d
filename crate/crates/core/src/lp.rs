//! Dense two-phase simplex for the tiny linear programs used by the
//! power-diagram and extreme-point tests.
//!
//! Problems here have at most a few dozen constraints in at most seven free
//! variables, so a textbook tableau with Bland's anti-cycling rule is both
//! simple and robust. Free variables are split into positive and negative
//! parts; every constraint is `row . x <= rhs`.

use crate::error::{Error, Result};

/// Reduced-cost / pivot tolerance.
const EPS: f64 = 1e-9;
/// Safety cap; the instances in this crate pivot a handful of times.
const MAX_PIVOTS: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    ncols: usize,
}

enum SolveEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let scale = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= scale;
        }
        self.rhs[row] /= scale;
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..self.ncols {
                let delta = factor * self.rows[row][j];
                self.rows[i][j] -= delta;
            }
            self.rhs[i] -= factor * self.rhs[row];
        }
        self.basis[row] = col;
    }

    /// Runs simplex with Bland's rule on the current basis for `obj`.
    fn solve(&mut self, obj: &[f64]) -> Result<SolveEnd> {
        for _ in 0..MAX_PIVOTS {
            // Reduced costs relative to the (canonical) basis.
            let mut entering = None;
            'cols: for j in 0..self.ncols {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = obj[j];
                for (i, &bi) in self.basis.iter().enumerate() {
                    if obj[bi] != 0.0 {
                        reduced -= obj[bi] * self.rows[i][j];
                    }
                }
                if reduced > EPS {
                    entering = Some(j);
                    break 'cols;
                }
            }
            let Some(col) = entering else {
                return Ok(SolveEnd::Optimal);
            };

            // Ratio test; ties resolved by the smallest basis index.
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][col];
                if a > EPS {
                    let ratio = self.rhs[i] / a;
                    match leaving {
                        None => leaving = Some((i, ratio)),
                        Some((best, best_ratio)) => {
                            if ratio < best_ratio - EPS
                                || (ratio < best_ratio + EPS && self.basis[i] < self.basis[best])
                            {
                                leaving = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return Ok(SolveEnd::Unbounded);
            };
            self.pivot(row, col);
        }
        Err(Error::invalid("simplex failed to terminate"))
    }

    fn objective_value(&self, obj: &[f64]) -> f64 {
        self.basis
            .iter()
            .zip(&self.rhs)
            .map(|(&b, &v)| obj[b] * v)
            .sum()
    }
}

/// Maximizes `objective . x` over free `x` subject to `rows[i] . x <= rhs[i]`.
pub fn maximize(objective: &[f64], rows: &[Vec<f64>], rhs: &[f64]) -> Result<LpOutcome> {
    let n = objective.len();
    if rows.len() != rhs.len() {
        return Err(Error::invalid("constraint rows and rhs lengths differ"));
    }
    for row in rows {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
    }
    let m = rows.len();

    // Columns: n positive parts, n negative parts, m slacks, then artificials.
    let base_cols = 2 * n + m;
    let mut artificial_of_row = vec![None; m];
    let mut nart = 0;
    for (i, &b) in rhs.iter().enumerate() {
        if b < 0.0 {
            artificial_of_row[i] = Some(base_cols + nart);
            nart += 1;
        }
    }
    let ncols = base_cols + nart;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        ncols,
    };
    for i in 0..m {
        let mut row = vec![0.0; ncols];
        let flip = if rhs[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            row[j] = flip * rows[i][j];
            row[n + j] = -flip * rows[i][j];
        }
        row[2 * n + i] = flip;
        if let Some(a) = artificial_of_row[i] {
            row[a] = 1.0;
            tab.basis.push(a);
        } else {
            tab.basis.push(2 * n + i);
        }
        tab.rows.push(row);
        tab.rhs.push(flip * rhs[i]);
    }

    let scale = rhs.iter().fold(1.0f64, |acc, b| acc.max(b.abs()));

    if nart > 0 {
        let mut phase1 = vec![0.0; ncols];
        for a in artificial_of_row.iter().flatten() {
            phase1[*a] = -1.0;
        }
        match tab.solve(&phase1)? {
            SolveEnd::Unbounded => {
                return Err(Error::invalid("phase-1 objective cannot be unbounded"))
            }
            SolveEnd::Optimal => {}
        }
        if tab.objective_value(&phase1) < -1e-7 * scale {
            return Ok(LpOutcome::Infeasible);
        }
        // Pivot leftover artificials out of the basis where possible; a row
        // with no eligible pivot is redundant and can be ignored (its
        // artificial sits at level zero).
        for i in 0..tab.rows.len() {
            if tab.basis[i] >= base_cols {
                if let Some(j) = (0..base_cols).find(|&j| tab.rows[i][j].abs() > EPS) {
                    tab.pivot(i, j);
                }
            }
        }
    }

    let mut phase2 = vec![0.0; ncols];
    for j in 0..n {
        phase2[j] = objective[j];
        phase2[n + j] = -objective[j];
    }
    // Leftover artificials must stay at zero.
    for a in artificial_of_row.iter().flatten() {
        phase2[*a] = -1e6 * (1.0 + scale);
    }

    match tab.solve(&phase2)? {
        SolveEnd::Unbounded => Ok(LpOutcome::Unbounded),
        SolveEnd::Optimal => {
            let mut parts = vec![0.0; 2 * n];
            for (i, &b) in tab.basis.iter().enumerate() {
                if b < 2 * n {
                    parts[b] = tab.rhs[i];
                }
            }
            let x: Vec<f64> = (0..n).map(|j| parts[j] - parts[n + j]).collect();
            let value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
            Ok(LpOutcome::Optimal { x, value })
        }
    }
}

/// Decides whether `rows[i] . x <= rhs[i]` admits any solution.
pub fn feasible(rows: &[Vec<f64>], rhs: &[f64]) -> Result<bool> {
    let n = rows.first().map_or(0, |r| r.len());
    match maximize(&vec![0.0; n], rows, rhs)? {
        LpOutcome::Infeasible => Ok(false),
        _ => Ok(true),
    }
}
