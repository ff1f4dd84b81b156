//! Dense two-phase simplex for the tiny linear programs of the parabola solver.

const EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Unbounded,
    /// No feasible point; `infeasibility` is the smallest total violation
    /// of the (row-normalized) constraints found by phase one.
    Infeasible { infeasibility: f64 },
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.cols]
    }

    fn pivot(&mut self, row: usize, enter: usize) {
        let pivot = self.rows[row][enter];
        for v in self.rows[row].iter_mut() {
            *v /= pivot;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i != row {
                let f = r[enter];
                if f != 0.0 {
                    for (v, p) in r.iter_mut().zip(&pivot_row) {
                        *v -= f * p;
                    }
                }
            }
        }
        self.basis[row] = enter;
    }

    /// Reduced costs of `cost` (maximization) for the current basis.
    fn reduced(&self, cost: &[f64], allowed: usize) -> Vec<f64> {
        let mut reduced = cost[..allowed].to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (j, r) in reduced.iter_mut().enumerate() {
                    *r -= cb * self.rows[i][j];
                }
            }
        }
        reduced
    }

    /// Primal simplex with Bland's rule over columns `0..allowed`.
    /// Returns `false` when the objective is unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> bool {
        for _ in 0..MAX_PIVOTS {
            let reduced = self.reduced(cost, allowed);
            let Some(enter) = (0..allowed).find(|&j| reduced[j] > EPS) else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a > EPS {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        Some((k, best))
                            if ratio > best + EPS || (ratio >= best - EPS && self.basis[k] < self.basis[i]) =>
                        {
                            Some((k, best))
                        }
                        _ => Some((i, ratio)),
                    };
                }
            }
            let Some((row, _)) = leave else {
                return false;
            };
            self.pivot(row, enter);
        }
        // Bland's rule terminates; reaching this point means numerical trouble.
        false
    }
}

/// Maximizes `c · x` subject to `rows[i] · x ≤ rhs[i]` over free `x`.
///
/// Variables are shifted to `start` and split as `x = start + y⁺ − y⁻`. Rows
/// violated at `start` receive artificial variables that phase one drives to
/// zero; when `start` is feasible phase one is skipped. Equalities are passed
/// as pairs of opposite inequalities.
pub(crate) fn maximize(c: &[f64], rows: &[Vec<f64>], rhs: &[f64], start: &[f64]) -> LpOutcome {
    let n = c.len();
    let m = rows.len();
    let mut tab = vec![vec![0.0; 0]; m];
    let mut violated = Vec::new();
    let mut normalized = Vec::with_capacity(m);
    for (i, row) in rows.iter().enumerate() {
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let residual = (rhs[i] - row.iter().zip(start).map(|(a, x)| a * x).sum::<f64>()) / norm;
        if residual < -EPS {
            violated.push(i);
        }
        normalized.push((norm, residual));
    }
    let artificial = violated.len();
    let cols = 2 * n + m + artificial;
    let mut basis = vec![0; m];
    for (i, row) in rows.iter().enumerate() {
        let (norm, residual) = normalized[i];
        let mut r = vec![0.0; cols + 1];
        let sign = if residual < -EPS { -1.0 } else { 1.0 };
        for j in 0..n {
            r[j] = sign * row[j] / norm;
            r[n + j] = -sign * row[j] / norm;
        }
        r[2 * n + i] = sign;
        r[cols] = if sign < 0.0 { -residual } else { residual.max(0.0) };
        basis[i] = 2 * n + i;
        tab[i] = r;
    }
    for (k, &i) in violated.iter().enumerate() {
        let col = 2 * n + m + k;
        tab[i][col] = 1.0;
        basis[i] = col;
    }
    let mut t = Tableau { rows: tab, basis, cols };

    if artificial > 0 {
        let mut phase1 = vec![0.0; cols];
        for cost in phase1[2 * n + m..].iter_mut() {
            *cost = -1.0;
        }
        t.optimize(&phase1, cols);
        let infeasibility: f64 = (0..m).filter(|&i| t.basis[i] >= 2 * n + m).map(|i| t.rhs(i)).sum();
        if infeasibility > 1e-9 {
            return LpOutcome::Infeasible { infeasibility };
        }
        // Pivot remaining (zero-level) artificials out of the basis.
        for i in 0..m {
            if t.basis[i] >= 2 * n + m {
                if let Some(j) = (0..2 * n + m).find(|&j| t.rows[i][j].abs() > 1e-9) {
                    t.pivot(i, j);
                }
            }
        }
    }

    let mut cost = vec![0.0; cols];
    for j in 0..n {
        cost[j] = c[j];
        cost[n + j] = -c[j];
    }
    if !t.optimize(&cost, 2 * n + m) {
        return LpOutcome::Unbounded;
    }
    let mut x = start.to_vec();
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] += t.rhs(i);
        } else if b < 2 * n {
            x[b - n] -= t.rhs(i);
        }
    }
    let value = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    LpOutcome::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(outcome: LpOutcome) -> (Vec<f64>, f64) {
        match outcome {
            LpOutcome::Optimal { x, value } => (x, value),
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn square_corner() {
        // max x + y on the unit square
        let rows = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
        let (x, v) = optimal(maximize(&[1.0, 1.0], &rows, &[1.0, 1.0, 0.0, 0.0], &[0.5, 0.5]));
        assert!((v - 2.0).abs() < 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_region_and_free_variables() {
        // max −x − y subject to x ≥ −3, y ≥ −2, x + y ≥ −4 with start (0, 0)
        let rows = vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![-1.0, -1.0]];
        let (_, v) = optimal(maximize(&[-1.0, -1.0], &rows, &[3.0, 2.0, 4.0], &[0.0, 0.0]));
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn detects_unbounded() {
        let rows = vec![vec![-1.0, 0.0], vec![0.0, -1.0]];
        assert_eq!(maximize(&[1.0, 0.0], &rows, &[0.0, 0.0], &[1.0, 1.0]), LpOutcome::Unbounded);
    }

    #[test]
    fn degenerate_vertex() {
        // Three constraints through (1, 1); max y.
        let rows = vec![vec![1.0, 1.0], vec![-1.0, 1.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let (x, v) = optimal(maximize(&[0.0, 1.0], &rows, &[2.0, 0.0, 1.0, 5.0], &[0.0, -1.0]));
        assert!((v - 1.0).abs() < 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_start_uses_phase_one() {
        // max x + y on the square [2, 3]² from the origin
        let rows = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
        let (x, v) = optimal(maximize(&[1.0, 1.0], &rows, &[3.0, 3.0, -2.0, -2.0], &[0.0, 0.0]));
        assert!((v - 6.0).abs() < 1e-12);
        assert!((x[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn equality_constraints() {
        // max y subject to x + y = 1, x ≥ 0.25, y ≤ 5
        let rows = vec![vec![1.0, 1.0], vec![-1.0, -1.0], vec![-1.0, 0.0], vec![0.0, 1.0]];
        let (x, v) = optimal(maximize(&[0.0, 1.0], &rows, &[1.0, -1.0, -0.25, 5.0], &[0.0, 0.0]));
        assert!((v - 0.75).abs() < 1e-12);
        assert!((x[0] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible() {
        // x ≤ 0 and x ≥ 1
        let rows = vec![vec![1.0], vec![-1.0]];
        match maximize(&[1.0], &rows, &[0.0, -1.0], &[0.0]) {
            LpOutcome::Infeasible { infeasibility } => assert!((infeasibility - 1.0).abs() < 1e-12),
            other => panic!("unexpected outcome {other:?}"),
        }
    }
}
