//! Minimal dense-tableau two-phase simplex for `min c·v  s.t.  A v = b, v ≥ 0`.
//!
//! Bland's rule throughout, so the method terminates on degenerate problems.
//! Intended for the handful of variables that polyhedral dual norms need.

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, solution: Vec<f64> },
    Infeasible,
    Unbounded,
}

const PIVOT_EPS: f64 = 1e-11;

struct Tableau {
    // rows x (cols + 1); the last column is the right-hand side
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (r, line) in self.t.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = line[col];
            if factor != 0.0 {
                for (v, pv) in line.iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Reduced costs of `cost` (length `cols`) for the current basis.
    fn reduced(&self, cost: &[f64]) -> Vec<f64> {
        let mut r = cost.to_vec();
        for (row, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (j, rj) in r.iter_mut().enumerate() {
                    *rj -= cb * self.t[row][j];
                }
            }
        }
        r
    }

    /// Runs simplex iterations on `cost`, only allowing entering columns `< allowed`.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> bool {
        for _ in 0..10_000 {
            let red = self.reduced(cost);
            let Some(enter) = (0..allowed).find(|&j| red[j] < -1e-12) else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for (row, line) in self.t.iter().enumerate() {
                let a = line[enter];
                if a > PIVOT_EPS {
                    let ratio = line[self.cols] / a;
                    match leave {
                        None => leave = Some((row, ratio)),
                        Some((lr, best)) => {
                            if ratio < best - 1e-14
                                || (ratio <= best + 1e-14 && self.basis[row] < self.basis[lr])
                            {
                                leave = Some((row, ratio));
                            }
                        }
                    }
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, enter),
                None => return false,
            }
        }
        true
    }
}

/// Solves `min c·v  s.t.  A v = b, v ≥ 0` where `a` is given row-wise.
pub fn minimize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LpOutcome {
    let rows = a.len();
    let n = c.len();
    let cols = n + rows;

    let mut t = Vec::with_capacity(rows);
    for (i, row) in a.iter().enumerate() {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut line = vec![0.0; cols + 1];
        for j in 0..n {
            line[j] = sign * row[j];
        }
        line[n + i] = 1.0;
        line[cols] = sign * b[i];
        t.push(line);
    }
    let mut tab = Tableau {
        t,
        basis: (n..n + rows).collect(),
        cols,
    };

    // phase 1: drive the artificials out
    let mut phase1 = vec![0.0; cols];
    phase1[n..].iter_mut().for_each(|v| *v = 1.0);
    tab.optimize(&phase1, cols);
    let infeas: f64 = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &bv)| bv >= n)
        .map(|(r, _)| tab.t[r][cols])
        .sum();
    let scale = 1.0 + b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if infeas > 1e-9 * scale {
        return LpOutcome::Infeasible;
    }
    // pivot remaining (zero-level) artificials out where possible
    for row in 0..rows {
        if tab.basis[row] >= n {
            if let Some(col) = (0..n).find(|&j| tab.t[row][j].abs() > PIVOT_EPS) {
                tab.pivot(row, col);
            }
        }
    }

    // phase 2: artificials may not re-enter
    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(c);
    if !tab.optimize(&cost, n) {
        return LpOutcome::Unbounded;
    }
    let mut solution = vec![0.0; n];
    for (row, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            solution[bv] = tab.t[row][cols].max(0.0);
        }
    }
    let value = c.iter().zip(&solution).map(|(ci, vi)| ci * vi).sum();
    LpOutcome::Optimal { value, solution }
}
