//! Dense two-phase primal simplex with Bland's rule.

use super::model::{LpModel, LpSolution, LpStatus};

/// Smallest magnitude treated as nonzero when choosing pivots.
pub const PIVOT_TOL: f64 = 1e-9;
const MAX_ITERATIONS: usize = 200_000;

struct Tableau {
    /// `rows × (cols + 1)`, last column is the right-hand side.
    t: Vec<Vec<f64>>,
    /// Reduced costs; the last entry is minus the current objective.
    obj: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
    iterations: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl Tableau {
    fn rhs(&self, row: usize) -> f64 {
        self.t[row][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in &mut self.t[row] {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (r, line) in self.t.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let f = line[col];
            if f != 0.0 {
                for (v, pv) in line.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        let f = self.obj[col];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
        self.basis[row] = col;
        self.iterations += 1;
    }

    /// Minimizes from the current basic feasible solution; columns at or
    /// beyond `allowed` never enter.
    fn run(&mut self, allowed: usize) -> Outcome {
        loop {
            if self.iterations >= MAX_ITERATIONS {
                return Outcome::IterationLimit;
            }
            let Some(col) = (0..allowed).find(|&j| self.obj[j] < -PIVOT_TOL) else {
                return Outcome::Optimal;
            };
            let mut best: Option<(usize, f64)> = None;
            for r in 0..self.t.len() {
                let a = self.t[r][col];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bratio)) => {
                        if ratio < bratio || (ratio == bratio && self.basis[r] < self.basis[br]) {
                            Some((r, ratio))
                        } else {
                            Some((br, bratio))
                        }
                    }
                };
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return Outcome::Unbounded,
            }
        }
    }

    fn set_objective(&mut self, cost: &[f64]) {
        self.obj = cost.to_vec();
        self.obj.push(0.0);
        for (r, &b) in self.basis.iter().enumerate() {
            let c = cost[b];
            if c != 0.0 {
                for (v, tv) in self.obj.iter_mut().zip(&self.t[r]) {
                    *v -= c * tv;
                }
            }
        }
    }
}

/// Solves `min c·x` subject to `A x >= b`, `x >= 0`.
pub fn simplex_solve(model: &LpModel) -> LpSolution {
    let nv = model.num_vars();
    let m = model.num_constraints();
    // columns: structural, one surplus per row, artificials for rows with b > 0
    let needs_art: Vec<bool> = model
        .constraints
        .iter()
        .map(|c| c.rhs.value > 0.0)
        .collect();
    let n_art = needs_art.iter().filter(|&&x| x).count();
    let art_start = nv + m;
    let cols = art_start + n_art;
    let mut t = vec![vec![0.0; cols + 1]; m];
    let mut basis = vec![0; m];
    let mut next_art = art_start;
    for (r, c) in model.constraints.iter().enumerate() {
        let row = &mut t[r];
        if needs_art[r] {
            // A x - s + art = b
            for (j, coef) in &c.coefs {
                row[*j] += coef.value;
            }
            row[nv + r] = -1.0;
            row[next_art] = 1.0;
            row[cols] = c.rhs.value;
            basis[r] = next_art;
            next_art += 1;
        } else {
            // -A x + s = -b >= 0
            for (j, coef) in &c.coefs {
                row[*j] -= coef.value;
            }
            row[nv + r] = 1.0;
            row[cols] = -c.rhs.value;
            basis[r] = nv + r;
        }
    }
    let mut tab = Tableau {
        t,
        obj: Vec::new(),
        basis,
        cols,
        iterations: 0,
    };

    let finish = |status: LpStatus, tab: &Tableau| {
        let mut x = vec![0.0; nv];
        for (r, &b) in tab.basis.iter().enumerate() {
            if b < nv {
                x[b] = tab.rhs(r);
            }
        }
        LpSolution {
            status,
            objective: model.evaluate(&x),
            max_violation: model.max_violation(&x),
            primal: x,
            iterations: tab.iterations,
        }
    };

    if n_art > 0 {
        let mut cost = vec![0.0; cols];
        for c in &mut cost[art_start..] {
            *c = 1.0;
        }
        tab.set_objective(&cost);
        match tab.run(cols) {
            Outcome::Optimal => {}
            Outcome::IterationLimit => return finish(LpStatus::IterationLimit, &tab),
            Outcome::Unbounded => unreachable!("phase one is bounded below by zero"),
        }
        let scale = model
            .constraints
            .iter()
            .map(|c| c.rhs.value.abs())
            .fold(1.0, f64::max);
        if -tab.obj[cols] > PIVOT_TOL * scale {
            return finish(LpStatus::Infeasible, &tab);
        }
        // drive zero-level artificials out of the basis; drop redundant rows
        let mut r = 0;
        while r < tab.t.len() {
            if tab.basis[r] >= art_start {
                match (0..art_start).find(|&j| tab.t[r][j].abs() > PIVOT_TOL) {
                    Some(col) => tab.pivot(r, col),
                    None => {
                        tab.t.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    let mut cost = vec![0.0; cols];
    for (j, c) in model.objective.iter().enumerate() {
        cost[j] = c.value;
    }
    tab.set_objective(&cost);
    match tab.run(art_start) {
        Outcome::Optimal => finish(LpStatus::Optimal, &tab),
        Outcome::Unbounded => finish(LpStatus::Unbounded, &tab),
        Outcome::IterationLimit => finish(LpStatus::IterationLimit, &tab),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::model::{Coef, Constraint, LpFamily, LpMeta};

    fn model(nv: usize, objective: &[f64], rows: &[(&[f64], f64)]) -> LpModel {
        LpModel {
            meta: LpMeta {
                family: LpFamily::Beta,
                n: 0,
                lambda: None,
                beta: None,
            },
            var_names: (0..nv).map(|j| format!("x{j}")).collect(),
            objective: objective.iter().map(|&v| Coef::real(v)).collect(),
            objective_offset: Coef::int(0),
            constraints: rows
                .iter()
                .enumerate()
                .map(|(k, (coefs, rhs))| Constraint {
                    name: format!("r{k}"),
                    coefs: coefs
                        .iter()
                        .enumerate()
                        .filter(|(_, &v)| v != 0.0)
                        .map(|(j, &v)| (j, Coef::real(v)))
                        .collect(),
                    rhs: Coef::real(*rhs),
                })
                .collect(),
        }
    }

    #[test]
    fn single_bound() {
        let s = simplex_solve(&model(1, &[1.0], &[(&[1.0], 1.0)]));
        assert!(s.is_optimal());
        assert_eq!(s.objective, 1.0);
    }

    #[test]
    fn two_variables() {
        // min x + y, x + y >= 2, x >= 0.5
        let s = simplex_solve(&model(
            2,
            &[1.0, 1.0],
            &[(&[1.0, 1.0], 2.0), (&[1.0, 0.0], 0.5)],
        ));
        assert!(s.is_optimal());
        assert!((s.objective - 2.0).abs() < 1e-12);
        assert!(s.max_violation <= 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x >= 1 and -x >= 0
        let s = simplex_solve(&model(1, &[1.0], &[(&[1.0], 1.0), (&[-1.0], 0.0)]));
        assert_eq!(s.status, LpStatus::Infeasible);
        // min -x, x >= 1
        let s = simplex_solve(&model(1, &[-1.0], &[(&[1.0], 1.0)]));
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn negative_right_hand_sides_start_feasible() {
        // min x - y, -x - y >= -4, x >= 1 -> x = 1, y = 3
        let s = simplex_solve(&model(
            2,
            &[1.0, -1.0],
            &[(&[-1.0, -1.0], -4.0), (&[1.0, 0.0], 1.0)],
        ));
        assert!(s.is_optimal());
        assert!((s.objective + 2.0).abs() < 1e-12);
        assert!((s.primal[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_rows() {
        // the same row twice leaves an artificial basic at zero
        let s = simplex_solve(&model(
            2,
            &[1.0, 2.0],
            &[(&[1.0, 1.0], 1.0), (&[1.0, 1.0], 1.0)],
        ));
        assert!(s.is_optimal());
        assert!((s.objective - 1.0).abs() < 1e-12);
    }
}
