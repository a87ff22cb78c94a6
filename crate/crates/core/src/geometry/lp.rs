//! Dense two-phase simplex for the small linear programs behind support
//! functions, emptiness tests and redundancy removal.
//!
//! Problems have the form `maximize c·x s.t. a_i·x <= b_i` with `x` free.
//! Free variables are split as `x = x⁺ - x⁻`; every row gets a slack, and rows
//! with a negative right-hand side are sign-flipped and given an artificial
//! variable for phase 1. Pivoting uses Dantzig's rule and switches to Bland's
//! rule after a fixed number of iterations so degenerate cycling terminates.

use crate::error::{check_dim, Error, Result};
use crate::tolerance::Tolerances;

/// `maximize objective·x` subject to `normal·x <= offset` for each constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<(Vec<f64>, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, point: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }
}

pub fn lp_solve(problem: &LpProblem, tol: &Tolerances) -> Result<LpOutcome> {
    let n = problem.objective.len();
    let mut a = Vec::with_capacity(problem.constraints.len() * n);
    let mut b = Vec::with_capacity(problem.constraints.len());
    for (normal, offset) in &problem.constraints {
        check_dim("lp_solve constraint", n, normal.len())?;
        a.extend_from_slice(normal);
        b.push(*offset);
    }
    solve_dense(&problem.objective, &a, &b, tol)
}

/// Same as [`lp_solve`] with the constraint matrix given row-major.
pub(crate) fn solve_dense(c: &[f64], a: &[f64], b: &[f64], tol: &Tolerances) -> Result<LpOutcome> {
    let n = c.len();
    let m = b.len();
    if a.len() != m * n {
        return Err(Error::DimensionMismatch {
            context: "lp_solve matrix",
            expected: m * n,
            found: a.len(),
        });
    }
    if c.iter().chain(a).chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite LP data".into()));
    }
    if m == 0 {
        return Ok(if c.iter().all(|&v| v.abs() <= tol.lp) {
            LpOutcome::Optimal {
                value: 0.0,
                point: vec![0.0; n],
            }
        } else {
            LpOutcome::Unbounded
        });
    }

    let mut t = Tableau::new(c, a, b);
    let real_cols = 2 * n + m;

    if t.n_art > 0 {
        let mut phase1 = vec![0.0; t.cols];
        for j in real_cols..t.cols {
            phase1[j] = -1.0;
        }
        t.set_objective(&phase1);
        t.iterate(t.cols, tol)?;
        let bmax = b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if t.objective_value() < -tol.lp * (1.0 + bmax) {
            return Ok(LpOutcome::Infeasible);
        }
        t.drive_out_artificials(real_cols, tol);
    }

    let mut phase2 = vec![0.0; t.cols];
    for j in 0..n {
        phase2[j] = c[j];
        phase2[n + j] = -c[j];
    }
    t.set_objective(&phase2);
    match t.iterate(real_cols, tol)? {
        Status::Unbounded => Ok(LpOutcome::Unbounded),
        Status::Optimal => {
            let mut point = vec![0.0; n];
            for (row, &var) in t.basis.iter().enumerate() {
                let v = t.rhs(row);
                if var < n {
                    point[var] += v;
                } else if var < 2 * n {
                    point[var - n] -= v;
                }
            }
            let value = c.iter().zip(&point).map(|(ci, xi)| ci * xi).sum();
            Ok(LpOutcome::Optimal { value, point })
        }
    }
}

enum Status {
    Optimal,
    Unbounded,
}

struct Tableau {
    m: usize,
    cols: usize,
    n_art: usize,
    // (m + 1) rows of (cols + 1) entries; last row is the reduced-cost row,
    // last column the right-hand side.
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(c: &[f64], a: &[f64], b: &[f64]) -> Self {
        let n = c.len();
        let m = b.len();
        let n_art = b.iter().filter(|&&v| v < 0.0).count();
        let cols = 2 * n + m + n_art;
        let width = cols + 1;
        let mut data = vec![0.0; (m + 1) * width];
        let mut basis = Vec::with_capacity(m);
        let mut next_art = 2 * n + m;
        for i in 0..m {
            let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
            let row = &mut data[i * width..(i + 1) * width];
            for j in 0..n {
                row[j] = sign * a[i * n + j];
                row[n + j] = -sign * a[i * n + j];
            }
            row[2 * n + i] = sign;
            row[cols] = sign * b[i];
            if sign < 0.0 {
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            } else {
                basis.push(2 * n + i);
            }
        }
        Self {
            m,
            cols,
            n_art,
            data,
            basis,
        }
    }

    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width() + col]
    }

    fn rhs(&self, row: usize) -> f64 {
        self.at(row, self.cols)
    }

    fn objective_value(&self) -> f64 {
        self.rhs(self.m)
    }

    fn set_objective(&mut self, cost: &[f64]) {
        let w = self.width();
        let obj = self.m * w;
        for j in 0..w {
            self.data[obj + j] = if j < self.cols { -cost[j] } else { 0.0 };
        }
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for j in 0..w {
                    self.data[obj + j] += cb * self.data[i * w + j];
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let w = self.width();
        let p = self.at(r, s);
        for j in 0..w {
            self.data[r * w + j] /= p;
        }
        self.data[r * w + s] = 1.0;
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let f = self.data[i * w + s];
            if f != 0.0 {
                for j in 0..w {
                    self.data[i * w + j] -= f * self.data[r * w + j];
                }
                self.data[i * w + s] = 0.0;
            }
        }
        self.basis[r] = s;
    }

    /// Runs simplex iterations, letting only columns `< allowed` enter.
    fn iterate(&mut self, allowed: usize, tol: &Tolerances) -> Result<Status> {
        let size = self.m + self.cols;
        let bland_after = 5 * size + 50;
        let cap = 50 * size + 1000;
        let obj = self.m;
        for it in 0..cap {
            let bland = it >= bland_after;
            let mut entering = None;
            let mut best = -tol.lp;
            for j in 0..allowed {
                let d = self.at(obj, j);
                if d < -tol.lp {
                    if bland {
                        entering = Some(j);
                        break;
                    }
                    if d < best {
                        best = d;
                        entering = Some(j);
                    }
                }
            }
            let Some(s) = entering else {
                return Ok(Status::Optimal);
            };

            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, s);
                if a > tol.lp {
                    let ratio = self.rhs(i).max(0.0) / a;
                    leaving = match leaving {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            if ratio < best - 1e-12
                                || (ratio <= best + 1e-12 && self.basis[i] < self.basis[r])
                            {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leaving else {
                return Ok(Status::Unbounded);
            };
            self.pivot(r, s);
        }
        Err(Error::Numerical(format!(
            "simplex exceeded {cap} iterations ({} rows, {} columns)",
            self.m, self.cols
        )))
    }

    /// Pivots zero-level artificial variables out of the basis after phase 1.
    /// Rows where no real column can replace them are linearly redundant and
    /// stay inert.
    fn drive_out_artificials(&mut self, real_cols: usize, tol: &Tolerances) {
        for i in 0..self.m {
            if self.basis[i] < real_cols {
                continue;
            }
            let candidate = (0..real_cols)
                .filter(|&j| self.at(i, j).abs() > tol.lp)
                .max_by(|&x, &y| self.at(i, x).abs().total_cmp(&self.at(i, y).abs()));
            if let Some(j) = candidate {
                self.pivot(i, j);
            }
        }
    }
}
