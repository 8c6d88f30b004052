//! Dense bounded-variable primal simplex.
//!
//! Solves `max c.x` subject to `a_i.x >= b_i` and finite boxes
//! `l <= x <= u`. Each row gets a surplus variable `s_i >= 0`
//! (`a_i.x - s_i = b_i`). Structural variables start at whichever of their
//! bounds violates the fewest rows; violated rows receive an artificial
//! variable and a phase-1 objective drives those to zero.

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

/// Primal feasibility tolerance.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Required agreement between primal and dual objective.
pub const DUALITY_TOL: f64 = 1e-8;

const PIVOT_TOL: f64 = 1e-9;
const REDUCED_COST_TOL: f64 = 1e-10;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_LIMIT: usize = 50;
const REFRESH_EVERY: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub rhs: f64,
}

/// `maximize objective.x` s.t. every `coefficients.x >= rhs`, `lower <= x <= upper`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> LpProblem {
        LpProblem { objective, lower, upper, constraints: Vec::new() }
    }

    pub fn add_constraint(&mut self, coefficients: Vec<f64>, rhs: f64) {
        self.constraints.push(Constraint { coefficients, rhs });
    }

    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::MalformedInput("bound vectors differ in length from the objective".into()));
        }
        for j in 0..n {
            let (l, u, c) = (self.lower[j], self.upper[j], self.objective[j]);
            if !(l.is_finite() && u.is_finite() && c.is_finite()) {
                return Err(Error::MalformedInput(format!("variable {j} has non-finite data")));
            }
            if l > u {
                return Err(Error::MalformedInput(format!("variable {j} has lower {l} > upper {u}")));
            }
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coefficients.len() != n {
                return Err(Error::MalformedInput(format!("constraint {i} has the wrong length")));
            }
            if !row.rhs.is_finite() || row.coefficients.iter().any(|a| !a.is_finite()) {
                return Err(Error::MalformedInput(format!("constraint {i} has non-finite data")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    /// One nonnegative multiplier per constraint.
    pub duals: Vec<f64>,
    pub objective_value: f64,
}

impl LpSolution {
    /// `min_{mu >= 0}`-side objective evaluated at the reported duals:
    /// `-mu.b + sum_j max(d_j l_j, d_j u_j)` with `d = c + A^T mu`.
    pub fn dual_objective(&self, problem: &LpProblem) -> f64 {
        let mut d = problem.objective.clone();
        let mut value = 0.0;
        for (row, &mu) in problem.constraints.iter().zip(&self.duals) {
            value -= mu * row.rhs;
            for (dj, a) in d.iter_mut().zip(&row.coefficients) {
                *dj += mu * a;
            }
        }
        value
            + d.iter()
                .zip(problem.lower.iter().zip(&problem.upper))
                .map(|(&dj, (&l, &u))| (dj * l).max(dj * u))
                .sum::<f64>()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Basic,
    AtLower,
    AtUpper,
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// Row-major `rows x cols` matrix `B^-1 [A | -I | art]`.
    t: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    value: Vec<f64>,
    state: Vec<State>,
    basis: Vec<usize>,
    cost: Vec<f64>,
    reduced: Vec<f64>,
    /// Columns that may enter the basis.
    enterable: Vec<bool>,
}

impl Tableau {
    fn row(&self, i: usize) -> &[f64] {
        &self.t[i * self.cols..(i + 1) * self.cols]
    }

    fn refresh_reduced_costs(&mut self) {
        self.reduced.copy_from_slice(&self.cost);
        for i in 0..self.rows {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * self.cols..(i + 1) * self.cols];
                for (r, &a) in self.reduced.iter_mut().zip(row) {
                    *r -= cb * a;
                }
            }
        }
        for &b in &self.basis {
            self.reduced[b] = 0.0;
        }
    }

    fn objective(&self) -> f64 {
        self.cost.iter().zip(&self.value).map(|(c, v)| c * v).sum()
    }

    /// Entering column and direction (+1 increase, -1 decrease).
    fn choose_entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.cols {
            if !self.enterable[j] || self.state[j] == State::Basic {
                continue;
            }
            let d = self.reduced[j];
            let dir = match self.state[j] {
                State::AtLower if d < -REDUCED_COST_TOL && self.upper[j] > self.lower[j] => 1.0,
                State::AtUpper if d > REDUCED_COST_TOL && self.upper[j] > self.lower[j] => -1.0,
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(_, _, score)| d.abs() > score) {
                best = Some((j, dir, d.abs()));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// Ratio test. Returns the step and the leaving row (`None` for a bound flip).
    fn ratio_test(&self, q: usize, dir: f64, bland: bool) -> Option<(f64, Option<usize>)> {
        let mut step = self.upper[q] - self.lower[q];
        let mut leave: Option<usize> = None;
        let mut leave_size = 0.0;
        if !step.is_finite() {
            step = f64::INFINITY;
        }
        for i in 0..self.rows {
            let a = self.t[i * self.cols + q];
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let b = self.basis[i];
            // basic variable moves by -dir * a per unit step
            let rate = -dir * a;
            let limit = if rate < 0.0 {
                (self.value[b] - self.lower[b]).max(0.0) / -rate
            } else if self.upper[b].is_finite() {
                (self.upper[b] - self.value[b]).max(0.0) / rate
            } else {
                continue;
            };
            let better = if bland {
                limit < step - 1e-12 || (limit <= step + 1e-12 && leave.is_some_and(|r| self.basis[i] < self.basis[r]))
            } else {
                limit < step - 1e-12 || (limit <= step + 1e-12 && leave.is_some() && a.abs() > leave_size)
            };
            if better || (leave.is_none() && limit < step) {
                step = limit;
                leave = Some(i);
                leave_size = a.abs();
            }
        }
        if step.is_infinite() {
            return None;
        }
        Some((step, leave))
    }

    fn pivot(&mut self, q: usize, dir: f64, step: f64, leave: Option<usize>) {
        if step != 0.0 {
            self.value[q] += dir * step;
            for i in 0..self.rows {
                let a = self.t[i * self.cols + q];
                if a != 0.0 {
                    let b = self.basis[i];
                    self.value[b] -= dir * step * a;
                }
            }
        }
        let Some(r) = leave else {
            self.state[q] = if dir > 0.0 { State::AtUpper } else { State::AtLower };
            self.value[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
            return;
        };
        let out = self.basis[r];
        let rate = -dir * self.t[r * self.cols + q];
        if rate < 0.0 {
            self.state[out] = State::AtLower;
            self.value[out] = self.lower[out];
        } else {
            self.state[out] = State::AtUpper;
            self.value[out] = self.upper[out];
        }
        self.state[q] = State::Basic;
        self.basis[r] = q;

        let cols = self.cols;
        let p = self.t[r * cols + q];
        {
            let row = &mut self.t[r * cols..(r + 1) * cols];
            for a in row.iter_mut() {
                *a /= p;
            }
            row[q] = 1.0;
        }
        let pivot_row: Vec<f64> = self.row(r).to_vec();
        let nonzero: Vec<usize> = (0..cols).filter(|&j| pivot_row[j] != 0.0).collect();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * cols + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * cols..(i + 1) * cols];
            for &j in &nonzero {
                row[j] -= f * pivot_row[j];
            }
            row[q] = 0.0;
        }
        let f = self.reduced[q];
        if f != 0.0 {
            for &j in &nonzero {
                self.reduced[j] -= f * pivot_row[j];
            }
            self.reduced[q] = 0.0;
        }
    }

    /// Minimizes the current cost vector. Returns an error on iteration overflow.
    fn optimize(&mut self) -> Result<()> {
        self.refresh_reduced_costs();
        let limit = 50_000 + 20 * (self.rows + self.cols);
        let mut degenerate = 0;
        for iter in 0..limit {
            if iter > 0 && iter % REFRESH_EVERY == 0 {
                self.refresh_reduced_costs();
            }
            let bland = degenerate >= DEGENERATE_LIMIT;
            let Some((q, dir)) = self.choose_entering(bland) else {
                // confirm with fresh reduced costs before declaring optimality
                self.refresh_reduced_costs();
                if self.choose_entering(bland).is_none() {
                    return Ok(());
                }
                continue;
            };
            let Some((step, leave)) = self.ratio_test(q, dir, bland) else {
                return Err(Error::Internal("LP is unbounded despite finite boxes".into()));
            };
            if step <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(q, dir, step, leave);
        }
        Err(Error::Internal("simplex iteration limit reached".into()))
    }
}

/// Solves the LP to optimality or proves it infeasible.
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution> {
    problem.validate()?;
    let n = problem.objective.len();
    let m = problem.constraints.len();

    let x0 = starting_point(problem);
    let activity: Vec<f64> = problem.constraints.iter().map(|row| dot(&row.coefficients, &x0)).collect();
    let violated: Vec<usize> = (0..m).filter(|&i| activity[i] < problem.constraints[i].rhs - FEASIBILITY_TOL).collect();
    let k = violated.len();
    let cols = n + m + k;

    let mut t = vec![0.0; m * cols];
    let mut lower = Vec::with_capacity(cols);
    let mut upper = Vec::with_capacity(cols);
    let mut value = Vec::with_capacity(cols);
    let mut state = Vec::with_capacity(cols);
    lower.extend_from_slice(&problem.lower);
    upper.extend_from_slice(&problem.upper);
    for j in 0..n {
        value.push(x0[j]);
        state.push(if x0[j] == problem.upper[j] && problem.upper[j] > problem.lower[j] {
            State::AtUpper
        } else {
            State::AtLower
        });
    }
    lower.extend(std::iter::repeat_n(0.0, m + k));
    upper.extend(std::iter::repeat_n(f64::INFINITY, m));
    let mut basis = vec![0; m];
    let mut art_of_row = vec![usize::MAX; m];
    for (a, &i) in violated.iter().enumerate() {
        art_of_row[i] = a;
    }
    for (i, row) in problem.constraints.iter().enumerate() {
        let tr = &mut t[i * cols..(i + 1) * cols];
        if art_of_row[i] == usize::MAX {
            // -a.x + s = -b with s basic
            for j in 0..n {
                tr[j] = -row.coefficients[j];
            }
            tr[n + i] = 1.0;
            basis[i] = n + i;
        } else {
            // a.x - s + t = b with t basic
            tr[..n].copy_from_slice(&row.coefficients);
            tr[n + i] = -1.0;
            let col = n + m + art_of_row[i];
            tr[col] = 1.0;
            basis[i] = col;
        }
    }
    for i in 0..m {
        let surplus = activity[i] - problem.constraints[i].rhs;
        if art_of_row[i] == usize::MAX {
            value.push(surplus.max(0.0));
            state.push(State::Basic);
        } else {
            value.push(0.0);
            state.push(State::AtLower);
        }
    }
    for &i in &violated {
        let need = problem.constraints[i].rhs - activity[i];
        upper.push(need);
        value.push(need);
        state.push(State::Basic);
    }

    let mut tab = Tableau {
        rows: m,
        cols,
        t,
        lower,
        upper,
        value,
        state,
        basis,
        cost: vec![0.0; cols],
        reduced: vec![0.0; cols],
        enterable: vec![true; cols],
    };

    if k > 0 {
        for a in 0..k {
            tab.cost[n + m + a] = 1.0;
        }
        tab.optimize()?;
        let infeasibility = tab.objective();
        let scale = 1.0 + problem.constraints.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);
        if infeasibility > FEASIBILITY_TOL * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: tab.value[..n].to_vec(),
                duals: vec![0.0; m],
                objective_value: f64::NAN,
            });
        }
        for a in 0..k {
            let col = n + m + a;
            tab.cost[col] = 0.0;
            tab.upper[col] = 0.0;
            tab.enterable[col] = false;
            if tab.state[col] != State::Basic {
                tab.value[col] = 0.0;
                tab.state[col] = State::AtLower;
            }
        }
    }

    for j in 0..n {
        tab.cost[j] = -problem.objective[j];
    }
    tab.optimize()?;

    let mut x: Vec<f64> = tab.value[..n].to_vec();
    for j in 0..n {
        x[j] = x[j].clamp(problem.lower[j], problem.upper[j]);
    }
    // reduced cost of the surplus column -e_i equals the row multiplier
    let duals: Vec<f64> = (0..m).map(|i| tab.reduced[n + i].max(0.0)).collect();
    for (i, row) in problem.constraints.iter().enumerate() {
        let residual = dot(&row.coefficients, &x) - row.rhs;
        let scale = 1.0 + row.rhs.abs() + row.coefficients.iter().map(|a| a.abs()).sum::<f64>();
        if residual < -1e-7 * scale {
            return Err(Error::Internal(format!("simplex drifted: constraint {i} violated by {}", -residual)));
        }
    }
    let objective_value = dot(&problem.objective, &x);
    Ok(LpSolution { status: LpStatus::Optimal, x, duals, objective_value })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Of three bound assignments (objective-preferred, all upper, all lower),
/// the one violating the fewest rows.
fn starting_point(problem: &LpProblem) -> Vec<f64> {
    let n = problem.objective.len();
    let preferred: Vec<f64> =
        (0..n).map(|j| if problem.objective[j] > 0.0 { problem.upper[j] } else { problem.lower[j] }).collect();
    let candidates = [preferred, problem.upper.clone(), problem.lower.clone()];
    let violations = |x: &[f64]| {
        problem.constraints.iter().filter(|row| dot(&row.coefficients, x) < row.rhs - FEASIBILITY_TOL).count()
    };
    let mut best = 0;
    let mut best_count = usize::MAX;
    for (c, x) in candidates.iter().enumerate() {
        let count = violations(x);
        if count < best_count {
            best = c;
            best_count = count;
        }
    }
    candidates[best].clone()
}
