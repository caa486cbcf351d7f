//! Dense bounded-variable simplex.
//!
//! Minimizes `c'x` subject to linear rows and `lo <= x <= hi`, every lower
//! bound finite. Two-phase primal simplex with Dantzig pricing that drops to
//! Bland's rule while pivots are degenerate, which rules out cycling. A
//! bounded dual simplex re-optimizes after bound changes so branch-and-bound
//! children can start from their parent's basis.

use alloc::sync::Arc;
use alloc::vec::Vec;

/// Pivot, feasibility and optimality tolerance.
pub const LP_TOL: f64 = 1e-9;

/// Smallest tableau entry accepted as a pivot.
const PIVOT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coefs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A linear program in builder form.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable and returns its index. `upper` may be infinite.
    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        debug_assert!(lower.is_finite() && lower <= upper);
        self.cost.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.cost.len() - 1
    }

    pub fn add_row(&mut self, coefs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> usize {
        self.rows.push(Row { coefs, sense, rhs });
        self.rows.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    /// Objective at `x`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest row or bound violation at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, (&lo, &hi)) in x.iter().zip(self.lower.iter().zip(&self.upper)) {
            worst = worst.max(lo - v).max(v - hi);
        }
        for row in &self.rows {
            let lhs: f64 = row.coefs.iter().map(|&(j, a)| a * x[j]).sum();
            let viol = match row.sense {
                Sense::Le => lhs - row.rhs,
                Sense::Ge => row.rhs - lhs,
                Sense::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Structural variable values (meaningful when optimal).
    pub x: Vec<f64>,
    pub objective: f64,
    /// Row duals `pi` with reduced costs `c - A'pi`.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic,
    AtLower,
    AtUpper,
}

/// Simplex working state; cloning it snapshots a basis.
#[derive(Debug, Clone)]
pub struct Simplex {
    m: usize,
    ncol: usize,
    nstruct: usize,
    /// `B^-1 A`, row-major `m x ncol`.
    tab: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    status: Vec<Status>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    reduced: Vec<f64>,
    /// Column carrying `+-e_r` for row `r` and its sign.
    row_unit: Vec<(usize, f64)>,
    artificial_from: usize,
    iterations: usize,
    max_iterations: usize,
    /// Initial tableau and right-hand side, for refactorization.
    original: Arc<(Vec<f64>, Vec<f64>)>,
    since_refactor: usize,
}

const DEGENERATE_STREAK: usize = 30;
const REFACTOR_EVERY: usize = 400;

impl Simplex {
    /// Sets up the phase-one tableau.
    pub fn new(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let nstruct = lp.cost.len();
        let n_slack = lp.rows.iter().filter(|r| r.sense != Sense::Eq).count();
        // structural values at their lower bounds
        let x0 = &lp.lower;
        let residual: Vec<f64> = lp
            .rows
            .iter()
            .map(|r| r.rhs - r.coefs.iter().map(|&(j, a)| a * x0[j]).sum::<f64>())
            .collect();
        let needs_art: Vec<bool> = lp
            .rows
            .iter()
            .zip(&residual)
            .map(|(r, &res)| match r.sense {
                Sense::Le => res < 0.0,
                Sense::Ge => res > 0.0,
                Sense::Eq => true,
            })
            .collect();
        let n_art = needs_art.iter().filter(|&&b| b).count();
        let ncol = nstruct + n_slack + n_art;
        let artificial_from = nstruct + n_slack;

        let mut tab = alloc::vec![0.0; m * ncol];
        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        lower.resize(ncol, 0.0);
        upper.resize(ncol, f64::INFINITY);
        let mut status = alloc::vec![Status::AtLower; ncol];
        let mut basis = alloc::vec![0; m];
        let mut beta = alloc::vec![0.0; m];
        let mut row_unit = alloc::vec![(0, 1.0); m];
        let mut cost = alloc::vec![0.0; ncol];
        let mut rhs = alloc::vec![0.0; m];

        let mut slack = nstruct;
        let mut art = artificial_from;
        for (r, row) in lp.rows.iter().enumerate() {
            let line = &mut tab[r * ncol..(r + 1) * ncol];
            for &(j, a) in &row.coefs {
                line[j] += a;
            }
            let mut slack_col = None;
            match row.sense {
                Sense::Le => {
                    line[slack] = 1.0;
                    slack_col = Some((slack, 1.0));
                    slack += 1;
                }
                Sense::Ge => {
                    line[slack] = -1.0;
                    slack_col = Some((slack, -1.0));
                    slack += 1;
                }
                Sense::Eq => {}
            }
            let (basic, sign) = if needs_art[r] {
                let sign = if residual[r] >= 0.0 { 1.0 } else { -1.0 };
                line[art] = sign;
                cost[art] = 1.0;
                row_unit[r] = (art, sign);
                art += 1;
                (art - 1, sign)
            } else {
                let sc = slack_col.expect("inequality row has a slack");
                row_unit[r] = sc;
                sc
            };
            if let Some(sc) = slack_col {
                row_unit[r] = sc;
            }
            if sign < 0.0 {
                for v in line.iter_mut() {
                    *v = -*v;
                }
            }
            basis[r] = basic;
            status[basic] = Status::Basic;
            beta[r] = residual[r] * sign;
            rhs[r] = row.rhs * sign;
        }

        let original = Arc::new((tab.clone(), rhs));
        let mut s = Self {
            m,
            ncol,
            nstruct,
            tab,
            beta,
            basis,
            status,
            lower,
            upper,
            cost,
            reduced: alloc::vec![0.0; ncol],
            row_unit,
            artificial_from,
            iterations: 0,
            max_iterations: 50_000,
            original,
            since_refactor: 0,
        };
        s.recompute_reduced();
        s
    }

    /// Solves `lp` from scratch.
    pub fn solve(lp: &LinearProgram) -> LpSolution {
        let mut s = Self::new(lp);
        let status = s.run_two_phase(lp);
        s.solution(status, lp)
    }

    /// Runs both phases. After `Optimal`, the instance can be re-optimized
    /// with [`Simplex::set_bounds`] and [`Simplex::reoptimize`].
    pub fn run_two_phase(&mut self, lp: &LinearProgram) -> LpStatus {
        if self.artificial_from < self.ncol {
            match self.primal() {
                LpStatus::Optimal => {}
                LpStatus::Unbounded => return LpStatus::Infeasible,
                other => return other,
            }
            let infeas: f64 = (0..self.m)
                .filter(|&r| self.basis[r] >= self.artificial_from)
                .map(|r| self.beta[r])
                .sum();
            if infeas > 1e-7 {
                return LpStatus::Infeasible;
            }
            self.drive_out_artificials();
        }
        for j in self.artificial_from..self.ncol {
            self.upper[j] = 0.0;
            self.lower[j] = 0.0;
        }
        self.cost = lp.cost.clone();
        self.cost.resize(self.ncol, 0.0);
        self.recompute_reduced();
        self.primal()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Current value of structural variable `j`.
    pub fn value(&self, j: usize) -> f64 {
        match self.status[j] {
            Status::AtLower => self.lower[j],
            Status::AtUpper => self.upper[j],
            Status::Basic => {
                let r = self.basis.iter().position(|&b| b == j).expect("basic column in basis");
                self.beta[r]
            }
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let mut x: Vec<f64> = (0..self.nstruct)
            .map(|j| match self.status[j] {
                Status::AtLower => self.lower[j],
                Status::AtUpper => self.upper[j],
                Status::Basic => 0.0,
            })
            .collect();
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.nstruct {
                x[b] = self.beta[r];
            }
        }
        x
    }

    /// Row duals from the reduced costs of each row's unit column.
    pub fn duals(&self) -> Vec<f64> {
        self.row_unit
            .iter()
            .map(|&(col, sign)| -self.reduced[col] / sign)
            .collect()
    }

    pub fn solution(&self, status: LpStatus, lp: &LinearProgram) -> LpSolution {
        let x = self.values();
        let objective = lp.evaluate(&x);
        LpSolution {
            status,
            duals: self.duals(),
            x,
            objective,
            iterations: self.iterations,
        }
    }

    /// Changes the bounds of structural variable `j`, keeping the basis.
    pub fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        let old = match self.status[j] {
            Status::AtLower => Some(self.lower[j]),
            Status::AtUpper => Some(self.upper[j]),
            Status::Basic => None,
        };
        self.lower[j] = lo;
        self.upper[j] = hi;
        if let Some(old) = old {
            // keep dual feasibility: a variable with positive reduced cost
            // belongs at its lower bound
            let st = if self.reduced[j] < 0.0 && hi.is_finite() {
                Status::AtUpper
            } else {
                Status::AtLower
            };
            self.status[j] = st;
            let new = if st == Status::AtLower { lo } else { hi };
            let delta = new - old;
            if delta != 0.0 {
                for r in 0..self.m {
                    self.beta[r] -= self.tab[r * self.ncol + j] * delta;
                }
            }
        }
    }

    /// Restores primal feasibility with the dual simplex, then polishes with
    /// primal iterations.
    pub fn reoptimize(&mut self) -> LpStatus {
        match self.dual() {
            LpStatus::Optimal => self.primal(),
            other => other,
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.status[j] {
            Status::AtUpper => self.upper[j],
            _ => self.lower[j],
        }
    }

    /// Rebuilds `B^-1 A`, the basic values and the reduced costs from the
    /// original rows, discarding accumulated rounding error.
    fn refactor(&mut self) {
        let (m, ncol) = (self.m, self.ncol);
        let (a, b) = &*self.original;
        let width = m + ncol + 1;
        let mut aug = alloc::vec![0.0; m * width];
        for i in 0..m {
            let line = &mut aug[i * width..(i + 1) * width];
            let src = &a[i * ncol..(i + 1) * ncol];
            for (r, &col) in self.basis.iter().enumerate() {
                line[r] = src[col];
            }
            line[m..m + ncol].copy_from_slice(src);
            let mut rhs = b[i];
            for j in 0..ncol {
                if self.status[j] != Status::Basic && src[j] != 0.0 {
                    rhs -= src[j] * self.nonbasic_value(j);
                }
            }
            line[m + ncol] = rhs;
        }
        for c in 0..m {
            let p = (c..m)
                .max_by(|&x, &y| aug[x * width + c].abs().total_cmp(&aug[y * width + c].abs()))
                .expect("nonempty range");
            if aug[p * width + c].abs() < 1e-12 {
                return;
            }
            if p != c {
                for k in 0..width {
                    aug.swap(c * width + k, p * width + k);
                }
            }
            let piv = aug[c * width + c];
            for k in 0..width {
                aug[c * width + k] /= piv;
            }
            let (head, rest) = aug.split_at_mut(c * width);
            let (prow, tail) = rest.split_at_mut(width);
            let support: Vec<(usize, f64)> = prow
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(k, &v)| (k, v))
                .collect();
            for other in head.chunks_exact_mut(width).chain(tail.chunks_exact_mut(width)) {
                let f = other[c];
                if f != 0.0 {
                    for &(k, pv) in &support {
                        other[k] -= f * pv;
                    }
                }
            }
        }
        for r in 0..m {
            let line = &aug[r * width..(r + 1) * width];
            self.tab[r * ncol..(r + 1) * ncol].copy_from_slice(&line[m..m + ncol]);
            self.beta[r] = line[m + ncol];
        }
        for (r, &col) in self.basis.iter().enumerate() {
            for i in 0..m {
                self.tab[i * ncol + col] = if i == r { 1.0 } else { 0.0 };
            }
        }
        self.since_refactor = 0;
        self.recompute_reduced();
    }

    fn recompute_reduced(&mut self) {
        for j in 0..self.ncol {
            let mut d = self.cost[j];
            for r in 0..self.m {
                let t = self.tab[r * self.ncol + j];
                if t != 0.0 {
                    d -= self.cost[self.basis[r]] * t;
                }
            }
            self.reduced[j] = if self.status[j] == Status::Basic { 0.0 } else { d };
        }
    }

    fn movable(&self, j: usize) -> bool {
        self.upper[j] - self.lower[j] > LP_TOL
    }

    fn primal(&mut self) -> LpStatus {
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= self.max_iterations {
                return LpStatus::IterationLimit;
            }
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor();
            }
            let bland = degenerate >= DEGENERATE_STREAK;
            let mut entering = None;
            let mut best = 0.0;
            for j in 0..self.ncol {
                let st = self.status[j];
                if st == Status::Basic || !self.movable(j) {
                    continue;
                }
                let d = self.reduced[j];
                let gain = match st {
                    Status::AtLower if d < -LP_TOL => -d,
                    Status::AtUpper if d > LP_TOL => d,
                    _ => continue,
                };
                if bland {
                    entering = Some(j);
                    break;
                }
                if gain > best {
                    best = gain;
                    entering = Some(j);
                }
            }
            let Some(q) = entering else {
                if self.since_refactor >= REFACTOR_EVERY / 4 {
                    self.refactor();
                    if self.since_refactor == 0 {
                        continue;
                    }
                }
                return LpStatus::Optimal;
            };
            let dir = if self.status[q] == Status::AtLower { 1.0 } else { -1.0 };

            // ratio test: smallest step, ties broken by pivot size or,
            // under Bland, by lowest basic index
            let mut min_ratio = f64::INFINITY;
            for r in 0..self.m {
                if let Some(limit) = self.row_limit(r, q, dir) {
                    min_ratio = min_ratio.min(limit);
                }
            }
            let mut leave: Option<(usize, bool)> = None;
            if min_ratio.is_finite() {
                for r in 0..self.m {
                    let Some(limit) = self.row_limit(r, q, dir) else { continue };
                    if limit > min_ratio + LP_TOL {
                        continue;
                    }
                    let alpha = dir * self.tab[r * self.ncol + q];
                    let better = match leave {
                        None => true,
                        Some((lr, _)) if bland => self.basis[r] < self.basis[lr],
                        Some((lr, _)) => alpha.abs() > self.tab[lr * self.ncol + q].abs(),
                    };
                    if better {
                        leave = Some((r, alpha > 0.0));
                    }
                }
            }
            let range = self.upper[q] - self.lower[q];
            let step = if range <= min_ratio {
                leave = None;
                range
            } else {
                min_ratio
            };
            if step.is_infinite() {
                return LpStatus::Unbounded;
            }
            self.iterations += 1;
            if step > LP_TOL {
                degenerate = 0;
            } else {
                degenerate += 1;
            }
            for r in 0..self.m {
                let t = self.tab[r * self.ncol + q];
                if t != 0.0 {
                    self.beta[r] -= dir * t * step;
                }
            }
            match leave {
                None => {
                    self.status[q] = if dir > 0.0 { Status::AtUpper } else { Status::AtLower };
                }
                Some((r, to_lower)) => {
                    let entering_value = if dir > 0.0 {
                        self.lower[q] + step
                    } else {
                        self.upper[q] - step
                    };
                    let b = self.basis[r];
                    self.status[b] = if to_lower { Status::AtLower } else { Status::AtUpper };
                    self.pivot(r, q);
                    self.beta[r] = entering_value;
                }
            }
        }
    }

    /// Step at which basic variable of row `r` hits a bound when column `q`
    /// moves in direction `dir`.
    fn row_limit(&self, r: usize, q: usize, dir: f64) -> Option<f64> {
        let alpha = dir * self.tab[r * self.ncol + q];
        let b = self.basis[r];
        let limit = if alpha > PIVOT_TOL {
            (self.beta[r] - self.lower[b]) / alpha
        } else if alpha < -PIVOT_TOL && self.upper[b].is_finite() {
            (self.upper[b] - self.beta[r]) / -alpha
        } else {
            return None;
        };
        Some(limit.max(0.0))
    }

    fn dual(&mut self) -> LpStatus {
        loop {
            if self.iterations >= self.max_iterations {
                return LpStatus::IterationLimit;
            }
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor();
            }
            // leaving row: largest bound violation, lowest row on ties
            let mut leave = None;
            let mut worst = LP_TOL * 10.0;
            for r in 0..self.m {
                let b = self.basis[r];
                let v = if self.beta[r] < self.lower[b] {
                    self.lower[b] - self.beta[r]
                } else if self.beta[r] > self.upper[b] {
                    self.beta[r] - self.upper[b]
                } else {
                    continue;
                };
                if v > worst {
                    worst = v;
                    leave = Some(r);
                }
            }
            let Some(r) = leave else {
                if self.since_refactor >= REFACTOR_EVERY / 4 {
                    self.refactor();
                    if self.since_refactor == 0 {
                        continue;
                    }
                }
                return LpStatus::Optimal;
            };
            let b = self.basis[r];
            let below = self.beta[r] < self.lower[b];
            let target = if below { self.lower[b] } else { self.upper[b] };

            let mut entering = None;
            let mut best = f64::INFINITY;
            for j in 0..self.ncol {
                let st = self.status[j];
                if st == Status::Basic || !self.movable(j) {
                    continue;
                }
                let t = self.tab[r * self.ncol + j];
                // below: beta_r must rise, so x_j moves against the sign of t
                let eligible = match (below, st) {
                    (true, Status::AtLower) => t < -PIVOT_TOL,
                    (true, Status::AtUpper) => t > PIVOT_TOL,
                    (false, Status::AtLower) => t > PIVOT_TOL,
                    (false, Status::AtUpper) => t < -PIVOT_TOL,
                    _ => false,
                };
                if !eligible {
                    continue;
                }
                let ratio = (self.reduced[j] / t).abs();
                let tie_bigger = entering.is_some_and(|e: usize| {
                    ratio <= best + LP_TOL && t.abs() > self.tab[r * self.ncol + e].abs()
                });
                if ratio < best - LP_TOL || tie_bigger {
                    best = ratio;
                    entering = Some(j);
                }
            }
            let Some(q) = entering else {
                return LpStatus::Infeasible;
            };
            self.iterations += 1;
            let t = self.tab[r * self.ncol + q];
            let delta = (self.beta[r] - target) / t;
            let xq = match self.status[q] {
                Status::AtLower => self.lower[q],
                _ => self.upper[q],
            };
            for rr in 0..self.m {
                let a = self.tab[rr * self.ncol + q];
                if a != 0.0 {
                    self.beta[rr] -= a * delta;
                }
            }
            self.status[b] = if below { Status::AtLower } else { Status::AtUpper };
            self.pivot(r, q);
            self.beta[r] = xq + delta;
        }
    }

    /// Pivots column `q` into the basis at row `r`; updates the tableau and
    /// reduced costs but not `beta`.
    fn pivot(&mut self, r: usize, q: usize) {
        let ncol = self.ncol;
        let p = self.tab[r * ncol + q];
        {
            let row = &mut self.tab[r * ncol..(r + 1) * ncol];
            for v in row.iter_mut() {
                *v /= p;
            }
            row[q] = 1.0;
        }
        let (before, rest) = self.tab.split_at_mut(r * ncol);
        let (pivot_row, after) = rest.split_at_mut(ncol);
        let support: Vec<(usize, f64)> = pivot_row
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(k, &v)| (k, v))
            .collect();
        for other in before.chunks_exact_mut(ncol).chain(after.chunks_exact_mut(ncol)) {
            let f = other[q];
            if f != 0.0 {
                for &(k, pr) in &support {
                    other[k] -= f * pr;
                }
                other[q] = 0.0;
            }
        }
        let dq = self.reduced[q];
        if dq != 0.0 {
            for &(k, pr) in &support {
                self.reduced[k] -= dq * pr;
            }
        }
        self.reduced[q] = 0.0;
        self.status[q] = Status::Basic;
        self.basis[r] = q;
        self.since_refactor += 1;
    }

    fn drive_out_artificials(&mut self) {
        for r in 0..self.m {
            if self.basis[r] < self.artificial_from {
                continue;
            }
            let pick = (0..self.artificial_from)
                .filter(|&j| self.status[j] != Status::Basic)
                .find(|&j| self.tab[r * self.ncol + j].abs() > 1e-7);
            if let Some(q) = pick {
                let xq = match self.status[q] {
                    Status::AtLower => self.lower[q],
                    _ => self.upper[q],
                };
                let art = self.basis[r];
                let t = self.tab[r * self.ncol + q];
                let delta = self.beta[r] / t;
                for rr in 0..self.m {
                    let a = self.tab[rr * self.ncol + q];
                    if a != 0.0 {
                        self.beta[rr] -= a * delta;
                    }
                }
                self.status[art] = Status::AtLower;
                self.pivot(r, q);
                self.beta[r] = xq + delta;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-7
    }

    #[test]
    fn textbook_max() {
        // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18
        let mut lp = LinearProgram::new();
        let x = lp.add_var(-3.0, 0.0, f64::INFINITY);
        let y = lp.add_var(-5.0, 0.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0)], Sense::Le, 4.0);
        lp.add_row(vec![(y, 2.0)], Sense::Le, 12.0);
        lp.add_row(vec![(x, 3.0), (y, 2.0)], Sense::Le, 18.0);
        let s = Simplex::solve(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(close(s.objective, -36.0));
        assert!(close(s.x[0], 2.0) && close(s.x[1], 6.0));
        // duals: (0, -1.5, -1)
        assert!(close(s.duals[0], 0.0) && close(s.duals[1], -1.5) && close(s.duals[2], -1.0));
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + 2y + 3z st x + y + z = 10, y - z >= 2, 0 <= x <= 3
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.0, 0.0, 3.0);
        let y = lp.add_var(2.0, 0.0, f64::INFINITY);
        let z = lp.add_var(3.0, 0.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0), (y, 1.0), (z, 1.0)], Sense::Eq, 10.0);
        lp.add_row(vec![(y, 1.0), (z, -1.0)], Sense::Ge, 2.0);
        let s = Simplex::solve(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(close(s.objective, 3.0 + 14.0));
        assert!(lp.max_violation(&s.x) < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.0, 0.0, 1.0);
        lp.add_row(vec![(x, 1.0)], Sense::Ge, 2.0);
        assert_eq!(Simplex::solve(&lp).status, LpStatus::Infeasible);

        let mut lp = LinearProgram::new();
        let x = lp.add_var(-1.0, 0.0, f64::INFINITY);
        let y = lp.add_var(0.0, 0.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0), (y, -1.0)], Sense::Le, 1.0);
        assert_eq!(Simplex::solve(&lp).status, LpStatus::Unbounded);
    }

    #[test]
    fn nonzero_lower_bounds() {
        // min x + y st x + y >= 1, x in [2, 5], y in [-3, 4]
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.0, 2.0, 5.0);
        let y = lp.add_var(1.0, -3.0, 4.0);
        lp.add_row(vec![(x, 1.0), (y, 1.0)], Sense::Ge, 1.0);
        let s = Simplex::solve(&lp);
        assert!(close(s.objective, 1.0));
    }

    #[test]
    fn warm_restart_after_bound_change() {
        // min -x - y st x + y <= 1.5, x, y in [0, 1]
        let mut lp = LinearProgram::new();
        let x = lp.add_var(-1.0, 0.0, 1.0);
        let y = lp.add_var(-1.1, 0.0, 1.0);
        lp.add_row(vec![(x, 1.0), (y, 1.0)], Sense::Le, 1.5);
        let mut s = Simplex::new(&lp);
        assert_eq!(s.run_two_phase(&lp), LpStatus::Optimal);
        assert!(close(s.value(x), 0.5) && close(s.value(y), 1.0));
        let mut child = s.clone();
        child.set_bounds(y, 0.0, 0.0);
        assert_eq!(child.reoptimize(), LpStatus::Optimal);
        assert!(close(child.value(x), 1.0) && close(child.value(y), 0.0));
        s.set_bounds(x, 1.0, 1.0);
        assert_eq!(s.reoptimize(), LpStatus::Optimal);
        assert!(close(s.value(x), 1.0) && close(s.value(y), 0.5));
        s.set_bounds(y, 0.9, 1.0);
        assert_eq!(s.reoptimize(), LpStatus::Infeasible);
    }

    #[test]
    fn degenerate_assignment_polytope() {
        // 4x4 assignment, highly degenerate
        let cost = [
            [9.0, 2.0, 7.0, 8.0],
            [6.0, 4.0, 3.0, 7.0],
            [5.0, 8.0, 1.0, 8.0],
            [7.0, 6.0, 9.0, 4.0],
        ];
        let mut lp = LinearProgram::new();
        let mut v = [[0usize; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                v[i][j] = lp.add_var(cost[i][j], 0.0, 1.0);
            }
        }
        for i in 0..4 {
            lp.add_row((0..4).map(|j| (v[i][j], 1.0)).collect(), Sense::Eq, 1.0);
            lp.add_row((0..4).map(|j| (v[j][i], 1.0)).collect(), Sense::Eq, 1.0);
        }
        let s = Simplex::solve(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(close(s.objective, 13.0));
    }
}
