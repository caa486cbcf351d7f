//! Master problem: choose the configuration `x` (and the view-change
//! estimate `theta`) minimizing normal-case delay plus `theta`, subject to
//! the assignment, leader and committee-size constraints and every Benders
//! cut collected so far.
//!
//! Solved exactly by depth-first branch-and-bound over the `x` binaries
//! with linear-relaxation bounds from [`crate::lp`]. Branching picks the
//! first fractional `x_ij` in `(i, j)` order and explores the 1-branch
//! first.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::config::Configuration;
use crate::instance::Instance;
use crate::lp::{LinearProgram, LpStatus, Sense, Simplex};
use crate::objective::normal_objective_unchecked;
use crate::OBJ_TOL;

const INTEGRALITY_TOL: f64 = 1e-6;

/// Linear lower bound on `theta`: `theta >= constant + sum coefs[i*n+j] x_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCut {
    pub constant: f64,
    pub coefs: Vec<f64>,
}

impl LinearCut {
    pub fn zero(n: usize) -> Self {
        Self {
            constant: 0.0,
            coefs: alloc::vec![0.0; n * n],
        }
    }

    /// Right-hand side at an integral configuration.
    pub fn evaluate(&self, cfg: &Configuration) -> f64 {
        let n = cfg.n();
        let mut v = self.constant;
        for j in 0..n {
            v += self.coefs[cfg.leader_of(j) * n + j];
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum MasterError {
    #[error("no configuration satisfies the committee constraints")]
    Infeasible,
    #[error("branch-and-bound node limit {0} reached")]
    NodeLimit(usize),
    #[error("linear relaxation failed: {0:?}")]
    Relaxation(LpStatus),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MasterSolution {
    pub cfg: Configuration,
    /// `max(theta_lb, max cut)` at `cfg`; zero when there is no `theta`.
    pub theta: f64,
    /// Normal-case delay plus `theta`.
    pub value: f64,
    pub nodes: usize,
    /// Simplex pivots over all nodes.
    pub pivots: usize,
}

#[derive(Debug, Clone)]
pub struct MasterOptions {
    /// `None` drops `theta` (normal-case model).
    pub theta_lower_bound: Option<f64>,
    pub node_limit: usize,
}

impl Default for MasterOptions {
    fn default() -> Self {
        Self {
            theta_lower_bound: Some(0.0),
            node_limit: 2_000_000,
        }
    }
}

/// Value of the master objective at a fixed configuration.
pub fn master_value(inst: &Instance, cuts: &[LinearCut], theta_lb: Option<f64>, cfg: &Configuration) -> (f64, f64) {
    let normal = normal_objective_unchecked(inst, cfg);
    let theta = match theta_lb {
        None => 0.0,
        Some(lb) => cuts.iter().map(|c| c.evaluate(cfg)).fold(lb, f64::max),
    };
    (normal + theta, theta)
}

/// Builds the relaxation: variables `x_ij` at `i*n+j`, then the shifted
/// `theta - theta_lb` if present.
fn build_lp(inst: &Instance, cuts: &[LinearCut], theta_lb: Option<f64>) -> LinearProgram {
    let n = inst.n();
    let mut lp = LinearProgram::new();
    for i in 0..n {
        for j in 0..n {
            let c = if i == j { inst.verify_delay(i) } else { inst.delay(i, j) };
            lp.add_var(c, 0.0, 1.0);
        }
    }
    let theta = theta_lb.map(|_| lp.add_var(1.0, 0.0, f64::INFINITY));
    for j in 0..n {
        lp.add_row((0..n).map(|i| (i * n + j, 1.0)).collect(), Sense::Eq, 1.0);
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                lp.add_row(alloc::vec![(i * n + j, 1.0), (i * n + i, -1.0)], Sense::Le, 0.0);
            }
        }
    }
    let min_followers = inst.min_followers() as f64;
    for i in 0..n {
        let mut coefs: Vec<(usize, f64)> = (0..n).filter(|&j| j != i).map(|j| (i * n + j, 1.0)).collect();
        coefs.push((i * n + i, -min_followers));
        lp.add_row(coefs, Sense::Ge, 0.0);
    }
    if let (Some(t), Some(lb)) = (theta, theta_lb) {
        for cut in cuts {
            let mut coefs: Vec<(usize, f64)> = cut
                .coefs
                .iter()
                .enumerate()
                .filter(|(_, &a)| a != 0.0)
                .map(|(v, &a)| (v, -a))
                .collect();
            coefs.push((t, 1.0));
            lp.add_row(coefs, Sense::Ge, cut.constant - lb);
        }
    }
    lp
}

type Fixings = Vec<(usize, f64)>;

enum Pending {
    Basis(Box<Simplex>, Fixings),
    Fixings(Fixings),
}

fn integral_configuration(n: usize, x: &[f64]) -> Option<Configuration> {
    let mut leader_of = alloc::vec![usize::MAX; n];
    for i in 0..n {
        for j in 0..n {
            let v = x[i * n + j];
            if v > INTEGRALITY_TOL && v < 1.0 - INTEGRALITY_TOL {
                return None;
            }
            if v >= 1.0 - INTEGRALITY_TOL {
                leader_of[j] = i;
            }
        }
    }
    Some(Configuration::from_assignment(leader_of))
}

fn first_fractional(n: usize, x: &[f64]) -> Option<usize> {
    (0..n * n).find(|&v| x[v] > INTEGRALITY_TOL && x[v] < 1.0 - INTEGRALITY_TOL)
}

/// Solves the master problem exactly. `warm` configurations (assumed
/// feasible) seed the incumbent.
pub fn solve_master(
    inst: &Instance,
    cuts: &[LinearCut],
    warm: &[Configuration],
    opts: &MasterOptions,
) -> Result<MasterSolution, MasterError> {
    if !inst.admits_committee() {
        return Err(MasterError::Infeasible);
    }
    let n = inst.n();
    let theta_lb = opts.theta_lower_bound;
    let offset = theta_lb.unwrap_or(0.0);
    let lp = build_lp(inst, cuts, theta_lb);

    let mut best: Option<(Configuration, f64, f64)> = None;
    for cfg in warm {
        let (value, theta) = master_value(inst, cuts, theta_lb, cfg);
        if best.as_ref().is_none_or(|b| value < b.1 - OBJ_TOL) {
            best = Some((cfg.clone(), value, theta));
        }
    }

    let mut root = Simplex::new(&lp);
    match root.run_two_phase(&lp) {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(MasterError::Infeasible),
        other => return Err(MasterError::Relaxation(other)),
    }

    // Pending 0-branches keep a copy of their parent's basis when the
    // tableau is small; otherwise they are rebuilt from the root.
    let keep_basis = lp.num_rows() * (lp.num_vars() + lp.num_rows()) <= 1 << 18;
    let mut nodes = 0usize;
    let mut pivots = root.iterations();
    let mut pending: Vec<Pending> = Vec::new();
    let mut current: Option<(Simplex, Fixings, LpStatus)> = Some((root.clone(), Vec::new(), LpStatus::Optimal));

    loop {
        let (mut simplex, fixings, status) = match current.take() {
            Some(c) => c,
            None => match pending.pop() {
                None => break,
                Some(Pending::Basis(s, fixings)) => {
                    let mut s = *s;
                    let &(v, val) = fixings.last().expect("branch has a fixing");
                    let before = s.iterations();
                    s.set_bounds(v, val, val);
                    let st = s.reoptimize();
                    pivots += s.iterations() - before;
                    (s, fixings, st)
                }
                Some(Pending::Fixings(fixings)) => {
                    let mut s = root.clone();
                    for &(v, val) in &fixings {
                        s.set_bounds(v, val, val);
                    }
                    let st = s.reoptimize();
                    pivots += s.iterations() - root.iterations();
                    (s, fixings, st)
                }
            },
        };
        nodes += 1;
        if nodes > opts.node_limit {
            return Err(MasterError::NodeLimit(opts.node_limit));
        }
        match status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => continue,
            other => return Err(MasterError::Relaxation(other)),
        }
        let x = simplex.values();
        let bound = lp.evaluate(&x) + offset;
        if let Some((_, incumbent, _)) = &best {
            if bound >= incumbent - OBJ_TOL {
                continue;
            }
        }
        match first_fractional(n, &x) {
            None => {
                if let Some(cfg) = integral_configuration(n, &x) {
                    let (value, theta) = master_value(inst, cuts, theta_lb, &cfg);
                    if best.as_ref().is_none_or(|b| value < b.1 - OBJ_TOL) {
                        best = Some((cfg, value, theta));
                    }
                }
            }
            Some(v) => {
                let mut zero = fixings.clone();
                zero.push((v, 0.0));
                pending.push(if keep_basis {
                    Pending::Basis(Box::new(simplex.clone()), zero)
                } else {
                    Pending::Fixings(zero)
                });
                let mut one = fixings;
                one.push((v, 1.0));
                let before = simplex.iterations();
                simplex.set_bounds(v, 1.0, 1.0);
                let st = simplex.reoptimize();
                pivots += simplex.iterations() - before;
                current = Some((simplex, one, st));
            }
        }
    }

    match best {
        Some((cfg, value, theta)) => Ok(MasterSolution {
            cfg,
            theta,
            value,
            nodes,
            pivots,
        }),
        None => Err(MasterError::Infeasible),
    }
}
