//! Benders decomposition of the view-change-aware model.
//!
//! The master chooses the configuration; each scenario (failure of node
//! `i`) is a 1-median subproblem solved in closed form by scanning the
//! takeover delay of every follower. Cuts come from feasible solutions of
//! the subproblem's linear dual over all of `x`, aggregated over scenarios
//! into one inequality per iteration.
//!
//! The dual uses the linearized coupling `y_k - z_jk <= x_ii - x_ij`
//! (multiplier `gamma_kj <= 0`), so that a cut is valid at every feasible
//! configuration and not only at the one that generated it.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::config::{BackupPlan, Configuration};
use crate::instance::Instance;
use crate::lp::{LinearProgram, LpStatus, Sense, Simplex};
use crate::master::{master_value, solve_master, LinearCut, MasterError, MasterOptions};
use crate::objective::{best_backup, committee_delay, normal_objective_unchecked};
use crate::oracle::evaluate_with_best_plan;
use crate::{NodeId, OBJ_TOL};

/// Default absolute optimality gap (ms).
pub const DEFAULT_TOL: f64 = 1e-6;

/// Above this node count the solvers switch to local search.
pub const DEFAULT_EXACT_LIMIT: usize = 30;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub tol: f64,
    /// Benders iteration cap; `None` means `10 * n`.
    pub max_iterations: Option<usize>,
    pub exact_limit: usize,
    pub node_limit: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iterations: None,
            exact_limit: DEFAULT_EXACT_LIMIT,
            node_limit: MasterOptions::default().node_limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BendersError {
    #[error("no feasible configuration: n = {n} needs at least {required} nodes")]
    Infeasible { n: usize, required: usize },
    #[error("iteration limit {limit} reached with gap {}", .incumbent.state.gap())]
    IterationLimit { limit: usize, incumbent: Box<Solution> },
    #[error(transparent)]
    Master(MasterError),
}

/// Optimal backup and `Q*_{S_i}` for the failure of `failed`; followers
/// yield `(None, 0.0)`.
pub fn solve_subproblem(inst: &Instance, cfg: &Configuration, failed: NodeId) -> (Option<NodeId>, f64) {
    if failed >= cfg.n() || !cfg.is_leader(failed) {
        return (None, 0.0);
    }
    let followers = cfg.followers(failed);
    let g = committee_delay(inst, failed, &followers);
    match best_backup(inst, &followers) {
        Some((k, exd)) => (Some(k), exd - g),
        None => (None, 0.0),
    }
}

/// Subproblem for leader `leader` over `followers` by exhaustive search over
/// binary `(y, z)`: every `y` vector, and for each follower every `z` row,
/// subject to one backup, `y_k <= z_jk` and one reassignment per follower.
/// Returns the best backup (lowest index on ties) and `Q*`. Exponential in
/// the committee size.
pub fn enumerate_subproblem(inst: &Instance, leader: NodeId, followers: &[NodeId]) -> Option<(NodeId, f64)> {
    let m = followers.len();
    let g = committee_delay(inst, leader, followers);
    let mut best: Option<(NodeId, f64)> = None;
    for y in 0u32..(1 << m) {
        if y.count_ones() != 1 {
            continue;
        }
        let mut value = 0.0;
        for (a, &k) in followers.iter().enumerate() {
            if y >> a & 1 == 1 {
                value += inst.verify_delay(k);
            }
        }
        let mut feasible = true;
        for &j in followers {
            let mut row_best = f64::INFINITY;
            for z in 0u32..(1 << m) {
                if z.count_ones() != 1 || y & !z != 0 {
                    continue;
                }
                let cost: f64 = followers
                    .iter()
                    .enumerate()
                    .filter(|&(a, _)| z >> a & 1 == 1)
                    .map(|(_, &k)| inst.delay(k, j))
                    .sum();
                row_best = row_best.min(cost);
            }
            if row_best.is_infinite() {
                feasible = false;
                break;
            }
            value += row_best;
        }
        if !feasible {
            continue;
        }
        let k = followers[y.trailing_zeros() as usize];
        let q = value - g;
        if best.is_none_or(|(_, bq)| q < bq - OBJ_TOL) {
            best = Some((k, q));
        }
    }
    best
}

/// `Q*(x) = sum_i f_i Q*_{S_i}(x)`.
pub fn q_star(inst: &Instance, cfg: &Configuration) -> f64 {
    cfg.leaders()
        .map(|i| inst.failure_prob(i) * solve_subproblem(inst, cfg, i).1)
        .sum()
}

/// Backup plan made of every subproblem's optimal backup.
pub fn optimal_plan(inst: &Instance, cfg: &Configuration) -> BackupPlan {
    let mut plan = BackupPlan::new();
    for i in cfg.leaders() {
        if let (Some(k), _) = solve_subproblem(inst, cfg, i) {
            plan.insert(i, k);
        }
    }
    plan
}

/// Feasible solution of the subproblem dual for scenario `scenario`.
///
/// Indices range over `N \ {scenario}`; `beta[scenario]`, `lambda[scenario]`
/// and row/column `scenario` of `gamma` are unused and zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemDual {
    pub scenario: NodeId,
    pub alpha: f64,
    pub beta: Vec<f64>,
    /// Row-major `gamma[k * n + j]`.
    pub gamma: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl SubproblemDual {
    fn n(&self) -> usize {
        self.beta.len()
    }

    /// Largest violation of the dual constraints.
    pub fn max_infeasibility(&self, inst: &Instance) -> f64 {
        let n = self.n();
        let i = self.scenario;
        let mut worst: f64 = 0.0;
        for k in (0..n).filter(|&k| k != i) {
            worst = worst.max(self.beta[k]);
            let mut lhs = self.alpha + self.beta[k];
            for j in (0..n).filter(|&j| j != i) {
                let g = self.gamma[k * n + j];
                worst = worst.max(g);
                lhs += g;
                worst = worst.max(self.lambda[j] - g - inst.delay(k, j));
            }
            worst = worst.max(lhs - inst.verify_delay(k));
        }
        worst
    }

    /// Dual objective as a linear function of row `i` of `x`; `coefs[j]`
    /// multiplies `x_ij`.
    pub fn linear_row(&self, inst: &Instance) -> Vec<f64> {
        let n = self.n();
        let i = self.scenario;
        let mut row = alloc::vec![0.0; n];
        row[i] = self.alpha - inst.verify_delay(i);
        for k in (0..n).filter(|&k| k != i) {
            row[k] += self.beta[k];
            for j in (0..n).filter(|&j| j != i) {
                let g = self.gamma[k * n + j];
                row[i] += g;
                row[j] -= g;
            }
        }
        for j in (0..n).filter(|&j| j != i) {
            row[j] += self.lambda[j] - inst.delay(i, j);
        }
        row
    }

    /// Dual objective evaluated at `cfg`.
    pub fn objective(&self, inst: &Instance, cfg: &Configuration) -> f64 {
        let i = self.scenario;
        self.linear_row(inst)
            .iter()
            .enumerate()
            .filter(|&(j, _)| cfg.x(i, j))
            .map(|(_, c)| c)
            .sum()
    }
}

/// Dual that is optimal when `scenario` leads `committee`.
fn committee_dual(inst: &Instance, scenario: NodeId, committee: &[NodeId]) -> SubproblemDual {
    let n = inst.n();
    let mut beta = alloc::vec![0.0; n];
    let mut gamma = alloc::vec![0.0; n * n];
    let lambda = alloc::vec![0.0; n];
    let Some((_, best)) = best_backup(inst, committee) else {
        let alpha = (0..n)
            .filter(|&k| k != scenario)
            .map(|k| inst.verify_delay(k))
            .fold(f64::INFINITY, f64::min);
        return SubproblemDual { scenario, alpha: if alpha.is_finite() { alpha } else { 0.0 }, beta, gamma, lambda };
    };
    let mut member = alloc::vec![false; n];
    for &k in committee {
        member[k] = true;
    }
    for k in (0..n).filter(|&k| k != scenario) {
        if member[k] {
            let spread: f64 = committee.iter().map(|&j| inst.delay(k, j)).sum();
            let need = (best - inst.verify_delay(k)).max(0.0);
            if spread > 0.0 && need > 0.0 {
                let r = (need / spread).min(1.0);
                for &j in committee {
                    gamma[k * n + j] = -r * inst.delay(k, j);
                }
            }
        } else {
            beta[k] = (inst.verify_delay(k) - best).min(0.0);
        }
    }
    SubproblemDual { scenario, alpha: best, beta, gamma, lambda }
}

/// Dual solution for scenario `failed` that is optimal at `cfg`.
///
/// For a leader the dual certifies the takeover delay of its best backup.
/// For a follower every feasible dual is optimal; the one returned keeps
/// only `alpha = min_k d_kv`.
pub fn dual_solution(inst: &Instance, cfg: &Configuration, failed: NodeId) -> SubproblemDual {
    if cfg.is_leader(failed) {
        committee_dual(inst, failed, &cfg.followers(failed))
    } else {
        committee_dual(inst, failed, &[])
    }
}

/// One aggregated optimality cut.
#[derive(Debug, Clone, PartialEq)]
pub struct BendersCut {
    /// Configuration the cut was generated at; the cut is tight there.
    pub at: Configuration,
    /// Backup chosen for each leader of the generating configuration.
    pub backups: BTreeMap<NodeId, NodeId>,
    pub linear: LinearCut,
}

impl BendersCut {
    /// Lower bound on `theta` implied at `cfg`.
    pub fn rhs(&self, cfg: &Configuration) -> f64 {
        self.linear.evaluate(cfg)
    }
}

/// Cut generated at `cfg`: `theta >= sum_i f_i * dual_i(x)`.
pub fn generate_cut(inst: &Instance, cfg: &Configuration) -> BendersCut {
    let n = inst.n();
    let mut linear = LinearCut::zero(n);
    let mut backups = BTreeMap::new();
    for i in 0..n {
        if let (Some(k), _) = solve_subproblem(inst, cfg, i) {
            backups.insert(i, k);
        }
        let p = inst.failure_prob(i);
        if p == 0.0 {
            continue;
        }
        let row = dual_solution(inst, cfg, i).linear_row(inst);
        for (j, c) in row.into_iter().enumerate() {
            linear.coefs[i * n + j] += p * c;
        }
    }
    BendersCut {
        at: cfg.clone(),
        backups,
        linear,
    }
}

/// `theta_lb = -sum_i f_i (d_iv + sum_j d_ij)`.
pub fn theta_lower_bound(inst: &Instance) -> f64 {
    let n = inst.n();
    -(0..n)
        .map(|i| inst.failure_prob(i) * (inst.verify_delay(i) + (0..n).map(|j| inst.delay(i, j)).sum::<f64>()))
        .sum::<f64>()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BendersState {
    pub cuts: Vec<BendersCut>,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Master optimum after each iteration.
    pub lower_bounds: Vec<f64>,
    pub iterations: usize,
    pub master_nodes_explored: usize,
    pub simplex_pivots: usize,
    /// False when the result comes from local search.
    pub certified: bool,
}

impl BendersState {
    fn new() -> Self {
        Self {
            cuts: Vec::new(),
            lower_bound: f64::NEG_INFINITY,
            upper_bound: f64::INFINITY,
            lower_bounds: Vec::new(),
            iterations: 0,
            master_nodes_explored: 0,
            simplex_pivots: 0,
            certified: true,
        }
    }

    pub fn gap(&self) -> f64 {
        self.upper_bound - self.lower_bound
    }

    pub fn stats(&self) -> SolveStats {
        SolveStats {
            iterations: self.iterations,
            cuts: self.cuts.len(),
            nodes: self.master_nodes_explored,
            gap: if self.certified { self.gap() } else { f64::NAN },
            certified: self.certified,
        }
    }
}

/// Flat summary for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub cuts: usize,
    pub nodes: usize,
    pub gap: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub cfg: Configuration,
    pub plan: BackupPlan,
    pub value: f64,
    pub state: BendersState,
}

fn master_error(inst: &Instance, e: MasterError) -> BendersError {
    match e {
        MasterError::Infeasible => BendersError::Infeasible {
            n: inst.n(),
            required: inst.min_committee_size(),
        },
        other => BendersError::Master(other),
    }
}

/// Minimizes normal-case delay plus expected view-change delay.
pub fn solve_vco(inst: &Instance, opts: &SolveOptions) -> Result<Solution, BendersError> {
    if !inst.admits_committee() {
        return Err(BendersError::Infeasible {
            n: inst.n(),
            required: inst.min_committee_size(),
        });
    }
    if inst.n() > opts.exact_limit {
        let (cfg, value) = local_search(inst, |c| evaluate_with_best_plan(inst, c).0);
        let plan = optimal_plan(inst, &cfg);
        let mut state = BendersState::new();
        state.certified = false;
        state.upper_bound = value;
        return Ok(Solution { cfg, plan, value, state });
    }

    let limit = opts.max_iterations.unwrap_or(10 * inst.n());
    let master_opts = MasterOptions {
        theta_lower_bound: Some(theta_lower_bound(inst)),
        node_limit: opts.node_limit,
    };
    let mut state = BendersState::new();
    let mut linear: Vec<LinearCut> = Vec::new();
    let mut incumbent: Option<(Configuration, f64)> = None;

    while state.iterations < limit {
        let warm: Vec<Configuration> = incumbent.iter().map(|(c, _)| c.clone()).collect();
        let master = solve_master(inst, &linear, &warm, &master_opts).map_err(|e| master_error(inst, e))?;
        state.iterations += 1;
        state.master_nodes_explored += master.nodes;
        state.simplex_pivots += master.pivots;
        state.lower_bounds.push(master.value);
        state.lower_bound = state.lower_bound.max(master.value);

        let value = normal_objective_unchecked(inst, &master.cfg) + q_star(inst, &master.cfg);
        if incumbent.as_ref().is_none_or(|(_, v)| value < v - OBJ_TOL) {
            incumbent = Some((master.cfg.clone(), value));
            state.upper_bound = value;
        }
        if state.upper_bound - state.lower_bound <= opts.tol {
            break;
        }
        let cut = generate_cut(inst, &master.cfg);
        linear.push(cut.linear.clone());
        state.cuts.push(cut);
    }

    let (cfg, value) = incumbent.expect("at least one iteration ran");
    let plan = optimal_plan(inst, &cfg);
    let solution = Solution { cfg, plan, value, state };
    if solution.state.gap() > opts.tol {
        return Err(BendersError::IterationLimit {
            limit,
            incumbent: Box::new(solution),
        });
    }
    Ok(solution)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalSolution {
    pub cfg: Configuration,
    pub value: f64,
    pub nodes: usize,
    pub certified: bool,
}

/// Minimizes the normal-case delay alone.
pub fn solve_normal_case(inst: &Instance, opts: &SolveOptions) -> Result<NormalSolution, BendersError> {
    if !inst.admits_committee() {
        return Err(BendersError::Infeasible {
            n: inst.n(),
            required: inst.min_committee_size(),
        });
    }
    if inst.n() > opts.exact_limit {
        let (cfg, value) = local_search(inst, |c| normal_objective_unchecked(inst, c));
        return Ok(NormalSolution { cfg, value, nodes: 0, certified: false });
    }
    let master_opts = MasterOptions {
        theta_lower_bound: None,
        node_limit: opts.node_limit,
    };
    let m = solve_master(inst, &[], &[], &master_opts).map_err(|e| master_error(inst, e))?;
    Ok(NormalSolution {
        cfg: m.cfg,
        value: m.value,
        nodes: m.nodes,
        certified: true,
    })
}

/// Relaxed subproblem solution over the committee of `failed`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedSubproblem {
    pub followers: Vec<NodeId>,
    /// `y[a]` for backup `followers[a]`.
    pub y: Vec<f64>,
    /// `z[a * m + b]`: follower `followers[b]` reassigned to `followers[a]`.
    pub z: Vec<f64>,
    /// Relaxation optimum minus the saved delay.
    pub value: f64,
}

impl RelaxedSubproblem {
    pub fn is_integral(&self, tol: f64) -> bool {
        self.y.iter().chain(&self.z).all(|&v| v.abs() <= tol || (v - 1.0).abs() <= tol)
    }
}

/// Linear relaxation of the 1-median subproblem for leader `failed`,
/// solved by simplex. `None` when `failed` is not a leader or the LP fails.
pub fn lp_relax_subproblem(inst: &Instance, cfg: &Configuration, failed: NodeId) -> Option<RelaxedSubproblem> {
    if failed >= cfg.n() || !cfg.is_leader(failed) {
        return None;
    }
    let followers = cfg.followers(failed);
    let m = followers.len();
    let mut lp = LinearProgram::new();
    for &k in &followers {
        lp.add_var(inst.verify_delay(k), 0.0, 1.0);
    }
    for &k in &followers {
        for &j in &followers {
            lp.add_var(inst.delay(k, j), 0.0, 1.0);
        }
    }
    let z = |a: usize, b: usize| m + a * m + b;
    lp.add_row((0..m).map(|a| (a, 1.0)).collect(), Sense::Eq, 1.0);
    for a in 0..m {
        for b in 0..m {
            lp.add_row(alloc::vec![(a, 1.0), (z(a, b), -1.0)], Sense::Le, 0.0);
        }
    }
    for b in 0..m {
        lp.add_row((0..m).map(|a| (z(a, b), 1.0)).collect(), Sense::Eq, 1.0);
    }
    let sol = Simplex::solve(&lp);
    if sol.status != LpStatus::Optimal {
        return None;
    }
    let g = committee_delay(inst, failed, &followers);
    Some(RelaxedSubproblem {
        followers,
        y: sol.x[..m].to_vec(),
        z: sol.x[m..].to_vec(),
        value: sol.objective - g,
    })
}

fn nearest_assignment(inst: &Instance, leaders: &[NodeId]) -> Vec<NodeId> {
    let n = inst.n();
    let mut leader_of = alloc::vec![usize::MAX; n];
    for &l in leaders {
        leader_of[l] = l;
    }
    for j in 0..n {
        if leader_of[j] == usize::MAX {
            let mut best = leaders[0];
            for &l in &leaders[1..] {
                if inst.delay(l, j) < inst.delay(best, j) - OBJ_TOL {
                    best = l;
                }
            }
            leader_of[j] = best;
        }
    }
    leader_of
}

/// Moves followers out of the largest committees until all are big enough.
fn repair(inst: &Instance, leader_of: &mut [NodeId]) {
    let n = leader_of.len();
    let need = inst.min_followers();
    loop {
        let mut count = alloc::vec![0usize; n];
        for j in 0..n {
            if leader_of[j] != j {
                count[leader_of[j]] += 1;
            }
        }
        let short = (0..n).find(|&l| leader_of[l] == l && count[l] < need);
        let Some(short) = short else { return };
        let mut best: Option<(NodeId, f64)> = None;
        for j in 0..n {
            let from = leader_of[j];
            if from == j || from == short || count[from] <= need {
                continue;
            }
            let delta = inst.delay(short, j) - inst.delay(from, j);
            if best.is_none_or(|(_, d)| delta < d - OBJ_TOL) {
                best = Some((j, delta));
            }
        }
        match best {
            Some((j, _)) => leader_of[j] = short,
            None => return,
        }
    }
}

fn is_valid(inst: &Instance, leader_of: &[NodeId]) -> bool {
    let n = leader_of.len();
    let mut count = alloc::vec![0usize; n];
    for j in 0..n {
        let l = leader_of[j];
        if l >= n || leader_of[l] != l {
            return false;
        }
        if l != j {
            count[l] += 1;
        }
    }
    (0..n).all(|l| leader_of[l] != l || count[l] >= inst.min_followers())
}

/// Greedy seeding plus first-improvement local search over reassignment,
/// leader swap and follower exchange moves.
fn local_search(inst: &Instance, eval: impl Fn(&Configuration) -> f64) -> (Configuration, f64) {
    let n = inst.n();
    let mut order: Vec<(f64, NodeId)> = (0..n)
        .map(|i| {
            let mean = (0..n).filter(|&j| j != i).map(|j| inst.delay(i, j)).sum::<f64>() / (n - 1).max(1) as f64;
            (inst.verify_delay(i) + mean, i)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut best: Option<(Vec<NodeId>, f64)> = None;
    for p in 1..=n / inst.min_committee_size() {
        let leaders: Vec<NodeId> = order[..p].iter().map(|&(_, i)| i).collect();
        let mut leader_of = nearest_assignment(inst, &leaders);
        repair(inst, &mut leader_of);
        if !is_valid(inst, &leader_of) {
            continue;
        }
        let v = eval(&Configuration::from_assignment(leader_of.clone()));
        if best.as_ref().is_none_or(|(_, b)| v < b - OBJ_TOL) {
            best = Some((leader_of, v));
        }
    }
    let (mut cur, mut cur_v) = best.expect("one committee of all nodes is always valid");

    let try_move = |cand: Vec<NodeId>, cur_v: f64| -> Option<(Vec<NodeId>, f64)> {
        if !is_valid(inst, &cand) {
            return None;
        }
        let v = eval(&Configuration::from_assignment(cand.clone()));
        (v < cur_v - OBJ_TOL).then_some((cand, v))
    };

    'improve: loop {
        let leaders: Vec<NodeId> = (0..n).filter(|&i| cur[i] == i).collect();
        for j in 0..n {
            if cur[j] == j {
                continue;
            }
            for &l in &leaders {
                if l == cur[j] {
                    continue;
                }
                let mut cand = cur.clone();
                cand[j] = l;
                if let Some(next) = try_move(cand, cur_v) {
                    (cur, cur_v) = next;
                    continue 'improve;
                }
            }
        }
        for &l in &leaders {
            for k in 0..n {
                if cur[k] != l || k == l {
                    continue;
                }
                let cand: Vec<NodeId> = cur.iter().map(|&a| if a == l { k } else { a }).collect();
                if let Some(next) = try_move(cand, cur_v) {
                    (cur, cur_v) = next;
                    continue 'improve;
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if cur[a] == a || cur[b] == b || cur[a] == cur[b] {
                    continue;
                }
                let mut cand = cur.clone();
                cand.swap(a, b);
                if let Some(next) = try_move(cand, cur_v) {
                    (cur, cur_v) = next;
                    continue 'improve;
                }
            }
        }
        break;
    }
    (Configuration::from_assignment(cur), cur_v)
}

/// Total objective of `cfg` under the cuts accumulated in `state`, the
/// quantity the master minimizes.
pub fn master_objective(inst: &Instance, state: &BendersState, cfg: &Configuration) -> f64 {
    let cuts: Vec<LinearCut> = state.cuts.iter().map(|c| c.linear.clone()).collect();
    master_value(inst, &cuts, Some(theta_lower_bound(inst)), cfg).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{enumerate_configurations, oracle_solve_normal, oracle_solve_vco};
    use alloc::vec;

    fn tiny8(f: f64) -> Instance {
        Instance::uniform(8, 1, 1.0, 5.0, f).unwrap()
    }

    fn asym() -> Instance {
        let d = vec![
            0.0, 1.0, 4.0, 2.0, //
            1.0, 0.0, 2.0, 3.0, //
            4.0, 2.0, 0.0, 1.0, //
            2.0, 1.0, 1.0, 0.0,
        ];
        Instance::new(4, 1, d, vec![8.0, 10.0, 13.0, 9.0], None, vec![0.1; 4]).unwrap()
    }

    #[test]
    fn subproblem_examples() {
        let inst = asym();
        let cfg = Configuration::single_committee(4, 0);
        assert_eq!(solve_subproblem(&inst, &cfg, 0), (Some(3), 11.0 - 15.0));
        assert_eq!(solve_subproblem(&inst, &cfg, 2), (None, 0.0));
        let t = tiny8(0.1);
        assert_eq!(solve_subproblem(&t, &Configuration::single_committee(8, 0), 0), (Some(1), -1.0));
    }

    #[test]
    fn enumeration_agrees_with_scan() {
        let inst = asym();
        assert_eq!(enumerate_subproblem(&inst, 0, &[1, 2, 3]), Some((3, -4.0)));
        let t = tiny8(0.1);
        assert_eq!(enumerate_subproblem(&t, 0, &[1, 2, 3, 4, 5, 6, 7]), Some((1, -1.0)));
        assert_eq!(enumerate_subproblem(&t, 0, &[]), None);
    }

    #[test]
    fn q_star_examples() {
        let t = tiny8(0.1);
        assert!((q_star(&t, &Configuration::single_committee(8, 0)) + 0.1).abs() < 1e-12);
        let two = Configuration::from_committees(8, &[(0, &[1, 2, 3]), (4, &[5, 6, 7])]);
        assert!((q_star(&t, &two) + 0.2).abs() < 1e-12);
        assert_eq!(q_star(&tiny8(0.0), &two), 0.0);
    }

    #[test]
    fn duals_feasible_and_tight() {
        let t = tiny8(0.1);
        let cfg = Configuration::single_committee(8, 0);
        for i in 0..8 {
            let d = dual_solution(&t, &cfg, i);
            assert!(d.max_infeasibility(&t) <= 1e-12);
            assert!((d.objective(&t, &cfg) - solve_subproblem(&t, &cfg, i).1).abs() < 1e-12);
        }
        let a = asym();
        let c4 = Configuration::single_committee(4, 0);
        let d = dual_solution(&a, &c4, 0);
        assert_eq!(d.alpha, 11.0);
        assert!(d.max_infeasibility(&a) <= 1e-12);
        assert!((d.objective(&a, &c4) + 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_delays_give_zero_duals() {
        let inst = Instance::uniform(5, 1, 0.0, 0.0, 0.3).unwrap();
        let cfg = Configuration::single_committee(5, 2);
        let d = dual_solution(&inst, &cfg, 2);
        assert_eq!(d.alpha, 0.0);
        assert!(d.gamma.iter().chain(&d.beta).chain(&d.lambda).all(|&v| v == 0.0));
        assert_eq!(d.objective(&inst, &cfg), 0.0);
    }

    #[test]
    fn tiny8_cut_tight_and_valid() {
        let t = tiny8(0.1);
        let single = Configuration::single_committee(8, 0);
        let cut = generate_cut(&t, &single);
        assert!((cut.rhs(&single) + 0.1).abs() < 1e-9);
        let two = Configuration::from_committees(8, &[(0, &[1, 2, 3]), (4, &[5, 6, 7])]);
        assert!(cut.rhs(&two) <= -0.2 + 1e-9);
        for cfg in enumerate_configurations(&t, 12).unwrap() {
            assert!(cut.rhs(&cfg) <= q_star(&t, &cfg) + 1e-9);
        }
    }

    #[test]
    fn zero_failure_cut_is_zero() {
        let cut = generate_cut(&tiny8(0.0), &Configuration::single_committee(8, 0));
        assert!(cut.linear.coefs.iter().all(|&c| c == 0.0));
        assert_eq!(cut.linear.constant, 0.0);
    }

    #[test]
    fn solve_vco_tiny8() {
        let sol = solve_vco(&tiny8(0.1), &SolveOptions::default()).unwrap();
        assert!((sol.value - 11.9).abs() < 1e-9);
        assert_eq!(sol.cfg.leaders().count(), 1);
        assert!(sol.state.gap() <= DEFAULT_TOL);
    }

    #[test]
    fn zero_failure_matches_normal() {
        let inst = tiny8(0.0);
        let sol = solve_vco(&inst, &SolveOptions::default()).unwrap();
        let (_, v) = oracle_solve_normal(&inst, 12).unwrap();
        assert!((sol.value - v).abs() < 1e-9);
    }

    #[test]
    fn asym_matches_oracle() {
        let inst = asym();
        let sol = solve_vco(&inst, &SolveOptions::default()).unwrap();
        let o = oracle_solve_vco(&inst, 12).unwrap();
        assert!((sol.value - o.best_value).abs() < 1e-9);
    }

    #[test]
    fn normal_case_examples() {
        let t = solve_normal_case(&tiny8(0.1), &SolveOptions::default()).unwrap();
        assert_eq!(t.value, 12.0);
        let u = Instance::uniform(4, 1, 1.0, 2.0, 0.0).unwrap();
        assert_eq!(solve_normal_case(&u, &SolveOptions::default()).unwrap().value, 5.0);
    }

    #[test]
    fn infeasible_instance() {
        let inst = Instance::uniform(3, 1, 1.0, 1.0, 0.1).unwrap();
        assert_eq!(
            solve_vco(&inst, &SolveOptions::default()),
            Err(BendersError::Infeasible { n: 3, required: 4 })
        );
    }

    #[test]
    fn relaxation_integral() {
        let inst = asym();
        let r = lp_relax_subproblem(&inst, &Configuration::single_committee(4, 0), 0).unwrap();
        assert!((r.value + 4.0).abs() < 1e-9);
        assert!(r.is_integral(1e-9));
        assert_eq!(r.y, vec![0.0, 0.0, 1.0]);
        assert!(lp_relax_subproblem(&inst, &Configuration::single_committee(4, 0), 1).is_none());
    }

    #[test]
    fn heuristic_mode_is_flagged() {
        let inst = tiny8(0.1);
        let opts = SolveOptions {
            exact_limit: 4,
            ..Default::default()
        };
        let sol = solve_vco(&inst, &opts).unwrap();
        assert!(!sol.state.certified);
        assert!((sol.value - 11.9).abs() < 1e-9);
        let normal = solve_normal_case(&inst, &opts).unwrap();
        assert!(!normal.certified);
        assert_eq!(normal.value, 12.0);
    }
}
