//! Exhaustive search over every feasible configuration. Exponential; meant
//! as ground truth for small instances.

use alloc::vec::Vec;

use crate::config::{BackupPlan, Configuration};
use crate::instance::Instance;
use crate::objective::{best_backup, committee_delay};
use crate::{NodeId, OBJ_TOL};

/// Default bound on `n` for enumeration.
pub const DEFAULT_SIZE_GUARD: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("n = {n} exceeds the enumeration size guard {guard}")]
    SizeGuardExceeded { n: usize, guard: usize },
    #[error("no feasible configuration: n = {n} < {required}")]
    NoFeasibleConfiguration { n: usize, required: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub best_cfg: Configuration,
    pub best_plan: BackupPlan,
    pub best_value: f64,
    pub enumerated_count: usize,
}

/// Stream of every feasible configuration: each set partition into blocks
/// of at least `3 f_min + 1` nodes, crossed with one leader per block.
///
/// Partitions are generated block by block, each new block containing the
/// smallest unassigned node; leader choices advance like an odometer with
/// the last block's leader varying fastest, each in ascending order.
#[derive(Debug, Clone)]
pub struct ConfigurationStream {
    n: usize,
    partitions: Vec<Vec<Vec<NodeId>>>,
    partition: usize,
    leader_idx: Vec<usize>,
    done: bool,
}

impl ConfigurationStream {
    /// Total number of configurations the stream yields.
    pub fn total(&self) -> usize {
        self.partitions
            .iter()
            .map(|p| p.iter().map(|b| b.len()).product::<usize>())
            .sum()
    }

    pub fn partitions(&self) -> &[Vec<Vec<NodeId>>] {
        &self.partitions
    }
}

impl Iterator for ConfigurationStream {
    type Item = Configuration;

    fn next(&mut self) -> Option<Configuration> {
        if self.done || self.partition >= self.partitions.len() {
            return None;
        }
        let blocks = &self.partitions[self.partition];
        let mut leader_of = alloc::vec![0; self.n];
        for (b, block) in blocks.iter().enumerate() {
            let leader = block[self.leader_idx[b]];
            for &m in block {
                leader_of[m] = leader;
            }
        }
        // advance the odometer
        let mut pos = blocks.len();
        loop {
            if pos == 0 {
                self.partition += 1;
                if self.partition < self.partitions.len() {
                    self.leader_idx = alloc::vec![0; self.partitions[self.partition].len()];
                } else {
                    self.done = true;
                }
                break;
            }
            pos -= 1;
            self.leader_idx[pos] += 1;
            if self.leader_idx[pos] < blocks[pos].len() {
                break;
            }
            self.leader_idx[pos] = 0;
        }
        Some(Configuration::from_assignment(leader_of))
    }
}

/// Enumerates every feasible configuration of `inst`, refusing instances
/// with more than `size_guard` nodes.
pub fn enumerate_configurations(inst: &Instance, size_guard: usize) -> Result<ConfigurationStream, OracleError> {
    let n = inst.n();
    if n > size_guard {
        return Err(OracleError::SizeGuardExceeded { n, guard: size_guard });
    }
    let mut partitions = Vec::new();
    let remaining: Vec<NodeId> = (0..n).collect();
    partition_into(&remaining, inst.min_committee_size(), &mut Vec::new(), &mut partitions);
    let leader_idx = partitions.first().map(|p: &Vec<Vec<NodeId>>| alloc::vec![0; p.len()]).unwrap_or_default();
    Ok(ConfigurationStream {
        n,
        done: partitions.is_empty(),
        partitions,
        partition: 0,
        leader_idx,
    })
}

fn partition_into(remaining: &[NodeId], min_block: usize, current: &mut Vec<Vec<NodeId>>, out: &mut Vec<Vec<Vec<NodeId>>>) {
    if remaining.is_empty() {
        out.push(current.clone());
        return;
    }
    let first = remaining[0];
    let rest = &remaining[1..];
    for extra in (min_block.saturating_sub(1))..=rest.len() {
        let left = rest.len() - extra;
        if left != 0 && left < min_block {
            continue;
        }
        for_each_combination(rest.len(), extra, &mut |picked: &[usize]| {
            let mut block = Vec::with_capacity(extra + 1);
            block.push(first);
            let mut others = Vec::with_capacity(left);
            let mut p = 0;
            for (idx, &node) in rest.iter().enumerate() {
                if p < picked.len() && picked[p] == idx {
                    block.push(node);
                    p += 1;
                } else {
                    others.push(node);
                }
            }
            current.push(block);
            partition_into(&others, min_block, current, out);
            current.pop();
        });
    }
}

/// Calls `f` with every `k`-subset of `0..n` (as sorted indices) in
/// lexicographic order.
fn for_each_combination(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Minimum of the normal-case objective; ties keep the earliest enumerated.
pub fn oracle_solve_normal(inst: &Instance, size_guard: usize) -> Result<(Configuration, f64), OracleError> {
    let stream = enumerate_configurations(inst, size_guard)?;
    let mut best: Option<(Configuration, f64)> = None;
    for cfg in stream {
        let value: f64 = cfg
            .committees()
            .iter()
            .map(|c| committee_delay(inst, c.leader, &c.followers))
            .sum();
        if best.as_ref().is_none_or(|(_, b)| value < b - OBJ_TOL) {
            best = Some((cfg, value));
        }
    }
    best.ok_or(OracleError::NoFeasibleConfiguration {
        n: inst.n(),
        required: inst.min_committee_size(),
    })
}

/// Minimum of normal-case plus expected view-change delay. The best plan
/// for a fixed configuration is chosen per leader independently.
pub fn oracle_solve_vco(inst: &Instance, size_guard: usize) -> Result<OracleResult, OracleError> {
    let stream = enumerate_configurations(inst, size_guard)?;
    let mut best: Option<OracleResult> = None;
    let mut count = 0;
    for cfg in stream {
        count += 1;
        let (value, plan) = evaluate_with_best_plan(inst, &cfg);
        if best.as_ref().is_none_or(|b| value < b.best_value - OBJ_TOL) {
            best = Some(OracleResult {
                best_cfg: cfg,
                best_plan: plan,
                best_value: value,
                enumerated_count: 0,
            });
        }
    }
    let mut result = best.ok_or(OracleError::NoFeasibleConfiguration {
        n: inst.n(),
        required: inst.min_committee_size(),
    })?;
    result.enumerated_count = count;
    Ok(result)
}

/// Objective of `cfg` under its per-leader optimal backups.
pub fn evaluate_with_best_plan(inst: &Instance, cfg: &Configuration) -> (f64, BackupPlan) {
    let mut normal = 0.0;
    let mut q = 0.0;
    let mut plan = BackupPlan::new();
    for c in cfg.committees() {
        let g = committee_delay(inst, c.leader, &c.followers);
        normal += g;
        if let Some((k, exd)) = best_backup(inst, &c.followers) {
            q += inst.failure_prob(c.leader) * (exd - g);
            plan.insert(c.leader, k);
        }
    }
    (normal + q, plan)
}
