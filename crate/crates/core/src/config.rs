//! Committee configurations (leader/follower assignment) and backup plans.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::Instance;
use crate::NodeId;

/// Leader/follower assignment: `leader_of[j] = i` means node `j` is served
/// by leader `i`; leaders serve themselves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    leader_of: Vec<NodeId>,
}

/// One committee: its leader and followers (ascending, leader excluded).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Committee {
    pub leader: NodeId,
    pub followers: Vec<NodeId>,
}

impl Committee {
    pub fn size(&self) -> usize {
        self.followers.len() + 1
    }
}

impl Configuration {
    /// Wraps a raw assignment without checking it; see [`validate_configuration`].
    pub fn from_assignment(leader_of: Vec<NodeId>) -> Self {
        Self { leader_of }
    }

    /// All `n` nodes in one committee.
    pub fn single_committee(n: usize, leader: NodeId) -> Self {
        Self {
            leader_of: alloc::vec![leader; n],
        }
    }

    /// Builds an assignment from `(leader, members)` blocks. Members may or
    /// may not list the leader. Nodes not covered keep `usize::MAX`, which
    /// validation reports as unassigned.
    pub fn from_committees(n: usize, blocks: &[(NodeId, &[NodeId])]) -> Self {
        let mut leader_of = alloc::vec![usize::MAX; n];
        for &(leader, members) in blocks {
            if leader < n {
                leader_of[leader] = leader;
            }
            for &m in members {
                if m < n {
                    leader_of[m] = leader;
                }
            }
        }
        Self { leader_of }
    }

    pub fn n(&self) -> usize {
        self.leader_of.len()
    }

    pub fn assignment(&self) -> &[NodeId] {
        &self.leader_of
    }

    #[inline]
    pub fn leader_of(&self, node: NodeId) -> NodeId {
        self.leader_of[node]
    }

    #[inline]
    pub fn is_leader(&self, node: NodeId) -> bool {
        self.leader_of.get(node) == Some(&node)
    }

    /// Binary view of the assignment: `x_ij = 1` iff `leader_of[j] = i`.
    #[inline]
    pub fn x(&self, i: NodeId, j: NodeId) -> bool {
        self.leader_of[j] == i
    }

    pub fn leaders(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.leader_of.len()).filter(move |&i| self.leader_of[i] == i)
    }

    /// Followers of `leader`, ascending, leader excluded.
    pub fn followers(&self, leader: NodeId) -> Vec<NodeId> {
        self.leader_of
            .iter()
            .enumerate()
            .filter(|&(j, &l)| l == leader && j != leader)
            .map(|(j, _)| j)
            .collect()
    }

    /// Committees ordered by leader id.
    pub fn committees(&self) -> Vec<Committee> {
        let mut by_leader: BTreeMap<NodeId, Vec<NodeId>> = self.leaders().map(|l| (l, Vec::new())).collect();
        for (j, &l) in self.leader_of.iter().enumerate() {
            if j != l {
                if let Some(f) = by_leader.get_mut(&l) {
                    f.push(j);
                }
            }
        }
        by_leader
            .into_iter()
            .map(|(leader, followers)| Committee { leader, followers })
            .collect()
    }
}

/// Constraint broken by a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Node has no (in-range) leader, or the assignment has the wrong length.
    AssignmentMissing { node: NodeId },
    /// Node is assigned to `target`, which is itself a follower.
    FollowerAsLeaderTarget { node: NodeId, target: NodeId },
    /// Leader has fewer than `3 f_min` followers.
    CommitteeTooSmall {
        leader: NodeId,
        followers: usize,
        required: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AssignmentMissing { node } => write!(f, "AssignmentMissing(node {node})"),
            Self::FollowerAsLeaderTarget { node, target } => {
                write!(f, "FollowerAsLeaderTarget(node {node} -> follower {target})")
            }
            Self::CommitteeTooSmall {
                leader,
                followers,
                required,
            } => write!(f, "CommitteeTooSmall(leader {leader}: {followers} < {required} followers)"),
        }
    }
}

/// Returns every violated constraint; empty means the configuration is valid.
pub fn validate_configuration(inst: &Instance, cfg: &Configuration) -> Vec<Violation> {
    let n = inst.n();
    let mut out = Vec::new();
    if cfg.n() != n {
        for node in cfg.n().min(n)..n.max(cfg.n()) {
            out.push(Violation::AssignmentMissing { node });
        }
        return out;
    }
    for j in 0..n {
        let target = cfg.leader_of[j];
        if target >= n {
            out.push(Violation::AssignmentMissing { node: j });
        } else if cfg.leader_of[target] != target {
            out.push(Violation::FollowerAsLeaderTarget { node: j, target });
        }
    }
    let mut counts = alloc::vec![0usize; n];
    for (j, &l) in cfg.leader_of.iter().enumerate() {
        if l < n && l != j {
            counts[l] += 1;
        }
    }
    for leader in cfg.leaders() {
        if counts[leader] < inst.min_followers() {
            out.push(Violation::CommitteeTooSmall {
                leader,
                followers: counts[leader],
                required: inst.min_followers(),
            });
        }
    }
    out
}

/// Designated backup per leader. Follower reassignment is implied: every
/// follower of `i` moves to `backup_of[i]` when `i` fails.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BackupPlan {
    backup_of: BTreeMap<NodeId, NodeId>,
}

impl BackupPlan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        Self {
            backup_of: pairs.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, leader: NodeId, backup: NodeId) {
        self.backup_of.insert(leader, backup);
    }

    pub fn backup_of(&self, leader: NodeId) -> Option<NodeId> {
        self.backup_of.get(&leader).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.backup_of.iter().map(|(&l, &b)| (l, b))
    }

    pub fn len(&self) -> usize {
        self.backup_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.backup_of.is_empty()
    }

    /// `z_ij^k`: follower `j` of `i` is reassigned to `k`.
    pub fn z(&self, cfg: &Configuration, i: NodeId, j: NodeId, k: NodeId) -> bool {
        j != i && cfg.x(i, j) && cfg.is_leader(i) && self.backup_of(i) == Some(k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackupViolation {
    MissingBackup { leader: NodeId },
    BackupNotFollower { leader: NodeId, backup: NodeId },
    /// Plan entry keyed by a node that is not a leader.
    OrphanBackup { node: NodeId },
}

impl fmt::Display for BackupViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MissingBackup { leader } => write!(f, "MissingBackup(leader {leader})"),
            Self::BackupNotFollower { leader, backup } => {
                write!(f, "BackupNotFollower(leader {leader}, backup {backup})")
            }
            Self::OrphanBackup { node } => write!(f, "OrphanBackup(node {node})"),
        }
    }
}

/// Checks a plan against an already valid configuration.
pub fn validate_backup_plan(cfg: &Configuration, plan: &BackupPlan) -> Vec<BackupViolation> {
    let mut out = Vec::new();
    for leader in cfg.leaders() {
        match plan.backup_of(leader) {
            None => out.push(BackupViolation::MissingBackup { leader }),
            Some(backup) => {
                if backup == leader || backup >= cfg.n() || !cfg.x(leader, backup) {
                    out.push(BackupViolation::BackupNotFollower { leader, backup });
                }
            }
        }
    }
    for (node, _) in plan.iter() {
        if !cfg.is_leader(node) {
            out.push(BackupViolation::OrphanBackup { node });
        }
    }
    out
}
