//! Backup selection as views advance.
//!
//! A [`ViewState`] holds the current committees, the backup each leader
//! would hand over to, and the history of leader failures. When a leader
//! fails its precomputed backup takes over the remaining followers, the
//! failed node leaves the system and only that committee's backup is
//! recomputed. No global re-optimization happens between views.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::benders::enumerate_subproblem;
use crate::config::{validate_configuration, Configuration, Violation};
use crate::instance::Instance;
use crate::objective::{best_backup, committee_delay};
use crate::NodeId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SequencerError {
    #[error("invalid configuration: {0:?}")]
    InvalidConfiguration(Vec<Violation>),
    #[error("node {0} is not an active leader")]
    NotALeader(NodeId),
    #[error("node {0} is not an active follower")]
    NotAFollower(NodeId),
    #[error("committee of failed leader {0} has no surviving follower")]
    EmptyCommittee(NodeId),
    #[error("schedule views must be strictly increasing (entry {0})")]
    UnorderedSchedule(usize),
}

/// Who takes over if a leader fails.
#[derive(Debug, Clone, PartialEq)]
pub struct Takeover {
    pub backup: NodeId,
    /// Followers other than the backup, reassigned to it.
    pub reassigned: Vec<NodeId>,
    /// Takeover delay `d_kv + sum_j d_kj` of the backup.
    pub exd: f64,
}

/// One entry of the view history.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// View after the event.
    pub view: u64,
    pub failed: NodeId,
    pub backup: Option<NodeId>,
    pub exd: Option<f64>,
    /// The node was not a leader; nothing changed.
    pub noop: bool,
    /// The new committee is below `3 f_min + 1` members.
    pub undersized: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViewState {
    view: u64,
    /// `None` for nodes that failed.
    leader_of: Vec<Option<NodeId>>,
    backups: BTreeMap<NodeId, Option<Takeover>>,
    history: Vec<TraceRecord>,
}

impl ViewState {
    pub fn view(&self) -> u64 {
        self.view
    }

    pub fn n(&self) -> usize {
        self.leader_of.len()
    }

    pub fn leader_of(&self, node: NodeId) -> Option<NodeId> {
        self.leader_of.get(node).copied().flatten()
    }

    pub fn is_active(&self, node: NodeId) -> bool {
        self.leader_of(node).is_some()
    }

    pub fn is_leader(&self, node: NodeId) -> bool {
        self.leader_of(node) == Some(node)
    }

    pub fn leaders(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.n()).filter(|&i| self.is_leader(i))
    }

    pub fn active_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.n()).filter(|&i| self.is_active(i))
    }

    /// Followers of `leader` in index order.
    pub fn followers(&self, leader: NodeId) -> Vec<NodeId> {
        (0..self.n())
            .filter(|&j| j != leader && self.leader_of(j) == Some(leader))
            .collect()
    }

    pub fn takeover(&self, leader: NodeId) -> Option<&Takeover> {
        self.backups.get(&leader).and_then(Option::as_ref)
    }

    pub fn backups(&self) -> &BTreeMap<NodeId, Option<Takeover>> {
        &self.backups
    }

    pub fn history(&self) -> &[TraceRecord] {
        &self.history
    }

    /// Current assignment as a configuration; `None` once any node failed.
    pub fn configuration(&self) -> Option<Configuration> {
        self.leader_of
            .iter()
            .copied()
            .collect::<Option<Vec<_>>>()
            .map(Configuration::from_assignment)
    }
}

fn takeover_for(inst: &Instance, followers: &[NodeId]) -> Option<Takeover> {
    best_backup(inst, followers).map(|(backup, exd)| Takeover {
        backup,
        reassigned: followers.iter().copied().filter(|&j| j != backup).collect(),
        exd,
    })
}

/// Backups for every current leader by the takeover-delay scan.
pub fn precompute_backups(inst: &Instance, state: &ViewState) -> BTreeMap<NodeId, Option<Takeover>> {
    state
        .leaders()
        .map(|l| (l, takeover_for(inst, &state.followers(l))))
        .collect()
}

/// Backups for every current leader by exhaustive search over the binary
/// backup and reassignment variables.
pub fn precompute_backups_exhaustive(inst: &Instance, state: &ViewState) -> BTreeMap<NodeId, Option<Takeover>> {
    state
        .leaders()
        .map(|l| {
            let followers = state.followers(l);
            let takeover = enumerate_subproblem(inst, l, &followers).map(|(backup, q)| Takeover {
                backup,
                reassigned: followers.iter().copied().filter(|&j| j != backup).collect(),
                exd: q + committee_delay(inst, l, &followers),
            });
            (l, takeover)
        })
        .collect()
}

pub fn init_view_state(inst: &Instance, cfg: &Configuration) -> Result<ViewState, SequencerError> {
    let violations = validate_configuration(inst, cfg);
    if !violations.is_empty() {
        return Err(SequencerError::InvalidConfiguration(violations));
    }
    let mut state = ViewState {
        view: 0,
        leader_of: cfg.assignment().iter().map(|&l| Some(l)).collect(),
        backups: BTreeMap::new(),
        history: Vec::new(),
    };
    state.backups = precompute_backups(inst, &state);
    Ok(state)
}

/// Hands the committee of `failed` to its precomputed backup and advances
/// the view.
pub fn on_leader_failure(inst: &Instance, state: &ViewState, failed: NodeId) -> Result<ViewState, SequencerError> {
    if !state.is_leader(failed) {
        return Err(SequencerError::NotALeader(failed));
    }
    match state.takeover(failed) {
        Some(t) => hand_over(inst, state, failed, t.backup),
        None => Err(SequencerError::EmptyCommittee(failed)),
    }
}

/// Like [`on_leader_failure`] but with an externally chosen backup, which
/// must be a current follower of `failed`.
pub fn hand_over(inst: &Instance, state: &ViewState, failed: NodeId, backup: NodeId) -> Result<ViewState, SequencerError> {
    if !state.is_leader(failed) {
        return Err(SequencerError::NotALeader(failed));
    }
    let followers = state.followers(failed);
    if followers.is_empty() {
        return Err(SequencerError::EmptyCommittee(failed));
    }
    if !followers.contains(&backup) {
        return Err(SequencerError::NotAFollower(backup));
    }
    let reassigned: Vec<NodeId> = followers.iter().copied().filter(|&j| j != backup).collect();
    let exd = committee_delay(inst, backup, &followers);
    let mut next = state.clone();
    next.leader_of[failed] = None;
    next.leader_of[backup] = Some(backup);
    for &j in &reassigned {
        next.leader_of[j] = Some(backup);
    }
    next.view += 1;
    next.backups.remove(&failed);
    next.backups.insert(backup, takeover_for(inst, &reassigned));
    next.history.push(TraceRecord {
        view: next.view,
        failed,
        backup: Some(backup),
        exd: Some(exd),
        noop: false,
        undersized: reassigned.len() < inst.min_followers(),
    });
    Ok(next)
}

/// Removes a failed follower from its committee and refreshes that
/// committee's backup. The view does not change.
pub fn on_follower_failure(inst: &Instance, state: &ViewState, failed: NodeId) -> Result<ViewState, SequencerError> {
    let leader = match state.leader_of(failed) {
        Some(l) if l != failed => l,
        _ => return Err(SequencerError::NotAFollower(failed)),
    };
    let mut next = state.clone();
    next.leader_of[failed] = None;
    let followers = next.followers(leader);
    next.backups.insert(leader, takeover_for(inst, &followers));
    Ok(next)
}

/// Applies leader failures in order. Entries naming a node that is not a
/// current leader are recorded as no-ops.
pub fn replay_failure_schedule(
    inst: &Instance,
    cfg: &Configuration,
    schedule: &[(u64, NodeId)],
) -> Result<ViewState, SequencerError> {
    if let Some(pos) = schedule.windows(2).position(|w| w[1].0 <= w[0].0) {
        return Err(SequencerError::UnorderedSchedule(pos + 1));
    }
    let mut state = init_view_state(inst, cfg)?;
    for &(_, node) in schedule {
        if state.is_leader(node) {
            state = on_leader_failure(inst, &state, node)?;
        } else {
            let view = state.view;
            state.history.push(TraceRecord {
                view,
                failed: node,
                backup: None,
                exd: None,
                noop: true,
                undersized: false,
            });
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tiny8() -> Instance {
        Instance::uniform(8, 1, 1.0, 5.0, 0.1).unwrap()
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
    fn init_examples() {
        let t = tiny8();
        let s = init_view_state(&t, &Configuration::single_committee(8, 0)).unwrap();
        assert_eq!(s.view(), 0);
        assert_eq!(s.backups().len(), 1);
        assert_eq!(s.takeover(0).unwrap().backup, 1);
        let two = Configuration::from_committees(8, &[(0, &[1, 2, 3]), (4, &[5, 6, 7])]);
        assert_eq!(init_view_state(&t, &two).unwrap().backups().len(), 2);
        let bad = Configuration::from_committees(8, &[(0, &[1, 2])]);
        assert!(matches!(init_view_state(&t, &bad), Err(SequencerError::InvalidConfiguration(_))));
    }

    #[test]
    fn asym_backup_both_paths() {
        let a = asym();
        let s = init_view_state(&a, &Configuration::single_committee(4, 0)).unwrap();
        assert_eq!(s.takeover(0).unwrap().backup, 3);
        assert_eq!(precompute_backups_exhaustive(&a, &s), precompute_backups(&a, &s));
    }

    #[test]
    fn successive_failures_tiny8() {
        let t = tiny8();
        let s0 = init_view_state(&t, &Configuration::single_committee(8, 0)).unwrap();
        let s1 = on_leader_failure(&t, &s0, 0).unwrap();
        assert_eq!(s1.view(), 1);
        assert!(s1.is_leader(1));
        assert_eq!(s1.followers(1), vec![2, 3, 4, 5, 6, 7]);
        assert!(!s1.is_active(0));
        let s2 = on_leader_failure(&t, &s1, 1).unwrap();
        assert_eq!(s2.view(), 2);
        assert!(s2.is_leader(2));
        assert_eq!(s2.followers(2), vec![3, 4, 5, 6, 7]);
        assert_eq!(on_leader_failure(&t, &s2, 5), Err(SequencerError::NotALeader(5)));
        let s3 = hand_over(&t, &s2, 2, 7).unwrap();
        assert_eq!(s3.followers(7), vec![3, 4, 5, 6]);
        assert_eq!(hand_over(&t, &s3, 7, 2), Err(SequencerError::NotAFollower(2)));
    }

    #[test]
    fn shrinking_committee_warns_then_empties() {
        let inst = Instance::uniform(4, 1, 1.0, 5.0, 0.1).unwrap();
        let cfg = Configuration::single_committee(4, 0);
        let s = replay_failure_schedule(&inst, &cfg, &[(1, 0), (2, 1), (3, 2)]).unwrap();
        assert!(s.history().iter().all(|r| r.undersized));
        assert_eq!(s.followers(3), Vec::<NodeId>::new());
        assert_eq!(
            replay_failure_schedule(&inst, &cfg, &[(1, 0), (2, 1), (3, 2), (4, 3)]),
            Err(SequencerError::EmptyCommittee(3))
        );
    }

    #[test]
    fn replay_records_noops() {
        let t = tiny8();
        let cfg = Configuration::single_committee(8, 0);
        let empty = replay_failure_schedule(&t, &cfg, &[]).unwrap();
        assert_eq!(empty, init_view_state(&t, &cfg).unwrap());
        let s = replay_failure_schedule(&t, &cfg, &[(1, 0), (2, 5)]).unwrap();
        assert!(s.is_leader(1));
        assert_eq!(s.view(), 1);
        assert!(s.history()[1].noop);
        assert_eq!(
            replay_failure_schedule(&t, &cfg, &[(2, 0), (2, 1)]),
            Err(SequencerError::UnorderedSchedule(1))
        );
    }

    #[test]
    fn follower_failure_refreshes_backup() {
        let a = asym();
        let s = init_view_state(&a, &Configuration::single_committee(4, 0)).unwrap();
        let s = on_follower_failure(&a, &s, 3).unwrap();
        assert_eq!(s.view(), 0);
        assert_eq!(s.followers(0), vec![1, 2]);
        // 1: 10 + 2 = 12, 2: 13 + 2 = 15
        assert_eq!(s.takeover(0).unwrap().backup, 1);
        assert_eq!(on_follower_failure(&a, &s, 0), Err(SequencerError::NotAFollower(0)));
    }
}
