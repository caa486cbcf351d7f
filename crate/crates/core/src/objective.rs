//! Evaluators for the normal-case delay, the view-change delay terms and
//! the combined objective.
//!
//! Scenario `S_i` is the failure of node `i` alone and carries weight
//! `f_i`; failures of followers contribute nothing.

use alloc::vec::Vec;

use crate::config::{
    validate_backup_plan, validate_configuration, BackupPlan, BackupViolation, Configuration, Violation,
};
use crate::instance::Instance;
use crate::NodeId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid configuration: {0:?}")]
    InvalidConfiguration(Vec<Violation>),
    #[error("invalid backup plan: {0:?}")]
    InvalidPlan(Vec<BackupViolation>),
    #[error("node {0} is not a leader")]
    NotALeader(NodeId),
}

/// `d_iv + sum_{j in followers} d_ij`: what a committee led by `leader`
/// costs in the normal case. Also the saved delay `g` when `leader` fails.
pub fn committee_delay(inst: &Instance, leader: NodeId, followers: &[NodeId]) -> f64 {
    let mut total = inst.verify_delay(leader);
    for &j in followers {
        total += inst.delay(leader, j);
    }
    total
}

/// Extra delay when `backup` takes over `followers`:
/// `d_kv + sum_{j in followers} d_kj`. The `j = k` term is zero.
pub fn takeover_delay(inst: &Instance, backup: NodeId, followers: &[NodeId]) -> f64 {
    committee_delay(inst, backup, followers)
}

fn check_cfg(inst: &Instance, cfg: &Configuration) -> Result<(), ModelError> {
    let v = validate_configuration(inst, cfg);
    if v.is_empty() {
        Ok(())
    } else {
        Err(ModelError::InvalidConfiguration(v))
    }
}

fn check_plan(cfg: &Configuration, plan: &BackupPlan) -> Result<(), ModelError> {
    let v = validate_backup_plan(cfg, plan);
    if v.is_empty() {
        Ok(())
    } else {
        Err(ModelError::InvalidPlan(v))
    }
}

/// Normal-case delay: sum over committees of leader-to-verifier plus
/// leader-to-follower delays.
pub fn normal_objective(inst: &Instance, cfg: &Configuration) -> Result<f64, ModelError> {
    check_cfg(inst, cfg)?;
    Ok(normal_objective_unchecked(inst, cfg))
}

pub(crate) fn normal_objective_unchecked(inst: &Instance, cfg: &Configuration) -> f64 {
    cfg.committees()
        .iter()
        .map(|c| committee_delay(inst, c.leader, &c.followers))
        .sum()
}

/// Extra delay `f_{S_i}^k` incurred when leader `failed` is replaced by its
/// planned backup.
pub fn extra_delay(
    inst: &Instance,
    cfg: &Configuration,
    plan: &BackupPlan,
    failed: NodeId,
) -> Result<f64, ModelError> {
    if failed >= cfg.n() || !cfg.is_leader(failed) {
        return Err(ModelError::NotALeader(failed));
    }
    let backup = plan
        .backup_of(failed)
        .ok_or_else(|| ModelError::InvalidPlan(alloc::vec![BackupViolation::MissingBackup { leader: failed }]))?;
    if backup == failed || !cfg.x(failed, backup) {
        return Err(ModelError::InvalidPlan(alloc::vec![BackupViolation::BackupNotFollower {
            leader: failed,
            backup
        }]));
    }
    Ok(takeover_delay(inst, backup, &cfg.followers(failed)))
}

/// Saved delay `g_{S_i}` when leader `failed` drops out.
pub fn saved_delay(inst: &Instance, cfg: &Configuration, failed: NodeId) -> Result<f64, ModelError> {
    if failed >= cfg.n() || !cfg.is_leader(failed) {
        return Err(ModelError::NotALeader(failed));
    }
    Ok(committee_delay(inst, failed, &cfg.followers(failed)))
}

/// Expected view-change delay `Q(x)`; may be negative.
pub fn expected_vc_delay(inst: &Instance, cfg: &Configuration, plan: &BackupPlan) -> Result<f64, ModelError> {
    check_cfg(inst, cfg)?;
    check_plan(cfg, plan)?;
    let mut q = 0.0;
    for leader in cfg.leaders() {
        let f = extra_delay(inst, cfg, plan, leader)?;
        let g = saved_delay(inst, cfg, leader)?;
        q += inst.failure_prob(leader) * (f - g);
    }
    Ok(q)
}

/// Normal-case delay plus expected view-change delay.
pub fn total_objective(inst: &Instance, cfg: &Configuration, plan: &BackupPlan) -> Result<f64, ModelError> {
    let normal = normal_objective(inst, cfg)?;
    let q = expected_vc_delay(inst, cfg, plan)?;
    Ok(normal + q)
}

/// Backup minimizing the takeover delay over `followers`, lowest index on
/// ties (absolute tolerance `1e-9`). Returns `None` for an empty set.
pub fn best_backup(inst: &Instance, followers: &[NodeId]) -> Option<(NodeId, f64)> {
    let mut best: Option<(NodeId, f64)> = None;
    for &k in followers {
        let exd = takeover_delay(inst, k, followers);
        match best {
            Some((_, b)) if exd >= b - crate::OBJ_TOL => {}
            _ => best = Some((k, exd)),
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tiny8(f: f64) -> Instance {
        Instance::uniform(8, 1, 1.0, 5.0, f).unwrap()
    }

    fn two_committees() -> Configuration {
        Configuration::from_committees(8, &[(0, &[1, 2, 3]), (4, &[5, 6, 7])])
    }

    /// Committee {0; 1, 2, 3} with directed delays; takeover delays of
    /// backups 1, 2, 3 are 15, 16, 11.
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
    fn normal_objective_tiny8() {
        let inst = tiny8(0.1);
        assert_eq!(normal_objective(&inst, &Configuration::single_committee(8, 0)).unwrap(), 12.0);
        assert_eq!(normal_objective(&inst, &two_committees()).unwrap(), 16.0);
    }

    #[test]
    fn zero_delays_zero_objective() {
        let inst = Instance::uniform(6, 1, 0.0, 0.0, 0.2).unwrap();
        let cfg = Configuration::single_committee(6, 3);
        assert_eq!(normal_objective(&inst, &cfg).unwrap(), 0.0);
        assert_eq!(saved_delay(&inst, &cfg, 3).unwrap(), 0.0);
    }

    #[test]
    fn extra_delay_examples() {
        let inst = asym();
        let cfg = Configuration::single_committee(4, 0);
        let with = |k| extra_delay(&inst, &cfg, &BackupPlan::from_pairs([(0, k)]), 0).unwrap();
        assert_eq!(with(1), 15.0);
        assert_eq!(with(3), 11.0);
        assert_eq!(with(2), 16.0);
        let tiny = tiny8(0.1);
        let single = Configuration::single_committee(8, 0);
        for k in 1..8 {
            let plan = BackupPlan::from_pairs([(0, k)]);
            assert_eq!(extra_delay(&tiny, &single, &plan, 0).unwrap(), 11.0);
        }
        assert_eq!(
            extra_delay(&tiny, &single, &BackupPlan::from_pairs([(0, 1)]), 3),
            Err(ModelError::NotALeader(3))
        );
    }

    #[test]
    fn saved_delay_examples() {
        let inst = asym();
        let cfg = Configuration::from_committees(4, &[(0, &[1, 2, 3])]);
        // 8 + 1 + 4 + 2
        assert_eq!(saved_delay(&inst, &cfg, 0).unwrap(), 15.0);
        let tiny = tiny8(0.1);
        assert_eq!(saved_delay(&tiny, &Configuration::single_committee(8, 0), 0).unwrap(), 12.0);
        assert_eq!(saved_delay(&tiny, &two_committees(), 1), Err(ModelError::NotALeader(1)));
    }

    #[test]
    fn saved_delay_two_followers() {
        // leader 0, followers {1, 2}: 8 + 1 + 4 = 13
        let mut d = vec![0.0; 9];
        d[1] = 1.0;
        d[2] = 4.0;
        let inst = Instance::new(3, 1, d, vec![8.0, 0.0, 0.0], None, vec![0.0; 3]).unwrap();
        let cfg = Configuration::single_committee(3, 0);
        assert_eq!(saved_delay(&inst, &cfg, 0).unwrap(), 13.0);
    }

    #[test]
    fn expected_and_total_tiny8() {
        let inst = tiny8(0.1);
        let single = Configuration::single_committee(8, 0);
        let plan = BackupPlan::from_pairs([(0, 1)]);
        let q = expected_vc_delay(&inst, &single, &plan).unwrap();
        assert!((q + 0.1).abs() < 1e-12);
        assert!((total_objective(&inst, &single, &plan).unwrap() - 11.9).abs() < 1e-12);

        let two = two_committees();
        let plan2 = BackupPlan::from_pairs([(0, 1), (4, 5)]);
        assert!((expected_vc_delay(&inst, &two, &plan2).unwrap() + 0.2).abs() < 1e-12);
        assert!((total_objective(&inst, &two, &plan2).unwrap() - 15.8).abs() < 1e-12);

        let zero = tiny8(0.0);
        assert_eq!(expected_vc_delay(&zero, &single, &plan).unwrap(), 0.0);
        assert_eq!(total_objective(&zero, &single, &plan).unwrap(), 12.0);
    }

    #[test]
    fn invalid_inputs_propagate() {
        let inst = tiny8(0.1);
        let bad = Configuration::from_committees(8, &[(0, &[1, 2])]);
        assert!(matches!(normal_objective(&inst, &bad), Err(ModelError::InvalidConfiguration(_))));
        let single = Configuration::single_committee(8, 0);
        assert!(matches!(
            expected_vc_delay(&inst, &single, &BackupPlan::new()),
            Err(ModelError::InvalidPlan(_))
        ));
    }

    #[test]
    fn best_backup_ties_to_lowest() {
        let inst = tiny8(0.1);
        assert_eq!(best_backup(&inst, &[1, 2, 3, 4, 5, 6, 7]), Some((1, 11.0)));
        assert_eq!(best_backup(&asym(), &[1, 2, 3]), Some((3, 11.0)));
        assert_eq!(best_backup(&inst, &[]), None);
    }
}
