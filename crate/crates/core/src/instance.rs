//! Problem instances: node count, pairwise delays, verification-committee
//! delays, per-node failure probabilities and the per-committee fault budget.

use alloc::vec::Vec;

use crate::NodeId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InstanceError {
    #[error("instance must contain at least one node")]
    Empty,
    #[error("f_min must be at least 1")]
    ZeroFaultBudget,
    #[error("{field} has length {actual}, expected {expected}")]
    Length {
        field: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("{field}[{index}] = {value} is not a finite nonnegative delay")]
    BadDelay {
        field: &'static str,
        index: usize,
        value: f64,
    },
    #[error("delay from node {0} to itself must be zero")]
    NonZeroDiagonal(NodeId),
    #[error("failure probability of node {node} is {value}, outside [0, 1]")]
    BadProbability { node: NodeId, value: f64 },
}

/// A parallel BFT deployment to be configured.
///
/// Delays are milliseconds. `delay(i, j)` is directed; the optimization
/// models only read the leader-to-follower direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    n: usize,
    f_min: usize,
    delays: Vec<f64>,
    to_verifier: Vec<f64>,
    from_verifier: Vec<f64>,
    failure: Vec<f64>,
}

impl Instance {
    /// Builds and validates an instance. `delays` is row-major `n x n`.
    /// `from_verifier` defaults to `to_verifier` when absent.
    ///
    /// `n < 3 * f_min + 1` is accepted here; solvers report it as infeasible.
    pub fn new(
        n: usize,
        f_min: usize,
        delays: Vec<f64>,
        to_verifier: Vec<f64>,
        from_verifier: Option<Vec<f64>>,
        failure: Vec<f64>,
    ) -> Result<Self, InstanceError> {
        if n == 0 {
            return Err(InstanceError::Empty);
        }
        if f_min == 0 {
            return Err(InstanceError::ZeroFaultBudget);
        }
        let from_verifier = from_verifier.unwrap_or_else(|| to_verifier.clone());
        check_len("D", &delays, n * n)?;
        check_len("dv", &to_verifier, n)?;
        check_len("dv_rev", &from_verifier, n)?;
        check_len("f", &failure, n)?;
        check_delays("D", &delays)?;
        check_delays("dv", &to_verifier)?;
        check_delays("dv_rev", &from_verifier)?;
        for i in 0..n {
            if delays[i * n + i] != 0.0 {
                return Err(InstanceError::NonZeroDiagonal(i));
            }
        }
        for (node, &value) in failure.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(InstanceError::BadProbability { node, value });
            }
        }
        Ok(Self {
            n,
            f_min,
            delays,
            to_verifier,
            from_verifier,
            failure,
        })
    }

    /// Every link costs `link`, every verifier hop costs `verify`, every
    /// node fails with probability `failure`.
    pub fn uniform(n: usize, f_min: usize, link: f64, verify: f64, failure: f64) -> Result<Self, InstanceError> {
        let mut delays = alloc::vec![link; n * n];
        for i in 0..n {
            delays[i * n + i] = 0.0;
        }
        Self::new(n, f_min, delays, alloc::vec![verify; n], None, alloc::vec![failure; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f_min(&self) -> usize {
        self.f_min
    }

    /// Smallest admissible committee, leader included.
    pub fn min_committee_size(&self) -> usize {
        3 * self.f_min + 1
    }

    /// Minimum number of followers per leader.
    pub fn min_followers(&self) -> usize {
        3 * self.f_min
    }

    /// Whether at least one committee can be formed.
    pub fn admits_committee(&self) -> bool {
        self.n >= self.min_committee_size()
    }

    #[inline]
    pub fn delay(&self, from: NodeId, to: NodeId) -> f64 {
        self.delays[from * self.n + to]
    }

    /// Node to verification committee.
    #[inline]
    pub fn verify_delay(&self, node: NodeId) -> f64 {
        self.to_verifier[node]
    }

    /// Verification committee back to node.
    #[inline]
    pub fn reply_delay(&self, node: NodeId) -> f64 {
        self.from_verifier[node]
    }

    /// Scenario weight of node `node` failing.
    #[inline]
    pub fn failure_prob(&self, node: NodeId) -> f64 {
        self.failure[node]
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn verify_delays(&self) -> &[f64] {
        &self.to_verifier
    }

    pub fn reply_delays(&self) -> &[f64] {
        &self.from_verifier
    }

    pub fn failure_probs(&self) -> &[f64] {
        &self.failure
    }

    /// Largest entry of `D`, `dv` and `dv_rev`.
    pub fn max_delay(&self) -> f64 {
        self.delays
            .iter()
            .chain(&self.to_verifier)
            .chain(&self.from_verifier)
            .fold(0.0, |acc, &d| acc.max(d))
    }

    /// Copy with every delay multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, InstanceError> {
        let scale = |v: &[f64]| v.iter().map(|d| d * factor).collect::<Vec<_>>();
        Self::new(
            self.n,
            self.f_min,
            scale(&self.delays),
            scale(&self.to_verifier),
            Some(scale(&self.from_verifier)),
            self.failure.clone(),
        )
    }

    /// Copy with replaced failure probabilities.
    pub fn with_failure(&self, failure: Vec<f64>) -> Result<Self, InstanceError> {
        Self::new(
            self.n,
            self.f_min,
            self.delays.clone(),
            self.to_verifier.clone(),
            Some(self.from_verifier.clone()),
            failure,
        )
    }
}

fn check_len(field: &'static str, v: &[f64], expected: usize) -> Result<(), InstanceError> {
    if v.len() != expected {
        return Err(InstanceError::Length {
            field,
            expected,
            actual: v.len(),
        });
    }
    Ok(())
}

fn check_delays(field: &'static str, v: &[f64]) -> Result<(), InstanceError> {
    match v.iter().position(|d| !d.is_finite() || *d < 0.0) {
        Some(index) => Err(InstanceError::BadDelay {
            field,
            index,
            value: v[index],
        }),
        None => Ok(()),
    }
}
