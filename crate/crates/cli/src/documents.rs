//! JSON documents read and written by the command-line tool.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use vco_core::{BackupPlan, Configuration, Instance, InstanceError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("{path}: unsupported schema_version {found} (expected {SCHEMA_VERSION})")]
    Version { path: String, found: u32 },
    #[error("{path}: {source}")]
    Instance { path: String, source: InstanceError },
    #[error("{path}: {message}")]
    Inconsistent { path: String, message: String },
}

trait Versioned {
    fn schema_version(&self) -> u32;
}

fn load<T: DeserializeOwned + Versioned>(path: &Path) -> Result<T, DocumentError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| DocumentError::Io {
        path: shown.clone(),
        source,
    })?;
    let doc: T = serde_json::from_str(&text).map_err(|source| DocumentError::Parse {
        path: shown.clone(),
        source,
    })?;
    if doc.schema_version() != SCHEMA_VERSION {
        return Err(DocumentError::Version {
            path: shown,
            found: doc.schema_version(),
        });
    }
    Ok(doc)
}

fn save<T: Serialize>(doc: &T, path: &Path) -> Result<(), DocumentError> {
    let mut text = serde_json::to_string_pretty(doc).expect("documents serialize");
    text.push('\n');
    fs::write(path, text).map_err(|source| DocumentError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub schema_version: u32,
    pub n: usize,
    pub f_min: usize,
    /// Row-major `n x n` delays in ms.
    #[serde(rename = "D")]
    pub d: Vec<f64>,
    pub dv: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dv_rev: Option<Vec<f64>>,
    pub f: Vec<f64>,
}

impl Versioned for InstanceDocument {
    fn schema_version(&self) -> u32 {
        self.schema_version
    }
}

impl InstanceDocument {
    pub fn from_instance(inst: &Instance) -> Self {
        let rev = (inst.reply_delays() != inst.verify_delays()).then(|| inst.reply_delays().to_vec());
        Self {
            schema_version: SCHEMA_VERSION,
            n: inst.n(),
            f_min: inst.f_min(),
            d: inst.delays().to_vec(),
            dv: inst.verify_delays().to_vec(),
            dv_rev: rev,
            f: inst.failure_probs().to_vec(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance, InstanceError> {
        Instance::new(
            self.n,
            self.f_min,
            self.d.clone(),
            self.dv.clone(),
            self.dv_rev.clone(),
            self.f.clone(),
        )
    }

    pub fn load(path: &Path) -> Result<Self, DocumentError> {
        load(path)
    }

    pub fn save(&self, path: &Path) -> Result<(), DocumentError> {
        save(self, path)
    }
}

/// Loads and validates an instance file.
pub fn load_instance(path: &Path) -> Result<Instance, DocumentError> {
    InstanceDocument::load(path)?
        .to_instance()
        .map_err(|source| DocumentError::Instance {
            path: path.display().to_string(),
            source,
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverStats {
    pub mode: Mode,
    pub iterations: usize,
    pub cuts: usize,
    pub nodes: usize,
    /// Absent when the result is not certified.
    pub gap: Option<f64>,
    pub certified: bool,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Vco,
    Normal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigurationDocument {
    pub schema_version: u32,
    pub leader_of: Vec<usize>,
    /// Leader to backup.
    #[serde(default)]
    pub backups: BTreeMap<usize, usize>,
    pub objective_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<SolverStats>,
}

impl Versioned for ConfigurationDocument {
    fn schema_version(&self) -> u32 {
        self.schema_version
    }
}

impl ConfigurationDocument {
    pub fn new(cfg: &Configuration, plan: &BackupPlan, value: Option<f64>, stats: Option<SolverStats>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            leader_of: cfg.assignment().to_vec(),
            backups: plan.iter().collect(),
            objective_value: value,
            stats,
        }
    }

    pub fn configuration(&self) -> Configuration {
        Configuration::from_assignment(self.leader_of.clone())
    }

    pub fn plan(&self) -> BackupPlan {
        BackupPlan::from_pairs(self.backups.iter().map(|(&l, &b)| (l, b)))
    }

    pub fn load(path: &Path) -> Result<Self, DocumentError> {
        load(path)
    }

    pub fn save(&self, path: &Path) -> Result<(), DocumentError> {
        save(self, path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduledFailure {
    pub view: u64,
    pub node: usize,
}

/// Leader failures for `replay`, in increasing view order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleDocument {
    pub schema_version: u32,
    pub failures: Vec<ScheduledFailure>,
}

impl Versioned for ScheduleDocument {
    fn schema_version(&self) -> u32 {
        self.schema_version
    }
}

impl ScheduleDocument {
    pub fn load(path: &Path) -> Result<Self, DocumentError> {
        load(path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSpec {
    Node(usize),
    LeaderOf(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindSpec {
    Crash,
    Slow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultSpec {
    pub time_ms: f64,
    pub target: TargetSpec,
    pub kind: KindSpec,
}

/// Fault schedule for `bench`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultsDocument {
    pub schema_version: u32,
    pub faults: Vec<FaultSpec>,
}

impl Versioned for FaultsDocument {
    fn schema_version(&self) -> u32 {
        self.schema_version
    }
}

impl FaultsDocument {
    pub fn load(path: &Path) -> Result<Self, DocumentError> {
        load(path)
    }

    pub fn faults(&self) -> Vec<vco_core::sim::Fault> {
        use vco_core::sim::{Fault, FaultKind, FaultTarget};
        self.faults
            .iter()
            .map(|f| Fault {
                time: f.time_ms,
                target: match f.target {
                    TargetSpec::Node(i) => FaultTarget::Node(i),
                    TargetSpec::LeaderOf(c) => FaultTarget::LeaderOf(c),
                },
                kind: match f.kind {
                    KindSpec::Crash => FaultKind::Crash,
                    KindSpec::Slow => FaultKind::Slow,
                },
            })
            .collect()
    }
}
