use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};
use vco_core::benders::{optimal_plan, solve_normal_case, solve_vco, BendersError, SolveOptions};
use vco_core::config::{validate_backup_plan, validate_configuration};
use vco_core::oracle::{oracle_solve_vco, OracleError};
use vco_core::sequencer::{init_view_state, replay_failure_schedule, SequencerError, ViewState};
use vco_core::sim::{
    self, aggregate, strategy_configuration, Endpoint, Message, RunError, RunRow, SimConfig, Strategy, Workload,
};
use vco_core::{Configuration, Instance};

use crate::documents::{
    load_instance, ConfigurationDocument, DocumentError, FaultsDocument, Mode, ScheduleDocument, SolverStats,
};

#[derive(Debug, Parser)]
#[command(name = "vco", version, about = "View-change-aware committee configuration")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Optimality gap (ms) at which the exact solver stops.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,
    /// Base seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative message-delay jitter in simulations.
    #[arg(long, global = true, default_value_t = 0.1)]
    pub jitter: f64,
    /// Leader failure-detection timeout; defaults to four times the
    /// largest delay of the instance.
    #[arg(long = "timeout-ms", global = true)]
    pub timeout_ms: Option<f64>,
    /// Largest n the brute-force oracle accepts.
    #[arg(long = "size-guard", global = true, default_value_t = 12)]
    pub size_guard: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance and write a configuration document.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Vco)]
        mode: Mode,
        #[arg(long, short)]
        out: PathBuf,
        /// Benders iteration limit (default 10 n).
        #[arg(long)]
        max_iterations: Option<usize>,
    },
    /// Brute-force optimum, for small instances.
    Oracle { instance: PathBuf },
    /// Apply a leader-failure schedule and print the view history.
    Replay {
        instance: PathBuf,
        config: PathBuf,
        schedule: PathBuf,
    },
    /// Simulate strategies over several seeds and write a CSV.
    Bench {
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "vco,normal-only,random")]
        strategies: Vec<String>,
        /// Number of seeds, starting at --seed.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        /// Fault schedule document.
        #[arg(long)]
        faults: Option<PathBuf>,
        /// Requests per committee per second.
        #[arg(long, default_value_t = 10.0)]
        rate: f64,
        /// Requests over all committees.
        #[arg(long, default_value_t = 200)]
        requests: usize,
        #[arg(long, default_value_t = 10.0)]
        slow_factor: f64,
        #[arg(long, short)]
        out: PathBuf,
        /// Write each run's messages as JSON lines into this directory.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
    },
    /// Check an instance, and optionally a configuration against it.
    Validate {
        instance: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error("{0}")]
    Malformed(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    IterationLimit(String),
    #[error(transparent)]
    SizeGuard(OracleError),
    #[error(transparent)]
    EmptyCommittee(SequencerError),
    #[error("{0}")]
    Other(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    /// Process exit status for this failure.
    pub fn code(&self) -> u8 {
        match self {
            CliError::Other(_) | CliError::Io { .. } => 1,
            CliError::Document(_) | CliError::Malformed(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::IterationLimit(_) => 4,
            CliError::SizeGuard(_) => 5,
            CliError::EmptyCommittee(_) => 6,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn emit(out: &mut dyn Write, record: Value) -> Result<(), CliError> {
    writeln!(out, "{record}").map_err(io_err(Path::new("<stdout>")))
}

/// JSON has no NaN or infinity.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Solve {
            instance,
            mode,
            out: path,
            max_iterations,
        } => solve(g, instance, *mode, path, *max_iterations, out),
        Command::Oracle { instance } => oracle(g, instance, out),
        Command::Replay {
            instance,
            config,
            schedule,
        } => replay(instance, config, schedule, out),
        Command::Bench {
            instance,
            strategies,
            seeds,
            faults,
            rate,
            requests,
            slow_factor,
            out: path,
            trace_dir,
        } => {
            let strategies = strategies
                .iter()
                .map(|s| Strategy::from_name(s).ok_or_else(|| CliError::Malformed(format!("unknown strategy {s:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            if strategies.is_empty() {
                return Err(CliError::Malformed("no strategies given".into()));
            }
            let bench = Bench {
                strategies,
                seeds: (g.seed..g.seed.saturating_add(*seeds)).collect(),
                faults: faults.as_deref(),
                workload: Workload {
                    rate: *rate,
                    total: *requests,
                },
                slow_factor: *slow_factor,
                trace_dir: trace_dir.as_deref(),
            };
            bench.run(g, instance, path, out)
        }
        Command::Validate { instance, config } => validate(instance, config.as_deref(), out),
    }
}

fn solve_options(g: &Global, max_iterations: Option<usize>) -> SolveOptions {
    SolveOptions {
        tol: g.tol,
        max_iterations,
        ..SolveOptions::default()
    }
}

fn solve(
    g: &Global,
    instance: &Path,
    mode: Mode,
    path: &Path,
    max_iterations: Option<usize>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let inst = load_instance(instance)?;
    let opts = solve_options(g, max_iterations);
    let started = Instant::now();
    let infeasible = |e: BendersError| match e {
        BendersError::Infeasible { .. } => CliError::Infeasible(e.to_string()),
        other => CliError::Other(other.to_string()),
    };
    let (doc, limit) = match mode {
        Mode::Vco => {
            let (sol, limit) = match solve_vco(&inst, &opts) {
                Ok(sol) => (sol, None),
                Err(BendersError::IterationLimit { limit, incumbent }) => (*incumbent, Some(limit)),
                Err(e) => return Err(infeasible(e)),
            };
            let st = sol.state.stats();
            let certified = st.certified && limit.is_none();
            let stats = SolverStats {
                mode,
                iterations: st.iterations,
                cuts: st.cuts,
                nodes: st.nodes,
                gap: st.gap.is_finite().then_some(st.gap),
                certified,
                elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
            };
            (ConfigurationDocument::new(&sol.cfg, &sol.plan, Some(sol.value), Some(stats)), limit)
        }
        Mode::Normal => {
            let sol = solve_normal_case(&inst, &opts).map_err(infeasible)?;
            let stats = SolverStats {
                mode,
                iterations: 1,
                cuts: 0,
                nodes: sol.nodes,
                gap: sol.certified.then_some(0.0),
                certified: sol.certified,
                elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
            };
            let plan = optimal_plan(&inst, &sol.cfg);
            (ConfigurationDocument::new(&sol.cfg, &plan, Some(sol.value), Some(stats)), None)
        }
    };
    doc.save(path).map_err(|e| CliError::Other(e.to_string()))?;
    let stats = doc.stats.expect("solve fills stats");
    emit(
        out,
        json!({
            "mode": mode,
            "value": doc.objective_value.map(num),
            "gap": stats.gap.map(num),
            "certified": stats.certified,
            "iterations": stats.iterations,
        }),
    )?;
    match limit {
        Some(limit) => Err(CliError::IterationLimit(format!(
            "iteration limit {limit} reached; wrote the incumbent to {}",
            path.display()
        ))),
        None => Ok(()),
    }
}

fn oracle(g: &Global, instance: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let inst = load_instance(instance)?;
    let res = oracle_solve_vco(&inst, g.size_guard).map_err(|e| match e {
        OracleError::SizeGuardExceeded { .. } => CliError::SizeGuard(e),
        OracleError::NoFeasibleConfiguration { .. } => CliError::Infeasible(e.to_string()),
    })?;
    let backups: Vec<[usize; 2]> = res.best_plan.iter().map(|(l, b)| [l, b]).collect();
    emit(
        out,
        json!({
            "value": num(res.best_value),
            "leader_of": res.best_cfg.assignment(),
            "backups": backups,
            "enumerated": res.enumerated_count,
        }),
    )
}

fn checked_configuration(inst: &Instance, path: &Path) -> Result<ConfigurationDocument, CliError> {
    let doc = ConfigurationDocument::load(path)?;
    let bad = |message: String| {
        CliError::Document(DocumentError::Inconsistent {
            path: path.display().to_string(),
            message,
        })
    };
    if doc.leader_of.len() != inst.n() {
        return Err(bad(format!("leader_of has {} entries for n = {}", doc.leader_of.len(), inst.n())));
    }
    let cfg = doc.configuration();
    let violations = validate_configuration(inst, &cfg);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(bad(list.join(", ")));
    }
    let plan_violations = validate_backup_plan(&cfg, &doc.plan());
    if !plan_violations.is_empty() {
        return Err(bad(format!("{plan_violations:?}")));
    }
    Ok(doc)
}

fn state_record(state: &ViewState) -> Value {
    let leader_of: Vec<Option<usize>> = (0..state.n()).map(|j| state.leader_of(j)).collect();
    json!({ "view": state.view(), "leader_of": leader_of })
}

fn replay(instance: &Path, config: &Path, schedule: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let inst = load_instance(instance)?;
    let cfg = checked_configuration(&inst, config)?.configuration();
    let sched = ScheduleDocument::load(schedule)?;
    if let Some(f) = sched.failures.iter().find(|f| f.node >= inst.n()) {
        return Err(CliError::Malformed(format!("{}: node {} out of range", schedule.display(), f.node)));
    }
    let entries: Vec<(u64, usize)> = sched.failures.iter().map(|f| (f.view, f.node)).collect();
    let state = replay_failure_schedule(&inst, &cfg, &entries).map_err(|e| match e {
        SequencerError::EmptyCommittee(_) => CliError::EmptyCommittee(e),
        other => CliError::Malformed(format!("{}: {other}", schedule.display())),
    })?;
    let start = init_view_state(&inst, &cfg).map_err(|e| CliError::Malformed(e.to_string()))?;
    emit(out, state_record(&start))?;
    for r in state.history() {
        emit(
            out,
            json!({
                "view": r.view,
                "failed": r.failed,
                "backup": r.backup,
                "exd": r.exd.map(num),
                "noop": r.noop,
                "undersized": r.undersized,
            }),
        )?;
    }
    if !state.history().is_empty() {
        emit(out, state_record(&state))?;
    }
    Ok(())
}

struct Bench<'a> {
    strategies: Vec<Strategy>,
    seeds: Vec<u64>,
    faults: Option<&'a Path>,
    workload: Workload,
    slow_factor: f64,
    trace_dir: Option<&'a Path>,
}

const CSV_HEADER: [&str; 11] = [
    "strategy",
    "seed",
    "n",
    "faults",
    "throughput_ops",
    "latency_mean_ms",
    "latency_p50_ms",
    "latency_p99_ms",
    "view_changes",
    "committed",
    "error",
];

fn default_timeout(inst: &Instance) -> f64 {
    let worst = inst
        .verify_delays()
        .iter()
        .chain(inst.reply_delays())
        .copied()
        .fold(inst.max_delay(), f64::max);
    4.0 * worst.max(1.0)
}

fn endpoint(e: Endpoint) -> Value {
    match e {
        Endpoint::Node(i) => json!(i),
        Endpoint::Verifier => json!("verifier"),
    }
}

fn write_trace(path: &Path, trace: &[Message]) -> Result<(), CliError> {
    let mut text = String::new();
    for m in trace {
        let line = json!({
            "kind": format!("{:?}", m.kind),
            "sender": endpoint(m.sender),
            "receiver": endpoint(m.receiver),
            "view": m.view,
            "seq": m.seq,
            "send_ms": m.send,
            "arrival_ms": m.arrival,
        });
        text.push_str(&line.to_string());
        text.push('\n');
    }
    fs::write(path, text).map_err(io_err(path))
}

impl Bench<'_> {
    fn run(&self, g: &Global, instance: &Path, csv_path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
        let inst = load_instance(instance)?;
        let faults = match self.faults {
            Some(p) => FaultsDocument::load(p)?.faults(),
            None => Vec::new(),
        };
        if let Some(dir) = self.trace_dir {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        let opts = solve_options(g, None);
        let timeout = g.timeout_ms.unwrap_or_else(|| default_timeout(&inst));

        let mut strategies = self.strategies.clone();
        strategies.sort();
        strategies.dedup();
        let mut tasks: Vec<(Strategy, u64, Result<Configuration, RunError>)> = Vec::new();
        for &s in &strategies {
            let fixed = (s != Strategy::Random).then(|| strategy_configuration(&inst, s, 0, &opts));
            for &seed in &self.seeds {
                let cfg = match &fixed {
                    Some(c) => c.clone(),
                    None => strategy_configuration(&inst, s, seed, &opts),
                };
                tasks.push((s, seed, cfg));
            }
        }

        let rows: Vec<Result<RunRow, CliError>> = tasks
            .into_par_iter()
            .map(|(strategy, seed, cfg)| {
                let result = match cfg {
                    Err(e) => Err(e),
                    Ok(cfg) => {
                        let conf = SimConfig {
                            inst: inst.clone(),
                            cfg,
                            strategy,
                            workload: self.workload,
                            faults: faults.clone(),
                            slow_factor: self.slow_factor,
                            timeout,
                            jitter: g.jitter,
                            seed,
                        };
                        match self.trace_dir {
                            None => sim::run(&conf).map_err(RunError::Sim),
                            Some(dir) => match sim::run_traced(&conf) {
                                Ok((m, trace)) => {
                                    write_trace(&dir.join(format!("{}-{seed}.jsonl", strategy.name())), &trace)?;
                                    Ok(m)
                                }
                                Err(e) => Err(RunError::Sim(e)),
                            },
                        }
                    }
                };
                Ok(RunRow {
                    strategy,
                    seed,
                    n: inst.n(),
                    faults: faults.len(),
                    result,
                })
            })
            .collect();
        let rows: Vec<RunRow> = rows.into_iter().collect::<Result<_, _>>()?;

        let mut w = csv::Writer::from_path(csv_path).map_err(|e| CliError::Other(format!("{}: {e}", csv_path.display())))?;
        let csv_err = |e: csv::Error| CliError::Other(format!("{}: {e}", csv_path.display()));
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        for r in &rows {
            let mut record = vec![r.strategy.name().to_string(), r.seed.to_string(), r.n.to_string(), r.faults.to_string()];
            match &r.result {
                Ok(m) => record.extend([
                    m.throughput.to_string(),
                    m.latency_mean.to_string(),
                    m.latency_p50.to_string(),
                    m.latency_p99.to_string(),
                    m.view_changes.to_string(),
                    m.committed.to_string(),
                    String::new(),
                ]),
                Err(e) => {
                    record.extend(std::iter::repeat_n(String::new(), 6));
                    record.push(e.to_string());
                }
            }
            w.write_record(&record).map_err(csv_err)?;
        }
        w.flush().map_err(io_err(csv_path))?;

        for a in aggregate(&rows) {
            emit(
                out,
                json!({
                    "strategy": a.strategy.name(),
                    "runs": a.runs,
                    "failed": a.failed,
                    "throughput_ops": num(a.throughput),
                    "latency_mean_ms": num(a.latency_mean),
                    "latency_p50_ms": num(a.latency_p50),
                    "latency_p99_ms": num(a.latency_p99),
                    "view_changes": num(a.view_changes),
                    "committed": num(a.committed),
                }),
            )?;
        }
        Ok(())
    }
}

fn validate(instance: &Path, config: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let inst = load_instance(instance)?;
    let mut record = json!({
        "valid": true,
        "n": inst.n(),
        "f_min": inst.f_min(),
        "admits_committee": inst.admits_committee(),
    });
    if let Some(path) = config {
        let doc = checked_configuration(&inst, path)?;
        record["committees"] = json!(doc.configuration().leaders().count());
    }
    emit(out, record)
}
