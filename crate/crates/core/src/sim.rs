//! Deterministic discrete-event simulation of committees running a
//! three-phase agreement plus a round trip to the verification committee.
//!
//! Every protocol phase is a synchronized round that ends when its slowest
//! message arrives (see [`round`]); a request's latency is the sum of
//! pre-prepare, prepare, commit and verification rounds measured from its
//! arrival. Requests within a committee are served one at a time.
//!
//! A crashed leader is noticed `timeout` ms later. Survivors then exchange
//! view-change messages, the backup waits for `ceil((2N - 5) / 3)`
//! acknowledgements (`N` counts the failed leader) and broadcasts the new
//! view; the request that was in flight is retried under the new leader.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::benders::{solve_normal_case, solve_vco, BendersError, SolveOptions};
use crate::config::{validate_configuration, Configuration, Violation};
use crate::instance::Instance;
use crate::sequencer::{hand_over, init_view_state, on_follower_failure, ViewState};
use crate::NodeId;

/// How the configuration under test was produced. Also selects how a
/// replacement leader is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strategy {
    /// Exact or heuristic VCO solve; backups by takeover delay.
    Vco,
    /// Normal-case-only solve; next follower in index order takes over.
    NormalOnly,
    /// Random partition; next follower in index order takes over.
    Random,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Vco, Strategy::NormalOnly, Strategy::Random];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Vco => "vco",
            Strategy::NormalOnly => "normal-only",
            Strategy::Random => "random",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultKind {
    Crash,
    /// Every message to or from the node takes `slow_factor` times longer.
    Slow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultTarget {
    Node(NodeId),
    /// Whoever leads the given committee (by position in
    /// [`Configuration::committees`]) when the fault fires.
    LeaderOf(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fault {
    pub time: f64,
    pub target: FaultTarget,
    pub kind: FaultKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Workload {
    /// Requests per committee per second.
    pub rate: f64,
    /// Requests over all committees.
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub inst: Instance,
    pub cfg: Configuration,
    pub strategy: Strategy,
    pub workload: Workload,
    pub faults: Vec<Fault>,
    pub slow_factor: f64,
    /// Ms of silence before followers suspect their leader.
    pub timeout: f64,
    /// Relative half-width of the uniform delay noise; 0 disables it.
    pub jitter: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimMetrics {
    /// Committed requests per second of simulated time.
    pub throughput: f64,
    pub latency_mean: f64,
    pub latency_p50: f64,
    pub latency_p99: f64,
    pub view_changes: usize,
    pub committed: usize,
    /// First eight bytes of the SHA-256 of the event log.
    pub trace_digest: u64,
    /// Simulated time of the last event (ms).
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid configuration: {0:?}")]
    InvalidConfiguration(Vec<Violation>),
    #[error("invalid simulation parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("committee {committee} lost liveness at {time} ms")]
    LivenessLost { committee: usize, time: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageKind {
    PrePrepare,
    Prepare,
    Commit,
    VerifyReq,
    VerifyReply,
    ViewChange,
    ViewChangeAck,
    NewView,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Node(NodeId),
    Verifier,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Message {
    pub kind: MessageKind,
    pub sender: Endpoint,
    pub receiver: Endpoint,
    pub view: u64,
    /// Request id, or the view number for view-change traffic.
    pub seq: u64,
    pub send: f64,
    pub arrival: f64,
}

/// Normal-case request latency of one committee with no jitter and no
/// faults: one-way pre-prepare, prepare and commit rounds plus the
/// verification round trip.
pub fn nominal_latency(inst: &Instance, leader: NodeId, followers: &[NodeId]) -> f64 {
    let pre = followers.iter().map(|&j| inst.delay(leader, j)).fold(0.0, f64::max);
    let mut all_pairs: f64 = 0.0;
    for &a in followers {
        for &b in followers {
            if a != b {
                all_pairs = all_pairs.max(inst.delay(a, b));
            }
        }
    }
    pre + 2.0 * all_pairs + inst.verify_delay(leader) + inst.reply_delay(leader)
}

/// Duration of a synchronized round: the latest arrival.
pub fn round(delays: impl IntoIterator<Item = f64>) -> f64 {
    delays.into_iter().fold(0.0, f64::max)
}

/// `ceil((2N - 5) / 3)` view-change acknowledgements, never negative.
pub fn ack_quorum(committee_size: usize) -> usize {
    let twice = 2 * committee_size as i64 - 5;
    if twice <= 0 {
        0
    } else {
        ((twice + 2) / 3) as usize
    }
}

/// Random valid configuration: shuffled nodes cut into blocks of
/// `3 f_min + 1` (the remainder joins the last block), each with a
/// uniformly chosen leader.
pub fn random_configuration(inst: &Instance, seed: u64) -> Option<Configuration> {
    if !inst.admits_committee() {
        return None;
    }
    let n = inst.n();
    let size = inst.min_committee_size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes: Vec<NodeId> = (0..n).collect();
    nodes.shuffle(&mut rng);
    let blocks = n / size;
    let mut leader_of = alloc::vec![0; n];
    for b in 0..blocks {
        let end = if b + 1 == blocks { n } else { (b + 1) * size };
        let block = &nodes[b * size..end];
        let leader = block[rng.gen_range(0..block.len())];
        for &j in block {
            leader_of[j] = leader;
        }
    }
    Some(Configuration::from_assignment(leader_of))
}

#[derive(Debug, Clone, Copy)]
enum EventKind {
    Fault(usize),
    Arrival { committee: usize, request: usize },
    PhaseEnd { committee: usize, epoch: u64, phase: u8 },
    Suspect { committee: usize, epoch: u64 },
    ViewChangeDone { committee: usize, failed: NodeId, backup: NodeId },
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    ordinal: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // min-heap on (time, ordinal)
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.ordinal.cmp(&self.ordinal))
    }
}

#[derive(Debug, Clone)]
struct CommitteeRun {
    leader: NodeId,
    /// Bumped whenever in-flight work is abandoned.
    epoch: u64,
    in_flight: Option<usize>,
    queue: VecDeque<usize>,
    changing_view: bool,
    deferred: Vec<usize>,
}

struct Sim<'a> {
    conf: &'a SimConfig,
    state: ViewState,
    committees: Vec<CommitteeRun>,
    crashed: Vec<bool>,
    slow: Vec<bool>,
    heap: BinaryHeap<Event>,
    ordinal: u64,
    rng: ChaCha8Rng,
    hasher: Sha256,
    trace: Option<Vec<Message>>,
    arrival: Vec<f64>,
    latencies: Vec<f64>,
    view_changes: usize,
    now: f64,
}

impl<'a> Sim<'a> {
    fn push(&mut self, time: f64, kind: EventKind) {
        self.ordinal += 1;
        self.heap.push(Event {
            time,
            ordinal: self.ordinal,
            kind,
        });
    }

    fn slowdown(&self, a: Option<NodeId>, b: Option<NodeId>) -> f64 {
        let slow = a.is_some_and(|a| self.slow[a]) || b.is_some_and(|b| self.slow[b]);
        if slow {
            self.conf.slow_factor
        } else {
            1.0
        }
    }

    fn sample(&mut self, base: f64) -> f64 {
        if self.conf.jitter > 0.0 {
            let eps = self.conf.jitter;
            base * self.rng.gen_range(1.0 - eps..=1.0 + eps)
        } else {
            base
        }
    }

    fn log(&mut self, msg: Message) {
        let code = |e: Endpoint| match e {
            Endpoint::Node(i) => i as u64,
            Endpoint::Verifier => u64::MAX,
        };
        self.hasher.update([msg.kind as u8]);
        self.hasher.update(code(msg.sender).to_le_bytes());
        self.hasher.update(code(msg.receiver).to_le_bytes());
        self.hasher.update(msg.view.to_le_bytes());
        self.hasher.update(msg.seq.to_le_bytes());
        self.hasher.update(msg.send.to_bits().to_le_bytes());
        self.hasher.update(msg.arrival.to_bits().to_le_bytes());
        if let Some(t) = self.trace.as_mut() {
            t.push(msg);
        }
    }

    /// Sends one message now and returns its delay.
    fn send(&mut self, kind: MessageKind, from: Endpoint, to: Endpoint, seq: u64) -> f64 {
        let inst = &self.conf.inst;
        let (base, a, b) = match (from, to) {
            (Endpoint::Node(i), Endpoint::Node(j)) => (inst.delay(i, j), Some(i), Some(j)),
            (Endpoint::Node(i), Endpoint::Verifier) => (inst.verify_delay(i), Some(i), None),
            (Endpoint::Verifier, Endpoint::Node(j)) => (inst.reply_delay(j), None, Some(j)),
            (Endpoint::Verifier, Endpoint::Verifier) => (0.0, None, None),
        };
        let d = self.sample(base * self.slowdown(a, b));
        let view = self.state.view();
        let now = self.now;
        self.log(Message {
            kind,
            sender: from,
            receiver: to,
            view,
            seq,
            send: now,
            arrival: now + d,
        });
        d
    }

    fn all_to_all(&mut self, kind: MessageKind, members: &[NodeId], seq: u64) -> f64 {
        let mut worst: f64 = 0.0;
        for &a in members {
            for &b in members {
                if a != b {
                    worst = worst.max(self.send(kind, Endpoint::Node(a), Endpoint::Node(b), seq));
                }
            }
        }
        worst
    }

    fn live_members(&self, c: usize) -> usize {
        1 + self.state.followers(self.committees[c].leader).len()
    }

    fn start_next(&mut self, c: usize) {
        let run = &self.committees[c];
        if run.in_flight.is_some() || run.changing_view {
            return;
        }
        let Some(req) = self.committees[c].queue.pop_front() else { return };
        self.committees[c].in_flight = Some(req);
        self.begin_phase(c, 0);
    }

    fn begin_phase(&mut self, c: usize, phase: u8) {
        let leader = self.committees[c].leader;
        let req = self.committees[c].in_flight.expect("phase of an in-flight request") as u64;
        let epoch = self.committees[c].epoch;
        let followers = self.state.followers(leader);
        let duration = match phase {
            0 => {
                let mut worst: f64 = 0.0;
                for &j in &followers {
                    worst = worst.max(self.send(MessageKind::PrePrepare, Endpoint::Node(leader), Endpoint::Node(j), req));
                }
                worst
            }
            1 => self.all_to_all(MessageKind::Prepare, &followers, req),
            2 => self.all_to_all(MessageKind::Commit, &followers, req),
            _ => {
                let up = self.send(MessageKind::VerifyReq, Endpoint::Node(leader), Endpoint::Verifier, req);
                let now = self.now;
                self.now += up;
                let down = self.send(MessageKind::VerifyReply, Endpoint::Verifier, Endpoint::Node(leader), req);
                self.now = now;
                up + down
            }
        };
        if phase == 0 && (self.crashed[leader] || duration > self.conf.timeout) {
            self.push(self.now + self.conf.timeout, EventKind::Suspect { committee: c, epoch });
        } else {
            self.push(self.now + duration, EventKind::PhaseEnd { committee: c, epoch, phase });
        }
    }

    fn phase_end(&mut self, c: usize, epoch: u64, phase: u8) {
        if self.committees[c].epoch != epoch {
            return;
        }
        if phase < 3 {
            self.begin_phase(c, phase + 1);
            return;
        }
        let req = self.committees[c].in_flight.take().expect("committed request");
        self.latencies.push(self.now - self.arrival[req]);
        self.start_next(c);
    }

    fn choose_backup(&self, failed: NodeId) -> Option<NodeId> {
        match self.conf.strategy {
            Strategy::Vco => self.state.takeover(failed).map(|t| t.backup),
            Strategy::NormalOnly | Strategy::Random => {
                let followers = self.state.followers(failed);
                followers
                    .iter()
                    .copied()
                    .find(|&j| j > failed)
                    .or_else(|| followers.first().copied())
            }
        }
    }

    fn abandon(&mut self, c: usize) {
        let run = &mut self.committees[c];
        run.epoch += 1;
        if let Some(req) = run.in_flight.take() {
            run.queue.push_front(req);
        }
    }

    fn suspect(&mut self, c: usize, epoch: u64) -> Result<(), SimError> {
        if self.committees[c].epoch != epoch || self.committees[c].changing_view {
            return Ok(());
        }
        self.abandon(c);
        let failed = self.committees[c].leader;
        let lost = SimError::LivenessLost {
            committee: c,
            time: self.now,
        };
        let survivors = self.state.followers(failed);
        if survivors.len() < 2 * self.conf.inst.f_min() + 1 {
            return Err(lost);
        }
        let Some(backup) = self.choose_backup(failed) else { return Err(lost) };
        let view = self.state.view() + 1;
        let vc = self.all_to_all(MessageKind::ViewChange, &survivors, view);
        let start = self.now;
        self.now += vc;
        let mut acks: Vec<f64> = Vec::new();
        for &j in &survivors {
            if j != backup {
                acks.push(self.send(MessageKind::ViewChangeAck, Endpoint::Node(j), Endpoint::Node(backup), view));
            }
        }
        acks.sort_by(f64::total_cmp);
        let quorum = ack_quorum(survivors.len() + 1);
        if quorum > acks.len() {
            self.now = start;
            return Err(lost);
        }
        let ack = if quorum == 0 { 0.0 } else { acks[quorum - 1] };
        self.now += ack;
        let mut nv: f64 = 0.0;
        for &j in &survivors {
            if j != backup {
                nv = nv.max(self.send(MessageKind::NewView, Endpoint::Node(backup), Endpoint::Node(j), view));
            }
        }
        self.now = start;
        self.committees[c].changing_view = true;
        self.push(start + vc + ack + nv, EventKind::ViewChangeDone { committee: c, failed, backup });
        Ok(())
    }

    fn view_change_done(&mut self, c: usize, failed: NodeId, backup: NodeId) {
        self.state = hand_over(&self.conf.inst, &self.state, failed, backup).expect("backup chosen among followers");
        self.crashed[failed] = true;
        self.view_changes += 1;
        let run = &mut self.committees[c];
        run.leader = backup;
        run.changing_view = false;
        for fault in core::mem::take(&mut run.deferred) {
            self.push(self.now, EventKind::Fault(fault));
        }
        self.start_next(c);
    }

    fn committee_of(&self, node: NodeId) -> Option<usize> {
        let leader = self.state.leader_of(node)?;
        self.committees.iter().position(|r| r.leader == leader)
    }

    fn fault(&mut self, index: usize) -> Result<(), SimError> {
        let fault = self.conf.faults[index];
        let node = match fault.target {
            FaultTarget::Node(i) => i,
            FaultTarget::LeaderOf(c) => match self.committees.get(c) {
                Some(run) => run.leader,
                None => return Ok(()),
            },
        };
        if node >= self.crashed.len() || self.crashed[node] {
            return Ok(());
        }
        let Some(c) = self.committee_of(node) else { return Ok(()) };
        if self.committees[c].changing_view {
            self.committees[c].deferred.push(index);
            return Ok(());
        }
        match fault.kind {
            FaultKind::Slow => self.slow[node] = true,
            FaultKind::Crash if self.committees[c].leader == node => {
                self.crashed[node] = true;
                self.abandon(c);
                let epoch = self.committees[c].epoch;
                self.push(self.now + self.conf.timeout, EventKind::Suspect { committee: c, epoch });
            }
            FaultKind::Crash => {
                self.crashed[node] = true;
                self.state = on_follower_failure(&self.conf.inst, &self.state, node).expect("active follower");
                if self.live_members(c) < 2 * self.conf.inst.f_min() + 1 {
                    return Err(SimError::LivenessLost {
                        committee: c,
                        time: self.now,
                    });
                }
            }
        }
        Ok(())
    }
}

fn check(conf: &SimConfig) -> Result<(), SimError> {
    let violations = validate_configuration(&conf.inst, &conf.cfg);
    if !violations.is_empty() {
        return Err(SimError::InvalidConfiguration(violations));
    }
    let inst = &conf.inst;
    let worst = inst
        .max_delay()
        .max(inst.verify_delays().iter().copied().fold(0.0, f64::max));
    if conf.timeout.is_nan() || conf.timeout <= worst {
        return Err(SimError::InvalidParameter("timeout must exceed every link delay"));
    }
    if conf.slow_factor.is_nan() || conf.slow_factor < 1.0 {
        return Err(SimError::InvalidParameter("slow factor must be at least 1"));
    }
    if conf.workload.rate.is_nan() || conf.workload.rate <= 0.0 {
        return Err(SimError::InvalidParameter("request rate must be positive"));
    }
    if !(0.0..1.0).contains(&conf.jitter) {
        return Err(SimError::InvalidParameter("jitter must lie in [0, 1)"));
    }
    if conf.faults.iter().any(|f| !f.time.is_finite() || f.time < 0.0) {
        return Err(SimError::InvalidParameter("fault times must be finite and nonnegative"));
    }
    Ok(())
}

fn simulate(conf: &SimConfig, keep_trace: bool) -> Result<(SimMetrics, Vec<Message>), SimError> {
    check(conf)?;
    let n = conf.inst.n();
    let state = init_view_state(&conf.inst, &conf.cfg).map_err(|_| SimError::InvalidConfiguration(Vec::new()))?;
    let committees: Vec<CommitteeRun> = conf
        .cfg
        .committees()
        .iter()
        .map(|c| CommitteeRun {
            leader: c.leader,
            epoch: 0,
            in_flight: None,
            queue: VecDeque::new(),
            changing_view: false,
            deferred: Vec::new(),
        })
        .collect();
    let ncomm = committees.len();
    let mut sim = Sim {
        conf,
        state,
        committees,
        crashed: alloc::vec![false; n],
        slow: alloc::vec![false; n],
        heap: BinaryHeap::new(),
        ordinal: 0,
        rng: ChaCha8Rng::seed_from_u64(conf.seed),
        hasher: Sha256::new(),
        trace: keep_trace.then(Vec::new),
        arrival: Vec::with_capacity(conf.workload.total),
        latencies: Vec::new(),
        view_changes: 0,
        now: 0.0,
    };
    for (i, f) in conf.faults.iter().enumerate() {
        sim.push(f.time, EventKind::Fault(i));
    }
    let spacing = 1000.0 / conf.workload.rate;
    for request in 0..conf.workload.total {
        let time = (request / ncomm) as f64 * spacing;
        sim.arrival.push(time);
        sim.push(
            time,
            EventKind::Arrival {
                committee: request % ncomm,
                request,
            },
        );
    }

    while let Some(ev) = sim.heap.pop() {
        sim.now = ev.time;
        match ev.kind {
            EventKind::Fault(i) => sim.fault(i)?,
            EventKind::Arrival { committee, request } => {
                sim.committees[committee].queue.push_back(request);
                sim.start_next(committee);
            }
            EventKind::PhaseEnd { committee, epoch, phase } => sim.phase_end(committee, epoch, phase),
            EventKind::Suspect { committee, epoch } => sim.suspect(committee, epoch)?,
            EventKind::ViewChangeDone {
                committee,
                failed,
                backup,
            } => sim.view_change_done(committee, failed, backup),
        }
    }

    let mut sorted = sim.latencies.clone();
    sorted.sort_by(f64::total_cmp);
    let committed = sorted.len();
    let horizon = sim.now;
    let rank = |q: f64| -> f64 {
        if committed == 0 {
            0.0
        } else {
            let idx = libm_ceil(q * committed as f64).max(1.0) as usize - 1;
            sorted[idx.min(committed - 1)]
        }
    };
    let digest = sim.hasher.finalize();
    let mut first = [0u8; 8];
    first.copy_from_slice(&digest[..8]);
    let metrics = SimMetrics {
        throughput: if horizon > 0.0 { committed as f64 / (horizon / 1000.0) } else { 0.0 },
        latency_mean: if committed == 0 { 0.0 } else { sorted.iter().sum::<f64>() / committed as f64 },
        latency_p50: rank(0.5),
        latency_p99: rank(0.99),
        view_changes: sim.view_changes,
        committed,
        trace_digest: u64::from_le_bytes(first),
        horizon,
    };
    Ok((metrics, sim.trace.unwrap_or_default()))
}

fn libm_ceil(x: f64) -> f64 {
    let t = x as i64 as f64;
    if t < x {
        t + 1.0
    } else {
        t
    }
}

pub fn run(conf: &SimConfig) -> Result<SimMetrics, SimError> {
    simulate(conf, false).map(|(m, _)| m)
}

/// [`run`] that also returns every message in send order.
pub fn run_traced(conf: &SimConfig) -> Result<(SimMetrics, Vec<Message>), SimError> {
    simulate(conf, true)
}

/// Everything but the instance, configuration, strategy and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub workload: Workload,
    pub faults: Vec<Fault>,
    pub slow_factor: f64,
    pub timeout: f64,
    pub jitter: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Solve(BendersError),
    #[error("no feasible configuration")]
    Infeasible,
    #[error(transparent)]
    Sim(SimError),
}

/// Configuration a strategy produces. A VCO solve that stops at its
/// iteration limit contributes its incumbent.
pub fn strategy_configuration(
    inst: &Instance,
    strategy: Strategy,
    seed: u64,
    opts: &SolveOptions,
) -> Result<Configuration, RunError> {
    match strategy {
        Strategy::Vco => match solve_vco(inst, opts) {
            Ok(s) => Ok(s.cfg),
            Err(BendersError::IterationLimit { incumbent, .. }) => Ok(incumbent.cfg),
            Err(e) => Err(RunError::Solve(e)),
        },
        Strategy::NormalOnly => solve_normal_case(inst, opts).map(|s| s.cfg).map_err(RunError::Solve),
        Strategy::Random => random_configuration(inst, seed).ok_or(RunError::Infeasible),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub strategy: Strategy,
    pub seed: u64,
    pub n: usize,
    pub faults: usize,
    pub result: Result<SimMetrics, RunError>,
}

/// Means over a strategy's successful runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub strategy: Strategy,
    pub runs: usize,
    pub failed: usize,
    pub throughput: f64,
    pub latency_mean: f64,
    pub latency_p50: f64,
    pub latency_p99: f64,
    pub view_changes: f64,
    pub committed: f64,
}

pub fn simulate_row(
    inst: &Instance,
    cfg: Result<Configuration, RunError>,
    strategy: Strategy,
    seed: u64,
    scenario: &Scenario,
) -> RunRow {
    let result = cfg.and_then(|cfg| {
        let conf = SimConfig {
            inst: inst.clone(),
            cfg,
            strategy,
            workload: scenario.workload,
            faults: scenario.faults.clone(),
            slow_factor: scenario.slow_factor,
            timeout: scenario.timeout,
            jitter: scenario.jitter,
            seed,
        };
        run(&conf).map_err(RunError::Sim)
    });
    RunRow {
        strategy,
        seed,
        n: inst.n(),
        faults: scenario.faults.len(),
        result,
    }
}

/// Runs every strategy under every seed. Rows come out sorted by strategy
/// then seed; errors stay in their row.
pub fn compare(
    inst: &Instance,
    strategies: &[Strategy],
    seeds: &[u64],
    scenario: &Scenario,
    opts: &SolveOptions,
) -> (Vec<RunRow>, Vec<Aggregate>) {
    let mut strategies = strategies.to_vec();
    strategies.sort();
    strategies.dedup();
    let mut rows = Vec::new();
    for &strategy in &strategies {
        let fixed = (strategy != Strategy::Random).then(|| strategy_configuration(inst, strategy, 0, opts));
        for &seed in seeds {
            let cfg = match &fixed {
                Some(c) => c.clone(),
                None => strategy_configuration(inst, strategy, seed, opts),
            };
            rows.push(simulate_row(inst, cfg, strategy, seed, scenario));
        }
    }
    rows.sort_by_key(|r| (r.strategy, r.seed));
    let aggregates = aggregate(&rows);
    (rows, aggregates)
}

/// Per-strategy means, in strategy order.
pub fn aggregate(rows: &[RunRow]) -> Vec<Aggregate> {
    let mut strategies: Vec<Strategy> = rows.iter().map(|r| r.strategy).collect();
    strategies.sort();
    strategies.dedup();
    strategies
        .into_iter()
        .map(|strategy| {
            let mine: Vec<&RunRow> = rows.iter().filter(|r| r.strategy == strategy).collect();
            let ok: Vec<&SimMetrics> = mine.iter().filter_map(|r| r.result.as_ref().ok()).collect();
            let mean = |f: &dyn Fn(&SimMetrics) -> f64| {
                if ok.is_empty() {
                    f64::NAN
                } else {
                    ok.iter().map(|m| f(m)).sum::<f64>() / ok.len() as f64
                }
            };
            Aggregate {
                strategy,
                runs: mine.len(),
                failed: mine.len() - ok.len(),
                throughput: mean(&|m| m.throughput),
                latency_mean: mean(&|m| m.latency_mean),
                latency_p50: mean(&|m| m.latency_p50),
                latency_p99: mean(&|m| m.latency_p99),
                view_changes: mean(&|m| m.view_changes as f64),
                committed: mean(&|m| m.committed as f64),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four(timeout: f64) -> SimConfig {
        SimConfig {
            inst: Instance::uniform(4, 1, 1.0, 5.0, 0.1).unwrap(),
            cfg: Configuration::single_committee(4, 0),
            strategy: Strategy::Vco,
            workload: Workload { rate: 10.0, total: 1 },
            faults: Vec::new(),
            slow_factor: 1.0,
            timeout,
            jitter: 0.0,
            seed: 1,
        }
    }

    #[test]
    fn golden_latency() {
        let m = run(&four(50.0)).unwrap();
        assert_eq!(m.committed, 1);
        assert_eq!(m.latency_mean, 13.0);
        assert_eq!(m.latency_p50, 13.0);
        assert_eq!(m.latency_p99, 13.0);
        assert_eq!(m.view_changes, 0);
        assert_eq!(nominal_latency(&four(50.0).inst, 0, &[1, 2, 3]), 13.0);
    }

    #[test]
    fn crash_adds_timeout_plus_three_rounds() {
        let mut conf = four(50.0);
        conf.faults.push(Fault {
            time: 0.0,
            target: FaultTarget::LeaderOf(0),
            kind: FaultKind::Crash,
        });
        let m = run(&conf).unwrap();
        assert_eq!(m.view_changes, 1);
        assert_eq!(m.latency_mean, 50.0 + 3.0 + 13.0);
    }

    #[test]
    fn zero_requests() {
        let mut conf = four(50.0);
        conf.workload.total = 0;
        let (m, trace) = run_traced(&conf).unwrap();
        assert_eq!(m.throughput, 0.0);
        assert_eq!(m.committed, 0);
        assert!(trace.is_empty());
    }

    #[test]
    fn digest_is_deterministic() {
        let mut conf = four(50.0);
        conf.jitter = 0.1;
        conf.workload.total = 20;
        let a = run(&conf).unwrap();
        assert_eq!(a, run(&conf).unwrap());
        conf.seed = 2;
        assert_ne!(a.trace_digest, run(&conf).unwrap().trace_digest);
    }

    #[test]
    fn quorum_arithmetic() {
        assert_eq!(ack_quorum(4), 1);
        assert_eq!(ack_quorum(7), 3);
        assert_eq!(ack_quorum(2), 0);
    }

    #[test]
    fn parameter_checks() {
        assert!(matches!(run(&four(5.0)), Err(SimError::InvalidParameter(_))));
        let mut conf = four(50.0);
        conf.cfg = Configuration::from_committees(4, &[(0, &[1, 2])]);
        assert!(matches!(run(&conf), Err(SimError::InvalidConfiguration(_))));
    }

    #[test]
    fn second_crash_loses_liveness() {
        let mut conf = four(50.0);
        conf.workload.total = 4;
        for t in [0.0, 100.0] {
            conf.faults.push(Fault {
                time: t,
                target: FaultTarget::LeaderOf(0),
                kind: FaultKind::Crash,
            });
        }
        assert!(matches!(run(&conf), Err(SimError::LivenessLost { committee: 0, .. })));
    }

    #[test]
    fn slow_leader_is_replaced() {
        let mut conf = four(50.0);
        conf.slow_factor = 100.0;
        conf.workload.total = 2;
        conf.faults.push(Fault {
            time: 0.0,
            target: FaultTarget::Node(0),
            kind: FaultKind::Slow,
        });
        let m = run(&conf).unwrap();
        assert_eq!(m.view_changes, 1);
        assert_eq!(m.committed, 2);
    }

    #[test]
    fn random_configurations_are_valid() {
        let inst = Instance::uniform(9, 1, 1.0, 1.0, 0.0).unwrap();
        let cfg = random_configuration(&inst, 3).unwrap();
        let mut sizes: Vec<usize> = cfg.committees().iter().map(|c| c.size()).collect();
        sizes.sort();
        assert_eq!(sizes, [4, 5]);
        let one = random_configuration(&Instance::uniform(4, 1, 1.0, 1.0, 0.0).unwrap(), 9).unwrap();
        assert_eq!(one.leaders().count(), 1);
    }

    #[test]
    fn compare_counts_rows() {
        let inst = Instance::uniform(8, 1, 1.0, 5.0, 0.1).unwrap();
        let scenario = Scenario {
            workload: Workload { rate: 20.0, total: 10 },
            faults: Vec::new(),
            slow_factor: 1.0,
            timeout: 50.0,
            jitter: 0.0,
        };
        let seeds: Vec<u64> = (0..10).collect();
        let (rows, aggs) = compare(&inst, &[Strategy::Random, Strategy::Vco], &seeds, &scenario, &SolveOptions::default());
        assert_eq!(rows.len(), 20);
        assert_eq!(aggs.len(), 2);
        assert_eq!(rows[0].strategy, Strategy::Vco);
        assert!(rows.iter().all(|r| r.result.is_ok()));
    }
}
