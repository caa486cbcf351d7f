//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{random_instance, rng, two_tier_instance};
use rand::Rng;
use vco_core::benders::{enumerate_subproblem, lp_relax_subproblem, q_star, solve_subproblem, solve_vco, SolveOptions};
use vco_core::objective::committee_delay;
use vco_core::oracle::{enumerate_configurations, oracle_solve_vco};
use vco_core::sequencer::{init_view_state, replay_failure_schedule, ViewState};
use vco_core::sim::{
    self, compare, nominal_latency, random_configuration, Fault, FaultKind, FaultTarget, Scenario, SimConfig, Strategy,
    Workload,
};
use vco_core::{Configuration, Instance};

const VALUE_TOL: f64 = 1e-6;
const CUT_TOL: f64 = 1e-9;
const RELAX_TOL: f64 = 1e-9;
const SCALE_REL_TOL: f64 = 1e-6;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: &str, name: &str, pass: bool, detail: String, started: Instant) {
        if !pass {
            self.failures += 1;
        }
        println!(
            "{} {id} {name}: {detail} ({:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
    }
}

fn single_committee(rng: &mut rand_chacha::ChaCha8Rng) -> (Instance, Configuration, usize) {
    let size = rng.gen_range(4..=12);
    let inst = random_instance(rng, size);
    let leader = rng.gen_range(0..size);
    (inst, Configuration::single_committee(size, leader), leader)
}

fn exact_runs(report: &mut Report) {
    let started = Instant::now();
    let mut rng = rng(2024);
    let opts = SolveOptions::default();
    let cases = 60;
    let (mut matched, mut tight, mut valid, mut checked_validity) = (0, 0, 0, 0);
    let (mut monotone, mut closed, mut within_limit) = (0, 0, 0);
    let mut worst_cut = 0.0f64;
    let mut cut_count = 0;
    for case in 0..cases {
        let n = 4 + case % 6;
        let inst = random_instance(&mut rng, n);
        let sol = match solve_vco(&inst, &opts) {
            Ok(s) => s,
            Err(e) => {
                println!("  case {case} (n = {n}): {e}");
                continue;
            }
        };
        let oracle = oracle_solve_vco(&inst, 12).unwrap();
        if (sol.value - oracle.best_value).abs() <= VALUE_TOL {
            matched += 1;
        } else {
            println!("  case {case}: solver {} oracle {}", sol.value, oracle.best_value);
        }

        let st = &sol.state;
        cut_count += st.cuts.len();
        if st.cuts.iter().all(|c| (c.rhs(&c.at) - q_star(&inst, &c.at)).abs() <= CUT_TOL) {
            tight += 1;
        }
        if n <= 8 {
            checked_validity += 1;
            let mut ok = true;
            for cfg in enumerate_configurations(&inst, 12).unwrap() {
                let q = q_star(&inst, &cfg);
                for c in &st.cuts {
                    let excess = c.rhs(&cfg) - q;
                    worst_cut = worst_cut.max(excess);
                    ok &= excess <= CUT_TOL;
                }
            }
            valid += ok as usize;
        }

        if st.lower_bounds.windows(2).all(|w| w[1] >= w[0] - CUT_TOL) {
            monotone += 1;
        }
        closed += (st.gap() <= opts.tol) as usize;
        within_limit += (st.iterations <= 10 * n) as usize;
    }
    report.line(
        "1",
        "oracle equivalence",
        matched == cases,
        format!("{matched}/{cases} instances within {VALUE_TOL} ms"),
        started,
    );
    report.line(
        "4a",
        "cut tightness",
        tight == cases,
        format!("{tight}/{cases} instances, {cut_count} cuts"),
        started,
    );
    report.line(
        "4b",
        "cut validity",
        valid == checked_validity,
        format!("{valid}/{checked_validity} instances with n <= 8, worst excess {worst_cut:.3e}"),
        started,
    );
    report.line(
        "5",
        "convergence discipline",
        monotone == cases && closed == cases && within_limit == cases,
        format!("monotone {monotone}, gap closed {closed}, iterations <= 10n {within_limit} of {cases}"),
        started,
    );
}

fn subproblem(report: &mut Report) {
    let started = Instant::now();
    let mut rng = rng(31);
    let cases = 100;
    let mut ok = 0;
    for _ in 0..cases {
        let (inst, cfg, leader) = single_committee(&mut rng);
        let fast = solve_subproblem(&inst, &cfg, leader);
        let exhaustive = enumerate_subproblem(&inst, leader, &cfg.followers(leader));
        if exhaustive.map(|(k, q)| (Some(k), q)) == Some(fast) {
            ok += 1;
        }
    }
    report.line(
        "2",
        "subproblem correctness",
        ok == cases,
        format!("{ok}/{cases} committees of size 4-12 match exhaustive search"),
        started,
    );
}

fn integrality(report: &mut Report) {
    let started = Instant::now();
    let mut rng = rng(37);
    let cases = 100;
    let (mut ok, mut worst) = (0, 0.0f64);
    for _ in 0..cases {
        let (inst, cfg, leader) = single_committee(&mut rng);
        let relaxed = lp_relax_subproblem(&inst, &cfg, leader).unwrap();
        let gap = (relaxed.value - solve_subproblem(&inst, &cfg, leader).1).abs();
        worst = worst.max(gap);
        if gap <= RELAX_TOL && relaxed.is_integral(RELAX_TOL) {
            ok += 1;
        }
    }
    report.line(
        "3",
        "integrality of the relaxation",
        ok == cases,
        format!("{ok}/{cases} integral vertices, worst gap {worst:.3e}"),
        started,
    );
}

/// Active nodes are exactly the survivors, every one assigned to an
/// active leader.
fn conserved(state: &ViewState, failed: &[usize]) -> bool {
    (0..state.n()).all(|j| match state.leader_of(j) {
        None => failed.contains(&j),
        Some(l) => !failed.contains(&j) && state.is_leader(l),
    })
}

/// Only members of the failed leader's committee changed leader.
fn local(before: &ViewState, after: &ViewState, failed: usize) -> bool {
    (0..before.n()).all(|j| before.leader_of(j) == Some(failed) || before.leader_of(j) == after.leader_of(j))
}

fn sequencer(report: &mut Report) {
    let started = Instant::now();
    let mut rng = rng(41);
    let cases: u64 = 100;
    let mut single_ok = 0;
    for case in 0..cases {
        let n = rng.gen_range(4..=12);
        let inst = random_instance(&mut rng, n);
        let cfg = random_configuration(&inst, case).unwrap();
        let leaders: Vec<usize> = cfg.leaders().collect();
        let failed = leaders[rng.gen_range(0..leaders.len())];
        let followers = cfg.followers(failed);
        let state = replay_failure_schedule(&inst, &cfg, &[(1, failed)]).unwrap();
        let record = state.history().last().unwrap();
        let chosen = record.exd.unwrap() - committee_delay(&inst, failed, &followers);
        let (_, exact) = enumerate_subproblem(&inst, failed, &followers).unwrap();
        if chosen == exact {
            single_ok += 1;
        }
    }

    let mut deep_ok = 0;
    for case in 0..cases {
        let n = rng.gen_range(12..=16);
        let inst = random_instance(&mut rng, n);
        let cfg = random_configuration(&inst, 1000 + case).unwrap();
        let mut state = init_view_state(&inst, &cfg).unwrap();
        let mut failed = Vec::new();
        let mut ok = true;
        for _ in 0..3 {
            let leaders: Vec<usize> = state.leaders().collect();
            let victim = leaders[rng.gen_range(0..leaders.len())];
            let next = match vco_core::sequencer::on_leader_failure(&inst, &state, victim) {
                Ok(s) => s,
                Err(_) => break,
            };
            failed.push(victim);
            ok &= conserved(&next, &failed) && local(&state, &next, victim) && next.view() == state.view() + 1;
            state = next;
        }
        deep_ok += ok as u64;
    }
    report.line(
        "6",
        "sequencer equivalence",
        single_ok == cases && deep_ok == cases,
        format!("single failures {single_ok}/{cases} exact, 3-deep replays consistent {deep_ok}/{cases}"),
        started,
    );
}

fn golden(report: &mut Report) {
    let started = Instant::now();
    let conf = SimConfig {
        inst: Instance::uniform(4, 1, 1.0, 5.0, 0.1).unwrap(),
        cfg: Configuration::single_committee(4, 0),
        strategy: Strategy::Vco,
        workload: Workload { rate: 10.0, total: 5 },
        faults: Vec::new(),
        slow_factor: 1.0,
        timeout: 50.0,
        jitter: 0.0,
        seed: 9,
    };
    let a = sim::run(&conf).unwrap();
    let b = sim::run(&conf).unwrap();
    let model = nominal_latency(&conf.inst, 0, &[1, 2, 3]);
    let pass = a.latency_mean == 13.0 && a.latency_p99 == 13.0 && model == 13.0 && a.trace_digest == b.trace_digest;
    report.line(
        "7",
        "simulator golden values",
        pass,
        format!("latency {} ms, digest {:016x} twice", a.latency_mean, a.trace_digest),
        started,
    );
}

fn directional(report: &mut Report) {
    let started = Instant::now();
    let inst = two_tier_instance(8);
    let scenario = Scenario {
        workload: Workload { rate: 10.0, total: 400 },
        faults: vec![
            Fault {
                time: 300.0,
                target: FaultTarget::LeaderOf(0),
                kind: FaultKind::Crash,
            },
            Fault {
                time: 900.0,
                target: FaultTarget::LeaderOf(1),
                kind: FaultKind::Crash,
            },
        ],
        slow_factor: 1.0,
        timeout: 200.0,
        jitter: 0.1,
    };
    let seeds: Vec<u64> = (0..10).collect();
    let (rows, aggregates) = compare(&inst, &[Strategy::Vco, Strategy::Random], &seeds, &scenario, &SolveOptions::default());
    let latency = |s: Strategy, seed: u64| {
        rows.iter()
            .find(|r| r.strategy == s && r.seed == seed)
            .and_then(|r| r.result.as_ref().ok())
            .map(|m| (m.latency_mean, m.view_changes))
    };
    let mut wins = 0;
    let mut view_changes_ok = true;
    for &seed in &seeds {
        match (latency(Strategy::Vco, seed), latency(Strategy::Random, seed)) {
            (Some((v, vv)), Some((r, rv))) => {
                wins += (v <= r) as usize;
                view_changes_ok &= vv >= 1 && rv >= 1;
            }
            _ => view_changes_ok = false,
        }
    }
    let mean = |s: Strategy| aggregates.iter().find(|a| a.strategy == s).map(|a| a.latency_mean).unwrap();
    let (v, r) = (mean(Strategy::Vco), mean(Strategy::Random));
    report.line(
        "8",
        "directional performance",
        wins >= 9 && v < r && view_changes_ok,
        format!("vco <= random in {wins}/10 seeds, mean {v:.2} vs {r:.2} ms, view change every run: {view_changes_ok}"),
        started,
    );
}

fn scaling(report: &mut Report) {
    let started = Instant::now();
    let mut rng = rng(53);
    let opts = SolveOptions::default();
    let cases = 10;
    let mut ok = 0;
    for case in 0..cases {
        let inst = random_instance(&mut rng, 4 + case % 5);
        let a = solve_vco(&inst, &opts).unwrap();
        let b = solve_vco(&inst.scaled(7.0).unwrap(), &opts).unwrap();
        let rel = (b.value - 7.0 * a.value).abs() / (7.0 * a.value).abs().max(1.0);
        if a.cfg == b.cfg && a.plan == b.plan && rel <= SCALE_REL_TOL {
            ok += 1;
        }
    }
    report.line(
        "9",
        "scale invariance",
        ok == cases,
        format!("{ok}/{cases} instances keep configuration and plan under x7"),
        started,
    );
}

fn main() -> ExitCode {
    let mut report = Report { failures: 0 };
    exact_runs(&mut report);
    subproblem(&mut report);
    integrality(&mut report);
    sequencer(&mut report);
    golden(&mut report);
    directional(&mut report);
    scaling(&mut report);
    if report.failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", report.failures);
        ExitCode::FAILURE
    }
}
