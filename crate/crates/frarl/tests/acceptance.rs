//! End-to-end acceptance checks, one line per criterion.
//!
//! Runs without the libtest harness so the summary lines always reach the
//! output. Pass criterion numbers as arguments to run a subset, e.g.
//! `cargo test -p frarl --test acceptance -- 1 4`.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng as _;

use frarl::io::checkpoint::{format_checkpoint, parse_checkpoint, read_checkpoint, write_checkpoint, Checkpoint};
use frarl::io::metrics::format_metrics_row;
use frarl::io::scenario::{read_scenario, write_scenario, ScenarioFile};
use frarl::parallel::par_map;
use frarl_core::eval::{evaluate, EvalRow};
use frarl_core::falsify::{falsify, uniform_falsify, CeConfig, FalsificationResult, SearchSpace};
use frarl_core::mtl::{boolean_sat, robustness, Formula, Interval, Predicate, Record, Relation, Robustness, Signal, Trace};
use frarl_core::policy::{compute_gae, ppo_loss, ppo_loss_and_grad, PolicyController, PolicyParams, PpoConfig, Sample};
use frarl_core::sim::{
    driving_spec, generate_random_scenario, generate_synthetic_dataset, group_trajectories, preprocess, reward_acc,
    reward_ba, rollout, safe_distance, ConstantAction, Controller, Env, Scenario, SafeBrakingController, SimConfig,
    SimState, Task, Termination,
};
use frarl_core::train::{Method, TrainConfig, Trainer};
use frarl_core::{seeded_rng, Rng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

// ---------------------------------------------------------------- 1: MTL

const DT: f64 = 0.5;

fn random_interval(rng: &mut Rng) -> Interval {
    let lo = f64::from(rng.random_range(0u32..4)) * DT;
    if rng.random_bool(0.3) {
        Interval::unbounded(lo).unwrap()
    } else {
        Interval::bounded(lo, lo + f64::from(rng.random_range(0u32..6)) * DT).unwrap()
    }
}

fn random_formula(rng: &mut Rng, depth: usize) -> Formula {
    if depth == 1 || rng.random_bool(0.2) {
        return match rng.random_range(0..4) {
            0 => Formula::True,
            1 => Formula::atom(Predicate::new("close", Signal::Gap, Relation::AtMost, 2.0)),
            2 => Formula::atom(Predicate::new("far", Signal::Gap, Relation::AtLeast, -1.0).with_scale(4.0)),
            _ => Formula::atom(Predicate::new("slow", Signal::EgoVelocity, Relation::AtMost, 0.5)),
        };
    }
    let sub = |rng: &mut Rng| random_formula(rng, depth - 1);
    match rng.random_range(0..7) {
        0 => Formula::not(sub(rng)),
        1 => Formula::or(sub(rng), sub(rng)),
        2 => Formula::and(sub(rng), sub(rng)),
        3 => Formula::until(random_interval(rng), sub(rng), sub(rng)),
        4 => Formula::globally(sub(rng)),
        5 => Formula::globally_within(random_interval(rng), sub(rng)),
        _ => Formula::eventually(random_interval(rng), sub(rng)),
    }
}

fn random_trace(rng: &mut Rng) -> Trace {
    let len = rng.random_range(1..=50);
    let records = (0..len)
        .map(|_| Record {
            gap: f64::from(rng.random_range(-8i32..=8)) * 0.5,
            v_ego: f64::from(rng.random_range(-4i32..=4)) * 0.25,
            ..Record::default()
        })
        .collect();
    Trace::new(DT, records).unwrap()
}

fn criterion_1() -> Outcome {
    let mut rng = seeded_rng(1);
    let (mut checked, mut sign_errors, mut neg_errors, mut glob_errors, mut nonzero) = (0, 0, 0, 0, 0);
    while checked < 1000 {
        let depth = rng.random_range(1..=4);
        let f = random_formula(&mut rng, depth);
        let tr = random_trace(&mut rng);
        let t = rng.random_range(0..tr.len());
        // Formulas whose windows do not fit the trace are rejected by both
        // monitors alike; draw again.
        let (Ok(r), Ok(sat)) = (robustness(&f, &tr, t), boolean_sat(&f, &tr, t)) else {
            continue;
        };
        checked += 1;
        if !r.is_zero() {
            nonzero += 1;
            if r.is_positive() != sat {
                sign_errors += 1;
            }
        }
        if robustness(&Formula::not(f.clone()), &tr, t) != Ok(-r) {
            neg_errors += 1;
        }
        let brute = (t..tr.len())
            .map(|k| robustness(&f, &tr, k))
            .try_fold(Robustness::Infinity, |acc, x| x.map(|x| acc.min(x)));
        if brute.is_ok() && robustness(&Formula::globally(f), &tr, t) != brute {
            glob_errors += 1;
        }
    }
    outcome(
        sign_errors + neg_errors + glob_errors == 0,
        format!("{checked} pairs ({nonzero} non-zero): {sign_errors} sign, {neg_errors} negation, {glob_errors} globally mismatches"),
    )
}

// ---------------------------------------------------------------- 2: gradients

fn criterion_2() -> Outcome {
    let cfg = PpoConfig::default();
    // Near the cube root of machine epsilon: balances truncation and round-off.
    let h = 1e-5;
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let mut rng = seeded_rng(seed);
        let params = PolicyParams::random(&mut rng, 0.3, 1.0);
        let mut old = params.clone();
        old.values.iter_mut().for_each(|v| *v += rng.random_range(-0.02..0.02));
        let batch: Vec<Sample> = (0..5)
            .map(|_| {
                let obs = [
                    rng.random_range(0.0..80.0),
                    rng.random_range(-15.0..15.0),
                    rng.random_range(0.0..35.0),
                    rng.random_range(-5.0..5.0),
                    rng.random_range(-10.0..10.0),
                ];
                let (action, old_log_prob) = old.sample_action(&obs, &mut rng).unwrap();
                let advantage = rng.random_range(-2.0..2.0);
                Sample { obs, action, old_log_prob, advantage, value_target: rng.random_range(-1.0..1.0) }
            })
            .collect();
        let (_, grad) = ppo_loss_and_grad(&params, &batch, &cfg).unwrap();
        for (i, g) in grad.iter().enumerate() {
            let mut p = params.clone();
            p.values[i] += h;
            let up = ppo_loss(&p, &batch, &cfg).unwrap().loss;
            p.values[i] -= 2.0 * h;
            let down = ppo_loss(&p, &batch, &cfg).unwrap().loss;
            let fd = (up - down) / (2.0 * h);
            worst = worst.max((g - fd).abs() / g.abs().max(fd.abs()).max(1e-6));
        }
    }
    outcome(worst < 1e-4, format!("20 batches x {} parameters, worst relative error {worst:.2e}", PolicyParams::LEN))
}

// ---------------------------------------------------------------- 3: GAE

fn criterion_3() -> Outcome {
    let mut rng = seeded_rng(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(1..=10);
        let rewards: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let dones: Vec<bool> = (0..n).map(|_| rng.random_bool(0.2)).collect();
        let last = rng.random_range(-2.0..2.0);
        let (gamma, lambda) = (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
        let (adv, _) = compute_gae(&rewards, &values, &dones, last, gamma, lambda).unwrap();
        let next_v = |k: usize| if dones[k] { 0.0 } else if k + 1 < n { values[k + 1] } else { last };
        for (t, a) in adv.iter().enumerate() {
            let (mut expected, mut weight) = (0.0, 1.0);
            for k in t..n {
                expected += weight * (rewards[k] + gamma * next_v(k) - values[k]);
                if dones[k] {
                    break;
                }
                weight *= gamma * lambda;
            }
            worst = worst.max((a - expected).abs());
        }
    }
    // Limit cases on small integers, where every operation is exact.
    let rewards = [1.0, -2.0, 3.0, 0.0, 5.0];
    let values = [2.0, -1.0, 0.0, 4.0, -3.0];
    let dones = [false, false, true, false, false];
    let last = 6.0;
    let (adv0, _) = compute_gae(&rewards, &values, &dones, last, 0.5, 0.0).unwrap();
    // r_t + 0.5 V(s_t+1) - V(s_t), with no bootstrap after the terminal step 2.
    let td = [-1.5, -1.0, 3.0, -5.5, 11.0];
    let (adv1, _) = compute_gae(&rewards, &values, &dones, last, 1.0, 1.0).unwrap();
    // Undiscounted returns [2, 1, 3, 11, 11] minus the values.
    let mc = [0.0, 2.0, 3.0, 7.0, 14.0];
    let limits = adv0 == td && adv1 == mc;
    outcome(worst < 1e-10 && limits, format!("100 episodes, worst deviation {worst:.1e}; lambda=0 and gamma=lambda=1 exact: {limits}"))
}

// ---------------------------------------------------------------- 4, 5: falsifier

const FALSIFY_BUDGET: usize = 2000;

fn falsify_controller<C: Controller + Clone>(controller: &C, seed: u64, uniform: bool) -> FalsificationResult {
    let sim = SimConfig::default();
    let space = SearchSpace::driving(&sim, 10).unwrap();
    let spec = driving_spec(&sim);
    // The budget, not the iteration cap, bounds the search.
    let ce = CeConfig { iterations: FALSIFY_BUDGET / 50, stop_on_falsified: true, ..CeConfig::default() };
    let system = |x: &[f64]| {
        let scenario = space.decode(x, &sim).map_err(|e| e.to_string())?;
        rollout(&mut controller.clone(), &scenario, Task::Ba, &sim).map(|e| e.trace).map_err(|e| e.to_string())
    };
    let mut rng = seeded_rng(seed);
    let r = if uniform {
        uniform_falsify(system, &spec, &space, FALSIFY_BUDGET, &ce, &mut rng)
    } else {
        falsify(system, &spec, &space, FALSIFY_BUDGET, &ce, &mut rng)
    };
    r.expect("falsifier failed")
}

fn criterion_4() -> Outcome {
    let sim = SimConfig::default();
    let seeds: Vec<u64> = (1..=10).collect();
    let constant = par_map(&seeds, |&s| falsify_controller(&ConstantAction(0.0), s, false));
    let oracle = par_map(&seeds, |&s| falsify_controller(&SafeBrakingController::new(&sim), s, false));
    let hits = constant.iter().filter(|r| r.falsified).count();
    let oracle_hits = oracle.iter().filter(|r| r.falsified).count();
    let oracle_min = oracle.iter().map(|r| r.best_robustness().to_f64()).fold(f64::INFINITY, f64::min);
    let oracle_sims: usize = oracle.iter().map(|r| r.simulations).sum();
    outcome(
        hits >= 9 && oracle_hits == 0,
        format!(
            "constant velocity falsified in {hits}/10 seeds; braking oracle falsified in {oracle_hits}/10 ({oracle_sims} simulations, lowest robustness {oracle_min:.4})"
        ),
    )
}

fn median(mut xs: Vec<usize>) -> f64 {
    xs.sort_unstable();
    let n = xs.len();
    if n % 2 == 1 { xs[n / 2] as f64 } else { (xs[n / 2 - 1] + xs[n / 2]) as f64 / 2.0 }
}

fn criterion_5() -> Outcome {
    // A search that never falsifies counts as one past the budget.
    let first = |r: &FalsificationResult| r.first_falsified_at.unwrap_or(FALSIFY_BUDGET + 1);
    let seeds: Vec<u64> = (1..=10).collect();
    let ce: Vec<usize> = par_map(&seeds, |&s| first(&falsify_controller(&ConstantAction(0.0), s, false)));
    let uni: Vec<usize> = par_map(&seeds, |&s| first(&falsify_controller(&ConstantAction(0.0), s, true)));
    let (mc, mu) = (median(ce.clone()), median(uni.clone()));
    outcome(mc <= mu, format!("median simulations to first violation: cross-entropy {mc} {ce:?}, uniform {mu} {uni:?}"))
}

// ---------------------------------------------------------------- 6, 7: training

const TOTAL_STEPS: u64 = 300_000;
const WARMUP_STEPS: u64 = 100_000;

struct Experiment {
    seeds: Vec<u64>,
    rows: Vec<(Method, u64, EvalRow)>,
    test_size: usize,
}

impl Experiment {
    fn mean(&self, method: Method, f: impl Fn(&EvalRow) -> f64) -> f64 {
        let xs: Vec<f64> = self.rows.iter().filter(|r| r.0 == method).map(|r| f(&r.2)).collect();
        xs.iter().sum::<f64>() / xs.len() as f64
    }

    fn collision(&self, m: Method) -> f64 {
        self.mean(m, |r| r.collision_rate)
    }

    /// Standard error of a mean collision rate over all test episodes.
    fn noise(&self, p: f64) -> f64 {
        (p * (1.0 - p) / (self.test_size * self.seeds.len()) as f64).sqrt()
    }

    fn ordering_margins(&self) -> [f64; 3] {
        let (p, r, f) = (self.collision(Method::Ppo), self.collision(Method::Rarl), self.collision(Method::Frarl));
        // Non-negative when FRARL <= RARL, RARL <= PPO and FRARL < PPO.
        [r - f, p - r, p - f]
    }

    fn ordered(&self) -> bool {
        let [a, b, c] = self.ordering_margins();
        a >= 0.0 && b >= 0.0 && c > 0.0
    }

    fn within_noise(&self) -> bool {
        let tol = 2.0 * self.noise(self.collision(Method::Ppo).max(self.collision(Method::Rarl)));
        self.ordering_margins().iter().all(|m| *m >= -tol)
    }

    fn describe(&self) -> String {
        let per = |m: Method| {
            let seeds: Vec<String> =
                self.rows.iter().filter(|r| r.0 == m).map(|r| format!("{:.1}%", 100.0 * r.2.collision_rate)).collect();
            format!("{} {:.2}% [{}]", m.as_str().to_uppercase(), 100.0 * self.collision(m), seeds.join(" "))
        };
        format!("seeds {:?}: {}, {}, {}", self.seeds, per(Method::Ppo), per(Method::Rarl), per(Method::Frarl))
    }
}

fn data() -> (Vec<Scenario>, Vec<Scenario>) {
    let sim = SimConfig::default();
    let mut rng = seeded_rng(100);
    let rows = generate_synthetic_dataset(300, &mut rng, &sim);
    let split = preprocess(&group_trajectories(&rows), &sim, &mut rng);
    let mut test_rng = seeded_rng(7);
    let test = (0..500).map(|_| generate_random_scenario(&mut test_rng, &sim)).collect();
    (split.train, test)
}

fn run_experiment(seeds: &[u64]) -> Experiment {
    let (train, test) = data();
    let jobs: Vec<(Method, u64)> = Method::ALL.iter().flat_map(|&m| seeds.iter().map(move |&s| (m, s))).collect();
    let rows = par_map(&jobs, |&(method, seed)| {
        let cfg = TrainConfig { method, seed, total_steps: TOTAL_STEPS, warmup_steps: WARMUP_STEPS, ..TrainConfig::default() };
        let sim = cfg.sim.clone();
        let out = frarl_core::train::train(cfg, train.clone()).expect("training failed");
        let row = evaluate(&mut PolicyController(&out.protagonist), &test, Task::Ba, &sim).unwrap();
        (method, seed, row)
    });
    Experiment { seeds: seeds.to_vec(), rows, test_size: test.len() }
}

/// Criteria 6 and 7 share the training runs.
fn criteria_6_7() -> (Outcome, Outcome) {
    let first = run_experiment(&[1, 2, 3]);
    let mut note = String::new();
    let judged = if !first.ordered() && first.within_noise() {
        note = format!("first attempt tied within noise ({}); repeated with fresh seeds: ", first.describe());
        run_experiment(&[4, 5, 6])
    } else {
        first
    };
    let frarl = judged.collision(Method::Frarl);
    let six = outcome(
        judged.ordered() && frarl < 0.01,
        format!("{note}{}; required FRARL <= RARL <= PPO, FRARL strictly lowest and below 1%", judged.describe()),
    );
    let viol = |m| judged.mean(m, |r| r.violation_steps as f64);
    let (ppo, fr) = (viol(Method::Ppo), viol(Method::Frarl));
    let seven = outcome(
        fr <= 0.7 * ppo,
        format!("mean safe-distance violation steps on the random test set: FRARL {fr:.1}, PPO {ppo:.1} (ratio {:.3}, required <= 0.7)", fr / ppo),
    );
    (six, seven)
}

// ---------------------------------------------------------------- 8: determinism

fn criterion_8() -> Outcome {
    let (train, _) = data();
    let cfg = TrainConfig {
        method: Method::Frarl,
        seed: 8,
        total_steps: 10_240,
        warmup_steps: 4096,
        falsify_every: 1,
        falsify_budget: 200,
        ..TrainConfig::default()
    };
    let tmp = tempfile::tempdir().unwrap();
    let run = |dir: Option<&Path>| {
        let mut trainer = Trainer::new(cfg.clone(), train.clone()).unwrap();
        let mut log = String::new();
        while !trainer.is_finished() {
            let report = trainer.step().unwrap();
            log.push_str(&format_metrics_row(&report.metrics));
            log.push('\n');
            if let (Some(dir), Some(event)) = (dir, &report.falsification) {
                let ck = Checkpoint { method: cfg.method, seed: cfg.seed, state: trainer.state().clone() };
                let it = report.metrics.iteration;
                write_checkpoint(&dir.join(format!("{it}.ckpt")), &ck).unwrap();
                let all = trainer.pool().falsified();
                for (k, e) in all[all.len() - event.added..].iter().enumerate() {
                    write_scenario(&dir.join(format!("{it}-{k}.scn")), &ScenarioFile::from(e)).unwrap();
                }
            }
        }
        (log, trainer)
    };
    let (log_a, trainer) = run(Some(tmp.path()));
    let (log_b, _) = run(None);
    let identical_logs = log_a == log_b && !log_a.is_empty();

    let ck = Checkpoint { method: cfg.method, seed: cfg.seed, state: trainer.state().clone() };
    let first = format_checkpoint(&ck);
    let path = tmp.path().join("final.ckpt");
    write_checkpoint(&path, &ck).unwrap();
    let reloaded = read_checkpoint(&path).unwrap();
    let byte_identical = format_checkpoint(&reloaded) == first
        && std::fs::read_to_string(&path).unwrap() == first
        && parse_checkpoint(&first).unwrap() == ck;

    // Replay every stored violation against the checkpoint that found it.
    let sim = &cfg.sim;
    let spec = driving_spec(sim);
    let (mut replayed, mut reproduced) = (0, 0);
    for entry in std::fs::read_dir(tmp.path()).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_none_or(|e| e != "scn") {
            continue;
        }
        let file = read_scenario(&p, sim).unwrap();
        if !file.robustness.is_some_and(|r| r.is_negative()) {
            continue;
        }
        let it = p.file_stem().unwrap().to_str().unwrap().split('-').next().unwrap().to_string();
        let origin = read_checkpoint(&tmp.path().join(format!("{it}.ckpt"))).unwrap();
        let ep = rollout(&mut PolicyController(&origin.state.protagonist.params), &file.scenario, cfg.task, sim).unwrap();
        let rob = robustness(&spec, &ep.trace, 0).unwrap();
        replayed += 1;
        if rob.is_negative() && Some(rob) == file.robustness {
            reproduced += 1;
        }
    }
    let replay_ok = replayed > 0 && reproduced == replayed;
    outcome(
        identical_logs && byte_identical && replay_ok,
        format!(
            "identical metrics logs: {identical_logs} ({} rows); checkpoint save-load-save byte-identical: {byte_identical}; falsified replays reproduced {reproduced}/{replayed}",
            log_a.lines().count()
        ),
    )
}

// ---------------------------------------------------------------- 9: physics

fn criterion_9() -> Outcome {
    let sim = SimConfig::default();
    let mut failures = Vec::new();
    if (safe_distance(20.0, 20.0, &sim) - 6.0).abs() > 1e-9 {
        failures.push("safe distance 20/20".to_string());
    }
    if safe_distance(10.0, 30.0, &sim).abs() > 1e-9 {
        failures.push("safe distance floor".to_string());
    }
    let state = |gap: f64, v_ego: f64, v_lead: f64, termination| SimState {
        x_ego: 10.0,
        v_ego,
        a_ego: 0.0,
        x_lead: 10.0 + gap,
        v_lead,
        a_lead: 0.0,
        step: 1,
        termination,
    };
    let s_safe = safe_distance(30.0, 10.0, &sim);
    let cases = [
        ("ba collision", reward_ba(&state(-0.1, 20.0, 10.0, Termination::Collision)), -1.0),
        ("ba nominal", reward_ba(&state(30.0, 20.0, 20.0, Termination::None)), 0.0),
        ("ba reverse", reward_ba(&state(10.0, -0.01, 10.0, Termination::Reverse)), -1.0),
        ("acc collision", reward_acc(&state(0.0, 20.0, 10.0, Termination::Collision), &sim), -1.0),
        ("acc close", reward_acc(&state(s_safe / 5.0, 30.0, 10.0, Termination::None), &sim), -0.1 * (-1.0f64).exp()),
        ("acc nominal", reward_acc(&state(50.0, 20.0, 20.0, Termination::None), &sim), 0.0),
    ];
    for (name, got, want) in cases {
        if got != want {
            failures.push(format!("{name}: {got} != {want}"));
        }
    }
    let mut rng = seeded_rng(9);
    let (mut longest, mut too_close) = (0, 0);
    for i in 0..10_000 {
        let scenario = generate_random_scenario(&mut rng, &sim);
        let (env, _) = Env::reset(scenario.clone(), &sim).unwrap();
        if env.state().gap() < env.state().safe_distance(&sim) {
            too_close += 1;
        }
        if i % 20 == 0 {
            let a = rng.random_range(-sim.a_max..=sim.a_max);
            longest = longest.max(rollout(&mut ConstantAction(a), &scenario, Task::Acc, &sim).unwrap().steps);
        }
    }
    if too_close > 0 {
        failures.push(format!("{too_close} resets start inside the safe distance"));
    }
    if longest > sim.max_steps {
        failures.push(format!("episode of {longest} steps"));
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("hand cases exact; 10000 resets at or beyond the safe distance; longest of 500 episodes {longest} steps")
        } else {
            failures.join("; ")
        },
    )
}

// ----------------------------------------------------------------

const TITLES: [&str; 9] = [
    "MTL monitor soundness",
    "PPO gradient correctness",
    "GAE oracle equivalence",
    "falsifier efficacy",
    "cross-entropy vs uniform sampling",
    "desk-scale collision ordering",
    "safe-distance violation trend",
    "determinism and persistence",
    "simulator physics",
];

const LIMITS: [Option<u64>; 9] = [Some(10), Some(30), None, Some(300), None, Some(7200), None, None, None];

fn main() -> ExitCode {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let selected = |n: usize| wanted.is_empty() || wanted.contains(&n);
    let checks: [(usize, fn() -> Outcome); 7] =
        [(1, criterion_1), (2, criterion_2), (3, criterion_3), (4, criterion_4), (5, criterion_5), (8, criterion_8), (9, criterion_9)];
    let mut results: Vec<(usize, Outcome, Option<Duration>)> = Vec::new();
    for (n, check) in checks {
        if selected(n) {
            let t0 = Instant::now();
            let o = check();
            results.push((n, o, Some(t0.elapsed())));
        }
    }
    if selected(6) || selected(7) {
        let t0 = Instant::now();
        let (six, seven) = criteria_6_7();
        results.push((6, six, Some(t0.elapsed())));
        // Criterion 7 reuses the criterion 6 runs.
        results.push((7, seven, None));
    }
    results.sort_by_key(|r| r.0);

    let mut failed = 0;
    for (n, mut o, took) in results {
        let secs = took.map_or(0.0, |d| d.as_secs_f64());
        if let Some(limit) = LIMITS[n - 1] {
            if secs > limit as f64 {
                o.pass = false;
                o.detail.push_str(&format!("; exceeded the {limit} s runtime limit"));
            }
        }
        let status = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        let time = took.map_or("shared runs".to_string(), |_| format!("{secs:.1} s"));
        println!("criterion {n} {status} {} ({time}): {}", TITLES[n - 1], o.detail);
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
