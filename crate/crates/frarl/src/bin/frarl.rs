use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Parser, Subcommand};

use frarl::compare::{compare_methods, Run, TestSet};
use frarl::curves::{emit_learning_curves, DEFAULT_WINDOW};
use frarl::io::checkpoint::read_checkpoint;
use frarl::io::config::{format_config, read_config};
use frarl::io::metrics::{format_episodes, read_metrics};
use frarl::io::report::format_falsification_report;
use frarl::io::scenario::{read_scenario_dir, write_scenario_dir, ScenarioFile};
use frarl::io::trajectory::{read_trajectories, write_trajectories};
use frarl::io::write_string;
use frarl::run::{run_training, EvalSets, RunDir, RunOptions};
use frarl_core::eval::summarize;
use frarl_core::falsify::{uniform_falsify, SearchSpace};
use frarl_core::mtl::parse_formula;
use frarl_core::policy::PolicyController;
use frarl_core::seeded_rng;
use frarl_core::sim::{
    driving_predicates, generate_random_scenario, generate_synthetic_dataset, group_trajectories, preprocess,
    rollout, Scenario, Task,
};
use frarl_core::train::{falsify_policy, Method, TrainConfig};

/// Falsification-based adversarial training of a longitudinal driving policy.
#[derive(Parser)]
#[command(name = "frarl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the documented default configuration.
    Defaults,
    /// Generate a synthetic trajectory dataset.
    GenData {
        #[arg(long, default_value_t = 300)]
        vehicles: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn trajectories into train/ and test/ scenario directories.
    Preprocess {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate random-leader test scenarios.
    RandomSet {
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a policy into a run directory.
    Train {
        #[arg(long)]
        method: Option<Method>,
        #[arg(long, value_parser = parse_task)]
        task: Option<Task>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory of training scenarios.
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        total_steps: Option<u64>,
        /// Periodic evaluation set as NAME=DIR; repeatable.
        #[arg(long = "eval", value_parser = named_dir)]
        eval: Vec<(String, PathBuf)>,
        #[arg(long, default_value_t = 10)]
        checkpoint_every: u64,
        /// Continue the run stored in --out.
        #[arg(long)]
        resume: bool,
        #[arg(long)]
        quiet: bool,
    },
    /// Falsify a specification against a checkpoint's deterministic policy.
    Falsify {
        #[arg(long)]
        checkpoint: PathBuf,
        /// File holding the MTL formula over `collision` and `reverse`.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to config.txt next to the checkpoint.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Uniform sampling instead of cross-entropy.
        #[arg(long)]
        uniform: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the reported candidates as scenario files.
        #[arg(long)]
        candidates: Option<PathBuf>,
    },
    /// Evaluate a checkpoint on a scenario directory.
    Evaluate {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        scenarios: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_parser = parse_task)]
        task: Option<Task>,
        /// Per-episode log.
        #[arg(long)]
        episodes: Option<PathBuf>,
    },
    /// Table of unsafe-behaviour rates across methods, tasks and test sets.
    Compare {
        /// Run directories, or directories containing runs.
        #[arg(long, required = true, num_args = 1..)]
        runs: Vec<PathBuf>,
        /// Test set as NAME=DIR; repeatable.
        #[arg(long = "set", required = true, value_parser = named_dir)]
        sets: Vec<(String, PathBuf)>,
        /// Delimited export.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for per-run, per-set episode logs.
        #[arg(long)]
        episodes: Option<PathBuf>,
    },
    /// Learning curves (mean ± std across seeds) per method and task.
    Curves {
        #[arg(long, required = true, num_args = 1..)]
        runs: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_task(s: &str) -> Result<Task, String> {
    s.parse().map_err(|()| format!("unknown task {s:?}; expected ba or acc"))
}

fn named_dir(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((name, dir)) if !name.is_empty() && !dir.is_empty() => Ok((name.to_string(), PathBuf::from(dir))),
        _ => Err(format!("expected NAME=DIR, got {s:?}")),
    }
}

fn load_config(path: Option<&Path>) -> Result<TrainConfig> {
    match path {
        Some(p) => Ok(read_config(p, TrainConfig::default())?),
        None => Ok(TrainConfig::default()),
    }
}

/// Configuration for a checkpoint: explicit file, else the run directory's.
fn checkpoint_config(checkpoint: &Path, explicit: Option<&Path>) -> Result<TrainConfig> {
    if explicit.is_some() {
        return load_config(explicit);
    }
    let beside = checkpoint.parent().map(|d| RunDir::new(d).config());
    match beside {
        Some(p) if p.exists() => load_config(Some(&p)),
        _ => Ok(TrainConfig::default()),
    }
}

fn scenarios(dir: &Path, cfg: &TrainConfig) -> Result<Vec<Scenario>> {
    let files = read_scenario_dir(dir, &cfg.sim)?;
    ensure!(!files.is_empty(), "{} holds no scenario files", dir.display());
    Ok(files.into_iter().map(|f| f.scenario).collect())
}

fn write_set(dir: &Path, set: Vec<Scenario>) -> Result<()> {
    let files: Vec<ScenarioFile> = set.into_iter().map(|scenario| ScenarioFile { scenario, robustness: None, iteration: None }).collect();
    write_scenario_dir(dir, &files)?;
    Ok(())
}

fn find_runs(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut runs = Vec::new();
    for p in paths {
        if RunDir::new(p).checkpoint().exists() {
            runs.push(p.clone());
            continue;
        }
        let mut found: Vec<PathBuf> = std::fs::read_dir(p)
            .with_context(|| format!("reading {}", p.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|d| RunDir::new(d).checkpoint().exists())
            .collect();
        ensure!(!found.is_empty(), "{} is not a run directory and contains none", p.display());
        found.sort();
        runs.extend(found);
    }
    Ok(runs)
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Defaults => print!("{}", format_config(&TrainConfig::default())),
        Command::GenData { vehicles, seed, config, out } => {
            let cfg = load_config(config.as_deref())?;
            let rows = generate_synthetic_dataset(vehicles, &mut seeded_rng(seed), &cfg.sim);
            write_trajectories(&out, &rows)?;
            println!("wrote {} rows for {vehicles} vehicles to {}", rows.len(), out.display());
        }
        Command::Preprocess { data, seed, config, out } => {
            let cfg = load_config(config.as_deref())?;
            let trajectories = group_trajectories(&read_trajectories(&data)?);
            let split = preprocess(&trajectories, &cfg.sim, &mut seeded_rng(seed));
            let (train, test) = (split.train.len(), split.test.len());
            ensure!(train > 0, "no trajectory is long enough to form a scenario");
            write_set(&out.join("train"), split.train)?;
            write_set(&out.join("test"), split.test)?;
            println!("{train} train and {test} test scenarios, {} trajectories dropped", split.dropped);
        }
        Command::RandomSet { count, seed, config, out } => {
            let cfg = load_config(config.as_deref())?;
            let mut rng = seeded_rng(seed);
            write_set(&out, (0..count).map(|_| generate_random_scenario(&mut rng, &cfg.sim)).collect())?;
            println!("wrote {count} random scenarios to {}", out.display());
        }
        Command::Train { method, task, seed, config, data, out, total_steps, eval, checkpoint_every, resume, quiet } => {
            let dir = RunDir::new(&out);
            let mut cfg = if resume { dir.read_config()? } else { load_config(config.as_deref())? };
            if resume && config.is_some() {
                bail!("--config cannot change a resumed run; edit {} instead", dir.config().display());
            }
            cfg.method = method.unwrap_or(cfg.method);
            cfg.seed = seed.unwrap_or(cfg.seed);
            if resume && (task.is_some_and(|t| t != cfg.task) || total_steps.is_some()) {
                bail!("--task and --total-steps cannot change a resumed run");
            }
            cfg.task = task.unwrap_or(cfg.task);
            cfg.total_steps = total_steps.unwrap_or(cfg.total_steps);
            cfg.validate()?;
            let dataset = scenarios(&data, &cfg)?;
            let mut sets = EvalSets::default();
            for (name, d) in eval {
                sets.sets.push((name, scenarios(&d, &cfg)?));
            }
            let opts = RunOptions { checkpoint_every, resume };
            let ck = run_training(&dir, Some(cfg), dataset, &sets, opts, |r| {
                let m = &r.metrics;
                if !quiet {
                    println!(
                        "iter {:>5} step {:>8} {:<11} reward {:>8.4} collisions {:>3} reverses {:>3} violations {:>5}",
                        m.iteration, m.step, m.phase, m.mean_reward, m.collisions, m.reverses, m.violation_steps
                    );
                    if let Some(f) = &r.falsification {
                        println!("  falsifier: {} simulations, best {}, {} falsified, {} added", f.simulations, f.best_robustness, f.falsified, f.added);
                    }
                }
            })?;
            let state = &ck.state;
            println!(
                "finished {} seed {} at step {} ({} iterations{})",
                ck.method,
                ck.seed,
                state.steps,
                state.iteration,
                if state.converged { ", falsifier converged" } else { "" }
            );
        }
        Command::Falsify { checkpoint, spec, budget, seed, config, uniform, out, candidates } => {
            let cfg = checkpoint_config(&checkpoint, config.as_deref())?;
            let ck = read_checkpoint(&checkpoint)?;
            let text = std::fs::read_to_string(&spec).with_context(|| format!("reading {}", spec.display()))?;
            let text = text.trim();
            let formula = parse_formula(text, &driving_predicates(&cfg.sim))?;
            let space = SearchSpace::driving(&cfg.sim, cfg.control_points)?;
            let policy = &ck.state.protagonist.params;
            let mut rng = seeded_rng(seed);
            let result = if uniform {
                let system = |x: &[f64]| -> Result<_, anyhow::Error> {
                    let s = space.decode(x, &cfg.sim)?;
                    Ok(rollout(&mut PolicyController(policy), &s, cfg.task, &cfg.sim)?.trace)
                };
                uniform_falsify(system, &formula, &space, budget, &cfg.ce, &mut rng).map_err(|e| anyhow::anyhow!("{e}"))?
            } else {
                falsify_policy(policy, &formula, &space, cfg.task, &cfg.sim, budget, &cfg.ce, &mut rng)?
            };
            let report = format_falsification_report(text, budget, &space, &result);
            match &out {
                Some(p) => write_string(p, &report)?,
                None => print!("{report}"),
            }
            if let Some(dir) = candidates {
                let mut files = Vec::new();
                for c in &result.top {
                    let scenario = space.decode(&c.point, &cfg.sim)?;
                    files.push(ScenarioFile { scenario, robustness: Some(c.robustness), iteration: Some(ck.state.iteration) });
                }
                write_scenario_dir(&dir, &files)?;
            }
            if out.is_some() {
                println!("{} after {} simulations (best robustness {})", if result.falsified { "falsified" } else { "not falsified" }, result.simulations, result.best_robustness());
            }
        }
        Command::Evaluate { checkpoint, scenarios: dir, config, task, episodes } => {
            let mut cfg = checkpoint_config(&checkpoint, config.as_deref())?;
            cfg.task = task.unwrap_or(cfg.task);
            let ck = read_checkpoint(&checkpoint)?;
            let set = scenarios(&dir, &cfg)?;
            let run = Run { dir: checkpoint.clone(), config: cfg, checkpoint: ck };
            let eps = run.evaluate(&set)?;
            let row = summarize(&eps)?;
            println!("{}", frarl::compare::REPORT_HEADER);
            println!(
                "{},{},{},1,{},{},{},{},{}",
                run.method(),
                run.task(),
                dir.display(),
                row.episodes,
                row.reverse_rate,
                row.collision_rate,
                row.mean_reward,
                row.violation_steps
            );
            if let Some(p) = episodes {
                write_string(&p, &format_episodes(&eps))?;
            }
        }
        Command::Compare { runs, sets, out, episodes } => {
            let runs: Vec<Run> = find_runs(&runs)?.iter().map(|d| Run::load(d)).collect::<Result<_, _>>()?;
            let mut test_sets = Vec::new();
            for (name, dir) in sets {
                let cfg = &runs[0].config;
                test_sets.push(TestSet { name, scenarios: scenarios(&dir, cfg)? });
            }
            let report = compare_methods(&runs, &test_sets)?;
            print!("{}", report.render());
            if let Some(p) = out {
                write_string(&p, &report.to_csv())?;
            }
            if let Some(dir) = episodes {
                for e in &report.evaluations {
                    let name = format!("{}-{}-{}-{}.csv", e.method, e.task, e.seed, e.set);
                    write_string(&dir.join(name), &format_episodes(&e.episodes))?;
                }
            }
        }
        Command::Curves { runs, window, out } => {
            let mut groups: Vec<(String, Vec<_>)> = Vec::new();
            for d in find_runs(&runs)? {
                let rd = RunDir::new(&d);
                let cfg = rd.read_config()?;
                let name = format!("{}-{}", cfg.method, cfg.task);
                let log = read_metrics(&rd.metrics())?;
                match groups.iter_mut().find(|(n, _)| *n == name) {
                    Some((_, logs)) => logs.push(log),
                    None => groups.push((name, vec![log])),
                }
            }
            for p in emit_learning_curves(&groups, window, &out)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Library errors already embed their sources; only add causes
            // that the message does not show yet.
            let mut msg = e.to_string();
            for cause in e.chain().skip(1) {
                let c = cause.to_string();
                if !msg.contains(&c) {
                    msg = format!("{msg}: {c}");
                }
            }
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
