use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use pareto_mcts::bandit::{read_arms, run_experiment, write_trace_csv, BanditPolicy};
use pareto_mcts::mission::{run_mission_to_dir, EnvSelector, MissionConfig};

mod sweep;

#[derive(Parser)]
#[command(name = "pareto-mcts", version, about = "Pareto MCTS informative-planning missions and bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one mission and write its CSV outputs.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the environment selector (synth, synth:<seed>, file:<path>).
        #[arg(long)]
        env: Option<String>,
        /// Overrides the planner iterations per replan.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Run one mission per seed in parallel.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Seed range: `a..b` (b excluded) or `a..=b`.
        #[arg(long)]
        seeds: String,
        #[arg(long, default_value = "sweep")]
        out: PathBuf,
        /// Worker threads; defaults to the number of cores.
        #[arg(long)]
        jobs: Option<usize>,
        /// Overrides the planner iterations per replan.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Multi-objective Bernoulli bandit experiment.
    Bandit {
        /// One arm per line, comma-separated means in [0, 1].
        #[arg(long)]
        arms: PathBuf,
        #[arg(long)]
        horizon: u64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = PolicyArg::Pareto)]
        policy: PolicyArg,
        /// Trace CSV path.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Pareto,
    Scalar,
}

fn load(path: &Path, budget: Option<usize>) -> Result<MissionConfig> {
    let mut cfg = MissionConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(budget) = budget {
        cfg.planner.budget = budget;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, seed, out, env, budget } => {
            let mut cfg = load(&config, budget)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(env) = env {
                cfg.env = env.parse::<EnvSelector>()?;
                cfg.validate()?;
            }
            let outcome = run_mission_to_dir(&cfg, &out)?;
            let last = outcome.log.last();
            println!(
                "{} samples in {} rounds; rmse {:.4}, hotspot samples {:.1}%",
                outcome.samples(),
                outcome.log.records.len(),
                last.map_or(f64::NAN, |r| r.metrics.rmse),
                last.map_or(0.0, |r| r.metrics.hotspot_pct),
            );
            if let Some(reason) = outcome.aborted {
                bail!("mission aborted: {reason}");
            }
        }
        Command::Sweep { config, seeds, out, jobs, budget } => {
            let cfg = load(&config, budget)?;
            let seeds = sweep::parse_seeds(&seeds)?;
            let rows = sweep::run(&cfg, &seeds, &out, jobs)?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            println!("{} missions written to {}", rows.len(), out.display());
            if failed > 0 {
                bail!("{failed} of {} missions failed; see summary.csv", rows.len());
            }
        }
        Command::Bandit { arms, horizon, trials, seed, policy, out } => {
            let file = File::open(&arms).with_context(|| format!("opening {}", arms.display()))?;
            let arm_list = read_arms(BufReader::new(file))?;
            let policy = match policy {
                PolicyArg::Pareto => BanditPolicy::ParetoUcb,
                PolicyArg::Scalar => BanditPolicy::ScalarUcb,
            };
            let result = run_experiment(&arm_list, horizon, trials, seed, policy)?;
            let mut writer = BufWriter::new(File::create(&out)?);
            write_trace_csv(&result, &mut writer)?;
            writer.flush()?;
            println!("Pareto-optimal arms: {:?}", result.optimal);
            for k in 0..arm_list.len() {
                let mean: f64 = result
                    .trials
                    .iter()
                    .map(|t| t.arms.iter().filter(|&&a| a as usize == k).count() as f64)
                    .sum::<f64>()
                    / (trials as f64 * horizon as f64);
                println!("arm {k}: pull share {mean:.4}");
            }
        }
    }
    Ok(())
}
