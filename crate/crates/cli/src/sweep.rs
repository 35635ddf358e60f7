//! Seed sweeps with one isolated output directory per mission.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use pareto_mcts::mission::{run_mission_to_dir, MissionConfig, LOG_VERSION};

pub struct SweepRow {
    pub seed: u64,
    pub samples: usize,
    pub rounds: usize,
    pub final_metrics: Option<[f64; 5]>,
    pub error: Option<String>,
}

/// Parses `a..b` (b excluded) or `a..=b`.
pub fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    let (a, b, inclusive) = if let Some((a, b)) = spec.split_once("..=") {
        (a, b, true)
    } else if let Some((a, b)) = spec.split_once("..") {
        (a, b, false)
    } else {
        bail!("seed range {spec:?} must look like a..b or a..=b");
    };
    let a: u64 = a.trim().parse().with_context(|| format!("range start {a:?}"))?;
    let b: u64 = b.trim().parse().with_context(|| format!("range end {b:?}"))?;
    let seeds: Vec<u64> = if inclusive { (a..=b).collect() } else { (a..b).collect() };
    if seeds.is_empty() {
        bail!("seed range {spec:?} is empty");
    }
    Ok(seeds)
}

pub fn run(config: &MissionConfig, seeds: &[u64], out: &Path, jobs: Option<usize>) -> Result<Vec<SweepRow>> {
    fs::create_dir_all(out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()?;
    let rows: Vec<SweepRow> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                let mut cfg = config.clone();
                cfg.seed = seed;
                match run_mission_to_dir(&cfg, &out.join(format!("seed_{seed}"))) {
                    Ok(o) => SweepRow {
                        seed,
                        samples: o.samples(),
                        rounds: o.log.records.len(),
                        final_metrics: o.log.last().map(|r| {
                            let m = r.metrics;
                            [m.rmse, m.mae, m.hotspot_rmse, m.hotspot_mae, m.hotspot_pct]
                        }),
                        error: o.aborted,
                    },
                    Err(e) => SweepRow {
                        seed,
                        samples: 0,
                        rounds: 0,
                        final_metrics: None,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    });
    let mut w = BufWriter::new(File::create(out.join("summary.csv"))?);
    writeln!(w, "{LOG_VERSION}")?;
    writeln!(w, "seed,samples,rounds,rmse,mae,hotspot_rmse,hotspot_mae,hotspot_pct,error")?;
    for r in &rows {
        write!(w, "{},{},{}", r.seed, r.samples, r.rounds)?;
        match r.final_metrics {
            Some(m) => write!(w, ",{},{},{},{},{}", m[0], m[1], m[2], m[3], m[4])?,
            None => write!(w, ",,,,,")?,
        }
        let err = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        writeln!(w, ",{err}")?;
    }
    w.flush()?;
    Ok(rows)
}
