//! The online replanning loop: search, execute the chosen primitive, observe
//! along it, refit the GP, log metrics.
//!
//! Missions run in standardized units. The truth grid's mean and standard
//! deviation map raw observations into the GP's space; metrics compare the
//! standardized prediction with the standardized truth. The final
//! prediction is written back in raw units.

mod config;
mod log;
mod metrics;

pub use config::{EnvSelector, Method, MissionConfig, MissionParams, PlannerConfig, PreferenceSchedule};
pub use log::{write_prediction, write_samples, write_timing, MissionLog, MissionWriter, RoundRecord, LOG_VERSION};
pub use metrics::{metrics, predict_grid, MetricRecord};

use std::f64::consts::FRAC_PI_2;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dubins::Pose;
use crate::environment::{load_grid, observe, synth_environment, FieldGrid, Standardizer};
use crate::error::{Error, Result};
use crate::gp::{GaussianProcess, Point};
use crate::planner::{search, Preference, RewardSpec, SearchConfig};

/// Heading perturbations tried when the robot has no feasible primitive.
pub const MAX_HEADING_RETRIES: usize = 3;

const NOISE_STREAM: u64 = 0;
const PLAN_STREAM: u64 = 1;

#[derive(Debug, Clone)]
pub struct MissionOutcome {
    pub log: MissionLog,
    /// Ground truth in raw units.
    pub truth: FieldGrid,
    pub standardizer: Standardizer,
    pub locations: Vec<Point>,
    /// Raw observations, one per location.
    pub observations: Vec<f64>,
    /// Final posterior mean in raw units.
    pub prediction: FieldGrid,
    /// Set when the robot got stuck before spending its budget.
    pub aborted: Option<String>,
}

impl MissionOutcome {
    pub fn samples(&self) -> usize {
        self.locations.len()
    }
}

/// Builds the raw ground-truth grid selected by `config`.
pub fn build_environment(config: &MissionConfig) -> Result<FieldGrid> {
    let grid = match &config.env {
        EnvSelector::Synth(_) => {
            let seed = config.synth_seed().expect("synthetic selector");
            synth_environment(seed, &config.synth)?.grid
        }
        EnvSelector::File(path) => load_grid(path)?,
    };
    if config.downsample > 1 {
        grid.downsample(config.downsample)
    } else {
        Ok(grid)
    }
}

pub fn run_mission(config: &MissionConfig) -> Result<MissionOutcome> {
    run_mission_with(config, |_| Ok(()))
}

/// Runs a mission, calling `on_round` after each replanning round.
pub fn run_mission_with<F>(config: &MissionConfig, mut on_round: F) -> Result<MissionOutcome>
where
    F: FnMut(&RoundRecord) -> Result<()>,
{
    config.validate()?;
    let truth = build_environment(config)?;
    run_on_grid(config, truth, &mut on_round)
}

/// Runs a mission and writes `mission.csv`, `samples.csv`,
/// `prediction_final.csv` and `timing.csv` into `dir`.
pub fn run_mission_to_dir(config: &MissionConfig, dir: &Path) -> Result<MissionOutcome> {
    config.validate()?;
    fs::create_dir_all(dir)?;
    let truth = build_environment(config)?;
    let mut writer = MissionWriter::create(&dir.join("mission.csv"), &truth.standardizer(), truth.range())?;
    let outcome = run_on_grid(config, truth, &mut |r: &RoundRecord| Ok(writer.append(r)?))?;
    write_samples(
        BufWriter::new(File::create(dir.join("samples.csv"))?),
        &outcome.locations,
        &outcome.observations,
    )?;
    write_prediction(
        BufWriter::new(File::create(dir.join("prediction_final.csv"))?),
        &outcome.prediction,
    )?;
    write_timing(BufWriter::new(File::create(dir.join("timing.csv"))?), &outcome.log)?;
    Ok(outcome)
}

fn run_on_grid(
    config: &MissionConfig,
    truth: FieldGrid,
    on_round: &mut dyn FnMut(&RoundRecord) -> Result<()>,
) -> Result<MissionOutcome> {
    let extent = *truth.extent();
    let standardizer = truth.standardizer();
    let truth_std = truth.map(|v| standardizer.apply(v))?;
    let (lo, hi) = truth.range();
    let noise_std = config.mission.noise_frac * (hi - lo);

    let mut noise_rng = ChaCha8Rng::seed_from_u64(config.seed);
    noise_rng.set_stream(NOISE_STREAM);
    let mut plan_rng = ChaCha8Rng::seed_from_u64(config.seed);
    plan_rng.set_stream(PLAN_STREAM);

    let mut pose = match config.mission.start {
        Some([x, y, h]) => Pose::new(x, y, h),
        None => {
            let [x, y] = extent.center();
            Pose::new(x, y, 0.0)
        }
    };
    if !extent.contains(pose.x, pose.y) {
        return Err(Error::OutOfExtent { x: pose.x, y: pose.y });
    }

    let budget = config.mission.samples;
    let method = config.planner.method;
    let spec = RewardSpec::new(config.planner.objectives())?;
    let mut gp = GaussianProcess::prior(config.gp)?;
    let mut locations: Vec<Point> = Vec::with_capacity(budget);
    let mut raw: Vec<f64> = Vec::with_capacity(budget);
    let mut standardized: Vec<f64> = Vec::with_capacity(budget);
    let mut log = MissionLog::default();
    let mut aborted = None;

    while locations.len() < budget {
        let started = Instant::now();
        let round = log.records.len() + 1;
        let remaining = budget - locations.len();
        let preference = match config.preference {
            Some(p) if locations.len() < p.until => Preference::Objective(p.objective),
            _ => Preference::Uniform,
        };
        let round_spec = spec
            .clone()
            .with_ucb_beta(RewardSpec::ucb_beta_at(config.planner.beta0, round as u64));
        let search_config = SearchConfig {
            budget: config.planner.budget,
            rollout_depth: config.planner.rollout_depth,
            rule: method.rule(),
            preference,
            primitives: config.primitives,
            extent,
            remaining_samples: Some(remaining),
        };

        let mut chosen = None;
        for attempt in 0..=MAX_HEADING_RETRIES {
            let start = Pose::new(pose.x, pose.y, pose.heading + attempt as f64 * FRAC_PI_2);
            match search(start, &gp, &round_spec, &search_config, &mut plan_rng) {
                Ok(outcome) => {
                    chosen = Some(outcome.primitive);
                    break;
                }
                Err(Error::NoFeasiblePrimitives { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        let Some(primitive) = chosen else {
            aborted = Some(format!(
                "no feasible primitive at ({}, {}) after {MAX_HEADING_RETRIES} heading perturbations",
                pose.x, pose.y
            ));
            break;
        };

        let taken = primitive.path.cost().min(remaining);
        for p in primitive.path.observation_points().take(taken) {
            let z = observe(&truth, &p, noise_std, &mut noise_rng)?;
            locations.push(p);
            raw.push(z);
            standardized.push(standardizer.apply(z));
        }
        pose = primitive.path.samples[taken];
        gp = GaussianProcess::fit(config.gp, &locations, &standardized)?;

        let prediction = predict_grid(&gp, &truth_std)?;
        let record = RoundRecord {
            round,
            samples: locations.len(),
            pose,
            action: primitive.index,
            metrics: metrics(&prediction, &truth_std, &locations)?,
            wall_time: started.elapsed().as_secs_f64(),
        };
        on_round(&record)?;
        log.records.push(record);
    }

    let prediction = predict_grid(&gp, &truth_std)?.map(|v| standardizer.invert(v))?;
    Ok(MissionOutcome {
        log,
        truth,
        standardizer,
        locations,
        observations: raw,
        prediction,
        aborted,
    })
}
