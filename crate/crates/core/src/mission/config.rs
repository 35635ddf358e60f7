//! Mission configuration, read from TOML.
//!
//! ```toml
//! seed = 3
//! env = "synth"            # "synth", "synth:<seed>" or "file:<path>"
//! downsample = 1           # block-mean factor applied to file grids
//!
//! [synth]                  # synthetic field (see SynthParams)
//! [gp]                     # signal_var, length_scale, noise_var, max_points
//! [primitives]             # count, arc_length, r_min, fan_half_angle, spacing
//!
//! [planner]
//! method = "pareto"        # "pareto", "information" or "ucb"
//! budget = 3000
//! rollout_depth = 4
//! beta0 = 1.0
//! # objectives = ["variance_reduction", "value_sum"]
//!
//! [mission]
//! samples = 600
//! noise_frac = 0.01
//! # start = [5.0, 5.0, 0.0]
//!
//! [preference]             # optional informative-first schedule
//! objective = 0
//! until = 400
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize};

use crate::dubins::PrimitiveParams;
use crate::environment::SynthParams;
use crate::error::{Error, Result};
use crate::gp::GpParams;
use crate::planner::{Objective, SelectionRule};

/// Where the ground-truth field comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnvSelector {
    /// Synthetic field; `None` reuses the mission seed.
    Synth(Option<u64>),
    File(PathBuf),
}

impl FromStr for EnvSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "synth" {
            return Ok(EnvSelector::Synth(None));
        }
        if let Some(seed) = s.strip_prefix("synth:") {
            let seed = seed
                .parse()
                .map_err(|e| Error::Config(format!("bad synthetic seed {seed:?}: {e}")))?;
            return Ok(EnvSelector::Synth(Some(seed)));
        }
        if let Some(path) = s.strip_prefix("file:") {
            if path.is_empty() {
                return Err(Error::Config("empty grid path in env selector".into()));
            }
            return Ok(EnvSelector::File(PathBuf::from(path)));
        }
        Err(Error::Config(format!(
            "env selector {s:?} is not 'synth', 'synth:<seed>' or 'file:<path>'"
        )))
    }
}

impl fmt::Display for EnvSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvSelector::Synth(None) => write!(f, "synth"),
            EnvSelector::Synth(Some(s)) => write!(f, "synth:{s}"),
            EnvSelector::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl<'de> Deserialize<'de> for EnvSelector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for EnvSelector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Pareto MCTS over all configured objectives.
    Pareto,
    /// Scalar-UCB MCTS on variance reduction.
    Information,
    /// Scalar-UCB MCTS on the UCB-replanning reward.
    Ucb,
}

impl Method {
    pub fn rule(self) -> SelectionRule {
        match self {
            Method::Pareto => SelectionRule::ParetoUcb,
            Method::Information | Method::Ucb => SelectionRule::ScalarUcb,
        }
    }

    pub fn default_objectives(self) -> Vec<Objective> {
        match self {
            Method::Pareto => vec![Objective::VarianceReduction, Objective::ValueSum],
            Method::Information => vec![Objective::VarianceReduction],
            Method::Ucb => vec![Objective::UcbReplanning],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub method: Method,
    /// Overrides the method's default objective list.
    pub objectives: Option<Vec<Objective>>,
    /// Search iterations per replan.
    pub budget: usize,
    pub rollout_depth: usize,
    /// Base exploration weight of the UCB-replanning reward.
    pub beta0: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            method: Method::Pareto,
            objectives: None,
            budget: 3000,
            rollout_depth: 4,
            beta0: 1.0,
        }
    }
}

impl PlannerConfig {
    pub fn objectives(&self) -> Vec<Objective> {
        self.objectives
            .clone()
            .unwrap_or_else(|| self.method.default_objectives())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MissionParams {
    /// Sample budget `B`.
    pub samples: usize,
    /// Observation noise std as a fraction of the field's raw range.
    pub noise_frac: f64,
    /// Start pose `[x, y, heading]`; defaults to the workspace center facing
    /// along +x.
    pub start: Option<[f64; 3]>,
}

impl Default for MissionParams {
    fn default() -> Self {
        Self {
            samples: 600,
            noise_frac: 0.01,
            start: None,
        }
    }
}

/// Use `objective` as the Pareto-front tie-breaker until `until` samples
/// have been collected, then choose uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferenceSchedule {
    pub objective: usize,
    pub until: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MissionConfig {
    pub seed: u64,
    pub env: EnvSelector,
    pub downsample: usize,
    pub synth: SynthParams,
    pub gp: GpParams,
    pub primitives: PrimitiveParams,
    pub planner: PlannerConfig,
    pub mission: MissionParams,
    pub preference: Option<PreferenceSchedule>,
}

impl Default for MissionConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            env: EnvSelector::Synth(None),
            downsample: 1,
            synth: SynthParams::default(),
            gp: GpParams::default(),
            primitives: PrimitiveParams::default(),
            planner: PlannerConfig::default(),
            mission: MissionParams::default(),
            preference: None,
        }
    }
}

impl MissionConfig {
    /// Parses TOML text. Relative grid paths resolve against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut cfg: MissionConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if let (EnvSelector::File(p), Some(base)) = (&cfg.env, base_dir) {
            if p.is_relative() {
                cfg.env = EnvSelector::File(base.join(p));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text, path.parent())
    }

    pub fn validate(&self) -> Result<()> {
        self.gp.validate()?;
        self.primitives.validate()?;
        let bad = |m: String| Err(Error::Config(m));
        if self.mission.samples == 0 {
            return bad("mission.samples must be positive".into());
        }
        if !(self.mission.noise_frac >= 0.0 && self.mission.noise_frac.is_finite()) {
            return bad("mission.noise_frac must be a non-negative number".into());
        }
        if self.downsample == 0 {
            return bad("downsample must be at least 1".into());
        }
        if self.planner.budget < self.primitives.count {
            return bad(format!(
                "planner.budget {} is below the primitive count {}",
                self.planner.budget, self.primitives.count
            ));
        }
        if !(self.planner.beta0 >= 0.0 && self.planner.beta0.is_finite()) {
            return bad("planner.beta0 must be a non-negative number".into());
        }
        let objectives = self.planner.objectives();
        if objectives.is_empty() {
            return bad("planner.objectives must not be empty".into());
        }
        if self.planner.method != Method::Pareto && objectives.len() != 1 {
            return bad(format!(
                "method {:?} optimizes a single objective, got {}",
                self.planner.method,
                objectives.len()
            ));
        }
        if let Some(p) = &self.preference {
            if self.planner.method != Method::Pareto {
                return bad("a preference schedule needs the pareto method".into());
            }
            if p.objective >= objectives.len() {
                return bad(format!("preference.objective {} out of range", p.objective));
            }
            if p.until > self.mission.samples {
                return bad("preference.until exceeds mission.samples".into());
            }
        }
        if let EnvSelector::File(path) = &self.env {
            if !path.is_file() {
                return bad(format!("grid file {} does not exist", path.display()));
            }
        }
        Ok(())
    }

    /// Seed of the synthetic field, when the environment is synthetic.
    pub fn synth_seed(&self) -> Option<u64> {
        match self.env {
            EnvSelector::Synth(s) => Some(s.unwrap_or(self.seed)),
            EnvSelector::File(_) => None,
        }
    }
}
