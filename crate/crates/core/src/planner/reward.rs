//! Reward vectors for primitive paths.
//!
//! * `variance_reduction`: sum of posterior variances at a path's samples.
//!   Earlier paths of the same simulated sequence are treated as observed
//!   (fantasized with their posterior means), so revisiting a region earns
//!   less. Samples within one path do not condition each other.
//! * `value_sum`: sum of posterior means at the samples, taken from the real
//!   model.
//! * `ucb_replanning`: sum of `mean + beta * std`, the scalar UCB baseline.
//!
//! Raw rewards are mapped to `[0, 1]` per objective with a running min/max
//! kept for the duration of one search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::{Cholesky, GaussianProcess, Point};
use crate::pareto::RewardVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    VarianceReduction,
    ValueSum,
    UcbReplanning,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::VarianceReduction => "variance_reduction",
            Objective::ValueSum => "value_sum",
            Objective::UcbReplanning => "ucb_replanning",
        }
    }
}

/// Objectives of one planning problem plus the UCB baseline's exploration
/// weight for the current mission step.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardSpec {
    pub objectives: Vec<Objective>,
    pub ucb_beta: f64,
}

impl RewardSpec {
    pub fn new(objectives: Vec<Objective>) -> Result<Self> {
        if objectives.is_empty() {
            return Err(Error::EmptyInput("objective list"));
        }
        Ok(Self {
            objectives,
            ucb_beta: 1.0,
        })
    }

    pub fn with_ucb_beta(mut self, beta: f64) -> Self {
        self.ucb_beta = beta;
        self
    }

    pub fn dim(&self) -> usize {
        self.objectives.len()
    }

    /// `beta_0 * sqrt(ln(1 + t))`, growing with the mission step `t`.
    pub fn ucb_beta_at(beta0: f64, t: u64) -> f64 {
        beta0 * (1.0 + t as f64).ln().sqrt()
    }

    fn needs_fantasies(&self) -> bool {
        self.objectives.contains(&Objective::VarianceReduction)
    }
}

/// Running per-objective min/max normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    bounds: Vec<Option<(f64, f64)>>,
}

impl Normalizer {
    pub fn new(dim: usize) -> Self {
        Self {
            bounds: vec![None; dim],
        }
    }

    pub fn bounds(&self) -> &[Option<(f64, f64)>] {
        &self.bounds
    }

    /// Widens the bounds to include `raw` without normalizing it.
    pub fn observe(&mut self, raw: &RewardVector) {
        for (b, &v) in self.bounds.iter_mut().zip(raw.values()) {
            *b = Some(match *b {
                None => (v, v),
                Some((lo, hi)) => (lo.min(v), hi.max(v)),
            });
        }
    }

    /// Folds `raw` into the bounds, then maps it to `[0, 1]`. Components
    /// whose bounds are still degenerate map to `0.5`.
    pub fn normalize(&mut self, raw: &RewardVector) -> RewardVector {
        self.observe(raw);
        raw.values()
            .iter()
            .zip(&self.bounds)
            .map(|(&v, b)| match b {
                Some((lo, hi)) if hi > lo => (v - lo) / (hi - lo),
                _ => 0.5,
            })
            .collect::<Vec<_>>()
            .into()
    }
}

/// Locations fantasized so far in one simulated sequence, with the factor of
/// their posterior covariance plus observation noise.
#[derive(Debug, Clone)]
pub struct FantasyTrack {
    points: Vec<Point>,
    whitened: Vec<Vec<f64>>,
    chol: Cholesky,
}

impl FantasyTrack {
    pub fn new() -> Self {
        Self {
            points: Vec::new(),
            whitened: Vec::new(),
            chol: Cholesky::empty(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Default for FantasyTrack {
    fn default() -> Self {
        Self::new()
    }
}

/// Scores paths against one fixed GP for the lifetime of a search.
#[derive(Debug, Clone)]
pub struct RewardEvaluator<'a> {
    gp: &'a GaussianProcess,
    spec: &'a RewardSpec,
    normalizer: Normalizer,
}

impl<'a> RewardEvaluator<'a> {
    pub fn new(gp: &'a GaussianProcess, spec: &'a RewardSpec) -> Self {
        Self {
            gp,
            spec,
            normalizer: Normalizer::new(spec.dim()),
        }
    }

    pub fn spec(&self) -> &RewardSpec {
        self.spec
    }

    pub fn gp(&self) -> &GaussianProcess {
        self.gp
    }

    pub fn normalizer(&self) -> &Normalizer {
        &self.normalizer
    }

    pub fn normalizer_mut(&mut self) -> &mut Normalizer {
        &mut self.normalizer
    }

    /// Raw reward of a path whose samples are `points`, conditioned on the
    /// fantasies already in `track`. The points are fantasized afterwards.
    pub fn raw_reward(&self, track: &mut FantasyTrack, points: &[Point]) -> RewardVector {
        let proj = self.gp.project(points);
        let params = self.gp.params();
        let needs_fantasies = self.spec.needs_fantasies();
        let columns: Vec<Vec<f64>> = if needs_fantasies {
            (0..points.len()).map(|j| proj.column(j).to_vec()).collect()
        } else {
            Vec::new()
        };

        let mut out = Vec::with_capacity(self.spec.dim());
        for objective in &self.spec.objectives {
            let value = match objective {
                Objective::VarianceReduction => points
                    .iter()
                    .enumerate()
                    .map(|(j, p)| {
                        let prior = proj.variances[j];
                        if track.is_empty() {
                            return prior;
                        }
                        let cross = cross_to_track(params, track, p, &columns[j]);
                        let w = track.chol.solve_lower(&cross);
                        let explained: f64 = w.iter().map(|v| v * v).sum();
                        (prior - explained).max(0.0)
                    })
                    .sum(),
                Objective::ValueSum => proj.means.iter().sum(),
                Objective::UcbReplanning => proj
                    .means
                    .iter()
                    .zip(&proj.variances)
                    .map(|(m, v)| m + self.spec.ucb_beta * v.sqrt())
                    .sum(),
            };
            out.push(value);
        }

        if needs_fantasies {
            let noise = self.gp.diagonal_noise();
            for ((p, col), prior) in points.iter().zip(columns).zip(&proj.variances) {
                let cross = cross_to_track(params, track, p, &col);
                // A numerically redundant fantasy carries no information.
                if track.chol.extend(&cross, prior + noise) {
                    track.points.push(*p);
                    track.whitened.push(col);
                }
            }
        }
        RewardVector::new(out)
    }

    /// Raw reward followed by normalization.
    pub fn path_reward(&mut self, track: &mut FantasyTrack, points: &[Point]) -> RewardVector {
        let raw = self.raw_reward(track, points);
        self.normalizer.normalize(&raw)
    }
}

/// Posterior covariance between `p` and every fantasized point.
fn cross_to_track(params: &crate::gp::GpParams, track: &FantasyTrack, p: &Point, col: &[f64]) -> Vec<f64> {
    track
        .points
        .iter()
        .zip(&track.whitened)
        .map(|(f, wf)| {
            params.kernel(p, f) - crate::gp::dot(col, wf)
        })
        .collect()
}
