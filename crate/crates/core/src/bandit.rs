//! Multi-objective multi-armed bandit testbed for the Pareto UCB node
//! selection policy.
//!
//! Every arm emits independent Bernoulli rewards per objective, so all
//! rewards lie in `[0, 1]`. The lab records pull counts and whether each
//! selection landed in the true Pareto optimal set, which is what the
//! logarithmic pull bound and the vanishing failure probability talk about.

use std::io::{self, BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pareto::{dominates_slice, front_unchecked, RewardVector};

/// Confidence radius shared by every component of a Pareto UCB vector:
/// `sqrt((4 ln n + ln D) / (2 n_k))`.
pub fn pareto_ucb_bias(total: u64, pulls: u64, objectives: usize) -> f64 {
    let n = total as f64;
    let d = objectives as f64;
    ((4.0 * n.ln() + d.ln()) / (2.0 * pulls as f64)).sqrt()
}

/// Scalar UCB radius `sqrt(4 ln n / (2 n_k))`.
pub fn scalar_ucb_bias(total: u64, pulls: u64) -> f64 {
    ((4.0 * (total as f64).ln()) / (2.0 * pulls as f64)).sqrt()
}

/// Picks uniformly among `candidates`; a single candidate consumes no
/// randomness.
pub(crate) fn pick_uniform<R: Rng + ?Sized>(candidates: &[usize], rng: &mut R) -> usize {
    match candidates {
        [only] => *only,
        _ => candidates[rng.random_range(0..candidates.len())],
    }
}

/// A stationary arm with independent Bernoulli rewards per objective.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditArm {
    means: RewardVector,
}

impl BanditArm {
    pub fn new(means: RewardVector) -> Result<Self> {
        if means.dim() == 0 {
            return Err(Error::EmptyInput("arm means"));
        }
        if means.values().iter().any(|m| !(0.0..=1.0).contains(m)) {
            return Err(Error::InvalidArgument(format!(
                "arm means must lie in [0, 1], got {:?}",
                means.values()
            )));
        }
        Ok(Self { means })
    }

    pub fn means(&self) -> &RewardVector {
        &self.means
    }

    pub fn dim(&self) -> usize {
        self.means.dim()
    }

    /// Draws one reward vector, consuming exactly `dim()` uniforms.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> RewardVector {
        self.means
            .values()
            .iter()
            .map(|&p| if rng.random::<f64>() < p { 1.0 } else { 0.0 })
            .collect::<Vec<_>>()
            .into()
    }
}

/// Per-arm selection counts and cumulative rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct PullLedger {
    counts: Vec<u64>,
    cumulative: Vec<RewardVector>,
    step: u64,
}

impl PullLedger {
    pub fn new(arms: usize, dim: usize) -> Self {
        Self {
            counts: vec![0; arms],
            cumulative: vec![RewardVector::zeros(dim); arms],
            step: 0,
        }
    }

    pub fn arms(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn cumulative(&self) -> &[RewardVector] {
        &self.cumulative
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    /// Average reward of `arm`, or `None` before its first pull.
    pub fn average(&self, arm: usize) -> Option<RewardVector> {
        let n = self.counts[arm];
        (n > 0).then(|| self.cumulative[arm].scaled(1.0 / n as f64))
    }

    pub fn record(&mut self, arm: usize, reward: &RewardVector) {
        self.counts[arm] += 1;
        self.cumulative[arm] += reward;
        self.step += 1;
    }

    fn first_unpulled(&self) -> Option<usize> {
        self.counts.iter().position(|&c| c == 0)
    }

    /// Pareto UCB vectors of all arms. Requires every arm pulled once.
    pub fn ucb_vectors(&self, objectives: usize) -> Vec<RewardVector> {
        (0..self.arms())
            .map(|k| {
                let bias = pareto_ucb_bias(self.step, self.counts[k], objectives);
                self.cumulative[k]
                    .scaled(1.0 / self.counts[k] as f64)
                    .shifted(bias)
            })
            .collect()
    }
}

/// Selection rule applied once every arm has been tried.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BanditPolicy {
    /// Uniform choice over the Pareto front of the UCB vectors.
    ParetoUcb,
    /// Argmax of the first component plus the scalar radius; ties uniform.
    ScalarUcb,
}

/// One selection under the Pareto UCB policy.
///
/// Unpulled arms go first in index order; afterwards the choice is uniform
/// over the Pareto front of the UCB vectors.
pub fn policy_step<R: Rng + ?Sized>(ledger: &PullLedger, objectives: usize, rng: &mut R) -> usize {
    if let Some(k) = ledger.first_unpulled() {
        return k;
    }
    let ucb = ledger.ucb_vectors(objectives);
    pick_uniform(&front_unchecked(&ucb), rng)
}

/// Scalar UCB on the first reward component, used to check that the Pareto
/// rule collapses to it when there is a single objective.
pub fn scalar_policy_step<R: Rng + ?Sized>(ledger: &PullLedger, rng: &mut R) -> usize {
    if let Some(k) = ledger.first_unpulled() {
        return k;
    }
    let scores: Vec<f64> = (0..ledger.arms())
        .map(|k| {
            let n = ledger.counts[k];
            ledger.cumulative[k][0] / n as f64 + scalar_ucb_bias(ledger.step, n)
        })
        .collect();
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<usize> = (0..scores.len()).filter(|&k| scores[k] == best).collect();
    pick_uniform(&ties, rng)
}

/// Finds the optimal arm "farthest away" from the sub-optimal arm `k`.
///
/// For each `k'` in `front` the margin is `min_d (mu_k',d - mu_k,d)`; the arm
/// with the largest margin wins (first on ties) and the gap vector is
/// `mu_k* - mu_k`.
pub fn most_dominant_optimal(
    k: usize,
    front: &[usize],
    means: &[RewardVector],
) -> Result<(usize, RewardVector)> {
    if front.is_empty() {
        return Err(Error::EmptyInput("optimal arm set"));
    }
    let target = means
        .get(k)
        .ok_or_else(|| Error::InvalidArgument(format!("arm {k} out of range")))?;
    let mut best: Option<(usize, f64)> = None;
    for &j in front {
        let mu = means
            .get(j)
            .ok_or_else(|| Error::InvalidArgument(format!("arm {j} out of range")))?;
        let gap = mu.sub(target)?;
        if !dominates_slice(mu.values(), target.values()) {
            return Err(Error::InvalidArgument(format!(
                "arm {j} does not dominate arm {k}"
            )));
        }
        let margin = gap.values().iter().copied().fold(f64::INFINITY, f64::min);
        if best.is_none_or(|(_, m)| margin > m) {
            best = Some((j, margin));
        }
    }
    let (star, _) = best.expect("front is non-empty");
    Ok((star, means[star].sub(target)?))
}

/// One full run of the policy.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialTrace {
    pub dim: usize,
    /// Selected arm at each step.
    pub arms: Vec<u32>,
    /// Flat `steps x dim` rewards.
    pub rewards: Vec<f64>,
    /// Whether each selection was a member of the true Pareto optimal set.
    pub in_front: Vec<bool>,
    /// `(n, T_k(n) for every k)` at geometric checkpoints.
    pub checkpoints: Vec<(u64, Vec<u64>)>,
}

impl TrialTrace {
    pub fn steps(&self) -> usize {
        self.arms.len()
    }

    pub fn reward(&self, step: usize) -> &[f64] {
        &self.rewards[step * self.dim..(step + 1) * self.dim]
    }

    /// Fraction of selections in `range` (0-based steps) outside the Pareto
    /// optimal set.
    pub fn failure_frequency(&self, range: std::ops::Range<usize>) -> f64 {
        let len = range.len();
        if len == 0 {
            return 0.0;
        }
        let failures = self.in_front[range].iter().filter(|&&ok| !ok).count();
        failures as f64 / len as f64
    }

    /// Pull count of `arm` at checkpoint `n`, if that checkpoint was recorded.
    pub fn pulls_at(&self, n: u64, arm: usize) -> Option<u64> {
        self.checkpoints
            .iter()
            .find(|(c, _)| *c == n)
            .map(|(_, counts)| counts[arm])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    /// Arms in the true Pareto optimal set.
    pub optimal: Vec<usize>,
    pub trials: Vec<TrialTrace>,
}

/// Checkpoints `10, 100, ...` not exceeding `horizon`, plus `horizon` itself.
pub fn geometric_checkpoints(horizon: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut c = 10u64;
    while c < horizon {
        out.push(c);
        c = c.saturating_mul(10);
    }
    out.push(horizon);
    out
}

/// Runs `trials` independent trials of `horizon` selections each.
///
/// Trial `t` draws from a ChaCha8 generator seeded with `seed` on stream `t`,
/// so traces are reproducible per seed and independent across trials. Each
/// step selects an arm first and then samples its reward from the same
/// generator.
pub fn run_experiment(
    arms: &[BanditArm],
    horizon: u64,
    trials: usize,
    seed: u64,
    policy: BanditPolicy,
) -> Result<ExperimentResult> {
    let dim = arms.first().ok_or(Error::EmptyInput("bandit arms"))?.dim();
    if let Some(bad) = arms.iter().find(|a| a.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    if horizon < arms.len() as u64 {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} is shorter than the {} initialization pulls",
            arms.len()
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if policy == BanditPolicy::ScalarUcb && dim != 1 {
        return Err(Error::InvalidArgument(
            "scalar UCB needs single-objective arms".into(),
        ));
    }

    let means: Vec<RewardVector> = arms.iter().map(|a| a.means().clone()).collect();
    let optimal = front_unchecked(&means);
    let mut is_optimal = vec![false; arms.len()];
    for &k in &optimal {
        is_optimal[k] = true;
    }
    let checkpoints = geometric_checkpoints(horizon);

    let trials = (0..trials)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let mut ledger = PullLedger::new(arms.len(), dim);
            let steps = horizon as usize;
            let mut trace = TrialTrace {
                dim,
                arms: Vec::with_capacity(steps),
                rewards: Vec::with_capacity(steps * dim),
                in_front: Vec::with_capacity(steps),
                checkpoints: Vec::with_capacity(checkpoints.len()),
            };
            let mut next_checkpoint = 0;
            for _ in 0..horizon {
                let arm = match policy {
                    BanditPolicy::ParetoUcb => policy_step(&ledger, dim, &mut rng),
                    BanditPolicy::ScalarUcb => scalar_policy_step(&ledger, &mut rng),
                };
                let reward = arms[arm].sample(&mut rng);
                ledger.record(arm, &reward);
                trace.arms.push(arm as u32);
                trace.rewards.extend_from_slice(reward.values());
                trace.in_front.push(is_optimal[arm]);
                if checkpoints.get(next_checkpoint) == Some(&ledger.step()) {
                    trace
                        .checkpoints
                        .push((ledger.step(), ledger.counts().to_vec()));
                    next_checkpoint += 1;
                }
            }
            trace
        })
        .collect();

    Ok(ExperimentResult { optimal, trials })
}

/// Reads arm means: one arm per line, comma-separated components, `#`
/// starts a comment.
pub fn read_arms<R: BufRead>(reader: R) -> Result<Vec<BanditArm>> {
    let mut arms = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let means = body
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|e| {
                    Error::InvalidArgument(format!("arms line {}: {tok:?}: {e}", i + 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        arms.push(BanditArm::new(means.into())?);
    }
    if arms.is_empty() {
        return Err(Error::EmptyInput("arms file"));
    }
    Ok(arms)
}

/// Writes the per-step trace as CSV:
/// `trial,step,arm,r0..r{D-1},in_front`. Steps are 1-based.
pub fn write_trace_csv<W: Write>(result: &ExperimentResult, mut out: W) -> io::Result<()> {
    let dim = result.trials.first().map_or(0, |t| t.dim);
    write!(out, "trial,step,arm")?;
    for d in 0..dim {
        write!(out, ",r{d}")?;
    }
    writeln!(out, ",in_front")?;
    for (t, trace) in result.trials.iter().enumerate() {
        for s in 0..trace.steps() {
            write!(out, "{t},{},{}", s + 1, trace.arms[s])?;
            for r in trace.reward(s) {
                write!(out, ",{r}")?;
            }
            writeln!(out, ",{}", u8::from(trace.in_front[s]))?;
        }
    }
    out.flush()
}
