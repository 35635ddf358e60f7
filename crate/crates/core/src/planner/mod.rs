//! Pareto Monte Carlo tree search over primitive paths, plus the scalar-UCB
//! variant used by the single-objective baselines.
//!
//! Each iteration selects down the tree with Pareto UCB (or scalar UCB),
//! expands one untried primitive, scores the new edge and a random rollout
//! from its end pose, and backpropagates the reward vector. The returned
//! action is the most visited root child.

mod reward;
mod tree;

pub use reward::{FantasyTrack, Normalizer, Objective, RewardEvaluator, RewardSpec};
pub use tree::{NodeId, SearchTree, TreeNode, TreePolicy};

use rand::Rng;

use crate::dubins::{primitive_set, Pose, Primitive, PrimitiveParams};
use crate::environment::Extent;
use crate::error::{Error, Result};
use crate::gp::GaussianProcess;
use crate::pareto::RewardVector;

/// Child selection rule inside the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionRule {
    /// Pareto front of per-objective UCB vectors.
    ParetoUcb,
    /// Argmax of the single objective's UCB; requires one objective.
    ScalarUcb,
}

/// How to choose among Pareto-optimal children.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preference {
    #[default]
    Uniform,
    /// Front member with the largest UCB in this objective.
    Objective(usize),
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Iterations per search.
    pub budget: usize,
    pub rollout_depth: usize,
    pub rule: SelectionRule,
    pub preference: Preference,
    pub primitives: PrimitiveParams,
    pub extent: Extent,
    /// Mission samples left; bounds tree depth and rollouts.
    pub remaining_samples: Option<usize>,
}

impl SearchConfig {
    fn policy(&self) -> TreePolicy {
        TreePolicy {
            rule: self.rule,
            preference: self.preference,
            primitives: self.primitives,
            extent: self.extent,
            rollout_depth: self.rollout_depth,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    /// Action of the most visited root child.
    pub primitive: Primitive,
    pub child: NodeId,
    pub tree: SearchTree,
}

/// Validates a search request and builds the root of its tree.
pub fn prepare_search(root: Pose, spec: &RewardSpec, config: &SearchConfig) -> Result<SearchTree> {
    if let Preference::Objective(d) = config.preference {
        if d >= spec.dim() {
            return Err(Error::InvalidArgument(format!(
                "preference objective {d} out of range for {} objectives",
                spec.dim()
            )));
        }
    }
    if config.rule == SelectionRule::ScalarUcb && spec.dim() != 1 {
        return Err(Error::InvalidArgument(
            "scalar UCB selection needs exactly one objective".into(),
        ));
    }
    if config.remaining_samples == Some(0) {
        return Err(Error::InvalidArgument("no mission samples left to plan for".into()));
    }
    let actions = primitive_set(root, &config.primitives, &config.extent)?;
    if config.budget < actions.len() {
        return Err(Error::InvalidArgument(format!(
            "budget {} cannot visit all {} root actions",
            config.budget,
            actions.len()
        )));
    }
    Ok(SearchTree::new(root, actions, config.remaining_samples, spec.dim()))
}

/// Runs `config.budget` iterations from `root` and returns the most visited
/// root action.
pub fn search<R: Rng + ?Sized>(
    root: Pose,
    gp: &GaussianProcess,
    spec: &RewardSpec,
    config: &SearchConfig,
    rng: &mut R,
) -> Result<SearchOutcome> {
    let mut tree = prepare_search(root, spec, config)?;
    let policy = config.policy();
    let mut evaluator = RewardEvaluator::new(gp, spec);
    for _ in 0..config.budget {
        tree.iterate(&mut evaluator, &policy, rng)?;
    }
    let child = tree
        .most_visited_child()
        .expect("budget covers every root action");
    let primitive = tree
        .node(child)
        .action
        .clone()
        .expect("root children carry actions");
    Ok(SearchOutcome {
        primitive,
        child,
        tree,
    })
}

/// Random rollout of at most `depth_max` primitives from `state`, scored in
/// a fresh fantasy sequence. Depth zero yields the zero vector.
#[allow(clippy::too_many_arguments)]
pub fn simulate<R: Rng + ?Sized>(
    state: Pose,
    evaluator: &mut RewardEvaluator<'_>,
    params: &PrimitiveParams,
    extent: &Extent,
    depth_max: usize,
    remaining: Option<usize>,
    rng: &mut R,
) -> RewardVector {
    let mut track = FantasyTrack::new();
    tree::rollout(state, remaining, depth_max, params, extent, evaluator, &mut track, rng)
}
