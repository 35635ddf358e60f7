use rand::Rng;

use crate::bandit::{pareto_ucb_bias, pick_uniform, scalar_ucb_bias};
use crate::dubins::{primitive_set, Pose, Primitive, PrimitiveParams};
use crate::environment::Extent;
use crate::error::{Error, Result};
use crate::gp::Point;
use crate::pareto::{front_unchecked, RewardVector};

use super::reward::{FantasyTrack, RewardEvaluator};
use super::{Preference, SelectionRule};

pub type NodeId = usize;

/// One state in the search tree.
#[derive(Debug, Clone)]
pub struct TreeNode {
    pub state: Pose,
    /// Primitive that led here; `None` at the root.
    pub action: Option<Primitive>,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub untried: Vec<Primitive>,
    /// Number of reward vectors backpropagated through this node.
    pub visits: u64,
    /// Element-wise sum of those reward vectors.
    pub reward: RewardVector,
    /// Samples of `action` that fit in the parent's remaining budget.
    pub action_samples: usize,
    /// Remaining mission samples on arrival; `None` when unbounded.
    pub remaining: Option<usize>,
}

impl TreeNode {
    pub fn is_fully_expanded(&self) -> bool {
        self.untried.is_empty()
    }

    /// No further actions: the mission budget is spent or the pose is
    /// cornered.
    pub fn is_terminal(&self) -> bool {
        self.untried.is_empty() && self.children.is_empty()
    }

    pub fn average_reward(&self) -> RewardVector {
        self.reward.scaled(1.0 / self.visits as f64)
    }
}

/// Knobs shared by every iteration of one search.
#[derive(Debug, Clone)]
pub struct TreePolicy {
    pub rule: SelectionRule,
    pub preference: Preference,
    pub primitives: PrimitiveParams,
    pub extent: Extent,
    pub rollout_depth: usize,
}

/// Arena-backed search tree rooted at index 0.
#[derive(Debug, Clone)]
pub struct SearchTree {
    nodes: Vec<TreeNode>,
    dim: usize,
}

fn spend(remaining: Option<usize>, cost: usize) -> (usize, Option<usize>) {
    match remaining {
        None => (cost, None),
        Some(r) => {
            let used = cost.min(r);
            (used, Some(r - used))
        }
    }
}

fn actions_from(state: Pose, remaining: Option<usize>, params: &PrimitiveParams, extent: &Extent) -> Vec<Primitive> {
    if remaining == Some(0) {
        return Vec::new();
    }
    primitive_set(state, params, extent).unwrap_or_default()
}

impl SearchTree {
    pub const ROOT: NodeId = 0;

    /// A tree whose root at `state` has `actions` to try.
    pub fn new(state: Pose, actions: Vec<Primitive>, remaining: Option<usize>, dim: usize) -> Self {
        let root = TreeNode {
            state,
            action: None,
            parent: None,
            children: Vec::new(),
            untried: actions,
            visits: 0,
            reward: RewardVector::zeros(dim),
            action_samples: 0,
            remaining,
        };
        Self {
            nodes: vec![root],
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[Self::ROOT]
    }

    /// Upper confidence vectors of `node`'s children with the node-local
    /// total `n = sum of child visits`.
    pub fn child_ucb(&self, node: NodeId, rule: SelectionRule) -> Result<Vec<RewardVector>> {
        let children = &self.nodes[node].children;
        let total: u64 = children.iter().map(|&c| self.nodes[c].visits).sum();
        children
            .iter()
            .map(|&c| {
                let child = &self.nodes[c];
                if child.visits == 0 {
                    return Err(Error::UnvisitedChild);
                }
                let bias = match rule {
                    SelectionRule::ParetoUcb => pareto_ucb_bias(total, child.visits, self.dim),
                    SelectionRule::ScalarUcb => scalar_ucb_bias(total, child.visits),
                };
                Ok(child.average_reward().shifted(bias))
            })
            .collect()
    }

    /// Picks a child from the Pareto front of the children's UCB vectors:
    /// uniformly at random, or the front member with the largest component
    /// `d` when a preference is set (first on ties).
    pub fn pareto_best_child<R: Rng + ?Sized>(
        &self,
        node: NodeId,
        preference: Preference,
        rng: &mut R,
    ) -> Result<NodeId> {
        let ucb = self.child_ucb(node, SelectionRule::ParetoUcb)?;
        if ucb.is_empty() {
            return Err(Error::EmptyInput("children of selected node"));
        }
        let front = front_unchecked(&ucb);
        let pick = match preference {
            Preference::Uniform => pick_uniform(&front, rng),
            Preference::Objective(d) => {
                let mut best = front[0];
                for &k in &front[1..] {
                    if ucb[k][d] > ucb[best][d] {
                        best = k;
                    }
                }
                best
            }
        };
        Ok(self.nodes[node].children[pick])
    }

    /// Scalar UCB on the single reward component; ties broken uniformly.
    pub fn scalar_best_child<R: Rng + ?Sized>(&self, node: NodeId, rng: &mut R) -> Result<NodeId> {
        let ucb = self.child_ucb(node, SelectionRule::ScalarUcb)?;
        let best = ucb
            .iter()
            .map(|u| u[0])
            .fold(f64::NEG_INFINITY, f64::max);
        let ties: Vec<usize> = (0..ucb.len()).filter(|&k| ucb[k][0] == best).collect();
        if ties.is_empty() {
            return Err(Error::EmptyInput("children of selected node"));
        }
        Ok(self.nodes[node].children[pick_uniform(&ties, rng)])
    }

    /// Descends from the root while nodes are fully expanded and not
    /// terminal.
    pub fn selection<R: Rng + ?Sized>(&self, policy: &TreePolicy, rng: &mut R) -> Result<NodeId> {
        let mut v = Self::ROOT;
        loop {
            let node = &self.nodes[v];
            if !node.is_fully_expanded() || node.is_terminal() {
                return Ok(v);
            }
            v = match policy.rule {
                SelectionRule::ParetoUcb => self.pareto_best_child(v, policy.preference, rng)?,
                SelectionRule::ScalarUcb => self.scalar_best_child(v, rng)?,
            };
        }
    }

    /// Pops a uniformly random untried action of `node` and attaches the
    /// resulting child.
    pub fn expansion<R: Rng + ?Sized>(&mut self, node: NodeId, policy: &TreePolicy, rng: &mut R) -> Result<NodeId> {
        let parent = &mut self.nodes[node];
        if parent.untried.is_empty() {
            return Err(Error::InvalidArgument("expansion of a fully expanded node".into()));
        }
        let idx = rng.random_range(0..parent.untried.len());
        let action = parent.untried.swap_remove(idx);
        let (action_samples, remaining) = spend(parent.remaining, action.path.cost());
        let state = action.path.end;
        let untried = actions_from(state, remaining, &policy.primitives, &policy.extent);
        let id = self.nodes.len();
        self.nodes[node].children.push(id);
        self.nodes.push(TreeNode {
            state,
            action: Some(action),
            parent: Some(node),
            children: Vec::new(),
            untried,
            visits: 0,
            reward: RewardVector::zeros(self.dim),
            action_samples,
            remaining,
        });
        Ok(id)
    }

    /// Adds `reward` to every node from `leaf` up to the root.
    pub fn backpropagate(&mut self, leaf: NodeId, reward: &RewardVector) {
        let mut cur = Some(leaf);
        while let Some(id) = cur {
            let node = &mut self.nodes[id];
            node.visits += 1;
            node.reward += reward;
            cur = node.parent;
        }
    }

    /// Scores the move into `node` followed by a random rollout from its
    /// state, all within one fantasy sequence.
    pub fn evaluate<R: Rng + ?Sized>(
        &self,
        node: NodeId,
        evaluator: &mut RewardEvaluator<'_>,
        policy: &TreePolicy,
        rng: &mut R,
    ) -> RewardVector {
        let n = &self.nodes[node];
        let mut track = FantasyTrack::new();
        let mut total = RewardVector::zeros(self.dim);
        if let Some(action) = &n.action {
            let points: Vec<Point> = action.path.observation_points().take(n.action_samples).collect();
            total += &evaluator.path_reward(&mut track, &points);
        }
        total += &rollout(
            n.state,
            n.remaining,
            policy.rollout_depth,
            &policy.primitives,
            &policy.extent,
            evaluator,
            &mut track,
            rng,
        );
        total
    }

    /// One selection / expansion / simulation / backpropagation round.
    /// Returns the evaluated node and the reward backpropagated from it.
    pub fn iterate<R: Rng + ?Sized>(
        &mut self,
        evaluator: &mut RewardEvaluator<'_>,
        policy: &TreePolicy,
        rng: &mut R,
    ) -> Result<(NodeId, RewardVector)> {
        let selected = self.selection(policy, rng)?;
        let leaf = if self.nodes[selected].is_fully_expanded() {
            selected
        } else {
            self.expansion(selected, policy, rng)?
        };
        let reward = self.evaluate(leaf, evaluator, policy, rng);
        self.backpropagate(leaf, &reward);
        Ok((leaf, reward))
    }

    /// Child of the root with the most visits; lowest index on ties.
    pub fn most_visited_child(&self) -> Option<NodeId> {
        let children = &self.root().children;
        let mut best: Option<NodeId> = None;
        for &c in children {
            if best.is_none_or(|b| self.nodes[c].visits > self.nodes[b].visits) {
                best = Some(c);
            }
        }
        best
    }
}

/// Random default policy: up to `depth_max` uniformly chosen feasible
/// primitives, summing their normalized rewards without discounting.
#[allow(clippy::too_many_arguments)]
pub(crate) fn rollout<R: Rng + ?Sized>(
    mut state: Pose,
    mut remaining: Option<usize>,
    depth_max: usize,
    params: &PrimitiveParams,
    extent: &Extent,
    evaluator: &mut RewardEvaluator<'_>,
    track: &mut FantasyTrack,
    rng: &mut R,
) -> RewardVector {
    let mut total = RewardVector::zeros(evaluator.spec().dim());
    for _ in 0..depth_max {
        let actions = actions_from(state, remaining, params, extent);
        if actions.is_empty() {
            break;
        }
        let action = &actions[rng.random_range(0..actions.len())];
        let (used, left) = spend(remaining, action.path.cost());
        let points: Vec<Point> = action.path.observation_points().take(used).collect();
        total += &evaluator.path_reward(track, &points);
        state = action.path.end;
        remaining = left;
    }
    total
}
