//! Shared fixtures for the planner benchmarks.

use pareto_mcts::dubins::PrimitiveParams;
use pareto_mcts::environment::Extent;
use pareto_mcts::{GaussianProcess, GpParams, Point, Pose, Preference, RewardVector, SearchConfig, SelectionRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn extent() -> Extent {
    Extent::new(0.0, 0.0, 10.0, 10.0).expect("valid extent")
}

pub fn center() -> Pose {
    Pose::new(5.0, 5.0, 0.0)
}

/// A GP fitted to `n` noisy samples of a smooth bump at seeded random
/// locations.
pub fn fitted_gp(n: usize, seed: u64) -> GaussianProcess {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<Point> = (0..n)
        .map(|_| [rng.random_range(0.0..10.0), rng.random_range(0.0..10.0)])
        .collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|p| (-((p[0] - 6.0).powi(2) + (p[1] - 4.0).powi(2)) / 2.0).exp() + 0.01 * rng.random::<f64>())
        .collect();
    GaussianProcess::fit(GpParams::default(), &xs, &ys).expect("fit succeeds")
}

pub fn grid_points(side: usize) -> Vec<Point> {
    (0..side * side)
        .map(|i| {
            let (r, c) = (i / side, i % side);
            [(c as f64 + 0.5) * 10.0 / side as f64, (r as f64 + 0.5) * 10.0 / side as f64]
        })
        .collect()
}

pub fn search_config(budget: usize, rule: SelectionRule) -> SearchConfig {
    SearchConfig {
        budget,
        rollout_depth: 4,
        rule,
        preference: Preference::Uniform,
        primitives: PrimitiveParams::default(),
        extent: extent(),
        remaining_samples: None,
    }
}

pub fn random_vectors(n: usize, dim: usize, seed: u64) -> Vec<RewardVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| RewardVector::new((0..dim).map(|_| rng.random::<f64>()).collect()))
        .collect()
}
