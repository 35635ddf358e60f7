//! Gaussian-process regression over a scalar field on the plane.
//!
//! Squared-exponential kernel with fixed hyperparameters and a zero prior
//! mean. Models are immutable: [`GaussianProcess::fit`] and
//! [`GaussianProcess::fantasy_update`] return new values.

mod linalg;

pub use linalg::Cholesky;
pub(crate) use linalg::dot;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A location in workspace coordinates.
pub type Point = [f64; 2];

/// Base diagonal jitter relative to the signal variance.
const JITTER_BASE: f64 = 1e-10;
/// Number of jitter doublings tried after the unjittered attempt fails.
const JITTER_ATTEMPTS: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GpParams {
    /// Signal variance of the kernel.
    pub signal_var: f64,
    /// Kernel length-scale in workspace units.
    pub length_scale: f64,
    /// Observation noise variance.
    pub noise_var: f64,
    /// Sliding cap on the training set; the oldest points are dropped.
    pub max_points: usize,
}

impl Default for GpParams {
    fn default() -> Self {
        Self {
            signal_var: 1.0,
            length_scale: 1.0,
            noise_var: 0.01,
            max_points: 1000,
        }
    }
}

impl GpParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.signal_var > 0.0
            && self.signal_var.is_finite()
            && self.length_scale > 0.0
            && self.length_scale.is_finite()
            && self.noise_var >= 0.0
            && self.noise_var.is_finite()
            && self.max_points >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid GP parameters {self:?}")))
        }
    }

    #[inline]
    pub fn kernel(&self, a: &Point, b: &Point) -> f64 {
        let dx = a[0] - b[0];
        let dy = a[1] - b[1];
        self.signal_var * (-(dx * dx + dy * dy) / (2.0 * self.length_scale * self.length_scale)).exp()
    }
}

/// Posterior mean and variance at one location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub mean: f64,
    pub variance: f64,
}

/// Batch of query statistics from [`GaussianProcess::project`].
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    queries: usize,
    /// `m` blocks of length `n`; block `j` is `L^-1 k(X, q_j)`.
    whitened: Vec<f64>,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

impl Projection {
    pub fn len(&self) -> usize {
        self.queries
    }

    pub fn is_empty(&self) -> bool {
        self.queries == 0
    }

    /// Whitened vector of query `j` (length `n`).
    pub fn column(&self, j: usize) -> &[f64] {
        let n = self.whitened.len() / self.queries.max(1);
        &self.whitened[j * n..(j + 1) * n]
    }
}

#[derive(Debug, Clone)]
pub struct GaussianProcess {
    params: GpParams,
    inputs: Vec<Point>,
    targets: Vec<f64>,
    /// Factor of `K + (noise_var + jitter) I`.
    chol: Cholesky,
    /// `(K + noise I)^-1 y`.
    alpha: Vec<f64>,
    jitter: f64,
}

fn check_point(p: &Point, what: &'static str) -> Result<()> {
    if p[0].is_finite() && p[1].is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

impl GaussianProcess {
    /// The unconditioned model.
    pub fn prior(params: GpParams) -> Result<Self> {
        Self::fit(params, &[], &[])
    }

    /// Conditions on `locations`/`values`. Only the most recent
    /// `params.max_points` observations are kept.
    pub fn fit(params: GpParams, locations: &[Point], values: &[f64]) -> Result<Self> {
        params.validate()?;
        if locations.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: locations.len(),
                found: values.len(),
            });
        }
        for p in locations {
            check_point(p, "GP training locations")?;
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("GP training targets"));
        }
        let skip = locations.len().saturating_sub(params.max_points);
        let inputs = locations[skip..].to_vec();
        let targets = values[skip..].to_vec();
        let (chol, jitter) = factor_with_jitter(&params, &inputs)?;
        let alpha = chol.solve(&targets);
        Ok(Self {
            params,
            inputs,
            targets,
            chol,
            alpha,
            jitter,
        })
    }

    pub fn params(&self) -> &GpParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn inputs(&self) -> &[Point] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Diagonal jitter that was needed to factor the kernel matrix.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn prior_variance(&self) -> f64 {
        self.params.signal_var
    }

    /// Effective observation noise on the kernel diagonal.
    pub fn diagonal_noise(&self) -> f64 {
        self.params.noise_var + self.jitter
    }

    pub fn predict(&self, x: &Point) -> Result<Prediction> {
        check_point(x, "GP query")?;
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &Point) -> Prediction {
        let k = self.cross_covariance(x);
        let mean = linalg::dot(&k, &self.alpha);
        let v = self.chol.solve_lower(&k);
        let variance = (self.params.signal_var - linalg::dot(&v, &v)).max(0.0);
        Prediction { mean, variance }
    }

    /// Posterior mean only; `O(n)` per query.
    pub fn mean(&self, x: &Point) -> f64 {
        linalg::dot(&self.cross_covariance(x), &self.alpha)
    }

    /// Kernel values between `x` and every training input.
    pub fn cross_covariance(&self, x: &Point) -> Vec<f64> {
        self.inputs.iter().map(|p| self.params.kernel(p, x)).collect()
    }

    /// `L^-1 k(X, x)` for each query, returned as `m` consecutive blocks of
    /// length `n`. Posterior covariances follow as `k(a, b) - w_a . w_b`.
    pub fn whiten_many(&self, queries: &[Point]) -> Vec<f64> {
        let m = queries.len();
        let n = self.len();
        let mut w = vec![0.0; n * m];
        for (j, q) in queries.iter().enumerate() {
            for (i, p) in self.inputs.iter().enumerate() {
                w[j * n + i] = self.params.kernel(p, q);
            }
        }
        self.chol.solve_lower_many(&mut w, m);
        w
    }

    /// Posterior means and whitened cross-covariances for a batch of
    /// queries, sharing one kernel evaluation per (input, query) pair.
    pub fn project(&self, queries: &[Point]) -> Projection {
        let m = queries.len();
        let n = self.len();
        let mut w = vec![0.0; n * m];
        let mut means = vec![0.0; m];
        for (j, q) in queries.iter().enumerate() {
            let block = &mut w[j * n..(j + 1) * n];
            for (slot, p) in block.iter_mut().zip(&self.inputs) {
                *slot = self.params.kernel(p, q);
            }
            means[j] = linalg::dot(block, &self.alpha);
        }
        self.chol.solve_lower_many(&mut w, m);
        let variances = (0..m)
            .map(|j| {
                let wj = &w[j * n..(j + 1) * n];
                (self.params.signal_var - linalg::dot(wj, wj)).max(0.0)
            })
            .collect();
        Projection {
            queries: queries.len(),
            whitened: w,
            means,
            variances,
        }
    }

    /// Conditions on a hypothetical observation at `x` whose value is the
    /// current posterior mean. Means are unchanged; variances shrink.
    pub fn fantasy_update(&self, x: &Point) -> Result<Self> {
        check_point(x, "fantasy location")?;
        let target = self.mean(x);
        if self.len() < self.params.max_points {
            let cross = self.cross_covariance(x);
            let mut chol = self.chol.clone();
            if chol.extend(&cross, self.params.signal_var + self.diagonal_noise()) {
                let mut inputs = self.inputs.clone();
                let mut targets = self.targets.clone();
                inputs.push(*x);
                targets.push(target);
                let alpha = chol.solve(&targets);
                return Ok(Self {
                    params: self.params,
                    inputs,
                    targets,
                    chol,
                    alpha,
                    jitter: self.jitter,
                });
            }
        }
        self.with_observations(&[*x], &[target])
    }

    /// Refits on the current training set plus new observations.
    pub fn with_observations(&self, locations: &[Point], values: &[f64]) -> Result<Self> {
        let mut inputs = self.inputs.clone();
        let mut targets = self.targets.clone();
        inputs.extend_from_slice(locations);
        targets.extend_from_slice(values);
        Self::fit(self.params, &inputs, &targets)
    }
}

fn factor_with_jitter(params: &GpParams, inputs: &[Point]) -> Result<(Cholesky, f64)> {
    let n = inputs.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = params.kernel(&inputs[i], &inputs[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    let mut jitter = 0.0;
    for attempt in 0..=JITTER_ATTEMPTS {
        if attempt > 0 {
            jitter = JITTER_BASE * params.signal_var * f64::from(1u32 << (attempt - 1));
        }
        let mut a = k.clone();
        for i in 0..n {
            a[i * n + i] += params.noise_var + jitter;
        }
        if let Some(chol) = Cholesky::factor(&a, n) {
            return Ok((chol, jitter));
        }
    }
    Err(Error::Factorization {
        attempts: JITTER_ATTEMPTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(noise: f64) -> GpParams {
        GpParams {
            signal_var: 1.5,
            length_scale: 0.8,
            noise_var: noise,
            max_points: 1000,
        }
    }

    #[test]
    fn prior_model() {
        let gp = GaussianProcess::prior(params(0.1)).unwrap();
        let p = gp.predict(&[3.0, -1.0]).unwrap();
        assert_eq!(p.mean, 0.0);
        assert_eq!(p.variance, 1.5);
    }

    #[test]
    fn noiseless_interpolation() {
        let gp = GaussianProcess::fit(params(0.0), &[[1.0, 2.0]], &[0.7]).unwrap();
        let p = gp.predict(&[1.0, 2.0]).unwrap();
        assert!((p.mean - 0.7).abs() < 1e-8);
        assert!(p.variance.abs() < 1e-8);
    }

    #[test]
    fn far_field_reverts_to_prior() {
        let gp = GaussianProcess::fit(params(0.01), &[[0.0, 0.0], [0.5, 0.1]], &[1.0, -2.0]).unwrap();
        let p = gp.predict(&[50.0, 50.0]).unwrap();
        assert!(p.mean.abs() < 1e-6);
        assert!((p.variance - 1.5).abs() < 1e-6);
    }

    #[test]
    fn noisy_training_point_variance_bounds() {
        let gp = GaussianProcess::fit(params(0.2), &[[0.0, 0.0], [1.0, 0.0]], &[1.0, 0.0]).unwrap();
        let v = gp.predict(&[0.0, 0.0]).unwrap().variance;
        assert!(v > 0.0 && v < 0.2 + 1.5);
    }

    #[test]
    fn duplicate_noiseless_points_need_jitter() {
        let gp = GaussianProcess::fit(params(0.0), &[[1.0, 1.0], [1.0, 1.0]], &[0.5, 0.5]).unwrap();
        assert!(gp.jitter() > 0.0);
        assert!((gp.predict(&[1.0, 1.0]).unwrap().mean - 0.5).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(GaussianProcess::fit(params(0.1), &[[f64::NAN, 0.0]], &[1.0]).is_err());
        assert!(GaussianProcess::fit(params(0.1), &[[0.0, 0.0]], &[f64::INFINITY]).is_err());
        assert!(GaussianProcess::fit(params(0.1), &[[0.0, 0.0]], &[]).is_err());
        let gp = GaussianProcess::prior(params(0.1)).unwrap();
        assert!(gp.predict(&[0.0, f64::NAN]).is_err());
        assert!(gp.fantasy_update(&[f64::INFINITY, 0.0]).is_err());
        let bad = GpParams {
            length_scale: 0.0,
            ..params(0.1)
        };
        assert!(GaussianProcess::prior(bad).is_err());
    }

    #[test]
    fn sliding_cap_keeps_newest() {
        let p = GpParams {
            max_points: 2,
            ..params(0.1)
        };
        let gp = GaussianProcess::fit(p, &[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(gp.inputs(), &[[1.0, 0.0], [2.0, 0.0]]);
        let g2 = gp.fantasy_update(&[5.0, 5.0]).unwrap();
        assert_eq!(g2.len(), 2);
        assert_eq!(g2.inputs()[1], [5.0, 5.0]);
    }

    #[test]
    fn fantasy_shrinks_variance_keeps_mean() {
        let gp = GaussianProcess::fit(params(0.05), &[[0.0, 0.0], [1.0, 1.0]], &[0.3, -0.4]).unwrap();
        let x = [0.4, 0.6];
        let before = gp.predict(&x).unwrap();
        let after = gp.fantasy_update(&x).unwrap().predict(&x).unwrap();
        assert!(after.variance < before.variance);
        assert!((after.mean - before.mean).abs() < 1e-8);
    }

    #[test]
    fn repeated_fantasies_have_diminishing_returns() {
        let gp = GaussianProcess::fit(params(0.1), &[[0.0, 0.0]], &[1.0]).unwrap();
        let x = [0.7, 0.2];
        let v0 = gp.predict(&x).unwrap().variance;
        let g1 = gp.fantasy_update(&x).unwrap();
        let v1 = g1.predict(&x).unwrap().variance;
        let v2 = g1.fantasy_update(&x).unwrap().predict(&x).unwrap().variance;
        assert!(v0 - v1 > v1 - v2 && v1 - v2 > 0.0);
    }

    #[test]
    fn fantasy_is_local() {
        let gp = GaussianProcess::fit(params(0.1), &[[0.0, 0.0]], &[1.0]).unwrap();
        let far = [30.0, 30.0];
        let before = gp.predict(&far).unwrap().variance;
        let after = gp.fantasy_update(&[0.5, 0.0]).unwrap().predict(&far).unwrap().variance;
        assert!((before - after).abs() < 1e-9);
    }

    #[test]
    fn whitened_columns_match_single_solves() {
        let gp = GaussianProcess::fit(params(0.1), &[[0.0, 0.0], [1.0, 0.5], [0.2, 2.0]], &[1.0, 0.0, -1.0]).unwrap();
        let qs = [[0.3, 0.3], [2.0, 1.0]];
        let w = gp.whiten_many(&qs);
        for (j, q) in qs.iter().enumerate() {
            let p = gp.predict(q).unwrap();
            let n = gp.len();
            let ww: f64 = (0..n).map(|i| w[j * n + i] * w[j * n + i]).sum();
            assert!((1.5 - ww - p.variance).abs() < 1e-12);
        }
    }
}
