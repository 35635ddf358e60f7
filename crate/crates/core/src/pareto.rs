//! Dominance relations on reward vectors and Pareto front construction.
//!
//! All comparisons use raw `>`/`>=` on `f64` with no epsilon. Callers that
//! want tolerance-based dominance should quantize their rewards first.

use std::ops::{Add, AddAssign, Index};

use crate::error::{Error, Result};

/// A `D`-dimensional reward vector. Larger is better in every component.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RewardVector(Vec<f64>);

impl RewardVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Element-wise scaling.
    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|v| v * factor).collect())
    }

    /// Adds `offset` to every component.
    pub fn shifted(&self, offset: f64) -> Self {
        Self(self.0.iter().map(|v| v + offset).collect())
    }

    /// Element-wise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl From<Vec<f64>> for RewardVector {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

impl From<&[f64]> for RewardVector {
    fn from(values: &[f64]) -> Self {
        Self(values.to_vec())
    }
}

impl Index<usize> for RewardVector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

impl AddAssign<&RewardVector> for RewardVector {
    /// Panics on dimension mismatch; the dimension is fixed per problem.
    fn add_assign(&mut self, rhs: &RewardVector) {
        assert_eq!(self.dim(), rhs.dim(), "reward dimension mismatch");
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
    }
}

impl Add<&RewardVector> for &RewardVector {
    type Output = RewardVector;

    fn add(self, rhs: &RewardVector) -> RewardVector {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

fn check_dims(a: &RewardVector, b: &RewardVector) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

// Unchecked kernels shared by the public checked wrappers and the hot paths
// in the planner, where dimensions are validated once per problem.

#[inline]
pub(crate) fn dominates_slice(a: &[f64], b: &[f64]) -> bool {
    let mut strictly_better = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strictly_better = true;
        }
    }
    strictly_better
}

/// `a` dominates `b`: no worse in every objective and strictly better in one.
pub fn dominates(a: &RewardVector, b: &RewardVector) -> Result<bool> {
    check_dims(a, b)?;
    Ok(dominates_slice(a.values(), b.values()))
}

/// `a` is no worse than `b` in every objective.
pub fn weakly_dominates(a: &RewardVector, b: &RewardVector) -> Result<bool> {
    check_dims(a, b)?;
    Ok(a.0.iter().zip(&b.0).all(|(x, y)| x >= y))
}

/// Each vector is strictly better than the other somewhere.
pub fn incomparable(a: &RewardVector, b: &RewardVector) -> Result<bool> {
    check_dims(a, b)?;
    let better = a.0.iter().zip(&b.0).any(|(x, y)| x > y);
    let worse = a.0.iter().zip(&b.0).any(|(x, y)| x < y);
    Ok(better && worse)
}

/// `a` is strictly better than `b` in at least one objective.
pub fn non_dominated_by(a: &RewardVector, b: &RewardVector) -> Result<bool> {
    check_dims(a, b)?;
    Ok(a.0.iter().zip(&b.0).any(|(x, y)| x > y))
}

/// Indices of the non-dominated members of `set`, in ascending order.
///
/// Membership is index-level: equal vectors that are not dominated are all
/// kept, so a caller choosing among tied candidates can pick any of them.
pub fn pareto_front(set: &[RewardVector]) -> Result<Vec<usize>> {
    let first = set.first().ok_or(Error::EmptyInput("pareto_front set"))?;
    for v in set {
        check_dims(first, v)?;
    }
    Ok(front_unchecked(set))
}

pub(crate) fn front_unchecked(set: &[RewardVector]) -> Vec<usize> {
    // Sweep keeping a running archive of non-dominated candidates. A newcomer
    // is rejected if any archived member dominates it, and evicts every
    // archived member it dominates. Dominance is transitive, so a point
    // dominated by an evicted member is also dominated by the newcomer.
    let mut archive: Vec<usize> = Vec::new();
    for (i, v) in set.iter().enumerate() {
        if archive
            .iter()
            .any(|&j| dominates_slice(set[j].values(), v.values()))
        {
            continue;
        }
        archive.retain(|&j| !dominates_slice(v.values(), set[j].values()));
        archive.push(i);
    }
    archive.sort_unstable();
    archive
}
