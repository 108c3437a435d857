//! Pieces shared by the three ensembles: parameters, per-tree random
//! streams, subsampling and score aggregation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{purpose, RngStream};
use crate::tree::c_factor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForestParams {
    /// Number of trees, `t`.
    pub trees: usize,
    /// Per-tree subsample size, `ψ`.
    pub psi: usize,
    pub depth_limit: usize,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams::new(100, 256)
    }
}

impl ForestParams {
    /// `trees` trees of `psi` samples each, depth limit `⌈log₂ ψ⌉`, seed 0.
    pub fn new(trees: usize, psi: usize) -> Self {
        ForestParams {
            trees,
            psi,
            depth_limit: default_depth_limit(psi),
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_depth_limit(mut self, depth_limit: usize) -> Self {
        self.depth_limit = depth_limit;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trees < 1 {
            return Err(Error::InvalidParameter("need at least one tree".into()));
        }
        if self.psi < 2 {
            return Err(Error::InvalidParameter(format!(
                "subsample size must be at least 2, got {}",
                self.psi
            )));
        }
        if self.depth_limit < 1 {
            return Err(Error::InvalidParameter(
                "depth limit must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Random stream owned by tree `i`; depends only on `(seed, i)`.
    pub fn tree_stream(&self, i: usize) -> RngStream {
        RngStream::new(self.seed, 0)
            .derive(purpose::FOREST)
            .derive(i as u64)
    }
}

/// `⌈log₂ ψ⌉`, at least 1.
pub fn default_depth_limit(psi: usize) -> usize {
    let mut depth = 0;
    while (1usize << depth) < psi {
        depth += 1;
    }
    depth.max(1)
}

/// Checks fit preconditions; returns the effective subsample size
/// `min(ψ, n)`.
pub(crate) fn check_fit(points: &Matrix, params: &ForestParams) -> Result<usize> {
    params.validate()?;
    if points.rows() < 2 {
        return Err(Error::TooFewPoints(points.rows()));
    }
    if points.cols() < 1 {
        return Err(Error::InvalidParameter("points have no columns".into()));
    }
    Ok(params.psi.min(points.rows()))
}

/// Draws tree `i`'s subsample without replacement.
pub(crate) fn subsample(points: &Matrix, size: usize, tree_rng: &RngStream) -> Result<Matrix> {
    let idx = tree_rng
        .derive(purpose::SUBSAMPLE)
        .sample_without_replacement(points.rows(), size)?;
    Ok(points.select_rows(&idx))
}

/// Builds `count` independent items in parallel; item `i` only sees its own
/// index, so the result is the same as a sequential loop.
pub(crate) fn build_parallel<T, F>(count: usize, build: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..count).into_par_iter().map(build).collect()
}

/// Forest score from the mean path length: `2^(−H/c(ψ))`.
pub fn score_from_mean_path(mean_path: f64, psi_effective: usize) -> f64 {
    (-mean_path / c_factor(psi_effective)).exp2()
}

/// Common scoring interface of the fitted detectors.
pub trait AnomalyScorer: Sync {
    fn dim(&self) -> usize;

    /// Score of one point, in `(0, 1]`.
    fn score(&self, x: &[f64]) -> f64;

    /// Scores every row, preserving order.
    fn score_batch(&self, points: &Matrix) -> Result<Vec<f64>> {
        if points.rows() == 0 {
            return Ok(Vec::new());
        }
        if points.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: points.cols(),
            });
        }
        Ok((0..points.rows())
            .into_par_iter()
            .map(|i| self.score(points.row(i)))
            .collect())
    }
}

impl<T: AnomalyScorer + ?Sized> AnomalyScorer for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn score(&self, x: &[f64]) -> f64 {
        (**self).score(x)
    }
}

/// Node and rotation storage of a fitted forest, in reals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StorageFootprint {
    pub trees: usize,
    pub internal_nodes: usize,
    pub leaves: usize,
    /// Reals held by split rules.
    pub node_reals: usize,
    /// Reals held by rotation matrices.
    pub rotation_reals: usize,
}
