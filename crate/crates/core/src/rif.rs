//! Rotated Isolation Forest.
//!
//! Each tree gets its own Haar-random rotation `R_i`. The tree is grown with
//! ordinary axis-aligned splits on the rotated subsample `S_i·R_i`, and a
//! probe `x` is scored by descending tree `i` with `x·R_i`. The rotation is
//! stored next to its tree, so a probe can never meet the wrong rotation.

use crate::error::Result;
use crate::forest::{
    build_parallel, check_fit, score_from_mean_path, subsample, AnomalyScorer, ForestParams,
    StorageFootprint,
};
use crate::matrix::Matrix;
use crate::rng::purpose;
use crate::rotation::{random_rotation, rotate_points, RotationMatrix};
use crate::tree::{c_factor, AxisSplitter, ITree};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RotationSampling {
    /// Haar-uniform on `SO(d)`.
    #[default]
    Haar,
    /// Every rotation is the identity. With matched streams the forest is
    /// then identical to [`crate::IsolationForest`].
    Identity,
}

/// How per-tree results are merged into one score.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CombineScores {
    /// `2^(−mean(h_i)/c(ψ))` over raw path lengths `h_i`, the same
    /// aggregation as Isolation Forest.
    #[default]
    MeanPathLength,
    /// `mean(2^(−h_i/c(ψ)))`, the average of per-tree normalized scores.
    MeanTreeScore,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RotatedTree {
    pub tree: ITree,
    pub rotation: RotationMatrix,
}

impl RotatedTree {
    /// Path length of `x` rotated by this tree's matrix; `buf` holds the
    /// rotated probe.
    pub fn path_length(&self, x: &[f64], buf: &mut [f64]) -> f64 {
        self.rotation.rotate_into(x, buf);
        self.tree.path_length(buf)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RotatedForest {
    params: ForestParams,
    dim: usize,
    psi_effective: usize,
    members: Vec<RotatedTree>,
    combine: CombineScores,
}

impl RotatedForest {
    pub fn fit(points: &Matrix, params: ForestParams) -> Result<Self> {
        Self::fit_with(points, params, RotationSampling::Haar)
    }

    pub fn fit_with(
        points: &Matrix,
        params: ForestParams,
        rotations: RotationSampling,
    ) -> Result<Self> {
        let psi_effective = check_fit(points, &params)?;
        let d = points.cols();
        let members = build_parallel(params.trees, |i| {
            let rng = params.tree_stream(i);
            let rotation = match rotations {
                RotationSampling::Haar => random_rotation(&mut rng.derive(purpose::ROTATION), d),
                RotationSampling::Identity => RotationMatrix::identity(d),
            };
            let sample = subsample(points, psi_effective, &rng)?;
            let rotated = rotate_points(&sample, &rotation)?;
            let tree = ITree::build(
                &rotated,
                params.depth_limit,
                &AxisSplitter,
                &mut rng.derive(purpose::SPLITS),
            )?;
            Ok(RotatedTree { tree, rotation })
        })?;
        Ok(RotatedForest {
            params,
            dim: d,
            psi_effective,
            members,
            combine: CombineScores::default(),
        })
    }

    pub fn from_parts(
        params: ForestParams,
        dim: usize,
        psi_effective: usize,
        members: Vec<RotatedTree>,
    ) -> Self {
        RotatedForest {
            params,
            dim,
            psi_effective,
            members,
            combine: CombineScores::default(),
        }
    }

    /// Switches the score combiner. Not persisted in model files.
    pub fn with_combine(mut self, combine: CombineScores) -> Self {
        self.combine = combine;
        self
    }

    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn psi_effective(&self) -> usize {
        self.psi_effective
    }

    pub fn members(&self) -> &[RotatedTree] {
        &self.members
    }

    /// Raw per-tree path lengths of `x`, in tree order.
    pub fn tree_path_lengths(&self, x: &[f64]) -> Vec<f64> {
        let mut buf = vec![0.0; self.dim];
        self.members
            .iter()
            .map(|m| m.path_length(x, &mut buf))
            .collect()
    }

    pub fn mean_path_length(&self, x: &[f64]) -> f64 {
        let mut buf = vec![0.0; self.dim];
        let total: f64 = self
            .members
            .iter()
            .map(|m| m.path_length(x, &mut buf))
            .sum();
        total / self.members.len() as f64
    }

    /// `t·d²` rotation reals plus 2 reals per internal node.
    pub fn storage_footprint(&self) -> StorageFootprint {
        StorageFootprint {
            trees: self.members.len(),
            internal_nodes: self.members.iter().map(|m| m.tree.internal_count()).sum(),
            leaves: self.members.iter().map(|m| m.tree.leaves().count()).sum(),
            node_reals: self
                .members
                .iter()
                .map(|m| m.tree.split_storage_len())
                .sum(),
            rotation_reals: self.members.iter().map(|m| m.rotation.storage_len()).sum(),
        }
    }
}

impl AnomalyScorer for RotatedForest {
    fn dim(&self) -> usize {
        self.dim
    }

    fn score(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "probe dimension");
        match self.combine {
            CombineScores::MeanPathLength => {
                score_from_mean_path(self.mean_path_length(x), self.psi_effective)
            }
            CombineScores::MeanTreeScore => {
                let c = c_factor(self.psi_effective);
                let lengths = self.tree_path_lengths(x);
                lengths.iter().map(|h| (-h / c).exp2()).sum::<f64>() / lengths.len() as f64
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iforest::IsolationForest;
    use crate::rng::RngStream;

    fn points(seed: u64, n: usize, d: usize) -> Matrix {
        let mut rng = RngStream::new(seed, 5);
        let data = (0..n * d).map(|_| rng.standard_normal()).collect();
        Matrix::from_vec(n, d, data).unwrap()
    }

    #[test]
    fn one_dimension_matches_iforest() {
        let pts = points(0, 500, 1);
        let p = ForestParams::new(50, 128).with_seed(4);
        let rif = RotatedForest::fit(&pts, p).unwrap();
        let iso = IsolationForest::fit(&pts, p).unwrap();
        for m in rif.members() {
            assert_eq!(m.rotation.matrix().as_slice(), &[1.0]);
        }
        for row in pts.row_iter() {
            assert_eq!(rif.score(row).to_bits(), iso.score(row).to_bits());
        }
    }

    #[test]
    fn identity_rotations_reduce_to_iforest() {
        let pts = points(1, 700, 4);
        let p = ForestParams::new(40, 256).with_seed(9);
        let rif = RotatedForest::fit_with(&pts, p, RotationSampling::Identity).unwrap();
        let iso = IsolationForest::fit(&pts, p).unwrap();
        for (m, t) in rif.members().iter().zip(iso.trees()) {
            assert_eq!(&m.tree, t);
        }
        let probes = points(2, 200, 4);
        for row in probes.row_iter() {
            assert_eq!(rif.score(row).to_bits(), iso.score(row).to_bits());
        }
    }

    #[test]
    fn pairs_and_determinism() {
        let pts = points(3, 2000, 2);
        let p = ForestParams::default();
        let f = RotatedForest::fit(&pts, p).unwrap();
        assert_eq!(f.members().len(), 100);
        for m in f.members() {
            assert!(m.rotation.matrix().orthogonality_error() <= 1e-10);
        }
        assert_eq!(f, RotatedForest::fit(&pts, p).unwrap());
    }

    #[test]
    fn per_tree_decomposition() {
        let pts = points(4, 300, 3);
        let f = RotatedForest::fit(&pts, ForestParams::new(10, 64)).unwrap();
        let x = [0.3, -1.2, 2.0];
        let lengths = f.tree_path_lengths(&x);
        for (m, h) in f.members().iter().zip(&lengths) {
            let rotated = rotate_points(&Matrix::from_rows(&[x]).unwrap(), &m.rotation).unwrap();
            assert_eq!(m.tree.path_length(rotated.row(0)), *h);
        }
        let mean = lengths.iter().sum::<f64>() / lengths.len() as f64;
        assert_eq!(f.score(&x), score_from_mean_path(mean, 64));
    }

    #[test]
    fn single_pair_identity_equals_single_tree_iforest() {
        let pts = points(5, 300, 2);
        let p = ForestParams::new(1, 64);
        let rif = RotatedForest::fit_with(&pts, p, RotationSampling::Identity).unwrap();
        let iso = IsolationForest::fit(&pts, p).unwrap();
        assert_eq!(rif.score(&[0.1, 0.2]), iso.score(&[0.1, 0.2]));
    }

    #[test]
    fn alternative_combiner() {
        let pts = points(6, 300, 2);
        let f = RotatedForest::fit(&pts, ForestParams::new(20, 64)).unwrap();
        let x = [4.0, 4.0];
        let c = c_factor(64);
        let expected = f
            .tree_path_lengths(&x)
            .iter()
            .map(|h| (-h / c).exp2())
            .sum::<f64>()
            / 20.0;
        let alt = f.clone().with_combine(CombineScores::MeanTreeScore);
        assert!((alt.score(&x) - expected).abs() < 1e-15);
        assert!(alt.score(&x) > 0.0 && alt.score(&x) <= 1.0);
    }

    #[test]
    fn storage_footprint_counts() {
        let pts = points(7, 2000, 2);
        let f = RotatedForest::fit(&pts, ForestParams::default()).unwrap();
        let fp = f.storage_footprint();
        assert_eq!(fp.rotation_reals, 400);
        assert_eq!(fp.node_reals, 2 * fp.internal_nodes);
        // d² per tree is less than 2d per node times the nodes of that tree
        // whenever the tree has more than d/2 internal nodes.
        for m in f.members() {
            let nodes = m.tree.internal_count();
            if nodes > 1 {
                assert!(m.rotation.storage_len() < 2 * 2 * nodes);
            }
        }
    }
}
