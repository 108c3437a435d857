//! Classic Isolation Forest with axis-aligned splits.

use crate::error::Result;
use crate::forest::{
    build_parallel, check_fit, score_from_mean_path, subsample, AnomalyScorer, ForestParams,
    StorageFootprint,
};
use crate::matrix::Matrix;
use crate::rng::purpose;
use crate::tree::{AxisSplitter, ITree};

#[derive(Clone, Debug, PartialEq)]
pub struct IsolationForest {
    params: ForestParams,
    dim: usize,
    psi_effective: usize,
    trees: Vec<ITree>,
}

impl IsolationForest {
    /// Fits `t` trees, each on `min(ψ, n)` points drawn without replacement.
    pub fn fit(points: &Matrix, params: ForestParams) -> Result<Self> {
        let psi_effective = check_fit(points, &params)?;
        let trees = build_parallel(params.trees, |i| {
            let rng = params.tree_stream(i);
            let sample = subsample(points, psi_effective, &rng)?;
            ITree::build(
                &sample,
                params.depth_limit,
                &AxisSplitter,
                &mut rng.derive(purpose::SPLITS),
            )
        })?;
        Ok(IsolationForest {
            params,
            dim: points.cols(),
            psi_effective,
            trees,
        })
    }

    /// Assembles a forest from already-built trees, e.g. when loading a
    /// model file.
    pub fn from_parts(
        params: ForestParams,
        dim: usize,
        psi_effective: usize,
        trees: Vec<ITree>,
    ) -> Self {
        IsolationForest {
            params,
            dim,
            psi_effective,
            trees,
        }
    }

    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn psi_effective(&self) -> usize {
        self.psi_effective
    }

    pub fn trees(&self) -> &[ITree] {
        &self.trees
    }

    /// Mean path length `H(x)` over the trees.
    pub fn mean_path_length(&self, x: &[f64]) -> f64 {
        let total: f64 = self.trees.iter().map(|t| t.path_length(x)).sum();
        total / self.trees.len() as f64
    }

    pub fn storage_footprint(&self) -> StorageFootprint {
        StorageFootprint {
            trees: self.trees.len(),
            internal_nodes: self.trees.iter().map(ITree::internal_count).sum(),
            leaves: self.trees.iter().map(|t| t.leaves().count()).sum(),
            node_reals: self.trees.iter().map(ITree::split_storage_len).sum(),
            rotation_reals: 0,
        }
    }
}

impl AnomalyScorer for IsolationForest {
    fn dim(&self) -> usize {
        self.dim
    }

    fn score(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "probe dimension");
        score_from_mean_path(self.mean_path_length(x), self.psi_effective)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::tree::{c_factor, Node, SplitRule};

    pub(crate) fn gaussian_points(seed: u64, n: usize, d: usize) -> Matrix {
        let mut rng = RngStream::new(seed, 99);
        let data = (0..n * d).map(|_| rng.standard_normal()).collect();
        Matrix::from_vec(n, d, data).unwrap()
    }

    #[test]
    fn default_fit_shape() {
        let pts = gaussian_points(0, 2000, 2);
        let f = IsolationForest::fit(&pts, ForestParams::new(100, 256)).unwrap();
        assert_eq!(f.trees().len(), 100);
        assert_eq!(f.psi_effective(), 256);
        for t in f.trees() {
            assert_eq!(t.training_size(), 256);
            assert_eq!(t.depth_limit(), 8);
        }
    }

    #[test]
    fn small_input_clamps_subsample() {
        let pts = gaussian_points(1, 10, 3);
        let f = IsolationForest::fit(&pts, ForestParams::new(20, 256)).unwrap();
        assert!(f.trees().iter().all(|t| t.training_size() == 10));
        assert_eq!(f.psi_effective(), 10);
        // Score denominator uses c(10), so H = c(10) maps to 0.5.
        assert!((score_from_mean_path(c_factor(10), f.psi_effective()) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_single_point() {
        let pts = gaussian_points(1, 1, 3);
        let err = IsolationForest::fit(&pts, ForestParams::default()).unwrap_err();
        assert!(err.to_string().contains("need at least two points"));
    }

    #[test]
    fn same_seed_same_forest() {
        let pts = gaussian_points(2, 500, 4);
        let p = ForestParams::new(30, 64).with_seed(17);
        assert_eq!(
            IsolationForest::fit(&pts, p).unwrap(),
            IsolationForest::fit(&pts, p).unwrap()
        );
        assert_ne!(
            IsolationForest::fit(&pts, p).unwrap(),
            IsolationForest::fit(&pts, p.with_seed(18)).unwrap()
        );
    }

    #[test]
    fn trees_differ_within_a_forest() {
        let pts = gaussian_points(3, 500, 2);
        let f = IsolationForest::fit(&pts, ForestParams::new(10, 64)).unwrap();
        assert_ne!(f.trees()[0], f.trees()[1]);
    }

    #[test]
    fn two_tree_hand_built_score() {
        // Leaves at levels 3 and 5 with single training points.
        let spine = |depth: usize| {
            let mut nodes = Vec::new();
            for k in 0..depth {
                nodes.push(Node::Internal {
                    rule: SplitRule::Axis { dim: 0, value: 0.0 },
                    left: k + 1,
                    right: 2 * depth - k,
                });
            }
            nodes.push(Node::Leaf {
                size: 1,
                level: depth,
            });
            nodes.push(Node::Leaf {
                size: 1,
                level: depth,
            });
            for level in (1..depth).rev() {
                nodes.push(Node::Leaf { size: 1, level });
            }
            ITree::from_nodes(nodes, 8, 1).unwrap()
        };
        let f =
            IsolationForest::from_parts(ForestParams::default(), 1, 256, vec![spine(3), spine(5)]);
        let s = f.score(&[-1.0]);
        assert!((s - 0.7628952638224997).abs() < 5e-4, "{s}");
    }

    #[test]
    fn batch_matches_loop() {
        let pts = gaussian_points(4, 300, 3);
        let f = IsolationForest::fit(&pts, ForestParams::new(25, 128)).unwrap();
        let probes = gaussian_points(5, 50, 3);
        let batch = f.score_batch(&probes).unwrap();
        for (row, b) in probes.row_iter().zip(&batch) {
            assert_eq!(f.score(row).to_bits(), b.to_bits());
        }
        assert!(f.score_batch(&Matrix::zeros(0, 0)).unwrap().is_empty());
        let one = probes.select_rows(&[7]);
        assert_eq!(f.score_batch(&one).unwrap(), vec![f.score(probes.row(7))]);
        assert!(f.score_batch(&Matrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn scores_in_unit_interval_and_far_point_is_anomalous() {
        for seed in 0..10 {
            let mut pts = gaussian_points(100 + seed, 2000, 2);
            pts.push_row(&[10.0, 0.0]);
            let f = IsolationForest::fit(&pts, ForestParams::default().with_seed(seed)).unwrap();
            let scores = f.score_batch(&pts).unwrap();
            assert!(scores.iter().all(|&s| s > 0.0 && s <= 1.0));
            let mut sorted = scores.clone();
            sorted.sort_by(f64::total_cmp);
            let median = sorted[sorted.len() / 2];
            assert!(scores[2000] > median);
        }
    }
}
