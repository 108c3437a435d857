//! Extended Isolation Forest: every node splits on a random hyperplane.
//!
//! The normal is uniform on the unit sphere and the intercept is drawn
//! component-wise, uniformly over the bounding box of the points at the
//! node. A point goes left when `(x − p)·n < 0`.

use crate::error::Result;
use crate::forest::{
    build_parallel, check_fit, score_from_mean_path, subsample, AnomalyScorer, ForestParams,
    StorageFootprint,
};
use crate::matrix::Matrix;
use crate::rng::{purpose, RngStream};
use crate::tree::{column_range, ITree, SplitRule, Splitter};

/// How hyperplane normals are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NormalSampling {
    /// Uniform on the unit sphere (fully extended).
    #[default]
    Sphere,
    /// A uniformly chosen coordinate axis `e_j`; reduces EIF to axis splits.
    CoordinateAxes,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct HyperplaneSplitter {
    pub normals: NormalSampling,
}

impl HyperplaneSplitter {
    pub const RETRIES: usize = 8;
}

/// Draws one hyperplane for the node holding `idx`, without checking that
/// it separates anything.
pub fn draw_hyperplane(
    rng: &mut RngStream,
    points: &Matrix,
    idx: &[usize],
    normals: NormalSampling,
) -> SplitRule {
    let d = points.cols();
    let normal = match normals {
        NormalSampling::Sphere => rng.unit_sphere_vector(d),
        NormalSampling::CoordinateAxes => {
            let mut e = vec![0.0; d];
            e[rng.index(d)] = 1.0;
            e
        }
    };
    let intercept = (0..d)
        .map(|j| {
            let (lo, hi) = column_range(points, idx, j);
            rng.uniform(lo, hi)
        })
        .collect();
    SplitRule::Hyperplane { normal, intercept }
}

impl Splitter for HyperplaneSplitter {
    fn draw(&self, points: &Matrix, idx: &[usize], rng: &mut RngStream) -> Option<SplitRule> {
        for _ in 0..Self::RETRIES {
            let rule = draw_hyperplane(rng, points, idx, self.normals);
            let left = idx
                .iter()
                .filter(|&&i| rule.goes_left(points.row(i)))
                .count();
            if left > 0 && left < idx.len() {
                return Some(rule);
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedForest {
    params: ForestParams,
    dim: usize,
    psi_effective: usize,
    trees: Vec<ITree>,
}

impl ExtendedForest {
    pub fn fit(points: &Matrix, params: ForestParams) -> Result<Self> {
        Self::fit_with(points, params, NormalSampling::Sphere)
    }

    pub fn fit_with(
        points: &Matrix,
        params: ForestParams,
        normals: NormalSampling,
    ) -> Result<Self> {
        let psi_effective = check_fit(points, &params)?;
        let splitter = HyperplaneSplitter { normals };
        let trees = build_parallel(params.trees, |i| {
            let rng = params.tree_stream(i);
            let sample = subsample(points, psi_effective, &rng)?;
            ITree::build(
                &sample,
                params.depth_limit,
                &splitter,
                &mut rng.derive(purpose::SPLITS),
            )
        })?;
        Ok(ExtendedForest {
            params,
            dim: points.cols(),
            psi_effective,
            trees,
        })
    }

    pub fn from_parts(
        params: ForestParams,
        dim: usize,
        psi_effective: usize,
        trees: Vec<ITree>,
    ) -> Self {
        ExtendedForest {
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

    pub fn mean_path_length(&self, x: &[f64]) -> f64 {
        let total: f64 = self.trees.iter().map(|t| t.path_length(x)).sum();
        total / self.trees.len() as f64
    }

    /// Each internal node stores `2d` reals (normal and intercept).
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

impl AnomalyScorer for ExtendedForest {
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
    use crate::iforest::IsolationForest;
    use crate::tree::Node;

    fn uniform_points(seed: u64, n: usize, d: usize) -> Matrix {
        let mut rng = RngStream::new(seed, 77);
        let data = (0..n * d).map(|_| rng.uniform(0.0, 1.0)).collect();
        Matrix::from_vec(n, d, data).unwrap()
    }

    #[test]
    fn one_dimensional_hyperplanes_are_axis_splits() {
        let pts = uniform_points(0, 20, 1);
        let idx: Vec<usize> = (0..20).collect();
        let mut rng = RngStream::new(1, 0);
        for _ in 0..50 {
            let rule = draw_hyperplane(&mut rng, &pts, &idx, NormalSampling::Sphere);
            let SplitRule::Hyperplane { normal, intercept } = &rule else {
                panic!()
            };
            assert!(normal[0] == 1.0 || normal[0] == -1.0);
            let p = intercept[0];
            for row in pts.row_iter() {
                let below = row[0] < p;
                assert_eq!(
                    rule.goes_left(row),
                    if normal[0] > 0.0 { below } else { row[0] > p }
                );
            }
        }
    }

    #[test]
    fn intercept_stays_in_node_box() {
        let pts = uniform_points(2, 40, 2);
        let idx: Vec<usize> = (0..40).collect();
        let mut rng = RngStream::new(3, 0);
        for _ in 0..100 {
            let SplitRule::Hyperplane { normal, intercept } =
                draw_hyperplane(&mut rng, &pts, &idx, NormalSampling::Sphere)
            else {
                panic!()
            };
            assert!((normal.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs() < 1e-12);
            assert!(intercept.iter().all(|p| (0.0..1.0).contains(p)));
        }
    }

    #[test]
    fn two_distinct_points_get_separated() {
        let pts = Matrix::from_rows(&[[0.3, 0.3], [0.31, 0.35]]).unwrap();
        let idx = [0, 1];
        let mut rng = RngStream::new(4, 0);
        let separated = (0..100).any(|_| {
            let rule = draw_hyperplane(&mut rng, &pts, &idx, NormalSampling::Sphere);
            rule.goes_left(pts.row(0)) != rule.goes_left(pts.row(1))
        });
        assert!(separated);
        let rule = HyperplaneSplitter::default().draw(&pts, &idx, &mut rng);
        assert!(rule.is_some());
    }

    /// Every internal node's intercept lies inside the box of the training
    /// points that reached the node.
    #[test]
    fn fitted_intercepts_lie_in_node_boxes() {
        let pts = uniform_points(5, 256, 3);
        let tree = ITree::build(
            &pts,
            8,
            &HyperplaneSplitter::default(),
            &mut RngStream::new(6, 0),
        )
        .unwrap();
        let mut reached: Vec<Vec<usize>> = vec![Vec::new(); tree.nodes().len()];
        for (i, row) in pts.row_iter().enumerate() {
            let mut at = 0;
            loop {
                reached[at].push(i);
                match &tree.nodes()[at] {
                    Node::Leaf { .. } => break,
                    Node::Internal { rule, left, right } => {
                        at = if rule.goes_left(row) { *left } else { *right }
                    }
                }
            }
        }
        for (node, idx) in tree.nodes().iter().zip(&reached) {
            if let Node::Internal {
                rule: SplitRule::Hyperplane { intercept, .. },
                ..
            } = node
            {
                for (j, p) in intercept.iter().enumerate() {
                    let (lo, hi) = column_range(&pts, idx, j);
                    assert!(lo <= *p && *p <= hi);
                }
            }
        }
    }

    #[test]
    fn storage_is_2d_per_node_and_deterministic() {
        let pts = uniform_points(7, 500, 4);
        let p = ForestParams::new(20, 128).with_seed(5);
        let f = ExtendedForest::fit(&pts, p).unwrap();
        let fp = f.storage_footprint();
        assert_eq!(fp.node_reals, 2 * 4 * fp.internal_nodes);
        assert_eq!(f, ExtendedForest::fit(&pts, p).unwrap());
    }

    #[test]
    fn depth_invariant_on_two_clusters() {
        let mut rng = RngStream::new(8, 0);
        let mut rows = Vec::new();
        for i in 0..2000 {
            let c = if i % 2 == 0 { [0.8, 0.2] } else { [0.2, 0.8] };
            rows.push([
                c[0] + 0.06 * rng.standard_normal(),
                c[1] + 0.06 * rng.standard_normal(),
            ]);
        }
        let pts = Matrix::from_rows(&rows).unwrap();
        let f = ExtendedForest::fit(&pts, ForestParams::default()).unwrap();
        assert!(f.trees().iter().all(|t| t.leaves().all(|(_, l)| l <= 8)));
    }

    /// Replacing every axis split by the hyperplane with normal `e_j` and
    /// intercept `value` on dimension `j` leaves all scores unchanged.
    #[test]
    fn axis_aligned_hyperplanes_reproduce_iforest_scores() {
        let pts = uniform_points(9, 400, 3);
        let iso = IsolationForest::fit(&pts, ForestParams::new(30, 128)).unwrap();
        let converted: Vec<ITree> = iso
            .trees()
            .iter()
            .map(|t| {
                let nodes = t
                    .nodes()
                    .iter()
                    .map(|n| match n {
                        Node::Internal {
                            rule: SplitRule::Axis { dim, value },
                            left,
                            right,
                        } => {
                            let mut normal = vec![0.0; 3];
                            normal[*dim] = 1.0;
                            let mut intercept = vec![0.5; 3];
                            intercept[*dim] = *value;
                            Node::Internal {
                                rule: SplitRule::Hyperplane { normal, intercept },
                                left: *left,
                                right: *right,
                            }
                        }
                        other => other.clone(),
                    })
                    .collect();
                ITree::from_nodes(nodes, t.depth_limit(), 3).unwrap()
            })
            .collect();
        let eif = ExtendedForest::from_parts(*iso.params(), 3, iso.psi_effective(), converted);
        let probes = uniform_points(10, 300, 3);
        for row in probes.row_iter() {
            assert_eq!(iso.score(row).to_bits(), eif.score(row).to_bits());
        }
    }

    #[test]
    fn batch_matches_loop_and_fixed_point() {
        let pts = uniform_points(11, 300, 2);
        let f = ExtendedForest::fit(&pts, ForestParams::new(10, 64)).unwrap();
        let batch = f.score_batch(&pts).unwrap();
        for (row, b) in pts.row_iter().zip(&batch) {
            assert_eq!(f.score(row), *b);
        }
        assert!(
            (score_from_mean_path(crate::tree::c_factor(64), f.psi_effective()) - 0.5).abs()
                < 1e-15
        );
    }
}
