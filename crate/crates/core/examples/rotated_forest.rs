//! Rotated Isolation Forest: one Haar-random rotation per tree.

use rotforest::rif::RotationSampling;
use rotforest::{AnomalyScorer, ForestParams, IsolationForest, Matrix, RngStream, RotatedForest};

fn main() -> rotforest::Result<()> {
    let mut rng = RngStream::new(5, 0);
    let data: Vec<f64> = (0..1000 * 3).map(|_| rng.standard_normal()).collect();
    let points = Matrix::from_vec(1000, 3, data)?;
    let params = ForestParams::new(100, 256).with_seed(2);

    let rif = RotatedForest::fit(&points, params)?;
    let probe = [2.5, -2.5, 0.0];
    println!("rif score of {probe:?}: {:.4}", rif.score(&probe));

    // Each tree sees the probe in its own frame.
    let paths = rif.tree_path_lengths(&probe);
    println!("first five per-tree path lengths: {:.2?}", &paths[..5]);

    let storage = rif.storage_footprint();
    println!(
        "{} trees: {} split reals, {} rotation reals (t * d^2)",
        storage.trees, storage.node_reals, storage.rotation_reals
    );

    // With identity rotations the forest is the Isolation Forest.
    let identity = RotatedForest::fit_with(&points, params, RotationSampling::Identity)?;
    let iforest = IsolationForest::fit(&points, params)?;
    println!(
        "identity rotations: {:.6} vs isolation forest {:.6}",
        identity.score(&probe),
        iforest.score(&probe)
    );
    Ok(())
}
