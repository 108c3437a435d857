//! Fit an Isolation Forest on a Gaussian cloud and rank a few probes.

use rotforest::{AnomalyScorer, ForestParams, IsolationForest, Matrix, RngStream};

fn main() -> rotforest::Result<()> {
    let mut rng = RngStream::new(7, 0);
    let data: Vec<f64> = (0..2000 * 2).map(|_| rng.standard_normal()).collect();
    let points = Matrix::from_vec(2000, 2, data)?;

    let forest = IsolationForest::fit(&points, ForestParams::new(100, 256).with_seed(1))?;
    println!(
        "{} trees, subsample {}, depth limit {}",
        forest.trees().len(),
        forest.psi_effective(),
        forest.params().depth_limit
    );

    for probe in [[0.0, 0.0], [1.5, -1.0], [3.0, 3.0], [6.0, 6.0]] {
        println!(
            "{probe:?}: mean path {:.3}, score {:.4}",
            forest.mean_path_length(&probe),
            forest.score(&probe)
        );
    }
    Ok(())
}
