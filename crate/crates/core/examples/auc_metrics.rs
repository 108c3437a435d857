//! AUC, contamination thresholds, and repeated evaluation.

use rotforest::metrics::{
    auc, label_by_contamination, precision_recall, predicted_auc, run_repetitions,
};
use rotforest::{AnomalyScorer, ForestParams, Matrix, RngStream, RotatedForest};

fn main() -> rotforest::Result<()> {
    let scores = [0.9, 0.8, 0.8, 0.4, 0.3, 0.8];
    let labels = [true, false, true, false, false, false];
    println!("auc with ties: {:.4}", auc(&scores, &labels)?);

    let predicted = label_by_contamination(&scores, 2.0 / 6.0);
    let (precision, recall) = precision_recall(&predicted, &labels);
    println!(
        "top third flagged {predicted:?}: precision {precision:.2}, recall {recall:.2}, \
         thresholded auc {:.4}",
        predicted_auc(&predicted, &labels)?
    );

    // A cloud with five planted outliers, scored five times with derived seeds.
    let mut rng = RngStream::new(9, 0);
    let mut points = Matrix::zeros(0, 2);
    let mut truth = Vec::new();
    for i in 0..1005 {
        let outlier = i >= 1000;
        let spread = if outlier { 6.0 } else { 1.0 };
        points.push_row(&[
            rng.standard_normal() * spread,
            rng.standard_normal() * spread,
        ]);
        truth.push(outlier);
    }
    let report = run_repetitions(
        |seed| {
            let forest = RotatedForest::fit(&points, ForestParams::default().with_seed(seed))?;
            forest.score_batch(&points)
        },
        &truth,
        5,
        0,
        5.0 / 1005.0,
    )?;
    for run in &report.runs {
        println!(
            "repetition {} (seed {:x}): auc {:.4}, precision {:.2}",
            run.repetition, run.seed, run.auc, run.precision
        );
    }
    println!(
        "average {:.4}, best {:.4}",
        report.avg_auc(),
        report.max_auc()
    );
    Ok(())
}
