//! ROC-AUC, contamination thresholds and repeated-run statistics.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::derive_seed;

/// Area under the ROC curve, computed as the Mann–Whitney statistic
/// `(concordant + ½·tied) / (n₁·n₀)` over (anomaly, normal) pairs.
///
/// `labels[i]` is `true` for an anomaly. The statistic is accumulated in
/// integer half-units, so the result is exactly the pairwise-count ratio.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidParameter("NaN score".into()));
    }
    let positives = labels.iter().filter(|&&l| l).count() as u128;
    let negatives = labels.len() as u128 - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClassLabels);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Sum over positives of twice their mid-rank.
    let mut twice_rank_sum: u128 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // Ranks start+1..=end share the mid-rank (start + 1 + end) / 2.
        let twice_mid = (start + 1 + end) as u128;
        let pos_in_group = order[start..end].iter().filter(|&&i| labels[i]).count() as u128;
        twice_rank_sum += twice_mid * pos_in_group;
        start = end;
    }
    let twice_u = twice_rank_sum - positives * (positives + 1);
    Ok(twice_u as f64 / (2 * positives * negatives) as f64)
}

/// Marks the `round(c′·n)` highest-scoring entries as anomalies. Ties at the
/// cutoff go to the lower index. Rounding is half away from zero.
pub fn label_by_contamination(scores: &[f64], contamination: f64) -> Vec<bool> {
    assert!(
        (0.0..=1.0).contains(&contamination),
        "contamination {contamination} outside [0, 1]"
    );
    let count = (contamination * scores.len() as f64).round() as usize;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut predicted = vec![false; scores.len()];
    for &i in order.iter().take(count) {
        predicted[i] = true;
    }
    predicted
}

/// Precision and recall of `predicted` against `truth`; an empty
/// denominator gives 0.
pub fn precision_recall(predicted: &[bool], truth: &[bool]) -> (f64, f64) {
    let tp = predicted
        .iter()
        .zip(truth)
        .filter(|(p, t)| **p && **t)
        .count() as f64;
    let pp = predicted.iter().filter(|&&p| p).count() as f64;
    let ap = truth.iter().filter(|&&t| t).count() as f64;
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    (ratio(tp, pp), ratio(tp, ap))
}

/// AUC of a hard labelling: the rank statistic of 0/1 scores, which is
/// `(TPR + 1 − FPR) / 2`.
pub fn predicted_auc(predicted: &[bool], truth: &[bool]) -> Result<f64> {
    let scores: Vec<f64> = predicted
        .iter()
        .map(|&p| if p { 1.0 } else { 0.0 })
        .collect();
    auc(&scores, truth)
}

/// Fraction of `true` labels.
pub fn contamination(labels: &[bool]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    labels.iter().filter(|&&l| l).count() as f64 / labels.len() as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub repetition: usize,
    pub seed: u64,
    pub auc: f64,
    pub precision: f64,
    pub recall: f64,
    /// AUC of the binary predictions, `(TPR + 1 − FPR) / 2`.
    pub predicted_auc: f64,
    pub predicted: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunFailure {
    pub repetition: usize,
    pub seed: u64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    /// Ground-truth anomaly fraction `n₁/n`.
    pub contamination_data: f64,
    /// Threshold fraction `c′` used for the binary predictions.
    pub contamination_algo: f64,
    pub runs: Vec<RunResult>,
    pub failures: Vec<RunFailure>,
}

impl EvalReport {
    pub fn aucs(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.auc).collect()
    }

    pub fn avg_auc(&self) -> f64 {
        self.runs.iter().map(|r| r.auc).sum::<f64>() / self.runs.len() as f64
    }

    pub fn avg_predicted_auc(&self) -> f64 {
        self.runs.iter().map(|r| r.predicted_auc).sum::<f64>() / self.runs.len() as f64
    }

    pub fn max_auc(&self) -> f64 {
        self.runs
            .iter()
            .map(|r| r.auc)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Seed used for repetition `r` under `master_seed`.
pub fn repetition_seed(master_seed: u64, r: usize) -> u64 {
    derive_seed(master_seed, r as u64)
}

/// Runs a scoring pipeline `k` times with derived seeds and evaluates each
/// run against `labels`.
///
/// A failed run is recorded and skipped; the call fails only when every run
/// fails. Single-class labels are rejected up front.
pub fn run_repetitions<F>(
    pipeline: F,
    labels: &[bool],
    k: usize,
    master_seed: u64,
    contamination_algo: f64,
) -> Result<EvalReport>
where
    F: Fn(u64) -> Result<Vec<f64>> + Sync,
{
    if k == 0 {
        return Err(Error::InvalidParameter(
            "need at least one repetition".into(),
        ));
    }
    if !(0.0..=1.0).contains(&contamination_algo) {
        return Err(Error::InvalidParameter(format!(
            "contamination {contamination_algo} outside [0, 1]"
        )));
    }
    let data_contamination = contamination(labels);
    if data_contamination == 0.0 || data_contamination == 1.0 {
        return Err(Error::SingleClassLabels);
    }
    let outcomes: Vec<(usize, u64, Result<RunResult>)> = (0..k)
        .into_par_iter()
        .map(|r| {
            let seed = repetition_seed(master_seed, r);
            let run = pipeline(seed).and_then(|scores| {
                let auc = auc(&scores, labels)?;
                let predicted = label_by_contamination(&scores, contamination_algo);
                let (precision, recall) = precision_recall(&predicted, labels);
                Ok(RunResult {
                    repetition: r,
                    seed,
                    auc,
                    precision,
                    recall,
                    predicted_auc: predicted_auc(&predicted, labels)?,
                    predicted,
                })
            });
            (r, seed, run)
        })
        .collect();

    let mut report = EvalReport {
        contamination_data: data_contamination,
        contamination_algo,
        runs: Vec::new(),
        failures: Vec::new(),
    };
    let mut first_error = None;
    for (repetition, seed, outcome) in outcomes {
        match outcome {
            Ok(run) => report.runs.push(run),
            Err(e) => {
                report.failures.push(RunFailure {
                    repetition,
                    seed,
                    message: e.to_string(),
                });
                first_error.get_or_insert(e);
            }
        }
    }
    if report.runs.is_empty() {
        return Err(Error::AllRepetitionsFailed(
            k,
            Box::new(first_error.expect("k >= 1")),
        ));
    }
    Ok(report)
}
