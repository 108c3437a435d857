//! Runs every synthetic preset through all three detectors and prints the
//! average and best AUC over repeated draws.
//!
//! ```text
//! cargo run --release --example synthetic_suite -- [repetitions] [seed]
//! ```

use std::time::Instant;

use rotforest::harness::{run_synthetic_experiment, ExperimentConfig, SYNTHETIC_SUITE};
use rotforest::io::{write_report, ReportFormat};
use rotforest::Algorithm;

fn main() -> rotforest::Result<()> {
    let mut args = std::env::args().skip(1);
    let repetitions = args.next().map_or(10, |a| a.parse().expect("repetitions"));
    let seed = args.next().map_or(0, |a| a.parse().expect("seed"));

    let mut report = rotforest::io::Report::default();
    for preset in SYNTHETIC_SUITE {
        let started = Instant::now();
        let config = ExperimentConfig::preset(preset)
            .with_repetitions(repetitions)
            .with_seed(seed);
        let outcome = run_synthetic_experiment(&config)?;
        let summary: Vec<String> = Algorithm::ALL
            .iter()
            .map(|a| format!("{a} {:.3}", outcome.avg_auc(*a).unwrap()))
            .collect();
        eprintln!(
            "{preset:<22} {}  ({:.1?})",
            summary.join("  "),
            started.elapsed()
        );
        report.merge(outcome.to_report());
    }
    write_report(&report, ReportFormat::Text, std::io::stdout().lock())
}
