//! Benchmark the detectors on labelled CSV files.
//!
//! Pass a directory holding files named after the built-in manifest
//! (`Http.csv`, `Ionosphere.csv`, ...), or `NAME=PATH` pairs. Without
//! arguments a small demo file is written and benchmarked.
//!
//! ```text
//! cargo run --release --example benchmark_csv -- data/
//! cargo run --release --example benchmark_csv -- Http=/path/to/http.csv
//! ```

use std::path::Path;

use rotforest::datagen::Preset;
use rotforest::harness::{run_real_benchmark, BenchmarkConfig, BenchmarkInput, BENCHMARK_DATASETS};
use rotforest::io::{save_csv, write_report, ReportFormat};
use rotforest::RngStream;

fn main() -> rotforest::Result<()> {
    let mut inputs = Vec::new();
    for arg in std::env::args().skip(1) {
        match arg.split_once('=') {
            Some((name, path)) => inputs.push(BenchmarkInput::new(name, path)),
            None => inputs.extend(BenchmarkInput::discover(Path::new(&arg))),
        }
    }
    if inputs.is_empty() {
        let path = std::env::temp_dir().join("rotforest-demo.csv");
        let data = Preset::SkewedGaussians
            .spec()
            .generate(&mut RngStream::new(3, 4))?;
        save_csv(&data, &path)?;
        inputs.push(BenchmarkInput::new("demo", &path));
        println!("no inputs given; benchmarking {}", path.display());
        let known: Vec<&str> = BENCHMARK_DATASETS.iter().map(|m| m.name).collect();
        println!("known dataset names: {}", known.join(", "));
    }

    let report = run_real_benchmark(&BenchmarkConfig::default(), &inputs);
    write_report(&report, ReportFormat::Text, std::io::stdout().lock())
}
