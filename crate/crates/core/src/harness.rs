//! Experiment drivers: heatmap grids, repeated synthetic experiments and the
//! real-dataset benchmark loop.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::datagen::{LabeledDataset, Preset, SyntheticSpec};
use crate::error::{Error, Result};
use crate::forest::{AnomalyScorer, ForestParams};
use crate::io::{load_csv, CsvDataset, CsvSchema, Report};
use crate::matrix::Matrix;
use crate::metrics::{repetition_seed, run_repetitions, EvalReport};
use crate::model::{Algorithm, Model};
use crate::rng::{derive_seed, purpose, RngStream};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Bounds {
    pub const UNIT: Bounds = Bounds {
        xmin: 0.0,
        xmax: 1.0,
        ymin: 0.0,
        ymax: 1.0,
    };

    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Bounds> {
        if !(xmin < xmax && ymin < ymax) || ![xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "bad bounds x [{xmin}, {xmax}], y [{ymin}, {ymax}]"
            )));
        }
        Ok(Bounds {
            xmin,
            xmax,
            ymin,
            ymax,
        })
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds::UNIT
    }
}

/// Parses `xmin,xmax,ymin,ymax`.
impl FromStr for Bounds {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| {
                Error::InvalidParameter(format!("bounds {s:?}: expected xmin,xmax,ymin,ymax"))
            })?;
        match parts[..] {
            [a, b, c, d] => Bounds::new(a, b, c, d),
            _ => Err(Error::InvalidParameter(format!(
                "bounds {s:?}: expected four numbers"
            ))),
        }
    }
}

/// A `rows × cols` lattice of cell centres over `bounds`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub bounds: Bounds,
}

impl GridSpec {
    pub fn new(rows: usize, cols: usize, bounds: Bounds) -> Result<GridSpec> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!("empty grid {rows}x{cols}")));
        }
        Ok(GridSpec { rows, cols, bounds })
    }

    /// 30×30 over the unit square.
    pub fn unit_30() -> GridSpec {
        GridSpec {
            rows: 30,
            cols: 30,
            bounds: Bounds::UNIT,
        }
    }

    /// Parses `NxM` as `N` rows by `M` columns.
    pub fn parse_size(s: &str) -> Result<(usize, usize)> {
        let bad = || Error::InvalidParameter(format!("grid {s:?}: expected NxM"));
        let (n, m) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let n = n.trim().parse().map_err(|_| bad())?;
        let m = m.trim().parse().map_err(|_| bad())?;
        Ok((n, m))
    }

    /// Centre of cell `(row, col)`; row 0 is at `ymin`.
    pub fn cell_center(&self, row: usize, col: usize) -> (f64, f64) {
        let b = &self.bounds;
        let dx = (b.xmax - b.xmin) / self.cols as f64;
        let dy = (b.ymax - b.ymin) / self.rows as f64;
        (
            b.xmin + (col as f64 + 0.5) * dx,
            b.ymin + (row as f64 + 0.5) * dy,
        )
    }

    /// All cell centres, row-major.
    pub fn points(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * self.cols * 2);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let (x, y) = self.cell_center(r, c);
                data.extend([x, y]);
            }
        }
        Matrix::from_vec(self.rows * self.cols, 2, data).expect("finite lattice")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeatmapGrid {
    pub spec: GridSpec,
    /// Row-major scores, `rows × cols`.
    pub values: Vec<f64>,
}

impl HeatmapGrid {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.spec.cols + col]
    }

    /// CSV with columns `row,col,x,y,score`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["row", "col", "x", "y", "score"])?;
        for r in 0..self.spec.rows {
            for c in 0..self.spec.cols {
                let (x, y) = self.spec.cell_center(r, c);
                w.write_record([
                    r.to_string(),
                    c.to_string(),
                    x.to_string(),
                    y.to_string(),
                    self.get(r, c).to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Gray level of a score: 0 is white, 1 is black.
    pub fn gray(score: f64) -> u8 {
        (255.0 * (1.0 - score.clamp(0.0, 1.0))).round() as u8
    }

    /// Binary 8-bit PGM with the highest `y` row at the top of the image.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.spec.cols, self.spec.rows)?;
        let mut line = Vec::with_capacity(self.spec.cols);
        for r in (0..self.spec.rows).rev() {
            line.clear();
            line.extend((0..self.spec.cols).map(|c| Self::gray(self.get(r, c))));
            out.write_all(&line)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Scores every cell centre of `spec` with a 2-D scorer.
pub fn heatmap<S: AnomalyScorer + ?Sized>(scorer: &S, spec: GridSpec) -> Result<HeatmapGrid> {
    if scorer.dim() != 2 {
        return Err(Error::HeatmapDimension(scorer.dim()));
    }
    Ok(HeatmapGrid {
        spec,
        values: scorer.score_batch(&spec.points())?,
    })
}

/// Repeated fit-and-score runs of several algorithms on one synthetic
/// dataset family.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub spec: SyntheticSpec,
    pub algorithms: Vec<Algorithm>,
    /// Forest shape; the seed field is replaced per repetition.
    pub params: ForestParams,
    pub repetitions: usize,
    /// Threshold fraction for binary predictions; `None` uses the data's
    /// own contamination.
    pub contamination: Option<f64>,
    pub master_seed: u64,
    /// Scores this grid with each algorithm's first-repetition model.
    pub heatmap: Option<GridSpec>,
}

impl ExperimentConfig {
    /// All three algorithms, 100 trees of 256, ten repetitions.
    pub fn preset(preset: Preset) -> Self {
        ExperimentConfig {
            name: preset.name().into(),
            spec: preset.spec(),
            algorithms: Algorithm::ALL.to_vec(),
            params: ForestParams::default(),
            repetitions: 10,
            contamination: None,
            master_seed: 0,
            heatmap: None,
        }
    }

    pub fn with_repetitions(mut self, k: usize) -> Self {
        self.repetitions = k;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_algorithms(mut self, algorithms: &[Algorithm]) -> Self {
        self.algorithms = algorithms.to_vec();
        self
    }

    pub fn with_heatmap(mut self, grid: GridSpec) -> Self {
        self.heatmap = Some(grid);
        self
    }
}

/// Dataset drawn for one repetition seed; every algorithm sees the same one.
pub fn repetition_dataset(spec: &SyntheticSpec, seed: u64) -> Result<LabeledDataset> {
    spec.generate(&mut RngStream::new(seed, purpose::DATA))
}

/// Forest parameters for one repetition seed.
pub fn repetition_params(params: ForestParams, seed: u64) -> ForestParams {
    params.with_seed(derive_seed(seed, purpose::FOREST))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgorithmOutcome {
    pub algorithm: Algorithm,
    pub eval: EvalReport,
    pub heatmap: Option<HeatmapGrid>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutcome {
    pub name: String,
    pub results: Vec<AlgorithmOutcome>,
}

impl ExperimentOutcome {
    pub fn get(&self, algorithm: Algorithm) -> Option<&AlgorithmOutcome> {
        self.results.iter().find(|r| r.algorithm == algorithm)
    }

    pub fn avg_auc(&self, algorithm: Algorithm) -> Option<f64> {
        self.get(algorithm).map(|r| r.eval.avg_auc())
    }

    pub fn to_report(&self) -> Report {
        let mut report = Report::default();
        for r in &self.results {
            report.push_eval(&self.name, r.algorithm, &r.eval);
        }
        report
    }
}

/// For each repetition `r`, draws the dataset from the `r`-th derived seed,
/// fits every algorithm on all of it and computes AUC against the planted
/// labels.
pub fn run_synthetic_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    if config.repetitions == 0 {
        return Err(Error::InvalidParameter(
            "need at least one repetition".into(),
        ));
    }
    config.spec.validate()?;
    // Labels depend only on the spec, not on the seed.
    let first_seed = repetition_seed(config.master_seed, 0);
    let first = repetition_dataset(&config.spec, first_seed)?;
    let labels = first.labels.clone();
    let contamination = config
        .contamination
        .unwrap_or_else(|| first.contamination());

    let mut results = Vec::with_capacity(config.algorithms.len());
    for &algorithm in &config.algorithms {
        let eval = run_repetitions(
            |seed| {
                let data = repetition_dataset(&config.spec, seed)?;
                let model = Model::fit(
                    algorithm,
                    &data.points,
                    repetition_params(config.params, seed),
                )?;
                model.score_batch(&data.points)
            },
            &labels,
            config.repetitions,
            config.master_seed,
            contamination,
        )?;
        let heatmap = match config.heatmap {
            Some(grid) => {
                let model = Model::fit(
                    algorithm,
                    &first.points,
                    repetition_params(config.params, first_seed),
                )?;
                Some(heatmap(&model, grid)?)
            }
            None => None,
        };
        results.push(AlgorithmOutcome {
            algorithm,
            eval,
            heatmap,
        });
    }
    Ok(ExperimentOutcome {
        name: config.name.clone(),
        results,
    })
}

/// Presets with planted anomalies, in report order.
pub const SYNTHETIC_SUITE: [Preset; 7] = [
    Preset::OneGaussianCorners,
    Preset::OneGaussianCardinal,
    Preset::TwoGaussians,
    Preset::TwoGaussiansCenter,
    Preset::SkewedGaussians,
    Preset::Sinusoid,
    Preset::SwissRoll,
];

/// Runs every suite preset with the given shape and seed and collects one
/// report.
pub fn run_synthetic_suite(
    params: ForestParams,
    repetitions: usize,
    master_seed: u64,
) -> Result<Report> {
    let mut report = Report::default();
    for preset in SYNTHETIC_SUITE {
        let config = ExperimentConfig {
            params,
            repetitions,
            master_seed,
            ..ExperimentConfig::preset(preset)
        };
        report.merge(run_synthetic_experiment(&config)?.to_report());
    }
    Ok(report)
}

/// Expected shape and label mapping of a benchmark dataset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetManifest {
    pub name: &'static str,
    pub size: usize,
    pub dim: usize,
    pub anomalies: usize,
    pub normal_label: &'static str,
    pub anomaly_label: &'static str,
}

impl DatasetManifest {
    pub fn contamination(&self) -> f64 {
        self.anomalies as f64 / self.size as f64
    }

    /// Label column is the last one.
    pub fn schema(&self) -> CsvSchema {
        CsvSchema::new(self.normal_label, self.anomaly_label)
    }

    /// Mismatches against the expected shape, as human-readable warnings.
    pub fn check(&self, data: &LabeledDataset) -> Vec<String> {
        let mut warnings = Vec::new();
        let mut cmp = |what: &str, expected: usize, found: usize| {
            if expected != found {
                warnings.push(format!(
                    "{}: expected {expected} {what}, found {found}",
                    self.name
                ));
            }
        };
        cmp("rows", self.size, data.len());
        cmp("features", self.dim, data.dim());
        cmp("anomalies", self.anomalies, data.anomaly_count());
        warnings
    }
}

const fn entry(
    name: &'static str,
    size: usize,
    dim: usize,
    anomalies: usize,
    normal_label: &'static str,
    anomaly_label: &'static str,
) -> DatasetManifest {
    DatasetManifest {
        name,
        size,
        dim,
        anomalies,
        normal_label,
        anomaly_label,
    }
}

/// Low-dimensional benchmark datasets.
pub const BENCHMARK_DATASETS: [DatasetManifest; 9] = [
    entry("Ionosphere", 351, 33, 126, "g", "B"),
    entry("Http", 567467, 3, 2213, "0", "1"),
    entry("Satellite", 6435, 36, 2059, "Normal", "Anomaly"),
    entry("Shuttle", 57990, 9, 3501, "0", "1"),
    entry("Smtp", 96554, 38, 1183, "0", "1"),
    entry("Cardio", 1831, 21, 190, "0", "1"),
    entry("ForestCover", 286047, 11, 2747, "2", "4"),
    entry("Mammography", 11183, 6, 259, "-1", "1"),
    entry("Pima", 1832, 21, 641, "0", "1"),
];

/// High-dimensional benchmark datasets.
pub const HIGH_DIM_DATASETS: [DatasetManifest; 9] = [
    entry("backdoor", 95329, 196, 2330, "0", "1"),
    entry("census", 299285, 500, 18569, "0", "1"),
    entry("madelon", 2600, 501, 1301, "0", "1"),
    entry("musk", 6598, 168, 1018, "1", "0"),
    entry("scene", 2407, 300, 432, "1", "0"),
    entry("Arrhythmia", 420, 271, 208, "1", "0"),
    entry("SpamBase", 4601, 58, 1814, "0", "1"),
    entry("DDos", 66237, 79, 31285, "DDoS", "BENIGN"),
    entry("Oil-Spill", 937, 50, 42, "-1", "1"),
];

/// Case-insensitive manifest lookup.
pub fn manifest(name: &str) -> Option<&'static DatasetManifest> {
    BENCHMARK_DATASETS
        .iter()
        .chain(HIGH_DIM_DATASETS.iter())
        .find(|m| m.name.eq_ignore_ascii_case(name))
}

/// A dataset file to benchmark, with its manifest when known.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkInput {
    pub name: String,
    pub path: PathBuf,
    pub schema: CsvSchema,
    pub manifest: Option<&'static DatasetManifest>,
}

impl BenchmarkInput {
    /// Looks `name` up in the manifest; unknown names use the default
    /// `0`/`1` schema and skip shape checks.
    pub fn new(name: &str, path: impl Into<PathBuf>) -> Self {
        let manifest = manifest(name);
        BenchmarkInput {
            name: manifest.map_or(name, |m| m.name).to_string(),
            path: path.into(),
            schema: manifest.map(DatasetManifest::schema).unwrap_or_default(),
            manifest,
        }
    }

    /// Manifest datasets present in `dir` as `<name>.csv`, trying the exact
    /// and lower-case names.
    pub fn discover(dir: &Path) -> Vec<BenchmarkInput> {
        BENCHMARK_DATASETS
            .iter()
            .chain(HIGH_DIM_DATASETS.iter())
            .filter_map(|m| {
                [m.name.to_string(), m.name.to_ascii_lowercase()]
                    .into_iter()
                    .map(|n| dir.join(format!("{n}.csv")))
                    .find(|p| p.is_file())
                    .map(|p| BenchmarkInput::new(m.name, p))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkConfig {
    pub algorithms: Vec<Algorithm>,
    pub params: ForestParams,
    pub repetitions: usize,
    /// `None` uses each dataset's own contamination.
    pub contamination: Option<f64>,
    pub master_seed: u64,
}

impl Default for BenchmarkConfig {
    /// 100 trees of 256, five repetitions, all three algorithms.
    fn default() -> Self {
        BenchmarkConfig {
            algorithms: Algorithm::ALL.to_vec(),
            params: ForestParams::default(),
            repetitions: 5,
            contamination: None,
            master_seed: 0,
        }
    }
}

/// Evaluates every algorithm on one loaded dataset.
pub fn evaluate_dataset(
    config: &BenchmarkConfig,
    name: &str,
    data: &LabeledDataset,
) -> Result<Report> {
    let contamination = config.contamination.unwrap_or_else(|| data.contamination());
    let mut report = Report::default();
    for &algorithm in &config.algorithms {
        let eval = run_repetitions(
            |seed| {
                let model = Model::fit(
                    algorithm,
                    &data.points,
                    repetition_params(config.params, seed),
                )?;
                model.score_batch(&data.points)
            },
            &data.labels,
            config.repetitions,
            config.master_seed,
            contamination,
        )?;
        report.push_eval(name, algorithm, &eval);
    }
    Ok(report)
}

/// Runs the benchmark over each input in order. Load failures and shape
/// mismatches become report notes; the loop carries on.
pub fn run_real_benchmark(config: &BenchmarkConfig, inputs: &[BenchmarkInput]) -> Report {
    let mut report = Report::default();
    for input in inputs {
        let loaded: Result<CsvDataset> = load_csv(&input.path, &input.schema);
        let data = match loaded {
            Ok(d) => d.data,
            Err(e) => {
                report.notes.push(format!(
                    "{}: skipped {}: {e}",
                    input.name,
                    input.path.display()
                ));
                continue;
            }
        };
        if let Some(m) = input.manifest {
            report
                .notes
                .extend(m.check(&data).into_iter().map(|w| format!("warning: {w}")));
        }
        match evaluate_dataset(config, &input.name, &data) {
            Ok(r) => report.merge(r),
            Err(e) => report.notes.push(format!("{}: failed: {e}", input.name)),
        }
    }
    report
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = &self.bounds;
        write!(
            f,
            "{}x{} over [{}, {}] x [{}, {}]",
            self.rows, self.cols, b.xmin, b.xmax, b.ymin, b.ymax
        )
    }
}
