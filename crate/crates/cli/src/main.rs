use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rotforest::datagen::Preset;
use rotforest::harness::{
    heatmap, repetition_dataset, run_real_benchmark, run_synthetic_experiment, BenchmarkConfig,
    BenchmarkInput, Bounds, ExperimentConfig, GridSpec,
};
use rotforest::io::{
    emit_report, load_csv, load_model, load_points, save_csv, save_model, write_report,
    write_scores, CsvSchema, Report, ReportFormat,
};
use rotforest::metrics::{auc, label_by_contamination};
use rotforest::rng::derive_seed;
use rotforest::{Algorithm, AnomalyScorer, ForestParams, Model};

#[derive(Parser)]
#[command(
    name = "rotforest",
    version,
    about = "Isolation, extended and rotated isolation forests"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset as CSV
    Synth(SynthArgs),
    /// Fit a model on a labelled or unlabelled CSV file
    Fit(FitArgs),
    /// Score a CSV file with a saved model
    Score(ScoreArgs),
    /// Repeated fit-and-score evaluation on one dataset
    Eval(EvalArgs),
    /// Score a 2-D grid and write CSV and optional PGM
    Heatmap(HeatmapArgs),
    /// Benchmark loop over real datasets
    Bench(BenchArgs),
}

#[derive(Args, Clone, Copy)]
struct ForestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trees: usize,
    #[arg(long, default_value_t = 256)]
    psi: usize,
    /// Defaults to ceil(log2 psi)
    #[arg(long)]
    depth_limit: Option<usize>,
}

impl ForestArgs {
    fn params(&self) -> ForestParams {
        let p = ForestParams::new(self.trees, self.psi).with_seed(self.seed);
        match self.depth_limit {
            Some(d) => p.with_depth_limit(d),
            None => p,
        }
    }
}

#[derive(Args, Clone)]
struct SchemaArgs {
    /// Label column name; defaults to the last column
    #[arg(long)]
    label_column: Option<String>,
    #[arg(long, default_value = "0")]
    normal: String,
    #[arg(long, default_value = "1")]
    anomaly: String,
}

impl SchemaArgs {
    fn schema(&self) -> CsvSchema {
        let s = CsvSchema::new(&self.normal, &self.anomaly);
        match &self.label_column {
            Some(c) => s.with_label_column(c),
            None => s,
        }
    }
}

#[derive(Args)]
struct SynthArgs {
    /// Preset name, e.g. one_gaussian, two_gaussians, skewed_gaussians, sinusoid, swiss_roll
    #[arg(long)]
    kind: Preset,
    /// Number of normal points (defaults to the preset's)
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "rif")]
    algo: Algorithm,
    #[command(flatten)]
    forest: ForestArgs,
    #[command(flatten)]
    schema: SchemaArgs,
    /// Treat every column as a feature
    #[arg(long)]
    unlabeled: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Fraction of points to flag; omitted means no `predicted` column
    #[arg(long)]
    contamination: Option<f64>,
    #[command(flatten)]
    schema: SchemaArgs,
    /// Score every column; no labels, no AUC
    #[arg(long)]
    unlabeled: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Labelled CSV file
    #[arg(long, conflicts_with = "kind", required_unless_present = "kind")]
    data: Option<PathBuf>,
    /// Synthetic preset instead of a file
    #[arg(long)]
    kind: Option<Preset>,
    /// iforest, eif, rif, a comma-separated list, or all
    #[arg(long, default_value = "all")]
    algo: String,
    #[command(flatten)]
    forest: ForestArgs,
    #[arg(long, default_value_t = 5)]
    repetitions: usize,
    /// Threshold fraction; defaults to the data's anomaly fraction
    #[arg(long)]
    contamination: Option<f64>,
    #[command(flatten)]
    schema: SchemaArgs,
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
    /// Report file; the text table goes to stdout either way
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HeatmapArgs {
    /// Saved 2-D model
    #[arg(long, conflicts_with_all = ["data", "kind"])]
    model: Option<PathBuf>,
    /// Fit on this CSV file instead
    #[arg(long, conflicts_with = "kind")]
    data: Option<PathBuf>,
    /// Or fit on a synthetic preset
    #[arg(long)]
    kind: Option<Preset>,
    #[arg(long, default_value = "rif")]
    algo: Algorithm,
    #[command(flatten)]
    forest: ForestArgs,
    #[command(flatten)]
    schema: SchemaArgs,
    /// Rows x columns
    #[arg(long, default_value = "30x30")]
    grid: String,
    /// xmin,xmax,ymin,ymax
    #[arg(long, default_value = "0,1,0,1")]
    bounds: Bounds,
    /// CSV with row,col,x,y,score
    #[arg(long)]
    out: PathBuf,
    /// Also write an 8-bit grayscale PGM
    #[arg(long)]
    pgm: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory searched for <Name>.csv per the built-in manifest
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Extra NAME=PATH inputs; known names use the manifest's labels
    #[arg(long = "dataset")]
    datasets: Vec<String>,
    #[arg(long, default_value = "all")]
    algo: String,
    #[command(flatten)]
    forest: ForestArgs,
    #[arg(long, default_value_t = 5)]
    repetitions: usize,
    #[arg(long)]
    contamination: Option<f64>,
    /// Report CSV; a text table is written next to it with a .txt extension
    #[arg(long)]
    out: PathBuf,
}

fn parse_algorithms(s: &str) -> Result<Vec<Algorithm>> {
    if s == "all" {
        return Ok(Algorithm::ALL.to_vec());
    }
    s.split(',')
        .map(|a| a.trim().parse::<Algorithm>().map_err(Into::into))
        .collect()
}

fn check_contamination(c: Option<f64>) -> Result<()> {
    if let Some(c) = c {
        if !(0.0..=1.0).contains(&c) {
            bail!("--contamination must be in [0, 1], got {c}");
        }
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn load_features(data: &Path, schema: &SchemaArgs, unlabeled: bool) -> Result<rotforest::Matrix> {
    Ok(if unlabeled {
        load_points(data)?
    } else {
        load_csv(data, &schema.schema())?.data.points
    })
}

fn synth(args: SynthArgs) -> Result<()> {
    let mut spec = args.kind.spec();
    if let Some(n) = args.n {
        spec.n_normal = n;
    }
    let data = repetition_dataset(&spec, args.seed)?;
    save_csv(&data, &args.out)?;
    eprintln!(
        "{}: {} points, {} anomalies ({:.4}) -> {}",
        args.kind,
        data.len(),
        data.anomaly_count(),
        data.contamination(),
        args.out.display()
    );
    Ok(())
}

fn fit(args: FitArgs) -> Result<()> {
    let points = load_features(&args.data, &args.schema, args.unlabeled)?;
    let model = Model::fit(args.algo, &points, args.forest.params())?;
    save_model(&model, &args.out)?;
    let fp = model.storage_footprint();
    eprintln!(
        "{} on {}x{}: {} trees, {} internal nodes, {} reals -> {}",
        args.algo,
        points.rows(),
        points.cols(),
        fp.trees,
        fp.internal_nodes,
        fp.node_reals + fp.rotation_reals,
        args.out.display()
    );
    Ok(())
}

fn score(args: ScoreArgs) -> Result<()> {
    check_contamination(args.contamination)?;
    let model = load_model(&args.model)?;
    let (points, labels) = if args.unlabeled {
        (load_points(&args.data)?, None)
    } else {
        let d = load_csv(&args.data, &args.schema.schema())?.data;
        (d.points, Some(d.labels))
    };
    let scores = model.score_batch(&points)?;
    let predicted = args
        .contamination
        .map(|c| label_by_contamination(&scores, c));

    write_scores(&scores, predicted.as_deref(), create(&args.out)?)?;
    match labels {
        Some(labels) => match auc(&scores, &labels) {
            Ok(a) => eprintln!("{} points scored, AUC {a:.4}", scores.len()),
            Err(e) => eprintln!("{} points scored ({e})", scores.len()),
        },
        None => eprintln!("{} points scored", scores.len()),
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    check_contamination(args.contamination)?;
    let algorithms = parse_algorithms(&args.algo)?;
    let report = match (&args.kind, &args.data) {
        (Some(kind), _) => {
            let config = ExperimentConfig {
                algorithms,
                params: args.forest.params(),
                repetitions: args.repetitions,
                contamination: args.contamination,
                master_seed: args.forest.seed,
                ..ExperimentConfig::preset(*kind)
            };
            run_synthetic_experiment(&config)?.to_report()
        }
        (None, Some(path)) => {
            let data = load_csv(path, &args.schema.schema())?.data;
            let name = path
                .file_stem()
                .map_or("data".into(), |s| s.to_string_lossy().into_owned());
            let config = BenchmarkConfig {
                algorithms,
                params: args.forest.params(),
                repetitions: args.repetitions,
                contamination: args.contamination,
                master_seed: args.forest.seed,
            };
            rotforest::harness::evaluate_dataset(&config, &name, &data)?
        }
        (None, None) => unreachable!("clap requires --data or --kind"),
    };
    finish_report(&report, args.format, args.out.as_deref())
}

fn finish_report(report: &Report, format: ReportFormat, out: Option<&Path>) -> Result<()> {
    write_report(report, ReportFormat::Text, std::io::stdout().lock())?;
    if let Some(out) = out {
        for p in emit_report(report, format, out)? {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn heatmap_cmd(args: HeatmapArgs) -> Result<()> {
    let (rows, cols) = GridSpec::parse_size(&args.grid)?;
    let grid = GridSpec::new(rows, cols, args.bounds)?;
    let model = match (&args.model, &args.data, &args.kind) {
        (Some(m), _, _) => load_model(m)?,
        (None, Some(data), _) => {
            let points = load_csv(data, &args.schema.schema())?.data.points;
            Model::fit(args.algo, &points, args.forest.params())?
        }
        (None, None, Some(kind)) => {
            let data = repetition_dataset(&kind.spec(), derive_seed(args.forest.seed, 0))?;
            Model::fit(args.algo, &data.points, args.forest.params())?
        }
        (None, None, None) => bail!("one of --model, --data or --kind is required"),
    };
    let map = heatmap(&model, grid)?;
    map.write_csv(create(&args.out)?)?;
    eprintln!("{} {grid} -> {}", model.algorithm(), args.out.display());
    if let Some(pgm) = &args.pgm {
        map.write_pgm(create(pgm)?)?;
        eprintln!("wrote {}", pgm.display());
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    check_contamination(args.contamination)?;
    let mut inputs = match &args.data_dir {
        Some(dir) => BenchmarkInput::discover(dir),
        None => Vec::new(),
    };
    for spec in &args.datasets {
        let (name, path) = spec
            .split_once('=')
            .with_context(|| format!("--dataset {spec:?}: expected NAME=PATH"))?;
        inputs.push(BenchmarkInput::new(name, path));
    }
    if inputs.is_empty() {
        bail!("no datasets: pass --data-dir or --dataset NAME=PATH");
    }
    let config = BenchmarkConfig {
        algorithms: parse_algorithms(&args.algo)?,
        params: args.forest.params(),
        repetitions: args.repetitions,
        contamination: args.contamination,
        master_seed: args.forest.seed,
    };
    let report = run_real_benchmark(&config, &inputs);
    finish_report(&report, ReportFormat::Csv, Some(&args.out))?;
    let text = args.out.with_extension("txt");
    let mut w = create(&text)?;
    write_report(&report, ReportFormat::Text, &mut w)?;
    w.flush()?;
    eprintln!("wrote {}", text.display());
    Ok(())
}

fn main() -> ExitCode {
    let outcome = match Cli::parse().command {
        Command::Synth(a) => synth(a),
        Command::Fit(a) => fit(a),
        Command::Score(a) => score(a),
        Command::Eval(a) => eval(a),
        Command::Heatmap(a) => heatmap_cmd(a),
        Command::Bench(a) => bench(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
