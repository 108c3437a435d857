//! File formats: labelled CSV datasets, the binary model container and
//! evaluation reports.
//!
//! The model layout is described byte by byte in `docs/model-format.md`.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::datagen::LabeledDataset;
use crate::eif::ExtendedForest;
use crate::error::{Error, Result};
use crate::forest::ForestParams;
use crate::iforest::IsolationForest;
use crate::matrix::Matrix;
use crate::metrics::EvalReport;
use crate::model::{Algorithm, Model};
use crate::rif::{RotatedForest, RotatedTree};
use crate::rotation::RotationMatrix;
use crate::tree::{ITree, Node, SplitRule};

/// How to read a labelled CSV file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsvSchema {
    /// Label column name; `None` means the last column.
    pub label_column: Option<String>,
    pub normal_value: String,
    pub anomaly_value: String,
}

impl Default for CsvSchema {
    /// The layout written by [`save_csv`]: last column `label`, `0`/`1`.
    fn default() -> Self {
        CsvSchema {
            label_column: None,
            normal_value: "0".into(),
            anomaly_value: "1".into(),
        }
    }
}

impl CsvSchema {
    pub fn new(normal: &str, anomaly: &str) -> Self {
        CsvSchema {
            label_column: None,
            normal_value: normal.into(),
            anomaly_value: anomaly.into(),
        }
    }

    pub fn with_label_column(mut self, name: &str) -> Self {
        self.label_column = Some(name.into());
        self
    }
}

/// Loaded dataset plus its feature column names.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvDataset {
    pub feature_names: Vec<String>,
    pub data: LabeledDataset,
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|reason| Error::Open {
        path: path.to_path_buf(),
        reason,
    })
}

fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(open(path)?))
}

/// Reads a headed CSV file: feature columns parse as finite reals with a
/// decimal point, the label column must equal one of the schema's two
/// strings. Surrounding whitespace is trimmed; empty cells are errors.
pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<CsvDataset> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let headers = reader.headers()?.clone();
    if headers.is_empty() {
        return Err(Error::NoRows(path.to_path_buf()));
    }
    let label_idx = match &schema.label_column {
        None => headers.len() - 1,
        Some(name) => {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn {
                    path: path.to_path_buf(),
                    column: name.clone(),
                })?
        }
    };
    let feature_idx: Vec<usize> = (0..headers.len()).filter(|&j| j != label_idx).collect();
    let feature_names: Vec<String> = feature_idx
        .iter()
        .map(|&j| headers[j].to_string())
        .collect();

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let row = r + 1;
        for &j in &feature_idx {
            let cell = &record[j];
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(Error::ParseCell {
                        path: path.to_path_buf(),
                        row,
                        column: headers[j].to_string(),
                        value: cell.to_string(),
                    })
                }
            }
        }
        let label = &record[label_idx];
        labels.push(if label == schema.anomaly_value {
            true
        } else if label == schema.normal_value {
            false
        } else {
            return Err(Error::UnknownLabel {
                path: path.to_path_buf(),
                row,
                value: label.to_string(),
                normal: schema.normal_value.clone(),
                anomaly: schema.anomaly_value.clone(),
            });
        });
    }
    if labels.is_empty() {
        return Err(Error::NoRows(path.to_path_buf()));
    }
    let points = Matrix::from_vec(labels.len(), feature_idx.len(), values)?;
    Ok(CsvDataset {
        feature_names,
        data: LabeledDataset::new(points, labels)?,
    })
}

/// Writes `x0,…,x{d−1},label` with labels `0`/`1`. Values use the shortest
/// representation that parses back to the same float.
pub fn save_csv(dataset: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    write_csv_records(dataset, &mut writer)?;
    writer.flush()?;
    Ok(())
}

pub fn write_csv<W: Write>(dataset: &LabeledDataset, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    write_csv_records(dataset, &mut writer)?;
    writer.flush()?;
    Ok(())
}

fn write_csv_records<W: Write>(
    dataset: &LabeledDataset,
    writer: &mut csv::Writer<W>,
) -> Result<()> {
    let d = dataset.dim();
    let mut header: Vec<String> = (0..d).map(|j| format!("x{j}")).collect();
    header.push("label".into());
    writer.write_record(&header)?;
    let mut record = Vec::with_capacity(d + 1);
    for (row, &label) in dataset.points.row_iter().zip(&dataset.labels) {
        record.clear();
        record.extend(row.iter().map(|v| v.to_string()));
        record.push(if label { "1" } else { "0" }.to_string());
        writer.write_record(&record)?;
    }
    Ok(())
}

/// Points only, as `x0,…,x{d−1}` rows; for scoring files without labels.
pub fn load_points(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let headers = reader.headers()?.clone();
    let feature_idx: Vec<usize> = (0..headers.len())
        .filter(|&j| &headers[j] != "label")
        .collect();
    let mut values = Vec::new();
    let mut rows = 0;
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        for &j in &feature_idx {
            let cell = &record[j];
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(Error::ParseCell {
                        path: path.to_path_buf(),
                        row: r + 1,
                        column: headers[j].to_string(),
                        value: cell.to_string(),
                    })
                }
            }
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::NoRows(path.to_path_buf()));
    }
    Matrix::from_vec(rows, feature_idx.len(), values)
}

/// `index,score[,predicted]` rows; `predicted` is written as 0/1 when given.
pub fn write_scores<W: Write>(scores: &[f64], predicted: Option<&[bool]>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["index", "score"];
    if predicted.is_some() {
        header.push("predicted");
    }
    w.write_record(&header)?;
    for (i, s) in scores.iter().enumerate() {
        let mut rec = vec![i.to_string(), s.to_string()];
        if let Some(p) = predicted {
            rec.push(u8::from(p[i]).to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub const MODEL_MAGIC: [u8; 4] = *b"RIFM";
pub const MODEL_VERSION: u32 = 1;

const TAG_LEAF: u8 = 0;
const TAG_AXIS: u8 = 1;
const TAG_HYPERPLANE: u8 = 2;

fn algorithm_tag(a: Algorithm) -> u8 {
    match a {
        Algorithm::IForest => 0,
        Algorithm::Eif => 1,
        Algorithm::Rif => 2,
    }
}

/// Serializes a fitted model to bytes.
pub fn encode_model(model: &Model) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    out.push(algorithm_tag(model.algorithm()));
    let p = model.params();
    for v in [p.trees as u64, p.psi as u64, p.depth_limit as u64, p.seed] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let put_u64 = |out: &mut Vec<u8>, v: usize| out.extend_from_slice(&(v as u64).to_le_bytes());
    let put_f64s = |out: &mut Vec<u8>, vs: &[f64]| {
        for v in vs {
            out.extend_from_slice(&v.to_le_bytes());
        }
    };
    use crate::forest::AnomalyScorer;
    put_u64(&mut out, model.dim());
    put_u64(&mut out, model.psi_effective());

    let trees: Vec<&ITree> = match model {
        Model::IForest(m) => m.trees().iter().collect(),
        Model::Eif(m) => m.trees().iter().collect(),
        Model::Rif(m) => m.members().iter().map(|r| &r.tree).collect(),
    };
    put_u64(&mut out, trees.len());
    for tree in trees {
        put_u64(&mut out, tree.nodes().len());
        for node in tree.nodes() {
            match node {
                Node::Leaf { size, level } => {
                    out.push(TAG_LEAF);
                    put_u64(&mut out, *size);
                    put_u64(&mut out, *level);
                }
                Node::Internal { rule, right, .. } => match rule {
                    SplitRule::Axis { dim, value } => {
                        out.push(TAG_AXIS);
                        put_u64(&mut out, *right);
                        put_u64(&mut out, *dim);
                        put_f64s(&mut out, &[*value]);
                    }
                    SplitRule::Hyperplane { normal, intercept } => {
                        out.push(TAG_HYPERPLANE);
                        put_u64(&mut out, *right);
                        put_f64s(&mut out, normal);
                        put_f64s(&mut out, intercept);
                    }
                },
            }
        }
    }
    if let Model::Rif(m) = model {
        put_u64(&mut out, m.members().len());
        for member in m.members() {
            let q = member.rotation.matrix().as_slice();
            put_u64(&mut out, q.len());
            put_f64s(&mut out, q);
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::CorruptModel(format!(
                "truncated: needed {n} bytes at offset {}, {} left",
                self.pos,
                self.buf.len() - self.pos
            )));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| Error::CorruptModel(format!("count {v} too large")))
    }

    /// A count of items each at least `min_bytes` long; rejects counts the
    /// remaining input cannot hold, before anything is allocated.
    fn count(&mut self, min_bytes: usize) -> Result<usize> {
        let n = self.usize()?;
        let left = self.buf.len() - self.pos;
        if n.checked_mul(min_bytes).is_none_or(|need| need > left) {
            return Err(Error::CorruptModel(format!(
                "count {n} at offset {} exceeds remaining {left} bytes",
                self.pos - 8
            )));
        }
        Ok(n)
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }
}

fn corrupt(e: Error) -> Error {
    match e {
        Error::CorruptModel(_) => e,
        other => Error::CorruptModel(other.to_string()),
    }
}

/// Parses a model produced by [`encode_model`]. Every structural field is
/// validated; nothing is returned unless the whole input is consumed.
pub fn decode_model(bytes: &[u8]) -> Result<Model> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if bytes.len() < 4 || r.take(4)? != MODEL_MAGIC {
        return Err(Error::BadMagic);
    }
    let version = r.u32()?;
    if version != MODEL_VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            expected: MODEL_VERSION,
        });
    }
    let algorithm = match r.u8()? {
        0 => Algorithm::IForest,
        1 => Algorithm::Eif,
        2 => Algorithm::Rif,
        t => return Err(Error::CorruptModel(format!("unknown algorithm tag {t}"))),
    };
    let params = ForestParams {
        trees: r.usize()?,
        psi: r.usize()?,
        depth_limit: r.usize()?,
        seed: r.u64()?,
    };
    params.validate().map_err(corrupt)?;
    let dim = r.usize()?;
    let psi_effective = r.usize()?;
    if dim == 0 || psi_effective < 2 || psi_effective > params.psi {
        return Err(Error::CorruptModel(format!(
            "bad shape: dim {dim}, effective subsample {psi_effective}"
        )));
    }
    let tree_count = r.count(8)?;
    if tree_count != params.trees {
        return Err(Error::CorruptModel(format!(
            "{tree_count} trees stored, parameters say {}",
            params.trees
        )));
    }
    let mut trees = Vec::with_capacity(tree_count);
    for _ in 0..tree_count {
        let node_count = r.count(17)?;
        let mut nodes = Vec::with_capacity(node_count);
        for at in 0..node_count {
            let node = match r.u8()? {
                TAG_LEAF => Node::Leaf {
                    size: r.usize()?,
                    level: r.usize()?,
                },
                TAG_AXIS => {
                    let right = r.usize()?;
                    let dim = r.usize()?;
                    let value = r.f64()?;
                    Node::Internal {
                        rule: SplitRule::Axis { dim, value },
                        left: at + 1,
                        right,
                    }
                }
                TAG_HYPERPLANE => {
                    let right = r.usize()?;
                    let normal = r.f64s(dim)?;
                    let intercept = r.f64s(dim)?;
                    Node::Internal {
                        rule: SplitRule::Hyperplane { normal, intercept },
                        left: at + 1,
                        right,
                    }
                }
                t => return Err(Error::CorruptModel(format!("unknown node tag {t}"))),
            };
            let expected_axis = algorithm != Algorithm::Eif;
            if let Node::Internal { rule, .. } = &node {
                if matches!(rule, SplitRule::Axis { .. }) != expected_axis {
                    return Err(Error::CorruptModel(format!(
                        "{algorithm} model holds a {} split",
                        if expected_axis { "hyperplane" } else { "axis" }
                    )));
                }
            }
            nodes.push(node);
        }
        trees.push(ITree::from_nodes(nodes, params.depth_limit, dim).map_err(corrupt)?);
    }
    let model = match algorithm {
        Algorithm::IForest => Model::IForest(IsolationForest::from_parts(
            params,
            dim,
            psi_effective,
            trees,
        )),
        Algorithm::Eif => Model::Eif(ExtendedForest::from_parts(
            params,
            dim,
            psi_effective,
            trees,
        )),
        Algorithm::Rif => {
            let rotation_count = r.count(8)?;
            if rotation_count != tree_count {
                return Err(Error::CorruptModel(format!(
                    "{rotation_count} rotations for {tree_count} trees"
                )));
            }
            let mut members = Vec::with_capacity(tree_count);
            for tree in trees {
                let len = r.usize()?;
                if len != dim * dim {
                    return Err(Error::CorruptModel(format!(
                        "rotation has {len} entries, expected {}",
                        dim * dim
                    )));
                }
                let q = Matrix::from_vec(dim, dim, r.f64s(len)?).map_err(corrupt)?;
                let rotation = RotationMatrix::from_matrix(q).map_err(corrupt)?;
                members.push(RotatedTree { tree, rotation });
            }
            Model::Rif(RotatedForest::from_parts(
                params,
                dim,
                psi_effective,
                members,
            ))
        }
    };
    if r.pos != bytes.len() {
        return Err(Error::CorruptModel(format!(
            "{} trailing bytes",
            bytes.len() - r.pos
        )));
    }
    Ok(model)
}

pub fn save_model(model: &Model, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(&encode_model(model))?;
    out.flush()?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let mut bytes = Vec::new();
    open(path.as_ref())?.read_to_end(&mut bytes)?;
    decode_model(&bytes)
}

/// One summary row: a dataset scored by one algorithm over repetitions.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub dataset: String,
    pub algorithm: String,
    pub avg_auc: f64,
    pub max_auc: f64,
    /// Threshold fraction used for binary predictions.
    pub contamination: f64,
}

/// One repetition of one summary row.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRow {
    pub dataset: String,
    pub algorithm: String,
    pub repetition: usize,
    pub seed: u64,
    pub auc: f64,
    pub precision: f64,
    pub recall: f64,
    pub predicted_auc: f64,
    pub contamination_data: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub runs: Vec<RunRow>,
    /// Warnings and per-dataset errors, in the order they arose.
    pub notes: Vec<String>,
}

impl Report {
    pub fn push_eval(&mut self, dataset: &str, algorithm: Algorithm, eval: &EvalReport) {
        self.rows.push(ReportRow {
            dataset: dataset.into(),
            algorithm: algorithm.name().into(),
            avg_auc: eval.avg_auc(),
            max_auc: eval.max_auc(),
            contamination: eval.contamination_algo,
        });
        for run in &eval.runs {
            self.runs.push(RunRow {
                dataset: dataset.into(),
                algorithm: algorithm.name().into(),
                repetition: run.repetition,
                seed: run.seed,
                auc: run.auc,
                precision: run.precision,
                recall: run.recall,
                predicted_auc: run.predicted_auc,
                contamination_data: eval.contamination_data,
            });
        }
        for f in &eval.failures {
            self.notes.push(format!(
                "{dataset}/{algorithm}: repetition {} (seed {}) failed: {}",
                f.repetition, f.seed, f.message
            ));
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.rows.extend(other.rows);
        self.runs.extend(other.runs);
        self.notes.extend(other.notes);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Text,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "text" | "txt" => Ok(ReportFormat::Text),
            other => Err(Error::InvalidParameter(format!(
                "unknown report format {other:?}, expected csv or text"
            ))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Text => "text",
        })
    }
}

const SUMMARY_HEADER: [&str; 5] = [
    "dataset",
    "algorithm",
    "avg_auc",
    "max_auc",
    "contamination",
];

fn summary_cells(row: &ReportRow) -> [String; 5] {
    [
        row.dataset.clone(),
        row.algorithm.clone(),
        format!("{:.4}", row.avg_auc),
        format!("{:.4}", row.max_auc),
        format!("{:.4}", row.contamination),
    ]
}

/// Writes the summary table. CSV has a header and one line per row; text is
/// an aligned table followed by any notes as `#` lines.
pub fn write_report<W: Write>(report: &Report, format: ReportFormat, mut out: W) -> Result<()> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(SUMMARY_HEADER)?;
            for row in &report.rows {
                w.write_record(summary_cells(row))?;
            }
            w.flush()?;
        }
        ReportFormat::Text => {
            let cells: Vec<[String; 5]> = report.rows.iter().map(summary_cells).collect();
            let mut widths = SUMMARY_HEADER.map(str::len);
            for row in &cells {
                for (w, c) in widths.iter_mut().zip(row) {
                    *w = (*w).max(c.len());
                }
            }
            let line = |out: &mut W, row: [&str; 5]| -> std::io::Result<()> {
                let mut s = String::new();
                for (j, (c, w)) in row.iter().zip(widths).enumerate() {
                    if j < 2 {
                        s.push_str(&format!("{c:<w$}"));
                    } else {
                        s.push_str(&format!("{c:>w$}"));
                    }
                    if j < 4 {
                        s.push_str("  ");
                    }
                }
                writeln!(out, "{}", s.trim_end())
            };
            line(&mut out, SUMMARY_HEADER)?;
            for row in &cells {
                line(&mut out, row.each_ref().map(String::as_str))?;
            }
            for note in &report.notes {
                writeln!(out, "# {note}")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

/// Per-repetition detail rows as CSV.
pub fn write_runs<W: Write>(report: &Report, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "dataset",
        "algorithm",
        "repetition",
        "seed",
        "auc",
        "precision",
        "recall",
        "predicted_auc",
        "contamination_data",
    ])?;
    for run in &report.runs {
        w.write_record([
            run.dataset.clone(),
            run.algorithm.clone(),
            run.repetition.to_string(),
            run.seed.to_string(),
            format!("{:.4}", run.auc),
            format!("{:.4}", run.precision),
            format!("{:.4}", run.recall),
            format!("{:.4}", run.predicted_auc),
            format!("{:.4}", run.contamination_data),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the summary to `path` and, when there are detail rows, the runs
/// next to it as `<stem>_runs.csv`. Returns the paths written.
pub fn emit_report(
    report: &Report,
    format: ReportFormat,
    path: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let path = path.as_ref();
    let mut written = vec![path.to_path_buf()];
    write_report(report, format, BufWriter::new(File::create(path)?))?;
    if !report.runs.is_empty() {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "report".into());
        let runs_path = path.with_file_name(format!("{stem}_runs.csv"));
        write_runs(report, BufWriter::new(File::create(&runs_path)?))?;
        written.push(runs_path);
    }
    Ok(written)
}
