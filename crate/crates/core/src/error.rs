use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sample size exceeds population: requested {requested} of {population}")]
    SampleTooLarge { requested: usize, population: usize },

    #[error("rotation dimension mismatch: points have {points} columns, rotation is {rotation}x{rotation}")]
    RotationDimensionMismatch { points: usize, rotation: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("need at least two points, got {0}")]
    TooFewPoints(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("AUC undefined for single-class labels")]
    SingleClassLabels,

    #[error("length mismatch: {scores} scores but {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },

    #[error("heatmap requires 2-D model, got {0}-D")]
    HeatmapDimension(usize),

    #[error("cannot open {}: {reason}", .path.display())]
    Open {
        path: PathBuf,
        reason: std::io::Error,
    },

    #[error("no rows in {}", .0.display())]
    NoRows(PathBuf),

    #[error("{}: row {row}, column {column}: cannot parse {value:?} as a number", .path.display())]
    ParseCell {
        path: PathBuf,
        row: usize,
        column: String,
        value: String,
    },

    #[error("{}: row {row}: unknown label {value:?}, expected {normal:?} or {anomaly:?}", .path.display())]
    UnknownLabel {
        path: PathBuf,
        row: usize,
        value: String,
        normal: String,
        anomaly: String,
    },

    #[error("{}: missing column {column:?}", .path.display())]
    MissingColumn { path: PathBuf, column: String },

    #[error("model format version mismatch: file has version {found}, this build reads version {expected}")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("not a model file (bad magic bytes)")]
    BadMagic,

    #[error("corrupt model file: {0}")]
    CorruptModel(String),

    #[error("all {0} repetitions failed; first error: {1}")]
    AllRepetitionsFailed(usize, Box<Error>),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
