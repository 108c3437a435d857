//! Isolation-based anomaly detection.
//!
//! Three detectors share one tree core:
//!
//! - [`IsolationForest`]: axis-aligned random splits.
//! - [`ExtendedForest`]: random hyperplane splits.
//! - [`RotatedForest`]: a Haar-random rotation per tree, followed by
//!   axis-aligned splits in the rotated frame.
//!
//! Around them sit the evaluation pieces: synthetic data generators
//! ([`datagen`]), ROC-AUC and contamination labelling ([`metrics`]),
//! heatmaps and repeated experiments ([`harness`]), and CSV and model file
//! formats ([`io`]).
//!
//! ```
//! use rotforest::{AnomalyScorer, ForestParams, Matrix, RotatedForest};
//!
//! let mut rows: Vec<[f64; 2]> = (0..200)
//!     .map(|i| {
//!         let t = i as f64 * 0.1;
//!         [t.cos() * 0.1, t.sin() * 0.1]
//!     })
//!     .collect();
//! rows.push([3.0, 3.0]);
//! let points = Matrix::from_rows(&rows).unwrap();
//! let forest = RotatedForest::fit(&points, ForestParams::new(50, 128)).unwrap();
//! assert!(forest.score(&[3.0, 3.0]) > forest.score(&[0.1, 0.0]));
//! ```

pub mod datagen;
pub mod eif;
pub mod error;
pub mod forest;
pub mod harness;
pub mod iforest;
pub mod io;
pub mod matrix;
pub mod metrics;
pub mod model;
pub mod rif;
pub mod rng;
pub mod rotation;
pub mod tree;

pub use eif::ExtendedForest;
pub use error::{Error, Result};
pub use forest::{AnomalyScorer, ForestParams, StorageFootprint};
pub use iforest::IsolationForest;
pub use matrix::Matrix;
pub use model::{Algorithm, Model};
pub use rif::RotatedForest;
pub use rng::RngStream;
pub use rotation::RotationMatrix;
