use std::fmt;
use std::str::FromStr;

use crate::eif::ExtendedForest;
use crate::error::{Error, Result};
use crate::forest::{AnomalyScorer, ForestParams, StorageFootprint};
use crate::iforest::IsolationForest;
use crate::matrix::Matrix;
use crate::rif::RotatedForest;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    IForest,
    Eif,
    Rif,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::IForest, Algorithm::Eif, Algorithm::Rif];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::IForest => "iforest",
            Algorithm::Eif => "eif",
            Algorithm::Rif => "rif",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iforest" | "if" => Ok(Algorithm::IForest),
            "eif" => Ok(Algorithm::Eif),
            "rif" => Ok(Algorithm::Rif),
            other => Err(Error::InvalidParameter(format!(
                "unknown algorithm {other:?}, expected iforest, eif or rif"
            ))),
        }
    }
}

/// Any of the three fitted detectors.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    IForest(IsolationForest),
    Eif(ExtendedForest),
    Rif(RotatedForest),
}

impl Model {
    pub fn fit(algorithm: Algorithm, points: &Matrix, params: ForestParams) -> Result<Model> {
        Ok(match algorithm {
            Algorithm::IForest => Model::IForest(IsolationForest::fit(points, params)?),
            Algorithm::Eif => Model::Eif(ExtendedForest::fit(points, params)?),
            Algorithm::Rif => Model::Rif(RotatedForest::fit(points, params)?),
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            Model::IForest(_) => Algorithm::IForest,
            Model::Eif(_) => Algorithm::Eif,
            Model::Rif(_) => Algorithm::Rif,
        }
    }

    pub fn params(&self) -> &ForestParams {
        match self {
            Model::IForest(m) => m.params(),
            Model::Eif(m) => m.params(),
            Model::Rif(m) => m.params(),
        }
    }

    pub fn psi_effective(&self) -> usize {
        match self {
            Model::IForest(m) => m.psi_effective(),
            Model::Eif(m) => m.psi_effective(),
            Model::Rif(m) => m.psi_effective(),
        }
    }

    pub fn storage_footprint(&self) -> StorageFootprint {
        match self {
            Model::IForest(m) => m.storage_footprint(),
            Model::Eif(m) => m.storage_footprint(),
            Model::Rif(m) => m.storage_footprint(),
        }
    }
}

impl AnomalyScorer for Model {
    fn dim(&self) -> usize {
        match self {
            Model::IForest(m) => m.dim(),
            Model::Eif(m) => m.dim(),
            Model::Rif(m) => m.dim(),
        }
    }

    fn score(&self, x: &[f64]) -> f64 {
        match self {
            Model::IForest(m) => m.score(x),
            Model::Eif(m) => m.score(x),
            Model::Rif(m) => m.score(x),
        }
    }
}
