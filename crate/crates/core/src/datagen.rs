//! Synthetic datasets with planted anomalies.
//!
//! Normal points come from one of five shapes; anomalies are appended after
//! them at fixed positions. A group of `k` anomalies "near" a position is
//! spread along the first coordinate in steps of 0.02, centred on the
//! position, so a pair sits at `±0.01`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::RngStream;

/// Points with ground-truth anomaly labels.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    pub points: Matrix,
    pub labels: Vec<bool>,
}

impl LabeledDataset {
    pub fn new(points: Matrix, labels: Vec<bool>) -> Result<Self> {
        if points.rows() != labels.len() {
            return Err(Error::LengthMismatch {
                scores: points.rows(),
                labels: labels.len(),
            });
        }
        Ok(LabeledDataset { points, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }

    pub fn anomaly_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    /// Exact fraction of anomalies.
    pub fn contamination(&self) -> f64 {
        crate::metrics::contamination(&self.labels)
    }

    /// Reorders points and labels together.
    pub fn permuted(&self, order: &[usize]) -> LabeledDataset {
        LabeledDataset {
            points: self.points.select_rows(order),
            labels: order.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnomalyGroup {
    pub position: Vec<f64>,
    pub count: usize,
}

impl AnomalyGroup {
    pub fn near(position: &[f64], count: usize) -> Self {
        AnomalyGroup {
            position: position.to_vec(),
            count,
        }
    }

    /// Offset between neighbouring points of a group.
    pub const SPACING: f64 = 0.02;

    fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        let centre = (self.count as f64 - 1.0) / 2.0;
        (0..self.count).map(move |k| {
            let mut p = self.position.clone();
            p[0] += (k as f64 - centre) * Self::SPACING;
            p
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// Isotropic Gaussian.
    OneGaussian { mean: Vec<f64>, sigma: f64 },
    /// Mixture of isotropic Gaussians with a shared `sigma`.
    TwoGaussians {
        means: Vec<Vec<f64>>,
        weights: Vec<f64>,
        sigma: f64,
    },
    /// 2-D Gaussian mixture whose clusters are each stretched by `stretch`
    /// along the direction at `angle` radians, about their own centres.
    /// `angle: None` draws the angle once per dataset.
    SkewedGaussians {
        means: Vec<Vec<f64>>,
        weights: Vec<f64>,
        sigma: f64,
        stretch: f64,
        angle: Option<f64>,
    },
    /// `y = sin(x) + N(0, noise²)` with `x` uniform on `[0, x_max]`.
    Sinusoid { x_max: f64, noise: f64 },
    /// `(u·cos u, v, u·sin u)` plus isotropic jitter, `u` uniform on
    /// `[u_min, u_max]`, `v` uniform on `[0, height]`.
    SwissRoll {
        u_min: f64,
        u_max: f64,
        height: f64,
        jitter: f64,
    },
}

impl Shape {
    pub fn kind(&self) -> &'static str {
        match self {
            Shape::OneGaussian { .. } => "one_gaussian",
            Shape::TwoGaussians { .. } => "two_gaussians",
            Shape::SkewedGaussians { .. } => "skewed_gaussians",
            Shape::Sinusoid { .. } => "sinusoid",
            Shape::SwissRoll { .. } => "swiss_roll",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Shape::OneGaussian { mean, .. } => mean.len(),
            Shape::TwoGaussians { means, .. } | Shape::SkewedGaussians { means, .. } => {
                means.first().map_or(0, Vec::len)
            }
            Shape::Sinusoid { .. } => 2,
            Shape::SwissRoll { .. } => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub shape: Shape,
    pub n_normal: usize,
    pub anomalies: Vec<AnomalyGroup>,
}

/// Named datasets from the ghost-cluster and benchmark experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    /// `N((0,0), 1)`, 1000 points, no anomalies.
    StandardGaussian,
    /// `N((0.5,0.5), 0.07)`, 2000 points, two anomalies at each corner of
    /// the unit square.
    OneGaussianCorners,
    /// Same cluster, two anomalies at each of the north, south, east and
    /// west points.
    OneGaussianCardinal,
    /// Clusters at (0.8,0.2) and (0.2,0.8), σ = 0.06; anomalies near
    /// (0.8,0.8), (0.25,0.25) and (0.5,0.5).
    TwoGaussians,
    /// Same clusters with three anomalies at the centre only.
    TwoGaussiansCenter,
    /// Clusters at (0.2,0.4) and (−0.2,1), σ = 0.06, stretched 4× along a
    /// random angle; three anomalies around (0.8,0.7).
    SkewedGaussians,
    /// Sine wave on `[0, 7π]` with noise 0.1; eight anomalies off the curve.
    Sinusoid,
    /// Swiss roll with eight anomalies in and around the roll.
    SwissRoll,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::StandardGaussian,
        Preset::OneGaussianCorners,
        Preset::OneGaussianCardinal,
        Preset::TwoGaussians,
        Preset::TwoGaussiansCenter,
        Preset::SkewedGaussians,
        Preset::Sinusoid,
        Preset::SwissRoll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::StandardGaussian => "standard_gaussian",
            Preset::OneGaussianCorners => "one_gaussian_corners",
            Preset::OneGaussianCardinal => "one_gaussian_cardinal",
            Preset::TwoGaussians => "two_gaussians",
            Preset::TwoGaussiansCenter => "two_gaussians_center",
            Preset::SkewedGaussians => "skewed_gaussians",
            Preset::Sinusoid => "sinusoid",
            Preset::SwissRoll => "swiss_roll",
        }
    }

    /// Distance of the cardinal anomalies from the cluster centre.
    pub const CARDINAL_OFFSET: f64 = 0.4;

    pub fn spec(self) -> SyntheticSpec {
        let near = AnomalyGroup::near;
        let one_gaussian = Shape::OneGaussian {
            mean: vec![0.5, 0.5],
            sigma: 0.07,
        };
        let two = Shape::TwoGaussians {
            means: vec![vec![0.8, 0.2], vec![0.2, 0.8]],
            weights: vec![0.5, 0.5],
            sigma: 0.06,
        };
        let (shape, n_normal, anomalies) = match self {
            Preset::StandardGaussian => (
                Shape::OneGaussian {
                    mean: vec![0.0, 0.0],
                    sigma: 1.0,
                },
                1000,
                vec![],
            ),
            Preset::OneGaussianCorners => (
                one_gaussian,
                2000,
                vec![
                    near(&[1.0, 1.0], 2),
                    near(&[1.0, 0.0], 2),
                    near(&[0.0, 0.0], 2),
                    near(&[0.0, 1.0], 2),
                ],
            ),
            Preset::OneGaussianCardinal => {
                let r = Self::CARDINAL_OFFSET;
                (
                    one_gaussian,
                    2000,
                    vec![
                        near(&[0.5, 0.5 + r], 2),
                        near(&[0.5, 0.5 - r], 2),
                        near(&[0.5 + r, 0.5], 2),
                        near(&[0.5 - r, 0.5], 2),
                    ],
                )
            }
            Preset::TwoGaussians => (
                two,
                2000,
                vec![
                    near(&[0.8, 0.8], 2),
                    near(&[0.25, 0.25], 2),
                    near(&[0.5, 0.5], 2),
                ],
            ),
            Preset::TwoGaussiansCenter => (two, 2000, vec![near(&[0.5, 0.5], 3)]),
            Preset::SkewedGaussians => (
                Shape::SkewedGaussians {
                    means: vec![vec![0.2, 0.4], vec![-0.2, 1.0]],
                    weights: vec![0.5, 0.5],
                    sigma: 0.06,
                    stretch: 4.0,
                    angle: None,
                },
                2000,
                vec![
                    near(&[0.8, 0.7], 1),
                    near(&[0.82, 0.72], 1),
                    near(&[0.78, 0.68], 1),
                ],
            ),
            Preset::Sinusoid => (
                Shape::Sinusoid {
                    x_max: 7.0 * PI,
                    noise: 0.1,
                },
                2000,
                vec![
                    near(&[5.0, 1.0], 2),
                    near(&[7.0, -1.0], 2),
                    near(&[10.0, 1.0], 2),
                    near(&[20.0, -1.0], 2),
                ],
            ),
            Preset::SwissRoll => (
                Shape::SwissRoll {
                    u_min: 1.5 * PI,
                    u_max: 4.5 * PI,
                    height: 21.0,
                    jitter: 0.05,
                },
                2000,
                vec![
                    near(&[-5.0, 0.0, 0.0], 2),
                    near(&[-2.0, 0.0, -2.0], 2),
                    near(&[8.0, 0.0, -2.0], 2),
                    near(&[-10.0, -10.0, 10.0], 2),
                ],
            ),
        };
        SyntheticSpec {
            shape,
            n_normal,
            anomalies,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let aliases = [
            ("one_gaussian", Preset::OneGaussianCorners),
            ("one_gaussian_nsew", Preset::OneGaussianCardinal),
            ("skewed", Preset::SkewedGaussians),
        ];
        Preset::ALL
            .iter()
            .map(|p| (p.name(), *p))
            .chain(aliases)
            .find(|(name, _)| *name == s)
            .map(|(_, p)| p)
            .ok_or_else(|| {
                let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
                Error::InvalidParameter(format!(
                    "unknown dataset kind {s:?}, expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

fn non_negative(v: f64) -> bool {
    v.is_finite() && v >= 0.0
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidParameter(msg));
        let check_sigma = |sigma: f64| {
            if positive(sigma) {
                Ok(())
            } else {
                invalid(format!("sigma must be positive, got {sigma}"))
            }
        };
        let check_mixture = |means: &[Vec<f64>], weights: &[f64]| {
            if means.is_empty() || means.len() != weights.len() {
                return invalid(format!(
                    "{} means but {} weights",
                    means.len(),
                    weights.len()
                ));
            }
            if means.iter().any(|m| m.len() != means[0].len()) {
                return invalid("mixture means differ in dimension".into());
            }
            let total: f64 = weights.iter().sum();
            if weights.iter().any(|w| *w < 0.0) || (total - 1.0).abs() > 1e-9 {
                return invalid(format!("mixture weights must sum to 1, got {total}"));
            }
            Ok(())
        };
        match &self.shape {
            Shape::OneGaussian { mean, sigma } => {
                check_sigma(*sigma)?;
                if mean.is_empty() {
                    return invalid("empty mean".into());
                }
            }
            Shape::TwoGaussians {
                means,
                weights,
                sigma,
            } => {
                check_sigma(*sigma)?;
                check_mixture(means, weights)?;
            }
            Shape::SkewedGaussians {
                means,
                weights,
                sigma,
                stretch,
                ..
            } => {
                check_sigma(*sigma)?;
                check_mixture(means, weights)?;
                if means[0].len() != 2 {
                    return invalid("skewed gaussians are 2-D".into());
                }
                if !positive(*stretch) {
                    return invalid(format!("stretch factor must be positive, got {stretch}"));
                }
            }
            Shape::Sinusoid { x_max, noise } => {
                if !positive(*x_max) || !non_negative(*noise) {
                    return invalid(format!("bad sinusoid range {x_max} or noise {noise}"));
                }
            }
            Shape::SwissRoll {
                u_min,
                u_max,
                height,
                jitter,
            } => {
                let range_ok = u_min.is_finite() && u_max.is_finite() && u_min < u_max;
                if !range_ok || !non_negative(*height) || !non_negative(*jitter) {
                    return invalid("bad swiss roll parameters".into());
                }
            }
        }
        let d = self.shape.dim();
        if let Some(bad) = self.anomalies.iter().find(|a| a.position.len() != d) {
            return invalid(format!("anomaly position {:?} is not {d}-D", bad.position));
        }
        Ok(())
    }

    /// Draws the dataset: `n_normal` normal points followed by the anomaly
    /// groups in order.
    pub fn generate(&self, rng: &mut RngStream) -> Result<LabeledDataset> {
        self.validate()?;
        let d = self.shape.dim();
        let mut points = Matrix::zeros(0, d);
        match &self.shape {
            Shape::OneGaussian { mean, sigma } => {
                for _ in 0..self.n_normal {
                    points.push_row(&gaussian_point(rng, mean, *sigma));
                }
            }
            Shape::TwoGaussians {
                means,
                weights,
                sigma,
            } => {
                for _ in 0..self.n_normal {
                    let c = pick_component(rng, weights);
                    points.push_row(&gaussian_point(rng, &means[c], *sigma));
                }
            }
            Shape::SkewedGaussians {
                means,
                weights,
                sigma,
                stretch,
                angle,
            } => {
                let theta = angle.unwrap_or_else(|| rng.uniform(0.0, PI));
                let stretch_map = StretchMap::new(theta, *stretch);
                for _ in 0..self.n_normal {
                    let c = pick_component(rng, weights);
                    let mean = &means[c];
                    let dev = [sigma * rng.standard_normal(), sigma * rng.standard_normal()];
                    let s = stretch_map.apply(dev);
                    points.push_row(&[mean[0] + s[0], mean[1] + s[1]]);
                }
            }
            Shape::Sinusoid { x_max, noise } => {
                for _ in 0..self.n_normal {
                    let x = rng.uniform(0.0, *x_max);
                    let y = if *noise > 0.0 {
                        x.sin() + noise * rng.standard_normal()
                    } else {
                        x.sin()
                    };
                    points.push_row(&[x, y]);
                }
            }
            Shape::SwissRoll {
                u_min,
                u_max,
                height,
                jitter,
            } => {
                for _ in 0..self.n_normal {
                    let u = rng.uniform(*u_min, *u_max);
                    let v = rng.uniform(0.0, *height);
                    let mut p = [u * u.cos(), v, u * u.sin()];
                    if *jitter > 0.0 {
                        p.iter_mut()
                            .for_each(|c| *c += jitter * rng.standard_normal());
                    }
                    points.push_row(&p);
                }
            }
        }
        let mut labels = vec![false; self.n_normal];
        for group in &self.anomalies {
            for p in group.points() {
                points.push_row(&p);
                labels.push(true);
            }
        }
        LabeledDataset::new(points, labels)
    }
}

fn gaussian_point(rng: &mut RngStream, mean: &[f64], sigma: f64) -> Vec<f64> {
    mean.iter()
        .map(|m| m + sigma * rng.standard_normal())
        .collect()
}

fn pick_component(rng: &mut RngStream, weights: &[f64]) -> usize {
    let u = rng.uniform(0.0, 1.0);
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // u landed in the rounding gap above the last cumulative weight
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

/// `R(θ)·diag(k, 1)·R(θ)ᵀ`: scales by `k` along the direction at `θ`.
struct StretchMap {
    m: [[f64; 2]; 2],
}

impl StretchMap {
    fn new(theta: f64, k: f64) -> Self {
        let (s, c) = theta.sin_cos();
        StretchMap {
            m: [
                [k * c * c + s * s, (k - 1.0) * c * s],
                [(k - 1.0) * c * s, k * s * s + c * c],
            ],
        }
    }

    fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }
}
