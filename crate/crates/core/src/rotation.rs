//! Random rotations.
//!
//! A rotation is drawn by filling a `d×d` matrix with independent standard
//! normals, factoring it with Householder QR, folding the signs of `R`'s
//! diagonal into `Q` (which makes `Q` Haar-distributed on `O(d)`), and
//! finally negating column 0 when the determinant is `-1` so the result
//! lies in `SO(d)`.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::RngStream;

pub fn random_gaussian_matrix(rng: &mut RngStream, d: usize) -> Matrix {
    let data = (0..d * d).map(|_| rng.standard_normal()).collect();
    Matrix::from_vec(d, d, data).expect("normal draws are finite")
}

/// Result of a Householder QR factorization `A = Q·R`.
///
/// `R` is upper triangular with exact zeros below the diagonal and a
/// non-negative diagonal.
#[derive(Clone, Debug)]
pub struct Qr {
    pub q: Matrix,
    pub r: Matrix,
    q_det: f64,
}

impl Qr {
    /// Determinant of `Q`, tracked from the number of reflections and sign
    /// flips applied; always exactly `1.0` or `-1.0`.
    pub fn q_determinant(&self) -> f64 {
        self.q_det
    }

    /// Determinant of the factored matrix, `det(Q)·Π r_jj`.
    pub fn determinant(&self) -> f64 {
        (0..self.r.rows()).fold(self.q_det, |acc, j| acc * self.r[(j, j)])
    }
}

/// Householder QR of a square matrix.
///
/// A column whose sub-diagonal part is already zero gets no reflection, so
/// rank-deficient inputs still produce an orthogonal `Q`.
pub fn qr_decompose(a: &Matrix) -> Result<Qr> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::InvalidParameter(format!(
            "qr_decompose expects a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let mut r = a.clone();
    let mut q = Matrix::identity(n);
    let mut sign_changes = 0usize;
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];

    for k in 0..n.saturating_sub(1) {
        let len = n - k;
        let norm = (k..n).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if r[(k, k)] >= 0.0 { -norm } else { norm };
        for i in 0..len {
            v[i] = r[(k + i, k)];
        }
        v[0] -= alpha;
        let vtv: f64 = v[..len].iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        let tau = 2.0 / vtv;

        // R <- H·R on the trailing block.
        w[k..n].iter_mut().for_each(|x| *x = 0.0);
        for (i, &vi) in v[..len].iter().enumerate() {
            let row = &r.row(k + i)[k..];
            for (wj, &rij) in w[k..n].iter_mut().zip(row) {
                *wj += vi * rij;
            }
        }
        for (i, &vi) in v[..len].iter().enumerate() {
            let scale = tau * vi;
            let row = &mut r.row_mut(k + i)[k..];
            for (rij, &wj) in row.iter_mut().zip(&w[k..n]) {
                *rij -= scale * wj;
            }
        }
        r[(k, k)] = alpha;
        for i in k + 1..n {
            r[(i, k)] = 0.0;
        }

        // Q <- Q·H on the trailing columns.
        for i in 0..n {
            let row = &mut q.row_mut(i)[k..];
            let dot: f64 = row.iter().zip(&v[..len]).map(|(a, b)| a * b).sum();
            let scale = tau * dot;
            for (qil, &vl) in row.iter_mut().zip(&v[..len]) {
                *qil -= scale * vl;
            }
        }
        sign_changes += 1;
    }

    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for c in j..n {
                r[(j, c)] = -r[(j, c)];
            }
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
            sign_changes += 1;
        }
    }

    Ok(Qr {
        q,
        r,
        q_det: if sign_changes.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        },
    })
}

/// A `d×d` orthogonal matrix with determinant `+1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationMatrix {
    q: Matrix,
}

impl RotationMatrix {
    pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;
    pub const DETERMINANT_TOLERANCE: f64 = 1e-8;

    pub fn identity(d: usize) -> Self {
        Self {
            q: Matrix::identity(d),
        }
    }

    /// Wraps an existing matrix after checking it is a rotation: square,
    /// orthogonal within `1e-10` and with determinant `1` within `1e-8`.
    pub fn from_matrix(q: Matrix) -> Result<Self> {
        if q.rows() != q.cols() {
            return Err(Error::InvalidParameter(format!(
                "rotation must be square, got {}x{}",
                q.rows(),
                q.cols()
            )));
        }
        let err = q.orthogonality_error();
        if err > Self::ORTHOGONALITY_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "matrix is not orthogonal (error {err:e})"
            )));
        }
        let det = qr_decompose(&q)?.determinant();
        if (det - 1.0).abs() > Self::DETERMINANT_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "rotation determinant is {det}, expected 1"
            )));
        }
        Ok(Self { q })
    }

    pub fn dim(&self) -> usize {
        self.q.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.q
    }

    /// Number of reals needed to store the rotation, `d²`.
    pub fn storage_len(&self) -> usize {
        self.dim() * self.dim()
    }

    pub fn compose(&self, other: &RotationMatrix) -> Result<RotationMatrix> {
        Ok(RotationMatrix {
            q: self.q.matmul(&other.q)?,
        })
    }

    /// Rotates a single point: `out = x · Q`.
    pub fn rotate_into(&self, x: &[f64], out: &mut [f64]) {
        self.q.vecmul_into(x, out);
    }

    /// Rotation angle in `[0, 2π)` of a 2-D rotation.
    pub fn angle_2d(&self) -> Option<f64> {
        (self.dim() == 2).then(|| {
            self.q[(1, 0)]
                .atan2(self.q[(0, 0)])
                .rem_euclid(std::f64::consts::TAU)
        })
    }
}

/// Haar-uniform random rotation in `SO(d)`.
pub fn random_rotation(rng: &mut RngStream, d: usize) -> RotationMatrix {
    assert!(d >= 1, "random_rotation needs d >= 1");
    let a = random_gaussian_matrix(rng, d);
    let qr = qr_decompose(&a).expect("square input");
    let mut q = qr.q;
    if qr.q_det < 0.0 {
        for i in 0..d {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    RotationMatrix { q }
}

/// Multiplies every row of `points` by the rotation.
pub fn rotate_points(points: &Matrix, rot: &RotationMatrix) -> Result<Matrix> {
    if points.cols() != rot.dim() {
        return Err(Error::RotationDimensionMismatch {
            points: points.cols(),
            rotation: rot.dim(),
        });
    }
    let d = rot.dim();
    let mut out = Matrix::zeros(points.rows(), d);
    for i in 0..points.rows() {
        rot.rotate_into(points.row(i), out.row_mut(i));
    }
    Ok(out)
}
