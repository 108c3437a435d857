//! Random rotations from the QR decomposition of a Gaussian matrix.

use std::f64::consts::TAU;

use rotforest::rotation::{qr_decompose, random_gaussian_matrix, random_rotation, rotate_points};
use rotforest::{Matrix, RngStream};

fn main() -> rotforest::Result<()> {
    let mut rng = RngStream::new(1, 0);

    let a = random_gaussian_matrix(&mut rng, 4);
    let qr = qr_decompose(&a)?;
    let rebuilt = qr.q.matmul(&qr.r)?;
    println!(
        "QR of a 4x4 Gaussian: max |A - QR| = {:.2e}",
        a.max_abs_diff(&rebuilt)
    );

    for d in [2, 10, 100, 500] {
        let q = random_rotation(&mut rng, d);
        println!(
            "d = {d:>3}: max |QtQ - I| = {:.2e}, stored reals = {}",
            q.matrix().orthogonality_error(),
            q.storage_len()
        );
    }

    // Angles of planar rotations spread evenly over the circle.
    let mut bins = [0usize; 8];
    for _ in 0..8000 {
        let angle = random_rotation(&mut rng, 2).angle_2d().unwrap();
        bins[(angle / TAU * 8.0) as usize % 8] += 1;
    }
    println!("2-D angle histogram, 8 bins: {bins:?}");

    let points = Matrix::from_rows(&[[0.0, 0.0, 0.0], [1.0, 2.0, 3.0]])?;
    let rotated = rotate_points(&points, &random_rotation(&mut rng, 3))?;
    let norm = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>().sqrt();
    println!(
        "distance before {:.12}, after {:.12}",
        norm(points.row(1)),
        norm(rotated.row(1))
    );
    Ok(())
}
