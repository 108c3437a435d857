//! Generates every preset and a custom mixture, writing them as CSV.
//!
//! ```text
//! cargo run --example synthetic_datasets -- [out_dir]
//! ```

use std::path::PathBuf;

use rotforest::datagen::{AnomalyGroup, Preset, Shape, SyntheticSpec};
use rotforest::io::save_csv;
use rotforest::RngStream;

fn main() -> rotforest::Result<()> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "synthetic".into()),
    );
    std::fs::create_dir_all(&out)?;

    for preset in Preset::ALL {
        let data = preset.spec().generate(&mut RngStream::new(0, 4))?;
        let path = out.join(format!("{preset}.csv"));
        save_csv(&data, &path)?;
        println!(
            "{:<22} {:>5} x {}  {} anomalies  -> {}",
            preset.name(),
            data.len(),
            data.dim(),
            data.anomaly_count(),
            path.display()
        );
    }

    let custom = SyntheticSpec {
        shape: Shape::SkewedGaussians {
            means: vec![vec![0.0, 0.0], vec![1.0, 1.0]],
            weights: vec![0.7, 0.3],
            sigma: 0.05,
            stretch: 6.0,
            angle: Some(std::f64::consts::FRAC_PI_4),
        },
        n_normal: 1500,
        anomalies: vec![AnomalyGroup::near(&[1.0, 0.0], 4)],
    };
    let data = custom.generate(&mut RngStream::new(1, 4))?;
    save_csv(&data, out.join("custom.csv"))?;
    println!("custom mixture: contamination {:.4}", data.contamination());
    Ok(())
}
