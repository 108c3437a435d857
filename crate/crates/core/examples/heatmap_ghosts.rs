//! Score heatmaps of the two-Gaussian dataset for each detector.
//!
//! Axis-aligned splits leave low-score "ghost" regions between the clusters
//! where no data lives; the PGM images make them visible. Dark pixels are
//! high anomaly scores.
//!
//! ```text
//! cargo run --release --example heatmap_ghosts -- [out_dir]
//! ```

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use rotforest::datagen::Preset;
use rotforest::harness::{heatmap, GridSpec};
use rotforest::{Algorithm, ForestParams, Model, RngStream};

fn main() -> rotforest::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "heatmaps".into()));
    std::fs::create_dir_all(&out)?;

    let data = Preset::TwoGaussiansCenter
        .spec()
        .generate(&mut RngStream::new(0, 4))?;
    let grid = GridSpec::unit_30();
    // (row, col) cells: a cluster centre at (0.8, 0.2), and the empty spots
    // (0.2, 0.2) and (0.8, 0.8) where the clusters' axis projections cross.
    let cluster = (6, 24);
    let ghosts = [(6, 6), (24, 24)];

    for algorithm in Algorithm::ALL {
        let model = Model::fit(
            algorithm,
            &data.points,
            ForestParams::default().with_seed(1),
        )?;
        let map = heatmap(&model, grid)?;
        map.write_csv(BufWriter::new(File::create(
            out.join(format!("{algorithm}.csv")),
        )?))?;
        map.write_pgm(BufWriter::new(File::create(
            out.join(format!("{algorithm}.pgm")),
        )?))?;

        println!(
            "{algorithm:<8} cluster {:.3}  centre {:.3}  ghosts {:.3} {:.3}",
            map.get(cluster.0, cluster.1),
            map.get(15, 15),
            map.get(ghosts[0].0, ghosts[0].1),
            map.get(ghosts[1].0, ghosts[1].1)
        );
    }
    println!("grid {grid}, files in {}", out.display());
    Ok(())
}
