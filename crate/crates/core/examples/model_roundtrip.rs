//! Save a fitted model, load it back, and confirm the scores are unchanged.

use rotforest::io::{decode_model, encode_model, load_model, save_model};
use rotforest::{Algorithm, AnomalyScorer, ForestParams, Matrix, Model, RngStream};

fn main() -> rotforest::Result<()> {
    let mut rng = RngStream::new(8, 0);
    let points = Matrix::from_vec(500, 3, (0..1500).map(|_| rng.standard_normal()).collect())?;
    let probes = Matrix::from_vec(1000, 3, (0..3000).map(|_| rng.uniform(-4.0, 4.0)).collect())?;
    let dir = std::env::temp_dir();

    for algorithm in Algorithm::ALL {
        let model = Model::fit(algorithm, &points, ForestParams::new(50, 128).with_seed(1))?;
        let path = dir.join(format!("rotforest-example-{algorithm}.rifm"));
        save_model(&model, &path)?;
        let loaded = load_model(&path)?;

        let before = model.score_batch(&probes)?;
        let after = loaded.score_batch(&probes)?;
        let identical = before
            .iter()
            .zip(&after)
            .all(|(a, b)| a.to_bits() == b.to_bits());
        let size = std::fs::metadata(&path)?.len();
        println!("{algorithm:<8} {size:>7} bytes, 1000 probe scores bit-identical: {identical}");
        std::fs::remove_file(&path)?;
    }

    let bytes = encode_model(&Model::fit(
        Algorithm::Rif,
        &points,
        ForestParams::new(2, 16),
    )?);
    let mut corrupt = bytes.clone();
    corrupt.truncate(bytes.len() - 3);
    println!("truncated file: {}", decode_model(&corrupt).unwrap_err());
    corrupt = bytes;
    corrupt[0] = b'X';
    println!("bad magic: {}", decode_model(&corrupt).unwrap_err());
    Ok(())
}
