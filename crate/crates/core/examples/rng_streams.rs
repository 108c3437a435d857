//! Seeded streams and derived sub-streams.
//!
//! Every stochastic step draws from an [`RngStream`] identified by a seed and
//! a stream id. `derive` gives an independent child stream that depends only
//! on the parent's identity, never on how much the parent has been used, so
//! tree `i` of a forest is the same however many other trees are built.

use rotforest::RngStream;

fn main() -> rotforest::Result<()> {
    let root = RngStream::new(42, 0);

    let mut a = root.derive(7);
    let mut b = root.derive(7);
    let mut c = root.derive(8);
    println!("derive(7) twice: {:x} {:x}", a.next_u64(), b.next_u64());
    println!("derive(8):       {:x}", c.next_u64());

    let mut rng = root.derive(1);
    let mean = (0..100_000).map(|_| rng.uniform(0.0, 1.0)).sum::<f64>() / 1e5;
    println!("mean of 1e5 uniforms: {mean:.4}");
    println!("standard normal: {:.4}", rng.standard_normal());
    println!("unit vector in 3-D: {:.4?}", rng.unit_sphere_vector(3));
    println!(
        "5 of 20 without replacement: {:?}",
        rng.sample_without_replacement(20, 5)?
    );
    Ok(())
}
