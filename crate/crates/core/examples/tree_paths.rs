//! Grow a single isolation tree and follow probes down to their leaves.

use rotforest::tree::{c_factor, AxisSplitter, ITree, Node};
use rotforest::{Matrix, RngStream};

fn main() -> rotforest::Result<()> {
    let mut rng = RngStream::new(4, 0);
    let data: Vec<f64> = (0..256 * 2).map(|_| rng.uniform(0.0, 1.0)).collect();
    let points = Matrix::from_vec(256, 2, data)?;

    let tree = ITree::build(&points, 8, &AxisSplitter, &mut RngStream::new(4, 1))?;
    let leaves: Vec<(usize, usize)> = tree.leaves().collect();
    println!(
        "{} nodes, {} leaves, {} training points",
        tree.nodes().len(),
        leaves.len(),
        leaves.iter().map(|(size, _)| size).sum::<usize>()
    );

    for probe in [[0.5, 0.5], [0.01, 0.99], [2.0, 2.0]] {
        let leaf = tree.leaf_index(&probe);
        let Node::Leaf { size, level } = tree.nodes()[leaf] else {
            unreachable!("leaf_index returns a leaf");
        };
        println!(
            "{probe:?}: leaf at level {level} holding {size}, path {level} + c({size}) = {:.4}",
            tree.path_length(&probe)
        );
    }

    println!("c(n) for n = 1, 2, 10, 256:");
    for n in [1, 2, 10, 256] {
        println!("  c({n}) = {:.10}", c_factor(n));
    }
    Ok(())
}
