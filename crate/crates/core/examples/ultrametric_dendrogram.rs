//! A distance matrix on the grid e^-k, the tree whose ends realize it, and
//! the end space read back off the tree.

use tower_trees::ends::{end_space_of, tree_of_ultrametric, verify_ultrametric};
use tower_trees::format::{emit_distance_matrix, parse_distance_matrix};

const MATRIX: &str = "
# two clusters that split at depth 1
     a    b    c    d
a    0    e-3  e-1  e-1
b    e-3  0    e-1  e-1
c    e-1  e-1  0    e-2
d    e-1  e-1  e-2  0
";

fn main() {
    let u = parse_distance_matrix(MATRIX).unwrap();
    println!("{:?}", verify_ultrametric(&u));
    let d = tree_of_ultrametric(&u).unwrap();
    println!("tree: {} vertices, depth {}", d.tree.len(), d.tree.depth());
    println!("shape {}", d.tree.canonical_shape());
    let back = end_space_of(&d.tree);
    print!("{}", emit_distance_matrix(&back));
    assert_eq!(back.distance(0, 1), u.distance(0, 1));
}
