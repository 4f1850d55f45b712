//! Graphviz source for the tree of a random tower: the core in bold, pruned
//! vertices dashed.

use tower_trees::generators::gen_random_tower;
use tower_trees::report::export_dot;

fn main() {
    let t = gen_random_tower(2, 4, 3, 0.4).unwrap();
    print!("{}", export_dot(&t));
}
