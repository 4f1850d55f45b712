//! A three-level tower, its ML verdict, its tree and the core of that tree.

use std::collections::BTreeMap;

use tower_trees::tower::{InverseSequence, Tower};
use tower_trees::tree::{tower_of_tree, tree_of_tower};

fn main() {
    let ids = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let bond = |pairs: &[(&str, &str)]| -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    };
    // b2 has no successor, so the last level decides what survives
    let t = Tower::new(
        vec![ids(&["a"]), ids(&["b1", "b2"]), ids(&["c1"])],
        vec![bond(&[("b1", "a"), ("b2", "a")]), bond(&[("c1", "b1")])],
    )
    .unwrap();
    println!("level sizes {:?}", t.level_sizes());
    println!("image of level 3 in level 2: {:?}", t.image_indices(2, 3));

    let report = t.ml_verdict();
    println!(
        "ML verdict {:?} up to level {}",
        report.verdict, report.horizon
    );
    for s in &report.per_level {
        println!(
            "  level {} stabilizes at {:?}, margin {:?}",
            s.level, s.stabilizes_at, s.margin
        );
    }

    let tree = tree_of_tower(&t);
    println!("tree has {} vertices, depth {}", tree.len(), tree.depth());
    let core = tree.max_geodesic_subtree();
    println!(
        "core has {} vertices, levels {:?}",
        core.len(),
        tower_of_tree(&core).level_sizes()
    );
    assert_eq!(tower_of_tree(&tree), t);
}
