//! The windowed integers with bonds z -> 2z: the ML witness, the single
//! thread of the limit, and a retraction that is not proper.

use std::sync::Arc;

use tower_trees::generators::gen_solenoid;
use tower_trees::maps::{properness_upto, retraction_map};
use tower_trees::progroup::limit_threads;
use tower_trees::tower::InverseSequence;
use tower_trees::tree::{tower_of_tree, tree_of_tower};

fn main() {
    let s = gen_solenoid(&[2], 1024, 11).unwrap();
    println!("level sizes {:?}", s.tower.level_sizes());

    let report = s.generator.ml_verdict();
    println!("verdict {:?}", report.verdict);
    if let Some(w) = &report.witness {
        println!("no stable image for level {}:", w.level);
        for d in w.defeats.iter().take(5) {
            println!(
                "  {} extends to level {} but not to {}",
                d.element, d.extendable_to, d.fails_at
            );
        }
    }

    let tree = Arc::new(tree_of_tower(&s.tower));
    let core = tower_of_tree(&tree.max_geodesic_subtree());
    println!(
        "core levels {:?}",
        (1..=core.depth())
            .map(|n| core.level(n).ids().join(","))
            .collect::<Vec<_>>()
    );
    println!("threads of the limit: {}", limit_threads(&s.group).len());
    println!(
        "retraction onto the core: {:?}",
        properness_upto(&retraction_map(&tree), 10).is_total()
    );
}
