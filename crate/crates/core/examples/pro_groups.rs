//! Towers of groups: threads of the limit, the translation isometry, the
//! (M)/(E) conditions and the isomorphism onto the core.

use std::sync::Arc;

use tower_trees::progroup::{
    check_condition_e, check_condition_m, check_translation_isometry, core_iso_construction,
    cyclic_reduction_tower, limit_threads, thread_distance, GroupHom, GroupLevelMorphism,
};

fn main() {
    let g = cyclic_reduction_tower(&[2, 4, 8]).unwrap();
    let threads = limit_threads(&g);
    println!("{} threads", threads.len());
    println!(
        "distance of {:?} and {:?}: {:?}",
        threads[0].0,
        threads[2].0,
        thread_distance(&threads[0], &threads[2]).unwrap()
    );
    println!("isometry: {:?}", check_translation_isometry(&g).unwrap());

    let four = Arc::new(cyclic_reduction_tower(&[4, 4, 4]).unwrap());
    let two = Arc::new(cyclic_reduction_tower(&[2, 2, 2]).unwrap());
    let f = GroupLevelMorphism::new(four, two, vec![GroupHom::Table(vec![0, 1, 0, 1]); 3]).unwrap();
    println!(
        "reduction mod 2: (M) {:?}, (E) {:?}",
        check_condition_m(&f),
        check_condition_e(&f)
    );

    // Z/2 survives only at the bottom, so the core is 0 <- 0 <- 0
    let drop = Arc::new(cyclic_reduction_tower(&[2, 1, 1]).unwrap());
    let c = core_iso_construction(&drop).unwrap();
    let sizes: Vec<usize> = (1..=c.core.depth())
        .map(|n| c.core.elements(n).len())
        .collect();
    println!("core level sizes {sizes:?}");
    println!(
        "inclusion: (M) {:?}, (E) {:?}",
        check_condition_m(&c.inclusion),
        check_condition_e(&c.inclusion)
    );
    println!(
        "around the tower {:?}, around the core {:?}",
        c.around_tower, c.around_core
    );
}
