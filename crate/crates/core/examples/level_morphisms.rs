//! A morphism with lagging index function turned into a level morphism, and
//! the simplicial tree map of a level morphism.

use std::sync::Arc;

use tower_trees::generators::{gen_random_morphism_into, gen_random_tower};
use tower_trees::maps::{homotopy_properness, induce_tree_map, simplicial_of_level};
use tower_trees::tower::levelize_morphism;

fn main() {
    let target = Arc::new(gen_random_tower(3, 8, 4, 0.8).unwrap());
    let m = gen_random_morphism_into(5, target.clone(), 4, 1).unwrap();
    println!(
        "index function {:?}, level: {}",
        m.index_function(),
        m.is_level()
    );
    let l = levelize_morphism(&m).unwrap();
    println!("levelized index function {:?}", l.level.index_function());

    let level = gen_random_morphism_into(9, target, 4, 0).unwrap();
    let s = simplicial_of_level(&level).unwrap();
    let f = induce_tree_map(&level).unwrap();
    println!(
        "simplicial map and induced map properly homotopic: {}",
        homotopy_properness(&s, &f.map).unwrap().is_total()
    );
}
