//! A morphism of towers becomes a non-expansive proper map of trees, and the
//! map gives the morphism back up to equivalence.

use std::sync::Arc;

use tower_trees::generators::{gen_random_morphism_into, gen_random_tower};
use tower_trees::maps::{
    check_nonexpansive, extract_morphism, homotopy_properness, induce_tree_map, properness_witness,
};
use tower_trees::tower::morphisms_equivalent;

fn main() {
    let target = Arc::new(gen_random_tower(7, 8, 4, 0.7).unwrap());
    let m = gen_random_morphism_into(11, target, 4, 1).unwrap();
    println!("index function {:?}", m.index_function());

    let f = induce_tree_map(&m).unwrap();
    println!("schedule {:?}", f.schedule);
    println!("non-expansive: {:?}", check_nonexpansive(&f.map));
    if let Some(w) = properness_witness(&f.map).witness() {
        println!("properness witness {:?}", w.table);
    }

    let back = extract_morphism(&f.map).unwrap();
    println!("extracted index function {:?}", back.index_function());
    println!(
        "equivalent to the original: {:?}",
        morphisms_equivalent(&back, &m).unwrap()
    );

    let again = induce_tree_map(&back).unwrap();
    println!(
        "proper homotopy to the first map: {}",
        homotopy_properness(&again.map, &f.map).unwrap().is_total()
    );
}
