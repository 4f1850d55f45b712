//! Levels past which consecutive maps of the example differ, and the
//! first k breaking a Hölder bound for each constant and exponent.

use tower_trees::generators::{gen_biholder, DEFAULT_C_GRID, DEFAULT_L_GRID};

fn main() {
    let t = gen_biholder(16, &DEFAULT_C_GRID, &DEFAULT_L_GRID).unwrap();
    println!("{:>3} {:>10} {:>5} {:>12}", "k", "d", "level", "e^-level");
    for r in &t.rows {
        println!(
            "{:>3} {:>10} {:>5} {:>12.3e}",
            r.k, r.d, r.separation_level, r.level_distance
        );
    }
    for s in &t.searches {
        println!(
            "C = {:>5}, l = {}: first violation at k = {:?}",
            s.c, s.l, s.first_violation
        );
    }
}
