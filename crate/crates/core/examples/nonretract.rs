//! Branch points accumulating at the end of a finite branch: their distances
//! to it shrink to 0, so no nearest point exists in the core.

use tower_trees::generators::gen_example_nonretract;

fn main() {
    let r = gen_example_nonretract(8).unwrap();
    for (i, radius, dist) in &r.branch_points {
        println!("branch point {i} at radius {radius}, distance {dist}");
    }
    println!("infimum {} attained: {}", r.infimum, r.attained);
    println!("end of the finite branch in the core: {}", r.x_in_core);
}
