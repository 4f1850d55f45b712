//! Rational distances rounded onto the grid e^-k by a simplicial tree; each
//! ratio lands in (1/e, 1].

use tower_trees::ends::{bilipschitz_bounds, simplicialize, Distance};
use tower_trees::format::parse_distance_matrix;

const MATRIX: &str = "
     x     y     z     w
x    0     1/9   1/2   1/2
y    1/9   0     1/2   1/2
z    1/2   1/2   0     1/40
w    1/2   1/2   1/40  0
";

fn main() {
    let u = parse_distance_matrix(MATRIX).unwrap();
    let (tree, corr) = simplicialize(&u).unwrap();
    println!("tree: {} vertices, depth {}", tree.len(), tree.depth());
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            let Distance::Rational(d) = u.distance(i, j) else {
                unreachable!()
            };
            println!(
                "  {}-{}: {d} -> e^-{}",
                u.points()[i],
                u.points()[j],
                corr.exponents[i][j]
            );
        }
    }
    let b = bilipschitz_bounds(&corr);
    println!(
        "ratio range [{:.4}, {:.4}], above 1/e = {:.4}",
        b.min_ratio,
        b.max_ratio,
        (-1f64).exp()
    );
}
