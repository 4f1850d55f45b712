//! End spaces of rooted trees as exact ultrametric spaces.
//!
//! Distances between ends are `e^{-t}` where `t` is the agreement depth. They
//! are stored as the integer `t` ("grid" distances) whenever possible; general
//! rational ultrametrics are turned into trees through integer thresholds.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{floor_neg_ln, fmt_rational, int, le_exp_neg, to_f64, Rational};
use crate::tree::{RootedTree, TreeError, Vertex, ROOT, ROOT_LABEL};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EndError {
    #[error("branch does not belong to this tree")]
    DifferentTrees,
    #[error("this construction needs grid distances")]
    UnsupportedMode,
    #[error("distance matrix is not square: {0}")]
    NotSquare(String),
    #[error("duplicate point id {0:?}")]
    DuplicatePoint(String),
    #[error("d({x}, {y}) is invalid: {reason}")]
    BadDistance {
        x: String,
        y: String,
        reason: String,
    },
    #[error("not an ultrametric: d({0}, {1}) > max(d({0}, {2}), d({2}, {1}))")]
    NotUltrametric(String, String, String),
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error("negative height")]
    NegativeHeight,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A root-based path `(v, x_1, ..., x_k)` ending at a leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub vertices: Vec<Vertex>,
    /// Reaches the depth of the tree.
    pub complete: bool,
}

impl Branch {
    pub fn leaf(&self) -> Vertex {
        *self.vertices.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() <= 1
    }
}

/// Every maximal root-to-leaf path, in depth-first order.
pub fn branches(t: &RootedTree) -> Vec<Branch> {
    let d = t.depth();
    let mut out = Vec::new();
    let mut path = vec![ROOT];
    fn walk(t: &RootedTree, d: usize, path: &mut Vec<Vertex>, out: &mut Vec<Branch>) {
        let v = *path.last().unwrap();
        if t.children(v).is_empty() {
            out.push(Branch {
                vertices: path.clone(),
                complete: t.radius(v) == d,
            });
            return;
        }
        for &c in t.children(v) {
            path.push(c);
            walk(t, d, path, out);
            path.pop();
        }
    }
    walk(t, d, &mut path, &mut out);
    out
}

/// Length of the common prefix of two branches; `Infinite` for equal branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgreementDepth {
    Finite(usize),
    Infinite,
}

impl AgreementDepth {
    /// `e^{-t}` for display.
    pub fn distance_f64(&self) -> f64 {
        match self {
            AgreementDepth::Finite(t) => (-(*t as f64)).exp(),
            AgreementDepth::Infinite => 0.0,
        }
    }
}

impl Ord for AgreementDepth {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (AgreementDepth::Infinite, AgreementDepth::Infinite) => Ordering::Equal,
            (AgreementDepth::Infinite, _) => Ordering::Greater,
            (_, AgreementDepth::Infinite) => Ordering::Less,
            (AgreementDepth::Finite(a), AgreementDepth::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for AgreementDepth {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for AgreementDepth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgreementDepth::Finite(t) => write!(f, "{t}"),
            AgreementDepth::Infinite => write!(f, "inf"),
        }
    }
}

fn check_branch(t: &RootedTree, b: &Branch) -> Result<(), EndError> {
    let ok = b.vertices.first() == Some(&ROOT)
        && b.vertices.iter().all(|&v| v < t.len())
        && b.vertices.windows(2).all(|w| t.parent(w[1]) == Some(w[0]));
    if ok {
        Ok(())
    } else {
        Err(EndError::DifferentTrees)
    }
}

pub fn agreement(t: &RootedTree, f: &Branch, g: &Branch) -> Result<AgreementDepth, EndError> {
    check_branch(t, f)?;
    check_branch(t, g)?;
    if f.vertices == g.vertices {
        return Ok(AgreementDepth::Infinite);
    }
    let common = f
        .vertices
        .iter()
        .zip(&g.vertices)
        .take_while(|(a, b)| a == b)
        .count();
    Ok(AgreementDepth::Finite(common - 1))
}

/// Distances of a finite ultrametric space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Distances {
    /// `d(x, y) = e^{-k}`; the diagonal entry is ignored.
    Grid(Vec<Vec<u32>>),
    /// Exact rationals in `(0, 1]`; the diagonal is 0.
    Rational(Vec<Vec<Rational>>),
}

/// One distance value, exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distance {
    Zero,
    Exp(u32),
    Rational(Rational),
}

impl Distance {
    pub fn to_f64(&self) -> f64 {
        match self {
            Distance::Zero => 0.0,
            Distance::Exp(k) => (-(*k as f64)).exp(),
            Distance::Rational(r) => to_f64(r),
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Zero => write!(f, "0"),
            Distance::Exp(k) => write!(f, "e-{k}"),
            Distance::Rational(r) => write!(f, "{}", fmt_rational(r)),
        }
    }
}

/// Exact comparison of two distances (mixing an exponent with a rational is
/// decided by certified bounds on `e`).
pub fn cmp_distance(a: &Distance, b: &Distance) -> Ordering {
    use Distance::*;
    match (a, b) {
        (Zero, Zero) => Ordering::Equal,
        (Zero, _) => Ordering::Less,
        (_, Zero) => Ordering::Greater,
        (Exp(x), Exp(y)) => y.cmp(x),
        (Rational(x), Rational(y)) => x.cmp(y),
        (Rational(r), Exp(k)) => {
            if le_exp_neg(r, *k) {
                // r <= e^{-k}; equality is impossible for k >= 1
                if *k == 0 && *r == int(1) {
                    Ordering::Equal
                } else {
                    Ordering::Less
                }
            } else {
                Ordering::Greater
            }
        }
        (Exp(_), Rational(_)) => cmp_distance(b, a).reverse(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UltrametricSpace {
    points: Vec<String>,
    dist: Distances,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum UltrametricCheck {
    Valid,
    /// `d(x, y) > max(d(x, z), d(z, y))`.
    Violation(String, String, String),
}

impl UltrametricSpace {
    /// Checks ids, symmetry, zero diagonal and `0 < d <= 1` off the diagonal.
    /// The strong triangle inequality is left to [`verify_ultrametric`].
    pub fn new(points: Vec<String>, mut dist: Distances) -> Result<Self, EndError> {
        let n = points.len();
        let mut seen = HashSet::new();
        for p in &points {
            if !seen.insert(p.as_str()) {
                return Err(EndError::DuplicatePoint(p.clone()));
            }
        }
        let bad = |i: usize, j: usize, reason: &str| EndError::BadDistance {
            x: points[i].clone(),
            y: points[j].clone(),
            reason: reason.to_string(),
        };
        match &dist {
            Distances::Grid(m) => {
                if m.len() != n || m.iter().any(|r| r.len() != n) {
                    return Err(EndError::NotSquare(format!("{n} points")));
                }
                for i in 0..n {
                    for j in 0..n {
                        if i != j && m[i][j] != m[j][i] {
                            return Err(bad(i, j, "not symmetric"));
                        }
                    }
                }
                // the diagonal carries no exponent; keep it canonical for equality
                if let Distances::Grid(m) = &mut dist {
                    (0..n).for_each(|i| m[i][i] = 0);
                }
            }
            Distances::Rational(m) => {
                if m.len() != n || m.iter().any(|r| r.len() != n) {
                    return Err(EndError::NotSquare(format!("{n} points")));
                }
                for i in 0..n {
                    for j in 0..n {
                        let d = m[i][j];
                        if i == j {
                            if d != int(0) {
                                return Err(bad(i, j, "diagonal must be 0"));
                            }
                        } else if d <= int(0) || d > int(1) {
                            return Err(bad(i, j, "must lie in (0, 1]"));
                        } else if d != m[j][i] {
                            return Err(bad(i, j, "not symmetric"));
                        }
                    }
                }
            }
        }
        Ok(UltrametricSpace { points, dist })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn distances(&self) -> &Distances {
        &self.dist
    }

    pub fn is_grid(&self) -> bool {
        matches!(self.dist, Distances::Grid(_))
    }

    pub fn index_of(&self, id: &str) -> Result<usize, EndError> {
        self.points
            .iter()
            .position(|p| p == id)
            .ok_or_else(|| EndError::UnknownPoint(id.to_string()))
    }

    pub fn distance(&self, i: usize, j: usize) -> Distance {
        if i == j {
            return Distance::Zero;
        }
        match &self.dist {
            Distances::Grid(m) => Distance::Exp(m[i][j]),
            Distances::Rational(m) => Distance::Rational(m[i][j]),
        }
    }

    /// Grid exponent of a pair of distinct points, if in grid mode.
    pub fn exponent(&self, i: usize, j: usize) -> Option<u32> {
        match &self.dist {
            Distances::Grid(m) if i != j => Some(m[i][j]),
            _ => None,
        }
    }

    /// Largest `n` with `d(x, y) <= e^{-n}`: the simplicial agreement depth.
    pub fn threshold_exponent(&self, i: usize, j: usize) -> u32 {
        match &self.dist {
            Distances::Grid(m) => m[i][j],
            Distances::Rational(m) => floor_neg_ln(&m[i][j]),
        }
    }

    /// Histogram of grid exponents over unordered pairs.
    pub fn exponent_histogram(&self) -> BTreeMap<u32, usize> {
        let mut h = BTreeMap::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                *h.entry(self.threshold_exponent(i, j)).or_insert(0) += 1;
            }
        }
        h
    }
}

/// Exhaustive strong-triangle check over ordered triples of distinct points.
pub fn verify_ultrametric(u: &UltrametricSpace) -> UltrametricCheck {
    let n = u.len();
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            for z in 0..n {
                if z == x || z == y {
                    continue;
                }
                let (dxy, dxz, dzy) = (u.distance(x, y), u.distance(x, z), u.distance(z, y));
                let mx = if cmp_distance(&dxz, &dzy) == Ordering::Less {
                    dzy
                } else {
                    dxz
                };
                if cmp_distance(&dxy, &mx) == Ordering::Greater {
                    return UltrametricCheck::Violation(
                        u.points[x].clone(),
                        u.points[y].clone(),
                        u.points[z].clone(),
                    );
                }
            }
        }
    }
    UltrametricCheck::Valid
}

/// The end space of the core: complete branches named by their leaves, with
/// agreement depths as grid exponents.
pub fn end_space_of(t: &RootedTree) -> UltrametricSpace {
    let complete: Vec<Branch> = branches(t).into_iter().filter(|b| b.complete).collect();
    let points = complete
        .iter()
        .map(|b| t.label(b.leaf()).to_string())
        .collect();
    let n = complete.len();
    let mut m = vec![vec![0u32; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let common = complete[i]
                    .vertices
                    .iter()
                    .zip(&complete[j].vertices)
                    .take_while(|(a, b)| a == b)
                    .count();
                m[i][j] = (common - 1) as u32;
            }
        }
    }
    UltrametricSpace {
        points,
        dist: Distances::Grid(m),
    }
}

/// Trees built from an ultrametric, with the leaf carrying each point.
#[derive(Debug, Clone)]
pub struct Dendrogram {
    pub tree: RootedTree,
    pub leaves: Vec<Vertex>,
}

/// Vertices at heights `1..=levels`: `x ~ y` at height `n` iff `k(x, y) >= n`.
/// Each class is named by its first point.
fn dendrogram(u: &UltrametricSpace, k: &[Vec<u32>], levels: usize) -> Dendrogram {
    let n = u.len();
    let mut labels = vec![ROOT_LABEL.to_string()];
    let mut parents = vec![None];
    let mut current = vec![ROOT; n];
    for h in 1..=levels {
        let mut next = vec![usize::MAX; n];
        for i in 0..n {
            if next[i] != usize::MAX {
                continue;
            }
            let v = labels.len();
            labels.push(u.points[i].clone());
            parents.push(Some(current[i]));
            for j in i..n {
                if j == i || k[i][j] as usize >= h {
                    next[j] = v;
                }
            }
        }
        current = next;
    }
    let tree = RootedTree::from_parents(labels, parents).expect("classes nest");
    Dendrogram {
        tree,
        leaves: current,
    }
}

fn require_ultrametric(u: &UltrametricSpace) -> Result<(), EndError> {
    match verify_ultrametric(u) {
        UltrametricCheck::Valid => Ok(()),
        UltrametricCheck::Violation(x, y, z) => Err(EndError::NotUltrametric(x, y, z)),
    }
}

fn threshold_matrix(u: &UltrametricSpace) -> Vec<Vec<u32>> {
    let n = u.len();
    let mut k = vec![vec![0u32; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let e = u.threshold_exponent(i, j);
            k[i][j] = e;
            k[j][i] = e;
        }
    }
    k
}

/// `T_U` sampled at integer heights up to the largest exponent plus one.
pub fn tree_of_ultrametric(u: &UltrametricSpace) -> Result<Dendrogram, EndError> {
    let Distances::Grid(m) = &u.dist else {
        return Err(EndError::UnsupportedMode);
    };
    require_ultrametric(u)?;
    let top = (0..u.len())
        .flat_map(|i| (0..u.len()).filter(move |&j| j != i).map(move |j| m[i][j]))
        .max()
        .unwrap_or(0);
    Ok(dendrogram(u, m, top as usize + 1))
}

/// A distance in the dendrogram metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TuDistance {
    Exact(Rational),
    /// `-ln d` is irrational for rational `d`; accurate to about 1e-12.
    Approx(f64),
}

/// `D([x,t],[y,s]) = |t - s|` when `x = y`, else `t + s - 2 min(-ln d(x,y), t, s)`.
pub fn tu_distance(
    u: &UltrametricSpace,
    x: &str,
    t: Rational,
    y: &str,
    s: Rational,
) -> Result<TuDistance, EndError> {
    if t < int(0) || s < int(0) {
        return Err(EndError::NegativeHeight);
    }
    let (i, j) = (u.index_of(x)?, u.index_of(y)?);
    if i == j {
        return Ok(TuDistance::Exact(if t > s { t - s } else { s - t }));
    }
    Ok(match u.distance(i, j) {
        Distance::Exp(k) => {
            let low = int(k as i64).min(t).min(s);
            TuDistance::Exact(t + s - int(2) * low)
        }
        Distance::Rational(d) => {
            let low = (-to_f64(&d).ln()).min(to_f64(&t)).min(to_f64(&s));
            TuDistance::Approx(to_f64(&t) + to_f64(&s) - 2.0 * low)
        }
        Distance::Zero => unreachable!("distinct points"),
    })
}

/// Pairs each point with its end in a simplicial tree, keeping both distances.
#[derive(Debug, Clone)]
pub struct EndCorrespondence {
    pub points: Vec<String>,
    pub leaves: Vec<Vertex>,
    pub original: UltrametricSpace,
    /// Agreement depth of the paired ends.
    pub exponents: Vec<Vec<u32>>,
}

/// Integer-sphere discretization: `x ~ y` at level `n` iff `d(x, y) <= e^{-n}`.
pub fn simplicialize(u: &UltrametricSpace) -> Result<(RootedTree, EndCorrespondence), EndError> {
    require_ultrametric(u)?;
    let k = threshold_matrix(u);
    let top = k.iter().flatten().copied().max().unwrap_or(0);
    let d = dendrogram(u, &k, top as usize + 1);
    let corr = EndCorrespondence {
        points: u.points.clone(),
        leaves: d.leaves.clone(),
        original: u.clone(),
        exponents: k,
    };
    Ok((d.tree, corr))
}

/// Range of `d_original / d_simplicial` over all pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiLipschitz {
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Every ratio is `> 1/e`, decided exactly.
    pub lower_strict: bool,
    /// Every ratio is `<= 1`, decided exactly.
    pub upper_inclusive: bool,
}

/// The simplicial end distance `e^{-k}` dominates the original distance and
/// stays below `e` times it, so `d_original / d_simplicial ∈ (1/e, 1]`.
pub fn bilipschitz_bounds(c: &EndCorrespondence) -> BiLipschitz {
    let u = &c.original;
    let n = u.len();
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    let (mut lower_strict, mut upper_inclusive) = (true, true);
    for i in 0..n {
        for j in i + 1..n {
            let k = c.exponents[i][j];
            let ratio = u.distance(i, j).to_f64() * (k as f64).exp();
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            let d = u.distance(i, j);
            upper_inclusive &= cmp_distance(&d, &Distance::Exp(k)) != Ordering::Greater;
            lower_strict &= cmp_distance(&d, &Distance::Exp(k + 1)) == Ordering::Greater;
        }
    }
    BiLipschitz {
        min_ratio: lo,
        max_ratio: hi,
        lower_strict,
        upper_inclusive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::tower::fixtures::tower_a;
    use crate::tree::fixtures::binary;
    use crate::tree::tree_of_tower;

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn grid(xs: &[&str], m: Vec<Vec<u32>>) -> UltrametricSpace {
        UltrametricSpace::new(names(xs), Distances::Grid(m)).unwrap()
    }

    #[test]
    fn branches_of_tower_a() {
        let t = tree_of_tower(&tower_a());
        let bs = branches(&t);
        let shown: Vec<(Vec<&str>, bool)> = bs
            .iter()
            .map(|b| (b.vertices.iter().map(|&v| t.label(v)).collect(), b.complete))
            .collect();
        assert_eq!(
            shown,
            [
                (vec!["v", "a", "b1", "c1"], true),
                (vec!["v", "a", "b2"], false)
            ]
        );
        assert_eq!(
            agreement(&t, &bs[0], &bs[1]).unwrap(),
            AgreementDepth::Finite(1)
        );
        assert_eq!(
            agreement(&t, &bs[0], &bs[0]).unwrap(),
            AgreementDepth::Infinite
        );
        let bogus = Branch {
            vertices: vec![0, 3],
            complete: false,
        };
        assert_eq!(agreement(&t, &bogus, &bs[0]), Err(EndError::DifferentTrees));
    }

    #[test]
    fn binary_tree_end_space() {
        assert_eq!(branches(&binary(4)).len(), 16);
        let u = end_space_of(&binary(3));
        assert_eq!(u.len(), 8);
        assert_eq!(
            u.exponent_histogram().keys().copied().collect::<Vec<_>>(),
            [0, 1, 2]
        );
        assert_eq!(verify_ultrametric(&u), UltrametricCheck::Valid);
        let roots_only = binary(1);
        let bs = branches(&roots_only);
        assert_eq!(
            agreement(&roots_only, &bs[0], &bs[1]).unwrap(),
            AgreementDepth::Finite(0)
        );
    }

    #[test]
    fn tower_a_end_space_is_a_point() {
        let u = end_space_of(&tree_of_tower(&tower_a()));
        assert_eq!(u.points(), ["c1"]);
    }

    #[test]
    fn violation_triple() {
        let m = vec![
            vec![int(0), int(1), rat(1, 4)],
            vec![int(1), int(0), rat(1, 2)],
            vec![rat(1, 4), rat(1, 2), int(0)],
        ];
        let u = UltrametricSpace::new(names(&["a", "b", "c"]), Distances::Rational(m)).unwrap();
        let UltrametricCheck::Violation(x, y, z) = verify_ultrametric(&u) else {
            panic!("expected a violation")
        };
        let mut pair = [x, y];
        pair.sort();
        assert_eq!(
            (pair, z.as_str()),
            ([String::from("a"), String::from("b")], "c")
        );
        assert!(simplicialize(&u).is_err());
    }

    #[test]
    fn small_spaces_are_valid() {
        let one = grid(&["x"], vec![vec![0]]);
        assert_eq!(verify_ultrametric(&one), UltrametricCheck::Valid);
        let two = grid(&["x", "y"], vec![vec![0, 2], vec![2, 0]]);
        assert_eq!(verify_ultrametric(&two), UltrametricCheck::Valid);
    }

    #[test]
    fn dendrogram_two_points() {
        let u = grid(&["x", "y"], vec![vec![0, 2], vec![2, 0]]);
        let d = tree_of_ultrametric(&u).unwrap();
        // shared path 0..2, fork at height 3
        assert_eq!(d.tree.sphere(2).unwrap().len(), 1);
        assert_eq!(d.tree.sphere(3).unwrap().len(), 2);
        assert_eq!(end_space_of(&d.tree), u);
        let one = tree_of_ultrametric(&grid(&["x"], vec![vec![0]])).unwrap();
        assert_eq!(one.tree.len(), 2);
    }

    #[test]
    fn dendrogram_two_pairs() {
        let m = vec![
            vec![0, 3, 1, 1],
            vec![3, 0, 1, 1],
            vec![1, 1, 0, 3],
            vec![1, 1, 3, 0],
        ];
        let u = grid(&["a", "b", "c", "d"], m);
        let d = tree_of_ultrametric(&u).unwrap();
        let t = &d.tree;
        assert_eq!(t.sphere(1).unwrap().len(), 1);
        assert_eq!(t.sphere(2).unwrap().len(), 2);
        assert_eq!(t.sphere(3).unwrap().len(), 2);
        assert_eq!(t.sphere(4).unwrap().len(), 4);
        assert_eq!(end_space_of(t), u);
        assert_eq!(
            tree_of_ultrametric(
                &UltrametricSpace::new(
                    names(&["p", "q"]),
                    Distances::Rational(vec![vec![int(0), rat(1, 2)], vec![rat(1, 2), int(0)]])
                )
                .unwrap()
            )
            .unwrap_err(),
            EndError::UnsupportedMode
        );
    }

    #[test]
    fn tu_distances() {
        let u = grid(&["x", "y"], vec![vec![0, 2], vec![2, 0]]);
        assert_eq!(
            tu_distance(&u, "x", int(3), "x", int(1)).unwrap(),
            TuDistance::Exact(int(2))
        );
        assert_eq!(
            tu_distance(&u, "x", int(5), "y", int(5)).unwrap(),
            TuDistance::Exact(int(6))
        );
        assert_eq!(
            tu_distance(&u, "x", int(0), "y", int(0)).unwrap(),
            TuDistance::Exact(int(0))
        );
        let r = UltrametricSpace::new(
            names(&["x", "y"]),
            Distances::Rational(vec![vec![int(0), rat(3, 10)], vec![rat(3, 10), int(0)]]),
        )
        .unwrap();
        let TuDistance::Approx(v) = tu_distance(&r, "x", int(2), "y", int(2)).unwrap() else {
            panic!()
        };
        assert!((v - (4.0 + 2.0 * 0.3f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn simplicialize_point_three() {
        let u = UltrametricSpace::new(
            names(&["x", "y"]),
            Distances::Rational(vec![vec![int(0), rat(3, 10)], vec![rat(3, 10), int(0)]]),
        )
        .unwrap();
        let (t, c) = simplicialize(&u).unwrap();
        // e^-2 < 0.3 <= e^-1: together at level 1, apart at level 2
        assert_eq!(t.sphere(1).unwrap().len(), 1);
        assert_eq!(t.sphere(2).unwrap().len(), 2);
        assert_eq!(c.exponents[0][1], 1);
        // calibrate the direction by brute force: only old/new lands in (1/e, 1]
        let (old, new) = (0.3f64, (-1.0f64).exp());
        let inv_e = (-1.0f64).exp();
        assert!(new / old > 1.0);
        assert!(old / new > inv_e && old / new <= 1.0);
        let b = bilipschitz_bounds(&c);
        assert!((b.min_ratio - old / new).abs() < 1e-12);
        assert!(b.lower_strict && b.upper_inclusive);
    }

    #[test]
    fn simplicialize_grid_is_isometric() {
        let m = vec![
            vec![0, 3, 1, 1],
            vec![3, 0, 1, 1],
            vec![1, 1, 0, 3],
            vec![1, 1, 3, 0],
        ];
        let u = grid(&["a", "b", "c", "d"], m);
        let (t, c) = simplicialize(&u).unwrap();
        assert_eq!(
            t.canonical_shape(),
            tree_of_ultrametric(&u).unwrap().tree.canonical_shape()
        );
        let b = bilipschitz_bounds(&c);
        assert_eq!((b.min_ratio, b.max_ratio), (1.0, 1.0));
    }

    #[test]
    fn mixed_comparisons() {
        assert_eq!(
            cmp_distance(&Distance::Rational(rat(3, 10)), &Distance::Exp(1)),
            Ordering::Less
        );
        assert_eq!(
            cmp_distance(&Distance::Rational(rat(3, 10)), &Distance::Exp(2)),
            Ordering::Greater
        );
        assert_eq!(
            cmp_distance(&Distance::Rational(int(1)), &Distance::Exp(0)),
            Ordering::Equal
        );
    }
}
