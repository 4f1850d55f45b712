//! Rooted simplicial trees with unit edges, points on edges, and the passage
//! between towers and trees.

use std::collections::{BTreeMap, HashMap};

use num::{One, Zero};
use thiserror::Error;

use crate::exact::{int, Rational};
use crate::tower::Tower;

pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("sphere index {n} out of range 0..={depth}")]
    IndexOutOfRange { n: usize, depth: usize },
    #[error("vertex {0} not found")]
    VertexNotFound(String),
    #[error("malformed tree: {0}")]
    Malformed(String),
}

/// A rooted tree; vertex 0 is the root and sits at radius 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    labels: Vec<String>,
    parent: Vec<Option<Vertex>>,
    radius: Vec<usize>,
    children: Vec<Vec<Vertex>>,
    spheres: Vec<Vec<Vertex>>,
}

/// A point on the edge from `parent(base)` to `base`, at `offset ∈ (0, 1]`
/// from the parent. The root is `(root, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreePoint {
    pub base: Vertex,
    pub offset: Rational,
}

impl TreePoint {
    pub fn vertex(v: Vertex) -> Self {
        TreePoint {
            base: v,
            offset: Rational::one(),
        }
    }

    pub fn as_vertex(&self) -> Option<Vertex> {
        self.offset.is_one().then_some(self.base)
    }
}

pub const ROOT: Vertex = 0;
pub const ROOT_LABEL: &str = "v";

impl RootedTree {
    /// Builds a tree from labels and parent links; `parents[0]` must be `None`
    /// and every other vertex must reach the root.
    pub fn from_parents(
        labels: Vec<String>,
        parents: Vec<Option<Vertex>>,
    ) -> Result<Self, TreeError> {
        let n = labels.len();
        if n < 2 || parents.len() != n {
            return Err(TreeError::Malformed(
                "need a root and at least one edge".into(),
            ));
        }
        if parents[0].is_some() {
            return Err(TreeError::Malformed("vertex 0 must be the root".into()));
        }
        let mut radius = vec![usize::MAX; n];
        radius[0] = 0;
        let mut children = vec![Vec::new(); n];
        for (v, p) in parents.iter().enumerate().skip(1) {
            let p = p.ok_or_else(|| TreeError::Malformed(format!("vertex {v} has no parent")))?;
            if p >= n {
                return Err(TreeError::Malformed(format!("parent of {v} out of range")));
            }
            children[p].push(v);
        }
        let mut stack = vec![ROOT];
        let mut seen = 1;
        while let Some(u) = stack.pop() {
            for &c in &children[u] {
                radius[c] = radius[u] + 1;
                seen += 1;
                stack.push(c);
            }
        }
        if seen != n {
            return Err(TreeError::Malformed(
                "some vertex does not reach the root".into(),
            ));
        }
        let depth = *radius.iter().max().unwrap();
        let mut spheres = vec![Vec::new(); depth + 1];
        for (v, &r) in radius.iter().enumerate() {
            spheres[r].push(v);
        }
        let mut seen_labels = HashMap::new();
        for (v, l) in labels.iter().enumerate() {
            if let Some(u) = seen_labels.insert((radius[v], l.as_str()), v) {
                return Err(TreeError::Malformed(format!(
                    "label {l:?} repeated at radius {} (vertices {u}, {v})",
                    radius[v]
                )));
            }
        }
        Ok(RootedTree {
            labels,
            parent: parents,
            radius,
            children,
            spheres,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest vertex radius.
    pub fn depth(&self) -> usize {
        self.spheres.len() - 1
    }

    pub fn root(&self) -> Vertex {
        ROOT
    }

    pub fn label(&self, v: Vertex) -> &str {
        &self.labels[v]
    }

    pub fn radius(&self, v: Vertex) -> usize {
        self.radius[v]
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        self.parent[v]
    }

    pub fn children(&self, v: Vertex) -> &[Vertex] {
        &self.children[v]
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.labels.len()
    }

    /// Non-root vertices, each standing for the edge to its parent.
    pub fn edges(&self) -> impl Iterator<Item = Vertex> {
        1..self.labels.len()
    }

    /// `C_n`, the vertices at radius `n`.
    pub fn sphere(&self, n: usize) -> Result<&[Vertex], TreeError> {
        self.spheres
            .get(n)
            .map(Vec::as_slice)
            .ok_or(TreeError::IndexOutOfRange {
                n,
                depth: self.depth(),
            })
    }

    pub fn find(&self, radius: usize, label: &str) -> Result<Vertex, TreeError> {
        self.spheres
            .get(radius)
            .and_then(|s| s.iter().copied().find(|&v| self.labels[v] == label))
            .ok_or_else(|| TreeError::VertexNotFound(format!("{radius}:{label}")))
    }

    /// The ancestor of `v` at radius `r <= radius(v)`.
    pub fn ancestor(&self, mut v: Vertex, r: usize) -> Vertex {
        debug_assert!(r <= self.radius[v]);
        while self.radius[v] > r {
            v = self.parent[v].unwrap();
        }
        v
    }

    pub fn vertex_meet(&self, mut a: Vertex, mut b: Vertex) -> Vertex {
        while self.radius[a] > self.radius[b] {
            a = self.parent[a].unwrap();
        }
        while self.radius[b] > self.radius[a] {
            b = self.parent[b].unwrap();
        }
        while a != b {
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
        }
        a
    }

    pub fn is_ancestor(&self, a: Vertex, b: Vertex) -> bool {
        self.radius[a] <= self.radius[b] && self.ancestor(b, self.radius[a]) == a
    }

    /// `T_c`: `c` and all its descendants, in depth-first order.
    pub fn subtree_at(&self, c: Vertex) -> Result<Vec<Vertex>, TreeError> {
        if c >= self.len() {
            return Err(TreeError::VertexNotFound(format!("#{c}")));
        }
        let mut out = Vec::new();
        let mut stack = vec![c];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend(self.children[u].iter().rev());
        }
        Ok(out)
    }

    /// Normalizes `(base, offset)` so that offset 0 becomes the parent vertex.
    pub fn point(&self, base: Vertex, offset: Rational) -> TreePoint {
        assert!(
            offset >= Rational::zero() && offset <= Rational::one(),
            "offset out of [0,1]"
        );
        match self.parent[base] {
            Some(p) if offset.is_zero() => TreePoint::vertex(p),
            Some(_) => TreePoint { base, offset },
            None => TreePoint::vertex(ROOT),
        }
    }

    pub fn point_radius(&self, p: &TreePoint) -> Rational {
        int(self.radius[p.base] as i64) - Rational::one() + p.offset
    }

    /// The point at radius `r` on the segment from the root to `p`.
    pub fn ancestor_point(&self, p: &TreePoint, r: Rational) -> TreePoint {
        let rp = self.point_radius(p);
        assert!(
            r >= Rational::zero() && r <= rp,
            "radius {r} outside [0, {rp}]"
        );
        if r == rp {
            return *p;
        }
        if r.is_zero() {
            return TreePoint::vertex(ROOT);
        }
        let top = r.ceil().to_integer() as usize;
        let v = self.ancestor(p.base, top);
        let offset = r - int(top as i64) + Rational::one();
        TreePoint { base: v, offset }
    }

    /// Deepest common point of the segments `[root, x]` and `[root, y]`.
    pub fn point_meet(&self, x: &TreePoint, y: &TreePoint) -> TreePoint {
        if x.base == y.base {
            return if x.offset <= y.offset { *x } else { *y };
        }
        let c = self.vertex_meet(x.base, y.base);
        if c == x.base {
            *x
        } else if c == y.base {
            *y
        } else {
            TreePoint::vertex(c)
        }
    }

    /// Meet and exact distance of two points.
    pub fn geodesic_data(&self, x: &TreePoint, y: &TreePoint) -> (TreePoint, Rational) {
        let m = self.point_meet(x, y);
        let d = self.point_radius(x) + self.point_radius(y) - int(2) * self.point_radius(&m);
        (m, d)
    }

    pub fn distance(&self, x: &TreePoint, y: &TreePoint) -> Rational {
        self.geodesic_data(x, y).1
    }

    /// The point at distance `t` from `x` along the geodesic to `y`.
    pub fn along_geodesic(&self, x: &TreePoint, y: &TreePoint, t: Rational) -> TreePoint {
        let m = self.point_meet(x, y);
        let (rx, ry, rm) = (
            self.point_radius(x),
            self.point_radius(y),
            self.point_radius(&m),
        );
        let up = rx - rm;
        if t <= up {
            self.ancestor_point(x, rx - t)
        } else {
            let down = t - up;
            assert!(down <= ry - rm, "parameter beyond the geodesic");
            self.ancestor_point(y, rm + down)
        }
    }

    /// Vertices that lie on a root path reaching the full depth.
    pub fn core_mask(&self) -> Vec<bool> {
        let mut keep = vec![false; self.len()];
        for &leaf in &self.spheres[self.depth()] {
            let mut v = Some(leaf);
            while let Some(u) = v {
                if keep[u] {
                    break;
                }
                keep[u] = true;
                v = self.parent[u];
            }
        }
        keep
    }

    /// Subtree on the kept vertices (which must be closed under parents), with
    /// the map from old to new vertex numbers.
    pub fn restrict(&self, keep: &[bool]) -> (RootedTree, Vec<Option<Vertex>>) {
        let mut renumber = vec![None; self.len()];
        let mut labels = Vec::new();
        let mut parents = Vec::new();
        for v in self.vertices().filter(|&v| keep[v]) {
            renumber[v] = Some(labels.len());
            labels.push(self.labels[v].clone());
            parents
                .push(self.parent[v].map(|p| renumber[p].expect("kept set closed under parents")));
        }
        let t = RootedTree::from_parents(labels, parents).expect("restriction is a tree");
        (t, renumber)
    }

    /// The core at truncation: the union of the full-depth branches.
    pub fn max_geodesic_subtree(&self) -> RootedTree {
        self.restrict(&self.core_mask()).0
    }

    /// Every vertex below the full depth has a child.
    pub fn is_geodesically_complete(&self) -> bool {
        let d = self.depth();
        self.vertices()
            .all(|v| self.radius[v] == d || !self.children[v].is_empty())
    }

    /// Canonical string of the unlabeled rooted shape; equal iff isomorphic.
    pub fn canonical_shape(&self) -> String {
        fn go(t: &RootedTree, v: Vertex) -> String {
            let mut parts: Vec<String> = t.children[v].iter().map(|&c| go(t, c)).collect();
            parts.sort();
            format!("({})", parts.concat())
        }
        go(self, ROOT)
    }
}

/// `T_X`: the root `v`, one vertex per element, and edges `{x, p_n(x)}`, `{x_1, v}`.
pub fn tree_of_tower(t: &Tower) -> RootedTree {
    let mut labels = vec![ROOT_LABEL.to_string()];
    let mut parents = vec![None];
    let mut prev_start = 0;
    for n in 1..=t.depth() {
        let level = t.level(n);
        let start = labels.len();
        for (i, id) in level.ids().iter().enumerate() {
            labels.push(id.clone());
            parents.push(Some(if n == 1 {
                ROOT
            } else {
                prev_start + t.bond(n - 1)[i]
            }));
        }
        prev_start = start;
    }
    RootedTree::from_parents(labels, parents).expect("towers give trees")
}

/// Spheres become levels and parent links become bonds.
pub fn tower_of_tree(t: &RootedTree) -> Tower {
    let d = t.depth();
    let mut position = BTreeMap::new();
    let mut levels = Vec::with_capacity(d);
    for n in 1..=d {
        let sphere = &t.spheres[n];
        for (i, &v) in sphere.iter().enumerate() {
            position.insert(v, i);
        }
        levels.push(sphere.iter().map(|&v| t.labels[v].clone()).collect());
    }
    let bonds = (1..d)
        .map(|n| {
            t.spheres[n + 1]
                .iter()
                .map(|&v| position[&t.parent[v].unwrap()])
                .collect()
        })
        .collect();
    Tower::from_indices(levels, bonds).expect("spheres of a tree form a tower")
}
