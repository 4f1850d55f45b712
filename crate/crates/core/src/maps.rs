//! Piecewise-linear tree maps: the map induced by a tower morphism, the
//! morphism read off a proper map, and the checks that relate them.

use std::sync::Arc;

use num::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{int, Rational};
use crate::tower::{Tower, TowerError, TowerMorphism};
use crate::tree::{tower_of_tree, tree_of_tower, RootedTree, TreePoint, Vertex, ROOT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("maps do not share source and target")]
    SourceTargetMismatch,
    #[error("no schedule breakpoint fits within the depth")]
    DepthExhausted,
    #[error("map is not metrically proper at level {0} within the depth")]
    NotProper(usize),
    #[error("morphism is not a level morphism")]
    NotLevelMorphism,
    #[error("the root must map to the root")]
    RootNotFixed,
    #[error("image of vertex {0} is not a point of the target")]
    BadImage(Vertex),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// A rooted map determined by vertex images; each edge is sent linearly onto
/// the geodesic between the images of its endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeMap {
    source: Arc<RootedTree>,
    target: Arc<RootedTree>,
    images: Vec<TreePoint>,
}

impl TreeMap {
    pub fn new(
        source: Arc<RootedTree>,
        target: Arc<RootedTree>,
        images: Vec<TreePoint>,
    ) -> Result<Self, MapError> {
        if images.len() != source.len() {
            return Err(MapError::BadImage(images.len().min(source.len())));
        }
        for (v, p) in images.iter().enumerate() {
            let valid = p.base < target.len()
                && p.offset > Rational::zero()
                && p.offset <= Rational::one()
                && (p.base != ROOT || p.offset.is_one());
            if !valid {
                return Err(MapError::BadImage(v));
            }
        }
        if images[ROOT] != TreePoint::vertex(ROOT) {
            return Err(MapError::RootNotFixed);
        }
        Ok(TreeMap {
            source,
            target,
            images,
        })
    }

    pub fn identity(tree: Arc<RootedTree>) -> Self {
        let images = tree.vertices().map(TreePoint::vertex).collect();
        TreeMap {
            source: tree.clone(),
            target: tree,
            images,
        }
    }

    pub fn source(&self) -> &Arc<RootedTree> {
        &self.source
    }

    pub fn target(&self) -> &Arc<RootedTree> {
        &self.target
    }

    pub fn image(&self, v: Vertex) -> &TreePoint {
        &self.images[v]
    }

    pub fn images(&self) -> &[TreePoint] {
        &self.images
    }

    fn edge_ends(&self, e: Vertex) -> (&TreePoint, &TreePoint) {
        let p = self.source.parent(e).expect("edges are non-root vertices");
        (&self.images[p], &self.images[e])
    }

    /// Length of the geodesic an edge is stretched over.
    pub fn edge_length(&self, e: Vertex) -> Rational {
        let (a, b) = self.edge_ends(e);
        self.target.distance(a, b)
    }

    /// Smallest radius reached by the image of an edge.
    pub fn edge_floor(&self, e: Vertex) -> Rational {
        let (a, b) = self.edge_ends(e);
        self.target.point_radius(&self.target.point_meet(a, b))
    }

    /// Image of an arbitrary point.
    pub fn eval(&self, x: &TreePoint) -> TreePoint {
        if x.offset.is_one() {
            return self.images[x.base];
        }
        let (a, b) = self.edge_ends(x.base);
        let len = self.target.distance(a, b);
        self.target.along_geodesic(a, b, x.offset * len)
    }

    pub fn image_radius(&self, v: Vertex) -> Rational {
        self.target.point_radius(&self.images[v])
    }

    /// Image of the full branch through `v`, as the image points of its vertices.
    pub fn branch_image(&self, v: Vertex) -> Vec<TreePoint> {
        let mut path = vec![v];
        while let Some(p) = self.source.parent(*path.last().unwrap()) {
            path.push(p);
        }
        path.iter().rev().map(|&u| self.images[u]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonExpansive {
    Valid,
    Violation { edge: Vertex, length: String },
}

/// An edge-to-geodesic map is 1-Lipschitz iff no edge is stretched.
pub fn check_nonexpansive(f: &TreeMap) -> NonExpansive {
    for e in f.source.edges() {
        let len = f.edge_length(e);
        if len > Rational::one() {
            return NonExpansive::Violation {
                edge: e,
                length: crate::exact::fmt_rational(&len),
            };
        }
    }
    NonExpansive::Valid
}

/// `table[n - 1] = m(n)`: every source point at radius `>= m(n)` maps to radius `>= n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropernessWitness {
    pub table: Vec<usize>,
    pub total_upto: usize,
}

impl PropernessWitness {
    pub fn m(&self, n: usize) -> usize {
        self.table[n - 1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Properness {
    Witness(PropernessWitness),
    /// First level without a witness below the last source level.
    Failure {
        level: usize,
        partial: Vec<usize>,
    },
}

impl Properness {
    pub fn witness(&self) -> Option<&PropernessWitness> {
        match self {
            Properness::Witness(w) => Some(w),
            Properness::Failure { .. } => None,
        }
    }

    pub fn is_total(&self) -> bool {
        self.witness().is_some()
    }
}

/// Levels worth checking: beyond the floor `h` reached by the deepest
/// vertices nothing can be certified.
fn horizon_from_floor(h: Rational) -> usize {
    (h.ceil().to_integer() - 1).max(1) as usize
}

/// Shared scan: vertex floors and edge floors, lowered to `m(n)` per level.
fn witness_from_floors(
    tree: &RootedTree,
    vertex_floor: &[Rational],
    edge_floor: &[Rational],
    horizon: usize,
) -> Properness {
    let d = tree.depth();
    let mut table = Vec::with_capacity(horizon);
    for n in 1..=horizon {
        let n_r = int(n as i64);
        let mut m = 0;
        for v in tree.vertices() {
            if vertex_floor[v] < n_r {
                m = m.max(tree.radius(v) + 1);
            }
        }
        for e in tree.edges() {
            if edge_floor[e] < n_r {
                m = m.max(tree.radius(e));
            }
        }
        // m = depth only restates the truncation; a witness needs a margin
        if m + 1 > d {
            return Properness::Failure {
                level: n,
                partial: table,
            };
        }
        table.push(m);
    }
    Properness::Witness(PropernessWitness {
        table,
        total_upto: horizon,
    })
}

fn deepest_floor(tree: &RootedTree, floor: &[Rational]) -> Rational {
    tree.sphere(tree.depth())
        .unwrap()
        .iter()
        .map(|&v| floor[v])
        .min()
        .expect("the deepest sphere is nonempty")
}

/// Minimal witness table up to the default horizon.
pub fn properness_witness(f: &TreeMap) -> Properness {
    let t = &f.source;
    let vf: Vec<Rational> = t.vertices().map(|v| f.image_radius(v)).collect();
    properness_upto(f, horizon_from_floor(deepest_floor(t, &vf)))
}

pub fn properness_upto(f: &TreeMap, horizon: usize) -> Properness {
    let t = &f.source;
    let vf: Vec<Rational> = t.vertices().map(|v| f.image_radius(v)).collect();
    let mut ef = vec![Rational::zero(); t.len()];
    for e in t.edges() {
        ef[e] = f.edge_floor(e);
    }
    witness_from_floors(t, &vf, &ef, horizon)
}

/// Properness of the shortest-path homotopy from `f` to `g`: its track at `x`
/// stays above the radius of the meet of `f(x)` and `g(x)`.
pub fn homotopy_properness(f: &TreeMap, g: &TreeMap) -> Result<Properness, MapError> {
    if f.source != g.source || f.target != g.target {
        return Err(MapError::SourceTargetMismatch);
    }
    let (s, t) = (&f.source, &f.target);
    let vf: Vec<Rational> = s
        .vertices()
        .map(|v| t.point_radius(&t.point_meet(f.image(v), g.image(v))))
        .collect();
    let mut ef = vec![Rational::zero(); s.len()];
    for e in s.edges() {
        let p = s.parent(e).unwrap();
        // (f(x)|g(x)) >= min((f(x)|f(u)), (f(u)|g(u)), (g(u)|g(x))) for u = p or e
        let ends = vf[p].max(vf[e]);
        ef[e] = f.edge_floor(e).min(g.edge_floor(e)).min(ends);
    }
    let horizon = horizon_from_floor(deepest_floor(s, &vf));
    Ok(witness_from_floors(s, &vf, &ef, horizon))
}

/// `g ∘ f`, re-sampled at the vertices of the source of `f`.
pub fn compose_tree_maps(g: &TreeMap, f: &TreeMap) -> Result<TreeMap, MapError> {
    if f.target != g.source {
        return Err(MapError::SourceTargetMismatch);
    }
    let images = f.images.iter().map(|p| g.eval(p)).collect();
    TreeMap::new(f.source.clone(), g.target.clone(), images)
}

/// The nearest-point retraction onto the core, with the core as the target tree.
pub fn retraction_map(t: &Arc<RootedTree>) -> TreeMap {
    let keep = t.core_mask();
    let (core, renumber) = t.restrict(&keep);
    let images = t
        .vertices()
        .map(|v| {
            let mut u = v;
            while !keep[u] {
                u = t.parent(u).unwrap();
            }
            TreePoint::vertex(renumber[u].unwrap())
        })
        .collect();
    TreeMap {
        source: t.clone(),
        target: Arc::new(core),
        images,
    }
}

/// How breakpoints of the induced map are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScheduleRule {
    /// Least breakpoints certified by the coherence identities.
    #[default]
    Greedy,
    /// Deliberately broken: doubles every image radius. Used to check that the
    /// roundtrip harness notices a bad map.
    #[doc(hidden)]
    MutantDoubledRadius,
}

#[derive(Debug, Clone)]
pub struct InducedMap {
    pub map: TreeMap,
    /// `schedule[k - 1] = t_k`.
    pub schedule: Vec<usize>,
}

impl InducedMap {
    pub fn breakpoint(&self, k: usize) -> usize {
        self.schedule[k - 1]
    }
}

/// Least `t_k >= max(Φ(k+1), t_{k-1} + 1)` such that
/// `f_i ∘ p_{Φ(i) t_k} = q_{i,k+1} ∘ f_{k+1} ∘ p_{Φ(k+1) t_k}` for all `i <= k`.
pub fn greedy_schedule(m: &TowerMorphism) -> Vec<usize> {
    let x = m.source();
    let y = m.target();
    let d = x.depth();
    let mut schedule: Vec<usize> = Vec::new();
    for k in 1..m.defined_upto() {
        let lo = m.index_at(k + 1).max(schedule.last().map_or(1, |t| t + 1));
        let found = (lo..=d).find(|&t| {
            let top = m.component_at(k + 1, t);
            (1..=k).all(|i| {
                let down = y.composite_indices(i, k + 1);
                let lower = m.component_at(i, t);
                lower.iter().zip(&top).all(|(&a, &b)| a == down[b])
            })
        });
        match found {
            Some(t) => schedule.push(t),
            None => break,
        }
    }
    schedule
}

/// The map `f̂ : T_X -> T_Y` induced by a morphism.
pub fn induce_tree_map(m: &TowerMorphism) -> Result<InducedMap, MapError> {
    induce_tree_map_with(m, &greedy_schedule(m), ScheduleRule::Greedy)
}

/// Same as [`induce_tree_map`] with an explicit certified schedule.
pub fn induce_tree_map_with(
    m: &TowerMorphism,
    schedule: &[usize],
    rule: ScheduleRule,
) -> Result<InducedMap, MapError> {
    if schedule.is_empty() {
        return Err(MapError::DepthExhausted);
    }
    let src = Arc::new(tree_of_tower(m.source()));
    let tgt = Arc::new(tree_of_tower(m.target()));
    let d = src.depth();
    let s = schedule.len();
    // first target vertex of each level, to turn level indices into vertices
    let level_start: Vec<usize> = std::iter::once(1)
        .chain((1..=tgt.depth()).scan(1, |acc, n| {
            *acc += m.target().level(n).len();
            Some(*acc)
        }))
        .collect();
    let image_vertex = |x: Vertex, k: usize| -> Vertex {
        let a = src.ancestor(x, m.index_at(k));
        let pos = src
            .sphere(m.index_at(k))
            .unwrap()
            .iter()
            .position(|&u| u == a)
            .unwrap();
        level_start[k - 1] + m.component(k)[pos]
    };
    let mut images = Vec::with_capacity(src.len());
    for x in src.vertices() {
        let j = src.radius(x);
        if j <= schedule[0] {
            images.push(TreePoint::vertex(ROOT));
            continue;
        }
        // segment k covers (t_k, t_{k+1}], the last one ends at the depth
        let k = schedule.iter().rposition(|&t| t < j).unwrap() + 1;
        let end = if k < s { schedule[k] } else { d };
        let offset = Rational::new((j - schedule[k - 1]) as i64, (end - schedule[k - 1]) as i64);
        let mut p = tgt.point(image_vertex(x, k), offset);
        if rule == ScheduleRule::MutantDoubledRadius {
            let want = int(2) * tgt.point_radius(&p);
            let reach = (1..=m.defined_upto())
                .filter(|&l| m.index_at(l) <= j)
                .max()
                .unwrap_or(k);
            let lvl = (want.ceil().to_integer() as usize).min(reach).max(k);
            let deep = TreePoint::vertex(image_vertex(x, lvl));
            p = tgt.ancestor_point(&deep, want.min(int(lvl as i64)));
        }
        images.push(p);
    }
    Ok(InducedMap {
        map: TreeMap::new(src, tgt, images)?,
        schedule: schedule.to_vec(),
    })
}

/// The morphism of a proper map: index `n -> m(n)`, and `f_n(c)` is the
/// radius-`n` ancestor of `f(c)`.
pub fn extract_morphism(f: &TreeMap) -> Result<TowerMorphism, MapError> {
    let table = match properness_witness(f) {
        Properness::Witness(w) => w.table,
        Properness::Failure { partial, .. } if !partial.is_empty() => partial,
        Properness::Failure { level, .. } => return Err(MapError::NotProper(level)),
    };
    let (s, t) = (&f.source, &f.target);
    let x = Arc::new(tower_of_tree(s));
    let y = Arc::new(tower_of_tree(t));
    let mut components = Vec::with_capacity(table.len());
    for (i, &m) in table.iter().enumerate() {
        let n = i + 1;
        let sphere = t
            .sphere(n)
            .expect("witness levels are below the target depth");
        let comp = s
            .sphere(m)
            .unwrap()
            .iter()
            .map(|&c| {
                let img = t.ancestor_point(f.image(c), int(n as i64));
                sphere.iter().position(|&u| u == img.base).unwrap()
            })
            .collect();
        components.push(comp);
    }
    Ok(TowerMorphism::new(x, y, table, components)?)
}

/// The radius-preserving simplicial map of a level morphism.
pub fn simplicial_of_level(m: &TowerMorphism) -> Result<TreeMap, MapError> {
    if !m.is_level() || m.defined_upto() != m.source().depth() {
        return Err(MapError::NotLevelMorphism);
    }
    let src = Arc::new(tree_of_tower(m.source()));
    let tgt = Arc::new(tree_of_tower(m.target()));
    let mut images = vec![TreePoint::vertex(ROOT)];
    let mut tgt_start = 1;
    for n in 1..=m.source().depth() {
        images.extend(
            m.component(n)
                .iter()
                .map(|&y| TreePoint::vertex(tgt_start + y)),
        );
        tgt_start += m.target().level(n).len();
    }
    TreeMap::new(src, tgt, images)
}

/// The tree of a tower wrapped for sharing.
pub fn shared_tree(t: &Tower) -> Arc<RootedTree> {
    Arc::new(tree_of_tower(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::tower::fixtures::{constant, ids, table, tower_a};
    use crate::tower::{identity_morphism, morphisms_equivalent};

    fn shift_map(depth: usize, by: usize) -> TreeMap {
        let t = shared_tree(&constant(depth));
        let images = t
            .vertices()
            .map(|v| TreePoint::vertex(t.radius(v).saturating_sub(by)))
            .collect();
        TreeMap::new(t.clone(), t, images).unwrap()
    }

    #[test]
    fn identity_on_constant_tower_shifts_by_two() {
        let c = Arc::new(constant(6));
        let f = induce_tree_map(&identity_morphism(c)).unwrap();
        assert_eq!(f.schedule, vec![2, 3, 4, 5, 6]);
        for v in f.map.source().vertices() {
            assert_eq!(f.map.image(v).base, v.saturating_sub(2));
        }
        assert_eq!(check_nonexpansive(&f.map), NonExpansive::Valid);
    }

    #[test]
    fn shift_witness_is_n_plus_two() {
        // deepest vertices land at radius 6, so levels 1..=5 are checked
        let w = properness_witness(&shift_map(8, 2));
        assert_eq!(w.witness().unwrap().table, vec![3, 4, 5, 6, 7]);
        let w = properness_upto(&shift_map(8, 2), 3);
        assert_eq!(w.witness().unwrap().table, vec![3, 4, 5]);
    }

    #[test]
    fn constant_map_is_not_proper() {
        let t = shared_tree(&constant(5));
        let f = TreeMap::new(t.clone(), t.clone(), vec![TreePoint::vertex(ROOT); t.len()]).unwrap();
        assert_eq!(
            properness_witness(&f),
            Properness::Failure {
                level: 1,
                partial: vec![]
            }
        );
        assert_eq!(extract_morphism(&f), Err(MapError::NotProper(1)));
    }

    #[test]
    fn stretched_edge_is_flagged() {
        let t = shared_tree(&constant(4));
        let mut images: Vec<_> = t.vertices().map(TreePoint::vertex).collect();
        images[1] = TreePoint::vertex(4);
        let f = TreeMap::new(t.clone(), t, images).unwrap();
        assert!(matches!(
            check_nonexpansive(&f),
            NonExpansive::Violation { edge: 1, .. }
        ));
    }

    #[test]
    fn retraction_of_tower_a() {
        let t = shared_tree(&tower_a());
        let r = retraction_map(&t);
        let b2 = t.find(2, "b2").unwrap();
        assert_eq!(r.target().label(r.image(b2).base), "a");
        for v in t.vertices().filter(|&v| v != b2) {
            assert_eq!(r.target().label(r.image(v).base), t.label(v));
        }
        // b2 sits at the last level below the depth, so level 2 needs m = 3
        assert_eq!(
            properness_witness(&r),
            Properness::Failure {
                level: 2,
                partial: vec![1]
            }
        );
        let e = extract_morphism(&r).unwrap();
        assert_eq!(**e.target(), tower_a().surjective_core());
        assert_eq!(e.index_function(), &[1]);
    }

    #[test]
    fn extract_inverts_induce_on_identity() {
        let a = Arc::new(tower_a());
        let id = identity_morphism(a);
        let f = induce_tree_map(&id).unwrap();
        let back = extract_morphism(&f.map);
        // the identity of tower A has schedule (2, 3): only t_2 = 3 = depth
        assert!(matches!(back, Err(MapError::NotProper(1))));
        let c = Arc::new(constant(7));
        let id = identity_morphism(c);
        let f = induce_tree_map(&id).unwrap();
        let back = extract_morphism(&f.map).unwrap();
        assert!(morphisms_equivalent(&back, &id).unwrap().is_equivalent());
    }

    #[test]
    fn composed_shifts_add_up() {
        let s = shift_map(9, 2);
        let ss = compose_tree_maps(&s, &s).unwrap();
        let t = s.source();
        for v in t.vertices() {
            assert_eq!(ss.image(v).base, v.saturating_sub(4));
        }
        let id = TreeMap::identity(t.clone());
        assert_eq!(compose_tree_maps(&s, &id).unwrap(), s);
        assert_eq!(compose_tree_maps(&id, &s).unwrap(), s);
    }

    #[test]
    fn evaluation_is_linear_on_edges() {
        let s = shift_map(5, 2);
        let t = s.source().clone();
        assert_eq!(s.eval(&t.point(4, rat(1, 3))), t.point(2, rat(1, 3)));
        // edge 2 -> 3 maps onto the geodesic root -> 1
        assert_eq!(s.eval(&t.point(3, rat(1, 2))), t.point(1, rat(1, 2)));
    }

    #[test]
    fn fold_is_radius_preserving() {
        let two = Arc::new(
            Tower::new(
                vec![ids(&["b1", "b2"]), ids(&["c1", "c2"])],
                vec![table(&[("c1", "b1"), ("c2", "b2")])],
            )
            .unwrap(),
        );
        let one = Arc::new(
            Tower::new(vec![ids(&["b"]), ids(&["c"])], vec![table(&[("c", "b")])]).unwrap(),
        );
        let fold = TowerMorphism::new(two, one, vec![1, 2], vec![vec![0, 0], vec![0, 0]]).unwrap();
        let f = simplicial_of_level(&fold).unwrap();
        for v in f.source().vertices() {
            assert_eq!(f.image_radius(v), int(f.source().radius(v) as i64));
        }
        assert_eq!(f.image(1), f.image(2));
    }

    #[test]
    fn homotopy_of_a_map_with_itself() {
        let s = shift_map(8, 2);
        let h = homotopy_properness(&s, &s).unwrap();
        assert_eq!(h, properness_witness(&s));
        let id = TreeMap::identity(s.source().clone());
        // f(x) and g(x) differ by two levels but share the branch
        assert!(homotopy_properness(&s, &id).unwrap().is_total());
    }

    #[test]
    fn mutant_stretches_edges() {
        let c = Arc::new(constant(6));
        let id = identity_morphism(c);
        let sched = greedy_schedule(&id);
        let f = induce_tree_map_with(&id, &sched, ScheduleRule::MutantDoubledRadius).unwrap();
        assert!(matches!(
            check_nonexpansive(&f.map),
            NonExpansive::Violation { .. }
        ));
    }
}
