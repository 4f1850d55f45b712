//! Towers of groups at desk scale: finite groups given by tables and windows
//! of the integers, inverse-limit threads, and the conditions (M) and (E)
//! that characterize mono- and epimorphisms of towers.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ends::AgreementDepth;
use crate::tower::{
    compose_morphisms, identity_morphism, morphisms_equivalent, Equivalence, InverseSequence,
    MlVerdict, Tower, TowerError, TowerMorphism,
};

/// Largest window level we are willing to enumerate.
pub const MAX_WINDOW_ELEMENTS: i64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("bond {level} is not a homomorphism: {reason}")]
    NotHomomorphism { level: usize, reason: String },
    #[error("unsupported bond between these level kinds at {0}")]
    UnsupportedBond(usize),
    #[error("expected {expected} bonds, got {got}")]
    BondCount { expected: usize, got: usize },
    #[error("integer window overflow at level {0}")]
    WindowOverflow(usize),
    #[error("threads come from different towers")]
    DifferentTowers,
    #[error("not a level morphism: {0}")]
    NotLevelMorphism(String),
    #[error("the tower is not Mittag-Leffler at this depth")]
    NotMl,
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// A finite group given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    unit: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Checks closure, associativity, a two-sided unit and inverses.
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = names.len();
        if n == 0 || table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(GroupError::NotAGroup(
                "table must be square and nonempty".into(),
            ));
        }
        if table.iter().flatten().any(|&x| x >= n) {
            return Err(GroupError::NotAGroup("table entry out of range".into()));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(GroupError::NotAGroup(format!(
                            "({} {}) {} is not associative",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        let unit = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| GroupError::NotAGroup("no unit".into()))?;
        let inverse = (0..n)
            .map(|x| {
                (0..n)
                    .find(|&y| table[x][y] == unit && table[y][x] == unit)
                    .ok_or_else(|| GroupError::NotAGroup(format!("{} has no inverse", names[x])))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FiniteGroup {
            names,
            table,
            unit,
            inverse,
        })
    }

    /// `Z/m` with elements named `0..m`.
    pub fn cyclic(m: usize) -> Self {
        assert!(m >= 1, "cyclic group of order 0");
        FiniteGroup {
            names: (0..m).map(|i| i.to_string()).collect(),
            table: (0..m)
                .map(|a| (0..m).map(|b| (a + b) % m).collect())
                .collect(),
            unit: 0,
            inverse: (0..m).map(|a| (m - a) % m).collect(),
        }
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// Subgroup on a subset closed under the operation, names kept.
    fn restrict(&self, keep: &BTreeSet<usize>) -> Option<(FiniteGroup, Vec<usize>)> {
        let elems: Vec<usize> = keep.iter().copied().collect();
        let pos: HashMap<usize, usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut table = Vec::with_capacity(elems.len());
        for &a in &elems {
            let row = elems
                .iter()
                .map(|&b| pos.get(&self.op(a, b)).copied())
                .collect::<Option<Vec<_>>>()?;
            table.push(row);
        }
        let names = elems.iter().map(|&e| self.names[e].clone()).collect();
        FiniteGroup::new(names, table).ok().map(|g| (g, elems))
    }
}

/// A level of a group tower.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupLevel {
    Table(FiniteGroup),
    /// The integers, seen through the window `|z| < bound`.
    WindowedZ {
        bound: i64,
    },
}

/// A homomorphism between consecutive levels (or a level morphism component).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupHom {
    /// Image code of each element of a table level.
    Table(Vec<i64>),
    /// `z -> k z` between integer levels.
    Scale(i64),
}

impl GroupHom {
    fn apply(&self, x: i64) -> Option<i64> {
        match self {
            GroupHom::Table(t) => t.get(usize::try_from(x).ok()?).copied(),
            GroupHom::Scale(k) => x.checked_mul(*k),
        }
    }
}

/// Elements are coded as `i64`: table index, or the integer itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTower {
    levels: Vec<GroupLevel>,
    bonds: Vec<GroupHom>,
    /// Enumerated elements of each level (windows shrink so bonds stay inside).
    elements: Vec<Vec<i64>>,
}

/// A coherent sequence `(g_1, ..., g_D)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Thread(pub Vec<i64>);

impl GroupTower {
    pub fn new(levels: Vec<GroupLevel>, bonds: Vec<GroupHom>) -> Result<Self, GroupError> {
        if levels.is_empty() {
            return Err(GroupError::Tower(TowerError::NoLevels));
        }
        if bonds.len() + 1 != levels.len() {
            return Err(GroupError::BondCount {
                expected: levels.len() - 1,
                got: bonds.len(),
            });
        }
        let mut elements: Vec<Vec<i64>> = Vec::with_capacity(levels.len());
        for (i, level) in levels.iter().enumerate() {
            let n = i + 1;
            let elems = match level {
                GroupLevel::Table(g) => (0..g.order() as i64).collect(),
                GroupLevel::WindowedZ { bound } => {
                    if *bound < 1 {
                        return Err(GroupError::NotAGroup(format!(
                            "window {bound} at level {n}"
                        )));
                    }
                    let mut r = bound - 1;
                    if n > 1 {
                        match (&levels[n - 2], &bonds[n - 2]) {
                            (GroupLevel::WindowedZ { .. }, GroupHom::Scale(k)) if *k >= 1 => {
                                let below = *elements[n - 2].last().unwrap();
                                r = r.min(below / k);
                            }
                            _ => return Err(GroupError::UnsupportedBond(n - 1)),
                        }
                    }
                    if r >= MAX_WINDOW_ELEMENTS {
                        return Err(GroupError::WindowOverflow(n));
                    }
                    (-r..=r).collect()
                }
            };
            elements.push(elems);
        }
        let t = GroupTower {
            levels,
            bonds,
            elements,
        };
        for n in 1..t.depth() {
            t.check_hom(n)?;
        }
        Ok(t)
    }

    fn check_hom(&self, n: usize) -> Result<(), GroupError> {
        let err = |reason: String| GroupError::NotHomomorphism { level: n, reason };
        let (upper, lower) = (&self.levels[n], &self.levels[n - 1]);
        let bond = &self.bonds[n - 1];
        match (upper, bond) {
            (GroupLevel::Table(g), GroupHom::Table(t)) => {
                if t.len() != g.order() {
                    return Err(err(format!(
                        "table has {} entries, expected {}",
                        t.len(),
                        g.order()
                    )));
                }
                let lower_set: BTreeSet<i64> = self.elements[n - 1].iter().copied().collect();
                if let Some(x) = t.iter().find(|x| !lower_set.contains(x)) {
                    return Err(err(format!("image {x} is outside level {n}")));
                }
                for a in 0..g.order() {
                    for b in 0..g.order() {
                        let lhs = t[g.op(a, b)];
                        let rhs = self
                            .op(n, t[a], t[b])
                            .ok_or(GroupError::WindowOverflow(n))?;
                        if lhs != rhs {
                            return Err(err(format!("p({a}*{b}) != p({a})*p({b})")));
                        }
                    }
                }
                Ok(())
            }
            (GroupLevel::WindowedZ { .. }, GroupHom::Scale(_)) => match lower {
                GroupLevel::WindowedZ { .. } => Ok(()),
                GroupLevel::Table(_) => Err(GroupError::UnsupportedBond(n)),
            },
            _ => Err(GroupError::UnsupportedBond(n)),
        }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, n: usize) -> &GroupLevel {
        &self.levels[n - 1]
    }

    pub fn bond(&self, n: usize) -> &GroupHom {
        &self.bonds[n - 1]
    }

    pub fn elements(&self, n: usize) -> &[i64] {
        &self.elements[n - 1]
    }

    pub fn unit(&self, n: usize) -> i64 {
        match self.level(n) {
            GroupLevel::Table(g) => g.unit() as i64,
            GroupLevel::WindowedZ { .. } => 0,
        }
    }

    /// Product inside level `n`; `None` if it leaves the window.
    pub fn op(&self, n: usize, a: i64, b: i64) -> Option<i64> {
        match self.level(n) {
            GroupLevel::Table(g) => Some(g.op(a as usize, b as usize) as i64),
            GroupLevel::WindowedZ { .. } => {
                let s = a.checked_add(b)?;
                let r = *self.elements(n).last().unwrap();
                (s.abs() <= r).then_some(s)
            }
        }
    }

    pub fn inv(&self, n: usize, a: i64) -> i64 {
        match self.level(n) {
            GroupLevel::Table(g) => g.inv(a as usize) as i64,
            GroupLevel::WindowedZ { .. } => -a,
        }
    }

    pub fn name(&self, n: usize, a: i64) -> String {
        match self.level(n) {
            GroupLevel::Table(g) => g.names()[a as usize].clone(),
            GroupLevel::WindowedZ { .. } => a.to_string(),
        }
    }

    /// `p_{nm}` applied to an element of level `m`.
    pub fn project(&self, n: usize, m: usize, mut x: i64) -> i64 {
        for k in (n..m).rev() {
            x = self
                .bond(k)
                .apply(x)
                .expect("bonds stay inside the windows");
        }
        x
    }

    fn position(&self, n: usize, x: i64) -> usize {
        match self.level(n) {
            GroupLevel::Table(_) => x as usize,
            GroupLevel::WindowedZ { .. } => (x - self.elements(n)[0]) as usize,
        }
    }

    /// The underlying tower of sets.
    pub fn to_tower(&self) -> Tower {
        let levels = (1..=self.depth())
            .map(|n| self.elements(n).iter().map(|&x| self.name(n, x)).collect())
            .collect();
        let bonds = (1..self.depth())
            .map(|n| {
                self.elements(n + 1)
                    .iter()
                    .map(|&x| self.position(n, self.bond(n).apply(x).unwrap()))
                    .collect()
            })
            .collect();
        Tower::from_indices(levels, bonds).expect("group towers are towers")
    }

    /// `π_n(G)`: level-`n` entries of the threads.
    pub fn projection_image(&self, n: usize) -> BTreeSet<i64> {
        let d = self.depth();
        self.elements(d)
            .iter()
            .map(|&x| self.project(n, d, x))
            .collect()
    }
}

/// All threads through the full depth, one per top-level element.
pub fn limit_threads(g: &GroupTower) -> Vec<Thread> {
    let d = g.depth();
    let mut out: Vec<Thread> = g
        .elements(d)
        .iter()
        .map(|&top| {
            let mut v = vec![0; d];
            v[d - 1] = top;
            for n in (1..d).rev() {
                v[n - 1] = g.project(n, n + 1, v[n]);
            }
            Thread(v)
        })
        .collect();
    out.sort();
    out
}

pub fn thread_distance(a: &Thread, b: &Thread) -> Result<AgreementDepth, GroupError> {
    if a.0.len() != b.0.len() {
        return Err(GroupError::DifferentTowers);
    }
    if a == b {
        return Ok(AgreementDepth::Infinite);
    }
    Ok(AgreementDepth::Finite(
        a.0.iter().zip(&b.0).take_while(|(x, y)| x == y).count(),
    ))
}

fn thread_op(g: &GroupTower, a: &Thread, b: &Thread) -> Result<Thread, GroupError> {
    (1..=g.depth())
        .map(|n| {
            g.op(n, a.0[n - 1], b.0[n - 1])
                .ok_or(GroupError::WindowOverflow(n))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Thread)
}

fn thread_inv(g: &GroupTower, a: &Thread) -> Thread {
    Thread((1..=g.depth()).map(|n| g.inv(n, a.0[n - 1])).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsometryCheck {
    Valid,
    /// Translation by `k` (or inversion when `k` is `None`) changes `t(a, b)`.
    Violation {
        k: Option<Thread>,
        a: Thread,
        b: Thread,
    },
}

/// Left and right translations and inversion preserve the agreement depth.
pub fn check_translation_isometry(g: &GroupTower) -> Result<IsometryCheck, GroupError> {
    let threads = limit_threads(g);
    for a in &threads {
        for b in &threads {
            let t = thread_distance(a, b)?;
            let (ia, ib) = (thread_inv(g, a), thread_inv(g, b));
            if thread_distance(&ia, &ib)? != t {
                return Ok(IsometryCheck::Violation {
                    k: None,
                    a: a.clone(),
                    b: b.clone(),
                });
            }
            for k in &threads {
                let left = thread_distance(&thread_op(g, k, a)?, &thread_op(g, k, b)?)?;
                let right = thread_distance(&thread_op(g, a, k)?, &thread_op(g, b, k)?)?;
                if left != t || right != t {
                    return Ok(IsometryCheck::Violation {
                        k: Some(k.clone()),
                        a: a.clone(),
                        b: b.clone(),
                    });
                }
            }
        }
    }
    Ok(IsometryCheck::Valid)
}

/// A morphism of group towers with `Φ = id` and commuting squares.
#[derive(Debug, Clone)]
pub struct GroupLevelMorphism {
    source: Arc<GroupTower>,
    target: Arc<GroupTower>,
    components: Vec<GroupHom>,
}

impl GroupLevelMorphism {
    pub fn new(
        source: Arc<GroupTower>,
        target: Arc<GroupTower>,
        components: Vec<GroupHom>,
    ) -> Result<Self, GroupError> {
        let d = source.depth();
        if target.depth() != d || components.len() != d {
            return Err(GroupError::NotLevelMorphism("depths differ".into()));
        }
        let m = GroupLevelMorphism {
            source,
            target,
            components,
        };
        for n in 1..=d {
            let (s, t) = (&m.source, &m.target);
            let targets: BTreeSet<i64> = t.elements(n).iter().copied().collect();
            for &x in s.elements(n) {
                let y = m.apply(n, x).ok_or(GroupError::WindowOverflow(n))?;
                if !targets.contains(&y) {
                    return Err(GroupError::NotLevelMorphism(format!(
                        "f_{n}({}) leaves level {n}",
                        s.name(n, x)
                    )));
                }
                for &z in s.elements(n) {
                    let Some(xz) = s.op(n, x, z) else { continue };
                    let lhs = m.apply(n, xz);
                    let rhs = m.apply(n, z).and_then(|fz| t.op(n, y, fz));
                    if lhs != rhs {
                        return Err(GroupError::NotLevelMorphism(format!(
                            "f_{n} is not a homomorphism"
                        )));
                    }
                }
            }
            if n < d {
                for &x in s.elements(n + 1) {
                    let down = m.apply(n, s.project(n, n + 1, x));
                    let across = m.apply(n + 1, x).map(|y| t.project(n, n + 1, y));
                    if down != across {
                        return Err(GroupError::NotLevelMorphism(format!(
                            "square {n} does not commute at {}",
                            s.name(n + 1, x)
                        )));
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn identity(g: Arc<GroupTower>) -> Self {
        let components = (1..=g.depth())
            .map(|n| match g.level(n) {
                GroupLevel::Table(_) => GroupHom::Table(g.elements(n).to_vec()),
                GroupLevel::WindowedZ { .. } => GroupHom::Scale(1),
            })
            .collect();
        GroupLevelMorphism {
            source: g.clone(),
            target: g,
            components,
        }
    }

    pub fn source(&self) -> &Arc<GroupTower> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GroupTower> {
        &self.target
    }

    pub fn apply(&self, n: usize, x: i64) -> Option<i64> {
        self.components[n - 1].apply(x)
    }

    /// The same morphism between the underlying towers of sets.
    pub fn to_set_morphism(&self) -> Result<TowerMorphism, GroupError> {
        let (s, t) = (&self.source, &self.target);
        let d = s.depth();
        let components = (1..=d)
            .map(|n| {
                s.elements(n)
                    .iter()
                    .map(|&x| t.position(n, self.apply(n, x).unwrap()))
                    .collect()
            })
            .collect();
        Ok(TowerMorphism::new(
            Arc::new(s.to_tower()),
            Arc::new(t.to_tower()),
            (1..=d).collect(),
            components,
        )?)
    }

    /// Threads of the source mapped levelwise.
    pub fn on_threads(&self) -> Vec<Thread> {
        limit_threads(&self.source)
            .iter()
            .map(|a| {
                Thread(
                    (1..=a.0.len())
                        .map(|n| self.apply(n, a.0[n - 1]).unwrap())
                        .collect(),
                )
            })
            .collect()
    }
}

/// Per-level least witnesses, or the first level with none inside the depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionReport {
    Witnesses(Vec<usize>),
    Violation { level: usize },
}

impl ConditionReport {
    pub fn holds(&self) -> bool {
        matches!(self, ConditionReport::Witnesses(_))
    }
}

fn least_witness(d: usize, ok: impl Fn(usize, usize) -> bool) -> ConditionReport {
    let mut table = Vec::with_capacity(d);
    for n in 1..=d {
        match (n..=d).find(|&m| ok(n, m)) {
            Some(m) => table.push(m),
            None => return ConditionReport::Violation { level: n },
        }
    }
    ConditionReport::Witnesses(table)
}

/// (M): for every `n` some `m >= n` has `Ker(f_m) ⊆ Ker(p_{nm})`.
pub fn check_condition_m(f: &GroupLevelMorphism) -> ConditionReport {
    let (s, t) = (&f.source, &f.target);
    least_witness(s.depth(), |n, m| {
        s.elements(m)
            .iter()
            .filter(|&&x| f.apply(m, x) == Some(t.unit(m)))
            .all(|&x| s.project(n, m, x) == s.unit(n))
    })
}

/// (E): for every `n` some `m >= n` has `Im(q_{nm}) ⊆ Im(f_n)`.
pub fn check_condition_e(f: &GroupLevelMorphism) -> ConditionReport {
    let (s, t) = (&f.source, &f.target);
    least_witness(s.depth(), |n, m| {
        let image: BTreeSet<i64> = s
            .elements(n)
            .iter()
            .filter_map(|&x| f.apply(n, x))
            .collect();
        t.elements(m)
            .iter()
            .all(|&y| image.contains(&t.project(n, m, y)))
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoVerdict {
    pub iso: bool,
    pub mono: ConditionReport,
    pub epi: ConditionReport,
}

pub fn is_group_tower_iso(f: &GroupLevelMorphism) -> IsoVerdict {
    let mono = check_condition_m(f);
    let epi = check_condition_e(f);
    IsoVerdict {
        iso: mono.holds() && epi.holds(),
        mono,
        epi,
    }
}

fn require_ml(g: &GroupTower) -> Result<(), GroupError> {
    match g.to_tower().ml_verdict().verdict {
        MlVerdict::Holds => Ok(()),
        _ => Err(GroupError::NotMl),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionEntry {
    pub level: usize,
    /// Least `m` with `p_{nm}(G_m) = π_n(G)`.
    pub m: usize,
    pub equal: bool,
}

/// For each `n`, the least `m >= n` where the image of `G_m` is exactly `π_n(G)`.
pub fn ml_projection_check(g: &GroupTower) -> Result<Vec<ProjectionEntry>, GroupError> {
    require_ml(g)?;
    let d = g.depth();
    Ok((1..=d)
        .map(|n| {
            let target = g.projection_image(n);
            let image = |m: usize| -> BTreeSet<i64> {
                g.elements(m).iter().map(|&x| g.project(n, m, x)).collect()
            };
            let m = (n..=d)
                .find(|&m| image(m) == target)
                .expect("equal at the depth");
            ProjectionEntry {
                level: n,
                m,
                equal: image(m) == target,
            }
        })
        .collect())
}

/// The tower `(π_n(G), p_n|)` with its inclusion and the inverse `(p_{n m_n}, n -> m_n)`.
#[derive(Debug, Clone)]
pub struct CoreIso {
    pub core: Arc<GroupTower>,
    pub inclusion: GroupLevelMorphism,
    pub inverse: TowerMorphism,
    /// `inclusion ∘ inverse` against the identity of `G`.
    pub around_tower: Equivalence,
    /// `inverse ∘ inclusion` against the identity of the core.
    pub around_core: Equivalence,
}

pub fn core_iso_construction(g: &Arc<GroupTower>) -> Result<CoreIso, GroupError> {
    let witnesses = ml_projection_check(g)?;
    let d = g.depth();
    let mut levels = Vec::with_capacity(d);
    let mut codes: Vec<Vec<i64>> = Vec::with_capacity(d);
    for n in 1..=d {
        let keep = g.projection_image(n);
        let (group, elems) = match g.level(n) {
            GroupLevel::Table(grp) => {
                let idx: BTreeSet<usize> = keep.iter().map(|&x| x as usize).collect();
                let (sub, elems) = grp
                    .restrict(&idx)
                    .ok_or_else(|| GroupError::NotAGroup(format!("π_{n} is not closed")))?;
                (sub, elems.into_iter().map(|e| e as i64).collect::<Vec<_>>())
            }
            GroupLevel::WindowedZ { .. } => {
                if keep.iter().any(|&x| x != 0) {
                    return Err(GroupError::WindowOverflow(n));
                }
                (FiniteGroup::new(vec!["0".into()], vec![vec![0]])?, vec![0])
            }
        };
        levels.push(GroupLevel::Table(group));
        codes.push(elems);
    }
    let bonds = (1..d)
        .map(|n| {
            let pos: HashMap<i64, i64> = codes[n - 1]
                .iter()
                .enumerate()
                .map(|(i, &c)| (c, i as i64))
                .collect();
            GroupHom::Table(
                codes[n]
                    .iter()
                    .map(|&c| pos[&g.project(n, n + 1, c)])
                    .collect(),
            )
        })
        .collect();
    let core = Arc::new(GroupTower::new(levels, bonds)?);
    let inclusion = GroupLevelMorphism::new(
        core.clone(),
        g.clone(),
        codes.iter().map(|c| GroupHom::Table(c.clone())).collect(),
    )?;

    let g_set = Arc::new(g.to_tower());
    let inc_set = inclusion.to_set_morphism()?;
    let core_set = inc_set.source().clone();
    let index: Vec<usize> = witnesses.iter().map(|w| w.m).collect();
    let components = (1..=d)
        .map(|n| {
            let m = index[n - 1];
            let pos: HashMap<i64, usize> = codes[n - 1]
                .iter()
                .enumerate()
                .map(|(i, &c)| (c, i))
                .collect();
            g.elements(m)
                .iter()
                .map(|&x| pos[&g.project(n, m, x)])
                .collect()
        })
        .collect();
    let inverse = TowerMorphism::new(g_set.clone(), core_set.clone(), index, components)?;
    let inc_set = TowerMorphism::new(
        core_set.clone(),
        g_set.clone(),
        inc_set.index_function().to_vec(),
        (1..=d).map(|n| inc_set.component(n).to_vec()).collect(),
    )?;
    let around_tower = morphisms_equivalent(
        &compose_morphisms(&inc_set, &inverse)?,
        &identity_morphism(g_set),
    )?;
    let around_core = morphisms_equivalent(
        &compose_morphisms(&inverse, &inc_set)?,
        &identity_morphism(core_set),
    )?;
    Ok(CoreIso {
        core,
        inclusion,
        inverse,
        around_tower,
        around_core,
    })
}

/// `Z/m_1 <- Z/m_2 <- ...` with reduction bonds; each modulus divides the next.
pub fn cyclic_reduction_tower(moduli: &[usize]) -> Result<GroupTower, GroupError> {
    let levels = moduli
        .iter()
        .map(|&m| GroupLevel::Table(FiniteGroup::cyclic(m)))
        .collect();
    let bonds = moduli
        .windows(2)
        .map(|w| GroupHom::Table((0..w[1] as i64).map(|x| x % w[0] as i64).collect()))
        .collect();
    GroupTower::new(levels, bonds)
}
