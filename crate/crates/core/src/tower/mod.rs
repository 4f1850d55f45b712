//! Inverse sequences ("towers") of finite sets, their bonding algebra and the
//! Mittag-Leffler analysis.
//!
//! Levels are numbered from 1 to `depth`. The bond `p_n` maps level `n + 1` to
//! level `n`. Finite towers are truncations of infinite ones: every verdict
//! that depends on what happens beyond the last level is labeled as such.

mod generator;
mod morphism;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generator::ScalingTower;
pub use morphism::{
    compose_morphisms, identity_morphism, levelize_morphism, morphisms_equivalent, Equivalence,
    Levelized, TowerMorphism,
};

pub type ElementId = String;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("level index out of range: n={n}, m={m}, depth={depth}")]
    IndexOutOfRange { n: usize, m: usize, depth: usize },
    #[error("element {id:?} is not in level {level}")]
    ElementNotInLevel { level: usize, id: String },
    #[error("level {0} is empty")]
    EmptyLevel(usize),
    #[error("duplicate element {id:?} in level {level}")]
    DuplicateElement { level: usize, id: String },
    #[error("bond p_{level} is not total: {id:?} in level {} has no image", level + 1)]
    BondNotTotal { level: usize, id: String },
    #[error("bond p_{level} sends {id:?} outside level {level}")]
    BondOutOfLevel { level: usize, id: String },
    #[error("expected {expected} bonds, got {got}")]
    BondCount { expected: usize, got: usize },
    #[error("tower has no levels")]
    NoLevels,
    #[error("morphism source/target mismatch")]
    SourceTargetMismatch,
    #[error("required indices exceed the truncation depth")]
    DepthExhausted,
    #[error("morphism is not coherent at level {0} within the truncation depth")]
    Incoherent(usize),
    #[error("component {level} is malformed: {reason}")]
    BadComponent { level: usize, reason: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("integer overflow while composing bonds")]
    Overflow,
}

/// A finite level: opaque ids, unique within the level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    ids: Vec<ElementId>,
    index: HashMap<ElementId, usize>,
}

impl Level {
    fn new(level: usize, ids: Vec<ElementId>) -> Result<Self, TowerError> {
        if ids.is_empty() {
            return Err(TowerError::EmptyLevel(level));
        }
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(TowerError::DuplicateElement {
                    level,
                    id: id.clone(),
                });
            }
        }
        Ok(Level { ids, index })
    }

    pub fn ids(&self) -> &[ElementId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }
}

/// Extensional tower: finitely many finite levels with total bonds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower {
    levels: Vec<Level>,
    /// `bonds[n - 1][i]` is the index in level `n` of `p_n` applied to element `i` of level `n + 1`.
    bonds: Vec<Vec<usize>>,
}

impl Tower {
    /// Builds a tower from level id lists and bond tables `child -> parent`.
    /// `bonds[n - 1]` is `p_n`, mapping level `n + 1` into level `n`.
    pub fn new(
        levels: Vec<Vec<ElementId>>,
        bonds: Vec<BTreeMap<ElementId, ElementId>>,
    ) -> Result<Self, TowerError> {
        if levels.is_empty() {
            return Err(TowerError::NoLevels);
        }
        if bonds.len() + 1 != levels.len() {
            return Err(TowerError::BondCount {
                expected: levels.len() - 1,
                got: bonds.len(),
            });
        }
        let levels = levels
            .into_iter()
            .enumerate()
            .map(|(i, ids)| Level::new(i + 1, ids))
            .collect::<Result<Vec<_>, _>>()?;
        let mut idx_bonds = Vec::with_capacity(bonds.len());
        for (i, table) in bonds.iter().enumerate() {
            let (lower, upper) = (&levels[i], &levels[i + 1]);
            for child in table.keys() {
                if upper.position(child).is_none() {
                    return Err(TowerError::ElementNotInLevel {
                        level: i + 2,
                        id: child.clone(),
                    });
                }
            }
            let mut map = Vec::with_capacity(upper.len());
            for id in upper.ids() {
                let parent = table.get(id).ok_or_else(|| TowerError::BondNotTotal {
                    level: i + 1,
                    id: id.clone(),
                })?;
                let p = lower
                    .position(parent)
                    .ok_or_else(|| TowerError::BondOutOfLevel {
                        level: i + 1,
                        id: id.clone(),
                    })?;
                map.push(p);
            }
            idx_bonds.push(map);
        }
        Ok(Tower {
            levels,
            bonds: idx_bonds,
        })
    }

    /// Builds a tower from index-based bonds.
    pub fn from_indices(
        levels: Vec<Vec<ElementId>>,
        bonds: Vec<Vec<usize>>,
    ) -> Result<Self, TowerError> {
        if levels.is_empty() {
            return Err(TowerError::NoLevels);
        }
        if bonds.len() + 1 != levels.len() {
            return Err(TowerError::BondCount {
                expected: levels.len() - 1,
                got: bonds.len(),
            });
        }
        let levels = levels
            .into_iter()
            .enumerate()
            .map(|(i, ids)| Level::new(i + 1, ids))
            .collect::<Result<Vec<_>, _>>()?;
        for (i, map) in bonds.iter().enumerate() {
            if map.len() != levels[i + 1].len() {
                return Err(TowerError::BondNotTotal {
                    level: i + 1,
                    id: format!("#{}", map.len()),
                });
            }
            if let Some(j) = map.iter().position(|&p| p >= levels[i].len()) {
                return Err(TowerError::BondOutOfLevel {
                    level: i + 1,
                    id: levels[i + 1].ids[j].clone(),
                });
            }
        }
        Ok(Tower { levels, bonds })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Level `n` (1-based).
    pub fn level(&self, n: usize) -> &Level {
        &self.levels[n - 1]
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Level::len).collect()
    }

    /// Index table of `p_n : X_{n+1} -> X_n`.
    pub fn bond(&self, n: usize) -> &[usize] {
        &self.bonds[n - 1]
    }

    /// Bond as an id table `child -> parent`.
    pub fn bond_table(&self, n: usize) -> BTreeMap<ElementId, ElementId> {
        let (lower, upper) = (self.level(n), self.level(n + 1));
        upper
            .ids()
            .iter()
            .zip(self.bond(n))
            .map(|(c, &p)| (c.clone(), lower.ids[p].clone()))
            .collect()
    }

    fn check_range(&self, n: usize, m: usize) -> Result<(), TowerError> {
        if n < 1 || n > m || m > self.depth() {
            return Err(TowerError::IndexOutOfRange {
                n,
                m,
                depth: self.depth(),
            });
        }
        Ok(())
    }

    /// Index table of `p_{nm} : X_m -> X_n` (identity when `n == m`).
    pub fn composite_indices(&self, n: usize, m: usize) -> Vec<usize> {
        let mut map: Vec<usize> = (0..self.level(m).len()).collect();
        for k in (n..m).rev() {
            let bond = self.bond(k);
            for x in map.iter_mut() {
                *x = bond[*x];
            }
        }
        map
    }

    /// Image `p_{nm}(X_m)` as a sorted set of indices of level `n`.
    pub fn image_indices(&self, n: usize, m: usize) -> BTreeSet<usize> {
        self.composite_indices(n, m).into_iter().collect()
    }

    /// Level with all bonds restricted to the eventual images `p_{nD}(X_D)`.
    pub fn surjective_core(&self) -> Tower {
        let d = self.depth();
        let keep: Vec<BTreeSet<usize>> = (1..=d).map(|n| self.image_indices(n, d)).collect();
        let mut levels = Vec::with_capacity(d);
        let mut renumber: Vec<HashMap<usize, usize>> = Vec::with_capacity(d);
        for (n, kept) in keep.iter().enumerate() {
            let ids = kept
                .iter()
                .map(|&i| self.levels[n].ids[i].clone())
                .collect();
            levels.push(ids);
            renumber.push(
                kept.iter()
                    .enumerate()
                    .map(|(new, &old)| (old, new))
                    .collect(),
            );
        }
        let bonds = (1..d)
            .map(|n| {
                keep[n]
                    .iter()
                    .map(|&old| renumber[n - 1][&self.bond(n)[old]])
                    .collect()
            })
            .collect();
        Tower::from_indices(levels, bonds).expect("core of a valid tower is valid")
    }

    /// Elements of level `n` that are the image of something at level `n1`.
    pub fn extendable_indices(&self, n0: usize, n1: usize) -> BTreeSet<usize> {
        self.image_indices(n0, n1)
    }

    pub fn is_bond_surjective(&self, n: usize) -> bool {
        let mut hit = vec![false; self.level(n).len()];
        for &p in self.bond(n) {
            hit[p] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Restriction to the first `depth` levels.
    pub fn truncate(&self, depth: usize) -> Tower {
        let depth = depth.clamp(1, self.depth());
        Tower {
            levels: self.levels[..depth].to_vec(),
            bonds: self.bonds[..depth - 1].to_vec(),
        }
    }
}

/// The map part of a composite bond `p_{nm}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BondMap {
    /// `table[i]` is the index in level `to` of the image of element `i` of level `from`.
    Table(Vec<usize>),
    /// `z -> factor * z` on integer levels.
    Scale(i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BondComposite {
    pub from: usize,
    pub to: usize,
    pub map: BondMap,
}

impl BondComposite {
    pub fn is_identity(&self) -> bool {
        match &self.map {
            BondMap::Table(t) => t.iter().enumerate().all(|(i, &j)| i == j),
            BondMap::Scale(k) => *k == 1,
        }
    }
}

/// Verdict of the Mittag-Leffler analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MlVerdict {
    Holds,
    Fails,
    InconclusiveAtDepth,
}

/// Stabilization data of the image chain `p_{n0 m}(X_m)` for one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelStability {
    pub level: usize,
    /// Least `m` from which the image chain is constant; `None` if it never is.
    pub stabilizes_at: Option<usize>,
    /// `depth - stabilizes_at`.
    pub margin: Option<i64>,
}

/// An element extendable to `extendable_to` but not to `fails_at`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Defeat {
    pub extendable_to: usize,
    pub element: ElementId,
    pub fails_at: usize,
}

/// Certificate that ML fails at `level`: every candidate `n1` is defeated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlWitness {
    pub level: usize,
    pub defeats: Vec<Defeat>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlReport {
    pub verdict: MlVerdict,
    /// Levels `1..=horizon` were checked.
    pub horizon: usize,
    pub per_level: Vec<LevelStability>,
    pub witness: Option<MlWitness>,
}

impl MlReport {
    pub fn stability(&self, level: usize) -> Option<&LevelStability> {
        self.per_level.iter().find(|s| s.level == level)
    }
}

/// Operations shared by extensional and generator-backed towers.
pub trait InverseSequence {
    fn depth(&self) -> usize;

    /// The composite `p_{nm} = p_n ∘ ⋯ ∘ p_{m-1}`.
    fn compose_bonding(&self, n: usize, m: usize) -> Result<BondComposite, TowerError>;

    /// Whether `element ∈ X_{n0}` has a preimage in `X_{n1}`.
    fn is_extendable(&self, n0: usize, element: &str, n1: usize) -> Result<bool, TowerError>;

    /// ML analysis over levels `1..=horizon`.
    fn ml_verdict_upto(&self, horizon: usize) -> MlReport;

    /// ML analysis with the default horizon `depth - 1`.
    fn ml_verdict(&self) -> MlReport {
        self.ml_verdict_upto(self.depth().saturating_sub(1))
    }
}

impl InverseSequence for Tower {
    fn depth(&self) -> usize {
        self.levels.len()
    }

    fn compose_bonding(&self, n: usize, m: usize) -> Result<BondComposite, TowerError> {
        self.check_range(n, m)?;
        Ok(BondComposite {
            from: m,
            to: n,
            map: BondMap::Table(self.composite_indices(n, m)),
        })
    }

    fn is_extendable(&self, n0: usize, element: &str, n1: usize) -> Result<bool, TowerError> {
        self.check_range(n0, n1)?;
        let a = self
            .level(n0)
            .position(element)
            .ok_or_else(|| TowerError::ElementNotInLevel {
                level: n0,
                id: element.to_string(),
            })?;
        Ok(self.composite_indices(n0, n1).contains(&a))
    }

    /// A finite tower always stabilizes, so the verdict is `Holds` when every
    /// checked level shows its eventual image at least one step before the
    /// last level, and `InconclusiveAtDepth` otherwise.
    fn ml_verdict_upto(&self, horizon: usize) -> MlReport {
        let d = self.depth();
        let horizon = horizon.min(d.saturating_sub(1));
        let per_level: Vec<LevelStability> = (1..=d)
            .map(|n0| {
                let eventual = self.image_indices(n0, d);
                let s = (n0..=d)
                    .find(|&m| self.image_indices(n0, m) == eventual)
                    .expect("the chain is eventual at m = depth");
                LevelStability {
                    level: n0,
                    stabilizes_at: Some(s),
                    margin: Some((d - s) as i64),
                }
            })
            .collect();
        let decided = horizon >= 1
            && per_level[..horizon]
                .iter()
                .all(|s| s.margin.is_some_and(|m| m >= 1));
        MlReport {
            verdict: if decided {
                MlVerdict::Holds
            } else {
                MlVerdict::InconclusiveAtDepth
            },
            horizon,
            per_level,
            witness: None,
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn ids(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    pub fn table(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    /// X1={a}, X2={b1,b2}, X3={c1}; p1: b1,b2 -> a; p2: c1 -> b1.
    pub fn tower_a() -> Tower {
        Tower::new(
            vec![ids(&["a"]), ids(&["b1", "b2"]), ids(&["c1"])],
            vec![table(&[("b1", "a"), ("b2", "a")]), table(&[("c1", "b1")])],
        )
        .unwrap()
    }

    pub fn constant(depth: usize) -> Tower {
        Tower::new(
            vec![ids(&["x"]); depth],
            vec![table(&[("x", "x")]); depth - 1],
        )
        .unwrap()
    }
}
