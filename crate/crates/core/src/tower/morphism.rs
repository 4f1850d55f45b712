//! Morphisms of towers `(f_n, Φ)`: `f_n : X_{Φ(n)} -> Y_n`, coherent up to
//! composing with bonds, and the equivalence `∼` between them.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{ElementId, Tower, TowerError};

/// A morphism of towers known on levels `1..=defined_upto()` of the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerMorphism {
    source: Arc<Tower>,
    target: Arc<Tower>,
    /// `index[n - 1]` is `Φ(n)`, nondecreasing.
    index: Vec<usize>,
    /// `components[n - 1][i]` is the target index of `f_n` on element `i` of `X_{Φ(n)}`.
    components: Vec<Vec<usize>>,
    /// `coherence[n - 1]` is the least `m` at which the square for `n` commutes.
    coherence: Vec<usize>,
}

/// Level at which two morphisms were compared and the verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Equivalence {
    /// Per-level witnesses `m_n`.
    Equivalent(Vec<usize>),
    /// No witness even when the truncation is taken as the whole tower.
    NotEquivalentClosedWorld { level: usize },
    /// The only candidate index was the last level, so deeper levels could still agree.
    Inconclusive { level: usize },
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent(_))
    }
}

fn same_tower(a: &Arc<Tower>, b: &Arc<Tower>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn compose_tables(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    inner.iter().map(|&i| outer[i]).collect()
}

impl TowerMorphism {
    /// Builds a morphism from index tables, normalizing `Φ` to be nondecreasing
    /// and checking that every consecutive square commutes within the depth.
    pub fn new(
        source: Arc<Tower>,
        target: Arc<Tower>,
        index: Vec<usize>,
        components: Vec<Vec<usize>>,
    ) -> Result<Self, TowerError> {
        let f = Self::normalized(source, target, index, components)?;
        let k = f.index.len();
        let coherent = f.coherence.len() + 1;
        if coherent < k {
            return Err(TowerError::Incoherent(coherent));
        }
        Ok(f)
    }

    /// Like [`TowerMorphism::new`] but truncates to the longest coherent prefix.
    pub fn new_truncating(
        source: Arc<Tower>,
        target: Arc<Tower>,
        index: Vec<usize>,
        components: Vec<Vec<usize>>,
    ) -> Result<Self, TowerError> {
        let mut f = Self::normalized(source, target, index, components)?;
        let keep = f.coherence.len() + 1;
        f.index.truncate(keep);
        f.components.truncate(keep);
        Ok(f)
    }

    /// Builds a morphism from id tables `x -> y`.
    pub fn from_tables(
        source: Arc<Tower>,
        target: Arc<Tower>,
        index: Vec<usize>,
        tables: &[BTreeMap<ElementId, ElementId>],
    ) -> Result<Self, TowerError> {
        if tables.len() != index.len() {
            return Err(TowerError::BadComponent {
                level: tables.len().min(index.len()) + 1,
                reason: format!(
                    "{} index entries but {} components",
                    index.len(),
                    tables.len()
                ),
            });
        }
        let mut components = Vec::with_capacity(tables.len());
        for (n, (table, &m)) in tables.iter().zip(&index).enumerate() {
            let n = n + 1;
            if m < 1 || m > source.depth() || n > target.depth() {
                return Err(TowerError::IndexOutOfRange {
                    n,
                    m,
                    depth: source.depth(),
                });
            }
            let (dom, cod) = (source.level(m), target.level(n));
            for x in table.keys() {
                if dom.position(x).is_none() {
                    return Err(TowerError::ElementNotInLevel {
                        level: m,
                        id: x.clone(),
                    });
                }
            }
            let comp = dom
                .ids()
                .iter()
                .map(|x| {
                    let y = table.get(x).ok_or_else(|| TowerError::BadComponent {
                        level: n,
                        reason: format!("no image for {x:?}"),
                    })?;
                    cod.position(y).ok_or_else(|| TowerError::BadComponent {
                        level: n,
                        reason: format!("image {y:?} is not in target level {n}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            components.push(comp);
        }
        Self::new(source, target, index, components)
    }

    fn normalized(
        source: Arc<Tower>,
        target: Arc<Tower>,
        index: Vec<usize>,
        components: Vec<Vec<usize>>,
    ) -> Result<Self, TowerError> {
        if index.is_empty() || index.len() != components.len() {
            return Err(TowerError::BadComponent {
                level: 1,
                reason: format!(
                    "{} index entries, {} components",
                    index.len(),
                    components.len()
                ),
            });
        }
        let d = source.depth();
        let mut norm_index = Vec::with_capacity(index.len());
        let mut norm_comp = Vec::with_capacity(index.len());
        let mut running = 0;
        for (n, (&m, comp)) in index.iter().zip(components).enumerate() {
            let n = n + 1;
            if m < 1 || m > d || n > target.depth() {
                return Err(TowerError::IndexOutOfRange { n, m, depth: d });
            }
            if comp.len() != source.level(m).len() {
                return Err(TowerError::BadComponent {
                    level: n,
                    reason: format!("expected {} entries", source.level(m).len()),
                });
            }
            if let Some(&bad) = comp.iter().find(|&&y| y >= target.level(n).len()) {
                return Err(TowerError::BadComponent {
                    level: n,
                    reason: format!("target index {bad} out of range"),
                });
            }
            running = running.max(m);
            let comp = if running == m {
                comp
            } else {
                compose_tables(&comp, &source.composite_indices(m, running))
            };
            norm_index.push(running);
            norm_comp.push(comp);
        }
        let mut f = TowerMorphism {
            source,
            target,
            index: norm_index,
            components: norm_comp,
            coherence: Vec::new(),
        };
        for n in 1..f.index.len() {
            match f.square_witness(n) {
                Some(m) => f.coherence.push(m),
                None => break,
            }
        }
        Ok(f)
    }

    /// Least `m <= depth` with `f_n ∘ p_{Φ(n)m} = q_n ∘ f_{n+1} ∘ p_{Φ(n+1)m}`.
    fn square_witness(&self, n: usize) -> Option<usize> {
        let (a, b) = (self.index_at(n), self.index_at(n + 1));
        let q = self.target.bond(n);
        (a.max(b)..=self.source.depth()).find(|&m| {
            let lower = compose_tables(self.component(n), &self.source.composite_indices(a, m));
            let upper = compose_tables(
                q,
                &compose_tables(self.component(n + 1), &self.source.composite_indices(b, m)),
            );
            lower == upper
        })
    }

    pub fn source(&self) -> &Arc<Tower> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Tower> {
        &self.target
    }

    /// Number of target levels on which the morphism is defined.
    pub fn defined_upto(&self) -> usize {
        self.index.len()
    }

    /// `Φ(n)`.
    pub fn index_at(&self, n: usize) -> usize {
        self.index[n - 1]
    }

    pub fn index_function(&self) -> &[usize] {
        &self.index
    }

    /// Index table of `f_n : X_{Φ(n)} -> Y_n`.
    pub fn component(&self, n: usize) -> &[usize] {
        &self.components[n - 1]
    }

    pub fn component_table(&self, n: usize) -> BTreeMap<ElementId, ElementId> {
        let dom = self.source.level(self.index_at(n)).ids();
        let cod = self.target.level(n).ids();
        dom.iter()
            .zip(self.component(n))
            .map(|(x, &y)| (x.clone(), cod[y].clone()))
            .collect()
    }

    /// Stored witnesses `m` for the squares `n = 1..defined_upto()`.
    pub fn coherence_witnesses(&self) -> &[usize] {
        &self.coherence
    }

    /// `f_n ∘ p_{Φ(n)m}` as an index table on `X_m`.
    pub fn component_at(&self, n: usize, m: usize) -> Vec<usize> {
        compose_tables(
            self.component(n),
            &self.source.composite_indices(self.index_at(n), m),
        )
    }

    /// `Φ = id` and every square commutes on the nose.
    pub fn is_level(&self) -> bool {
        self.index.iter().enumerate().all(|(i, &m)| m == i + 1)
            && self.coherence.iter().enumerate().all(|(i, &m)| m == i + 2)
    }
}

pub fn identity_morphism(tower: Arc<Tower>) -> TowerMorphism {
    let d = tower.depth();
    let components = (1..=d)
        .map(|n| (0..tower.level(n).len()).collect())
        .collect();
    TowerMorphism {
        source: tower.clone(),
        target: tower,
        index: (1..=d).collect(),
        components,
        coherence: (2..=d).collect(),
    }
}

/// `g ∘ f` with index function `Φ_f ∘ Φ_g` and components `g_n ∘ f_{Φ_g(n)}`,
/// truncated to the prefix whose squares commute within the depth.
pub fn compose_morphisms(
    g: &TowerMorphism,
    f: &TowerMorphism,
) -> Result<TowerMorphism, TowerError> {
    if !same_tower(f.target(), g.source()) {
        return Err(TowerError::SourceTargetMismatch);
    }
    let mut index = Vec::new();
    let mut components = Vec::new();
    for n in 1..=g.defined_upto() {
        let mid = g.index_at(n);
        if mid > f.defined_upto() {
            break;
        }
        index.push(f.index_at(mid));
        components.push(compose_tables(g.component(n), f.component(mid)));
    }
    if index.is_empty() {
        return Err(TowerError::DepthExhausted);
    }
    TowerMorphism::new_truncating(f.source().clone(), g.target().clone(), index, components)
}

/// Searches, level by level, for `m >= Φ(n), Ψ(n)` with
/// `f_n ∘ p_{Φ(n)m} = g_n ∘ p_{Ψ(n)m}` over the common defined range.
pub fn morphisms_equivalent(
    f: &TowerMorphism,
    g: &TowerMorphism,
) -> Result<Equivalence, TowerError> {
    if !same_tower(f.source(), g.source()) || !same_tower(f.target(), g.target()) {
        return Err(TowerError::SourceTargetMismatch);
    }
    let d = f.source().depth();
    let horizon = f.defined_upto().min(g.defined_upto());
    let mut witnesses = Vec::with_capacity(horizon);
    for n in 1..=horizon {
        let lo = f.index_at(n).max(g.index_at(n));
        // once the squares agree at m they agree at every later m
        let found = (lo..=d).find(|&m| f.component_at(n, m) == g.component_at(n, m));
        match found {
            Some(m) => witnesses.push(m),
            None if lo == d => return Ok(Equivalence::Inconclusive { level: n }),
            None => return Ok(Equivalence::NotEquivalentClosedWorld { level: n }),
        }
    }
    Ok(Equivalence::Equivalent(witnesses))
}

/// Output of [`levelize_morphism`]: `iso_out ∘ f ∼ level ∘ iso_in`.
#[derive(Debug, Clone)]
pub struct Levelized {
    /// `X'_k = X_{m_k}`.
    pub source: Arc<Tower>,
    /// The target truncated to the same number of levels.
    pub target: Arc<Tower>,
    pub levels_used: Vec<usize>,
    pub iso_in: TowerMorphism,
    pub iso_out: TowerMorphism,
    pub level: TowerMorphism,
}

/// Reindexes the source along the coherence chain so that the morphism
/// becomes a level morphism.
pub fn levelize_morphism(f: &TowerMorphism) -> Result<Levelized, TowerError> {
    let x = f.source();
    let d = x.depth();
    let mut used: Vec<usize> = Vec::new();
    for k in 1..=f.defined_upto() {
        let mut m = f.index_at(k);
        if k > 1 {
            let Some(&c) = f.coherence_witnesses().get(k - 2) else {
                break;
            };
            m = m.max(c).max(used[k - 2] + 1);
        }
        if m > d {
            break;
        }
        used.push(m);
    }
    if used.is_empty() {
        return Err(TowerError::DepthExhausted);
    }
    let kk = used.len();
    let levels = used.iter().map(|&m| x.level(m).ids().to_vec()).collect();
    let bonds = (1..kk)
        .map(|k| x.composite_indices(used[k - 1], used[k]))
        .collect();
    let xp = Arc::new(Tower::from_indices(levels, bonds)?);
    let yp = Arc::new(f.target().truncate(kk));

    let level_components = (1..=kk).map(|k| f.component_at(k, used[k - 1])).collect();
    let level = TowerMorphism::new(xp.clone(), yp.clone(), (1..=kk).collect(), level_components)?;
    let iso_in = TowerMorphism::new(
        x.clone(),
        xp.clone(),
        used.clone(),
        used.iter()
            .map(|&m| (0..x.level(m).len()).collect())
            .collect(),
    )?;
    let iso_out = TowerMorphism::new(
        f.target().clone(),
        yp.clone(),
        (1..=kk).collect(),
        (1..=kk).map(|n| (0..yp.level(n).len()).collect()).collect(),
    )?;
    Ok(Levelized {
        source: xp,
        target: yp,
        levels_used: used,
        iso_in,
        iso_out,
        level,
    })
}
