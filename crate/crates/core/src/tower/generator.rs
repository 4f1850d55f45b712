//! Intensional towers over the integers with bonds `z -> k_n * z`.

use super::{
    BondComposite, BondMap, Defeat, InverseSequence, LevelStability, MlReport, MlVerdict,
    MlWitness, Tower, TowerError,
};

/// The tower `Z <- Z <- Z <- ...` with bond `p_n(z) = k_n * z`.
///
/// `factors[n - 1]` is `k_n`; the last factor repeats forever. Extendability
/// is decided by divisibility, so answers hold for the infinite tower. The
/// `window` bound only matters when the tower is materialized with
/// [`ScalingTower::window`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalingTower {
    factors: Vec<i64>,
    bound: i64,
    depth: usize,
}

impl ScalingTower {
    pub fn new(factors: Vec<i64>, bound: i64, depth: usize) -> Result<Self, TowerError> {
        if factors.is_empty() {
            return Err(TowerError::InvalidParameter("factor list is empty".into()));
        }
        if let Some(k) = factors.iter().find(|&&k| k < 1) {
            return Err(TowerError::InvalidParameter(format!(
                "factor {k} is not positive"
            )));
        }
        if bound < 1 {
            return Err(TowerError::InvalidParameter(format!(
                "window {bound} is not positive"
            )));
        }
        if depth < 1 {
            return Err(TowerError::InvalidParameter(
                "depth must be at least 1".into(),
            ));
        }
        Ok(ScalingTower {
            factors,
            bound,
            depth,
        })
    }

    /// `k_n`, with the last listed factor repeating.
    pub fn factor(&self, n: usize) -> i64 {
        let i = (n - 1).min(self.factors.len() - 1);
        self.factors[i]
    }

    pub fn factors(&self) -> &[i64] {
        &self.factors
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    /// `k_n * ... * k_{m-1}`, or `None` on overflow.
    pub fn product(&self, n: usize, m: usize) -> Option<i64> {
        (n..m).try_fold(1i64, |acc, k| acc.checked_mul(self.factor(k)))
    }

    /// Levels of the windowed model: `X_n = { z : |k_1 ... k_{n-1} z| < B }`,
    /// so every bond lands inside the previous window.
    pub fn level_values(&self, n: usize) -> Vec<i64> {
        match self.product(1, n) {
            Some(p) => {
                let r = (self.bound - 1) / p;
                (-r..=r).collect()
            }
            None => vec![0],
        }
    }

    /// Materializes the windowed model as an extensional tower.
    pub fn window(&self) -> Tower {
        let values: Vec<Vec<i64>> = (1..=self.depth).map(|n| self.level_values(n)).collect();
        let levels = values
            .iter()
            .map(|vs| vs.iter().map(i64::to_string).collect())
            .collect();
        let bonds = (1..self.depth)
            .map(|n| {
                let k = self.factor(n);
                let lower = &values[n - 1];
                let offset = -lower[0];
                values[n]
                    .iter()
                    .map(|&z| (z * k + offset) as usize)
                    .collect()
            })
            .collect();
        Tower::from_indices(levels, bonds).expect("windowed levels are closed under the bonds")
    }

    /// Index of the last factor different from 1 when the repeating tail is 1.
    fn last_nontrivial(&self) -> Option<usize> {
        if *self.factors.last().unwrap() != 1 {
            return None;
        }
        Some(
            self.factors
                .iter()
                .rposition(|&k| k != 1)
                .map_or(0, |i| i + 1),
        )
    }
}

fn parse_level_element(n: usize, element: &str) -> Result<i64, TowerError> {
    element
        .trim()
        .parse()
        .map_err(|_| TowerError::ElementNotInLevel {
            level: n,
            id: element.to_string(),
        })
}

impl InverseSequence for ScalingTower {
    fn depth(&self) -> usize {
        self.depth
    }

    fn compose_bonding(&self, n: usize, m: usize) -> Result<BondComposite, TowerError> {
        if n < 1 || n > m || m > self.depth {
            return Err(TowerError::IndexOutOfRange {
                n,
                m,
                depth: self.depth,
            });
        }
        let k = self.product(n, m).ok_or(TowerError::Overflow)?;
        Ok(BondComposite {
            from: m,
            to: n,
            map: BondMap::Scale(k),
        })
    }

    /// Exact for the infinite tower: `element` lifts to level `n1` iff
    /// `k_{n0} ... k_{n1-1}` divides it. Any `n1 >= n0` is accepted.
    fn is_extendable(&self, n0: usize, element: &str, n1: usize) -> Result<bool, TowerError> {
        if n0 < 1 || n1 < n0 {
            return Err(TowerError::IndexOutOfRange {
                n: n0,
                m: n1,
                depth: self.depth,
            });
        }
        let a = parse_level_element(n0, element)?;
        Ok(match self.product(n0, n1) {
            Some(p) => a % p == 0,
            // the product exceeds every i64, so only 0 is divisible
            None => a == 0,
        })
    }

    fn ml_verdict_upto(&self, horizon: usize) -> MlReport {
        let d = self.depth;
        let horizon = horizon.min(d.saturating_sub(1)).max(1);
        match self.last_nontrivial() {
            Some(last) => {
                let per_level = (1..=d)
                    .map(|n0| {
                        let s = n0.max(last + 1);
                        LevelStability {
                            level: n0,
                            stabilizes_at: Some(s),
                            margin: Some(d as i64 - s as i64),
                        }
                    })
                    .collect();
                MlReport {
                    verdict: MlVerdict::Holds,
                    horizon,
                    per_level,
                    witness: None,
                }
            }
            None => {
                let per_level = (1..=d)
                    .map(|n0| LevelStability {
                        level: n0,
                        stabilizes_at: None,
                        margin: None,
                    })
                    .collect();
                MlReport {
                    verdict: MlVerdict::Fails,
                    horizon,
                    per_level,
                    witness: Some(self.failure_witness(1)),
                }
            }
        }
    }
}

impl ScalingTower {
    /// For each `n1` up to the depth: the element `k_{n0} ... k_{n1-1}` lifts to
    /// `n1` but not to the first later level whose factor is not 1.
    pub fn failure_witness(&self, n0: usize) -> MlWitness {
        let mut defeats = Vec::new();
        for n1 in n0..=self.depth {
            let Some(element) = self.product(n0, n1) else {
                break;
            };
            let Some(fails_at) =
                (n1 + 1..n1 + 1 + self.factors.len() + 1).find(|&n| self.factor(n - 1) != 1)
            else {
                break;
            };
            let element = element.to_string();
            let lifts = self.is_extendable(n0, &element, n1) == Ok(true);
            let defeated = self.is_extendable(n0, &element, fails_at) == Ok(false);
            if !(lifts && defeated) {
                break;
            }
            defeats.push(Defeat {
                extendable_to: n1,
                element,
                fails_at,
            });
        }
        MlWitness { level: n0, defeats }
    }
}
