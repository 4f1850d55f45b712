//! Generators: the solenoid family, the bi-Hölder table, the non-retract
//! distances, and seeded random towers, morphisms, ultrametrics and group
//! towers for property corpora.

use std::collections::BTreeSet;
use std::sync::Arc;

use num::{BigRational, One};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ends::{Distances, UltrametricSpace};
use crate::exact::{fmt_big_rational, inv_pow2, rat, Interval, Rational};
use crate::progroup::{FiniteGroup, GroupError, GroupHom, GroupLevel, GroupTower};
use crate::tower::{ScalingTower, Tower, TowerError, TowerMorphism};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The windowed integers with bonds `z -> k_n z`, as a generator, as a
/// group tower and as a tower of sets.
#[derive(Debug, Clone)]
pub struct Solenoid {
    pub generator: ScalingTower,
    pub group: GroupTower,
    pub tower: Tower,
}

pub fn gen_solenoid(primes: &[i64], window: i64, depth: usize) -> Result<Solenoid, GenError> {
    let generator = ScalingTower::new(primes.to_vec(), window, depth)?;
    let levels = vec![GroupLevel::WindowedZ { bound: window }; depth];
    let bonds = (1..depth)
        .map(|n| GroupHom::Scale(generator.factor(n)))
        .collect();
    let group = GroupTower::new(levels, bonds)?;
    let tower = generator.window();
    Ok(Solenoid {
        generator,
        group,
        tower,
    })
}

/// One row: consecutive shape morphisms at distance `1/2^{k+1}` and the
/// level from which they are identified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiHolderRow {
    pub k: u32,
    /// Exact `d(α_{k-1}, α_k)`.
    pub d: String,
    /// Least integer strictly above `-k ln(d / k)`.
    #[serde(rename = "n_k")]
    pub separation_level: u64,
    /// `e^{-separation_level}`, for display.
    #[serde(rename = "d_tilde")]
    pub level_distance: f64,
    /// `[lo, hi]` enclosing `-k ln(d / k)`.
    pub bound: (f64, f64),
    /// `d̃ < (d/k)^k`, decided on the enclosure.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderSearch {
    pub c: f64,
    pub l: f64,
    /// Least `k` whose separation level `n` gives `C e^{-l n} < d`; `None` when no `k <= k_max` works.
    pub first_violation: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiHolderTable {
    pub k_max: u32,
    pub rows: Vec<BiHolderRow>,
    pub searches: Vec<HolderSearch>,
}

impl BiHolderTable {
    pub fn row(&self, k: u32) -> Option<&BiHolderRow> {
        self.rows.iter().find(|r| r.k == k)
    }
}

pub const DEFAULT_C_GRID: [f64; 3] = [1.0, 10.0, 100.0];
pub const DEFAULT_L_GRID: [f64; 3] = [0.1, 0.5, 0.9];

/// Enclosure of `-k ln(2^{-(k+1)} / k) = k ((k+1) ln 2 + ln k)`.
fn threshold(k: u32) -> Interval {
    let inner = Interval::ln(2.0)
        .scale(f64::from(k + 1))
        .add(Interval::ln(f64::from(k)));
    inner.scale(f64::from(k))
}

/// Enclosure of `ln d = -(k+1) ln 2`.
fn ln_d(k: u32) -> Interval {
    Interval::ln(2.0).scale(-f64::from(k + 1))
}

pub fn gen_biholder(k_max: u32, c_grid: &[f64], l_grid: &[f64]) -> Result<BiHolderTable, GenError> {
    if k_max < 2 {
        return Err(GenError::InvalidParameter(format!("k_max {k_max} < 2")));
    }
    if let Some(c) = c_grid.iter().find(|&&c| c.is_nan() || c <= 0.0) {
        return Err(GenError::InvalidParameter(format!(
            "C = {c} is not positive"
        )));
    }
    if let Some(l) = l_grid.iter().find(|&&l| !(l > 0.0 && l < 1.0)) {
        return Err(GenError::InvalidParameter(format!(
            "l = {l} is outside (0, 1)"
        )));
    }
    let mut rows = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let b = threshold(k);
        if b.lo.floor() != b.hi.floor() {
            return Err(GenError::InvalidParameter(format!(
                "enclosure at k = {k} is too wide"
            )));
        }
        // the threshold is ln of an integer > 1, never an integer itself
        let separation_level = b.hi.floor() as u64 + 1;
        rows.push(BiHolderRow {
            k,
            d: fmt_big_rational(&inv_pow2(k + 1)),
            separation_level,
            level_distance: (-(separation_level as f64)).exp(),
            bound: (b.lo, b.hi),
            certified: b.certainly_lt(separation_level as f64) && !b.contains_integer(),
        });
    }
    let mut searches = Vec::new();
    for &c in c_grid {
        for &l in l_grid {
            // C e^{-l n} < d  <=>  ln C - l n < ln d
            let first_violation = rows.iter().find_map(|r| {
                let lhs = Interval::ln(c).sub(Interval::point(r.separation_level as f64).scale(l));
                lhs.certainly_lt(ln_d(r.k).lo).then_some(r.k)
            });
            searches.push(HolderSearch {
                c,
                l,
                first_violation,
            });
        }
    }
    Ok(BiHolderTable {
        k_max,
        rows,
        searches,
    })
}

/// Distances from the end `x` of the finite branch to the branch points at
/// radius `(2^i - 1)/2^i`, which accumulate at `x` without reaching it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonRetract {
    /// `(i, radius of the i-th branch point, distance to x)`, exact.
    pub branch_points: Vec<(u32, String, String)>,
    pub infimum: String,
    pub attained: bool,
    pub x_in_core: bool,
}

pub fn gen_example_nonretract(count: u32) -> Result<NonRetract, GenError> {
    if count == 0 {
        return Err(GenError::InvalidParameter(
            "need at least one branch".into(),
        ));
    }
    let one = BigRational::one();
    let mut branch_points = Vec::with_capacity(count as usize);
    let mut attained = false;
    for i in 1..=count {
        let radius = &one - inv_pow2(i);
        let dist = &one - &radius;
        attained |= dist == BigRational::from_integer(0.into());
        branch_points.push((i, fmt_big_rational(&radius), fmt_big_rational(&dist)));
    }
    // 1/2^i -> 0 and every term is positive
    Ok(NonRetract {
        branch_points,
        infimum: "0".into(),
        attained,
        x_in_core: attained,
    })
}

fn level_ids(n: usize, size: usize) -> Vec<String> {
    let letter = (b'a' + ((n - 1) % 26) as u8) as char;
    (0..size).map(|i| format!("{letter}{i}")).collect()
}

/// `bias` is the chance that a bond is forced surjective.
pub fn gen_random_tower(
    seed: u64,
    depth: usize,
    max_level_size: usize,
    surjectivity_bias: f64,
) -> Result<Tower, GenError> {
    if depth < 1 || max_level_size < 1 || !(0.0..=1.0).contains(&surjectivity_bias) {
        return Err(GenError::InvalidParameter(format!(
            "depth {depth}, size {max_level_size}, bias {surjectivity_bias}"
        )));
    }
    let mut r = rng(seed);
    let mut sizes = vec![r.gen_range(1..=max_level_size)];
    let mut bonds = Vec::with_capacity(depth.saturating_sub(1));
    for _ in 1..depth {
        let below = *sizes.last().unwrap();
        let surjective = r.gen_bool(surjectivity_bias);
        let size = if surjective {
            r.gen_range(below..=max_level_size.max(below))
        } else {
            r.gen_range(1..=max_level_size)
        };
        let mut bond: Vec<usize> = (0..size).map(|_| r.gen_range(0..below)).collect();
        if surjective {
            let mut slots: Vec<usize> = (0..size).collect();
            slots.shuffle(&mut r);
            for (parent, &slot) in slots.iter().take(below).enumerate() {
                bond[slot] = parent;
            }
        }
        sizes.push(size);
        bonds.push(bond);
    }
    let levels = sizes
        .iter()
        .enumerate()
        .map(|(i, &s)| level_ids(i + 1, s))
        .collect();
    Ok(Tower::from_indices(levels, bonds)?)
}

/// A coherent morphism between two seeded towers of the same depth.
pub fn gen_random_morphism(
    seed: u64,
    depth: usize,
    max_level_size: usize,
) -> Result<TowerMorphism, GenError> {
    if depth < 1 || max_level_size < 1 {
        return Err(GenError::InvalidParameter(format!(
            "depth {depth}, size {max_level_size}"
        )));
    }
    let mut r = rng(seed);
    let bias = r.gen_range(0.0..=1.0);
    let target = gen_random_tower(r.gen(), depth, max_level_size, bias)?;
    gen_random_morphism_into(r.gen(), Arc::new(target), max_level_size, 1)
}

/// A seeded source grown level by level over `target`, so that a strict
/// level morphism `g` exists; the result is `g_n ∘ p_{n Φ(n)}` with
/// `n <= Φ(n) <= n + lag`.
pub fn gen_random_morphism_into(
    seed: u64,
    target: Arc<Tower>,
    max_level_size: usize,
    lag: usize,
) -> Result<TowerMorphism, GenError> {
    if max_level_size < 1 {
        return Err(GenError::InvalidParameter(
            "level size must be at least 1".into(),
        ));
    }
    let mut r = rng(seed);
    let depth = target.depth();
    // only target elements that extend to the top can carry source elements
    let reachable: Vec<Vec<usize>> = (1..=depth)
        .map(|n| target.image_indices(n, depth).into_iter().collect())
        .collect();
    let mut g: Vec<Vec<usize>> = Vec::with_capacity(depth);
    let mut bonds: Vec<Vec<usize>> = Vec::with_capacity(depth.saturating_sub(1));
    let size = r.gen_range(1..=max_level_size);
    g.push(
        (0..size)
            .map(|_| *reachable[0].choose(&mut r).unwrap())
            .collect(),
    );
    for n in 1..depth {
        let size = r.gen_range(1..=max_level_size);
        let q = target.bond(n);
        let (mut gn, mut bond) = (Vec::with_capacity(size), Vec::with_capacity(size));
        for _ in 0..size {
            let parent = r.gen_range(0..g[n - 1].len());
            let over: Vec<usize> = reachable[n]
                .iter()
                .copied()
                .filter(|&y| q[y] == g[n - 1][parent])
                .collect();
            bond.push(parent);
            gn.push(*over.choose(&mut r).expect("reachable elements extend"));
        }
        g.push(gn);
        bonds.push(bond);
    }
    let levels = g
        .iter()
        .enumerate()
        .map(|(i, l)| level_ids(i + 1, l.len()))
        .collect();
    let source = Tower::from_indices(levels, bonds)?;
    let mut index = Vec::with_capacity(depth);
    for n in 1..=depth {
        let lo = index.last().copied().unwrap_or(1).max(n);
        index.push(r.gen_range(lo..=(n + lag).min(depth).max(lo)));
    }
    let components = (1..=depth)
        .map(|n| {
            source
                .composite_indices(n, index[n - 1])
                .iter()
                .map(|&x| g[n - 1][x])
                .collect()
        })
        .collect();
    Ok(TowerMorphism::new(
        Arc::new(source),
        target,
        index,
        components,
    )?)
}

/// Random addresses; the exponent of a pair is their common prefix length.
fn random_addresses(r: &mut ChaCha8Rng, points: usize, max_exponent: u32) -> Vec<Vec<u8>> {
    let mut seen = BTreeSet::new();
    let branching = r.gen_range(2..=4u8);
    let mut out = Vec::with_capacity(points);
    let mut attempts = 0;
    while out.len() < points && attempts < 10_000 {
        attempts += 1;
        let addr: Vec<u8> = (0..=max_exponent)
            .map(|_| r.gen_range(0..branching))
            .collect();
        if seen.insert(addr.clone()) {
            out.push(addr);
        }
    }
    out
}

fn common_prefix(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn point_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

/// Grid ultrametric on at most `max_points` points with exponents `<= max_exponent`.
pub fn gen_random_grid_ultrametric(
    seed: u64,
    max_points: usize,
    max_exponent: u32,
) -> Result<UltrametricSpace, GenError> {
    if max_points < 1 {
        return Err(GenError::InvalidParameter("no points".into()));
    }
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_points);
    let addr = random_addresses(&mut r, n, max_exponent);
    let m = addr
        .iter()
        .map(|a| {
            addr.iter()
                .map(|b| common_prefix(a, b).min(max_exponent as usize) as u32)
                .collect()
        })
        .collect();
    UltrametricSpace::new(point_names(addr.len()), Distances::Grid(m))
        .map_err(|e| GenError::InvalidParameter(e.to_string()))
}

/// Rational ultrametric: a strictly decreasing rational per shared-prefix length.
pub fn gen_random_rational_ultrametric(
    seed: u64,
    max_points: usize,
) -> Result<UltrametricSpace, GenError> {
    if max_points < 1 {
        return Err(GenError::InvalidParameter("no points".into()));
    }
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_points);
    let depth = r.gen_range(1..=5u32);
    let addr = random_addresses(&mut r, n, depth);
    let mut values: Vec<Rational> = Vec::with_capacity(depth as usize + 1);
    let mut current = rat(r.gen_range(500..=1000), 1000);
    for _ in 0..=depth {
        values.push(current);
        current *= rat(r.gen_range(5..=95), 100);
    }
    let m = addr
        .iter()
        .map(|a| {
            addr.iter()
                .map(|b| {
                    if a == b {
                        rat(0, 1)
                    } else {
                        values[common_prefix(a, b)]
                    }
                })
                .collect()
        })
        .collect();
    UltrametricSpace::new(point_names(addr.len()), Distances::Rational(m))
        .map_err(|e| GenError::InvalidParameter(e.to_string()))
}

/// Cyclic tower `Z/m_1 <- Z/m_2 <- ...` with `m_n | m_{n+1} <= 64` and bonds
/// `x -> c_n x mod m_n`.
pub fn gen_random_group_tower(seed: u64, depth: usize) -> Result<GroupTower, GenError> {
    if depth < 1 {
        return Err(GenError::InvalidParameter(
            "depth must be at least 1".into(),
        ));
    }
    let mut r = rng(seed);
    let mut moduli = vec![r.gen_range(1..=6usize)];
    for _ in 1..depth {
        let last = *moduli.last().unwrap();
        let options: Vec<usize> = [1, 2, 3]
            .iter()
            .map(|k| k * last)
            .filter(|&m| m <= 64)
            .collect();
        moduli.push(*options.choose(&mut r).unwrap());
    }
    let levels = moduli
        .iter()
        .map(|&m| GroupLevel::Table(FiniteGroup::cyclic(m)))
        .collect();
    let bonds = moduli
        .windows(2)
        .map(|w| {
            let c = r
                .gen_range(0..w[0] as i64)
                .max(if r.gen_bool(0.7) { 1 } else { 0 });
            GroupHom::Table(
                (0..w[1] as i64)
                    .map(|x| (c * x).rem_euclid(w[0] as i64))
                    .collect(),
            )
        })
        .collect();
    Ok(GroupTower::new(levels, bonds)?)
}
