//! Orchestration: the analysis report, DOT export and the roundtrip corpus.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ends::end_space_of;
use crate::format::TowerInput;
use crate::generators::{gen_random_morphism_into, gen_random_tower, GenError};
use crate::maps::{
    check_nonexpansive, compose_tree_maps, extract_morphism, greedy_schedule, homotopy_properness,
    induce_tree_map_with, properness_upto, properness_witness, retraction_map, simplicial_of_level,
    InducedMap, MapError, NonExpansive, Properness, ScheduleRule, TreeMap,
};
use crate::tower::{
    compose_morphisms, identity_morphism, morphisms_equivalent, Equivalence, InverseSequence,
    MlReport, MlVerdict, Tower, TowerMorphism,
};
use crate::tree::{tower_of_tree, tree_of_tower, RootedTree};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreSummary {
    /// Vertices of the core, root included.
    pub vertices: usize,
    pub depth: usize,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndSummary {
    pub points: usize,
    /// Agreement exponent of each unordered pair of distinct ends.
    pub exponent_histogram: BTreeMap<u32, usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossCheck {
    Consistent,
    Inconsistent,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    /// `extensional` or `generator`.
    pub kind: String,
    pub depth: usize,
    pub level_sizes: Vec<usize>,
    pub ml: MlReport,
    pub core: CoreSummary,
    pub end_space: EndSummary,
    pub retraction: Properness,
    /// Levels where ML has a margin agree with levels where the retraction is certified.
    pub cross_check: CrossCheck,
}

/// Analyzes levels `1..=horizon` (default: all but the last).
pub fn analyze(input: &TowerInput, horizon: Option<usize>) -> AnalysisReport {
    let tower = input.materialize();
    let d = tower.depth();
    let horizon = horizon
        .unwrap_or(d.saturating_sub(1))
        .min(d.saturating_sub(1));
    let (kind, ml) = match input {
        TowerInput::Extensional(t) => ("extensional", t.ml_verdict_upto(horizon)),
        TowerInput::Solenoid(s) => ("generator", s.ml_verdict_upto(horizon)),
    };
    let tree = Arc::new(tree_of_tower(&tower));
    let core_tree = tree.max_geodesic_subtree();
    let ends = end_space_of(&tree);
    let retraction = properness_upto(&retraction_map(&tree), horizon);
    let cross_check = cross_check(input, &ml, &retraction, horizon);
    AnalysisReport {
        kind: kind.into(),
        depth: d,
        level_sizes: tower.level_sizes(),
        core: CoreSummary {
            vertices: core_tree.len(),
            depth: core_tree.depth(),
            complete: core_tree.depth() == d,
        },
        end_space: EndSummary {
            points: ends.len(),
            exponent_histogram: ends.exponent_histogram(),
        },
        ml,
        retraction,
        cross_check,
    }
}

fn certified_levels(p: &Properness) -> usize {
    match p {
        Properness::Witness(w) => w.table.len(),
        Properness::Failure { partial, .. } => partial.len(),
    }
}

fn cross_check(input: &TowerInput, ml: &MlReport, r: &Properness, horizon: usize) -> CrossCheck {
    let agree = match input {
        _ if horizon == 0 => return CrossCheck::NotApplicable,
        TowerInput::Extensional(_) => {
            // level n has a margin iff the retraction is certified at n
            let with_margin = ml.per_level[..horizon]
                .iter()
                .take_while(|s| s.margin.is_some_and(|m| m >= 1))
                .count();
            with_margin == certified_levels(r)
        }
        // once the window holds only 0 it is ML itself and says nothing about Z
        TowerInput::Solenoid(s) if s.level_values(horizon) == [0] => {
            return CrossCheck::NotApplicable
        }
        TowerInput::Solenoid(_) => match ml.verdict {
            MlVerdict::InconclusiveAtDepth => return CrossCheck::NotApplicable,
            v => (v == MlVerdict::Holds) == r.is_total(),
        },
    };
    if agree {
        CrossCheck::Consistent
    } else {
        CrossCheck::Inconsistent
    }
}

pub fn render_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "tower: {} depth {}, level sizes {:?}",
        r.kind, r.depth, r.level_sizes
    );
    let _ = writeln!(out, "ML: {:?} (levels 1..={})", r.ml.verdict, r.ml.horizon);
    for s in &r.ml.per_level {
        match (s.stabilizes_at, s.margin) {
            (Some(at), Some(m)) => {
                let _ = writeln!(
                    out,
                    "  level {}: image stable from {at}, margin {m}",
                    s.level
                );
            }
            _ => {
                let _ = writeln!(out, "  level {}: image never stable", s.level);
            }
        }
    }
    if let Some(w) = &r.ml.witness {
        let _ = writeln!(out, "  failure witness at level {}:", w.level);
        for d in &w.defeats {
            let _ = writeln!(
                out,
                "    {} extends to level {} but not to {}",
                d.element, d.extendable_to, d.fails_at
            );
        }
    }
    let _ = writeln!(
        out,
        "core: {} vertices, depth {}{}",
        r.core.vertices,
        r.core.depth,
        if r.core.complete {
            ""
        } else {
            " (shallower than the tower)"
        }
    );
    let _ = writeln!(
        out,
        "ends: {} points, exponents {:?}",
        r.end_space.points, r.end_space.exponent_histogram
    );
    match &r.retraction {
        Properness::Witness(w) => {
            let _ = writeln!(out, "retraction: proper, m(n) = {:?}", w.table);
        }
        Properness::Failure { level, partial } => {
            let _ = writeln!(
                out,
                "retraction: no witness at level {level}, certified {partial:?}"
            );
        }
    }
    let _ = writeln!(out, "cross-check: {:?}", r.cross_check);
    out
}

/// Graphviz source: `level:id` labels, pruned vertices dashed and grey.
pub fn export_dot(tower: &Tower) -> String {
    let tree = tree_of_tower(tower);
    dot_of_tree(&tree)
}

pub fn dot_of_tree(tree: &RootedTree) -> String {
    let core = tree.core_mask();
    let mut order: Vec<usize> = tree.vertices().collect();
    order.sort_by(|&a, &b| (tree.radius(a), tree.label(a)).cmp(&(tree.radius(b), tree.label(b))));
    let mut out = String::from("digraph tower {\n  node [shape=box];\n");
    for &v in &order {
        let label = if v == tree.root() {
            tree.label(v).to_string()
        } else {
            format!("{}:{}", tree.radius(v), tree.label(v))
        };
        let style = if core[v] {
            "style=bold"
        } else {
            "style=dashed, color=gray"
        };
        let _ = writeln!(out, "  n{v} [label=\"{label}\", {style}];");
    }
    for &v in &order {
        if let Some(p) = tree.parent(v) {
            let _ = writeln!(out, "  n{p} -> n{v};");
        }
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawCount {
    pub passed: usize,
    pub failed: usize,
    /// The check ran out of levels before it could decide.
    pub inconclusive: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl From<bool> for Outcome {
    fn from(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundtripSummary {
    pub seeds: u64,
    pub laws: BTreeMap<String, LawCount>,
    /// `(law, seed)` of each failure, in order.
    pub failures: Vec<(String, u64)>,
}

impl RoundtripSummary {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn inconclusive(&self) -> usize {
        self.laws.values().map(|c| c.inconclusive).sum()
    }

    fn record(&mut self, law: &str, seed: u64, outcome: impl Into<Outcome>) {
        let c = self.laws.entry(law.to_string()).or_default();
        match outcome.into() {
            Outcome::Pass => c.passed += 1,
            Outcome::Inconclusive => c.inconclusive += 1,
            Outcome::Fail => {
                c.failed += 1;
                self.failures.push((law.to_string(), seed));
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RoundtripConfig {
    pub seeds: u64,
    /// Use identity morphisms instead of random ones.
    pub identities_only: bool,
    /// Build tree maps with the deliberately broken schedule.
    pub mutant: bool,
}

impl RoundtripConfig {
    pub fn new(seeds: u64) -> Self {
        RoundtripConfig {
            seeds,
            ..Default::default()
        }
    }

    fn rule(&self) -> ScheduleRule {
        if self.mutant {
            ScheduleRule::MutantDoubledRadius
        } else {
            ScheduleRule::Greedy
        }
    }
}

/// Depth of corpus morphisms. Each pass through tree maps costs up to two
/// levels when `Φ(n) = n + 1`, and the composition laws take two passes.
pub const CORPUS_MORPHISM_DEPTH: usize = 8;

/// Corpus tower for a seed: depth `1..=8`, levels of at most 5 elements.
pub fn corpus_tower(seed: u64) -> Result<Tower, GenError> {
    let bias = [0.0, 0.3, 0.6, 0.9, 1.0][(seed % 5) as usize];
    gen_random_tower(seed, 1 + (seed % 8) as usize, 5, bias)
}

/// Corpus morphism for a seed: levels of at most 5 elements, `Φ(n) - n`
/// alternating between 0 and 1.
pub fn corpus_morphism(seed: u64, identities_only: bool) -> Result<TowerMorphism, GenError> {
    let depth = CORPUS_MORPHISM_DEPTH;
    if identities_only {
        let t = gen_random_tower(seed, depth, 5, 0.5)?;
        return Ok(identity_morphism(Arc::new(t)));
    }
    let target = gen_random_tower(seed.wrapping_mul(7) ^ 0xa11ce, depth, 5, 0.6)?;
    gen_random_morphism_into(seed, Arc::new(target), 5, (seed % 2) as usize)
}

/// A composable pair `(g, f)` with `f: X -> Y` and `g: Y -> Z`.
pub fn corpus_pair(seed: u64) -> Result<(TowerMorphism, TowerMorphism), GenError> {
    let lag = (seed % 2) as usize;
    let z = Arc::new(gen_random_tower(
        seed ^ 0x5eed,
        CORPUS_MORPHISM_DEPTH,
        5,
        0.7,
    )?);
    let g = gen_random_morphism_into(seed.wrapping_mul(3), z, 5, lag)?;
    let f = gen_random_morphism_into(seed.wrapping_mul(5), g.source().clone(), 5, lag)?;
    Ok((g, f))
}

fn induce(m: &TowerMorphism, rule: ScheduleRule) -> Result<InducedMap, MapError> {
    induce_tree_map_with(m, &greedy_schedule(m), rule)
}

/// Running out of levels is inconclusive; any other error is a failure.
fn settle<T>(r: Result<T, MapError>, then: impl FnOnce(T) -> Outcome) -> Outcome {
    match r {
        Ok(x) => then(x),
        Err(MapError::DepthExhausted)
        | Err(MapError::Tower(crate::tower::TowerError::DepthExhausted)) => Outcome::Inconclusive,
        Err(_) => Outcome::Fail,
    }
}

fn equivalence(a: &TowerMorphism, b: &TowerMorphism) -> Outcome {
    match morphisms_equivalent(a, b) {
        Ok(Equivalence::Equivalent(_)) => Outcome::Pass,
        Ok(Equivalence::Inconclusive { .. }) => Outcome::Inconclusive,
        _ => Outcome::Fail,
    }
}

fn homotopy(a: &TreeMap, b: &TreeMap) -> Outcome {
    match homotopy_properness(a, b) {
        Ok(Properness::Witness(_)) => Outcome::Pass,
        _ => Outcome::Fail,
    }
}

/// Every level certified for `m` by its witness has `m(n) <= t_{n+1}`.
pub fn witness_within_schedule(f: &InducedMap) -> bool {
    let table = match properness_witness(&f.map) {
        Properness::Witness(w) => w.table,
        Properness::Failure { partial, .. } => partial,
    };
    table
        .iter()
        .enumerate()
        .all(|(i, &m)| f.schedule.get(i + 1).is_none_or(|&t| m <= t))
}

/// One instance of every law for a seed.
pub fn roundtrip_seed(seed: u64, cfg: &RoundtripConfig, out: &mut RoundtripSummary) {
    let rule = cfg.rule();
    let tower_ok = corpus_tower(seed).is_ok_and(|t| tower_of_tree(&tree_of_tower(&t)) == t);
    out.record("tower_of_tree after tree_of_tower", seed, tower_ok);

    let Ok(m) = corpus_morphism(seed, cfg.identities_only) else {
        out.record("corpus generation", seed, false);
        return;
    };
    let induced = induce(&m, rule);
    out.record(
        "induced map is non-expansive",
        seed,
        settle(induced.clone(), |f| {
            (check_nonexpansive(&f.map) == NonExpansive::Valid).into()
        }),
    );
    out.record(
        "witness within schedule",
        seed,
        settle(induced.clone(), |f| witness_within_schedule(&f).into()),
    );
    let extracted = induced.clone().and_then(|f| extract_morphism(&f.map));
    out.record(
        "extract after induce",
        seed,
        settle(extracted.clone(), |e| equivalence(&e, &m)),
    );
    let again = extracted.and_then(|e| induce(&e, rule));
    out.record(
        "induce after extract",
        seed,
        settle(induced.clone().and_then(|f| Ok((f, again?))), |(f, g)| {
            homotopy(&g.map, &f.map)
        }),
    );
    if m.is_level() {
        // simplicial maps of level morphisms are representable on the nose
        let simp = simplicial_of_level(&m);
        let back = simp
            .clone()
            .and_then(|s| induce(&extract_morphism(&s)?, rule));
        out.record(
            "induce after extract, simplicial",
            seed,
            settle(simp.and_then(|s| Ok((s, back?))), |(s, g)| {
                homotopy(&g.map, &s)
            }),
        );
    }

    let (g, f) = match (cfg.identities_only, corpus_pair(seed)) {
        (true, _) => (m.clone(), m.clone()),
        (false, Ok(pair)) => pair,
        (false, Err(_)) => {
            out.record("corpus generation", seed, false);
            return;
        }
    };
    let induced_g = induce(&g, rule);
    let induced_f = induce(&f, rule);
    let composed = induced_g
        .clone()
        .and_then(|a| Ok(compose_tree_maps(&a.map, &induced_f.clone()?.map)?));
    // induce(g ∘ f) is homotopic to induce(g) ∘ induce(f)
    let induced_gf = compose_morphisms(&g, &f)
        .map_err(MapError::from)
        .and_then(|c| induce(&c, rule));
    out.record(
        "induce preserves composition",
        seed,
        settle(
            induced_gf.and_then(|h| Ok((h, composed.clone()?))),
            |(h, c)| homotopy(&h.map, &c),
        ),
    );
    // extract(a ∘ b) ~ extract(a) ∘ extract(b)
    let parts = induced_g.and_then(|a| {
        let ea = extract_morphism(&a.map)?;
        let eb = extract_morphism(&induced_f?.map)?;
        Ok(compose_morphisms(&ea, &eb)?)
    });
    let whole = composed.and_then(|c| extract_morphism(&c));
    out.record(
        "extract preserves composition",
        seed,
        settle(whole.and_then(|w| Ok((w, parts?))), |(w, p)| {
            equivalence(&w, &p)
        }),
    );
    let id = identity_morphism(m.source().clone());
    out.record(
        "induce of identity",
        seed,
        settle(induce(&id, rule), |i| {
            let identity = TreeMap::identity(i.map.source().clone());
            homotopy(&i.map, &identity)
        }),
    );
}

pub fn run_roundtrip(cfg: &RoundtripConfig) -> RoundtripSummary {
    let mut out = RoundtripSummary {
        seeds: cfg.seeds,
        ..Default::default()
    };
    for seed in 0..cfg.seeds {
        roundtrip_seed(seed, cfg, &mut out);
    }
    out
}

pub fn render_roundtrip(s: &RoundtripSummary) -> String {
    let mut out = String::new();
    for (law, c) in &s.laws {
        let _ = write!(out, "{law}: {} passed, {} failed", c.passed, c.failed);
        if c.inconclusive > 0 {
            let _ = write!(out, ", {} inconclusive", c.inconclusive);
        }
        out.push('\n');
    }
    for (law, seed) in s.failures.iter().take(10) {
        let _ = writeln!(out, "  failed: {law} (seed {seed})");
    }
    let _ = writeln!(
        out,
        "{}",
        if s.all_passed() {
            "all laws hold"
        } else {
            "FAILURES"
        }
    );
    out
}
