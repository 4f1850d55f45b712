//! Text formats: towers, morphisms and group towers as JSON, distance
//! matrices as whitespace-separated tables.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::ends::{Distance, Distances, UltrametricSpace};
use crate::exact::{fmt_rational, parse_rational, Rational};
use crate::progroup::{FiniteGroup, GroupHom, GroupLevel, GroupTower};
use crate::tower::{ScalingTower, Tower, TowerMorphism};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl FormatError {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        FormatError::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        FormatError::at(e.line(), e.column(), message)
    }
}

fn invalid(e: impl std::fmt::Display) -> FormatError {
    FormatError::Invalid(e.to_string())
}

/// A tower as read from a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TowerInput {
    Extensional(Tower),
    Solenoid(ScalingTower),
}

impl TowerInput {
    /// The tower of sets; generator towers are windowed first.
    pub fn materialize(&self) -> Tower {
        match self {
            TowerInput::Extensional(t) => t.clone(),
            TowerInput::Solenoid(s) => s.window(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TowerFile {
    depth: usize,
    levels: Vec<Vec<String>>,
    bonds: Vec<BTreeMap<String, String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorFile {
    generator: String,
    primes: Vec<i64>,
    window: i64,
    depth: usize,
}

pub fn parse_tower(text: &str) -> Result<TowerInput, FormatError> {
    let value: Value = serde_json::from_str(text)?;
    if value.get("generator").is_some() {
        let g: GeneratorFile = serde_json::from_str(text)?;
        if g.generator != "solenoid" {
            return Err(invalid(format!("unknown generator {:?}", g.generator)));
        }
        return ScalingTower::new(g.primes, g.window, g.depth)
            .map(TowerInput::Solenoid)
            .map_err(invalid);
    }
    let f: TowerFile = serde_json::from_str(text)?;
    if f.depth != f.levels.len() {
        return Err(invalid(format!(
            "depth {} but {} levels",
            f.depth,
            f.levels.len()
        )));
    }
    Tower::new(f.levels, f.bonds)
        .map(TowerInput::Extensional)
        .map_err(invalid)
}

pub fn emit_tower(t: &Tower) -> String {
    let f = TowerFile {
        depth: t.depth(),
        levels: t.levels().iter().map(|l| l.ids().to_vec()).collect(),
        bonds: (1..t.depth()).map(|n| t.bond_table(n)).collect(),
    };
    serde_json::to_string_pretty(&f).expect("serializable")
}

pub fn emit_solenoid(s: &ScalingTower, depth: usize) -> String {
    let f = GeneratorFile {
        generator: "solenoid".into(),
        primes: s.factors().to_vec(),
        window: s.bound(),
        depth,
    };
    serde_json::to_string_pretty(&f).expect("serializable")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MorphismFile {
    #[serde(rename = "phi")]
    index: Vec<usize>,
    components: Vec<BTreeMap<String, String>>,
}

pub fn parse_morphism(
    text: &str,
    source: Arc<Tower>,
    target: Arc<Tower>,
) -> Result<TowerMorphism, FormatError> {
    let f: MorphismFile = serde_json::from_str(text)?;
    TowerMorphism::from_tables(source, target, f.index, &f.components).map_err(invalid)
}

pub fn emit_morphism(m: &TowerMorphism) -> String {
    let f = MorphismFile {
        index: m.index_function().to_vec(),
        components: (1..=m.defined_upto())
            .map(|n| m.component_table(n))
            .collect(),
    };
    serde_json::to_string_pretty(&f).expect("serializable")
}

/// Square table: a header row of ids, then one row per point (optionally led
/// by its id). Entries are `0`, exact rationals `p/q`, or exponents `e-k`.
pub fn parse_distance_matrix(text: &str) -> Result<UltrametricSpace, FormatError> {
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (_, header) = rows
        .next()
        .ok_or_else(|| FormatError::at(1, 1, "empty matrix"))?;
    let ids: Vec<String> = header.split_whitespace().map(str::to_string).collect();
    let n = ids.len();
    let mut grid: Vec<Vec<Option<u32>>> = Vec::with_capacity(n);
    let mut rational: Vec<Vec<Option<Rational>>> = Vec::with_capacity(n);
    let mut last_line = 1;
    for (line, row) in rows {
        last_line = line;
        let i = grid.len();
        if i == n {
            return Err(FormatError::at(line, 1, format!("more than {n} rows")));
        }
        let mut tokens: Vec<(usize, &str)> = tokens_with_columns(row);
        if tokens.len() == n + 1 {
            let (col, lead) = tokens.remove(0);
            if lead != ids[i] {
                return Err(FormatError::at(
                    line,
                    col,
                    format!("row {lead} should be {}", ids[i]),
                ));
            }
        }
        if tokens.len() != n {
            return Err(FormatError::at(
                line,
                1,
                format!("expected {n} entries, got {}", tokens.len()),
            ));
        }
        let (mut g, mut r) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for (col, tok) in tokens {
            if let Some(k) = tok.strip_prefix("e-") {
                let k: u32 = k
                    .parse()
                    .map_err(|_| FormatError::at(line, col, format!("bad exponent {tok:?}")))?;
                g.push(Some(k));
                r.push(None);
            } else {
                let q = parse_rational(tok)
                    .ok_or_else(|| FormatError::at(line, col, format!("bad entry {tok:?}")))?;
                g.push(if q == Rational::from_integer(0) {
                    Some(0)
                } else {
                    None
                });
                r.push(Some(q));
            }
        }
        grid.push(g);
        rational.push(r);
    }
    if grid.len() != n {
        return Err(FormatError::at(
            last_line + 1,
            1,
            format!("expected {n} rows, got {}", grid.len()),
        ));
    }
    // Grid mode when every off-diagonal entry is an exponent.
    let off = |i: usize, j: usize| i != j;
    let all_grid = (0..n).all(|i| (0..n).all(|j| !off(i, j) || rational[i][j].is_none()));
    let all_rational = (0..n).all(|i| (0..n).all(|j| !off(i, j) || rational[i][j].is_some()));
    let dist = if all_grid {
        Distances::Grid(
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if off(i, j) { grid[i][j].unwrap() } else { 0 })
                        .collect()
                })
                .collect(),
        )
    } else if all_rational {
        Distances::Rational(
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| rational[i][j].unwrap_or_else(|| Rational::from_integer(0)))
                        .collect()
                })
                .collect(),
        )
    } else {
        return Err(invalid("mixing e-k and rational entries"));
    };
    UltrametricSpace::new(ids, dist).map_err(invalid)
}

fn tokens_with_columns(row: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in row.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &row[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &row[s..]));
    }
    out
}

pub fn emit_distance_matrix(u: &UltrametricSpace) -> String {
    let mut out = u.points().join(" ");
    out.push('\n');
    for i in 0..u.len() {
        let row: Vec<String> = (0..u.len())
            .map(|j| match u.distance(i, j) {
                Distance::Zero => "0".to_string(),
                Distance::Exp(k) => format!("e-{k}"),
                Distance::Rational(r) => fmt_rational(&r),
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum LevelSpec {
    Descriptor(String),
    Table {
        elements: Vec<String>,
        table: Vec<Vec<String>>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum BondSpec {
    Descriptor(String),
    Map(BTreeMap<String, String>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupTowerFile {
    levels: Vec<LevelSpec>,
    #[serde(default)]
    bonds: Option<Vec<BondSpec>>,
}

/// Levels are `"cyclic:m"`, `"windowZ:B"`, `"windowZ:B:k"` (k is the factor
/// of the bond into the previous level) or `{elements, table}`. Bonds are
/// `"reduce"`, `"scale:c"` or a map of element names; they may be omitted
/// when every level determines its bond.
pub fn parse_group_tower(text: &str) -> Result<GroupTower, FormatError> {
    let f: GroupTowerFile = serde_json::from_str(text)?;
    let mut levels = Vec::with_capacity(f.levels.len());
    let mut factors = Vec::with_capacity(f.levels.len());
    for (i, desc) in f.levels.iter().enumerate() {
        let (level, k) = parse_level(desc).map_err(|e| invalid(format!("level {}: {e}", i + 1)))?;
        levels.push(level);
        factors.push(k);
    }
    let descs: Vec<BondSpec> = match f.bonds {
        Some(b) => b,
        None => (1..levels.len())
            .map(|n| match (&levels[n], factors[n]) {
                (GroupLevel::WindowedZ { .. }, k) => {
                    BondSpec::Descriptor(format!("scale:{}", k.unwrap_or(1)))
                }
                _ => BondSpec::Descriptor("reduce".into()),
            })
            .collect(),
    };
    if descs.len() + 1 != levels.len() {
        return Err(invalid(format!(
            "{} levels need {} bonds",
            levels.len(),
            levels.len() - 1
        )));
    }
    let bonds = descs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            parse_bond(s, &levels[i], &levels[i + 1])
                .map_err(|e| invalid(format!("bond {}: {e}", i + 1)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    GroupTower::new(levels, bonds).map_err(invalid)
}

fn parse_level(desc: &LevelSpec) -> Result<(GroupLevel, Option<i64>), String> {
    match desc {
        LevelSpec::Descriptor(s) => {
            let parts: Vec<&str> = s.split(':').collect();
            let num = |p: &str| {
                p.parse::<i64>()
                    .map_err(|_| format!("bad number {p:?} in {s:?}"))
            };
            match parts.as_slice() {
                ["cyclic", m] => {
                    let m = num(m)?;
                    if !(1..=64).contains(&m) {
                        return Err(format!("cyclic order {m} outside 1..=64"));
                    }
                    Ok((GroupLevel::Table(FiniteGroup::cyclic(m as usize)), None))
                }
                ["windowZ", b] => Ok((GroupLevel::WindowedZ { bound: num(b)? }, None)),
                ["windowZ", b, k] => Ok((GroupLevel::WindowedZ { bound: num(b)? }, Some(num(k)?))),
                _ => Err(format!("unknown level descriptor {s:?}")),
            }
        }
        LevelSpec::Table { elements, table } => {
            let pos: BTreeMap<&str, usize> = elements
                .iter()
                .enumerate()
                .map(|(i, e)| (e.as_str(), i))
                .collect();
            let rows = table
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|x| {
                            pos.get(x.as_str())
                                .copied()
                                .ok_or_else(|| format!("unknown element {x:?}"))
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let g = FiniteGroup::new(elements.clone(), rows).map_err(|e| e.to_string())?;
            Ok((GroupLevel::Table(g), None))
        }
    }
}

fn element_code(level: &GroupLevel, name: &str) -> Result<i64, String> {
    match level {
        GroupLevel::Table(g) => g
            .names()
            .iter()
            .position(|x| x == name)
            .map(|i| i as i64)
            .ok_or_else(|| format!("unknown element {name:?}")),
        GroupLevel::WindowedZ { .. } => name.parse().map_err(|_| format!("bad integer {name:?}")),
    }
}

fn parse_bond(desc: &BondSpec, lower: &GroupLevel, upper: &GroupLevel) -> Result<GroupHom, String> {
    match desc {
        BondSpec::Descriptor(s) if s == "reduce" => match (lower, upper) {
            (GroupLevel::Table(lo), GroupLevel::Table(up)) => {
                let m = lo.order() as i64;
                up.names()
                    .iter()
                    .map(|x| {
                        x.parse::<i64>()
                            .map(|v| v.rem_euclid(m))
                            .map_err(|_| format!("reduce needs integer names, got {x:?}"))
                    })
                    .collect::<Result<Vec<_>, _>>()
                    .map(GroupHom::Table)
            }
            _ => Err("reduce needs two table levels".into()),
        },
        BondSpec::Descriptor(s) => match s.strip_prefix("scale:").map(str::parse::<i64>) {
            Some(Ok(c)) => Ok(GroupHom::Scale(c)),
            _ => Err(format!("unknown bond descriptor {s:?}")),
        },
        BondSpec::Map(map) => match upper {
            GroupLevel::Table(up) => up
                .names()
                .iter()
                .map(|x| {
                    let y = map.get(x).ok_or_else(|| format!("no image for {x:?}"))?;
                    element_code(lower, y)
                })
                .collect::<Result<Vec<_>, _>>()
                .map(GroupHom::Table),
            GroupLevel::WindowedZ { .. } => {
                Err("maps out of windowZ levels must be scale:c".into())
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::tower::fixtures::tower_a;
    use crate::tower::InverseSequence;

    const TOWER_A: &str = r#"{
  "depth": 3,
  "levels": [["a"], ["b1", "b2"], ["c1"]],
  "bonds": [{"b1": "a", "b2": "a"}, {"c1": "b1"}]
}"#;

    #[test]
    fn tower_roundtrip() {
        let t = parse_tower(TOWER_A).unwrap().materialize();
        assert_eq!(t, tower_a());
        assert_eq!(parse_tower(&emit_tower(&t)).unwrap().materialize(), t);
    }

    #[test]
    fn solenoid_file() {
        let s = r#"{"generator": "solenoid", "primes": [2], "window": 1024, "depth": 11}"#;
        let TowerInput::Solenoid(g) = parse_tower(s).unwrap() else {
            panic!()
        };
        assert_eq!(g.depth(), 11);
        assert_eq!(
            parse_tower(&emit_solenoid(&g, 11)).unwrap(),
            TowerInput::Solenoid(g)
        );
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_tower("{\n  \"depth\": 1,\n  \"levels\": [[\"a\"]\n}").unwrap_err();
        assert!(matches!(e, FormatError::Parse { line: 4, .. }), "{e:?}");
        let e = parse_tower(r#"{"depth": 1, "levels": [[]], "bonds": []}"#).unwrap_err();
        assert!(matches!(e, FormatError::Invalid(_)));
        let e = parse_tower(r#"{"depth": 2, "levels": [["a"]], "bonds": []}"#).unwrap_err();
        assert!(matches!(e, FormatError::Invalid(_)));
    }

    #[test]
    fn morphism_roundtrip() {
        let t = Arc::new(tower_a());
        let m = crate::tower::identity_morphism(t.clone());
        let back = parse_morphism(&emit_morphism(&m), t.clone(), t).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn distance_matrices() {
        let text = "x y z\n0 e-1 e-1\ne-1 0 e-3\ne-1 e-3 0\n";
        let u = parse_distance_matrix(text).unwrap();
        assert!(u.is_grid());
        assert_eq!(u.exponent(1, 2), Some(3));
        assert_eq!(parse_distance_matrix(&emit_distance_matrix(&u)).unwrap(), u);

        let text = "# labelled rows\na b\na 0 3/10\nb 3/10 0\n";
        let u = parse_distance_matrix(text).unwrap();
        assert_eq!(u.distance(0, 1), Distance::Rational(rat(3, 10)));
        assert_eq!(parse_distance_matrix(&emit_distance_matrix(&u)).unwrap(), u);
    }

    #[test]
    fn distance_matrix_errors() {
        let e = parse_distance_matrix("a b\n0 x/\n").unwrap_err();
        assert_eq!(e, FormatError::at(2, 3, "bad entry \"x/\""));
        assert!(matches!(
            parse_distance_matrix("a b\n0 e-1\n"),
            Err(FormatError::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_distance_matrix("a b\n0 e-1\n1/2 0\n"),
            Err(FormatError::Invalid(_))
        ));
    }

    #[test]
    fn group_towers() {
        let g = parse_group_tower(r#"{"levels": ["cyclic:2", "cyclic:4", "cyclic:8"]}"#).unwrap();
        assert_eq!(crate::progroup::limit_threads(&g).len(), 8);
        let g = parse_group_tower(
            r#"{"levels": ["windowZ:1024", "windowZ:1024:2", "windowZ:1024:2"]}"#,
        )
        .unwrap();
        assert_eq!(g.bond(1), &GroupHom::Scale(2));
        assert_eq!(g.elements(3).len(), 511);
        let klein = r#"{
  "levels": [
    "cyclic:2",
    {"elements": ["e", "a", "b", "c"],
     "table": [["e","a","b","c"],["a","e","c","b"],["b","c","e","a"],["c","b","a","e"]]}
  ],
  "bonds": [{"e": "0", "a": "1", "b": "1", "c": "0"}]
}"#;
        let g = parse_group_tower(klein).unwrap();
        assert_eq!(g.bond(1), &GroupHom::Table(vec![0, 1, 1, 0]));
        assert!(parse_group_tower(r#"{"levels": ["cyclic:3", "cyclic:4"]}"#).is_err());
    }
}
