use std::sync::Arc;

use tower_trees::ends::Distance;
use tower_trees::format::{
    emit_distance_matrix, emit_morphism, emit_solenoid, emit_tower, parse_distance_matrix,
    parse_group_tower, parse_morphism, parse_tower, FormatError, TowerInput,
};
use tower_trees::generators::{
    gen_random_grid_ultrametric, gen_random_morphism, gen_random_rational_ultrametric,
    gen_random_tower,
};
use tower_trees::progroup::limit_threads;
use tower_trees::tower::ScalingTower;

const TOWER_A: &str = r#"{
  "depth": 3,
  "levels": [["a"], ["b1", "b2"], ["c1"]],
  "bonds": [{"b1": "a", "b2": "a"}, {"c1": "b1"}]
}"#;

fn extensional(text: &str) -> tower_trees::tower::Tower {
    match parse_tower(text).unwrap() {
        TowerInput::Extensional(t) => t,
        other => panic!("expected an extensional tower, got {other:?}"),
    }
}

#[test]
fn tower_file_roundtrips() {
    let t = extensional(TOWER_A);
    assert_eq!(t.level_sizes(), vec![1, 2, 1]);
    assert_eq!(extensional(&emit_tower(&t)), t);
    for seed in 0..30 {
        let t = gen_random_tower(seed, 1 + seed as usize % 6, 5, 0.5).unwrap();
        assert_eq!(extensional(&emit_tower(&t)), t, "seed {seed}");
    }
}

#[test]
fn solenoid_file_roundtrips() {
    let s = ScalingTower::new(vec![2, 3], 500, 6).unwrap();
    match parse_tower(&emit_solenoid(&s, 6)).unwrap() {
        TowerInput::Solenoid(back) => assert_eq!(back, s),
        other => panic!("got {other:?}"),
    }
}

#[test]
fn malformed_json_reports_position() {
    let err = parse_tower("{\n  \"depth\": 3,\n  \"levels\": [[\"a\"]\n").unwrap_err();
    let FormatError::Parse { line, .. } = err else {
        panic!("{err:?}")
    };
    assert_eq!(line, 4);
}

#[test]
fn depth_mismatch_is_invalid() {
    let text = TOWER_A.replace("\"depth\": 3", "\"depth\": 2");
    assert!(matches!(parse_tower(&text), Err(FormatError::Invalid(_))));
}

#[test]
fn morphism_file_roundtrips() {
    for seed in 0..20 {
        let m = gen_random_morphism(seed, 5, 4).unwrap();
        let back =
            parse_morphism(&emit_morphism(&m), m.source().clone(), m.target().clone()).unwrap();
        assert_eq!(back, m, "seed {seed}");
    }
}

#[test]
fn morphism_with_bad_component_is_rejected() {
    let t = Arc::new(extensional(TOWER_A));
    let text =
        r#"{"phi": [1, 2, 3], "components": [{"a": "a"}, {"b1": "b1", "b2": "zz"}, {"c1": "c1"}]}"#;
    assert!(parse_morphism(text, t.clone(), t).is_err());
}

#[test]
fn distance_matrices_roundtrip() {
    for seed in 0..20 {
        let u = gen_random_grid_ultrametric(seed, 12, 5).unwrap();
        assert_eq!(parse_distance_matrix(&emit_distance_matrix(&u)).unwrap(), u);
        let u = gen_random_rational_ultrametric(seed, 10).unwrap();
        let back = parse_distance_matrix(&emit_distance_matrix(&u)).unwrap();
        // a single point has no entry that fixes the mode
        if u.len() > 1 {
            assert_eq!(back, u);
        } else {
            assert_eq!(back.points(), u.points());
        }
    }
}

#[test]
fn distance_matrix_entries() {
    let text =
        "# three points\n    x    y    z\nx   0    e-2  e-1\ny   e-2  0    e-1\nz   e-1  e-1  0\n";
    let u = parse_distance_matrix(text).unwrap();
    assert_eq!(u.exponent(0, 1), Some(2));
    assert_eq!(u.distance(1, 2), Distance::Exp(1));
    let mixed = "x y\n0 1/2\ne-1 0\n";
    assert!(parse_distance_matrix(mixed).is_err());
    let bad = "x y\n0 1/2\n1/2 oops\n";
    let Err(FormatError::Parse { line, column, .. }) = parse_distance_matrix(bad) else {
        panic!()
    };
    assert_eq!((line, column), (3, 5));
}

#[test]
fn group_tower_descriptors() {
    let g = parse_group_tower(r#"{"levels": ["cyclic:2", "cyclic:4", "cyclic:8"]}"#).unwrap();
    assert_eq!(limit_threads(&g).len(), 8);
    let w =
        parse_group_tower(r#"{"levels": ["windowZ:16", "windowZ:16:2", "windowZ:16:2"]}"#).unwrap();
    assert_eq!(w.elements(1).len(), 31);
    let table = r#"{"levels": [{"elements": ["e", "s"], "table": [["e", "s"], ["s", "e"]]}, "cyclic:2"],
                   "bonds": [{"0": "e", "1": "s"}]}"#;
    assert_eq!(limit_threads(&parse_group_tower(table).unwrap()).len(), 2);
    assert!(parse_group_tower(r#"{"levels": ["cyclic:3", "cyclic:4"]}"#).is_err());
}
