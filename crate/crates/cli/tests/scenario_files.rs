use std::path::PathBuf;

use filtration_core::fixtures;
use filtration_core::rational::ratio;
use filtration_lab::generate::{generate, Kind};
use filtration_lab::scenario::{load_scenario, parse_scenario, scenario_text, ScenarioError};

fn s1_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/s1.json")
}

#[test]
fn shipped_s1_loads_as_the_fixture() {
    let sc = load_scenario(&s1_path(), true).unwrap();
    let (space, tau) = fixtures::s1();
    assert_eq!(sc.space.prob(), space.prob());
    assert_eq!(sc.space.atoms(), space.atoms());
    assert_eq!(sc.tau.unwrap().values(), tau.values());
    assert_eq!(sc.space.filtration().levels(), space.filtration().levels());
}

#[test]
fn shipped_s1_is_canonical() {
    let text = std::fs::read_to_string(s1_path()).unwrap();
    assert_eq!(scenario_text(&parse_scenario(&text, true).unwrap()), text);
}

#[test]
fn probabilities_summing_to_nine_eighths_are_rejected() {
    let text = std::fs::read_to_string(s1_path()).unwrap().replacen("\"1/4\"", "\"3/8\"", 1);
    let err = parse_scenario(&text, false).unwrap_err();
    assert!(matches!(err, ScenarioError::Validation { .. }));
    assert_eq!(err.pointer(), Some("/probabilities"));
    assert!(err.to_string().contains(&ratio(9, 8).to_string()));
}

#[test]
fn generated_scenarios_round_trip() {
    let kinds = [Kind::Random, Kind::Honest, Kind::Independent, Kind::Separable, Kind::Optional, Kind::Cox, Kind::Submartingale];
    for i in 0..100u64 {
        let kind = kinds[i as usize % kinds.len()];
        let text = scenario_text(&generate(kind, i));
        let back = parse_scenario(&text, true).unwrap_or_else(|e| panic!("{kind:?} seed {i}: {e}"));
        assert_eq!(scenario_text(&back), text, "{kind:?} seed {i}");
    }
}

#[test]
fn malformed_processes_are_located() {
    let text = scenario_text(&generate(Kind::Random, 1));
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["processes"]["U"]["values"][1][0] = serde_json::json!(0.5);
    let err = parse_scenario(&v.to_string(), true).unwrap_err();
    assert_eq!(err.pointer(), Some("/processes/U/values/1/0"));

    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["processes"]["U"]["kind"] = serde_json::json!("predictable");
    let err = parse_scenario(&v.to_string(), true).unwrap_err();
    assert_eq!(err.pointer(), Some("/processes/U/values"));
}

#[test]
fn filtration_must_refine() {
    let text = std::fs::read_to_string(s1_path()).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["filtration"][1] = serde_json::json!([["a", "c"], ["b", "d"]]);
    v["filtration"][2] = serde_json::json!([["a", "b"], ["c", "d"]]);
    let err = parse_scenario(&v.to_string(), true).unwrap_err();
    assert_eq!(err.pointer(), Some("/filtration/2"));
}
