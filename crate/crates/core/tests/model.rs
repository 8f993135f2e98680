use qbn::model::{parse_document, serialize, validate, LocalRecord, Rule};
use qbn::scalar::ratio;
use qbn::{parse_network, IrrelevancePolicy};

const FIXTURES: [&str; 4] = ["fig1.qbn", "chain.qbn", "collider.qbn", "ternary.qbn"];

fn read(name: &str) -> String {
    std::fs::read_to_string(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn rules(text: &str) -> Vec<Rule> {
    validate(&parse_document(text).unwrap()).into_iter().map(|d| d.rule).collect()
}

fn fig1_with(from: &str, to: &str) -> String {
    let text = read("fig1.qbn");
    assert!(text.contains(from), "{from}");
    text.replacen(from, to, 1)
}

#[test]
fn fixtures_round_trip() {
    for name in FIXTURES {
        let m = parse_network(&read(name)).unwrap();
        let text = serialize(&m);
        let again = parse_network(&text).unwrap();
        assert_eq!(m, again, "{name}");
        assert_eq!(text, serialize(&again), "{name}");
    }
}

#[test]
fn fractions_survive_serialization() {
    let m = parse_network(&read("collider.qbn")).unwrap();
    let text = serialize(&m);
    assert!(text.contains("\"1/3\""));
    let z = m.node("Z").unwrap();
    let thirds = (0..m.parent_config_count(z))
        .any(|k| matches!(m.record(z, k), LocalRecord::Point(p) if p.contains(&ratio(1, 3))));
    assert!(thirds);
}

#[test]
fn decimals_are_exact() {
    let m = parse_network(&read("fig1.qbn")).unwrap();
    let l = m.node("L").unwrap();
    assert_eq!(m.record(l, 1), &LocalRecord::Point(vec![ratio(1, 20), ratio(19, 20)]));
}

#[test]
fn syntax_errors_carry_a_position() {
    let err = parse_document("{\"variables\": [").unwrap_err();
    assert_eq!(err.kind(), "SyntaxError");
    assert!(err.to_string().contains("line 1"));

    let err = parse_document(r#"{"variables": [{"name": 3, "values": []}]}"#).unwrap_err();
    assert!(err.to_string().contains("/variables/0/name"), "{err}");

    let err = parse_document(r#"{"variables": [], "extra": 1}"#).unwrap_err();
    assert!(err.to_string().contains("/extra"), "{err}");
}

#[test]
fn clean_fixtures_have_no_diagnostics() {
    for name in FIXTURES {
        assert!(rules(&read(name)).is_empty(), "{name}");
    }
}

#[test]
fn normalization() {
    let text = fig1_with("\"F=f,B=b\": [0.8, 0.2]", "\"F=f,B=b\": [0.8, 0.3]");
    assert_eq!(rules(&text), vec![Rule::Normalization]);
    let err = parse_network(&text).unwrap_err();
    assert_eq!(err.kind(), "ValidationError");
    assert!(err.to_string().contains("F=f,B=b"), "{err}");
}

#[test]
fn negative_entry() {
    let text = fig1_with("[0.6, 0.4]", "[1.4, -0.4]");
    assert!(rules(&text).contains(&Rule::Negative));
}

#[test]
fn missing_row() {
    let text = fig1_with("\"F=f,B=bc\": [0.1, 0.9],", "");
    let diags = validate(&parse_document(&text).unwrap());
    assert_eq!(diags.len(), 1);
    assert_eq!(diags[0].rule, Rule::Coverage);
    assert_eq!(diags[0].node.as_deref(), Some("D"));
}

#[test]
fn empty_interval_set() {
    let text = fig1_with(
        "{\"lower\": [0.4, 0.5], \"upper\": [0.5, 0.6]}",
        "{\"lower\": [0.6, 0.6], \"upper\": [0.7, 0.7]}",
    );
    let r = rules(&text);
    assert!(r.contains(&Rule::EmptyCredalSet) || r.contains(&Rule::IntervalBounds), "{r:?}");
}

#[test]
fn wrong_length() {
    let text = fig1_with("[0.6, 0.4]", "[0.6, 0.3, 0.1]");
    assert!(rules(&text).contains(&Rule::Length));
}

#[test]
fn cycles_are_reported() {
    let text = fig1_with("[\"D\", \"H\"]", "[\"D\", \"H\"], [\"H\", \"F\"]");
    let diags = validate(&parse_document(&text).unwrap());
    assert_eq!(diags[0].rule, Rule::Cycle);
    assert!(diags[0].cycle.len() >= 3);
    assert_eq!(parse_network(&text).unwrap_err().kind(), "CycleDetected");
}

#[test]
fn explicit_declarations() {
    let ok = fig1_with(
        "\"irrelevance\": \"nondescendants\"",
        "\"irrelevance\": [{\"target\": \"D\", \"irrelevant\": [\"L\"]}]",
    );
    let m = parse_network(&ok).unwrap();
    assert_eq!(m.policy().name(), "explicit");
    assert_eq!(parse_network(&serialize(&m)).unwrap(), m);

    let parent = fig1_with(
        "\"irrelevance\": \"nondescendants\"",
        "\"irrelevance\": [{\"target\": \"D\", \"irrelevant\": [\"F\"]}]",
    );
    assert_eq!(rules(&parent), vec![Rule::Irrelevance]);
}

#[test]
fn policy_override() {
    let m = parse_network(&read("fig1.qbn")).unwrap();
    assert_eq!(m.policy(), &IrrelevancePolicy::Nondescendants);
    let none = m.with_policy(IrrelevancePolicy::None).unwrap();
    assert_eq!(none.policy(), &IrrelevancePolicy::None);
    assert_eq!(none.dag(), m.dag());
}

#[test]
fn local_vertices() {
    let m = parse_network(&read("fig1.qbn")).unwrap();
    assert_eq!(m.local_vertices(m.node("F").unwrap(), 0).unwrap().len(), 2);
    assert_eq!(m.local_vertices(m.node("D").unwrap(), 3).unwrap().len(), 1);

    let t = parse_network(&read("ternary.qbn")).unwrap();
    // p(sun) >= 0.3, p(rain) <= 0.3, p(sun) >= p(cloud)
    let w = t.local_vertices(t.node("W").unwrap(), 0).unwrap();
    assert_eq!(w.len(), 4);
    for p in &w.points {
        assert!(p[0] >= ratio(3, 10) && p[2] <= ratio(3, 10) && p[0] >= p[1]);
    }
}
