use std::fs;
use std::path::PathBuf;

use groupoidal::document::{CocycleSpec, GroupoidSpec};
use groupoidal::{parse_model, Regime};
use proptest::prelude::*;
use serde_json::json;

fn corpus() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models");
    let mut files: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
}

fn errors_at(doc: serde_json::Value) -> Vec<String> {
    parse_model(doc.to_string().as_bytes()).unwrap_err().into_iter().map(|e| e.path).collect()
}

#[test]
fn corpus_is_canonical() {
    let files = corpus();
    assert_eq!(files.len(), 7);
    for f in files {
        let bytes = fs::read(&f).unwrap();
        let doc = parse_model(&bytes).unwrap_or_else(|e| panic!("{}: {e:?}", f.display()));
        assert_eq!(doc.canonical().as_bytes(), &bytes[..], "{}", f.display());
    }
}

#[test]
fn minimal_document_is_the_integers() {
    let doc = parse_model(br#"{"groupoid":{"kind":"transformation","size":1,"act":[0]}}"#).unwrap();
    assert_eq!(doc.groupoid, GroupoidSpec::Transformation { act: vec![0] });
    assert_eq!(doc.cocycle_or_default(), CocycleSpec::Degree);
    assert_eq!(
        doc.canonical(),
        "{\"groupoid\":{\"act\":[0],\"kind\":\"transformation\",\"size\":1},\"version\":1}\n"
    );
}

#[test]
fn schema_error_paths() {
    let base = |g: serde_json::Value| json!({ "groupoid": g });
    assert_eq!(errors_at(base(json!({"kind": "transformation", "size": 2, "act": [1, 1]}))), ["groupoid.act"]);
    assert_eq!(errors_at(base(json!({"kind": "transformation", "size": 2, "act": [0, 2]}))), ["groupoid.act[1]"]);
    assert_eq!(errors_at(base(json!({"kind": "torus"}))), ["groupoid.kind"]);
    assert_eq!(errors_at(base(json!({"kind": "pair"}))), ["groupoid.size"]);
    assert_eq!(errors_at(json!({})), ["groupoid"]);
    assert_eq!(
        errors_at(json!({"groupoid": {"kind": "pair", "size": 2}, "cocycle": {"kind": "degree"}})),
        ["cocycle.kind"]
    );
    assert_eq!(
        errors_at(json!({"groupoid": {"kind": "pair", "size": 2}, "cocycle": {"kind": "log_modular"}})),
        ["cocycle.kind"]
    );
    assert_eq!(
        errors_at(json!({"groupoid": {"kind": "pair", "size": 2}, "measure": {"weights": [[1, 1], [0, 1]]}})),
        ["measure.weights[1]"]
    );
    assert_eq!(
        errors_at(json!({"groupoid": {"kind": "pair", "size": 2}, "unitary": {"size": 1, "entries": ["u"]}})),
        ["unitary.entries[0]"]
    );
    assert_eq!(
        errors_at(json!({"groupoid": {"kind": "pair", "size": 2}, "elements": {"f": [[4, [1, 1], [0, 1]]]}})),
        ["elements.f[0][0]"]
    );
    assert_eq!(
        errors_at(json!({"groupoid": {"kind": "transformation", "size": 1, "act": [0]}, "elements": {"f": [[[0, 1], [1, 0], [0, 1]]]}})),
        ["elements.f[0][1][1]"]
    );
}

#[test]
fn explicit_cocycle_must_cover_the_table() {
    let doc = json!({
        "groupoid": {"kind": "cyclic", "order": 2},
        "cocycle": {"kind": "explicit", "table": [[0, [0, 1]]]}
    });
    assert_eq!(errors_at(doc), ["cocycle.table"]);
    let doc = json!({
        "groupoid": {"kind": "cyclic", "order": 2},
        "cocycle": {"kind": "explicit", "table": [[1, 0.0], [0, 0.0]]}
    });
    let parsed = parse_model(doc.to_string().as_bytes()).unwrap();
    assert_eq!(parsed.regime, Regime::Float);
}

#[test]
fn deaconu_triples_validated_at_parse_time() {
    let doc = |m: serde_json::Value| {
        json!({
            "groupoid": {"kind": "deaconu", "size": 4, "sigma": [1, 2, 0, 0]},
            "elements": {"f": [[m, [1, 1], [0, 1]]]}
        })
    };
    assert!(parse_model(doc(json!([2, 0, 3])).to_string().as_bytes()).is_ok());
    assert!(parse_model(doc(json!([0, 1, 1])).to_string().as_bytes()).is_ok());
    assert_eq!(errors_at(doc(json!([0, 0, 1]))), ["elements.f[0][0]"]);
    assert_eq!(errors_at(doc(json!([0, 1]))), ["elements.f[0][0]"]);
}

#[test]
fn explicit_groupoid_round_trip() {
    let doc = json!({
        "groupoid": {
            "kind": "explicit",
            "units": [0],
            "range": [0, 0],
            "source": [0, 0],
            "inverse": [0, 1],
            "product": [[0, 1], [1, 0]]
        },
        "suites": ["axioms"]
    });
    let parsed = parse_model(doc.to_string().as_bytes()).unwrap();
    let again = parse_model(parsed.canonical().as_bytes()).unwrap();
    assert_eq!(parsed.canonical(), again.canonical());
    assert!(parsed.canonical().contains("\"product\":[[0,1],[1,0]]"));
}

fn scalar(exact: bool) -> BoxedStrategy<serde_json::Value> {
    if exact {
        (-50i64..50, prop_oneof![-9i64..-1, 1i64..9]).prop_map(|(a, b)| json!([a, b])).boxed()
    } else {
        (-1e6f64..1e6).prop_map(|x| json!(x)).boxed()
    }
}

proptest! {
    #[test]
    fn canonical_form_is_a_fixed_point(
        perm in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle(),
        exact in any::<bool>(),
        seed_terms in proptest::collection::vec((0usize..5, -4i64..5), 0..6),
        weights in proptest::collection::vec(1i64..20, 5),
    ) {
        let terms: Vec<_> = seed_terms.iter().map(|&(x, n)| {
            let (re, im) = if exact { (json!([n, 3]), json!([1, 2])) } else { (json!(n as f64 / 3.0), json!(0.5)) };
            json!([[x, n], re, im])
        }).collect();
        let weights: Vec<_> = weights.iter().map(|&w| if exact { json!([w, 7]) } else { json!(w as f64 / 7.0) }).collect();
        let doc = json!({
            "groupoid": {"kind": "transformation", "size": 5, "act": perm},
            "measure": {"weights": weights},
            "elements": {"f": terms, "g": []},
            "window": 5
        });
        let first = parse_model(doc.to_string().as_bytes()).unwrap();
        let canonical = first.canonical();
        let second = parse_model(canonical.as_bytes()).unwrap();
        prop_assert_eq!(&second.canonical(), &canonical);
        prop_assert_eq!(second.regime, if exact { Regime::Exact } else { Regime::Float });
    }

    #[test]
    fn scalars_round_trip(vals in prop_oneof![
        proptest::collection::vec(scalar(true), 3),
        proptest::collection::vec(scalar(false), 3),
    ]) {
        let doc = json!({
            "groupoid": {"kind": "pair", "size": 3},
            "cocycle": {"kind": "potential", "values": vals}
        });
        let first = parse_model(doc.to_string().as_bytes()).unwrap();
        let second = parse_model(first.canonical().as_bytes()).unwrap();
        prop_assert_eq!(first.canonical(), second.canonical());
    }
}
