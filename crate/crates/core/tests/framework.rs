use std::collections::BTreeSet;

use formadp::dp::{ChainKind, Minimality};
use formadp::framework::{flags_respected, prove, replay, FrameworkError, Outcome, ProveConfig, Strategy, Verdict};
use formadp::parser::{emit_proof, parse, ProofFormat};
use formadp::rewriting::{Mtrs, RuleId};

fn fixture(name: &str) -> Mtrs {
    let text = std::fs::read_to_string(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap();
    parse(&text).unwrap().mtrs
}

fn with(strategy: Strategy) -> ProveConfig {
    ProveConfig {
        strategy,
        ..ProveConfig::default()
    }
}

#[test]
fn running_example_under_every_strategy() {
    let m = fixture("running.trs");
    for s in [
        Strategy::Default,
        Strategy::UsableOnly,
        Strategy::Formative,
        Strategy::SplitFormative,
        Strategy::Aprove,
    ] {
        let proof = prove(&m, &with(s)).unwrap();
        assert_eq!(proof.verdict, Verdict::Yes, "{s}");
        assert!(replay(&proof.root) && flags_respected(&proof.root), "{s}");
    }
}

#[test]
fn formative_start_is_recorded() {
    let m = fixture("running.trs");
    let proof = prove(&m, &ProveConfig::default()).unwrap();
    assert!(proof.start.formative);
    assert_eq!(proof.start.removed, BTreeSet::from([RuleId(4), RuleId(9)]));
    assert_eq!(proof.root.problem.chains, ChainKind::Formative);
    let off = prove(
        &m,
        &ProveConfig {
            formative_start: Some(false),
            ..ProveConfig::default()
        },
    )
    .unwrap();
    assert!(!off.start.formative && off.start.removed.is_empty());
    assert_eq!(off.verdict, Verdict::Yes);
}

#[test]
fn first_step_is_the_dependency_graph() {
    let proof = prove(&fixture("running.trs"), &ProveConfig::default()).unwrap();
    let Outcome::Graph { children } = &proof.root.outcome else {
        panic!("root is {}", proof.root.outcome.kind());
    };
    assert_eq!(children.len(), 4);
    assert!(children.iter().all(|c| c.problem.minimality == Minimality::Minimal));
}

#[test]
fn innermost_problems() {
    let m = fixture("innermost.trs");
    let config = ProveConfig {
        innermost: true,
        ..ProveConfig::default()
    };
    let proof = prove(&m, &config).unwrap();
    assert_eq!(proof.verdict, Verdict::Yes);
    assert!(!proof.start.formative);
    assert_eq!(proof.root.problem.chains, ChainKind::Innermost);
    let err = prove(
        &m,
        &ProveConfig {
            formative_start: Some(true),
            ..config
        },
    )
    .unwrap_err();
    assert!(matches!(err, FrameworkError::Dp(_)));
}

#[test]
fn small_fixtures() {
    assert_eq!(
        prove(&fixture("selfloop.trs"), &ProveConfig::default())
            .unwrap()
            .verdict,
        Verdict::Maybe
    );
    assert_eq!(
        prove(&fixture("constructors.trs"), &ProveConfig::default())
            .unwrap()
            .verdict,
        Verdict::Yes
    );
    assert_eq!(
        prove(&fixture("collapse.trs"), &ProveConfig::default())
            .unwrap()
            .verdict,
        Verdict::Yes
    );
}

#[test]
fn open_problems_explain_themselves() {
    let proof = prove(&fixture("selfloop.trs"), &ProveConfig::default()).unwrap();
    let open = proof.open_problems();
    assert_eq!(open.len(), 1);
    assert_eq!(open[0].pairs.len(), 1);
    let text = emit_proof(&proof, ProofFormat::Text);
    assert!(text.contains("open"), "{text}");
}

#[test]
fn json_proof_is_well_formed() {
    let proof = prove(&fixture("running.trs"), &ProveConfig::default()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&emit_proof(&proof, ProofFormat::Json)).unwrap();
    assert_eq!(v["verdict"], "YES");
    assert_eq!(v["start"]["tag"], "formative-start");
    let mut stack = vec![&v["root"]];
    let mut pairs_steps = 0;
    while let Some(n) = stack.pop() {
        if n["kind"] == "reduction-pair" {
            pairs_steps += 1;
            assert!(n["tag"].as_str().unwrap().starts_with("reduction-pair/"));
            assert!(n["interpretation"].is_object());
        }
        if let Some(cs) = n["children"].as_array() {
            stack.extend(cs);
        }
    }
    assert!(pairs_steps >= 4);
}

#[test]
fn strategies_parse_from_names() {
    for s in ["default", "usable-only", "formative", "split-formative", "aprove"] {
        assert_eq!(s.parse::<Strategy>().unwrap().to_string(), s);
    }
    assert!("fastest".parse::<Strategy>().is_err());
}
