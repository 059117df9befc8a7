use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::dp::DpProblem;
use crate::framework::{Outcome, Proof, ProofNode};
use crate::rewriting::{Rule, RuleId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ProofFormat {
    #[default]
    Text,
    Json,
}

/// Renders a proof (without the verdict line for text).
pub fn emit_proof(proof: &Proof, format: ProofFormat) -> String {
    match format {
        ProofFormat::Text => text(proof),
        ProofFormat::Json => serde_json::to_string_pretty(&proof_json(proof)).expect("json values serialize"),
    }
}

fn id_list(ids: impl IntoIterator<Item = RuleId>) -> Vec<u32> {
    ids.into_iter().map(|i| i.0).collect()
}

fn problem_json(p: &DpProblem) -> Value {
    json!({
        "pairs": id_list(p.pair_ids()),
        "rules": id_list(p.rule_ids()),
        "minimality": p.minimality,
        "chains": p.chains,
    })
}

fn rule_json(r: &Rule) -> Value {
    json!({ "id": r.id, "rule": r.to_string() })
}

pub fn proof_json(proof: &Proof) -> Value {
    json!({
        "verdict": proof.verdict.to_string(),
        "start": {
            "kind": if proof.start.formative { "formative-trim" } else { "dependency-pairs" },
            "tag": proof.start.tag(),
            "removed": id_list(proof.start.removed.iter().copied()),
            "pairs": proof.root.problem.pairs.iter().map(rule_json).collect::<Vec<_>>(),
        },
        "root": node_json(&proof.root),
    })
}

pub fn node_json(node: &ProofNode) -> Value {
    let o = &node.outcome;
    if let Outcome::Qed = o {
        return json!({ "kind": "qed" });
    }
    let mut v = json!({
        "kind": o.kind(),
        "tag": o.tag(),
        "problem": problem_json(&node.problem),
    });
    let m = v.as_object_mut().expect("object");
    match o {
        Outcome::Qed => unreachable!(),
        Outcome::Open { reason } => {
            m.insert("reason".into(), json!(reason));
        }
        Outcome::Graph { children } => {
            let comps: Vec<Vec<u32>> = children.iter().map(|c| id_list(c.problem.pair_ids())).collect();
            let kept: BTreeSet<RuleId> = children.iter().flat_map(|c| c.problem.pair_ids()).collect();
            m.insert("components".into(), json!(comps));
            m.insert(
                "dropped".into(),
                json!(id_list(node.problem.pair_ids().difference(&kept).copied())),
            );
        }
        Outcome::Trim { removed, flags, .. } => {
            m.insert("removed".into(), json!(id_list(removed.iter().copied())));
            m.insert("flags".into(), json!(flags));
        }
        Outcome::ReductionPair { step, .. } => {
            let model = &step.model;
            m.insert("selection".into(), json!(step.selection));
            m.insert("filtering".into(), json!(model.filtering));
            m.insert("interpretation".into(), json!(model.interpretation));
            m.insert("strict".into(), json!(id_list(model.strict.iter().copied())));
            m.insert(
                "oriented_rules".into(),
                json!(id_list(model.rules.iter().map(|r| r.id))),
            );
            m.insert(
                "extra_rules".into(),
                json!(step.extra_rules.iter().map(rule_json).collect::<Vec<_>>()),
            );
        }
    }
    let children: Vec<Value> = o.children().into_iter().map(node_json).collect();
    m.insert("children".into(), json!(children));
    v
}

fn ids_text(ids: impl IntoIterator<Item = RuleId>) -> String {
    let v: Vec<String> = ids.into_iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", v.join(", "))
}

fn text(proof: &Proof) -> String {
    let mut out = String::new();
    let root = &proof.root.problem;
    if proof.start.formative {
        let _ = writeln!(
            out,
            "formative start [{}]: removed rules {}",
            proof.start.tag(),
            ids_text(proof.start.removed.iter().copied())
        );
    }
    let _ = writeln!(out, "dependency pairs:");
    for p in &root.pairs {
        let _ = writeln!(out, "  {:>3}: {p}", p.id);
    }
    node_text(&proof.root, 0, &mut out);
    out
}

fn node_text(node: &ProofNode, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let p = &node.problem;
    let head = format!(
        "{pad}problem P = {}, R = {}, {}, {}",
        ids_text(p.pair_ids()),
        ids_text(p.rule_ids()),
        p.minimality,
        p.chains
    );
    match &node.outcome {
        Outcome::Qed => {
            let _ = writeln!(out, "{pad}qed: no pairs left");
            return;
        }
        Outcome::Open { reason } => {
            let _ = writeln!(out, "{head}");
            let _ = writeln!(out, "{pad}open: {reason}");
            return;
        }
        _ => {}
    }
    let _ = writeln!(out, "{head}");
    let o = &node.outcome;
    match o {
        Outcome::Graph { children } => {
            let _ = writeln!(out, "{pad}[{}] {} component(s)", o.tag(), children.len());
        }
        Outcome::Trim { removed, flags, .. } => {
            let _ = writeln!(
                out,
                "{pad}[{}] removed rules {}",
                o.tag(),
                ids_text(removed.iter().copied())
            );
            if !flags.is_unchanged() {
                let _ = writeln!(
                    out,
                    "{pad}  flags ({}, {}) -> ({}, {})",
                    flags.from.0, flags.from.1, flags.to.0, flags.to.1
                );
            }
        }
        Outcome::ReductionPair { step, .. } => {
            let m = &step.model;
            let _ = writeln!(
                out,
                "{pad}[{}] removed pairs {}",
                o.tag(),
                ids_text(m.strict.iter().copied())
            );
            let _ = writeln!(out, "{pad}  filtering: {}", m.filtering);
            let _ = writeln!(out, "{pad}  interpretation: {}", m.interpretation);
            for (id, c) in &m.constraints {
                let _ = writeln!(out, "{pad}  {id:>3}: {c}");
            }
        }
        Outcome::Qed | Outcome::Open { .. } => unreachable!(),
    }
    for c in o.children() {
        node_text(c, depth + 1, out);
    }
}
