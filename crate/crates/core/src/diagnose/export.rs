use std::fmt::Write;

use thiserror::Error;

use super::dataset::Class;
use super::tree::{DecisionTree, Node};

/// Threshold as printed in text and DOT output: six decimals, trailing
/// zeros dropped.
pub fn fmt_threshold(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn leaf_text(label: Class, counts: &[usize; 3]) -> String {
    let n: usize = counts.iter().sum();
    let wrong = n - counts[label.index()];
    if wrong == 0 {
        format!("{} ({n})", label.label())
    } else {
        format!("{} ({n}/{wrong})", label.label())
    }
}

/// Indented text form, one line per branch:
///
/// ```text
/// slot_0 <= 120.006093: False (1013)
/// slot_0 > 120.006093: True (1013)
/// ```
pub fn to_text(t: &DecisionTree) -> String {
    let mut out = String::new();
    if let Node::Leaf { label, counts } = &t.root {
        out.push_str(&leaf_text(*label, counts));
        out.push('\n');
        return out;
    }
    text_node(&t.root, 0, &mut out);
    out
}

fn text_node(node: &Node, depth: usize, out: &mut String) {
    let branches: Vec<(String, &Node)> = match node {
        Node::Leaf { .. } => return,
        Node::Numeric { slot, threshold, le, gt } => {
            let t = fmt_threshold(*threshold);
            vec![(format!("slot_{slot} <= {t}"), &**le), (format!("slot_{slot} > {t}"), &**gt)]
        }
        Node::Categorical { slot, branches } => {
            branches.iter().map(|(sym, n)| (format!("slot_{slot} = {sym}"), n)).collect()
        }
    };
    for (test, child) in branches {
        out.push_str(&"|   ".repeat(depth));
        out.push_str(&test);
        match child {
            Node::Leaf { label, counts } => {
                let _ = writeln!(out, ": {}", leaf_text(*label, counts));
            }
            _ => {
                out.push('\n');
                text_node(child, depth + 1, out);
            }
        }
    }
}

/// Graphviz rendering with split tests on the edges.
pub fn to_dot(t: &DecisionTree) -> String {
    let mut out = String::from("digraph diagnosis {\n    node [fontname=\"Helvetica\"];\n");
    let mut next = 0usize;
    dot_node(&t.root, &mut next, &mut out);
    out.push_str("}\n");
    out
}

fn dot_node(node: &Node, next: &mut usize, out: &mut String) -> usize {
    let id = *next;
    *next += 1;
    match node {
        Node::Leaf { label, counts } => {
            let _ = writeln!(out, "    n{id} [shape=box, label=\"{}\"];", leaf_text(*label, counts));
        }
        Node::Numeric { slot, threshold, le, gt } => {
            let _ = writeln!(out, "    n{id} [shape=ellipse, label=\"slot_{slot}\"];");
            let t = fmt_threshold(*threshold);
            let a = dot_node(le, next, out);
            let _ = writeln!(out, "    n{id} -> n{a} [label=\"<= {t}\"];");
            let b = dot_node(gt, next, out);
            let _ = writeln!(out, "    n{id} -> n{b} [label=\"> {t}\"];");
        }
        Node::Categorical { slot, branches } => {
            let _ = writeln!(out, "    n{id} [shape=ellipse, label=\"slot_{slot}\"];");
            for (sym, child) in branches {
                let c = dot_node(child, next, out);
                let _ = writeln!(out, "    n{id} -> n{c} [label=\"= {}\"];", sym.replace('"', "\\\""));
            }
        }
    }
    id
}

pub fn to_json(t: &DecisionTree) -> String {
    let mut s = serde_json::to_string_pretty(t).expect("trees serialize");
    s.push('\n');
    s
}

#[derive(Debug, Error)]
pub enum TreeJsonError {
    #[error("malformed tree JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("inconsistent tree: {0}")]
    Invalid(String),
}

/// Read a tree written by [`to_json`], rejecting splits the schema cannot
/// route.
pub fn from_json(text: &str) -> Result<DecisionTree, TreeJsonError> {
    let t: DecisionTree = serde_json::from_str(text)?;
    t.validate().map_err(TreeJsonError::Invalid)?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnose::dataset::{AttrKind, Attribute, Schema};

    fn single_split(threshold: f64, n: usize) -> DecisionTree {
        DecisionTree {
            schema: Schema {
                attributes: vec![Attribute { slot: 0, kind: AttrKind::Numeric { lo: 100.0, hi: 140.0 } }],
            },
            root: Node::Numeric {
                slot: 0,
                threshold,
                le: Box::new(Node::Leaf { label: Class::Violated, counts: [0, n, 0] }),
                gt: Box::new(Node::Leaf { label: Class::Satisfied, counts: [n, 0, 0] }),
            },
            degenerate: false,
        }
    }

    #[test]
    fn text_lines() {
        let t = single_split(120.006093, 1013);
        assert_eq!(to_text(&t), "slot_0 <= 120.006093: False (1013)\nslot_0 > 120.006093: True (1013)\n");
    }

    #[test]
    fn leaf_only_text() {
        let t = DecisionTree {
            schema: Schema { attributes: vec![] },
            root: Node::Leaf { label: Class::Satisfied, counts: [4, 1, 0] },
            degenerate: false,
        };
        assert_eq!(to_text(&t), "True (5/1)\n");
    }

    #[test]
    fn nested_text_and_dot() {
        let t = DecisionTree {
            schema: Schema {
                attributes: vec![
                    Attribute { slot: 1, kind: AttrKind::Categorical { symbols: vec!["and".into(), "or".into()] } },
                    Attribute { slot: 2, kind: AttrKind::Numeric { lo: 0.0, hi: 2.5 } },
                ],
            },
            root: Node::Categorical {
                slot: 1,
                branches: vec![
                    (
                        "and".into(),
                        Node::Numeric {
                            slot: 2,
                            threshold: 0.6864,
                            le: Box::new(Node::Leaf { label: Class::Satisfied, counts: [3, 0, 0] }),
                            gt: Box::new(Node::Leaf { label: Class::Violated, counts: [0, 4, 0] }),
                        },
                    ),
                    ("or".into(), Node::Leaf { label: Class::Satisfied, counts: [2, 0, 0] }),
                ],
            },
            degenerate: false,
        };
        assert_eq!(
            to_text(&t),
            "slot_1 = and\n|   slot_2 <= 0.6864: True (3)\n|   slot_2 > 0.6864: False (4)\nslot_1 = or: True (2)\n"
        );
        let dot = to_dot(&t);
        assert!(dot.contains("n1 -> n2 [label=\"<= 0.6864\"];"), "{dot}");
        assert!(dot.contains("n0 -> n4 [label=\"= or\"];"), "{dot}");
        assert_eq!(from_json(&to_json(&t)).unwrap(), t);
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let t = single_split(0.1 + 0.2, 3);
        assert_eq!(from_json(&to_json(&t)).unwrap(), t);
        assert!(matches!(from_json("{\"schema\": 1}"), Err(TreeJsonError::Json(_))));
    }

    #[test]
    fn threshold_format() {
        assert_eq!(fmt_threshold(548.0303), "548.0303");
        assert_eq!(fmt_threshold(120.0), "120");
        assert_eq!(fmt_threshold(-0.0000001), "0");
        assert_eq!(fmt_threshold(120.00609349), "120.006093");
    }

    #[test]
    fn rejects_unroutable_trees() {
        let mut unknown_slot = single_split(120.0, 3);
        if let Node::Numeric { slot, .. } = &mut unknown_slot.root {
            *slot = 4;
        }
        let mut wrong_kind = single_split(120.0, 3);
        wrong_kind.schema.attributes[0].kind = AttrKind::Categorical { symbols: vec!["a".into()] };
        let missing_branch = DecisionTree {
            schema: wrong_kind.schema.clone(),
            root: Node::Categorical { slot: 0, branches: vec![] },
            degenerate: false,
        };
        for t in [unknown_slot, wrong_kind, missing_branch] {
            let text = serde_json::to_string(&t).unwrap();
            assert!(matches!(from_json(&text), Err(TreeJsonError::Invalid(_))), "{text}");
        }
    }
}
