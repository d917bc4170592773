use std::fmt::{Display, Write};

use serde::Serialize;
use serde_json::{json, Value};

use super::{DecisionTree, TreeNode};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz digraph; nodes in preorder, edges labeled `true`/`false`.
pub fn export_dot<O: Display>(tree: &DecisionTree<O>) -> String {
    let mut out = String::from("digraph decision_tree {\n");
    for node in tree.nodes() {
        match node {
            TreeNode::Internal { id, constraint, on_true, on_false } => {
                let _ = writeln!(out, "  n{id} [shape=box, label=\"{}\"];", escape(&constraint.to_string()));
                let _ = writeln!(out, "  n{id} -> n{on_true} [label=\"true\"];");
                let _ = writeln!(out, "  n{id} -> n{on_false} [label=\"false\"];");
            }
            TreeNode::Leaf(leaf) => {
                let _ = writeln!(
                    out,
                    "  n{} [shape=ellipse, label=\"{}\"];",
                    leaf.id,
                    escape(&leaf.output.to_string())
                );
            }
        }
    }
    out.push_str("}\n");
    out
}

/// `{dim, base_region, nodes: [{id, kind, constraint | payload, true_child, false_child}]}`.
pub fn export_json<O: Serialize>(tree: &DecisionTree<O>) -> Value {
    let nodes: Vec<Value> = tree
        .nodes()
        .iter()
        .map(|node| match node {
            TreeNode::Internal { id, constraint, on_true, on_false } => json!({
                "id": id,
                "kind": "internal",
                "constraint": constraint.to_string(),
                "true_child": on_true,
                "false_child": on_false,
            }),
            TreeNode::Leaf(leaf) => json!({
                "id": leaf.id,
                "kind": "leaf",
                "payload": leaf.output,
                "path": leaf.path.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "true_child": null,
                "false_child": null,
            }),
        })
        .collect();
    json!({
        "dim": tree.dim(),
        "base_region": tree.base_region().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "nodes": nodes,
    })
}

/// Indented outline, one node per line.
pub fn export_text<O: Display>(tree: &DecisionTree<O>) -> String {
    fn walk<O: Display>(tree: &DecisionTree<O>, at: usize, depth: usize, tag: &str, out: &mut String) {
        let pad = "  ".repeat(depth);
        match &tree.nodes()[at] {
            TreeNode::Internal { constraint, on_true, on_false, .. } => {
                let _ = writeln!(out, "{pad}{tag}if {constraint}");
                walk(tree, *on_true, depth + 1, "true: ", out);
                walk(tree, *on_false, depth + 1, "false: ", out);
            }
            TreeNode::Leaf(leaf) => {
                let _ = writeln!(out, "{pad}{tag}{}", leaf.output);
            }
        }
    }
    let mut out = String::new();
    walk(tree, 0, 0, "", &mut out);
    out
}
