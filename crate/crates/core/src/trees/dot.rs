use std::collections::BTreeSet;
use std::fmt::Write;

use super::FiniteTree;

#[derive(Clone, Debug, Default)]
pub struct DotOptions {
    pub name: Option<String>,
    /// Levels to mark, e.g. the designated sub-block of each enforced block.
    pub marked_levels: BTreeSet<usize>,
}

/// Graphviz text: one vertex per node, ramification points double-circled.
pub fn to_dot(tree: &FiniteTree, opts: &DotOptions) -> String {
    let mut out = String::new();
    let name = opts.name.as_deref().unwrap_or("tree");
    let splits = tree.ramification_points();
    let levels: Vec<String> = tree.ramification_levels().iter().map(usize::to_string).collect();
    writeln!(out, "digraph \"{}\" {{", name.replace('"', "'")).unwrap();
    writeln!(out, "  // ramification levels: {}", levels.join(",")).unwrap();
    if !opts.marked_levels.is_empty() {
        let marked: Vec<String> = opts.marked_levels.iter().map(usize::to_string).collect();
        writeln!(out, "  // marked levels: {}", marked.join(",")).unwrap();
    }
    writeln!(out, "  node [shape=circle, fontsize=10];").unwrap();
    let ids: std::collections::BTreeMap<_, _> =
        tree.nodes().iter().enumerate().map(|(k, n)| (n, k)).collect();
    for (n, k) in &ids {
        let shape = if splits.contains(*n) { "doublecircle" } else { "circle" };
        let fill = if opts.marked_levels.contains(&n.len()) {
            ", style=filled, fillcolor=lightgoldenrod"
        } else {
            ""
        };
        writeln!(out, "  n{k} [label=\"{}\", shape={shape}{fill}];", n.compact()).unwrap();
    }
    for (n, k) in &ids {
        if let Some(p) = n.parent() {
            writeln!(out, "  n{} -> n{k};", ids[&p]).unwrap();
        }
    }
    out.push_str("}\n");
    out
}
