use std::fmt::Write;

use super::BoxRelationsGraph;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz text: nodes in id order, then edges in lexicographic order.
pub fn export_dot(g: &BoxRelationsGraph) -> String {
    let mut out = String::from("digraph brg {\n    rankdir=BT;\n");
    for n in &g.nodes {
        writeln!(out, "    {};", quote(n.as_str())).unwrap();
    }
    for (d, b) in &g.edges {
        writeln!(out, "    {} -> {};", quote(d.as_str()), quote(b.as_str())).unwrap();
    }
    out.push_str("}\n");
    out
}
