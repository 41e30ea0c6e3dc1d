use std::fmt::Write;

use crate::graph::{ClusterPartition, Digraph, Multigraph};

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn node_lines(out: &mut String, n: usize, partition: Option<&ClusterPartition>) {
    for v in 0..n {
        match partition {
            Some(p) => match p.cluster_of(v) {
                Some(c) => {
                    let colour = PALETTE[c % PALETTE.len()];
                    writeln!(out, "  {v} [color=\"{colour}\", label=\"{v}\\nC{c}\"];").unwrap();
                }
                None if p.side_of(v).is_some() => {
                    writeln!(out, "  {v} [shape=box, label=\"{v}\\nexc\"];").unwrap();
                }
                None => writeln!(out, "  {v};").unwrap(),
            },
            None => writeln!(out, "  {v};").unwrap(),
        }
    }
}

pub fn multigraph_to_dot(g: &Multigraph, partition: Option<&ClusterPartition>) -> String {
    let mut out = String::from("graph G {\n");
    node_lines(&mut out, g.vertex_count(), partition);
    for (u, v, m) in g.edges() {
        if m == 1 {
            writeln!(out, "  {u} -- {v};").unwrap();
        } else {
            writeln!(out, "  {u} -- {v} [label=\"x{m}\"];").unwrap();
        }
    }
    out.push_str("}\n");
    out
}

pub fn digraph_to_dot(d: &Digraph, partition: Option<&ClusterPartition>) -> String {
    let mut out = String::from("digraph G {\n");
    node_lines(&mut out, d.vertex_count(), partition);
    for (u, v) in d.arcs() {
        writeln!(out, "  {u} -> {v};").unwrap();
    }
    out.push_str("}\n");
    out
}
