use std::fmt::Write as _;

use serde::Serialize;
use sgdg::graph::{is_decomposable, perfect_elimination_ordering, verify_ordering};
use sgdg::inference::min_sample_size;
use sgdg::{EliminationOrdering, Graph};

use crate::io::GraphSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborRow {
    /// 1-based vertex under the reported ordering.
    pub vertex: usize,
    pub label: String,
    pub forward_neighbors: Vec<usize>,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphReport {
    pub k: usize,
    pub edges: usize,
    pub decomposable: bool,
    /// Whether the file's own labelling is already a perfect elimination ordering.
    pub labelling_is_perfect: bool,
    /// Original labels (1-based) in elimination order; `None` if not decomposable.
    pub ordering: Option<Vec<usize>>,
    pub neighbors: Vec<NeighborRow>,
    pub max_forward_neighbors: Option<usize>,
    pub min_n_noninformative: Option<usize>,
}

fn label(spec: &GraphSpec, v: usize) -> String {
    spec.labels
        .as_ref()
        .map_or_else(|| format!("X{}", v + 1), |l| l[v].clone())
}

pub fn check_graph(spec: &GraphSpec) -> GraphReport {
    let g = &spec.graph;
    let decomposable = is_decomposable(g);
    let labelling_is_perfect = verify_ordering(g, &EliminationOrdering::identity(g.k()));
    let mut report = GraphReport {
        k: g.k(),
        edges: g.num_edges(),
        decomposable,
        labelling_is_perfect,
        ordering: None,
        neighbors: Vec::new(),
        max_forward_neighbors: None,
        min_n_noninformative: None,
    };
    if !decomposable {
        return report;
    }
    // keep the user's labelling when it already works
    let ord = if labelling_is_perfect {
        EliminationOrdering::identity(g.k())
    } else {
        perfect_elimination_ordering(g).expect("decomposable graph has a perfect ordering")
    };
    let relabelled: Graph = g.relabel(&ord).expect("ordering matches graph size");
    let nb = relabelled.forward_neighbors();
    report.ordering = Some(ord.to_one_based());
    report.neighbors = (0..g.k())
        .map(|p| NeighborRow {
            vertex: p + 1,
            label: label(spec, ord.perm()[p]),
            forward_neighbors: nb.of(p).iter().map(|&j| j + 1).collect(),
            size: nb.size(p),
        })
        .collect();
    report.max_forward_neighbors = Some(nb.max_size());
    report.min_n_noninformative = Some(min_sample_size(&relabelled));
    report
}

pub fn render(r: &GraphReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "vertices: {}, edges: {}", r.k, r.edges);
    if !r.decomposable {
        let _ = writeln!(
            s,
            "decomposable: no (the graph has a chordless cycle of length >= 4)"
        );
        return s;
    }
    let _ = writeln!(s, "decomposable: yes");
    let _ = writeln!(
        s,
        "given labelling is a perfect elimination ordering: {}",
        if r.labelling_is_perfect { "yes" } else { "no" }
    );
    if let Some(ord) = &r.ordering {
        let ord: Vec<String> = ord.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(
            s,
            "elimination ordering (original labels): {}",
            ord.join(" ")
        );
    }
    let _ = writeln!(
        s,
        "{:<8}{:<16}{:<8}forward neighbours",
        "vertex", "label", "|N|"
    );
    for row in &r.neighbors {
        let nb: Vec<String> = row
            .forward_neighbors
            .iter()
            .map(|v| v.to_string())
            .collect();
        let line = format!(
            "{:<8}{:<16}{:<8}{}",
            row.vertex,
            row.label,
            row.size,
            nb.join(" ")
        );
        let _ = writeln!(s, "{}", line.trim_end());
    }
    if let (Some(m), Some(n)) = (r.max_forward_neighbors, r.min_n_noninformative) {
        let _ = writeln!(s, "max |N|: {m}");
        let _ = writeln!(s, "minimum n under the noninformative prior: {n}");
    }
    s
}
