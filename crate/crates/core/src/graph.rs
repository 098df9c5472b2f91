//! Undirected graphs on `1..=k`, chordality and perfect elimination orderings.
//!
//! Vertices are stored 0-based internally; the JSON file format and all
//! user-facing output use 1-based labels.
//!
//! An ordering `perm` lists vertices by position: `perm[p]` is the vertex that
//! sits at position `p`. It is a perfect elimination ordering when, for every
//! position, the neighbours that come *later* in the ordering are pairwise
//! adjacent. Relabelling a graph by such an ordering gives the labelled form
//! the rest of the crate works with, in which `L_ij` may be nonzero only for
//! `i < j` with `(i, j)` an edge.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) references a vertex outside 1..={2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("graph is not decomposable")]
    NotDecomposable,
    #[error("ordering is not a permutation of 1..={0}")]
    InvalidOrdering(usize),
}

/// Simple undirected graph with vertices `0..k`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    k: usize,
    edges: BTreeSet<(usize, usize)>,
    adj: Vec<Vec<bool>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<_> = self.edges.iter().map(|&(i, j)| (i + 1, j + 1)).collect();
        f.debug_struct("Graph")
            .field("k", &self.k)
            .field("edges", &edges)
            .finish()
    }
}

impl Graph {
    /// Builds a graph from 0-based edges. Duplicates (in either orientation)
    /// collapse to a single edge.
    pub fn new(
        k: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        if k == 0 {
            return Err(GraphError::Empty);
        }
        let mut adj = vec![vec![false; k]; k];
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= k || b >= k {
                return Err(GraphError::VertexOutOfRange(a + 1, b + 1, k));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a + 1));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            set.insert((i, j));
            adj[i][j] = true;
            adj[j][i] = true;
        }
        Ok(Self { k, edges: set, adj })
    }

    /// Builds a graph from 1-based edges, as they appear in graph files.
    pub fn from_one_based(k: usize, edges: &[[usize; 2]]) -> Result<Self, GraphError> {
        let mut zero = Vec::with_capacity(edges.len());
        for &[a, b] in edges {
            if a == 0 || b == 0 || a > k || b > k {
                return Err(GraphError::VertexOutOfRange(a, b, k));
            }
            zero.push((a - 1, b - 1));
        }
        Self::new(k, zero)
    }

    pub fn empty(k: usize) -> Result<Self, GraphError> {
        Self::new(k, std::iter::empty())
    }

    pub fn complete(k: usize) -> Result<Self, GraphError> {
        Self::new(k, (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))))
    }

    /// Path `0 - 1 - ... - k-1`.
    pub fn chain(k: usize) -> Result<Self, GraphError> {
        Self::new(k, (1..k).map(|i| (i - 1, i)))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges as 0-based `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.k && j < self.k && self.adj[i][j]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v]
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(u, _)| u)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&a| a).count()
    }

    /// `N≺(i) = { j : (i, j) ∈ E, i < j }` for every vertex, in increasing order.
    pub fn forward_neighbors(&self) -> ForwardNeighborSets {
        let sets = (0..self.k)
            .map(|i| (i + 1..self.k).filter(|&j| self.adj[i][j]).collect())
            .collect();
        ForwardNeighborSets { sets }
    }

    /// Graph whose vertex `p` is vertex `ord.perm()[p]` of `self`.
    pub fn relabel(&self, ord: &EliminationOrdering) -> Result<Graph, GraphError> {
        if ord.len() != self.k {
            return Err(GraphError::InvalidOrdering(self.k));
        }
        let pos = ord.positions();
        Graph::new(self.k, self.edges.iter().map(|&(a, b)| (pos[a], pos[b])))
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            k: self.k,
            edges: self.edges.iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
        }
    }
}

/// On-disk graph format: `{ "k": int, "edges": [[i, j], ...] }` with 1-based labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub k: usize,
    pub edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphFile> for Graph {
    type Error = GraphError;

    fn try_from(file: GraphFile) -> Result<Self, Self::Error> {
        Graph::from_one_based(file.k, &file.edges)
    }
}

impl From<&Graph> for GraphFile {
    fn from(g: &Graph) -> Self {
        g.to_file()
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_file().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let file = GraphFile::deserialize(deserializer)?;
        Graph::try_from(file).map_err(serde::de::Error::custom)
    }
}

/// Bijection from positions to vertices (both 0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationOrdering {
    perm: Vec<usize>,
}

impl EliminationOrdering {
    pub fn new(perm: Vec<usize>) -> Result<Self, GraphError> {
        let k = perm.len();
        let mut seen = vec![false; k];
        for &v in &perm {
            if v >= k || seen[v] {
                return Err(GraphError::InvalidOrdering(k));
            }
            seen[v] = true;
        }
        Ok(Self { perm })
    }

    pub fn from_one_based(perm: &[usize]) -> Result<Self, GraphError> {
        if perm.contains(&0) {
            return Err(GraphError::InvalidOrdering(perm.len()));
        }
        Self::new(perm.iter().map(|&v| v - 1).collect())
    }

    pub fn identity(k: usize) -> Self {
        Self {
            perm: (0..k).collect(),
        }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(p, &v)| p == v)
    }

    /// Inverse permutation: `positions()[v]` is the position of vertex `v`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.perm.len()];
        for (p, &v) in self.perm.iter().enumerate() {
            pos[v] = p;
        }
        pos
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.perm.iter().map(|&v| v + 1).collect()
    }
}

/// Forward neighbour sets `N≺(i)` of a labelled graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForwardNeighborSets {
    sets: Vec<Vec<usize>>,
}

impl ForwardNeighborSets {
    pub fn of(&self, i: usize) -> &[usize] {
        &self.sets[i]
    }

    pub fn size(&self, i: usize) -> usize {
        self.sets[i].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.sets.iter().map(Vec::len).collect()
    }

    pub fn max_size(&self) -> usize {
        self.sets.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.sets.iter().map(Vec::as_slice)
    }
}

/// Maximum cardinality search. Positions are assigned from `k-1` down to `0`;
/// at each step the unnumbered vertex with the most numbered neighbours is
/// taken, ties going to the highest vertex label. The resulting ordering is
/// a perfect elimination ordering whenever the graph is chordal, and it is
/// the identity whenever the labels already form one that MCS can produce.
fn maximum_cardinality_search(g: &Graph) -> EliminationOrdering {
    let k = g.k;
    let mut weight = vec![0usize; k];
    let mut numbered = vec![false; k];
    let mut perm = vec![0usize; k];
    for pos in (0..k).rev() {
        let mut best: Option<usize> = None;
        for v in (0..k).rev() {
            if numbered[v] {
                continue;
            }
            match best {
                Some(b) if weight[b] >= weight[v] => {}
                _ => best = Some(v),
            }
        }
        let v = best.expect("an unnumbered vertex remains");
        numbered[v] = true;
        perm[pos] = v;
        for u in g.neighbors(v) {
            if !numbered[u] {
                weight[u] += 1;
            }
        }
    }
    EliminationOrdering { perm }
}

/// Zero fill-in test (Tarjan & Yannakakis): for each vertex, all later
/// neighbours must be adjacent to the earliest of them.
fn has_zero_fill(g: &Graph, ord: &EliminationOrdering) -> bool {
    let pos = ord.positions();
    for (p, &v) in ord.perm.iter().enumerate() {
        let later: Vec<usize> = g.neighbors(v).filter(|&u| pos[u] > p).collect();
        let Some(&parent) = later.iter().min_by_key(|&&u| pos[u]) else {
            continue;
        };
        if later.iter().any(|&u| u != parent && !g.has_edge(u, parent)) {
            return false;
        }
    }
    true
}

/// True iff every cycle of length at least four has a chord.
pub fn is_decomposable(g: &Graph) -> bool {
    has_zero_fill(g, &maximum_cardinality_search(g))
}

/// A perfect elimination ordering of a decomposable graph. Deterministic:
/// the identity is returned whenever MCS can reach it, so a graph relabelled
/// by its own ordering maps back to the identity.
pub fn perfect_elimination_ordering(g: &Graph) -> Result<EliminationOrdering, GraphError> {
    let ord = maximum_cardinality_search(g);
    if has_zero_fill(g, &ord) {
        Ok(ord)
    } else {
        Err(GraphError::NotDecomposable)
    }
}

/// Direct check of the elimination triple condition: for positions
/// `i < j < l`, edges `(j, i)` and `(l, i)` imply the edge `(l, j)`.
pub fn verify_ordering(g: &Graph, ord: &EliminationOrdering) -> bool {
    if ord.len() != g.k {
        return false;
    }
    let p = &ord.perm;
    let k = g.k;
    for i in 0..k {
        for j in i + 1..k {
            if !g.has_edge(p[j], p[i]) {
                continue;
            }
            for l in j + 1..k {
                if g.has_edge(p[l], p[i]) && !g.has_edge(p[l], p[j]) {
                    return false;
                }
            }
        }
    }
    true
}

/// Whether `F(i, j) = {i+1, …, j-1, j+1, …, k-1}` separates `i < j`, i.e.
/// whether `j` is unreachable from `i` inside the subgraph induced on
/// `{0, …, i} ∪ {j}`.
///
/// # Panics
/// If `i >= j` or `j` is out of range.
pub fn separates(g: &Graph, i: usize, j: usize) -> bool {
    assert!(i < j && j < g.k, "separates requires i < j < k");
    let allowed = |v: usize| v <= i || v == j;
    let mut seen = vec![false; g.k];
    let mut stack = vec![i];
    seen[i] = true;
    while let Some(v) = stack.pop() {
        if v == j {
            return false;
        }
        for u in g.neighbors(v) {
            if allowed(u) && !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1(k: usize, edges: &[[usize; 2]]) -> Graph {
        Graph::from_one_based(k, edges).unwrap()
    }

    #[test]
    fn four_cycle_is_not_decomposable() {
        let g = g1(4, &[[1, 2], [2, 3], [3, 4], [1, 4]]);
        assert!(!is_decomposable(&g));
        assert_eq!(
            perfect_elimination_ordering(&g),
            Err(GraphError::NotDecomposable)
        );
    }

    #[test]
    fn small_chordal_graphs() {
        assert!(is_decomposable(&g1(3, &[[1, 2], [1, 3], [2, 3]])));
        assert!(is_decomposable(&Graph::empty(5).unwrap()));
        assert!(is_decomposable(&g1(
            4,
            &[[1, 2], [2, 3], [3, 4], [1, 4], [1, 3]]
        )));
        assert!(is_decomposable(&Graph::empty(1).unwrap()));
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(Graph::new(3, [(1, 1)]), Err(GraphError::SelfLoop(2)));
        assert!(matches!(
            Graph::from_one_based(3, &[[0, 1]]),
            Err(GraphError::VertexOutOfRange(..))
        ));
        assert_eq!(Graph::new(0, []), Err(GraphError::Empty));
        let g = Graph::new(3, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.num_edges(), 1);
    }

    #[test]
    fn chain_and_complete_get_identity() {
        let chain = Graph::chain(3).unwrap();
        assert!(perfect_elimination_ordering(&chain).unwrap().is_identity());
        let k4 = Graph::complete(4).unwrap();
        assert!(perfect_elimination_ordering(&k4).unwrap().is_identity());
    }

    #[test]
    fn triple_condition_on_chain() {
        let chain = Graph::chain(3).unwrap();
        assert!(verify_ordering(&chain, &EliminationOrdering::identity(3)));
        // Middle vertex first: its later neighbours 1 and 3 are not adjacent.
        let ord = EliminationOrdering::from_one_based(&[2, 1, 3]).unwrap();
        assert!(!verify_ordering(&chain, &ord));
        let k3 = Graph::complete(3).unwrap();
        for perm in [[1, 2, 3], [3, 1, 2], [2, 3, 1]] {
            assert!(verify_ordering(
                &k3,
                &EliminationOrdering::from_one_based(&perm).unwrap()
            ));
        }
    }

    #[test]
    fn separation() {
        let chain = Graph::chain(3).unwrap();
        assert!(separates(&chain, 0, 2));
        assert!(!separates(&chain, 0, 1));
        let path5 = Graph::chain(5).unwrap();
        assert!(separates(&path5, 0, 4));
        // 4-cycle 1-2-3-4-1: F(1,3) = {2,4} separates; 2 and 3 are adjacent.
        let c4 = g1(4, &[[1, 2], [2, 3], [3, 4], [1, 4]]);
        assert!(separates(&c4, 0, 2));
        assert!(!separates(&c4, 1, 2));
        // F(2,4) = {3}: path 2-1-4 avoids it.
        assert!(!separates(&c4, 1, 3));
    }

    #[test]
    fn forward_neighbors_of_butterfly() {
        let g = g1(5, &[[1, 2], [1, 3], [2, 3], [3, 4], [3, 5], [4, 5]]);
        let nb = g.forward_neighbors();
        assert_eq!(nb.of(0), &[1, 2]);
        assert_eq!(nb.of(2), &[3, 4]);
        assert!(nb.of(4).is_empty());
        assert_eq!(nb.max_size(), 2);
        assert_eq!(nb.total(), g.num_edges());
    }

    #[test]
    fn relabel_roundtrip() {
        let g = g1(4, &[[1, 4], [2, 4], [3, 4]]);
        let ord = perfect_elimination_ordering(&g).unwrap();
        let h = g.relabel(&ord).unwrap();
        assert!(verify_ordering(&h, &EliminationOrdering::identity(4)));
        assert!(perfect_elimination_ordering(&h).unwrap().is_identity());
    }

    #[test]
    fn file_format_is_one_based() {
        let g = Graph::chain(3).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"k":3,"edges":[[1,2],[2,3]]}"#);
        let back: Graph = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<Graph>(r#"{"k":2,"edges":[[1,3]]}"#).is_err());
    }
}
