pub mod check_graph;
pub mod compare;
pub mod fit;
pub mod plots;
pub mod simulate;
