mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sgdg::graph::{
    is_decomposable, perfect_elimination_ordering, separates, verify_ordering, EliminationOrdering,
    Graph,
};
use sgdg::linalg::{assemble_precision, modified_cholesky, verify_pattern, PrecisionMatrix};

use common::{dense_precision, random_decomposable_graph, random_factor};

/// Chordal iff no induced subgraph on ≥ 4 vertices is a cycle.
fn brute_force_chordal(g: &Graph) -> bool {
    let k = g.k();
    for mask in 0u32..(1 << k) {
        let vs: Vec<usize> = (0..k).filter(|&v| mask & (1 << v) != 0).collect();
        if vs.len() < 4 {
            continue;
        }
        let deg2 = vs
            .iter()
            .all(|&v| vs.iter().filter(|&&w| w != v && g.has_edge(v, w)).count() == 2);
        if !deg2 {
            continue;
        }
        // connected?
        let mut seen = vec![vs[0]];
        let mut stack = vec![vs[0]];
        while let Some(v) = stack.pop() {
            for &w in &vs {
                if g.has_edge(v, w) && !seen.contains(&w) {
                    seen.push(w);
                    stack.push(w);
                }
            }
        }
        if seen.len() == vs.len() {
            return false;
        }
    }
    true
}

#[test]
fn chordality_agrees_with_brute_force_on_all_small_graphs() {
    let mut checked = 0usize;
    for k in 1..=6usize {
        let pairs: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .collect();
        for mask in 0u64..(1 << pairs.len()) {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, &e)| e);
            let g = Graph::new(k, edges).unwrap();
            let want = brute_force_chordal(&g);
            assert_eq!(is_decomposable(&g), want, "{g:?}");
            if want {
                let ord = perfect_elimination_ordering(&g).unwrap();
                assert!(verify_ordering(&g, &ord));
                let h = g.relabel(&ord).unwrap();
                assert!(verify_ordering(&h, &EliminationOrdering::identity(k)));
            } else {
                assert!(perfect_elimination_ordering(&g).is_err());
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 1 + 2 + 8 + 64 + 1024 + 32768);
}

#[test]
fn separation_on_chain() {
    let g = Graph::chain(4).unwrap();
    assert!(separates(&g, 0, 2));
    assert!(separates(&g, 0, 3));
    assert!(!separates(&g, 2, 3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// Under a perfect elimination ordering the modified Cholesky
    /// factor has exactly the graph's zero pattern, and refactoring is exact.
    #[test]
    fn pattern_roundtrip(seed in any::<u64>(), k in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g0 = random_decomposable_graph(k, &mut rng);
        let ord = perfect_elimination_ordering(&g0).unwrap();
        let g = g0.relabel(&ord).unwrap();
        let f = random_factor(&g, &mut rng);
        let q = assemble_precision(&f);
        prop_assert!(q.respects(&g));
        let dense = dense_precision(&f);
        prop_assert!(q.matrix().sub(&dense).frobenius_norm() / dense.frobenius_norm() < 1e-14);

        let f2 = modified_cholesky(&PrecisionMatrix::new(q.matrix().clone()).unwrap()).unwrap();
        prop_assert!(verify_pattern(&f2, &g));
        let back = dense_precision(&f2);
        let rel = q.matrix().sub(&back).frobenius_norm() / q.matrix().frobenius_norm();
        prop_assert!(rel < 1e-10, "relative residual {}", rel);
        for (i, j, v) in f.l().entries() {
            prop_assert!((f2.l().get(i, j) - v).abs() < 1e-9);
        }
    }

    #[test]
    fn relabel_then_invert_is_identity(seed in any::<u64>(), k in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_decomposable_graph(k, &mut rng);
        let ord = perfect_elimination_ordering(&g).unwrap();
        let h = g.relabel(&ord).unwrap();
        prop_assert_eq!(h.num_edges(), g.num_edges());
        for (a, b) in h.edges() {
            prop_assert!(g.has_edge(ord.perm()[a], ord.perm()[b]));
        }
    }
}
