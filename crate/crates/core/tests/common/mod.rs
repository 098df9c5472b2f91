#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use sgdg::graph::Graph;
use sgdg::linalg::{CholFactor, Matrix, UnitUpper};

/// Decomposable graph on `k` vertices whose identity labelling is a perfect
/// elimination ordering: each vertex attaches to a clique of later vertices.
pub fn random_peo_graph<R: Rng>(k: usize, rng: &mut R) -> Graph {
    let mut later: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut edges = Vec::new();
    for i in (0..k.saturating_sub(1)).rev() {
        if rng.random_bool(0.2) {
            continue;
        }
        // a random vertex v > i together with a subset of its later clique
        let v = rng.random_range(i + 1..k);
        let mut clique = vec![v];
        clique.extend(later[v].iter().copied().filter(|_| rng.random_bool(0.6)));
        clique.sort_unstable();
        for &c in &clique {
            edges.push((i, c));
        }
        later[i] = clique;
    }
    Graph::new(k, edges).unwrap()
}

/// Same as [`random_peo_graph`] but with vertex labels shuffled.
pub fn random_decomposable_graph<R: Rng>(k: usize, rng: &mut R) -> Graph {
    let g = random_peo_graph(k, rng);
    let mut perm: Vec<usize> = (0..k).collect();
    perm.shuffle(rng);
    Graph::new(k, g.edges().map(|(a, b)| (perm[a], perm[b]))).unwrap()
}

pub fn random_factor<R: Rng>(g: &Graph, rng: &mut R) -> CholFactor<f64> {
    let mut l = UnitUpper::on_graph(g);
    for i in 0..g.k() {
        let vals: Vec<f64> = (0..l.row_cols(i).len())
            .map(|_| {
                let m: f64 = rng.random_range(0.1..1.2);
                if rng.random_bool(0.5) {
                    m
                } else {
                    -m
                }
            })
            .collect();
        l.set_row_vals(i, &vals);
    }
    let d = (0..g.k()).map(|_| rng.random_range(0.3..3.0)).collect();
    CholFactor::new(l, d).unwrap()
}

/// Dense `LᵀDL`, computed without the sparse assembly under test.
pub fn dense_precision(f: &CholFactor<f64>) -> Matrix<f64> {
    let l = f.l().to_dense();
    let d = Matrix::from_diag(f.d());
    l.transpose().matmul(&d).matmul(&l)
}

/// Multivariate normal log density from a precision matrix.
pub fn mvn_log_pdf_prec(x: &[f64], mu: &[f64], q: &Matrix<f64>) -> f64 {
    let k = x.len();
    let r: Vec<f64> = x.iter().zip(mu).map(|(a, b)| a - b).collect();
    let qr = q.matvec(&r);
    let quad: f64 = r.iter().zip(&qr).map(|(a, b)| a * b).sum();
    let logdet = q.cholesky().unwrap().log_det();
    -0.5 * k as f64 * (2.0 * std::f64::consts::PI).ln() + 0.5 * logdet - 0.5 * quad
}

pub fn mean_and_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Largest gap between the empirical CDF of `draws` and `cdf`, checked at
/// every draw after sorting.
pub fn ks_distance(draws: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    draws.sort_by(f64::total_cmp);
    let n = draws.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in draws.iter().enumerate() {
        let f = cdf(x);
        d = d
            .max((f - i as f64 / n).abs())
            .max(((i + 1) as f64 / n - f).abs());
    }
    d
}
