mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sgdg::graph::{perfect_elimination_ordering, separates, Graph};
use sgdg::linalg::{modified_cholesky, CholFactor, Matrix, PrecisionMatrix, UnitUpper};
use sgdg::quadrature::gauss_legendre_on;
use sgdg::sgdg::{
    ci_factorization_check, covariance_inverse, covariance_matrix, mean_vector, reparam_forward,
    reparam_inverse, sample_sgdg, sgdg_log_density, ReparamParams, SgdgError, SgdgParams,
};

use common::{
    dense_precision, mean_and_se, mvn_log_pdf_prec, random_decomposable_graph, random_factor,
};

fn random_params(seed: u64, kmax: usize, zero_alpha: bool) -> SgdgParams<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.random_range(1..=kmax);
    let g0 = random_decomposable_graph(k, &mut rng);
    let g = g0
        .relabel(&perfect_elimination_ordering(&g0).unwrap())
        .unwrap();
    let f = random_factor(&g, &mut rng);
    let mu = (0..k).map(|_| rng.random_range(-3.0..3.0)).collect();
    let alpha = (0..k)
        .map(|_| {
            if zero_alpha {
                0.0
            } else {
                rng.random_range(-4.0..4.0)
            }
        })
        .collect();
    SgdgParams::new(mu, f, alpha, g).unwrap()
}

fn bivariate(alpha: f64) -> SgdgParams<f64> {
    let g = Graph::complete(2).unwrap();
    let mut l = UnitUpper::on_graph(&g);
    l.set(0, 1, -0.5).unwrap();
    SgdgParams::new(
        vec![0.0, 0.0],
        CholFactor::new(l, vec![1.0, 1.0]).unwrap(),
        vec![alpha, alpha],
        g,
    )
    .unwrap()
}

fn chain3(alpha: [f64; 3]) -> SgdgParams<f64> {
    let g = Graph::chain(3).unwrap();
    let mut l = UnitUpper::on_graph(&g);
    l.set(0, 1, -0.5).unwrap();
    l.set(1, 2, -0.5).unwrap();
    SgdgParams::new(
        vec![1.0, 0.0, -1.0],
        CholFactor::new(l, vec![1.0, 1.5, 0.8]).unwrap(),
        alpha.to_vec(),
        g,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gaussian_reduction(seed in any::<u64>()) {
        let p = random_params(seed, 6, true);
        let q = dense_precision(p.factor());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        for _ in 0..5 {
            let x: Vec<f64> = (0..p.k()).map(|_| rng.random_range(-5.0..5.0)).collect();
            let a = sgdg_log_density(&p, &x);
            let b = mvn_log_pdf_prec(&x, p.mu(), &q);
            prop_assert!((a - b).abs() < 1e-10, "{} vs {}", a, b);
        }
    }
}

#[test]
fn reparam_round_trip() {
    let mut worst: f64 = 0.0;
    for seed in 0..1000 {
        let p = random_params(seed, 6, false);
        let back = reparam_inverse(&reparam_forward(&p)).unwrap();
        for (a, b) in p
            .alpha()
            .iter()
            .zip(back.alpha())
            .chain(p.kappa2().iter().zip(back.kappa2()))
        {
            worst = worst.max((a - b).abs());
        }
        assert_eq!(p.l(), back.l());
    }
    assert!(worst < 1e-12, "{worst}");
    // and from the (δ, ω²) side
    let g = Graph::chain(2).unwrap();
    let r = ReparamParams {
        mu: vec![0.0, 0.0],
        delta: vec![0.0, -3.0],
        omega2: vec![2.0, 0.5],
        l: UnitUpper::on_graph(&g),
        graph: g,
    };
    let p = reparam_inverse(&r).unwrap();
    assert_eq!(p.alpha()[0], 0.0);
    assert_eq!(p.kappa2()[0], 2.0);
    let again = reparam_forward(&p);
    assert!((again.delta[1] + 3.0_f64).abs() < 1e-14 && (again.omega2[1] - 0.5_f64).abs() < 1e-14);
}

fn grid_mass(p: &SgdgParams<f64>, nodes: usize) -> (f64, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let m = mean_vector(p);
    let c = covariance_matrix(p);
    let axis = |i: usize| {
        let h = 10.0 * c[(i, i)].sqrt();
        gauss_legendre_on(nodes, m[i] - h, m[i] + h)
    };
    let (x, wx) = axis(0);
    let (y, wy) = axis(1);
    let mut mass = 0.0;
    for (a, wa) in x.iter().zip(&wx) {
        for (b, wb) in y.iter().zip(&wy) {
            mass += wa * wb * sgdg_log_density(p, &[*a, *b]).exp();
        }
    }
    (mass, x, wx, y, wy)
}

#[test]
fn bivariate_densities_normalise() {
    for alpha in [2.0, 4.0] {
        let (mass, ..) = grid_mass(&bivariate(alpha), 200);
        assert!((mass - 1.0).abs() < 1e-6, "alpha {alpha}: {mass}");
    }
}

#[test]
fn bivariate_shape() {
    // Positive skewness pushes the mode into the first quadrant; Q₁₂ < 0 tilts
    // the contours along the positive diagonal.
    for alpha in [2.0, 4.0] {
        let p = bivariate(alpha);
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for i in 0..=400 {
            for j in 0..=400 {
                let (a, b) = (-3.0 + 6.0 * i as f64 / 400.0, -3.0 + 6.0 * j as f64 / 400.0);
                let v = sgdg_log_density(&p, &[a, b]);
                if v > best.0 {
                    best = (v, a, b);
                }
            }
        }
        assert!(
            best.1 > 0.0 && best.2 > 0.0,
            "mode at ({}, {})",
            best.1,
            best.2
        );
        let c = covariance_matrix(&p);
        assert!(c[(0, 1)] > 0.0);
    }
    // larger skewness moves the mean further out
    assert!(mean_vector(&bivariate(4.0))[1] > mean_vector(&bivariate(2.0))[1]);
}

#[test]
fn moments_match_monte_carlo() {
    let p = chain3([2.0, 2.0, 2.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let draws = sample_sgdg(&p, &mut rng, 1_000_000);
    let m = mean_vector(&p);
    let c = covariance_matrix(&p);
    for i in 0..3 {
        let col: Vec<f64> = draws.iter().map(|x| x[i]).collect();
        let (mean, se) = mean_and_se(&col);
        assert!(
            (mean - m[i]).abs() < 3.0 * se,
            "mean {i}: {mean} vs {} (se {se})",
            m[i]
        );
    }
    for i in 0..3 {
        for j in i..3 {
            let prod: Vec<f64> = draws
                .iter()
                .map(|x| (x[i] - m[i]) * (x[j] - m[j]))
                .collect();
            let (cov, se) = mean_and_se(&prod);
            assert!(
                (cov - c[(i, j)]).abs() < 3.0 * se,
                "cov {i}{j}: {cov} vs {} (se {se})",
                c[(i, j)]
            );
        }
    }
    assert!(covariance_inverse(&p)[(0, 2)].abs() < 1e-10);
    let numeric_inv = c.cholesky().unwrap().inverse();
    assert!(numeric_inv[(0, 2)].abs() < 1e-10);
}

#[test]
fn gaussian_sampler_recovers_precision() {
    let p = chain3([0.0; 3]);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let draws = sample_sgdg(&p, &mut rng, 1_000_000);
    let n = draws.len() as f64;
    let mean: Vec<f64> = (0..3)
        .map(|i| draws.iter().map(|x| x[i]).sum::<f64>() / n)
        .collect();
    let cov = Matrix::from_fn(3, 3, |a, b| {
        draws
            .iter()
            .map(|x| (x[a] - mean[a]) * (x[b] - mean[b]))
            .sum::<f64>()
            / n
    });
    let q_hat = cov.cholesky().unwrap().inverse();
    let q = dense_precision(p.factor());
    assert!(q_hat.sub(&q).max_abs() < 0.02, "{q_hat:?}");
}

#[test]
fn case_c_second_coordinate_is_symmetric() {
    let g = Graph::chain(3).unwrap();
    let mut l = UnitUpper::on_graph(&g);
    l.set(0, 1, -0.5).unwrap();
    l.set(1, 2, 0.5).unwrap();
    let r = ReparamParams {
        mu: vec![5.0; 3],
        delta: vec![3.0, -2.0, -4.0],
        omega2: vec![1.0; 3],
        l,
        graph: g,
    };
    let p = reparam_inverse(&r).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let x2: Vec<f64> = sample_sgdg(&p, &mut rng, 1_000_000)
        .iter()
        .map(|x| x[1])
        .collect();
    let n = x2.len() as f64;
    let m = x2.iter().sum::<f64>() / n;
    let m2 = x2.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    let m3 = x2.iter().map(|v| (v - m).powi(3)).sum::<f64>() / n;
    let skew = m3 / m2.powf(1.5);
    assert!(skew.abs() < 0.05, "{skew}");
    // the other two coordinates are clearly skewed
    let x3: Vec<f64> = sample_sgdg(&p, &mut rng, 200_000)
        .iter()
        .map(|x| x[2])
        .collect();
    let m = x3.iter().sum::<f64>() / x3.len() as f64;
    let s3 = x3.iter().map(|v| (v - m).powi(3)).sum::<f64>();
    assert!(s3 < 0.0);
}

#[test]
fn ci_check_on_chain_and_complete() {
    let p = chain3([1.5, -2.0, 0.8]);
    assert!(ci_factorization_check(&p, 0, 2).unwrap());
    assert!(!ci_factorization_check(&p, 0, 1).unwrap());
    assert!(!ci_factorization_check(&p, 1, 2).unwrap());

    let g = Graph::complete(3).unwrap();
    let mut l = UnitUpper::on_graph(&g);
    l.set(0, 1, 0.4).unwrap();
    l.set(0, 2, -0.6).unwrap();
    l.set(1, 2, 0.3).unwrap();
    let p = SgdgParams::new(
        vec![0.0; 3],
        CholFactor::new(l, vec![1.0, 0.7, 1.3]).unwrap(),
        vec![1.0, 2.0, -1.0],
        g,
    )
    .unwrap();
    assert!(!ci_factorization_check(&p, 0, 2).unwrap());

    let p = chain3([0.0; 3]);
    assert!(ci_factorization_check(&p, 0, 2).unwrap());
}

#[test]
fn ci_check_rejects_large_dimension() {
    let g = Graph::chain(5).unwrap();
    let f = CholFactor::new(UnitUpper::on_graph(&g), vec![1.0; 5]).unwrap();
    let p = SgdgParams::new(vec![0.0; 5], f, vec![1.0; 5], g).unwrap();
    assert!(matches!(
        ci_factorization_check(&p, 0, 2),
        Err(SgdgError::DimensionTooLarge(5))
    ));
}

#[test]
fn missing_edges_are_independent_on_random_graphs() {
    for seed in 0..15u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(3..=4);
        let g0 = random_decomposable_graph(k, &mut rng);
        let g = g0
            .relabel(&perfect_elimination_ordering(&g0).unwrap())
            .unwrap();
        let f = random_factor(&g, &mut rng);
        let alpha = (0..k)
            .map(|_| rng.random_range(0.5..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let p = SgdgParams::new(vec![0.0; k], f, alpha, g.clone()).unwrap();
        for i in 0..k {
            for j in i + 1..k {
                let ci = ci_factorization_check(&p, i, j).unwrap();
                assert_eq!(ci, !g.has_edge(i, j), "seed {seed}, pair ({i}, {j}), {g:?}");
            }
        }
    }
}

#[test]
fn separation_implies_independence_on_four_cycle() {
    // Q on the (non-decomposable) 4-cycle 0-1-2-3-0; its factor fills in (1, 3).
    let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
    let q = Matrix::from_rows(&[
        vec![2.0, -0.5, 0.0, 0.4],
        vec![-0.5, 2.0, 0.6, 0.0],
        vec![0.0, 0.6, 2.0, -0.3],
        vec![0.4, 0.0, -0.3, 2.0],
    ]);
    let f = modified_cholesky(&PrecisionMatrix::new(q).unwrap()).unwrap();
    let filled = Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3), (1, 3)]).unwrap();
    let p = SgdgParams::new(vec![0.0; 4], f, vec![1.0, -1.5, 2.0, 0.5], filled).unwrap();
    let mut claimed = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if separates(&g, i, j) {
                claimed += 1;
                assert!(ci_factorization_check(&p, i, j).unwrap(), "({i}, {j})");
            }
        }
    }
    assert!(claimed >= 1);
    // the filled-in pair (1, 3) is not separated and is indeed dependent
    assert!(!separates(&g, 1, 3));
    assert!(!ci_factorization_check(&p, 1, 3).unwrap());
}

#[test]
fn density_integrates_to_one_in_three_dimensions() {
    let p = chain3([2.0, -1.0, 0.5]);
    let m = mean_vector(&p);
    let c = covariance_matrix(&p);
    let rules: Vec<_> = (0..3)
        .map(|i| {
            let h = 9.0 * c[(i, i)].sqrt();
            gauss_legendre_on(80, m[i] - h, m[i] + h)
        })
        .collect();
    let mut mass = 0.0;
    for (a, wa) in rules[0].0.iter().zip(&rules[0].1) {
        for (b, wb) in rules[1].0.iter().zip(&rules[1].1) {
            for (c3, wc) in rules[2].0.iter().zip(&rules[2].1) {
                mass += wa * wb * wc * sgdg_log_density(&p, &[*a, *b, *c3]).exp();
            }
        }
    }
    assert!((mass - 1.0).abs() < 1e-6, "{mass}");
}
