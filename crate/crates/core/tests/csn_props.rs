mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sgdg::csn::{
    csn_conditional, csn_log_density, csn_log_kernel, sample_csn, sample_truncated_normal,
    std_normal_cdf, std_normal_pdf, CsnParams,
};
use sgdg::graph::Graph;
use sgdg::linalg::{CholFactor, Matrix, UnitUpper};
use sgdg::quadrature::gauss_legendre_on;
use sgdg::sgdg::SgdgParams;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use common::{ks_distance, mean_and_se};

fn skew_normal(alpha: f64) -> CsnParams<f64> {
    CsnParams::new(
        vec![0.0],
        Matrix::identity(1),
        Matrix::from_rows(&[vec![alpha]]),
        vec![0.0],
        Matrix::identity(1),
    )
    .unwrap()
}

fn sgdg2(alpha: f64, l12: f64) -> SgdgParams<f64> {
    let g = Graph::complete(2).unwrap();
    let mut l = UnitUpper::on_graph(&g);
    l.set(0, 1, l12).unwrap();
    SgdgParams::new(
        vec![0.5, -0.5],
        CholFactor::new(l, vec![1.0, 2.0]).unwrap(),
        vec![alpha, -alpha],
        g,
    )
    .unwrap()
}

fn integrate_1d(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (x, w) = gauss_legendre_on(400, a, b);
    x.iter().zip(&w).map(|(&t, &v)| v * f(t)).sum()
}

#[test]
fn skew_normal_normalises_and_matches_oracle() {
    let p = skew_normal(2.0);
    let mass = integrate_1d(|y| csn_log_density(&p, &[y]).unwrap().exp(), -12.0, 12.0);
    assert!((mass - 1.0).abs() < 1e-10, "{mass}");
    // independent oracle: 2 φ(y) Φ(2y), normalised by the same rule
    let z = integrate_1d(
        |y| 2.0 * std_normal_pdf(y) * std_normal_cdf(2.0 * y),
        -12.0,
        12.0,
    );
    for y in [-2.0, 0.3, 1.7] {
        let want = 2.0 * std_normal_pdf(y) * std_normal_cdf(2.0 * y) / z;
        assert!((csn_log_density(&p, &[y]).unwrap().exp() - want).abs() < 1e-12);
    }
}

#[test]
fn two_dimensional_normalisation() {
    let c = sgdg2(1.5, -0.7).to_csn().unwrap();
    let (x, w) = gauss_legendre_on(200, -10.0, 10.0);
    let mut mass = 0.0;
    for (a, wa) in x.iter().zip(&w) {
        for (b, wb) in x.iter().zip(&w) {
            mass += wa * wb * csn_log_density(&c, &[*a, *b]).unwrap().exp();
        }
    }
    assert!((mass - 1.0).abs() < 1e-6, "{mass}");
}

#[test]
fn conditional_matches_joint_over_marginal() {
    let c = sgdg2(2.0, -0.6).to_csn().unwrap();
    for y1 in [-1.0, 0.2, 1.5] {
        let cond = csn_conditional(&c, 1, &[y1]).unwrap();
        // the conditional's selection covariance is not diagonal: normalise its kernel numerically
        let z = integrate_1d(
            |y2| csn_log_kernel(&cond, &[y2]).unwrap().exp(),
            -15.0,
            15.0,
        );
        let marginal = integrate_1d(
            |y2| csn_log_density(&c, &[y1, y2]).unwrap().exp(),
            -15.0,
            15.0,
        );
        for y2 in [-2.0, -0.4, 0.9, 2.5] {
            let lhs = csn_log_kernel(&cond, &[y2]).unwrap().exp() / z;
            let rhs = csn_log_density(&c, &[y1, y2]).unwrap().exp() / marginal;
            assert!(
                (lhs / rhs - 1.0).abs() < 1e-8,
                "y1={y1} y2={y2}: {lhs} vs {rhs}"
            );
        }
    }
}

#[test]
fn conditional_of_independent_blocks() {
    // Σ block diagonal and Γ₁ = 0: Γ* = 0, so only block 2 survives, unchanged.
    let sigma = Matrix::from_rows(&[
        vec![2.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.3],
        vec![0.0, 0.3, 1.5],
    ]);
    let gamma = Matrix::from_rows(&[vec![0.0, 1.0, -0.5]]);
    let p = CsnParams::new(
        vec![1.0, 2.0, 3.0],
        sigma,
        gamma,
        vec![0.4],
        Matrix::identity(1),
    )
    .unwrap();
    let c = csn_conditional(&p, 1, &[5.0]).unwrap();
    assert_eq!(c.mu, vec![2.0, 3.0]);
    assert_eq!(c.nu, vec![0.4]);
    assert_eq!(
        c.sigma,
        Matrix::from_rows(&[vec![1.0, 0.3], vec![0.3, 1.5]])
    );
}

#[test]
fn gaussian_conditioning_is_classical() {
    let sigma = Matrix::from_rows(&[
        vec![1.0_f64, 0.5, 0.2],
        vec![0.5, 2.0, 0.4],
        vec![0.2, 0.4, 1.0],
    ]);
    let p = CsnParams::gaussian(vec![0.0, 1.0, -1.0], sigma.clone()).unwrap();
    let c = csn_conditional(&p, 2, &[0.5, 0.0]).unwrap();
    // Σ₂₁Σ₁₁⁻¹ by hand: Σ₁₁⁻¹ = [[2,-.5],[-.5,1]]/1.75
    let (b0, b1): (f64, f64) = ((0.2 * 2.0 - 0.4 * 0.5) / 1.75, (-0.2 * 0.5 + 0.4) / 1.75);
    assert!((c.mu[0] - (-1.0 + b0 * 0.5 + b1 * (0.0 - 1.0))).abs() < 1e-14);
    assert!((c.sigma[(0, 0)] - (1.0 - b0 * 0.2 - b1 * 0.4)).abs() < 1e-14);
}

#[test]
fn gaussian_sampling_recovers_covariance() {
    let sigma = Matrix::from_rows(&[vec![2.0, 0.6], vec![0.6, 1.0]]);
    let p = CsnParams::gaussian(vec![1.0, -1.0], sigma).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let d = sample_csn(&p, &mut rng, 200_000).unwrap();
    let n = d.len() as f64;
    let m0 = d.iter().map(|v| v[0]).sum::<f64>() / n;
    let m1 = d.iter().map(|v| v[1]).sum::<f64>() / n;
    let c01 = d.iter().map(|v| (v[0] - m0) * (v[1] - m1)).sum::<f64>() / n;
    assert!((c01 - 0.6).abs() < 0.02, "{c01}");
}

#[test]
fn skew_normal_sample_mean_and_ks() {
    let p = skew_normal(2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut x: Vec<f64> = sample_csn(&p, &mut rng, 1_000_000)
        .unwrap()
        .into_iter()
        .map(|v| v[0])
        .collect();
    let (m, se) = mean_and_se(&x);
    let want = (2.0 / std::f64::consts::PI).sqrt() * 2.0 / 5f64.sqrt();
    assert!((m - want).abs() < 3.0 * se, "{m} vs {want} (se {se})");

    // CDF by quadrature on a fine table, linear interpolation between knots
    let knots: Vec<f64> = (0..=4000)
        .map(|i| -8.0 + 14.0 * i as f64 / 4000.0)
        .collect();
    let mut table = vec![0.0];
    for w in knots.windows(2) {
        let step = integrate_1d(|y| csn_log_density(&p, &[y]).unwrap().exp(), w[0], w[1]);
        table.push(table.last().unwrap() + step);
    }
    let cdf = |y: f64| {
        if y <= knots[0] {
            return 0.0;
        }
        if y >= *knots.last().unwrap() {
            return 1.0;
        }
        let h = (y - knots[0]) / (knots[1] - knots[0]);
        let i = h.floor() as usize;
        table[i] + (h - i as f64) * (table[i + 1] - table[i])
    };
    let d = ks_distance(&mut x, cdf);
    assert!(d < 0.005, "KS distance {d}");
}

#[test]
fn sgdg_histogram_chi_square() {
    // 2-D χ² test of sample_csn against the density on a 12×12 grid of cells
    let c = sgdg2(2.0, -0.6).to_csn().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let n = 200_000;
    let draws = sample_csn(&c, &mut rng, n).unwrap();
    let edges = |lo: f64, hi: f64| -> Vec<f64> {
        (0..=12).map(|i| lo + (hi - lo) * i as f64 / 12.0).collect()
    };
    let (ex, ey) = (edges(-2.5, 3.5), edges(-3.0, 2.0));
    let cell = |v: f64, e: &[f64]| e.windows(2).position(|w| v >= w[0] && v < w[1]);
    let mut counts = vec![0.0; 144];
    for d in &draws {
        if let (Some(a), Some(b)) = (cell(d[0], &ex), cell(d[1], &ey)) {
            counts[a * 12 + b] += 1.0;
        }
    }
    let mut stat = 0.0;
    let mut dof = 0usize;
    for a in 0..12 {
        for b in 0..12 {
            let (x, wx) = gauss_legendre_on(12, ex[a], ex[a + 1]);
            let (y, wy) = gauss_legendre_on(12, ey[b], ey[b + 1]);
            let mut p = 0.0;
            for (xi, wi) in x.iter().zip(&wx) {
                for (yj, wj) in y.iter().zip(&wy) {
                    p += wi * wj * csn_log_density(&c, &[*xi, *yj]).unwrap().exp();
                }
            }
            let e = p * n as f64;
            if e >= 5.0 {
                stat += (counts[a * 12 + b] - e).powi(2) / e;
                dof += 1;
            }
        }
    }
    let crit = ChiSquared::new(dof as f64).unwrap().inverse_cdf(0.999);
    assert!(
        stat < crit,
        "chi2 {stat} over {dof} cells (critical {crit})"
    );
}

#[test]
fn truncated_normal_half_normal_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x: Vec<f64> = (0..1_000_000)
        .map(|_| sample_truncated_normal(0.0, 1.0, 0.0, &mut rng))
        .collect();
    let (m, se) = mean_and_se(&x);
    assert!((m - (2.0 / std::f64::consts::PI).sqrt()).abs() < 3.0 * se);
}

#[test]
fn truncated_normal_far_bound_is_untruncated() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mu, var) = (1.0, 4.0);
    let mut x: Vec<f64> = (0..1_000_000)
        .map(|_| sample_truncated_normal(mu, var, mu - 20.0, &mut rng))
        .collect();
    let d = ks_distance(&mut x, |v| std_normal_cdf((v - mu) / 2.0));
    assert!(d < 0.005, "{d}");
}

/// `E = μ + σ φ(a)/Φ(-a)` with `a = (lower - μ)/σ`.
fn mills_mean(mu: f64, var: f64, lower: f64) -> f64 {
    let sd = var.sqrt();
    let a = (lower - mu) / sd;
    mu + sd * std_normal_pdf(a) / std_normal_cdf(-a)
}

#[test]
fn truncated_normal_tail_means() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    // far tail, both sides of the sampler switch, and a scaled case
    for &(mu, var, lower) in &[
        (-8.0, 1.0, 0.0),
        (0.0, 1.0, 3.9),
        (0.0, 1.0, 4.1),
        (2.0, 0.25, 4.5),
        (-30.0, 4.0, 0.0),
    ] {
        let x: Vec<f64> = (0..1_000_000)
            .map(|_| sample_truncated_normal(mu, var, lower, &mut rng))
            .collect();
        let (m, se) = mean_and_se(&x);
        let want = mills_mean(mu, var, lower);
        assert!(
            (m - want).abs() < 3.0 * se,
            "mu={mu} var={var} lower={lower}: {m} vs {want} (se {se})"
        );
        assert!(x.iter().all(|&v| v >= lower));
    }
}
