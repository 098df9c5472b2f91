//! Effective sample size and Monte Carlo standard errors for scalar chains.

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
    (m, v)
}

fn autocov(x: &[f64], m: f64, lag: usize) -> f64 {
    let n = x.len();
    (0..n - lag)
        .map(|t| (x[t] - m) * (x[t + lag] - m))
        .sum::<f64>()
        / n as f64
}

/// Geyer's initial monotone sequence estimator. A constant chain returns its length.
pub fn effective_sample_size(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 4 {
        return n as f64;
    }
    let (m, v) = mean_var(x);
    if !(v > 0.0) {
        return n as f64;
    }
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut lag = 0;
    while lag + 1 < n {
        let g = autocov(x, m, lag) + autocov(x, m, lag + 1);
        if g <= 0.0 {
            break;
        }
        let g = g.min(prev);
        sum += g;
        prev = g;
        lag += 2;
    }
    let tau = (2.0 * sum / v - 1.0).max(1e-12);
    // antithetic chains can exceed n; cap as Stan does
    (n as f64 / tau).min(n as f64 * (n as f64).log10().max(1.0))
}

/// Standard error of the mean from non-overlapping batch means (√n batches).
pub fn batch_means_se(x: &[f64]) -> f64 {
    let n = x.len();
    let b = (n as f64).sqrt().floor().max(1.0) as usize;
    let size = n / b;
    if size == 0 || b < 2 {
        return f64::NAN;
    }
    let means: Vec<f64> = (0..b)
        .map(|i| x[i * size..(i + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let (_, v) = mean_var(&means);
    (v * b as f64 / (b - 1) as f64 / b as f64).sqrt()
}
