use std::fmt::Write as _;

use rand::Rng;
use sgdg::csn::{sample_half_normal, std_normal_pdf};
use sgdg::inference::Trace;

use crate::io::Dataset;

pub const GRID_POINTS: usize = 200;
const MAX_DRAWS: usize = 200;
const LATENTS_PER_DRAW: usize = 250;

/// `variable,bin_left,bin_right,count,density`, equal-width bins over the
/// data range.
pub fn histogram_csv(data: &Dataset, bins: usize) -> String {
    let mut s = String::from("variable,bin_left,bin_right,count,density\n");
    let n = data.n();
    for (c, name) in data.columns.iter().enumerate() {
        let col: Vec<f64> = (0..n).map(|j| data.data[(j, c)]).collect();
        let (lo, hi) = range(&col);
        let width = if hi > lo {
            (hi - lo) / bins as f64
        } else {
            1.0
        };
        let mut counts = vec![0usize; bins];
        for v in &col {
            let b = (((v - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        for (b, &cnt) in counts.iter().enumerate() {
            let left = lo + b as f64 * width;
            let _ = writeln!(
                s,
                "{name},{left},{},{cnt},{}",
                left + width,
                cnt as f64 / (n as f64 * width)
            );
        }
    }
    s
}

fn range(x: &[f64]) -> (f64, f64) {
    x.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        })
}

/// Posterior predictive marginal density of each variable on a grid.
///
/// Given the latents `u`, `X` is Gaussian with mean `μ + L⁻¹(δ∘u)` and
/// covariance `L⁻¹D_ω⁻¹L⁻ᵀ`, so the marginal density is the average of
/// univariate normal densities over half-normal `u` and over thinned
/// posterior draws. This is smoother than a kernel estimate and unbiased.
pub fn fitted_density_csv<R: Rng + ?Sized>(
    trace: &Trace<f64>,
    data: &Dataset,
    rng: &mut R,
) -> String {
    let k = data.k();
    let grids: Vec<Vec<f64>> = (0..k)
        .map(|c| {
            let col: Vec<f64> = (0..data.n()).map(|j| data.data[(j, c)]).collect();
            let (lo, hi) = range(&col);
            let pad = 0.1 * (hi - lo).max(1e-8);
            (0..GRID_POINTS)
                .map(|g| lo - pad + (hi - lo + 2.0 * pad) * g as f64 / (GRID_POINTS - 1) as f64)
                .collect()
        })
        .collect();
    let mut dens = vec![vec![0.0; GRID_POINTS]; k];
    let step = trace.len().div_ceil(MAX_DRAWS).max(1);
    let mut used = 0usize;
    for d in trace.draws.iter().step_by(step) {
        // columns of L⁻¹
        let inv: Vec<Vec<f64>> = (0..k)
            .map(|r| {
                let mut e = vec![0.0; k];
                e[r] = 1.0;
                d.l.solve(&e)
            })
            .collect();
        let sd: Vec<f64> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|r| inv[r][i] * inv[r][i] / d.omega2[r])
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        for _ in 0..LATENTS_PER_DRAW {
            let u: Vec<f64> = (0..k).map(|_| sample_half_normal(rng)).collect();
            for i in 0..k {
                let m = d.mu[i] + (0..k).map(|r| inv[r][i] * d.delta[r] * u[r]).sum::<f64>();
                for (g, x) in grids[i].iter().enumerate() {
                    dens[i][g] += std_normal_pdf((x - m) / sd[i]) / sd[i];
                }
            }
        }
        used += LATENTS_PER_DRAW;
    }
    let mut s = String::from("variable,x,density\n");
    for i in 0..k {
        for (g, x) in grids[i].iter().enumerate() {
            let _ = writeln!(s, "{},{x},{}", data.columns[i], dens[i][g] / used as f64);
        }
    }
    s
}
