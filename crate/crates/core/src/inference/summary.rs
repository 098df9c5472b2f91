use std::io::Write;

use serde::Serialize;

use super::diagnostics::effective_sample_size;
use super::{InferenceError, Trace};
use crate::Scalar;

/// Posterior summary for one scalar parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub q025: f64,
    pub q50: f64,
    pub q975: f64,
    pub ess: f64,
}

/// Linear interpolation between order statistics (type 7).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize_series(name: impl Into<String>, x: &[f64]) -> ParamSummary {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let sd = if x.len() > 1 {
        (x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    ParamSummary {
        name: name.into(),
        mean,
        sd,
        q025: quantile(&s, 0.025),
        q50: quantile(&s, 0.5),
        q975: quantile(&s, 0.975),
        ess: effective_sample_size(x),
    }
}

/// One row per scalar parameter: `mu[i]`, `delta[i]`, `omega2[i]`, then the
/// free entries `L[i,j]`, all 1-based.
pub fn summarize<T: Scalar>(trace: &Trace<T>) -> Result<Vec<ParamSummary>, InferenceError> {
    if trace.draws.is_empty() {
        return Err(InferenceError::EmptyTrace);
    }
    Ok(trace
        .parameter_series()
        .into_iter()
        .map(|(name, x)| summarize_series(name, &x))
        .collect())
}

pub fn write_summary_csv<W: Write>(rows: &[ParamSummary], out: W) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(out);
    writeln!(w, "parameter,mean,sd,q2.5,q50,q97.5,ess")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            csv_field(&r.name),
            r.mean,
            r.sd,
            r.q025,
            r.q50,
            r.q975,
            r.ess
        )?;
    }
    w.flush()
}

// names such as `L[1,2]` contain commas
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}
