use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sgdg::evidence::{bayes_factor, EvidenceEstimate};
use sgdg::inference::Trace;

use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct CompareConfig {
    pub a: PathBuf,
    pub b: PathBuf,
    pub mix_weight: f64,
    pub tol: f64,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelEvidence {
    pub model: &'static str,
    pub prior: &'static str,
    pub draws: usize,
    pub estimate: EvidenceEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub a: ModelEvidence,
    pub b: ModelEvidence,
    /// Natural log of the Bayes factor of A against B.
    pub log_bf: f64,
    pub log10_bf: f64,
    /// Jeffreys' evidence category.
    pub strength: &'static str,
    pub favours: &'static str,
    pub data_digest: Option<String>,
}

pub fn read_trace(path: &Path) -> Result<Trace<f64>, CliError> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    Trace::read_ndjson(BufReader::new(f)).map_err(|e| CliError::parse(path, e))
}

fn jeffreys(log10_bf: f64) -> &'static str {
    match log10_bf.abs() {
        x if x < 0.5 => "barely worth mentioning",
        x if x < 1.0 => "substantial",
        x if x < 1.5 => "strong",
        x if x < 2.0 => "very strong",
        _ => "decisive",
    }
}

fn model_name(t: &Trace<f64>) -> &'static str {
    if t.meta.fix_delta_zero {
        "gaussian"
    } else {
        "sgdg"
    }
}

pub fn compare_traces(
    a: &Trace<f64>,
    b: &Trace<f64>,
    mix_weight: f64,
    tol: f64,
) -> Result<CompareReport, CliError> {
    if a.meta.n != b.meta.n || a.meta.k != b.meta.k {
        return Err(CliError::DataMismatch(format!(
            "n x k = {} x {} vs {} x {}",
            a.meta.n, a.meta.k, b.meta.n, b.meta.k
        )));
    }
    if let (Some(da), Some(db)) = (&a.meta.data_digest, &b.meta.data_digest) {
        if da != db {
            return Err(CliError::DataMismatch(format!("digest {da} vs {db}")));
        }
    }
    let bf = bayes_factor(a, b, mix_weight, tol)?;
    let log10_bf = bf.log_bf / std::f64::consts::LN_10;
    Ok(CompareReport {
        a: ModelEvidence {
            model: model_name(a),
            prior: a.meta.prior.name(),
            draws: a.len(),
            estimate: bf.a,
        },
        b: ModelEvidence {
            model: model_name(b),
            prior: b.meta.prior.name(),
            draws: b.len(),
            estimate: bf.b,
        },
        log_bf: bf.log_bf,
        log10_bf,
        strength: jeffreys(log10_bf),
        favours: if bf.log_bf >= 0.0 { "A" } else { "B" },
        data_digest: a
            .meta
            .data_digest
            .clone()
            .or_else(|| b.meta.data_digest.clone()),
    })
}

pub fn compare(cfg: &CompareConfig) -> Result<CompareReport, CliError> {
    let a = read_trace(&cfg.a)?;
    let b = read_trace(&cfg.b)?;
    compare_traces(&a, &b, cfg.mix_weight, cfg.tol)
}

pub fn render(r: &CompareReport) -> String {
    let mut s = String::new();
    for (tag, m) in [("A", &r.a), ("B", &r.b)] {
        let _ = writeln!(
            s,
            "model {tag}: {} ({} prior), {} draws, log marginal likelihood {:.4} ({}, {} iterations)",
            m.model,
            m.prior,
            m.draws,
            m.estimate.log_marginal,
            if m.estimate.converged { "converged" } else { "not converged" },
            m.estimate.iterations
        );
    }
    let _ = writeln!(s, "log Bayes factor (A vs B): {:.4}", r.log_bf);
    let _ = writeln!(s, "log10 Bayes factor: {:.4}", r.log10_bf);
    let _ = writeln!(s, "evidence in favour of {}: {}", r.favours, r.strength);
    s
}
