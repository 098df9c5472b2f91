//! Chain output: a metadata header followed by one record per retained draw,
//! persisted as newline-delimited JSON.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{InferenceError, PriorSpec};
use crate::graph::Graph;
use crate::linalg::UnitUpper;
use crate::sgdg::ReparamParams;
use crate::Scalar;

/// Update order within a sweep.
pub const SWEEP_ORDER: [&str; 5] = ["u", "delta", "mu", "omega2", "L"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TraceMeta<T> {
    pub seed: u64,
    pub iters: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub fix_delta_zero: bool,
    pub sweep_order: Vec<String>,
    pub prior: PriorSpec<T>,
    pub graph: Graph,
    pub n: usize,
    pub k: usize,
    /// Hex digest of the data the chain was run on; filled in by callers
    /// that know the raw bytes.
    #[serde(default)]
    pub data_digest: Option<String>,
    #[serde(default)]
    pub columns: Option<Vec<String>>,
}

/// One retained state. Latent `u` is not kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Draw<T> {
    pub iter: usize,
    /// Observed-data log likelihood `Σ_j log p(x_j | θ)`.
    pub loglik: f64,
    pub mu: Vec<T>,
    pub delta: Vec<T>,
    pub omega2: Vec<T>,
    pub l: UnitUpper<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace<T> {
    pub meta: TraceMeta<T>,
    pub draws: Vec<Draw<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct Header<T> {
    meta: TraceMeta<T>,
}

impl<T: Scalar> Trace<T> {
    pub fn loglik(&self) -> Vec<f64> {
        self.draws.iter().map(|d| d.loglik).collect()
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn reparam(&self, i: usize) -> ReparamParams<T> {
        let d = &self.draws[i];
        ReparamParams {
            mu: d.mu.clone(),
            delta: d.delta.clone(),
            omega2: d.omega2.clone(),
            l: d.l.project(&self.meta.graph),
            graph: self.meta.graph.clone(),
        }
    }

    /// Named scalar series, 1-based names, free `L` slots taken from the graph.
    pub fn parameter_series(&self) -> Vec<(String, Vec<f64>)> {
        let k = self.meta.k;
        let col = |f: &dyn Fn(&Draw<T>) -> T| -> Vec<f64> {
            self.draws.iter().map(|d| f(d).as_f64()).collect()
        };
        let mut out = Vec::new();
        for i in 0..k {
            out.push((format!("mu[{}]", i + 1), col(&|d| d.mu[i])));
        }
        for i in 0..k {
            out.push((format!("delta[{}]", i + 1), col(&|d| d.delta[i])));
        }
        for i in 0..k {
            out.push((format!("omega2[{}]", i + 1), col(&|d| d.omega2[i])));
        }
        let nb = self.meta.graph.forward_neighbors();
        for i in 0..k {
            for &j in nb.of(i) {
                out.push((format!("L[{},{}]", i + 1, j + 1), col(&|d| d.l.get(i, j))));
            }
        }
        out
    }

    pub fn write_ndjson<W: Write>(&self, out: W) -> Result<(), InferenceError> {
        let mut w = std::io::BufWriter::new(out);
        serde_json::to_writer(
            &mut w,
            &Header {
                meta: self.meta.clone(),
            },
        )?;
        w.write_all(b"\n")?;
        for d in &self.draws {
            serde_json::to_writer(&mut w, d)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_ndjson<R: BufRead>(input: R) -> Result<Self, InferenceError> {
        let mut lines = input.lines();
        let first = lines
            .next()
            .ok_or_else(|| InferenceError::TraceFormat("missing header record".into()))??;
        let header: Header<T> = serde_json::from_str(&first)?;
        let mut draws = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let d: Draw<T> = serde_json::from_str(&line)?;
            if d.mu.len() != header.meta.k
                || d.delta.len() != header.meta.k
                || d.omega2.len() != header.meta.k
            {
                return Err(InferenceError::TraceFormat(format!(
                    "draw at iteration {} has wrong dimension",
                    d.iter
                )));
            }
            draws.push(d);
        }
        Ok(Self {
            meta: header.meta,
            draws,
        })
    }
}
