use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sgdg::graph::{is_decomposable, perfect_elimination_ordering, verify_ordering};
use sgdg::inference::{
    run_chain, summarize, write_summary_csv, ChainConfig, ParamSummary, PriorRegime, PriorSpec,
    Trace,
};
use sgdg::{EliminationOrdering, Graph};

use super::plots::{fitted_density_csv, histogram_csv};
use crate::error::CliError;
use crate::io::{ensure_dir, read_dataset, read_graph, write_text, Dataset, GraphSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PriorKind {
    /// Independent normal / gamma / normal priors (proper)
    Proper,
    /// Pattern-Wishart prior on (L, ω²) with flat μ
    Wishart,
    /// π(μ, L, ω²) ∝ Π 1/ω²
    Noninfo,
}

#[derive(Debug, Clone)]
pub struct FitConfig {
    pub data: PathBuf,
    pub graph: PathBuf,
    pub prior: PriorKind,
    pub hyper: Vec<(String, String)>,
    pub iters: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub fix_delta_zero: bool,
    pub reorder: bool,
    pub bins: usize,
    pub out: PathBuf,
}

fn parse_num(key: &str, v: &str) -> Result<f64, CliError> {
    v.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| {
            CliError::InvalidConfig(format!("--hyper {key}: '{v}' is not a finite number"))
        })
}

/// A scalar (broadcast to all `k` vertices) or a comma-separated list of `k` values.
fn parse_vec(key: &str, v: &str, k: usize) -> Result<Vec<f64>, CliError> {
    let parts: Vec<f64> = v
        .split(',')
        .map(|p| parse_num(key, p))
        .collect::<Result<_, _>>()?;
    match parts.len() {
        1 => Ok(vec![parts[0]; k]),
        n if n == k => Ok(parts),
        n => Err(CliError::InvalidConfig(format!(
            "--hyper {key}: {n} values given, expected 1 or {k}"
        ))),
    }
}

/// Builds the prior from its regime and `key=value` overrides.
///
/// Keys: `b1` for every regime; `mu0`, `b2`..`b5` for `proper`; `psi`
/// (degrees of freedom) and `psi_scale` (Ψ = psi_scale·I) for `wishart`.
/// Pattern-Wishart defaults are ψ_i = |N(i)| + 2 and Ψ = I.
pub fn build_prior(
    kind: PriorKind,
    hyper: &[(String, String)],
    g: &Graph,
) -> Result<PriorSpec<f64>, CliError> {
    let k = g.k();
    let mut prior = match kind {
        PriorKind::Proper => PriorSpec::independent_proper(k),
        PriorKind::Noninfo => PriorSpec::noninformative(),
        PriorKind::Wishart => {
            let nb = g.forward_neighbors();
            PriorSpec::pattern_wishart(
                sgdg::linalg::Matrix::identity(k),
                (0..k).map(|i| nb.size(i) as f64 + 2.0).collect(),
            )
        }
    };
    for (key, v) in hyper {
        let unknown = || {
            CliError::InvalidConfig(format!(
                "--hyper {key} does not apply to the {} prior",
                prior_name(kind)
            ))
        };
        if key == "b1" {
            prior.b1 = parse_num(key, v)?;
            continue;
        }
        match &mut prior.regime {
            PriorRegime::IndependentProper {
                mu0,
                b2,
                b3,
                b4,
                b5,
            } => match key.as_str() {
                "mu0" => *mu0 = parse_vec(key, v, k)?,
                "b2" => *b2 = parse_num(key, v)?,
                "b3" => *b3 = parse_num(key, v)?,
                "b4" => *b4 = parse_num(key, v)?,
                "b5" => *b5 = parse_num(key, v)?,
                _ => return Err(unknown()),
            },
            PriorRegime::PatternWishart { psi_matrix, psi } => match key.as_str() {
                "psi" => *psi = parse_vec(key, v, k)?,
                "psi_scale" => {
                    *psi_matrix = sgdg::linalg::Matrix::identity(k).scale(parse_num(key, v)?)
                }
                _ => return Err(unknown()),
            },
            PriorRegime::Noninformative => return Err(unknown()),
        }
    }
    prior.validate(k)?;
    Ok(prior)
}

fn prior_name(kind: PriorKind) -> &'static str {
    match kind {
        PriorKind::Proper => "proper",
        PriorKind::Wishart => "wishart",
        PriorKind::Noninfo => "noninfo",
    }
}

/// Lines the data columns up with the graph vertices: by name when the graph
/// carries labels that all appear in the header, otherwise by position.
fn align_columns(data: Dataset, spec: &GraphSpec) -> Result<Dataset, CliError> {
    let k = spec.graph.k();
    if let Some(labels) = &spec.labels {
        let idx: Option<Vec<usize>> = labels
            .iter()
            .map(|l| data.columns.iter().position(|c| c == l))
            .collect();
        if let Some(idx) = idx {
            return Ok(data.permute_columns(&idx));
        }
    }
    if data.k() != k {
        return Err(CliError::Data(format!(
            "data has {} columns but the graph has {k} vertices",
            data.k()
        )));
    }
    Ok(data)
}

pub struct FitOutput {
    pub trace: Trace<f64>,
    pub summary: Vec<ParamSummary>,
    pub columns: Vec<String>,
}

pub fn fit(cfg: &FitConfig) -> Result<FitOutput, CliError> {
    let spec = read_graph(&cfg.graph)?;
    let data = align_columns(read_dataset(&cfg.data)?, &spec)?;
    let mut g = spec.graph.clone();
    let mut data = data;
    if !is_decomposable(&g) {
        return Err(sgdg::inference::InferenceError::NotDecomposable.into());
    }
    if !verify_ordering(&g, &EliminationOrdering::identity(g.k())) {
        if !cfg.reorder {
            return Err(sgdg::inference::InferenceError::NotPerfectOrdering.into());
        }
        let ord = perfect_elimination_ordering(&g)?;
        g = g.relabel(&ord)?;
        data = data.permute_columns(ord.perm());
    }
    if cfg.bins == 0 {
        return Err(CliError::InvalidConfig("--bins must be at least 1".into()));
    }
    let prior = build_prior(cfg.prior, &cfg.hyper, &g)?;
    let chain = ChainConfig {
        iters: cfg.iters,
        burn_in: cfg.burn_in,
        thin: cfg.thin,
        seed: cfg.seed,
        fix_delta_zero: cfg.fix_delta_zero,
    };
    let mut trace = run_chain(&data.data, &g, &prior, &chain)?;
    trace.meta.data_digest = Some(data.digest.clone());
    trace.meta.columns = Some(data.columns.clone());
    let summary = summarize(&trace)?;

    let dir = ensure_dir(&cfg.out)?;
    let path = dir.join("trace.ndjson");
    let f = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    trace.write_ndjson(BufWriter::new(f))?;
    let path = dir.join("summary.csv");
    let f = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    write_summary_csv(&summary, BufWriter::new(f)).map_err(|e| CliError::io(&path, e))?;
    write_text(&dir.join("histogram.csv"), &histogram_csv(&data, cfg.bins))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_f17d);
    write_text(
        &dir.join("fitted_density.csv"),
        &fitted_density_csv(&trace, &data, &mut rng),
    )?;

    Ok(FitOutput {
        trace,
        summary,
        columns: data.columns,
    })
}

pub fn render(out: &FitOutput) -> String {
    let mut s = String::new();
    let m = &out.trace.meta;
    let _ =
        writeln!(
        s,
        "{} model, {} prior, n = {}, k = {}, {} draws kept ({} iterations, burn-in {}, thin {})",
        if m.fix_delta_zero { "Gaussian graphical" } else { "skew Gaussian graphical" },
        m.prior.name(),
        m.n,
        m.k,
        out.trace.len(),
        m.iters,
        m.burn_in,
        m.thin
    );
    let _ = writeln!(s, "variables: {}", out.columns.join(", "));
    let _ = writeln!(
        s,
        "{:<12}{:>12}{:>12}{:>12}{:>12}{:>10}",
        "parameter", "mean", "sd", "2.5%", "97.5%", "ess"
    );
    for r in &out.summary {
        let _ = writeln!(
            s,
            "{:<12}{:>12.4}{:>12.4}{:>12.4}{:>12.4}{:>10.0}",
            r.name, r.mean, r.sd, r.q025, r.q975, r.ess
        );
    }
    s
}
