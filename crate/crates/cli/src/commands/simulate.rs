use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sgdg::linalg::UnitUpper;
use sgdg::sgdg::{reparam_inverse, sample_sgdg, ReparamParams, SgdgParams};
use sgdg::Graph;

use crate::error::CliError;
use crate::io::{ensure_dir, read_json, write_dataset, write_json, GraphSpec};

pub const CASE_A_DELTAS: [f64; 4] = [-1.0, 1.0, 2.0, 3.0];
pub const CASE_B_LS: [f64; 4] = [-1.0, -0.5, 0.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    /// Chain graph, L12 = L23 = -0.5, common skewness δ ∈ {-1, 1, 2, 3}
    A,
    /// Chain graph, δ = 2, L12 = L23 ∈ {-1, -0.5, 0.5, 1}
    B,
    /// Chain graph, δ = (3, -2, -4), L12 = -0.5, L23 = 0.5
    C,
    /// Parameters from a truth file
    Custom,
}

#[derive(Debug, Clone)]
pub struct SimulateConfig {
    pub case: Case,
    pub value: Option<f64>,
    pub truth: Option<PathBuf>,
    pub n: usize,
    pub seed: u64,
    pub out: PathBuf,
}

/// Sidecar describing how a dataset was generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub case: Case,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub n: usize,
    pub seed: u64,
    /// `(μ, δ, ω², L)` form used by the sampler.
    pub params: ReparamParams<f64>,
    /// Equivalent `(μ, κ², α, L)` form.
    pub model: SgdgParams<f64>,
}

fn chain_template(delta: [f64; 3], l12: f64, l23: f64) -> ReparamParams<f64> {
    let g = Graph::chain(3).expect("chain of three");
    let mut l = UnitUpper::on_graph(&g);
    l.set(0, 1, l12).expect("edge");
    l.set(1, 2, l23).expect("edge");
    ReparamParams {
        mu: vec![5.0; 3],
        delta: delta.to_vec(),
        omega2: vec![1.0; 3],
        l,
        graph: g,
    }
}

fn grid_value(case: &str, value: Option<f64>, grid: &[f64]) -> Result<f64, CliError> {
    let v = value.ok_or_else(|| {
        CliError::InvalidParams(format!("case {case} needs --value, one of {grid:?}"))
    })?;
    if grid.contains(&v) {
        Ok(v)
    } else {
        Err(CliError::InvalidParams(format!(
            "case {case} --value must be one of {grid:?}, got {v}; use --case custom for other settings"
        )))
    }
}

pub fn truth_params(
    case: Case,
    value: Option<f64>,
    truth: Option<&Path>,
) -> Result<ReparamParams<f64>, CliError> {
    match case {
        Case::A => {
            let d = grid_value("A", value, &CASE_A_DELTAS)?;
            Ok(chain_template([d; 3], -0.5, -0.5))
        }
        Case::B => {
            let l = grid_value("B", value, &CASE_B_LS)?;
            Ok(chain_template([2.0; 3], l, l))
        }
        Case::C => {
            if value.is_some() {
                return Err(CliError::InvalidParams("case C takes no --value".into()));
            }
            Ok(chain_template([3.0, -2.0, -4.0], -0.5, 0.5))
        }
        Case::Custom => {
            let path =
                truth.ok_or_else(|| CliError::InvalidParams("case custom needs --truth".into()))?;
            read_json(path)
        }
    }
}

pub struct SimulateOutput {
    pub data: PathBuf,
    pub truth: PathBuf,
    pub graph: PathBuf,
}

pub fn simulate(cfg: &SimulateConfig) -> Result<SimulateOutput, CliError> {
    if cfg.n == 0 {
        return Err(CliError::InvalidParams("--n must be at least 1".into()));
    }
    let params = truth_params(cfg.case, cfg.value, cfg.truth.as_deref())?;
    let model = reparam_inverse(&params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let rows = sample_sgdg(&model, &mut rng, cfg.n);

    let dir = ensure_dir(&cfg.out)?;
    let out = SimulateOutput {
        data: dir.join("data.csv"),
        truth: dir.join("truth.json"),
        graph: dir.join("graph.json"),
    };
    let columns: Vec<String> = (1..=params.mu.len()).map(|i| format!("X{i}")).collect();
    write_dataset(&out.data, &columns, &rows)?;
    write_json(
        &out.graph,
        &GraphSpec {
            graph: params.graph.clone(),
            labels: Some(columns),
        },
    )?;
    write_json(
        &out.truth,
        &TruthRecord {
            case: cfg.case,
            value: cfg.value,
            n: cfg.n,
            seed: cfg.seed,
            params,
            model,
        },
    )?;
    Ok(out)
}
