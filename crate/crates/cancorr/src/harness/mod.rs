//! Configuration-driven experiment front end: theory queries, single
//! simulations, Monte Carlo campaigns, the identity lab, and detection on
//! external data, with deterministic persisted reports.

mod campaign;
mod detect;
mod report;

pub use campaign::{
    run_campaign, run_simulation, CampaignSummary, DetectRecord, EigenRow, FailedReplicate,
    McReport, SimulationReport, SweepPoint,
};
pub use detect::{detect_from_csv, DetectReport, EnvelopeEntry};
pub use report::{config_hash, write_records_csv, write_summary_json};

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dims::DimensionRatios;
use crate::error::{Error, Result};
use crate::model::{
    default_spike_margin, make_spike_model, AlignmentSpec, DistributionTriple, EntryDistribution,
    SpikeModel,
};
use crate::theory::{classical_locations, phi_support, psi_support, TheoryContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CampaignKind {
    TransitionSweep,
    TwEdge,
    Rigidity,
    Sticking,
    Identities,
    Detect,
}

impl std::fmt::Display for CampaignKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CampaignKind::TransitionSweep => "transition-sweep",
            CampaignKind::TwEdge => "tw-edge",
            CampaignKind::Rigidity => "rigidity",
            CampaignKind::Sticking => "sticking",
            CampaignKind::Identities => "identities",
            CampaignKind::Detect => "detect",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DimsConfig {
    pub p: usize,
    pub q: usize,
    pub n: usize,
    #[serde(default)]
    pub tau: Option<f64>,
}

impl DimsConfig {
    pub fn resolve(&self) -> Result<DimensionRatios> {
        match self.tau {
            Some(tau) => DimensionRatios::with_margin(self.p, self.q, self.n, tau),
            None => DimensionRatios::new(self.p, self.q, self.n),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum AlignmentConfig {
    Identity,
    Random { seed: u64 },
    Explicit { rows: Vec<Vec<f64>> },
}

impl AlignmentConfig {
    fn resolve(&self) -> Result<AlignmentSpec> {
        Ok(match self {
            AlignmentConfig::Identity => AlignmentSpec::Identity,
            AlignmentConfig::Random { seed } => AlignmentSpec::RandomOrthogonal { seed: *seed },
            AlignmentConfig::Explicit { rows } => {
                let r = rows.len();
                if rows.iter().any(|row| row.len() != r) {
                    return Err(Error::Constraint(
                        "explicit alignment must be square".into(),
                    ));
                }
                AlignmentSpec::Explicit(faer::Mat::<f64>::from_fn(r, r, |i, j| rows[i][j]))
            }
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpikeConfig {
    #[serde(default)]
    pub a_values: Vec<f64>,
    #[serde(default)]
    pub b_values: Vec<f64>,
    #[serde(default = "default_alignment")]
    pub alignment: AlignmentConfig,
}

fn default_alignment() -> AlignmentConfig {
    AlignmentConfig::Identity
}

impl Default for SpikeConfig {
    fn default() -> Self {
        Self {
            a_values: Vec::new(),
            b_values: Vec::new(),
            alignment: default_alignment(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DistributionsConfig {
    #[serde(default = "default_dist")]
    pub x: EntryDistribution,
    #[serde(default = "default_dist")]
    pub y: EntryDistribution,
    #[serde(default = "default_dist")]
    pub z: EntryDistribution,
}

fn default_dist() -> EntryDistribution {
    EntryDistribution::Gaussian
}

impl Default for DistributionsConfig {
    fn default() -> Self {
        Self {
            x: default_dist(),
            y: default_dist(),
            z: default_dist(),
        }
    }
}

impl DistributionsConfig {
    pub fn triple(&self) -> DistributionTriple {
        DistributionTriple {
            x: self.x,
            y: self.y,
            z: self.z,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// Slack exponent used wherever a high-probability bound hides `n^eps`.
    #[serde(default = "default_eps_tol")]
    pub eps_tol: f64,
    /// Detection window is `lambda_+ + window_constant * n^(-2/3 + detect_epsilon)`.
    #[serde(default = "default_window_constant")]
    pub window_constant: f64,
    #[serde(default = "default_detect_epsilon")]
    pub detect_epsilon: f64,
    /// Bulk fraction `delta` for rigidity and sticking diagnostics.
    #[serde(default = "default_bulk_fraction")]
    pub bulk_fraction: f64,
    /// Instance count for the identity campaign.
    #[serde(default = "default_identity_count")]
    pub identity_count: usize,
}

fn default_eps_tol() -> f64 {
    0.1
}
// Calibrated so that, at desk scale (n = 400), the window separates the
// Tracy-Widom edge fluctuations from outliers a small distance above the
// edge; see the detection tests.
fn default_window_constant() -> f64 {
    2.0
}
fn default_detect_epsilon() -> f64 {
    0.05
}
fn default_bulk_fraction() -> f64 {
    0.1
}
fn default_identity_count() -> usize {
    20
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_tol: default_eps_tol(),
            window_constant: default_window_constant(),
            detect_epsilon: default_detect_epsilon(),
            bulk_fraction: default_bulk_fraction(),
            identity_count: default_identity_count(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GoeConfig {
    #[serde(default = "default_goe_size")]
    pub matrix_size: usize,
    #[serde(default = "default_goe_samples")]
    pub samples: usize,
}

fn default_goe_size() -> usize {
    400
}
fn default_goe_samples() -> usize {
    2000
}

impl Default for GoeConfig {
    fn default() -> Self {
        Self {
            matrix_size: default_goe_size(),
            samples: default_goe_samples(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub dims: DimsConfig,
    #[serde(default)]
    pub spike: SpikeConfig,
    #[serde(default)]
    pub distributions: DistributionsConfig,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub master_seed: u64,
    pub campaign: CampaignKind,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Target squared population correlations for the transition sweep.
    #[serde(default = "default_sweep")]
    pub sweep_t: Vec<f64>,
    #[serde(default)]
    pub goe: GoeConfig,
    /// 0 means the default thread pool.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

fn default_schema_version() -> u32 {
    1
}
fn default_replicates() -> usize {
    200
}
fn default_sweep() -> Vec<f64> {
    vec![0.15, 0.25, 0.35, 0.5, 0.7]
}

pub const SCHEMA_VERSION: u32 = 1;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Argument(format!("config parse error: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Support levels from the configured entry laws.
    pub fn support_levels(&self) -> (f64, f64) {
        let n = self.dims.n;
        let phi = phi_support(n, self.distributions.x.moment_order())
            .max(phi_support(n, self.distributions.y.moment_order()));
        let psi = psi_support(n, self.distributions.z.moment_order());
        (phi, psi)
    }

    pub fn spike_model(&self, dims: &DimensionRatios, ctx: &TheoryContext) -> Result<SpikeModel> {
        let (phi, psi) = self.support_levels();
        let margin = default_spike_margin(dims, phi, psi);
        make_spike_model(
            &self.spike.a_values,
            &self.spike.b_values,
            self.spike.alignment.resolve()?,
            dims,
            ctx,
            margin,
        )
    }
}

/// Theory constants, outlier locations, and the quantile grid for a
/// configured geometry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TheoryReport {
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub t_threshold: f64,
    pub c_tw: f64,
    pub phi_n: f64,
    pub psi_n: f64,
    pub t_values: Vec<f64>,
    pub deltas: Vec<f64>,
    pub alpha_plus: f64,
    pub r_plus: usize,
    /// `g_c(t_i)` for each supercritical spike, descending.
    pub outliers: Vec<f64>,
    /// `gamma_1 .. gamma_q`.
    pub gamma_grid: Vec<f64>,
}

pub fn run_theory(config: &ExperimentConfig) -> Result<TheoryReport> {
    let dims = config.dims.resolve()?;
    let ctx = TheoryContext::new(dims);
    let spikes = config.spike_model(&dims, &ctx)?;
    let (phi_n, psi_n) = config.support_levels();
    let class = spikes.classification().expect("classified by construction");
    let mut outliers = Vec::new();
    for &t in spikes.t_values() {
        if t > ctx.t_threshold() {
            outliers.push(ctx.gc(t)?);
        }
    }
    let gamma_grid = classical_locations(&ctx, dims.q())?;
    Ok(TheoryReport {
        lambda_minus: ctx.lambda_minus(),
        lambda_plus: ctx.lambda_plus(),
        t_threshold: ctx.t_threshold(),
        c_tw: ctx.c_tw(),
        phi_n,
        psi_n,
        t_values: spikes.t_values().to_vec(),
        deltas: class.deltas.clone(),
        alpha_plus: class.alpha_plus,
        r_plus: class.r_plus,
        outliers,
        gamma_grid,
    })
}
