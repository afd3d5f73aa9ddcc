//! Monte Carlo campaigns: replicate execution with isolated streams,
//! order-independent aggregation, and persisted plot-ready reports.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dims::DimensionRatios;
use crate::error::{Error, Result};
use crate::model::{generate_dataset, spike_for_target_t, CovarianceSpec, SpikeModel};
use crate::resolvent::run_identity_suite;
use crate::spectrum::{
    bundle_spectra, detect_spikes, goe_edge_samples, interlacing_check, ks_statistic,
    rigidity_diagnostic, scc_spectrum, sticking_diagnostic, Provenance, Spectrum,
};
use crate::theory::{classical_locations, TheoryContext};

use super::report::{config_hash, write_records_csv, write_summary_json};
use super::{run_theory, CampaignKind, ExperimentConfig, TheoryReport, SCHEMA_VERSION};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Campaigns tolerate up to this fraction of failed replicates.
pub const FAILURE_BUDGET: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub replicate: u64,
    pub index: usize,
    pub value: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailedReplicate {
    pub replicate: u64,
    pub message: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub t: f64,
    /// `max(lambda_+, g_c(t))`.
    pub prediction: f64,
    pub mean_top: f64,
    pub abs_deviation: f64,
    pub replicates_ok: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectRecord {
    pub replicate: u64,
    pub r_hat: usize,
    pub t_hat: Vec<f64>,
    pub edge_gap: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScaledDiagnosticSummary {
    pub values: Vec<f64>,
    pub median: f64,
    pub q90: f64,
    pub max: f64,
}

impl ScaledDiagnosticSummary {
    fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        let pick = |frac: f64| -> f64 {
            if values.is_empty() {
                f64::NAN
            } else {
                values[((values.len() - 1) as f64 * frac).round() as usize]
            }
        };
        Self {
            median: pick(0.5),
            q90: pick(0.9),
            max: values.last().copied().unwrap_or(f64::NAN),
            values,
        }
    }

    pub fn share_at_most(&self, bound: f64) -> f64 {
        if self.values.is_empty() {
            return f64::NAN;
        }
        self.values.iter().filter(|v| **v <= bound).count() as f64 / self.values.len() as f64
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CampaignSummary {
    TransitionSweep {
        points: Vec<SweepPoint>,
    },
    TwEdge {
        ks_null_vs_goe: f64,
        /// KS with the leading `r_+` outliers removed; absent for a pure
        /// null configuration.
        ks_perturbed_vs_goe: Option<f64>,
        r_plus: usize,
        goe_samples: usize,
        edge_samples: usize,
    },
    Rigidity {
        diagnostics: ScaledDiagnosticSummary,
        share_at_most_10: f64,
    },
    Sticking {
        diagnostics: ScaledDiagnosticSummary,
        alpha_plus: f64,
        r_plus: usize,
        /// Share of replicates with diagnostic at most `n^(1/4)`.
        share_within_slack: f64,
    },
    Identities(crate::resolvent::IdentitySuiteReport),
    Detect {
        records: Vec<DetectRecord>,
        expected_r_plus: usize,
        rate_exact_count: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McReport {
    pub schema_version: u32,
    pub artifact_version: String,
    pub config_hash: String,
    pub campaign: CampaignKind,
    pub replicates: usize,
    pub theory: TheoryReport,
    pub failed: Vec<FailedReplicate>,
    pub summary: CampaignSummary,
}

fn with_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        Ok(job())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Campaign(format!("thread pool: {e}")))?;
        Ok(pool.install(job))
    }
}

/// Runs replicates in parallel and returns the outcomes sorted by
/// replicate index, so every aggregation downstream is schedule-free.
fn run_replicates<T: Send>(
    replicates: usize,
    f: impl Fn(u64) -> Result<T> + Sync,
) -> Vec<(u64, std::result::Result<T, String>)> {
    let mut out: Vec<(u64, std::result::Result<T, String>)> = (0..replicates as u64)
        .into_par_iter()
        .map(|rep| (rep, f(rep).map_err(|e| e.to_string())))
        .collect();
    out.sort_by_key(|(rep, _)| *rep);
    out
}

fn top_rows(rows: &mut Vec<EigenRow>, replicate: u64, spectrum: &Spectrum, k: usize) {
    for (index, value) in spectrum.values().iter().take(k).enumerate() {
        rows.push(EigenRow {
            replicate,
            index: index + 1,
            value: *value,
            provenance: spectrum.provenance(),
        });
    }
}

struct CampaignContext {
    dims: DimensionRatios,
    ctx: TheoryContext,
    spikes: SpikeModel,
    theory: TheoryReport,
}

fn prepare(config: &ExperimentConfig) -> Result<CampaignContext> {
    let dims = config.dims.resolve()?;
    let ctx = TheoryContext::new(dims);
    let spikes = config.spike_model(&dims, &ctx)?;
    let theory = run_theory(config)?;
    Ok(CampaignContext {
        dims,
        ctx,
        spikes,
        theory,
    })
}

fn sweep_campaign(
    config: &ExperimentConfig,
    cc: &CampaignContext,
    rows: &mut Vec<EigenRow>,
    failed: &mut Vec<FailedReplicate>,
) -> Result<CampaignSummary> {
    let reps = config.replicates;
    let mut points = Vec::with_capacity(config.sweep_t.len());
    for (ti, &t) in config.sweep_t.iter().enumerate() {
        let model = spike_for_target_t(t, &cc.dims, &cc.ctx, spike_margin(config))?;
        let outcomes = run_replicates(reps, |rep| {
            let bundle = generate_dataset(
                &cc.dims,
                &model,
                &config.distributions.triple(),
                CovarianceSpec::Identity,
                CovarianceSpec::Identity,
                config.master_seed,
                global_rep(ti, reps, rep),
            )?;
            scc_spectrum(
                &bundle.x_tilde,
                &bundle.y_tilde,
                &cc.dims,
                Provenance::Perturbed,
            )
        });
        let mut tops = Vec::with_capacity(reps);
        for (rep, outcome) in outcomes {
            match outcome {
                Ok(spec) => {
                    tops.push(spec.edge());
                    top_rows(rows, global_rep(ti, reps, rep), &spec, 3);
                }
                Err(message) => failed.push(FailedReplicate {
                    replicate: global_rep(ti, reps, rep),
                    message,
                }),
            }
        }
        let prediction = if t > cc.ctx.t_threshold() {
            cc.ctx.gc(t)?.max(cc.ctx.lambda_plus())
        } else {
            cc.ctx.lambda_plus()
        };
        let mean_top = if tops.is_empty() {
            f64::NAN
        } else {
            tops.iter().sum::<f64>() / tops.len() as f64
        };
        points.push(SweepPoint {
            t,
            prediction,
            mean_top,
            abs_deviation: (mean_top - prediction).abs(),
            replicates_ok: tops.len(),
        });
    }
    Ok(CampaignSummary::TransitionSweep { points })
}

fn global_rep(t_index: usize, reps: usize, rep: u64) -> u64 {
    (t_index * reps) as u64 + rep
}

fn spike_margin(config: &ExperimentConfig) -> f64 {
    let (phi, psi) = config.support_levels();
    (config.dims.n as f64).powf(-1.0 / 3.0) + phi + psi
}

fn tw_edge_campaign(
    config: &ExperimentConfig,
    cc: &CampaignContext,
    rows: &mut Vec<EigenRow>,
    failed: &mut Vec<FailedReplicate>,
) -> Result<CampaignSummary> {
    let r_plus = cc.theory.r_plus;
    let perturbed_wanted = cc.spikes.rank() > 0;
    let n23 = (cc.dims.n() as f64).powf(2.0 / 3.0);
    let rescale = |lambda: f64| n23 * (lambda - cc.ctx.lambda_plus()) / cc.ctx.c_tw();
    let outcomes = run_replicates(config.replicates, |rep| {
        let bundle = generate_dataset(
            &cc.dims,
            &cc.spikes,
            &config.distributions.triple(),
            CovarianceSpec::Identity,
            CovarianceSpec::Identity,
            config.master_seed,
            rep,
        )?;
        let null = scc_spectrum(&bundle.x, &bundle.y, &cc.dims, Provenance::Null)?;
        let perturbed = if perturbed_wanted {
            Some(scc_spectrum(
                &bundle.x_tilde,
                &bundle.y_tilde,
                &cc.dims,
                Provenance::Perturbed,
            )?)
        } else {
            None
        };
        Ok((null, perturbed))
    });
    let mut null_edges = Vec::new();
    let mut shifted_edges = Vec::new();
    for (rep, outcome) in outcomes {
        match outcome {
            Ok((null, perturbed)) => {
                null_edges.push(rescale(null.edge()));
                top_rows(rows, rep, &null, 4);
                if let Some(p) = perturbed {
                    if r_plus < p.len() {
                        shifted_edges.push(rescale(p.values()[r_plus]));
                    }
                    top_rows(rows, rep, &p, 4);
                }
            }
            Err(message) => failed.push(FailedReplicate {
                replicate: rep,
                message,
            }),
        }
    }
    let goe = goe_edge_samples(
        config.goe.matrix_size,
        config.goe.samples,
        config.master_seed ^ 0x60e_5eed,
    )?;
    let ks_null_vs_goe = ks_statistic(&null_edges, &goe)?;
    let ks_perturbed_vs_goe = if perturbed_wanted && !shifted_edges.is_empty() {
        Some(ks_statistic(&shifted_edges, &goe)?)
    } else {
        None
    };
    Ok(CampaignSummary::TwEdge {
        ks_null_vs_goe,
        ks_perturbed_vs_goe,
        r_plus,
        goe_samples: goe.len(),
        edge_samples: null_edges.len(),
    })
}

fn rigidity_campaign(
    config: &ExperimentConfig,
    cc: &CampaignContext,
    rows: &mut Vec<EigenRow>,
    failed: &mut Vec<FailedReplicate>,
) -> Result<CampaignSummary> {
    let gammas = classical_locations(&cc.ctx, cc.dims.q())?;
    let delta = config.tolerances.bulk_fraction;
    let outcomes = run_replicates(config.replicates, |rep| {
        let bundle = generate_dataset(
            &cc.dims,
            &cc.spikes,
            &config.distributions.triple(),
            CovarianceSpec::Identity,
            CovarianceSpec::Identity,
            config.master_seed,
            rep,
        )?;
        let null = scc_spectrum(&bundle.x, &bundle.y, &cc.dims, Provenance::Null)?;
        let diag = rigidity_diagnostic(&null, &gammas, delta)?;
        Ok((null, diag))
    });
    let mut diagnostics = Vec::new();
    for (rep, outcome) in outcomes {
        match outcome {
            Ok((null, diag)) => {
                diagnostics.push(diag);
                for (index, value) in null.values().iter().enumerate() {
                    rows.push(EigenRow {
                        replicate: rep,
                        index: index + 1,
                        value: *value,
                        provenance: Provenance::Null,
                    });
                }
            }
            Err(message) => failed.push(FailedReplicate {
                replicate: rep,
                message,
            }),
        }
    }
    let summary = ScaledDiagnosticSummary::from_values(diagnostics);
    let share = summary.share_at_most(10.0);
    Ok(CampaignSummary::Rigidity {
        diagnostics: summary,
        share_at_most_10: share,
    })
}

fn sticking_campaign(
    config: &ExperimentConfig,
    cc: &CampaignContext,
    rows: &mut Vec<EigenRow>,
    failed: &mut Vec<FailedReplicate>,
) -> Result<CampaignSummary> {
    let class = cc
        .spikes
        .classification()
        .ok_or_else(|| Error::Constraint("sticking needs a classified spike model".into()))?
        .clone();
    if class.alpha_plus <= 0.0 {
        return Err(Error::Constraint(
            "sticking diagnostic needs alpha_+ > 0".into(),
        ));
    }
    let delta = config.tolerances.bulk_fraction;
    let outcomes = run_replicates(config.replicates, |rep| {
        let bundle = generate_dataset(
            &cc.dims,
            &cc.spikes,
            &config.distributions.triple(),
            CovarianceSpec::Identity,
            CovarianceSpec::Identity,
            config.master_seed,
            rep,
        )?;
        let (perturbed, null) = bundle_spectra(&bundle)?;
        let diag = sticking_diagnostic(&perturbed, &null, class.r_plus, class.alpha_plus, delta)?;
        Ok((perturbed, null, diag))
    });
    let mut diagnostics = Vec::new();
    for (rep, outcome) in outcomes {
        match outcome {
            Ok((perturbed, null, diag)) => {
                diagnostics.push(diag);
                top_rows(rows, rep, &perturbed, 8);
                top_rows(rows, rep, &null, 8);
            }
            Err(message) => failed.push(FailedReplicate {
                replicate: rep,
                message,
            }),
        }
    }
    let slack = (cc.dims.n() as f64).powf(0.25);
    let summary = ScaledDiagnosticSummary::from_values(diagnostics);
    let share = summary.share_at_most(slack);
    Ok(CampaignSummary::Sticking {
        diagnostics: summary,
        alpha_plus: class.alpha_plus,
        r_plus: class.r_plus,
        share_within_slack: share,
    })
}

fn detect_campaign(
    config: &ExperimentConfig,
    cc: &CampaignContext,
    rows: &mut Vec<EigenRow>,
    failed: &mut Vec<FailedReplicate>,
) -> Result<CampaignSummary> {
    let outcomes = run_replicates(config.replicates, |rep| {
        let bundle = generate_dataset(
            &cc.dims,
            &cc.spikes,
            &config.distributions.triple(),
            CovarianceSpec::Identity,
            CovarianceSpec::Identity,
            config.master_seed,
            rep,
        )?;
        let spectrum = scc_spectrum(
            &bundle.x_tilde,
            &bundle.y_tilde,
            &cc.dims,
            Provenance::Perturbed,
        )?;
        let estimate = detect_spikes(
            &spectrum,
            &cc.ctx,
            config.tolerances.window_constant,
            config.tolerances.detect_epsilon,
        )?;
        Ok((spectrum, estimate))
    });
    let expected = cc.theory.r_plus;
    let mut records = Vec::new();
    for (rep, outcome) in outcomes {
        match outcome {
            Ok((spectrum, estimate)) => {
                top_rows(rows, rep, &spectrum, 8);
                records.push(DetectRecord {
                    replicate: rep,
                    r_hat: estimate.r_hat,
                    t_hat: estimate.t_hat,
                    edge_gap: estimate.edge_gap,
                });
            }
            Err(message) => failed.push(FailedReplicate {
                replicate: rep,
                message,
            }),
        }
    }
    let rate_exact_count = if records.is_empty() {
        f64::NAN
    } else {
        records.iter().filter(|r| r.r_hat == expected).count() as f64 / records.len() as f64
    };
    Ok(CampaignSummary::Detect {
        records,
        expected_r_plus: expected,
        rate_exact_count,
    })
}

/// Runs the configured campaign; persists `records.csv` and `summary.json`
/// under `out_dir` when set. Deterministic for a fixed `(config,
/// master_seed)` regardless of the worker count. Fails with a campaign
/// error (after persisting) when more than [`FAILURE_BUDGET`] of the
/// replicates errored.
pub fn run_campaign(config: &ExperimentConfig) -> Result<(McReport, Vec<EigenRow>)> {
    let cc = prepare(config)?;
    let mut rows: Vec<EigenRow> = Vec::new();
    let mut failed: Vec<FailedReplicate> = Vec::new();
    let summary = with_pool(config.workers, || match config.campaign {
        CampaignKind::TransitionSweep => sweep_campaign(config, &cc, &mut rows, &mut failed),
        CampaignKind::TwEdge => tw_edge_campaign(config, &cc, &mut rows, &mut failed),
        CampaignKind::Rigidity => rigidity_campaign(config, &cc, &mut rows, &mut failed),
        CampaignKind::Sticking => sticking_campaign(config, &cc, &mut rows, &mut failed),
        CampaignKind::Identities => {
            run_identity_suite(config.tolerances.identity_count, config.master_seed)
                .map(CampaignSummary::Identities)
        }
        CampaignKind::Detect => detect_campaign(config, &cc, &mut rows, &mut failed),
    })??;
    let report = McReport {
        schema_version: SCHEMA_VERSION,
        artifact_version: ARTIFACT_VERSION.to_string(),
        config_hash: config_hash(config),
        campaign: config.campaign,
        replicates: config.replicates,
        theory: cc.theory,
        failed,
        summary,
    };
    if let Some(dir) = &config.out_dir {
        std::fs::create_dir_all(dir)?;
        write_records_csv(&dir.join("records.csv"), &rows)?;
        write_summary_json(&dir.join("summary.json"), &report)?;
    }
    let budget_denominator = effective_replicates(config);
    if budget_denominator > 0
        && report.failed.len() as f64 > FAILURE_BUDGET * budget_denominator as f64
    {
        return Err(Error::Campaign(format!(
            "{} of {budget_denominator} replicates failed (budget {FAILURE_BUDGET})",
            report.failed.len()
        )));
    }
    Ok((report, rows))
}

fn effective_replicates(config: &ExperimentConfig) -> usize {
    match config.campaign {
        CampaignKind::TransitionSweep => config.replicates * config.sweep_t.len(),
        CampaignKind::Identities => 0,
        _ => config.replicates,
    }
}

/// One fully reported replicate: both spectra, the interlacing check, and
/// spike detection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationReport {
    pub schema_version: u32,
    pub config_hash: String,
    pub replicate: u64,
    pub theory: TheoryReport,
    pub top_perturbed: Vec<f64>,
    pub top_null: Vec<f64>,
    pub interlacing_pass: bool,
    pub estimate: crate::spectrum::SpikeEstimate,
}

pub fn run_simulation(
    config: &ExperimentConfig,
    replicate: u64,
) -> Result<(SimulationReport, Vec<EigenRow>)> {
    let cc = prepare(config)?;
    let bundle = generate_dataset(
        &cc.dims,
        &cc.spikes,
        &config.distributions.triple(),
        CovarianceSpec::Identity,
        CovarianceSpec::Identity,
        config.master_seed,
        replicate,
    )?;
    let (perturbed, null) = bundle_spectra(&bundle)?;
    let inter = interlacing_check(&perturbed, &null, cc.spikes.rank())?;
    let estimate = detect_spikes(
        &perturbed,
        &cc.ctx,
        config.tolerances.window_constant,
        config.tolerances.detect_epsilon,
    )?;
    let mut rows = Vec::new();
    for (index, value) in perturbed.values().iter().enumerate() {
        rows.push(EigenRow {
            replicate,
            index: index + 1,
            value: *value,
            provenance: Provenance::Perturbed,
        });
    }
    for (index, value) in null.values().iter().enumerate() {
        rows.push(EigenRow {
            replicate,
            index: index + 1,
            value: *value,
            provenance: Provenance::Null,
        });
    }
    let report = SimulationReport {
        schema_version: SCHEMA_VERSION,
        config_hash: config_hash(config),
        replicate,
        theory: cc.theory,
        top_perturbed: perturbed.values().iter().take(8).copied().collect(),
        top_null: null.values().iter().take(8).copied().collect(),
        interlacing_pass: inter.pass,
        estimate,
    };
    if let Some(dir) = &config.out_dir {
        std::fs::create_dir_all(dir)?;
        write_records_csv(&dir.join("records.csv"), &rows)?;
        write_summary_json(&dir.join("summary.json"), &report)?;
    }
    Ok((report, rows))
}
