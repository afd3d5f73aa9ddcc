//! Spike detection on externally supplied CSV data.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dims::DimensionRatios;
use crate::error::{Error, Result};
use crate::model::read_matrix_csv;
use crate::spectrum::{detect_spikes, scc_spectrum, Provenance, SpikeEstimate};
use crate::theory::TheoryContext;

use super::ExperimentConfig;

/// Serializable deviation envelope for one detected spike, plus the shared
/// edge window for everything below the threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EnvelopeEntry {
    Outlier { t_hat: f64, radius: f64 },
    EdgeWindow { below: f64, above: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectReport {
    pub p: usize,
    pub q: usize,
    pub n: usize,
    pub lambda_plus: f64,
    pub t_threshold: f64,
    pub estimate: SpikeEstimate,
    /// One outlier envelope per detected spike plus the edge window.
    pub envelopes: Vec<EnvelopeEntry>,
}

/// Loads `(X, Y)` from CSV (rows = variables, columns = samples), checks the
/// model geometry, and runs detection with the configured window. Geometries
/// with `c1 + c2 >= 1` are refused as outside the model assumptions.
pub fn detect_from_csv(
    x_path: &Path,
    y_path: &Path,
    config: &ExperimentConfig,
) -> Result<DetectReport> {
    let x = read_matrix_csv(x_path)?;
    let y = read_matrix_csv(y_path)?;
    if x.ncols() != y.ncols() {
        return Err(Error::CsvLoad {
            path: y_path.display().to_string(),
            row: None,
            message: format!(
                "sample count mismatch: {} columns here vs {} in the first matrix",
                y.ncols(),
                x.ncols()
            ),
        });
    }
    let n = x.ncols();
    let (mut p, mut q) = (x.nrows(), y.nrows());
    let mut swapped = false;
    if q > p {
        std::mem::swap(&mut p, &mut q);
        swapped = true;
    }
    if n <= p + q {
        return Err(Error::Constraint(format!(
            "need more samples than variables: n = {n} <= p + q = {}",
            p + q
        )));
    }
    let tau = config.dims.tau.unwrap_or(crate::dims::DEFAULT_TAU);
    let dims = DimensionRatios::with_margin(p, q, n, tau)?;
    let ctx = TheoryContext::new(dims);
    let spectrum = if swapped {
        scc_spectrum(&y, &x, &dims, Provenance::Perturbed)?
    } else {
        scc_spectrum(&x, &y, &dims, Provenance::Perturbed)?
    };
    let estimate = detect_spikes(
        &spectrum,
        &ctx,
        config.tolerances.window_constant,
        config.tolerances.detect_epsilon,
    )?;
    let (phi, psi) = {
        let nf = n;
        (
            crate::theory::phi_support(nf, config.distributions.x.moment_order()),
            crate::theory::psi_support(nf, config.distributions.z.moment_order()),
        )
    };
    let nf = n as f64;
    let eps = config.tolerances.eps_tol;
    let mut envelopes: Vec<EnvelopeEntry> = estimate
        .t_hat
        .iter()
        .map(|t_hat| {
            let delta = (t_hat - ctx.t_threshold()).abs();
            EnvelopeEntry::Outlier {
                t_hat: *t_hat,
                radius: (phi + psi) * delta + nf.powf(-0.5) * delta.sqrt(),
            }
        })
        .collect();
    envelopes.push(EnvelopeEntry::EdgeWindow {
        below: nf.powf(-2.0 / 3.0 + eps),
        above: nf.powf(eps) * (phi * phi + psi * psi + nf.powf(-2.0 / 3.0)),
    });
    Ok(DetectReport {
        p,
        q,
        n,
        lambda_plus: ctx.lambda_plus(),
        t_threshold: ctx.t_threshold(),
        estimate,
        envelopes,
    })
}
