//! Batch verification of the exact finite-size identities over random
//! instances, with a serializable report.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dims::DimensionRatios;
use crate::error::Result;
use crate::model::{
    generate_dataset, make_spike_model, AlignmentSpec, CovarianceSpec, DistributionTriple,
};
use crate::theory::TheoryContext;

use super::build_linearized;
use super::snapshot::{identity_residuals, resolvent_snapshot};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityInstanceReport {
    pub p: usize,
    pub q: usize,
    pub n: usize,
    pub seed: u64,
    pub z_re: f64,
    pub z_im: f64,
    pub residuals: Vec<ResidualEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentitySuiteReport {
    pub instances: Vec<IdentityInstanceReport>,
    pub all_pass: bool,
}

const TRACE_TOL: f64 = 1e-9;
const BLOCK_TOL: f64 = 1e-9;
const AUX_TOL: f64 = 1e-8;

/// Runs the identity suite on `count` random gaussian instances with
/// `p, q <= 30` and `n <= 100`, alternating complex parameters and real
/// parameters above the bulk.
pub fn run_identity_suite(count: usize, master_seed: u64) -> Result<IdentitySuiteReport> {
    let mut instances = Vec::with_capacity(count);
    let mut all_pass = true;
    for k in 0..count {
        let p = 10 + (k * 7) % 21; // 10..30
        let q = 6 + (k * 5) % (p - 5).min(25); // 6..min(p, 30)
        let n = (3 * (p + q)).min(100).max(p + q + 10);
        let dims = DimensionRatios::with_margin(p, q, n, 1e-3)?;
        let ctx = TheoryContext::new(dims);
        let model = make_spike_model(&[], &[], AlignmentSpec::Identity, &dims, &ctx, 0.05)?;
        let seed = master_seed.wrapping_add(k as u64);
        let bundle = generate_dataset(
            &dims,
            &model,
            &DistributionTriple::gaussian(),
            CovarianceSpec::Identity,
            CovarianceSpec::Identity,
            seed,
            0,
        )?;
        let z = if k % 2 == 0 {
            Complex64::new(
                0.15 + 0.6 * (k as f64 / count.max(1) as f64),
                0.02 + 0.3 * ((k % 5) as f64 / 5.0),
            )
        } else {
            // real parameter strictly above every eigenvalue of the
            // instance (at these sizes the top eigenvalue can sit well
            // above the limiting edge)
            let spec = crate::spectrum::scc_spectrum(
                &bundle.x,
                &bundle.y,
                &dims,
                crate::spectrum::Provenance::Null,
            )?;
            let top = spec.edge().max(ctx.lambda_plus());
            Complex64::new(
                top + (1.0 - top) * (0.25 + 0.5 * ((k % 7) as f64 / 7.0)),
                0.0,
            )
        };
        let sys = build_linearized(&bundle.x, &bundle.y, &dims, z)?;
        let snap = resolvent_snapshot(&sys)?;
        let res = identity_residuals(&sys, &snap)?;
        let entries = vec![
            ("inverse-defect", res.inverse_defect, AUX_TOL),
            ("m3-partial-trace", res.m3_vs_m, TRACE_TOL),
            ("m4-partial-trace", res.m4_vs_m, TRACE_TOL),
            ("m3-m4-difference", res.m34_difference, TRACE_TOL),
            ("trace-shift", res.trace_shift, TRACE_TOL),
            ("left-block-schur", res.left_block, BLOCK_TOL),
            ("right-block-propagation", res.right_block, BLOCK_TOL),
            ("corner-block-propagation", res.corner_block, BLOCK_TOL),
            ("spectral-assembly", res.spectral_assembly, AUX_TOL),
        ];
        let residuals: Vec<ResidualEntry> = entries
            .into_iter()
            .map(|(name, residual, tolerance)| {
                let pass = residual <= tolerance;
                all_pass &= pass;
                ResidualEntry {
                    name: name.to_string(),
                    residual,
                    tolerance,
                    pass,
                }
            })
            .collect();
        instances.push(IdentityInstanceReport {
            p,
            q,
            n,
            seed,
            z_re: z.re,
            z_im: z.im,
            residuals,
        });
    }
    Ok(IdentitySuiteReport {
        instances,
        all_pass,
    })
}
