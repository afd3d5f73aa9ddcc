//! Deterministic interlacing and the scaled rigidity/sticking diagnostics.

use crate::error::{Error, Result};

use super::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterlacingReport {
    pub pass: bool,
    /// 1-based index of the worst violation, 0 when clean.
    pub worst_index: usize,
    pub worst_violation: f64,
}

const INTERLACING_SLACK: f64 = 1e-10;

/// Band-`b` interlacing `perturbed_i in [null_{i+b}, null_{i-b}]` with the
/// convention 1 left of the spectrum, 0 right of it.
pub fn interlacing_band_check(
    perturbed: &Spectrum,
    null: &Spectrum,
    band: usize,
) -> Result<InterlacingReport> {
    if perturbed.len() != null.len() {
        return Err(Error::Argument(format!(
            "spectra have different lengths: {} vs {}",
            perturbed.len(),
            null.len()
        )));
    }
    let mut worst = 0.0f64;
    let mut worst_index = 0usize;
    for i in 0..perturbed.len() {
        let v = perturbed.values()[i];
        let upper = null.value_extended(i as isize - band as isize);
        let lower = null.value_extended(i as isize + band as isize);
        let violation = (lower - v).max(v - upper).max(0.0);
        if violation > worst {
            worst = violation;
            worst_index = i + 1;
        }
    }
    Ok(InterlacingReport {
        pass: worst <= INTERLACING_SLACK,
        worst_index: if worst > INTERLACING_SLACK {
            worst_index
        } else {
            0
        },
        worst_violation: worst,
    })
}

/// The exact finite-size interlacing for a rank-`r` perturbation of both
/// sides, `perturbed_i in [null_{i+2r}, null_{i-2r}]`. A one-sided
/// perturbation interlaces at band `r`; use [`interlacing_band_check`]
/// directly for that sharper statement.
pub fn interlacing_check(
    perturbed: &Spectrum,
    null: &Spectrum,
    r: usize,
) -> Result<InterlacingReport> {
    interlacing_band_check(perturbed, null, 2 * r)
}

/// Bulk rigidity diagnostic
/// `max_{i <= (1-delta) q} i^(1/3) n^(2/3) |lambda_i - gamma_i|`
/// against a precomputed grid of classical locations.
pub fn rigidity_diagnostic(null: &Spectrum, gammas: &[f64], delta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Argument(format!(
            "bulk fraction delta must lie in (0, 1), got {delta}"
        )));
    }
    let q = null.len();
    let upto = ((1.0 - delta) * q as f64).floor() as usize;
    if gammas.len() < upto {
        return Err(Error::Argument(format!(
            "need {upto} classical locations, got {}",
            gammas.len()
        )));
    }
    let n23 = (null.dims().n() as f64).powf(2.0 / 3.0);
    let mut worst = 0.0f64;
    for i in 0..upto {
        let scale = ((i + 1) as f64).cbrt() * n23;
        worst = worst.max(scale * (null.values()[i] - gammas[i]).abs());
    }
    Ok(worst)
}

/// Eigenvalue sticking diagnostic
/// `max_{i <= (1-delta) q} n alpha_+ |perturbed_{i + r_+} - reference_i|`.
pub fn sticking_diagnostic(
    perturbed: &Spectrum,
    reference: &Spectrum,
    r_plus: usize,
    alpha_plus: f64,
    delta: f64,
) -> Result<f64> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Argument(format!(
            "bulk fraction delta must lie in (0, 1), got {delta}"
        )));
    }
    if alpha_plus <= 0.0 {
        return Err(Error::Argument(format!(
            "sticking needs alpha_+ > 0, got {alpha_plus}"
        )));
    }
    let q = reference.len();
    if r_plus >= perturbed.len() {
        return Err(Error::Argument(format!(
            "r_+ = {r_plus} exceeds the spectrum length {}",
            perturbed.len()
        )));
    }
    let upto = (((1.0 - delta) * q as f64).floor() as usize).min(perturbed.len() - r_plus);
    let scale = reference.dims().n() as f64 * alpha_plus;
    let mut worst = 0.0f64;
    for i in 0..upto {
        worst = worst.max(scale * (perturbed.values()[i + r_plus] - reference.values()[i]).abs());
    }
    Ok(worst)
}
