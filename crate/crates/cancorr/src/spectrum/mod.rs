//! Sample squared canonical correlation spectra and their diagnostics:
//! stable computation through orthonormal row bases, interlacing and
//! rigidity/sticking checks, spike detection, and the GOE edge reference.

mod detect;
mod diagnostics;
mod goe;
mod ks;

pub use detect::{detect_spikes, SpikeEstimate};
pub use diagnostics::{
    interlacing_band_check, interlacing_check, rigidity_diagnostic, sticking_diagnostic,
    InterlacingReport,
};
pub use goe::goe_edge_samples;
pub use ks::ks_statistic;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::dims::DimensionRatios;
use crate::error::{Error, Result};

/// Which model a spectrum was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Both sides carry the signal.
    Perturbed,
    /// Pure noise on both sides.
    Null,
    /// Signal on the second side only.
    OneSide,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Provenance::Perturbed => "perturbed",
            Provenance::Null => "null",
            Provenance::OneSide => "one-side",
        };
        f.write_str(s)
    }
}

/// Descending squared sample canonical correlation coefficients in `[0, 1]`,
/// of length `q = min(p, q)`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    values: Vec<f64>,
    dims: DimensionRatios,
    provenance: Provenance,
}

impl Spectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dims(&self) -> &DimensionRatios {
        &self.dims
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest value.
    pub fn edge(&self) -> f64 {
        self.values[0]
    }

    /// `values[i]` under the interlacing convention: 1 left of the spectrum,
    /// 0 right of it (`i` is 0-based and may be negative or past the end).
    pub fn value_extended(&self, i: isize) -> f64 {
        if i < 0 {
            1.0
        } else if i as usize >= self.values.len() {
            0.0
        } else {
            self.values[i as usize]
        }
    }

    /// Test-support constructor for synthetic spectra; values are sorted
    /// descending and must already lie in `[0, 1]`.
    pub fn from_values(
        values: Vec<f64>,
        dims: DimensionRatios,
        provenance: Provenance,
    ) -> Result<Self> {
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Argument("spectrum values must lie in [0, 1]".into()));
        }
        let mut values = values;
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self {
            values,
            dims,
            provenance,
        })
    }
}

const BOUNDARY_CLAMP: f64 = 1e-12;

fn orthonormal_rowspace_basis(m: &Mat<f64>, name: &str) -> Result<Mat<f64>> {
    let (rows, n) = (m.nrows(), m.ncols());
    let qr = m.transpose().to_owned().qr();
    let q = qr.compute_thin_Q();
    let r = qr.thin_R();
    let mut max_diag = 0.0f64;
    let mut min_diag = f64::INFINITY;
    for i in 0..rows {
        let d = r[(i, i)].abs();
        max_diag = max_diag.max(d);
        min_diag = min_diag.min(d);
    }
    let tol = (n.max(rows) as f64) * f64::EPSILON * max_diag * 16.0;
    if !(min_diag > tol) {
        return Err(Error::RankDeficient(format!(
            "{name} is numerically row-rank deficient (|R_ii| range {min_diag:.3e}..{max_diag:.3e})"
        )));
    }
    Ok(q)
}

/// Squared singular values of `Q_x^T Q_y` where `Q_x`, `Q_y` are orthonormal
/// bases of the row spaces of the two data matrices (thin QR of the
/// transposes). Avoids forming or inverting any sample covariance.
pub fn scc_spectrum(
    xd: &Mat<f64>,
    yd: &Mat<f64>,
    dims: &DimensionRatios,
    provenance: Provenance,
) -> Result<Spectrum> {
    let (p, q, n) = (dims.p(), dims.q(), dims.n());
    crate::numeric::deterministic_kernels();
    if xd.nrows() != p || xd.ncols() != n {
        return Err(Error::Argument(format!(
            "first matrix is {} x {}, expected {p} x {n}",
            xd.nrows(),
            xd.ncols()
        )));
    }
    if yd.nrows() != q || yd.ncols() != n {
        return Err(Error::Argument(format!(
            "second matrix is {} x {}, expected {q} x {n}",
            yd.nrows(),
            yd.ncols()
        )));
    }
    let qx = orthonormal_rowspace_basis(xd, "first matrix")?;
    let qy = orthonormal_rowspace_basis(yd, "second matrix")?;
    let overlap = qx.transpose() * &qy;
    let svd = overlap
        .thin_svd()
        .map_err(|e| Error::RankDeficient(format!("svd of the basis overlap failed: {e:?}")))?;
    let s = svd.S();
    let count = p.min(q);
    let mut values = Vec::with_capacity(count);
    for i in 0..count {
        let sq = s[i] * s[i];
        let clamped = if sq > 1.0 && sq <= 1.0 + BOUNDARY_CLAMP {
            1.0
        } else if sq < 0.0 && sq >= -BOUNDARY_CLAMP {
            0.0
        } else {
            sq
        };
        if !(0.0..=1.0).contains(&clamped) {
            return Err(Error::RankDeficient(format!(
                "squared correlation {sq} escaped [0, 1] beyond the clamp width"
            )));
        }
        values.push(clamped);
    }
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(Spectrum {
        values,
        dims: *dims,
        provenance,
    })
}

/// Convenience wrappers for the three spectra of one generated bundle.
pub fn bundle_spectra(bundle: &crate::model::DatasetBundle) -> Result<(Spectrum, Spectrum)> {
    let perturbed = scc_spectrum(
        &bundle.x_tilde,
        &bundle.y_tilde,
        &bundle.dims,
        Provenance::Perturbed,
    )?;
    let null = scc_spectrum(&bundle.x, &bundle.y, &bundle.dims, Provenance::Null)?;
    Ok((perturbed, null))
}

/// Spectrum of the half-perturbed pair `(X, Y~)`.
pub fn one_side_spectrum(bundle: &crate::model::DatasetBundle) -> Result<Spectrum> {
    scc_spectrum(
        &bundle.x,
        &bundle.y_tilde,
        &bundle.dims,
        Provenance::OneSide,
    )
}
