//! Closed-form limiting objects for the squared sample canonical
//! correlation spectrum: support edges, transition threshold, bulk density
//! and its quantiles, the outlier map and its inverse, asymptotic Stieltjes
//! transforms, the deterministic resolvent limit, and fluctuation scales.

mod density;
mod envelopes;
mod maps;
mod transforms;

pub use density::classical_locations;
pub use envelopes::{bound_envelopes, phi_support, psi_support, DeviationBound};
pub use transforms::{AsymptoticTransforms, PiScalars, SpectralPoint};

use crate::dims::DimensionRatios;
use crate::error::{Error, Result};

/// Support edges `lambda_-, lambda_+` of the limiting squared-CCC density:
/// `(sqrt(c1 (1 - c2)) -/+ sqrt(c2 (1 - c1)))^2`.
pub fn edge_locations(dims: &DimensionRatios) -> (f64, f64) {
    let (c1, c2) = (dims.c1(), dims.c2());
    let u = (c1 * (1.0 - c2)).sqrt();
    let v = (c2 * (1.0 - c1)).sqrt();
    ((u - v) * (u - v), (u + v) * (u + v))
}

/// Critical squared population correlation `t_c = sqrt(c1 c2 / ((1-c1)(1-c2)))`:
/// spikes below it are absorbed by the bulk edge, spikes above it detach.
pub fn bbp_threshold(dims: &DimensionRatios) -> f64 {
    let (c1, c2) = (dims.c1(), dims.c2());
    (c1 * c2 / ((1.0 - c1) * (1.0 - c2))).sqrt()
}

/// Scale factor `c_TW` matching edge fluctuations to the rescaled largest
/// eigenvalue of a GOE matrix:
/// `[lambda_+^2 (1 - lambda_+)^2 / sqrt(c1 c2 (1-c1)(1-c2))]^(1/3)`.
pub fn tw_scale(dims: &DimensionRatios) -> f64 {
    let (c1, c2) = (dims.c1(), dims.c2());
    let (_, lp) = edge_locations(dims);
    let num = lp * lp * (1.0 - lp) * (1.0 - lp);
    let den = (c1 * c2 * (1.0 - c1) * (1.0 - c2)).sqrt();
    (num / den).cbrt()
}

/// Derived spectral constants for a fixed geometry, plus every callable
/// theory map evaluated against them.
#[derive(Debug, Clone, Copy)]
pub struct TheoryContext {
    dims: DimensionRatios,
    lambda_minus: f64,
    lambda_plus: f64,
    t_threshold: f64,
    c_tw: f64,
}

impl TheoryContext {
    pub fn new(dims: DimensionRatios) -> Self {
        let (lambda_minus, lambda_plus) = edge_locations(&dims);
        Self {
            dims,
            lambda_minus,
            lambda_plus,
            t_threshold: bbp_threshold(&dims),
            c_tw: tw_scale(&dims),
        }
    }

    pub fn dims(&self) -> &DimensionRatios {
        &self.dims
    }

    pub fn lambda_minus(&self) -> f64 {
        self.lambda_minus
    }

    pub fn lambda_plus(&self) -> f64 {
        self.lambda_plus
    }

    pub fn t_threshold(&self) -> f64 {
        self.t_threshold
    }

    pub fn c_tw(&self) -> f64 {
        self.c_tw
    }

    /// Distance from `e` to the nearer support edge.
    pub fn edge_distance(&self, e: f64) -> f64 {
        (e - self.lambda_minus)
            .abs()
            .min((e - self.lambda_plus).abs())
    }

    /// Classical location of the outlier for a supercritical spike,
    /// `theta = g_c(t)`; errors for `t <= t_c`.
    pub fn outlier_location(&self, t: f64) -> Result<f64> {
        if t <= self.t_threshold {
            return Err(Error::Domain(format!(
                "no outlier below the transition: t = {t} <= t_c = {}",
                self.t_threshold
            )));
        }
        self.gc(t)
    }
}
