//! A numerical laboratory for the spectra of high-dimensional sample
//! canonical correlations under a low-rank signal-plus-noise model.
//!
//! Squared population canonical correlations below a threshold `t_c` leave
//! no trace in the sample spectrum: the corresponding sample values stick
//! to the bulk edge `lambda_+` and fluctuate on the Tracy-Widom scale.
//! Above the threshold, each one detaches to an outlier at `g_c(t)`. This
//! crate implements the deterministic side of that picture (edges,
//! threshold, bulk density and quantiles, outlier map, asymptotic Stieltjes
//! transforms, local-law scales), seedable simulation of the model, stable
//! spectrum computation with detection and diagnostics, and a resolvent
//! laboratory verifying the exact finite-size identities behind the theory.
//!
//! The `examples/` directory has one runnable program per capability; the
//! `cancorr` binary wraps the same entry points behind subcommands.

pub mod dims;
pub mod error;
pub mod harness;
pub mod model;
pub mod numeric;
pub mod resolvent;
pub mod spectrum;
pub mod theory;

pub use dims::DimensionRatios;
pub use error::{Error, Result};
pub use theory::TheoryContext;
