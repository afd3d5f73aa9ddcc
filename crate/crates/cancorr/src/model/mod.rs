//! Seedable construction of loading matrices, population spike sets, and
//! synthetic data for the low-rank signal-plus-noise model
//! `X~ = A Z + C1^(1/2) X`, `Y~ = B Z + C2^(1/2) Y`, plus the whitening
//! reduction and moment-truncation preprocessing.

mod csv_io;
mod dataset;
mod distribution;
mod preprocess;
mod rng;
mod spike;

pub use csv_io::{read_matrix_csv, write_matrix_csv};
pub use dataset::{generate_dataset, whiten, CovarianceSpec, DatasetBundle, DistributionTriple};
pub use distribution::EntryDistribution;
pub use preprocess::{
    approximate_isometry_check, truncate_entries, TruncationKind, TruncationReport,
};
pub use rng::{stream_rng, StreamRole};
pub use spike::{
    make_spike_model, orthonormal_columns, random_orthogonal, spike_for_target_t, AlignmentSpec,
    SpikeClassification, SpikeModel,
};

use crate::dims::DimensionRatios;

/// Default sub-threshold margin for counting detached spikes:
/// `n^(-1/3) + phi_n + psi_n`.
pub fn default_spike_margin(dims: &DimensionRatios, phi_n: f64, psi_n: f64) -> f64 {
    (dims.n() as f64).powf(-1.0 / 3.0) + phi_n + psi_n
}
