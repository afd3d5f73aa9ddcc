//! Rescaled largest-eigenvalue samples from the Gaussian orthogonal
//! ensemble, the reference law for edge fluctuations.

use faer::{Mat, Side};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{stream_rng, StreamRole};

/// Draws `count` independent symmetric matrices with gaussian entries of
/// mean zero and variance `1/m` (up to symmetry) and returns
/// `m^(2/3) (lambda_1 - 2)` for each.
pub fn goe_edge_samples(matrix_size: usize, count: usize, seed: u64) -> Result<Vec<f64>> {
    crate::numeric::deterministic_kernels();
    if matrix_size < 50 {
        return Err(Error::Argument(format!(
            "GOE reference needs matrix_size >= 50, got {matrix_size}"
        )));
    }
    let m = matrix_size;
    let scale = 1.0 / (m as f64).sqrt();
    let rescale = (m as f64).powf(2.0 / 3.0);
    (0..count as u64)
        .into_par_iter()
        .map(|idx| {
            let mut rng = stream_rng(seed, idx, StreamRole::Goe);
            let mut h = Mat::<f64>::zeros(m, m);
            for i in 0..m {
                for j in i..m {
                    let g: f64 = Distribution::<f64>::sample(&StandardNormal, &mut rng);
                    let v = g * scale;
                    h[(i, j)] = v;
                    h[(j, i)] = v;
                }
            }
            let evals = h
                .self_adjoint_eigenvalues(Side::Lower)
                .map_err(|e| Error::RankDeficient(format!("GOE eigensolve failed: {e:?}")))?;
            let top = evals.iter().cloned().fold(f64::MIN, f64::max);
            Ok(rescale * (top - 2.0))
        })
        .collect()
}
