//! Moment truncation of data matrices and the approximate-isometry check
//! for the signal matrix.

use faer::{Mat, Side};

use crate::error::{Error, Result};

/// Which support-level exponent the truncation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationKind {
    /// Noise-type matrix: level `n^(-1/2 + 2/a + eps)`, needs `a > 4`.
    Noise,
    /// Signal-type matrix: level `n^(-1/2 + 1/b + eps)`, needs `b > 2`.
    Signal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationReport {
    pub level: f64,
    pub truncated: usize,
    pub total: usize,
}

impl TruncationReport {
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.truncated as f64 / self.total as f64
        }
    }
}

/// Zeroes every entry with `|entry| > level` where the level is the support
/// bound `phi_n n^eps` (noise) or `psi_n n^eps` (signal) for the given
/// moment order.
pub fn truncate_entries(
    matrix: &Mat<f64>,
    n: usize,
    moment_order: f64,
    kind: TruncationKind,
    epsilon: f64,
) -> Result<(Mat<f64>, TruncationReport)> {
    let min_order = match kind {
        TruncationKind::Noise => 4.0,
        TruncationKind::Signal => 2.0,
    };
    if moment_order <= min_order {
        return Err(Error::Constraint(format!(
            "truncation needs a moment order above {min_order}, got {moment_order}"
        )));
    }
    let support_exp = match kind {
        TruncationKind::Noise => -0.5 + 2.0 / moment_order,
        TruncationKind::Signal => -0.5 + 1.0 / moment_order,
    };
    let level = (n as f64).powf(support_exp + epsilon);
    let mut truncated = 0usize;
    let out = Mat::<f64>::from_fn(matrix.nrows(), matrix.ncols(), |i, j| {
        let v = matrix[(i, j)];
        if v.abs() > level {
            truncated += 1;
            0.0
        } else {
            v
        }
    });
    Ok((
        out,
        TruncationReport {
            level,
            truncated,
            total: matrix.nrows() * matrix.ncols(),
        },
    ))
}

/// Operator-norm deviation `|| Z Z^T - I_r ||` of the signal matrix from an
/// exact isometry.
pub fn approximate_isometry_check(z: &Mat<f64>) -> f64 {
    crate::numeric::deterministic_kernels();
    let r = z.nrows();
    if r == 0 {
        return 0.0;
    }
    let gram = z * z.transpose();
    let dev = Mat::<f64>::from_fn(r, r, |i, j| gram[(i, j)] - if i == j { 1.0 } else { 0.0 });
    dev.self_adjoint_eigenvalues(Side::Lower)
        .map(|evals| evals.iter().fold(0.0f64, |acc, e| acc.max(e.abs())))
        .unwrap_or(f64::INFINITY)
}
