//! Linearization of the sample canonical correlation problem: the
//! `(p+q+2n) x (p+q+2n)` symmetric matrix `H(z)`, its resolvent, exact
//! finite-size partial-trace identities, the low-rank master determinant
//! whose zeros are the perturbed eigenvalues, and local-law error probes.

mod blocks;
mod identity_suite;
mod local_law;
mod master;
mod snapshot;

pub use blocks::SpikePerturbationBlocks;
pub use identity_suite::{
    run_identity_suite, IdentityInstanceReport, IdentitySuiteReport, ResidualEntry,
};
pub use local_law::{entrywise_law_error, local_law_error, LocalLawReport};
pub use master::{
    is_trivial_when_unperturbed, outlier_master_solve, surrogate_outlier_determinant,
    MasterDeterminant,
};
pub use snapshot::{
    identity_residuals, resolvent_snapshot, sample_operator, IdentityResiduals, ResolventSnapshot,
    SampleOperator,
};

use faer::Mat;
use num_complex::Complex64;

use crate::dims::DimensionRatios;
use crate::error::{Error, Result};
use crate::numeric::branch_sqrt;

/// Index ranges of the four blocks of the linearized matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexBlocks {
    pub p: usize,
    pub q: usize,
    pub n: usize,
}

impl IndexBlocks {
    pub fn total(&self) -> usize {
        self.p + self.q + 2 * self.n
    }

    pub fn i1(&self) -> std::ops::Range<usize> {
        0..self.p
    }

    pub fn i2(&self) -> std::ops::Range<usize> {
        self.p..self.p + self.q
    }

    pub fn i3(&self) -> std::ops::Range<usize> {
        self.p + self.q..self.p + self.q + self.n
    }

    pub fn i4(&self) -> std::ops::Range<usize> {
        self.p + self.q + self.n..self.p + self.q + 2 * self.n
    }
}

/// The symmetric block matrix `H(z)`: data in the off-diagonal corner
/// blocks, and the explicit inverse of `[[z, z^(1/2)], [z^(1/2), z]]`
/// (blockwise over `I_n`) in the lower-right corner.
#[derive(Debug, Clone)]
pub struct LinearizedSystem {
    h: Mat<Complex64>,
    xd: Mat<f64>,
    yd: Mat<f64>,
    z: Complex64,
    sqrt_z: Complex64,
    dims: DimensionRatios,
    blocks: IndexBlocks,
}

const Z_PARAM_TOL: f64 = 1e-12;

/// Builds `H(z)` from a `p x n` and a `q x n` data matrix. `z` must avoid
/// the parameterization singularities at 0 and 1; real `z` uses the
/// positive square root (upper-half-plane limit).
pub fn build_linearized(
    xd: &Mat<f64>,
    yd: &Mat<f64>,
    dims: &DimensionRatios,
    z: Complex64,
) -> Result<LinearizedSystem> {
    crate::numeric::deterministic_kernels();
    let (p, q, n) = (dims.p(), dims.q(), dims.n());
    if xd.nrows() != p || xd.ncols() != n || yd.nrows() != q || yd.ncols() != n {
        return Err(Error::Argument(format!(
            "data shapes {}x{} and {}x{} do not match dims ({p}, {q}, {n})",
            xd.nrows(),
            xd.ncols(),
            yd.nrows(),
            yd.ncols()
        )));
    }
    if z.norm() < Z_PARAM_TOL || (z - 1.0).norm() < Z_PARAM_TOL {
        return Err(Error::Domain(format!(
            "linearization is singular at z in {{0, 1}}, got z = {z}"
        )));
    }
    let blocks = IndexBlocks { p, q, n };
    let total = blocks.total();
    let sqrt_z = branch_sqrt(z);
    // [[z, sqrt z], [sqrt z, z]]^{-1} = [[d, e], [e, d]] blockwise
    let det = z * z - z;
    let d = z / det;
    let e = -sqrt_z / det;

    let zero = Complex64::new(0.0, 0.0);
    let mut h = Mat::<Complex64>::from_fn(total, total, |_, _| zero);
    let off_x = p + q;
    let off_y = p + q + n;
    for i in 0..p {
        for j in 0..n {
            let v = Complex64::new(xd[(i, j)], 0.0);
            h[(i, off_x + j)] = v;
            h[(off_x + j, i)] = v;
        }
    }
    for i in 0..q {
        for j in 0..n {
            let v = Complex64::new(yd[(i, j)], 0.0);
            h[(p + i, off_y + j)] = v;
            h[(off_y + j, p + i)] = v;
        }
    }
    for j in 0..n {
        h[(off_x + j, off_x + j)] = d;
        h[(off_y + j, off_y + j)] = d;
        h[(off_x + j, off_y + j)] = e;
        h[(off_y + j, off_x + j)] = e;
    }
    Ok(LinearizedSystem {
        h,
        xd: xd.clone(),
        yd: yd.clone(),
        z,
        sqrt_z,
        dims: *dims,
        blocks,
    })
}

impl LinearizedSystem {
    pub fn h(&self) -> &Mat<Complex64> {
        &self.h
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn sqrt_z(&self) -> Complex64 {
        self.sqrt_z
    }

    pub fn dims(&self) -> &DimensionRatios {
        &self.dims
    }

    pub fn blocks(&self) -> IndexBlocks {
        self.blocks
    }

    pub fn xd(&self) -> &Mat<f64> {
        &self.xd
    }

    pub fn yd(&self) -> &Mat<f64> {
        &self.yd
    }

    /// Largest symmetry defect `|H - H^T|_max`; zero by construction, kept
    /// as a checkable invariant.
    pub fn symmetry_defect(&self) -> f64 {
        let t = self.blocks.total();
        let mut worst = 0.0f64;
        for i in 0..t {
            for j in i + 1..t {
                worst = worst.max((self.h[(i, j)] - self.h[(j, i)]).norm());
            }
        }
        worst
    }
}
