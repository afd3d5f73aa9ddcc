//! Low-rank factors of the spike perturbation in linearized coordinates.

use faer::Mat;

use crate::error::{Error, Result};
use crate::model::{DatasetBundle, SpikeModel};

/// The factors `D` (2r x 2r diagonal of loading singular values),
/// `U` ((p+q) x 2r left frames) and `E` (2n x 2r signal images `Z^T v_i`)
/// such that the perturbed linearization is `H + W K W^T` with
/// `W = diag(U, E)` and `K` the antidiagonal coupling of `D`.
#[derive(Debug, Clone)]
pub struct SpikePerturbationBlocks {
    pub d: Mat<f64>,
    pub u: Mat<f64>,
    pub e: Mat<f64>,
    pub rank: usize,
}

impl SpikePerturbationBlocks {
    pub fn from_bundle(bundle: &DatasetBundle, spikes: &SpikeModel) -> Result<Self> {
        let r = spikes.rank();
        if bundle.left_a.ncols() != r {
            return Err(Error::Argument(format!(
                "bundle was generated at rank {}, spike model has rank {r}",
                bundle.left_a.ncols()
            )));
        }
        let (p, q, n) = (bundle.dims.p(), bundle.dims.q(), bundle.dims.n());
        let mut d = Mat::<f64>::zeros(2 * r, 2 * r);
        for i in 0..r {
            d[(i, i)] = spikes.a_values()[i];
            d[(r + i, r + i)] = spikes.b_values()[i];
        }
        let mut u = Mat::<f64>::zeros(p + q, 2 * r);
        for i in 0..p {
            for j in 0..r {
                u[(i, j)] = bundle.left_a[(i, j)];
            }
        }
        for i in 0..q {
            for j in 0..r {
                u[(p + i, r + j)] = bundle.left_b[(i, j)];
            }
        }
        // E columns are Z^T v_i^a and Z^T v_i^b
        let zt_va = bundle.z.transpose() * &bundle.right_a;
        let zt_vb = bundle.z.transpose() * &bundle.right_b;
        let mut e = Mat::<f64>::zeros(2 * n, 2 * r);
        for i in 0..n {
            for j in 0..r {
                e[(i, j)] = zt_va[(i, j)];
                e[(n + i, r + j)] = zt_vb[(i, j)];
            }
        }
        Ok(Self { d, u, e, rank: r })
    }

    /// `|U^T U - I|_max`; exactly orthonormal by construction.
    pub fn left_frame_defect(&self) -> f64 {
        let g = self.u.transpose() * &self.u;
        let mut worst = 0.0f64;
        for i in 0..2 * self.rank {
            for j in 0..2 * self.rank {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// `|E^T E - I|_max`; small of the order of the signal isometry defect.
    pub fn signal_frame_defect(&self) -> f64 {
        let g = self.e.transpose() * &self.e;
        let mut worst = 0.0f64;
        for i in 0..2 * self.rank {
            for j in 0..2 * self.rank {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }
}
