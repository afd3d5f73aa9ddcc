//! Asymptotic partial-trace limits `m_{1c}..m_{4c}`, the bulk Stieltjes
//! transform `m_c`, the off-diagonal factor `h`, the deterministic resolvent
//! limit `Pi`, and the local-law control parameter `Psi`.

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{branch_sqrt, edge_sqrt};

use super::TheoryContext;

/// A spectral parameter `z = e + i eta` annotated with its distance
/// `kappa` to the nearer support edge.
#[derive(Debug, Clone, Copy)]
pub struct SpectralPoint {
    pub e: f64,
    pub eta: f64,
    pub kappa: f64,
}

impl SpectralPoint {
    pub fn new(e: f64, eta: f64, ctx: &TheoryContext) -> Result<Self> {
        if eta < 0.0 {
            return Err(Error::Domain(format!(
                "spectral height must be nonnegative, got eta = {eta}"
            )));
        }
        Ok(Self {
            e,
            eta,
            kappa: ctx.edge_distance(e),
        })
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.e, self.eta)
    }
}

/// Values of the limiting transforms at one spectral point.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticTransforms {
    pub m1c: Complex64,
    pub m2c: Complex64,
    pub m3c: Complex64,
    pub m4c: Complex64,
    pub mc: Complex64,
    pub h: Complex64,
}

/// Scalar entries of the deterministic matrix limit `Pi(z)`: the two
/// left-block diagonals, the two right-block diagonals, and the
/// off-diagonal coupling `h`.
#[derive(Debug, Clone, Copy)]
pub struct PiScalars {
    pub left_x: Complex64,
    pub left_y: Complex64,
    pub right_3: Complex64,
    pub right_4: Complex64,
    pub coupling: Complex64,
}

const Z_SINGULARITY_TOL: f64 = 1e-9;

impl TheoryContext {
    /// All limiting transforms at `z`, excluding `z in {0, 1}` where the raw
    /// formulas for `m1c`, `m2c` degenerate. At `z = 1` the removable
    /// singularity is evaluated through its finite limit
    /// `m1c(1) = -c1 / (1 - c1 - c2)` (and symmetrically for `m2c`).
    pub fn transforms(&self, z: Complex64) -> Result<AsymptoticTransforms> {
        if z.norm() < Z_SINGULARITY_TOL {
            return Err(Error::Domain("transforms undefined at z = 0".into()));
        }
        let (c1, c2) = (self.dims().c1(), self.dims().c2());
        let s = edge_sqrt(z, self.lambda_minus(), self.lambda_plus());

        let m3c = 0.5 * ((1.0 - 2.0 * c1) * z + (c1 - c2) + s);
        let m4c = 0.5 * ((1.0 - 2.0 * c2) * z + (c2 - c1) + s);

        let near_one = (z - 1.0).norm() < Z_SINGULARITY_TOL;
        let (m1c, m2c) = if near_one {
            // finite limits of the removable singularity at z = 1
            let gap = 1.0 - c1 - c2;
            (
                Complex64::new(-c1 / gap, 0.0),
                Complex64::new(-c2 / gap, 0.0),
            )
        } else {
            let core = -z + c1 + c2 + s;
            let m1c = core / (2.0 * (1.0 - c1) * z * (1.0 - z)) - c1 / ((1.0 - c1) * z);
            let m2c = core / (2.0 * (1.0 - c2) * z * (1.0 - z)) - c2 / ((1.0 - c2) * z);
            (m1c, m2c)
        };

        let mc = (1.0 - c2) / c2 * m2c;
        let h = 0.5 * branch_sqrt(z) * (-z + (2.0 - c1 - c2) + s);
        Ok(AsymptoticTransforms {
            m1c,
            m2c,
            m3c,
            m4c,
            mc,
            h,
        })
    }

    /// The limiting Stieltjes transform of the bulk law.
    pub fn mc(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.transforms(z)?.mc)
    }

    /// Scalars of `Pi(z)`.
    pub fn pi_scalars(&self, z: Complex64) -> Result<PiScalars> {
        let t = self.transforms(z)?;
        let (c1, c2) = (self.dims().c1(), self.dims().c2());
        Ok(PiScalars {
            left_x: t.m1c / c1,
            left_y: t.m2c / c2,
            right_3: t.m3c,
            right_4: t.m4c,
            coupling: t.h,
        })
    }

    /// Rank-reduced deterministic limit `Pi_r(z)`: the `4r x 4r` matrix with
    /// diagonal blocks `(c1^{-1} m1c I, c2^{-1} m2c I, m3c I, m4c I)` and the
    /// alignment-coupled off-diagonal blocks `h M_r` between the two right
    /// index blocks. `r = 0` yields the empty matrix.
    pub fn pi_rank_reduced(&self, z: Complex64, alignment: &Mat<f64>) -> Result<Mat<Complex64>> {
        let r = alignment.nrows();
        if alignment.ncols() != r {
            return Err(Error::Argument(format!(
                "alignment must be square, got {} x {}",
                alignment.nrows(),
                alignment.ncols()
            )));
        }
        let sc = self.pi_scalars(z)?;
        let zero = Complex64::new(0.0, 0.0);
        let mut pi = Mat::<Complex64>::from_fn(4 * r, 4 * r, |_, _| zero);
        for i in 0..r {
            pi[(i, i)] = sc.left_x;
            pi[(r + i, r + i)] = sc.left_y;
            pi[(2 * r + i, 2 * r + i)] = sc.right_3;
            pi[(3 * r + i, 3 * r + i)] = sc.right_4;
            for j in 0..r {
                pi[(2 * r + i, 3 * r + j)] = sc.coupling * alignment[(i, j)];
                pi[(3 * r + j, 2 * r + i)] = sc.coupling * alignment[(i, j)];
            }
        }
        Ok(pi)
    }

    /// Local-law control parameter
    /// `Psi(z) = sqrt(Im m_c(z) / (n eta)) + 1 / (n eta)`; requires `eta > 0`.
    pub fn control_parameter(&self, point: &SpectralPoint) -> Result<f64> {
        if point.eta <= 0.0 {
            return Err(Error::Domain(format!(
                "control parameter needs eta > 0, got {}",
                point.eta
            )));
        }
        let n_eta = self.dims().n() as f64 * point.eta;
        let im_mc = self.mc(point.z())?.im.max(0.0);
        Ok((im_mc / n_eta).sqrt() + 1.0 / n_eta)
    }
}
