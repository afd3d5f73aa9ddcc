//! The low-rank master determinant whose zeros are the eigenvalues of the
//! perturbed operator, and the one-spike equation `f_c(lambda) = t`.

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{bisect, small_det};
use crate::theory::TheoryContext;

use super::snapshot::sample_operator;
use super::{build_linearized, SpikePerturbationBlocks};

/// Evaluator for `det(I_{4r} + K W^T G(lambda) W)` at real `lambda` in
/// `(0, 1)`, where `W = diag(U, E)`, `K` couples the loading singular
/// values antidiagonally, and `G` is the resolvent of the null
/// linearization.
pub struct MasterDeterminant {
    xd: Mat<f64>,
    yd: Mat<f64>,
    dims: crate::dims::DimensionRatios,
    w: Mat<f64>,
    k: Mat<f64>,
    null_eigenvalues: Vec<f64>,
    rank: usize,
}

const POLE_GUARD: f64 = 1e-11;

impl MasterDeterminant {
    pub fn new(
        xd: &Mat<f64>,
        yd: &Mat<f64>,
        dims: &crate::dims::DimensionRatios,
        blocks: &SpikePerturbationBlocks,
    ) -> Result<Self> {
        let (p, q, n) = (dims.p(), dims.q(), dims.n());
        let r = blocks.rank;
        let total = p + q + 2 * n;
        let mut w = Mat::<f64>::zeros(total, 4 * r);
        for i in 0..p + q {
            for j in 0..2 * r {
                w[(i, j)] = blocks.u[(i, j)];
            }
        }
        for i in 0..2 * n {
            for j in 0..2 * r {
                w[(p + q + i, 2 * r + j)] = blocks.e[(i, j)];
            }
        }
        // K = [[0, D], [D, 0]] in the (U, E) column split
        let mut k = Mat::<f64>::zeros(4 * r, 4 * r);
        for i in 0..2 * r {
            for j in 0..2 * r {
                let v = blocks.d[(i, j)];
                k[(i, 2 * r + j)] = v;
                k[(2 * r + i, j)] = v;
            }
        }
        let probe = build_linearized(xd, yd, dims, Complex64::new(0.5, 1.0))?;
        let op = sample_operator(&probe)?;
        Ok(Self {
            xd: xd.clone(),
            yd: yd.clone(),
            dims: *dims,
            w,
            k,
            null_eigenvalues: op.eigenvalues,
            rank: r,
        })
    }

    pub fn null_eigenvalues(&self) -> &[f64] {
        &self.null_eigenvalues
    }

    /// Value of the determinant at `lambda`. Errors when `lambda` collides
    /// with the null spectrum (a pole of `G`).
    pub fn evaluate(&self, lambda: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&lambda) || lambda == 0.0 {
            return Err(Error::Argument(format!(
                "master determinant expects lambda in (0, 1), got {lambda}"
            )));
        }
        if let Some(nearest) = self
            .null_eigenvalues
            .iter()
            .cloned()
            .min_by(|a, b| (a - lambda).abs().total_cmp(&(b - lambda).abs()))
        {
            if (nearest - lambda).abs() < POLE_GUARD {
                return Err(Error::Pole { z: lambda, nearest });
            }
        }
        let sys = build_linearized(&self.xd, &self.yd, &self.dims, Complex64::new(lambda, 0.0))?;
        let total = sys.blocks().total();
        let hr = Mat::<f64>::from_fn(total, total, |i, j| sys.h()[(i, j)].re);
        let lu = hr.partial_piv_lu();
        let gw = lu.solve(&self.w);
        let small = self.w.transpose() * &gw;
        let k4 = 4 * self.rank;
        let mut data = vec![Complex64::new(0.0, 0.0); k4 * k4];
        for i in 0..k4 {
            for j in 0..k4 {
                let mut acc = 0.0;
                for l in 0..k4 {
                    acc += self.k[(i, l)] * small[(l, j)];
                }
                let eye = if i == j { 1.0 } else { 0.0 };
                data[i * k4 + j] = Complex64::new(eye + acc, 0.0);
            }
        }
        Ok(small_det(&mut data, k4).re)
    }

    /// Refines a root near `guess` by sign-change bracketing; the initial
    /// half-width grows until a sign change is found or `max_width` is hit.
    pub fn refine_root(&self, guess: f64, max_width: f64) -> Result<f64> {
        let mut half = 1e-8f64.min(max_width);
        while half <= max_width {
            let lo = (guess - half).max(1e-9);
            let hi = (guess + half).min(1.0 - 1e-9);
            let flo = self.evaluate(lo)?;
            let fhi = self.evaluate(hi)?;
            if flo.signum() != fhi.signum() {
                return bisect(|x| self.evaluate(x).unwrap_or(f64::NAN), lo, hi, 1e-10, 0.0);
            }
            half *= 4.0;
        }
        Err(Error::Argument(format!(
            "no sign change within {max_width} of {guess}"
        )))
    }
}

/// Zero spike perturbation: determinant is identically one.
pub fn is_trivial_when_unperturbed(master: &MasterDeterminant, grid: &[f64]) -> Result<bool> {
    for &lambda in grid {
        if (master.evaluate(lambda)? - 1.0).abs() > 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Asymptotic surrogate for the master determinant: the resolvent factor is
/// replaced by the rank-reduced deterministic limit, so the zeros land on
/// `g_c(t_i)` for supercritical spikes.
pub fn surrogate_outlier_determinant(
    ctx: &TheoryContext,
    blocks: &SpikePerturbationBlocks,
    alignment: &Mat<f64>,
    lambda: f64,
) -> Result<f64> {
    let r = blocks.rank;
    let pi = ctx.pi_rank_reduced(Complex64::new(lambda, 0.0), alignment)?;
    let k4 = 4 * r;
    let mut data = vec![Complex64::new(0.0, 0.0); k4 * k4];
    // K in the same (U, E) split as the exact determinant
    let mut k = Mat::<f64>::zeros(k4, k4);
    for i in 0..2 * r {
        for j in 0..2 * r {
            let v = blocks.d[(i, j)];
            k[(i, 2 * r + j)] = v;
            k[(2 * r + i, j)] = v;
        }
    }
    for i in 0..k4 {
        for j in 0..k4 {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..k4 {
                acc += k[(i, l)] * pi[(l, j)];
            }
            let eye = if i == j { 1.0 } else { 0.0 };
            data[i * k4 + j] = acc + eye;
        }
    }
    Ok(small_det(&mut data, k4).re)
}

/// Location of the outlier for a supercritical spike by bracketed root
/// finding of `f_c(lambda) = t` on `(lambda_+, 1)`.
pub fn outlier_master_solve(t: f64, ctx: &TheoryContext) -> Result<f64> {
    if t <= ctx.t_threshold() {
        return Err(Error::Domain(format!(
            "f_c(lambda) = t has no solution above the bulk for t = {t} <= t_c = {}",
            ctx.t_threshold()
        )));
    }
    if t > 1.0 {
        return Err(Error::Domain(format!("population correlation t = {t} > 1")));
    }
    if t == 1.0 {
        return Ok(1.0);
    }
    let lp = ctx.lambda_plus();
    let f = |lambda: f64| ctx.fc_real(lambda).unwrap_or(f64::NAN) - t;
    let theta = bisect(f, lp, 1.0, 1e-16, 1e-13)?;
    Ok(theta)
}
