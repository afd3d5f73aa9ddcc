//! The resolvent `G(z) = H(z)^{-1}`, its partial traces, and the exact
//! finite-size identities that tie them to the two-sided sample operator.

use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::rel_err_c;

use super::LinearizedSystem;

/// `G(z)` together with the partial traces `m_1..m_4` (each normalized by
/// `n`) and the Stieltjes transform `m(z) = q^{-1} tr (C_YX - z)^{-1}`.
#[derive(Debug, Clone)]
pub struct ResolventSnapshot {
    pub g: Mat<Complex64>,
    pub z: Complex64,
    pub m1: Complex64,
    pub m2: Complex64,
    pub m3: Complex64,
    pub m4: Complex64,
    /// Independently computed from the eigenproblem side, not from `G`.
    pub m: Complex64,
    pub tr_r1: Complex64,
    pub tr_r2: Complex64,
}

/// Residuals of the exact identities; all are relative errors except the
/// inverse defect which is entrywise absolute.
#[derive(Debug, Clone, Copy)]
pub struct IdentityResiduals {
    /// `|H G - I|_max`
    pub inverse_defect: f64,
    /// `m3 = c2 z (1-z) m + (1 - c1 - c2) z`
    pub m3_vs_m: f64,
    /// `m4 = c2 z (1-z) m - (c1 - c2) + (1 - 2 c2) z`
    pub m4_vs_m: f64,
    /// `m3 - m4 = (1 - z)(c1 - c2)`
    pub m34_difference: f64,
    /// `tr R1 = q m - (p - q)/z`
    pub trace_shift: f64,
    /// Left block of `G` against the Schur-complement assembly.
    pub left_block: f64,
    /// Right block of `G` against `J + J B^T G_L B J`.
    pub right_block: f64,
    /// Off-diagonal block of `G` against `-G_L B J`.
    pub corner_block: f64,
    /// Direct inversion of `R(z)` against its singular-triplet assembly.
    pub spectral_assembly: f64,
}

impl IdentityResiduals {
    pub fn worst(&self) -> f64 {
        [
            self.m3_vs_m,
            self.m4_vs_m,
            self.m34_difference,
            self.trace_shift,
            self.left_block,
            self.right_block,
            self.corner_block,
            self.spectral_assembly,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn to_complex(m: &Mat<f64>) -> Mat<Complex64> {
    Mat::<Complex64>::from_fn(m.nrows(), m.ncols(), |i, j| Complex64::new(m[(i, j)], 0.0))
}

fn sym_inv_sqrt(m: &Mat<f64>, name: &str) -> Result<Mat<f64>> {
    let k = m.nrows();
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::RankDeficient(format!("{name}: eigensolve failed: {e:?}")))?;
    let (u, s) = (evd.U(), evd.S());
    let max = (0..k).map(|i| s[i]).fold(0.0f64, f64::max);
    if (0..k).any(|i| s[i] <= 1e-13 * max.max(1e-300)) {
        return Err(Error::RankDeficient(format!(
            "{name} is numerically singular"
        )));
    }
    Ok(Mat::<f64>::from_fn(k, k, |i, j| {
        let mut acc = 0.0;
        for l in 0..k {
            acc += u[(i, l)] / s[l].sqrt() * u[(j, l)];
        }
        acc
    }))
}

/// Complex-shifted inverse trace `tr (A - z)^{-1}` of a real symmetric
/// matrix, through its eigenvalues.
fn shifted_trace(evals: &[f64], z: Complex64) -> Complex64 {
    evals
        .iter()
        .map(|l| (Complex64::new(*l, 0.0) - z).powi(-1))
        .sum()
}

pub struct SampleOperator {
    /// `S_xx^{-1/2} S_xy S_yy^{-1/2}`, the whitened cross operator.
    pub cross: Mat<f64>,
    pub sxx_inv_sqrt: Mat<f64>,
    pub syy_inv_sqrt: Mat<f64>,
    /// Eigenvalues of `C_YX = cross^T cross`, descending.
    pub eigenvalues: Vec<f64>,
}

pub fn sample_operator(sys: &LinearizedSystem) -> Result<SampleOperator> {
    let sxx = sys.xd() * sys.xd().transpose();
    let syy = sys.yd() * sys.yd().transpose();
    let sxx_inv_sqrt = sym_inv_sqrt(&sxx, "S_xx")?;
    let syy_inv_sqrt = sym_inv_sqrt(&syy, "S_yy")?;
    let cross = &sxx_inv_sqrt * (sys.xd() * sys.yd().transpose()) * &syy_inv_sqrt;
    let cyx = cross.transpose() * &cross;
    let mut eigenvalues = cyx
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::RankDeficient(format!("C_YX eigensolve failed: {e:?}")))?;
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    Ok(SampleOperator {
        cross,
        sxx_inv_sqrt,
        syy_inv_sqrt,
        eigenvalues,
    })
}

const POLE_TOL: f64 = 1e-11;

/// Inverts `H(z)` and reads off the partial traces. For real `z` colliding
/// with the null spectrum the inversion is refused with the nearest
/// eigenvalue.
pub fn resolvent_snapshot(sys: &LinearizedSystem) -> Result<ResolventSnapshot> {
    crate::numeric::deterministic_kernels();
    let op = sample_operator(sys)?;
    let z = sys.z();
    if z.im == 0.0 {
        let nearest = op
            .eigenvalues
            .iter()
            .cloned()
            .min_by(|a, b| (a - z.re).abs().total_cmp(&(b - z.re).abs()));
        if let Some(nearest) = nearest {
            if (nearest - z.re).abs() < POLE_TOL {
                return Err(Error::Pole { z: z.re, nearest });
            }
        }
    }
    let lu = sys.h().partial_piv_lu();
    let g = lu.inverse();
    let blocks = sys.blocks();
    let n = blocks.n as f64;
    let trace_over = |range: std::ops::Range<usize>| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in range {
            acc += g[(i, i)];
        }
        acc / n
    };
    let m1 = trace_over(blocks.i1());
    let m2 = trace_over(blocks.i2());
    let m3 = trace_over(blocks.i3());
    let m4 = trace_over(blocks.i4());

    let q = blocks.q as f64;
    let p = blocks.p as f64;
    let tr_r2 = shifted_trace(&op.eigenvalues, z);
    // C_XY carries p - q additional zero eigenvalues
    let tr_r1 = tr_r2 - (p - q) / z;
    let m = tr_r2 / q;
    Ok(ResolventSnapshot {
        g,
        z,
        m1,
        m2,
        m3,
        m4,
        m,
        tr_r1,
        tr_r2,
    })
}

/// `R(z) = [[-z, -sqrt(z) H], [-sqrt(z) H^T, -z]]^{-1}` by direct dense
/// inversion.
pub fn two_sided_resolvent(op: &SampleOperator, z: Complex64, sqrt_z: Complex64) -> Mat<Complex64> {
    let (p, q) = (op.cross.nrows(), op.cross.ncols());
    let k = p + q;
    let zero = Complex64::new(0.0, 0.0);
    let mut m = Mat::<Complex64>::from_fn(k, k, |_, _| zero);
    for i in 0..p {
        m[(i, i)] = -z;
    }
    for j in 0..q {
        m[(p + j, p + j)] = -z;
    }
    for i in 0..p {
        for j in 0..q {
            let v = -sqrt_z * op.cross[(i, j)];
            m[(i, p + j)] = v;
            m[(p + j, i)] = v;
        }
    }
    m.partial_piv_lu().inverse()
}

/// `R(z)` assembled from the singular triplets of the whitened cross
/// operator plus the `-1/z` projector onto its left null space.
pub fn two_sided_resolvent_spectral(
    op: &SampleOperator,
    z: Complex64,
    sqrt_z: Complex64,
) -> Result<Mat<Complex64>> {
    let (p, q) = (op.cross.nrows(), op.cross.ncols());
    let svd = op
        .cross
        .thin_svd()
        .map_err(|e| Error::RankDeficient(format!("svd of the cross operator failed: {e:?}")))?;
    let (u, s, v) = (svd.U(), svd.S(), svd.V());
    let k = p + q;
    let zero = Complex64::new(0.0, 0.0);
    let mut r = Mat::<Complex64>::from_fn(k, k, |_, _| zero);
    for t in 0..q {
        let lambda = s[t] * s[t];
        let w = (Complex64::new(lambda, 0.0) - z).powi(-1);
        let coupling = -s[t] / sqrt_z * w;
        for i in 0..p {
            for j in 0..p {
                r[(i, j)] += w * u[(i, t)] * u[(j, t)];
            }
        }
        for i in 0..p {
            for j in 0..q {
                let c = coupling * u[(i, t)] * v[(j, t)];
                r[(i, p + j)] += c;
                r[(p + j, i)] += c;
            }
        }
        for i in 0..q {
            for j in 0..q {
                r[(p + i, p + j)] += w * v[(i, t)] * v[(j, t)];
            }
        }
    }
    // left null space projector: I_p - U U^T
    let inv_z = -z.powi(-1);
    for i in 0..p {
        for j in 0..p {
            let mut uu = 0.0;
            for t in 0..q {
                uu += u[(i, t)] * u[(j, t)];
            }
            let proj = if i == j { 1.0 - uu } else { -uu };
            r[(i, j)] += inv_z * proj;
        }
    }
    Ok(r)
}

fn max_abs_diff(a: &Mat<Complex64>, b: &Mat<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

fn max_norm(a: &Mat<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max(a[(i, j)].norm());
        }
    }
    worst
}

/// Evaluates every exact identity at the snapshot's spectral parameter.
pub fn identity_residuals(
    sys: &LinearizedSystem,
    snap: &ResolventSnapshot,
) -> Result<IdentityResiduals> {
    let op = sample_operator(sys)?;
    let blocks = sys.blocks();
    let (p, q, n) = (blocks.p, blocks.q, blocks.n);
    let (c1, c2) = (sys.dims().c1(), sys.dims().c2());
    let z = sys.z();
    let sqrt_z = sys.sqrt_z();

    // inverse defect
    let hg = sys.h() * &snap.g;
    let mut inverse_defect = 0.0f64;
    for i in 0..blocks.total() {
        for j in 0..blocks.total() {
            let target = if i == j { 1.0 } else { 0.0 };
            inverse_defect = inverse_defect.max((hg[(i, j)] - target).norm());
        }
    }

    // partial-trace identities against the independently computed m(z)
    let m3_pred = c2 * z * (1.0 - z) * snap.m + (1.0 - c1 - c2) * z;
    let m4_pred = c2 * z * (1.0 - z) * snap.m - (c1 - c2) + (1.0 - 2.0 * c2) * z;
    let m34_pred = (1.0 - z) * (c1 - c2);
    let trace_pred = Complex64::new(q as f64, 0.0) * snap.m - (p as f64 - q as f64) / z;

    // Schur-complement left block
    let r_direct = two_sided_resolvent(&op, z, sqrt_z);
    let wx = to_complex(&op.sxx_inv_sqrt);
    let wy = to_complex(&op.syy_inv_sqrt);
    let k = p + q;
    let zero = Complex64::new(0.0, 0.0);
    let mut w = Mat::<Complex64>::from_fn(k, k, |_, _| zero);
    for i in 0..p {
        for j in 0..p {
            w[(i, j)] = wx[(i, j)];
        }
    }
    for i in 0..q {
        for j in 0..q {
            w[(p + i, p + j)] = wy[(i, j)];
        }
    }
    let gl_schur = &w * &r_direct * &w;
    let gl_direct = Mat::<Complex64>::from_fn(k, k, |i, j| snap.g[(i, j)]);
    let left_scale = max_norm(&gl_direct).max(1e-300);
    let left_block = max_abs_diff(&gl_direct, &gl_schur) / left_scale;

    // right and corner blocks: G_R = J + J B^T G_L B J, G_LR = -G_L B J
    let mut b = Mat::<Complex64>::from_fn(k, 2 * n, |_, _| zero);
    for i in 0..p {
        for j in 0..n {
            b[(i, j)] = Complex64::new(sys.xd()[(i, j)], 0.0);
        }
    }
    for i in 0..q {
        for j in 0..n {
            b[(p + i, n + j)] = Complex64::new(sys.yd()[(i, j)], 0.0);
        }
    }
    let mut jmat = Mat::<Complex64>::from_fn(2 * n, 2 * n, |_, _| zero);
    for i in 0..n {
        jmat[(i, i)] = z;
        jmat[(n + i, n + i)] = z;
        jmat[(i, n + i)] = sqrt_z;
        jmat[(n + i, i)] = sqrt_z;
    }
    let gl_b_j = &gl_direct * &b * &jmat;
    let gr_pred = &jmat + jmat.transpose() * b.transpose() * &gl_b_j;
    let off = p + q;
    let gr_direct = Mat::<Complex64>::from_fn(2 * n, 2 * n, |i, j| snap.g[(off + i, off + j)]);
    let right_scale = max_norm(&gr_direct).max(1e-300);
    let right_block = max_abs_diff(&gr_direct, &gr_pred) / right_scale;

    let glr_pred = Mat::<Complex64>::from_fn(k, 2 * n, |i, j| -gl_b_j[(i, j)]);
    let glr_direct = Mat::<Complex64>::from_fn(k, 2 * n, |i, j| snap.g[(i, off + j)]);
    let corner_scale = max_norm(&glr_direct).max(1e-300);
    let corner_block = max_abs_diff(&glr_direct, &glr_pred) / corner_scale;

    // spectral assembly of R(z)
    let r_spectral = two_sided_resolvent_spectral(&op, z, sqrt_z)?;
    let r_scale = max_norm(&r_direct).max(1e-300);
    let spectral_assembly = max_abs_diff(&r_direct, &r_spectral) / r_scale;

    // the difference identity degenerates to 0 = 0 when p = q, so its
    // residual is scaled by the size of the traces themselves
    let m34_scale = snap.m3.norm().max(snap.m4.norm()).max(1e-300);
    Ok(IdentityResiduals {
        inverse_defect,
        m3_vs_m: rel_err_c(snap.m3, m3_pred),
        m4_vs_m: rel_err_c(snap.m4, m4_pred),
        m34_difference: ((snap.m3 - snap.m4) - m34_pred).norm() / m34_scale,
        trace_shift: rel_err_c(snap.tr_r1, trace_pred),
        left_block,
        right_block,
        corner_block,
        spectral_assembly,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::DimensionRatios;
    use crate::model::{
        generate_dataset, make_spike_model, AlignmentSpec, CovarianceSpec, DistributionTriple,
    };
    use crate::resolvent::build_linearized;
    use crate::theory::TheoryContext;

    fn bundle(p: usize, q: usize, n: usize, seed: u64) -> crate::model::DatasetBundle {
        let d = DimensionRatios::with_margin(p, q, n, 1e-3).unwrap();
        let ctx = TheoryContext::new(d);
        let model = make_spike_model(&[], &[], AlignmentSpec::Identity, &d, &ctx, 0.05).unwrap();
        generate_dataset(
            &d,
            &model,
            &DistributionTriple::gaussian(),
            CovarianceSpec::Identity,
            CovarianceSpec::Identity,
            seed,
            0,
        )
        .unwrap()
    }

    #[test]
    fn partial_trace_identities_hold_at_finite_size() {
        let b = bundle(12, 9, 40, 1);
        for z in [
            Complex64::new(0.4, 0.3),
            Complex64::new(0.9, 0.02),
            Complex64::new(1.4, 0.5),
        ] {
            let sys = build_linearized(&b.x, &b.y, &b.dims, z).unwrap();
            let snap = resolvent_snapshot(&sys).unwrap();
            let res = identity_residuals(&sys, &snap).unwrap();
            assert!(res.m3_vs_m <= 1e-9, "m3 identity residual {}", res.m3_vs_m);
            assert!(res.m4_vs_m <= 1e-9, "m4 identity residual {}", res.m4_vs_m);
            assert!(res.m34_difference <= 1e-9);
            assert!(res.trace_shift <= 1e-9);
            assert!(res.left_block <= 1e-8);
            assert!(res.right_block <= 1e-8);
            assert!(res.corner_block <= 1e-8);
            assert!(res.spectral_assembly <= 1e-8);
            assert!(res.inverse_defect <= 1e-8);
        }
    }

    #[test]
    fn real_parameter_outside_the_spectrum_works() {
        let b = bundle(10, 8, 50, 3);
        let ctx = TheoryContext::new(b.dims);
        let lam = 0.5 * (ctx.lambda_plus() + 1.0);
        let sys = build_linearized(&b.x, &b.y, &b.dims, Complex64::new(lam, 0.0)).unwrap();
        let snap = resolvent_snapshot(&sys).unwrap();
        let res = identity_residuals(&sys, &snap).unwrap();
        assert!(res.worst() <= 1e-8, "worst residual {}", res.worst());
        // all partial traces are real here
        assert!(snap.m1.im.abs() < 1e-10);
        assert!(snap.m3.im.abs() < 1e-10);
    }

    #[test]
    fn sample_covariance_spectrum_stays_near_its_support() {
        // eigenvalues of S_xx concentrate on [(1 - sqrt(c1))^2, (1 + sqrt(c1))^2]
        use faer::Side;
        use rayon::prelude::*;
        let d = DimensionRatios::new(100, 80, 400).unwrap();
        let c1 = d.c1();
        let (lo, hi) = (
            (1.0 - c1.sqrt()).powi(2) - 0.1,
            (1.0 + c1.sqrt()).powi(2) + 0.1,
        );
        let ctx = TheoryContext::new(d);
        let model = make_spike_model(&[], &[], AlignmentSpec::Identity, &d, &ctx, 0.05).unwrap();
        let inside: usize = (0..200u64)
            .into_par_iter()
            .map(|rep| {
                let b = generate_dataset(
                    &d,
                    &model,
                    &DistributionTriple::gaussian(),
                    CovarianceSpec::Identity,
                    CovarianceSpec::Identity,
                    4040,
                    rep,
                )
                .unwrap();
                let sxx = &b.x * b.x.transpose();
                let evals = sxx.self_adjoint_eigenvalues(Side::Lower).unwrap();
                usize::from(evals.iter().all(|e| (lo..=hi).contains(e)))
            })
            .sum();
        assert!(
            inside >= 190,
            "S_xx spectrum inside the window in {inside}/200 seeds"
        );
    }

    #[test]
    fn pole_collision_reports_nearest_eigenvalue() {
        let b = bundle(6, 5, 30, 9);
        let op = sample_operator(
            &build_linearized(&b.x, &b.y, &b.dims, Complex64::new(0.5, 0.1)).unwrap(),
        )
        .unwrap();
        let ev = op.eigenvalues[2];
        let sys = build_linearized(&b.x, &b.y, &b.dims, Complex64::new(ev, 0.0)).unwrap();
        match resolvent_snapshot(&sys) {
            Err(Error::Pole { nearest, .. }) => {
                assert!((nearest - ev).abs() < 1e-12);
            }
            other => panic!("expected pole error, got {:?}", other.map(|_| ())),
        }
    }
}
