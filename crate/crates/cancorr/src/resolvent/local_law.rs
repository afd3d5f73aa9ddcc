//! Probe-based measurement of the anisotropic local-law error
//! `G_uv - Pi_uv` against its predicted scales.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::model::{stream_rng, StreamRole};
use crate::theory::{SpectralPoint, TheoryContext};

use super::snapshot::ResolventSnapshot;
use super::IndexBlocks;

/// Error statistics over random probe pairs, with the two theoretical
/// scales the error is compared against.
#[derive(Debug, Clone, Copy)]
pub struct LocalLawReport {
    pub max_abs_err: f64,
    pub rms_err: f64,
    /// `phi_n + Psi(z)`: the bulk anisotropic scale (present when `eta > 0`).
    pub bulk_scale: Option<f64>,
    /// `phi_n + n^{-1/2} kappa^{-1/4}`: the outside-spectrum scale
    /// (present when `kappa > 0`).
    pub outside_scale: Option<f64>,
    pub probe_count: usize,
}

impl LocalLawReport {
    pub fn bulk_ratio(&self) -> Option<f64> {
        self.bulk_scale.map(|s| self.max_abs_err / s)
    }

    pub fn outside_ratio(&self) -> Option<f64> {
        self.outside_scale.map(|s| self.max_abs_err / s)
    }
}

fn unit_sphere(dim: usize, rng: &mut impl rand::Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim)
            .map(|_| Distribution::<f64>::sample(&StandardNormal, rng))
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

/// A probe either supported on one index block or spread over all four.
fn probe_vector(blocks: IndexBlocks, which: usize, rng: &mut impl rand::Rng) -> Vec<f64> {
    let total = blocks.total();
    let mut out = vec![0.0; total];
    let range = match which % 5 {
        0 => blocks.i1(),
        1 => blocks.i2(),
        2 => blocks.i3(),
        3 => blocks.i4(),
        _ => 0..total,
    };
    let inner = unit_sphere(range.len(), rng);
    for (offset, value) in inner.into_iter().enumerate() {
        out[range.start + offset] = value;
    }
    out
}

fn pi_bilinear(
    ctx: &TheoryContext,
    z: Complex64,
    blocks: IndexBlocks,
    u: &[f64],
    v: &[f64],
) -> Result<Complex64> {
    let sc = ctx.pi_scalars(z)?;
    let dot = |range: std::ops::Range<usize>| -> f64 { range.map(|i| u[i] * v[i]).sum() };
    let mut acc = sc.left_x * dot(blocks.i1());
    acc += sc.left_y * dot(blocks.i2());
    acc += sc.right_3 * dot(blocks.i3());
    acc += sc.right_4 * dot(blocks.i4());
    // off-diagonal h couples index mu in I3 with the same mu in I4
    let i3 = blocks.i3().start;
    let i4 = blocks.i4().start;
    let mut cross = 0.0;
    for k in 0..blocks.n {
        cross += u[i3 + k] * v[i4 + k] + u[i4 + k] * v[i3 + k];
    }
    acc += sc.coupling * cross;
    Ok(acc)
}

fn g_bilinear(snap: &ResolventSnapshot, u: &[f64], v: &[f64]) -> Complex64 {
    let n = snap.g.nrows();
    let mut gv = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            if v[j] != 0.0 {
                acc += snap.g[(i, j)] * v[j];
            }
        }
        gv[i] = acc;
    }
    let mut out = Complex64::new(0.0, 0.0);
    for i in 0..n {
        if u[i] != 0.0 {
            out += u[i] * gv[i];
        }
    }
    out
}

/// Measures `|G_uv - Pi_uv|` over `probe_count` seeded probe pairs: the
/// first probes are block-supported, the rest mixed across blocks.
pub fn local_law_error(
    snap: &ResolventSnapshot,
    ctx: &TheoryContext,
    blocks: IndexBlocks,
    probe_count: usize,
    phi_n: f64,
    probe_seed: u64,
) -> Result<LocalLawReport> {
    let z = snap.z;
    let mut rng = stream_rng(probe_seed, 0, StreamRole::Probes);
    let mut max_abs = 0.0f64;
    let mut sumsq = 0.0f64;
    for k in 0..probe_count {
        let u = probe_vector(blocks, k, &mut rng);
        let v = probe_vector(blocks, k + 1, &mut rng);
        let g_uv = g_bilinear(snap, &u, &v);
        let pi_uv = pi_bilinear(ctx, z, blocks, &u, &v)?;
        let err = (g_uv - pi_uv).norm();
        max_abs = max_abs.max(err);
        sumsq += err * err;
    }
    let point = SpectralPoint::new(z.re, z.im.max(0.0), ctx)?;
    let bulk_scale = if z.im > 0.0 {
        Some(phi_n + ctx.control_parameter(&point)?)
    } else {
        None
    };
    let outside_scale =
        if point.kappa > 0.0 && (z.re < ctx.lambda_minus() || z.re > ctx.lambda_plus()) {
            let n = ctx.dims().n() as f64;
            Some(phi_n + n.powf(-0.5) * (point.kappa + point.eta).powf(-0.25))
        } else {
            None
        };
    Ok(LocalLawReport {
        max_abs_err: max_abs,
        rms_err: (sumsq / probe_count.max(1) as f64).sqrt(),
        bulk_scale,
        outside_scale,
        probe_count,
    })
}

/// Entrywise special case: the law evaluated on standard basis probes.
pub fn entrywise_law_error(
    snap: &ResolventSnapshot,
    ctx: &TheoryContext,
    blocks: IndexBlocks,
    indices: &[(usize, usize)],
) -> Result<f64> {
    let total = blocks.total();
    let mut worst = 0.0f64;
    for &(a, b) in indices {
        let mut u = vec![0.0; total];
        let mut v = vec![0.0; total];
        u[a] = 1.0;
        v[b] = 1.0;
        let g_uv = g_bilinear(snap, &u, &v);
        let pi_uv = pi_bilinear(ctx, snap.z, blocks, &u, &v)?;
        worst = worst.max((g_uv - pi_uv).norm());
    }
    Ok(worst)
}
