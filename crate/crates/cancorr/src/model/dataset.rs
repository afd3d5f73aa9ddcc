//! Synthetic data matrices for the signal-plus-noise model and the
//! whitening reduction.

use faer::{Mat, Side};

use crate::dims::DimensionRatios;
use crate::error::{Error, Result};

use super::distribution::EntryDistribution;
use super::rng::{stream_rng, StreamRole};
use super::spike::{orthonormal_columns, SpikeModel};

/// Population covariance of one side of the model.
#[derive(Debug, Clone)]
pub enum CovarianceSpec {
    Identity,
    Diagonal(Vec<f64>),
    Full(Mat<f64>),
}

#[derive(Debug, Clone, Copy)]
pub struct DistributionTriple {
    pub x: EntryDistribution,
    pub y: EntryDistribution,
    pub z: EntryDistribution,
}

impl DistributionTriple {
    pub fn gaussian() -> Self {
        Self {
            x: EntryDistribution::Gaussian,
            y: EntryDistribution::Gaussian,
            z: EntryDistribution::Gaussian,
        }
    }

    pub fn all(dist: EntryDistribution) -> Self {
        Self {
            x: dist,
            y: dist,
            z: dist,
        }
    }
}

/// One generated replicate: observed matrices, raw noise/signal components,
/// the loading factors, covariance roots, and the seed coordinates that
/// reproduce it bit for bit.
#[derive(Debug, Clone)]
pub struct DatasetBundle {
    pub dims: DimensionRatios,
    /// `p x n` observed matrix `A Z + C1^(1/2) X`.
    pub x_tilde: Mat<f64>,
    /// `q x n` observed matrix `B Z + C2^(1/2) Y`.
    pub y_tilde: Mat<f64>,
    pub x: Mat<f64>,
    pub y: Mat<f64>,
    /// `r x n` signal matrix.
    pub z: Mat<f64>,
    pub loading_a: Mat<f64>,
    pub loading_b: Mat<f64>,
    /// Left singular frames of the loadings.
    pub left_a: Mat<f64>,
    pub left_b: Mat<f64>,
    /// Right singular frames (in signal coordinates).
    pub right_a: Mat<f64>,
    pub right_b: Mat<f64>,
    pub cov1: CovarianceSpec,
    pub cov2: CovarianceSpec,
    pub master_seed: u64,
    pub replicate: u64,
}

fn fill_scaled(
    rows: usize,
    cols: usize,
    n: usize,
    dist: EntryDistribution,
    rng: &mut impl rand::Rng,
) -> Mat<f64> {
    let scale = 1.0 / (n as f64).sqrt();
    let mut m = Mat::<f64>::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = dist.sample_unit(rng) * scale;
        }
    }
    m
}

/// Symmetric square root of an SPD covariance spec; errors on indefinite or
/// singular input.
fn covariance_sqrt(spec: &CovarianceSpec, dim: usize, name: &str) -> Result<Option<Mat<f64>>> {
    match spec {
        CovarianceSpec::Identity => Ok(None),
        CovarianceSpec::Diagonal(d) => {
            if d.len() != dim {
                return Err(Error::Constraint(format!(
                    "{name}: diagonal covariance has length {}, expected {dim}",
                    d.len()
                )));
            }
            if d.iter().any(|v| *v <= 0.0 || !v.is_finite()) {
                return Err(Error::Constraint(format!(
                    "{name}: diagonal covariance must be strictly positive"
                )));
            }
            Ok(Some(Mat::<f64>::from_fn(dim, dim, |i, j| {
                if i == j {
                    d[i].sqrt()
                } else {
                    0.0
                }
            })))
        }
        CovarianceSpec::Full(c) => {
            if c.nrows() != dim || c.ncols() != dim {
                return Err(Error::Constraint(format!(
                    "{name}: covariance is {} x {}, expected {dim} x {dim}",
                    c.nrows(),
                    c.ncols()
                )));
            }
            let mut asym = 0.0f64;
            for i in 0..dim {
                for j in 0..dim {
                    asym = asym.max((c[(i, j)] - c[(j, i)]).abs());
                }
            }
            if asym > 1e-10 {
                return Err(Error::Constraint(format!(
                    "{name}: covariance must be symmetric (asymmetry {asym:.3e})"
                )));
            }
            let evd = c
                .self_adjoint_eigen(Side::Lower)
                .map_err(|e| Error::RankDeficient(format!("{name}: eigensolve failed: {e:?}")))?;
            let s = evd.S();
            if (0..dim).any(|i| s[i] <= 0.0) {
                return Err(Error::Constraint(format!(
                    "{name}: covariance is not positive definite"
                )));
            }
            let u = evd.U();
            Ok(Some(Mat::<f64>::from_fn(dim, dim, |i, j| {
                let mut acc = 0.0;
                for k in 0..dim {
                    acc += u[(i, k)] * s[k].sqrt() * u[(j, k)];
                }
                acc
            })))
        }
    }
}

/// Symmetric inverse square root; errors when the matrix is numerically
/// singular.
fn sym_inv_sqrt(c: &Mat<f64>, name: &str) -> Result<Mat<f64>> {
    let dim = c.nrows();
    let evd = c
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::RankDeficient(format!("{name}: eigensolve failed: {e:?}")))?;
    let s = evd.S();
    let max = (0..dim).map(|i| s[i]).fold(0.0f64, f64::max);
    if (0..dim).any(|i| s[i] <= 1e-12 * max.max(1e-300)) {
        return Err(Error::RankDeficient(format!(
            "{name}: covariance is numerically singular"
        )));
    }
    let u = evd.U();
    Ok(Mat::<f64>::from_fn(dim, dim, |i, j| {
        let mut acc = 0.0;
        for k in 0..dim {
            acc += u[(i, k)] / s[k].sqrt() * u[(j, k)];
        }
        acc
    }))
}

fn apply_cov_sqrt(sqrt: &Option<Mat<f64>>, m: &Mat<f64>) -> Mat<f64> {
    match sqrt {
        None => m.clone(),
        Some(s) => s * m,
    }
}

/// Generates one replicate of the model, deterministically in
/// `(master_seed, replicate)` and independent of generation order.
pub fn generate_dataset(
    dims: &DimensionRatios,
    spikes: &SpikeModel,
    distributions: &DistributionTriple,
    cov1: CovarianceSpec,
    cov2: CovarianceSpec,
    master_seed: u64,
    replicate: u64,
) -> Result<DatasetBundle> {
    crate::numeric::deterministic_kernels();
    distributions.x.validate()?;
    distributions.y.validate()?;
    distributions.z.validate()?;
    let (p, q, n, r) = (dims.p(), dims.q(), dims.n(), spikes.rank());
    if r > p.min(q) {
        return Err(Error::Constraint(format!(
            "spike rank {r} exceeds min(p, q) = {}",
            p.min(q)
        )));
    }

    let sqrt1 = covariance_sqrt(&cov1, p, "C1")?;
    let sqrt2 = covariance_sqrt(&cov2, q, "C2")?;

    let x = fill_scaled(
        p,
        n,
        n,
        distributions.x,
        &mut stream_rng(master_seed, replicate, StreamRole::NoiseX),
    );
    let y = fill_scaled(
        q,
        n,
        n,
        distributions.y,
        &mut stream_rng(master_seed, replicate, StreamRole::NoiseY),
    );
    let z = fill_scaled(
        r,
        n,
        n,
        distributions.z,
        &mut stream_rng(master_seed, replicate, StreamRole::Signal),
    );

    let left_a = orthonormal_columns(
        p,
        r,
        &mut stream_rng(master_seed, replicate, StreamRole::LeftBasisA),
    );
    let left_b = orthonormal_columns(
        q,
        r,
        &mut stream_rng(master_seed, replicate, StreamRole::LeftBasisB),
    );
    // v^b = v^a M so that <v_i^a, v_j^b> reproduces the alignment
    let right_a = orthonormal_columns(
        r,
        r,
        &mut stream_rng(master_seed, replicate, StreamRole::RightBasis),
    );
    let right_b = &right_a * spikes.alignment();

    let scale_cols = |u: &Mat<f64>, s: &[f64]| {
        Mat::<f64>::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * s[j])
    };
    let loading_a = scale_cols(&left_a, spikes.a_values()) * right_a.transpose();
    let loading_b = scale_cols(&left_b, spikes.b_values()) * right_b.transpose();

    let x_tilde = &loading_a * &z + apply_cov_sqrt(&sqrt1, &x);
    let y_tilde = &loading_b * &z + apply_cov_sqrt(&sqrt2, &y);

    Ok(DatasetBundle {
        dims: *dims,
        x_tilde,
        y_tilde,
        x,
        y,
        z,
        loading_a,
        loading_b,
        left_a,
        left_b,
        right_a,
        right_b,
        cov1,
        cov2,
        master_seed,
        replicate,
    })
}

/// The whitening reduction `(C1^(-1/2) X~, C2^(-1/2) Y~)`: returns an
/// equivalent bundle with identity covariances. Sample spectra are exactly
/// invariant under this transformation.
pub fn whiten(bundle: &DatasetBundle) -> Result<DatasetBundle> {
    crate::numeric::deterministic_kernels();
    let p = bundle.dims.p();
    let q = bundle.dims.q();
    let inv1 = match &bundle.cov1 {
        CovarianceSpec::Identity => None,
        spec => {
            let sqrt = covariance_sqrt(spec, p, "C1")?.expect("non-identity");
            Some(sym_inv_sqrt(&(&sqrt * &sqrt), "C1")?)
        }
    };
    let inv2 = match &bundle.cov2 {
        CovarianceSpec::Identity => None,
        spec => {
            let sqrt = covariance_sqrt(spec, q, "C2")?.expect("non-identity");
            Some(sym_inv_sqrt(&(&sqrt * &sqrt), "C2")?)
        }
    };
    let apply = |inv: &Option<Mat<f64>>, m: &Mat<f64>| match inv {
        None => m.clone(),
        Some(w) => w * m,
    };
    Ok(DatasetBundle {
        dims: bundle.dims,
        x_tilde: apply(&inv1, &bundle.x_tilde),
        y_tilde: apply(&inv2, &bundle.y_tilde),
        x: bundle.x.clone(),
        y: bundle.y.clone(),
        z: bundle.z.clone(),
        loading_a: apply(&inv1, &bundle.loading_a),
        loading_b: apply(&inv2, &bundle.loading_b),
        left_a: bundle.left_a.clone(),
        left_b: bundle.left_b.clone(),
        right_a: bundle.right_a.clone(),
        right_b: bundle.right_b.clone(),
        cov1: CovarianceSpec::Identity,
        cov2: CovarianceSpec::Identity,
        master_seed: bundle.master_seed,
        replicate: bundle.replicate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_spike_model, AlignmentSpec};
    use crate::theory::TheoryContext;

    fn setup(r_spikes: &[f64]) -> (DimensionRatios, SpikeModel) {
        let dims = DimensionRatios::new(100, 80, 400).unwrap();
        let ctx = TheoryContext::new(dims);
        let spikes = make_spike_model(
            r_spikes,
            r_spikes,
            AlignmentSpec::Identity,
            &dims,
            &ctx,
            0.05,
        )
        .unwrap();
        (dims, spikes)
    }

    #[test]
    fn null_model_is_pure_noise() {
        let dims = DimensionRatios::new(100, 80, 400).unwrap();
        let ctx = TheoryContext::new(dims);
        let spikes =
            make_spike_model(&[], &[], AlignmentSpec::Identity, &dims, &ctx, 0.05).unwrap();
        let b = generate_dataset(
            &dims,
            &spikes,
            &DistributionTriple::gaussian(),
            CovarianceSpec::Identity,
            CovarianceSpec::Identity,
            1,
            0,
        )
        .unwrap();
        for i in 0..dims.p() {
            for j in 0..dims.n() {
                assert_eq!(b.x_tilde[(i, j)], b.x[(i, j)]);
            }
        }
    }

    #[test]
    fn identity_covariance_decomposition_is_exact() {
        let (dims, spikes) = setup(&[1.2]);
        let b = generate_dataset(
            &dims,
            &spikes,
            &DistributionTriple::gaussian(),
            CovarianceSpec::Identity,
            CovarianceSpec::Identity,
            3,
            1,
        )
        .unwrap();
        let az = &b.loading_a * &b.z;
        for i in 0..dims.p() {
            for j in 0..dims.n() {
                // exact up to one rounding of the addition
                let diff = (b.x_tilde[(i, j)] - az[(i, j)]) - b.x[(i, j)];
                assert!(diff.abs() <= 1e-16, "residual {diff} at ({i}, {j})");
            }
        }
    }

    #[test]
    fn generation_is_bit_deterministic() {
        let (dims, spikes) = setup(&[1.0, 0.5]);
        let make = || {
            generate_dataset(
                &dims,
                &spikes,
                &DistributionTriple::all(EntryDistribution::StudentT { nu: 6.0 }),
                CovarianceSpec::Identity,
                CovarianceSpec::Identity,
                42,
                7,
            )
            .unwrap()
        };
        let b1 = make();
        let b2 = make();
        for (m1, m2) in [
            (&b1.x_tilde, &b2.x_tilde),
            (&b1.y_tilde, &b2.y_tilde),
            (&b1.z, &b2.z),
        ] {
            for i in 0..m1.nrows() {
                for j in 0..m1.ncols() {
                    assert_eq!(m1[(i, j)], m2[(i, j)]);
                }
            }
        }
        // a different replicate index changes the draw
        let b3 = generate_dataset(
            &dims,
            &spikes,
            &DistributionTriple::all(EntryDistribution::StudentT { nu: 6.0 }),
            CovarianceSpec::Identity,
            CovarianceSpec::Identity,
            42,
            8,
        )
        .unwrap();
        assert_ne!(b1.x[(0, 0)], b3.x[(0, 0)]);
    }

    #[test]
    fn entry_variance_matches_the_scaling() {
        let (dims, spikes) = setup(&[]);
        let b = generate_dataset(
            &dims,
            &spikes,
            &DistributionTriple::gaussian(),
            CovarianceSpec::Identity,
            CovarianceSpec::Identity,
            9,
            0,
        )
        .unwrap();
        let mut sumsq = 0.0;
        let mut count = 0usize;
        for i in 0..dims.p() {
            for j in 0..dims.n() {
                sumsq += b.x[(i, j)] * b.x[(i, j)];
                count += 1;
            }
        }
        let var = sumsq / count as f64;
        let expect = 1.0 / dims.n() as f64;
        assert!(
            (var - expect).abs() < 0.05 * expect,
            "variance {var} vs {expect}"
        );
    }

    #[test]
    fn non_psd_covariance_is_rejected() {
        let (dims, spikes) = setup(&[1.0]);
        let mut c = Mat::<f64>::zeros(100, 100);
        for i in 0..100 {
            c[(i, i)] = if i == 0 { -1.0 } else { 1.0 };
        }
        let err = generate_dataset(
            &dims,
            &spikes,
            &DistributionTriple::gaussian(),
            CovarianceSpec::Full(c),
            CovarianceSpec::Identity,
            1,
            0,
        );
        assert!(matches!(err, Err(Error::Constraint(_))));
        let bad_diag = generate_dataset(
            &dims,
            &spikes,
            &DistributionTriple::gaussian(),
            CovarianceSpec::Diagonal(vec![0.0; 100]),
            CovarianceSpec::Identity,
            1,
            0,
        );
        assert!(bad_diag.is_err());
    }

    #[test]
    fn whiten_identity_is_a_no_op() {
        let (dims, spikes) = setup(&[1.0]);
        let b = generate_dataset(
            &dims,
            &spikes,
            &DistributionTriple::gaussian(),
            CovarianceSpec::Identity,
            CovarianceSpec::Identity,
            5,
            0,
        )
        .unwrap();
        let w = whiten(&b).unwrap();
        for i in 0..dims.p() {
            for j in 0..dims.n() {
                assert_eq!(b.x_tilde[(i, j)], w.x_tilde[(i, j)]);
            }
        }
    }
}
