//! Population spike sets: loading singular values, singular-vector
//! alignment, and the derived squared population canonical correlations.

use faer::{Mat, Side};
use rand_distr::{Distribution, StandardNormal};

use crate::dims::DimensionRatios;
use crate::error::{Error, Result};
use crate::theory::TheoryContext;

use super::rng::{stream_rng, StreamRole};

/// How the right singular bases of the two loading matrices are coupled:
/// the alignment matrix has entries `<v_i^a, v_j^b>`.
#[derive(Debug, Clone)]
pub enum AlignmentSpec {
    Identity,
    RandomOrthogonal { seed: u64 },
    Explicit(Mat<f64>),
}

/// Classification of spikes against a theory context.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeClassification {
    /// `Delta_i = |t_i - t_c|`.
    pub deltas: Vec<f64>,
    /// `alpha_+ = min_i Delta_i`.
    pub alpha_plus: f64,
    /// Number of spikes with `t_i - t_c >= margin`.
    pub r_plus: usize,
    /// The margin used for the count.
    pub margin: f64,
}

/// Rank, loading singular values, right-basis alignment, and the derived
/// descending squared population CCCs `t_1 >= ... >= t_r`.
#[derive(Debug, Clone)]
pub struct SpikeModel {
    a_values: Vec<f64>,
    b_values: Vec<f64>,
    alignment: Mat<f64>,
    t_values: Vec<f64>,
    classification: Option<SpikeClassification>,
}

const ORTHOGONALITY_TOL: f64 = 1e-12;

fn check_singular_values(name: &str, values: &[f64]) -> Result<()> {
    for w in values.windows(2) {
        if w[1] > w[0] {
            return Err(Error::Constraint(format!(
                "{name} singular values must be descending, got {values:?}"
            )));
        }
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Constraint(format!(
            "{name} singular values must be finite and nonnegative, got {values:?}"
        )));
    }
    Ok(())
}

fn resolve_alignment(spec: &AlignmentSpec, r: usize) -> Result<Mat<f64>> {
    let m = match spec {
        AlignmentSpec::Identity => Mat::<f64>::from_fn(r, r, |i, j| if i == j { 1.0 } else { 0.0 }),
        AlignmentSpec::RandomOrthogonal { seed } => {
            let mut rng = stream_rng(*seed, 0, StreamRole::Alignment);
            random_orthogonal(r, &mut rng)
        }
        AlignmentSpec::Explicit(m) => m.clone(),
    };
    if m.nrows() != r || m.ncols() != r {
        return Err(Error::Constraint(format!(
            "alignment must be {r} x {r}, got {} x {}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut worst = 0.0f64;
    for i in 0..r {
        for j in 0..r {
            let mut dot = 0.0;
            for k in 0..r {
                dot += m[(i, k)] * m[(j, k)];
            }
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    if worst > ORTHOGONALITY_TOL {
        return Err(Error::Constraint(format!(
            "alignment is not orthogonal: |M M^T - I| = {worst:.3e}"
        )));
    }
    Ok(m)
}

/// Squared population CCCs: eigenvalues of
/// `S_a M S_b^2 M^T S_a` with `S_a = Sigma_a (I + Sigma_a^2)^(-1/2)` and
/// `S_b^2 = Sigma_b^2 (I + Sigma_b^2)^(-1)`, sorted descending.
fn population_t_values(a: &[f64], b: &[f64], m: &Mat<f64>) -> Result<Vec<f64>> {
    let r = a.len();
    if r == 0 {
        return Ok(Vec::new());
    }
    let sa: Vec<f64> = a.iter().map(|ai| ai / (1.0 + ai * ai).sqrt()).collect();
    let sb2: Vec<f64> = b.iter().map(|bi| bi * bi / (1.0 + bi * bi)).collect();
    let t_mat = Mat::<f64>::from_fn(r, r, |i, j| {
        let mut acc = 0.0;
        for k in 0..r {
            acc += m[(i, k)] * sb2[k] * m[(j, k)];
        }
        sa[i] * acc * sa[j]
    });
    let mut evals = t_mat
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::RankDeficient(format!("spike eigensolve failed: {e:?}")))?;
    evals.sort_by(|x, y| y.total_cmp(x));
    Ok(evals.into_iter().map(|t| t.clamp(0.0, 1.0)).collect())
}

impl SpikeModel {
    /// Builds the spike geometry without classifying against a theory
    /// context; classification-dependent quantities stay unavailable.
    pub fn unclassified(
        a_values: &[f64],
        b_values: &[f64],
        alignment: AlignmentSpec,
    ) -> Result<Self> {
        crate::numeric::deterministic_kernels();
        if a_values.len() != b_values.len() {
            return Err(Error::Constraint(format!(
                "loading ranks differ: {} vs {}",
                a_values.len(),
                b_values.len()
            )));
        }
        check_singular_values("a", a_values)?;
        check_singular_values("b", b_values)?;
        let alignment = resolve_alignment(&alignment, a_values.len())?;
        let t_values = population_t_values(a_values, b_values, &alignment)?;
        Ok(Self {
            a_values: a_values.to_vec(),
            b_values: b_values.to_vec(),
            alignment,
            t_values,
            classification: None,
        })
    }

    pub fn rank(&self) -> usize {
        self.a_values.len()
    }

    pub fn a_values(&self) -> &[f64] {
        &self.a_values
    }

    pub fn b_values(&self) -> &[f64] {
        &self.b_values
    }

    pub fn alignment(&self) -> &Mat<f64> {
        &self.alignment
    }

    /// Descending squared population CCCs.
    pub fn t_values(&self) -> &[f64] {
        &self.t_values
    }

    pub fn classification(&self) -> Option<&SpikeClassification> {
        self.classification.as_ref()
    }

    /// Detached-spike count, when classified.
    pub fn r_plus(&self) -> Option<usize> {
        self.classification.as_ref().map(|c| c.r_plus)
    }
}

/// Builds and classifies a spike model: `Delta_i`, `alpha_+` and the
/// detached count `r_+` are evaluated against `ctx` with the supplied
/// detection margin.
pub fn make_spike_model(
    a_values: &[f64],
    b_values: &[f64],
    alignment: AlignmentSpec,
    dims: &DimensionRatios,
    ctx: &TheoryContext,
    margin: f64,
) -> Result<SpikeModel> {
    if a_values.len() > dims.max_rank() {
        return Err(Error::Constraint(format!(
            "rank {} exceeds 1/tau = {}",
            a_values.len(),
            dims.max_rank()
        )));
    }
    let mut model = SpikeModel::unclassified(a_values, b_values, alignment)?;
    let tc = ctx.t_threshold();
    let deltas: Vec<f64> = model.t_values.iter().map(|t| (t - tc).abs()).collect();
    let alpha_plus = deltas.iter().cloned().fold(f64::INFINITY, f64::min);
    let r_plus = model
        .t_values
        .iter()
        .take_while(|t| **t - tc >= margin)
        .count();
    model.classification = Some(SpikeClassification {
        deltas,
        alpha_plus: if alpha_plus.is_finite() {
            alpha_plus
        } else {
            0.0
        },
        r_plus,
        margin,
    });
    Ok(model)
}

/// Rank-1 aligned spike with `a = b` chosen so the squared population CCC
/// equals `t`: `a^2 = sqrt(t) / (1 - sqrt(t))`.
pub fn spike_for_target_t(
    t: f64,
    dims: &DimensionRatios,
    ctx: &TheoryContext,
    margin: f64,
) -> Result<SpikeModel> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::Constraint(format!(
            "target squared correlation must lie in [0, 1), got {t}"
        )));
    }
    if t == 0.0 {
        return make_spike_model(&[0.0], &[0.0], AlignmentSpec::Identity, dims, ctx, margin);
    }
    let a = (t.sqrt() / (1.0 - t.sqrt())).sqrt();
    make_spike_model(&[a], &[a], AlignmentSpec::Identity, dims, ctx, margin)
}

/// Orthonormal columns via QR of a standard gaussian draw, with the sign
/// convention `R_ii > 0` so the result is a deterministic function of the
/// rng stream.
pub fn random_orthogonal<R: rand::Rng + ?Sized>(r: usize, rng: &mut R) -> Mat<f64> {
    orthonormal_columns(r, r, rng)
}

/// `rows x cols` matrix with orthonormal columns (`cols <= rows`).
pub fn orthonormal_columns<R: rand::Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Mat<f64> {
    assert!(cols <= rows, "need cols <= rows for an orthonormal frame");
    crate::numeric::deterministic_kernels();
    if cols == 0 {
        return Mat::<f64>::zeros(rows, 0);
    }
    let g = Mat::<f64>::from_fn(rows, cols, |_, _| {
        Distribution::<f64>::sample(&StandardNormal, rng)
    });
    let qr = g.qr();
    let q = qr.compute_thin_Q();
    let rfac = qr.thin_R();
    // fix signs so the factorization is unique
    Mat::<f64>::from_fn(rows, cols, |i, j| {
        if rfac[(j, j)] < 0.0 {
            -q[(i, j)]
        } else {
            q[(i, j)]
        }
    })
}
