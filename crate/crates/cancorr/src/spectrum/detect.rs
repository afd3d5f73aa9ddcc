//! Spike detection above the edge window and estimation by inverting the
//! outlier map.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::theory::TheoryContext;

use super::Spectrum;

/// Detected outlier count and the implied population squared correlations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeEstimate {
    pub r_hat: usize,
    /// `f_c` evaluated at each detected eigenvalue, largest first.
    pub t_hat: Vec<f64>,
    /// Gap between the first undetected eigenvalue and `lambda_+`;
    /// absent when every eigenvalue was detected.
    pub edge_gap: Option<f64>,
}

/// Counts eigenvalues above `lambda_+ + window_constant * n^(-2/3 + epsilon)`
/// and estimates each detached spike as `t = f_c(lambda)`.
pub fn detect_spikes(
    spectrum: &Spectrum,
    ctx: &TheoryContext,
    window_constant: f64,
    epsilon: f64,
) -> Result<SpikeEstimate> {
    let n = spectrum.dims().n() as f64;
    let threshold = ctx.lambda_plus() + window_constant * n.powf(-2.0 / 3.0 + epsilon);
    let r_hat = spectrum
        .values()
        .iter()
        .take_while(|v| **v > threshold)
        .count();
    let mut t_hat = Vec::with_capacity(r_hat);
    for &lambda in &spectrum.values()[..r_hat] {
        // detected values sit strictly above lambda_+, where f_c is real
        let t = ctx.fc_real(lambda.min(1.0))?;
        t_hat.push(t.min(1.0));
    }
    let edge_gap = spectrum.values().get(r_hat).map(|v| v - ctx.lambda_plus());
    Ok(SpikeEstimate {
        r_hat,
        t_hat,
        edge_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::DimensionRatios;
    use crate::model::{generate_dataset, spike_for_target_t, CovarianceSpec, DistributionTriple};
    use crate::spectrum::{scc_spectrum, Provenance};
    use faer::Mat;
    use rayon::prelude::*;

    fn dims() -> DimensionRatios {
        DimensionRatios::new(100, 80, 400).unwrap()
    }

    #[test]
    fn null_model_is_quiet_at_the_wide_default_window() {
        let d = dims();
        let ctx = TheoryContext::new(d);
        let model = spike_for_target_t(0.0, &d, &ctx, 0.1).unwrap();
        let quiet: usize = (0..200u64)
            .into_par_iter()
            .map(|rep| {
                let b = generate_dataset(
                    &d,
                    &model,
                    &DistributionTriple::gaussian(),
                    CovarianceSpec::Identity,
                    CovarianceSpec::Identity,
                    31,
                    rep,
                )
                .unwrap();
                let s = scc_spectrum(&b.x, &b.y, &d, Provenance::Null).unwrap();
                let est = detect_spikes(&s, &ctx, 4.0, 0.1).unwrap();
                usize::from(est.r_hat == 0)
            })
            .sum();
        assert!(
            quiet >= 190,
            "false positives in {}/200 null runs",
            200 - quiet
        );
    }

    #[test]
    fn supercritical_spike_is_detected_and_estimated() {
        let d = dims();
        let ctx = TheoryContext::new(d);
        // spikes t = (0.6, 0.1); only the first detaches
        let a1 = (0.6f64.sqrt() / (1.0 - 0.6f64.sqrt())).sqrt();
        let a2 = (0.1f64.sqrt() / (1.0 - 0.1f64.sqrt())).sqrt();
        let model = crate::model::make_spike_model(
            &[a1, a2],
            &[a1, a2],
            crate::model::AlignmentSpec::Identity,
            &d,
            &ctx,
            0.1,
        )
        .unwrap();
        let results: Vec<(usize, f64)> = (0..200u64)
            .into_par_iter()
            .map(|rep| {
                let b = generate_dataset(
                    &d,
                    &model,
                    &DistributionTriple::gaussian(),
                    CovarianceSpec::Identity,
                    CovarianceSpec::Identity,
                    32,
                    rep,
                )
                .unwrap();
                let s = scc_spectrum(&b.x_tilde, &b.y_tilde, &d, Provenance::Perturbed).unwrap();
                let est = detect_spikes(&s, &ctx, 2.0, 0.05).unwrap();
                let t1 = est.t_hat.first().copied().unwrap_or(0.0);
                (est.r_hat, t1)
            })
            .collect();
        let exact = results.iter().filter(|(r, _)| *r == 1).count();
        let close = results
            .iter()
            .filter(|(r, t)| *r >= 1 && (t - 0.6).abs() <= 0.08)
            .count();
        assert!(exact >= 180, "r_hat = 1 in only {exact}/200 runs");
        assert!(
            close >= 180,
            "t estimate within 0.08 in only {close}/200 runs"
        );
    }

    #[test]
    fn perfect_correlation_estimates_to_one() {
        // share one row between the two matrices: the top correlation is 1
        let d = DimensionRatios::new(10, 8, 60).unwrap();
        let ctx = TheoryContext::new(d);
        let model = spike_for_target_t(0.0, &d, &ctx, 0.1).unwrap();
        let b = generate_dataset(
            &d,
            &model,
            &DistributionTriple::gaussian(),
            CovarianceSpec::Identity,
            CovarianceSpec::Identity,
            77,
            0,
        )
        .unwrap();
        let mut y = b.y.clone();
        for j in 0..60 {
            let v = b.x[(0, j)];
            y[(0, j)] = v;
        }
        let s = scc_spectrum(&b.x, &y, &d, Provenance::Perturbed).unwrap();
        assert!((s.edge() - 1.0).abs() < 1e-10);
        let est = detect_spikes(&s, &ctx, 2.0, 0.05).unwrap();
        assert!(est.r_hat >= 1);
        assert!((est.t_hat[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn empty_detection_reports_the_edge_gap() {
        let d = dims();
        let ctx = TheoryContext::new(d);
        let vals = vec![ctx.lambda_plus() - 0.01; 80];
        let s = crate::spectrum::Spectrum::from_values(vals, d, Provenance::Null).unwrap();
        let est = detect_spikes(&s, &ctx, 4.0, 0.1).unwrap();
        assert_eq!(est.r_hat, 0);
        assert!(est.t_hat.is_empty());
        assert!((est.edge_gap.unwrap() + 0.01).abs() < 1e-12);
    }

    #[test]
    fn degenerate_spikes_are_supported() {
        // two exactly equal supercritical spikes produce two outliers at
        // the same classical location
        let d = dims();
        let ctx = TheoryContext::new(d);
        let a = (0.6f64.sqrt() / (1.0 - 0.6f64.sqrt())).sqrt();
        let model = crate::model::make_spike_model(
            &[a, a],
            &[a, a],
            crate::model::AlignmentSpec::Identity,
            &d,
            &ctx,
            0.1,
        )
        .unwrap();
        assert!((model.t_values()[0] - model.t_values()[1]).abs() < 1e-12);
        assert_eq!(model.r_plus(), Some(2));
        let theta = ctx.gc(0.6).unwrap();
        let both: usize = (0..30u64)
            .into_par_iter()
            .map(|rep| {
                let b = generate_dataset(
                    &d,
                    &model,
                    &DistributionTriple::gaussian(),
                    CovarianceSpec::Identity,
                    CovarianceSpec::Identity,
                    83,
                    rep,
                )
                .unwrap();
                let s = scc_spectrum(&b.x_tilde, &b.y_tilde, &d, Provenance::Perturbed).unwrap();
                let est = detect_spikes(&s, &ctx, 2.0, 0.05).unwrap();
                let near =
                    (s.values()[0] - theta).abs() < 0.08 && (s.values()[1] - theta).abs() < 0.08;
                usize::from(est.r_hat == 2 && near)
            })
            .sum();
        assert!(
            both >= 24,
            "degenerate pair detected in only {both}/30 seeds"
        );
    }

    #[test]
    fn serde_shape() {
        let est = SpikeEstimate {
            r_hat: 1,
            t_hat: vec![0.61],
            edge_gap: Some(0.002),
        };
        let s = serde_json::to_string(&est).unwrap();
        assert!(s.contains("\"r_hat\":1"));
        let back: SpikeEstimate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, est);
    }

    #[test]
    fn detection_thresholds_scale_with_n() {
        // sanity on the window arithmetic itself
        let d = dims();
        let ctx = TheoryContext::new(d);
        let vals = vec![ctx.lambda_plus() + 0.05; 80];
        let s = crate::spectrum::Spectrum::from_values(
            vals.iter().map(|v| v.min(1.0)).collect(),
            d,
            Provenance::Perturbed,
        )
        .unwrap();
        // a window so wide nothing passes
        let none = detect_spikes(&s, &ctx, 40.0, 0.1).unwrap();
        assert_eq!(none.r_hat, 0);
        // a tight window detects everything above the edge
        let all = detect_spikes(&s, &ctx, 0.5, 0.0).unwrap();
        assert_eq!(all.r_hat, 80);
        assert!(all.edge_gap.is_none());
        let _ = Mat::<f64>::zeros(1, 1);
    }
}
