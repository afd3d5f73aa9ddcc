//! Predicted deviation radii for spiked spectra, in terms of the entry
//! support levels derived from finite moment orders.

use crate::dims::DimensionRatios;
use crate::error::{Error, Result};
use crate::model::SpikeModel;

/// Noise support level from a finite moment order `a > 4`:
/// `phi_n = n^(-1/2 + 2/a)`. Distributions with all moments use
/// the limiting `n^(-1/2)`.
pub fn phi_support(n: usize, moment_order: Option<f64>) -> f64 {
    let exp = match moment_order {
        Some(a) => -0.5 + 2.0 / a,
        None => -0.5,
    };
    (n as f64).powf(exp)
}

/// Signal support level from a finite moment order `b > 2`:
/// `psi_n = n^(-1/2 + 1/b)`.
pub fn psi_support(n: usize, moment_order: Option<f64>) -> f64 {
    let exp = match moment_order {
        Some(b) => -0.5 + 1.0 / b,
        None => -0.5,
    };
    (n as f64).powf(exp)
}

/// Predicted deviation for one spike: outliers carry a radius around the
/// classical location, sub-threshold spikes an asymmetric window around the
/// bulk edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeviationBound {
    Outlier { radius: f64 },
    Edge { below: f64, above: f64 },
}

/// Large-deviation envelopes for each spike of a classified model:
/// `(phi_n + psi_n) Delta_i + n^{-1/2} Delta_i^{1/2}` for detached spikes,
/// and the window `[-n^{-2/3+eps}, n^eps (phi^2 + psi^2 + n^{-2/3})]`
/// around the edge for the rest.
pub fn bound_envelopes(
    spikes: &SpikeModel,
    dims: &DimensionRatios,
    phi_n: f64,
    psi_n: f64,
    epsilon: f64,
) -> Result<Vec<DeviationBound>> {
    let class = spikes.classification().ok_or_else(|| {
        Error::Constraint(
            "bound envelopes need a spike model classified against a theory context".into(),
        )
    })?;
    let n = dims.n() as f64;
    let r_plus = class.r_plus;
    let mut out = Vec::with_capacity(spikes.rank());
    for (i, &delta) in class.deltas.iter().enumerate() {
        if i < r_plus {
            out.push(DeviationBound::Outlier {
                radius: (phi_n + psi_n) * delta + n.powf(-0.5) * delta.sqrt(),
            });
        } else {
            out.push(DeviationBound::Edge {
                below: n.powf(-2.0 / 3.0 + epsilon),
                above: n.powf(epsilon) * (phi_n * phi_n + psi_n * psi_n + n.powf(-2.0 / 3.0)),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::DimensionRatios;
    use crate::model::{make_spike_model, AlignmentSpec};
    use crate::theory::TheoryContext;

    #[test]
    fn support_levels_from_moment_orders() {
        // a = 4, b = 2 degenerate to order one
        assert!((phi_support(400, Some(4.0)) - 1.0).abs() < 1e-15);
        assert!((psi_support(400, Some(2.0)) - 1.0).abs() < 1e-15);
        // a = 8 at n = 10^4 gives n^{-1/4} = 0.1
        assert!((phi_support(10_000, Some(8.0)) - 0.1).abs() < 1e-12);
        // all moments: n^{-1/2}
        assert!((phi_support(400, None) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn envelopes_split_by_spike_class() {
        let dims = DimensionRatios::new(100, 80, 400).unwrap();
        let ctx = TheoryContext::new(dims);
        let spikes = make_spike_model(
            &[2.0, 0.4],
            &[2.0, 0.4],
            AlignmentSpec::Identity,
            &dims,
            &ctx,
            0.05,
        )
        .unwrap();
        let phi = phi_support(400, None);
        let psi = psi_support(400, None);
        let bounds = bound_envelopes(&spikes, &dims, phi, psi, 0.1).unwrap();
        assert_eq!(bounds.len(), 2);
        match bounds[0] {
            DeviationBound::Outlier { radius } => {
                let delta = spikes.classification().unwrap().deltas[0];
                let expect = (phi + psi) * delta + 400f64.powf(-0.5) * delta.sqrt();
                assert!((radius - expect).abs() < 1e-15);
            }
            _ => panic!("first spike should be an outlier"),
        }
        match bounds[1] {
            DeviationBound::Edge { below, above } => {
                assert!(below > 0.0 && above > 0.0);
                assert!((below - 400f64.powf(-2.0 / 3.0 + 0.1)).abs() < 1e-15);
            }
            _ => panic!("second spike should stick to the edge"),
        }
    }

    #[test]
    fn zero_gap_spike_is_an_edge_case() {
        // a spike exactly at the threshold classifies as non-outlier
        let dims = DimensionRatios::new(100, 80, 400).unwrap();
        let ctx = TheoryContext::new(dims);
        let tc = ctx.t_threshold();
        // pick a = b so that t1 = tc exactly: t = (a^2/(1+a^2))^2
        let a = (tc.sqrt() / (1.0 - tc.sqrt())).sqrt();
        let spikes =
            make_spike_model(&[a], &[a], AlignmentSpec::Identity, &dims, &ctx, 0.05).unwrap();
        let class = spikes.classification().unwrap();
        assert!(class.deltas[0] < 1e-12);
        assert_eq!(class.r_plus, 0);
        let bounds = bound_envelopes(
            &spikes,
            &dims,
            phi_support(400, None),
            psi_support(400, None),
            0.1,
        )
        .unwrap();
        assert!(matches!(bounds[0], DeviationBound::Edge { .. }));
    }

    #[test]
    fn unclassified_model_is_rejected() {
        let dims = DimensionRatios::new(100, 80, 400).unwrap();
        let spikes = SpikeModel::unclassified(&[1.0], &[1.0], AlignmentSpec::Identity).unwrap();
        assert!(matches!(
            bound_envelopes(&spikes, &dims, 0.05, 0.05, 0.1),
            Err(Error::Constraint(_))
        ));
    }
}
