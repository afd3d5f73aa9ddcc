//! Edge universality: rescaled null-edge samples against the rescaled GOE
//! largest eigenvalue, and the same comparison after removing the outlier
//! of a supercritical spike.
//!
//! Run with: cargo run --release --example tracy_widom_edge

use cancorr::model::{generate_dataset, spike_for_target_t, CovarianceSpec, DistributionTriple};
use cancorr::spectrum::{goe_edge_samples, ks_statistic, scc_spectrum, Provenance};
use cancorr::{DimensionRatios, TheoryContext};
use rayon::prelude::*;

fn main() -> cancorr::Result<()> {
    let dims = DimensionRatios::new(100, 80, 400)?;
    let ctx = TheoryContext::new(dims);
    let n23 = (dims.n() as f64).powf(2.0 / 3.0);
    let rescale = |l: f64| n23 * (l - ctx.lambda_plus()) / ctx.c_tw();

    println!("sampling the GOE reference (m = 400, 500 samples)...");
    let goe = goe_edge_samples(400, 500, 99)?;
    let goe_mean = goe.iter().sum::<f64>() / goe.len() as f64;
    println!("  mean rescaled GOE edge: {goe_mean:.4} (limit about -1.21)");

    println!("sampling 200 null replicates at (p, q, n) = (100, 80, 400)...");
    let null_model = spike_for_target_t(0.0, &dims, &ctx, 0.1)?;
    let null_edges: Vec<f64> = (0..200u64)
        .into_par_iter()
        .map(|rep| {
            let b = generate_dataset(
                &dims,
                &null_model,
                &DistributionTriple::gaussian(),
                CovarianceSpec::Identity,
                CovarianceSpec::Identity,
                11,
                rep,
            )
            .unwrap();
            let s = scc_spectrum(&b.x, &b.y, &dims, Provenance::Null).unwrap();
            rescale(s.edge())
        })
        .collect();
    let ks_null = ks_statistic(&null_edges, &goe)?;
    println!("  two-sample KS(null edge, GOE) = {ks_null:.4}");

    println!("sampling 200 perturbed replicates with one spike at t = 0.95...");
    let spiked = spike_for_target_t(0.95, &dims, &ctx, 0.1)?;
    let r_plus = spiked.r_plus().unwrap();
    let shifted: Vec<f64> = (0..200u64)
        .into_par_iter()
        .map(|rep| {
            let b = generate_dataset(
                &dims,
                &spiked,
                &DistributionTriple::gaussian(),
                CovarianceSpec::Identity,
                CovarianceSpec::Identity,
                12,
                rep,
            )
            .unwrap();
            let s = scc_spectrum(&b.x_tilde, &b.y_tilde, &dims, Provenance::Perturbed).unwrap();
            rescale(s.values()[r_plus])
        })
        .collect();
    let ks_shifted = ks_statistic(&shifted, &goe)?;
    println!("  two-sample KS(first non-outlier, GOE) = {ks_shifted:.4}");
    println!("\n(the edge law survives the spike; the residual gap is the finite-size");
    println!(" sticking bias, of order 1/(n alpha_+) against an edge width c_TW n^(-2/3))");
    Ok(())
}
