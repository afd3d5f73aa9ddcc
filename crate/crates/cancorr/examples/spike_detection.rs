//! Detect and estimate hidden correlated directions: generate a two-spike
//! model, threshold the spectrum at the edge window, invert the outlier
//! map, and run the same estimate through a CSV round trip.
//!
//! Run with: cargo run --release --example spike_detection

use cancorr::harness::{detect_from_csv, ExperimentConfig};
use cancorr::model::{
    generate_dataset, make_spike_model, write_matrix_csv, AlignmentSpec, CovarianceSpec,
    DistributionTriple,
};
use cancorr::spectrum::{detect_spikes, scc_spectrum, Provenance};
use cancorr::theory::bound_envelopes;
use cancorr::{DimensionRatios, TheoryContext};

fn loading_for(t: f64) -> f64 {
    (t.sqrt() / (1.0 - t.sqrt())).sqrt()
}

fn main() -> cancorr::Result<()> {
    let dims = DimensionRatios::new(100, 80, 400)?;
    let ctx = TheoryContext::new(dims);
    // one supercritical spike (t = 0.6) and one hidden by the bulk (t = 0.1)
    let a = vec![loading_for(0.6), loading_for(0.1)];
    let margin = cancorr::model::default_spike_margin(&dims, 0.05, 0.05);
    let spikes = make_spike_model(&a, &a, AlignmentSpec::Identity, &dims, &ctx, margin)?;
    println!(
        "true t = {:?}, threshold t_c = {:.4}, detachable spikes r_+ = {}",
        spikes.t_values(),
        ctx.t_threshold(),
        spikes.r_plus().unwrap()
    );

    let bundle = generate_dataset(
        &dims,
        &spikes,
        &DistributionTriple::gaussian(),
        CovarianceSpec::Identity,
        CovarianceSpec::Identity,
        7,
        0,
    )?;
    let spectrum = scc_spectrum(
        &bundle.x_tilde,
        &bundle.y_tilde,
        &dims,
        Provenance::Perturbed,
    )?;
    println!("top of the spectrum: {:?}", &spectrum.values()[..4]);

    let estimate = detect_spikes(&spectrum, &ctx, 2.0, 0.05)?;
    println!("detected r_hat = {}", estimate.r_hat);
    for (i, t) in estimate.t_hat.iter().enumerate() {
        println!("  t_hat[{i}] = {t:.4}");
    }
    println!(
        "edge gap of the first sticking value: {:?}",
        estimate.edge_gap
    );

    let bounds = bound_envelopes(&spikes, &dims, 0.05, 0.05, 0.1)?;
    println!("predicted deviation envelopes: {bounds:?}");

    // the same estimate through CSV persistence
    let dir = std::env::temp_dir().join("cancorr-example-detect");
    std::fs::create_dir_all(&dir)?;
    let xp = dir.join("x.csv");
    let yp = dir.join("y.csv");
    write_matrix_csv(&xp, &bundle.x_tilde)?;
    write_matrix_csv(&yp, &bundle.y_tilde)?;
    let config = ExperimentConfig::from_json(
        r#"{"dims": {"p": 100, "q": 80, "n": 400}, "campaign": "detect"}"#,
    )?;
    let report = detect_from_csv(&xp, &yp, &config)?;
    println!(
        "CSV round trip: r_hat = {}, t_hat = {:?}",
        report.estimate.r_hat, report.estimate.t_hat
    );
    assert_eq!(report.estimate, estimate);
    Ok(())
}
