//! Derived spectral constants and theory maps for one geometry: support
//! edges, transition threshold, Tracy-Widom scale, bulk density and
//! quantiles, the outlier map and its inverse, and the local-law control
//! parameter.
//!
//! Run with: cargo run --release --example theory_functions

use cancorr::theory::{classical_locations, SpectralPoint};
use cancorr::{DimensionRatios, TheoryContext};
use num_complex::Complex64;

fn main() -> cancorr::Result<()> {
    let dims = DimensionRatios::new(100, 80, 400)?;
    let ctx = TheoryContext::new(dims);

    println!(
        "geometry: p = {}, q = {}, n = {}",
        dims.p(),
        dims.q(),
        dims.n()
    );
    println!("  c1 = {:.4}, c2 = {:.4}", dims.c1(), dims.c2());
    println!(
        "support edges      lambda_- = {:.9}, lambda_+ = {:.9}",
        ctx.lambda_minus(),
        ctx.lambda_plus()
    );
    println!("BBP threshold      t_c      = {:.9}", ctx.t_threshold());
    println!("edge fluctuation   c_TW     = {:.9}", ctx.c_tw());

    println!("\nbulk density on [lambda_-, lambda_+]:");
    for k in 0..=8 {
        let x = ctx.lambda_minus() + (ctx.lambda_plus() - ctx.lambda_minus()) * k as f64 / 8.0;
        println!("  f({x:.4}) = {:.4}", ctx.bulk_density(x));
    }
    let mass = ctx.upper_tail_mass(ctx.lambda_minus());
    println!("  total mass = {mass:.12}");

    println!("\nclassical locations (every 10th of q = 80):");
    let gammas = classical_locations(&ctx, 80)?;
    for j in (0..80).step_by(10) {
        println!("  gamma_{:<2} = {:.9}", j + 1, gammas[j]);
    }

    println!("\noutlier map across the transition:");
    for t in [0.2, 0.28, 0.3, 0.4, 0.6, 0.8, 1.0] {
        match ctx.outlier_location(t) {
            Ok(theta) => {
                let back = ctx.fc_real(theta)?;
                println!("  t = {t:.2}  ->  theta = g_c(t) = {theta:.6}   (f_c back: {back:.6})");
            }
            Err(_) => println!("  t = {t:.2}  ->  below threshold, sticks to lambda_+"),
        }
    }

    println!("\ncontrol parameter Psi at E = 0.4:");
    for eta in [0.5, 0.1, 0.02, 1.0 / 400.0] {
        let point = SpectralPoint::new(0.4, eta, &ctx)?;
        println!(
            "  eta = {eta:<8} Psi = {:.6}",
            ctx.control_parameter(&point)?
        );
    }

    let z = Complex64::new(0.4, 0.01);
    let tr = ctx.transforms(z)?;
    println!("\nasymptotic transforms at z = {z}:");
    println!("  m1c = {:.6}", tr.m1c);
    println!("  m2c = {:.6}", tr.m2c);
    println!("  m3c = {:.6}", tr.m3c);
    println!("  m4c = {:.6}", tr.m4c);
    println!("  m_c = {:.6}", tr.mc);
    println!("  h   = {:.6}", tr.h);
    Ok(())
}
