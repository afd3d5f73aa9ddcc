//! The outlier map `g_c`, its inverse `f_c`, and their edge behavior.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::edge_sqrt;

use super::TheoryContext;

impl TheoryContext {
    /// `f_c(z) = (z - (c1 + c2 - 2 c1 c2) + sqrt((z - l-)(z - l+)))
    ///           / (2 (1-c1)(1-c2))`
    /// evaluated off the support (complex `z` or real `z > lambda_+`).
    /// Maps `(lambda_+, 1)` monotonically onto `(t_c, 1)`.
    pub fn fc(&self, z: Complex64) -> Complex64 {
        let (c1, c2) = (self.dims().c1(), self.dims().c2());
        let s = edge_sqrt(z, self.lambda_minus(), self.lambda_plus());
        (z - (c1 + c2 - 2.0 * c1 * c2) + s) / (2.0 * (1.0 - c1) * (1.0 - c2))
    }

    /// Real restriction of [`TheoryContext::fc`]; requires `x >= lambda_+`.
    pub fn fc_real(&self, x: f64) -> Result<f64> {
        if x < self.lambda_plus() {
            return Err(Error::Domain(format!(
                "f_c restricted to [lambda_+, inf), got x = {x} < {}",
                self.lambda_plus()
            )));
        }
        Ok(self.fc(Complex64::new(x, 0.0)).re)
    }

    /// `g_c(t) = t (1 - c1 + c1/t)(1 - c2 + c2/t)`, the classical outlier
    /// location for a supercritical spike `t in (t_c, 1]`. Inverse of `f_c`
    /// on `(lambda_+, 1)`.
    pub fn gc(&self, t: f64) -> Result<f64> {
        if t <= self.t_threshold() {
            return Err(Error::Domain(format!(
                "g_c undefined at or below the threshold: t = {t} <= t_c = {}",
                self.t_threshold()
            )));
        }
        if t > 1.0 {
            return Err(Error::Domain(format!("g_c expects t <= 1, got {t}")));
        }
        let (c1, c2) = (self.dims().c1(), self.dims().c2());
        Ok(t * (1.0 - c1 + c1 / t) * (1.0 - c2 + c2 / t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::DimensionRatios;
    use crate::numeric::rel_err;

    fn ctx(p: usize, q: usize, n: usize) -> TheoryContext {
        TheoryContext::new(DimensionRatios::new(p, q, n).unwrap())
    }

    #[test]
    fn fc_at_the_edge_is_the_threshold() {
        for c in [ctx(100, 100, 400), ctx(80, 40, 400), ctx(100, 80, 400)] {
            let fc_edge = c.fc_real(c.lambda_plus()).unwrap();
            assert!((fc_edge - c.t_threshold()).abs() < 1e-14);
        }
    }

    #[test]
    fn gc_fixed_point_at_one() {
        for c in [ctx(100, 100, 400), ctx(80, 40, 400), ctx(100, 80, 400)] {
            assert!((c.gc(1.0).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gc_closed_form_value() {
        let c = ctx(100, 80, 400);
        // 0.6 * (0.75 + 0.25/0.6) * (0.8 + 0.2/0.6)
        assert!((c.gc(0.6).unwrap() - 0.7933333333333333).abs() < 1e-13);
    }

    #[test]
    fn gc_rejects_subcritical() {
        let c = ctx(100, 80, 400);
        assert!(c.gc(c.t_threshold()).is_err());
        assert!(c.gc(0.0).is_err());
        assert!(c.gc(1.5).is_err());
    }

    #[test]
    fn inverse_pair_round_trips() {
        for c in [ctx(100, 100, 400), ctx(80, 40, 400), ctx(100, 80, 400)] {
            let lp = c.lambda_plus();
            for k in 0..200 {
                let x = lp + 1e-6 + (1.0 - lp - 2e-6) * k as f64 / 199.0;
                let round = c.gc(c.fc_real(x).unwrap()).unwrap();
                assert!(
                    (round - x).abs() <= 1e-10,
                    "g_c(f_c({x})) = {round} drifted by {}",
                    (round - x).abs()
                );
            }
            let tc = c.t_threshold();
            for k in 0..200 {
                let t = tc + 1e-6 + (1.0 - tc - 1e-6) * k as f64 / 199.0;
                let round = c.fc_real(c.gc(t).unwrap()).unwrap();
                assert!((round - t).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn square_root_edge_behavior() {
        // |f_c(l+ + k) - t_c| ~ sqrt(k) and |g_c(t) - l+| ~ (t - t_c)^2,
        // with ratios nearly constant across four decades of k.
        for c in [ctx(100, 100, 400), ctx(80, 40, 400), ctx(100, 80, 400)] {
            let lp = c.lambda_plus();
            let tc = c.t_threshold();
            let mut fc_ratios = Vec::new();
            let mut gc_ratios = Vec::new();
            let mut kappa = 1e-6;
            while kappa <= 1e-2 + 1e-12 {
                let fr = (c.fc_real(lp + kappa).unwrap() - tc).abs() / kappa.sqrt();
                assert!(
                    fr > 0.1 && fr < 10.0,
                    "f_c edge ratio {fr} at kappa {kappa}"
                );
                fc_ratios.push(fr);
                kappa *= 10.0;
            }
            // the quadratic window for g_c needs dt well below t_c
            let mut dt = 1e-4;
            while dt <= 1e-2 + 1e-12 {
                let gr = (c.gc(tc + dt).unwrap() - lp).abs() / (dt * dt);
                assert!(gr > 0.1 && gr < 10.0, "g_c edge ratio {gr} at dt {dt}");
                gc_ratios.push(gr);
                dt *= 10.0;
            }
            let spread = |r: &[f64]| {
                let max = r.iter().cloned().fold(f64::MIN, f64::max);
                let min = r.iter().cloned().fold(f64::MAX, f64::min);
                max / min
            };
            assert!(spread(&fc_ratios) < 1.5);
            assert!(spread(&gc_ratios) < 1.5);
        }
    }

    #[test]
    fn fc_complex_agrees_with_product_of_linear_factor_forms() {
        // f_c(z) = z (1 + (1-z) m1c)(1 + (1-z) m2c): the alternate route
        // through the asymptotic transforms.
        let c = ctx(100, 80, 400);
        for &(re, im) in &[(0.4, 0.01), (0.8, 0.3), (1.4, 0.05), (0.05, 2.0)] {
            let z = Complex64::new(re, im);
            let tr = c.transforms(z).unwrap();
            let alt = z * (1.0 + (1.0 - z) * tr.m1c) * (1.0 + (1.0 - z) * tr.m2c);
            assert!(
                rel_err(c.fc(z).re, alt.re) < 1e-11 && (c.fc(z).im - alt.im).abs() < 1e-11,
                "f_c route mismatch at {z}"
            );
        }
    }
}
