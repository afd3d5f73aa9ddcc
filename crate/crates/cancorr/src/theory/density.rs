//! Limiting bulk density, its tail mass, and the classical eigenvalue
//! locations (quantiles).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::{bisect, integrate};

use super::TheoryContext;

impl TheoryContext {
    /// Density of the limiting distribution of the squared sample CCCs,
    /// `f(x) = sqrt((lambda_+ - x)(x - lambda_-)) / (2 pi c2 x (1 - x))`
    /// on the support, zero elsewhere. Total function on the reals.
    pub fn bulk_density(&self, x: f64) -> f64 {
        if x <= self.lambda_minus() || x >= self.lambda_plus() {
            return 0.0;
        }
        let num = ((self.lambda_plus() - x) * (x - self.lambda_minus())).sqrt();
        num / (2.0 * PI * self.dims().c2() * x * (1.0 - x))
    }

    /// Transformed integrand for the substitution `x = lambda_+ - s^2`:
    /// `f(x) dx = g_up(s) ds`, smooth through the edge.
    fn edge_integrand_upper(&self, s: f64) -> f64 {
        let (lm, lp) = (self.lambda_minus(), self.lambda_plus());
        let w = lp - lm;
        let core = (w - s * s).max(0.0).sqrt();
        s * s * core / (PI * self.dims().c2() * (lp - s * s) * (1.0 - lp + s * s))
    }

    /// Counterpart for `x = lambda_- + s^2`. When `lambda_- = 0` the
    /// apparent `0/0` at `s = 0` has the finite limit `sqrt(w) / (pi c2)`.
    fn edge_integrand_lower(&self, s: f64) -> f64 {
        let (lm, lp) = (self.lambda_minus(), self.lambda_plus());
        let w = lp - lm;
        let shifted = lm + s * s;
        if shifted == 0.0 {
            return w.sqrt() / (PI * self.dims().c2());
        }
        let core = (w - s * s).max(0.0).sqrt();
        s * s * core / (PI * self.dims().c2() * shifted * (1.0 - shifted))
    }

    /// Mass of the density above `x`, by adaptive quadrature with the
    /// edge substitutions `x = lambda_+ - s^2` / `x = lambda_- + s^2` so
    /// the square-root vanishing never degrades accuracy.
    pub fn upper_tail_mass(&self, x: f64) -> f64 {
        let (lm, lp) = (self.lambda_minus(), self.lambda_plus());
        if x >= lp {
            return 0.0;
        }
        let lo = x.max(lm);
        let mid = 0.5 * (lm + lp);
        let tol = 1e-13;
        if lo >= mid {
            let s_max = (lp - lo).sqrt();
            integrate(|s| self.edge_integrand_upper(s), 0.0, s_max, tol)
        } else {
            let upper = integrate(
                |s| self.edge_integrand_upper(s),
                0.0,
                (lp - mid).sqrt(),
                tol,
            );
            let lower = integrate(
                |s| self.edge_integrand_lower(s),
                (lo - lm).sqrt(),
                (mid - lm).sqrt(),
                tol,
            );
            upper + lower
        }
    }

    /// Classical location of the `j`-th eigenvalue (1-based),
    /// `gamma_j = sup { x : integral of f over (x, inf) > (j-1)/q }`.
    /// `gamma_1 = lambda_+` exactly.
    pub fn classical_location(&self, j: usize) -> Result<f64> {
        let q = self.dims().q();
        if j == 0 || j > q {
            return Err(Error::Argument(format!(
                "quantile index j = {j} outside 1..={q}"
            )));
        }
        if j == 1 {
            return Ok(self.lambda_plus());
        }
        let target = (j - 1) as f64 / q as f64;
        let (lm, lp) = (self.lambda_minus(), self.lambda_plus());
        // tail mass is monotone decreasing from ~1 at lambda_- to 0 at lambda_+
        bisect(|x| self.upper_tail_mass(x) - target, lm, lp, 1e-12, 0.0)
    }
}

/// The full grid `gamma_1 >= ... >= gamma_count`, computed by successive
/// CDF inversions with shrinking brackets.
pub fn classical_locations(ctx: &TheoryContext, count: usize) -> Result<Vec<f64>> {
    let q = ctx.dims().q();
    if count == 0 || count > q {
        return Err(Error::Argument(format!(
            "quantile count {count} outside 1..={q}"
        )));
    }
    let mut out = Vec::with_capacity(count);
    out.push(ctx.lambda_plus());
    let mut hi = ctx.lambda_plus();
    for j in 2..=count {
        let target = (j - 1) as f64 / q as f64;
        let gamma = bisect(
            |x| ctx.upper_tail_mass(x) - target,
            ctx.lambda_minus(),
            hi,
            1e-12,
            0.0,
        )?;
        out.push(gamma);
        hi = gamma;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::DimensionRatios;

    fn ctx(p: usize, q: usize, n: usize) -> TheoryContext {
        TheoryContext::new(DimensionRatios::new(p, q, n).unwrap())
    }

    /// Plain composite Simpson on the edge-substituted halves; this is the
    /// independent integrator the quadrature answers are checked against.
    /// The substituted integrands are written out from the density formula
    /// so the endpoints carry their continuous limits.
    fn simpson_tail(ctx: &TheoryContext, x: f64, panels: usize) -> f64 {
        let (lm, lp) = (ctx.lambda_minus(), ctx.lambda_plus());
        let (c2, w) = (ctx.dims().c2(), lp - lm);
        let lo = x.max(lm);
        if lo >= lp {
            return 0.0;
        }
        let mid = 0.5 * (lm + lp);
        let simpson = |g: &dyn Fn(f64) -> f64, a: f64, b: f64| -> f64 {
            let m = 2 * panels;
            let h = (b - a) / m as f64;
            let mut acc = g(a) + g(b);
            for k in 1..m {
                let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
                acc += weight * g(a + k as f64 * h);
            }
            acc * h / 3.0
        };
        let pi = std::f64::consts::PI;
        let up = |s: f64| {
            s * s * (w - s * s).max(0.0).sqrt() / (pi * c2 * (lp - s * s) * (1.0 - lp + s * s))
        };
        let dn = |s: f64| {
            let shifted = lm + s * s;
            if shifted == 0.0 {
                w.sqrt() / (pi * c2)
            } else {
                s * s * (w - s * s).max(0.0).sqrt() / (pi * c2 * shifted * (1.0 - shifted))
            }
        };
        if lo >= mid {
            simpson(&up, 0.0, (lp - lo).sqrt())
        } else {
            simpson(&up, 0.0, (lp - mid).sqrt()) + simpson(&dn, (lo - lm).sqrt(), (mid - lm).sqrt())
        }
    }

    #[test]
    fn density_support_and_sign() {
        let c = ctx(100, 80, 400);
        assert_eq!(c.bulk_density(c.lambda_plus()), 0.0);
        assert_eq!(c.bulk_density(c.lambda_plus() + 0.1), 0.0);
        assert_eq!(c.bulk_density(c.lambda_minus() - 0.1), 0.0);
        assert_eq!(c.bulk_density(-1.0), 0.0);
        assert_eq!(c.bulk_density(2.0), 0.0);
        let mid = 0.5 * (c.lambda_minus() + c.lambda_plus());
        assert!(c.bulk_density(mid) > 0.0);
    }

    #[test]
    fn density_normalizes_to_one() {
        for c in [ctx(100, 100, 400), ctx(80, 40, 400), ctx(100, 80, 400)] {
            let mass = c.upper_tail_mass(c.lambda_minus());
            assert!(
                (mass - 1.0).abs() < 1e-8,
                "normalization off: {mass} for c1={} c2={}",
                c.dims().c1(),
                c.dims().c2()
            );
            // cross-check against the independent Simpson integrator
            let simpson = simpson_tail(&c, c.lambda_minus(), 4000);
            assert!((mass - simpson).abs() < 1e-9);
        }
    }

    #[test]
    fn tail_mass_matches_simpson_at_interior_points() {
        let c = ctx(100, 80, 400);
        for frac in [0.15, 0.4, 0.75, 0.95] {
            let x = c.lambda_minus() + frac * (c.lambda_plus() - c.lambda_minus());
            let a = c.upper_tail_mass(x);
            let b = simpson_tail(&c, x, 4000);
            assert!((a - b).abs() < 1e-9, "tail mismatch at {x}: {a} vs {b}");
        }
    }

    #[test]
    fn first_quantile_is_the_edge() {
        let c = ctx(100, 80, 400);
        assert_eq!(c.classical_location(1).unwrap(), c.lambda_plus());
        assert!(c.classical_location(0).is_err());
        assert!(c.classical_location(81).is_err());
    }

    #[test]
    fn last_quantile_sits_just_above_the_lower_edge() {
        let c = ctx(100, 80, 400);
        let g_q = c.classical_location(80).unwrap();
        assert!(g_q > c.lambda_minus());
        // defining property: mass above gamma_q is (q-1)/q
        let tail = simpson_tail(&c, g_q, 4000);
        assert!((tail - 79.0 / 80.0).abs() < 1e-8);
        // and it is close to the lower edge on the scale of the support
        assert!(g_q - c.lambda_minus() < 0.1 * (c.lambda_plus() - c.lambda_minus()));
    }

    #[test]
    fn median_quantile_frozen_value() {
        // q = 80, j = 40: target tail mass 39/80, value frozen from the
        // Simpson + bisection oracle below.
        let c = ctx(100, 80, 400);
        let med = c.classical_location(40).unwrap();
        let oracle = bisect(
            |x| simpson_tail(&c, x, 4000) - 39.0 / 80.0,
            c.lambda_minus(),
            c.lambda_plus(),
            1e-12,
            0.0,
        )
        .unwrap();
        assert!(
            (med - oracle).abs() < 1e-10,
            "impl {med} vs oracle {oracle}"
        );
        assert!((med - 0.2179573569).abs() < 1e-8);
        // defining property at the target mass
        assert!((c.upper_tail_mass(med) - 39.0 / 80.0).abs() < 1e-10);
    }

    #[test]
    fn quantile_grid_is_strictly_decreasing() {
        let c = ctx(100, 80, 400);
        let grid = classical_locations(&c, 80).unwrap();
        assert_eq!(grid.len(), 80);
        for w in grid.windows(2) {
            assert!(w[0] > w[1], "grid not strictly decreasing: {w:?}");
        }
        for (idx, g) in grid.iter().enumerate() {
            let single = c.classical_location(idx + 1).unwrap();
            assert!((g - single).abs() < 1e-9);
        }
    }
}
