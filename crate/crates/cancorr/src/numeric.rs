//! Shared numerical kernels: branch-consistent square roots, adaptive
//! Gauss-Kronrod quadrature, bracketed root finding, and small dense
//! determinants with pivot-sign tracking.

use std::sync::Once;

use num_complex::Complex64;

use crate::error::{Error, Result};

static KERNEL_INIT: Once = Once::new();

/// Pins the dense linear algebra kernels to sequential execution, once per
/// process. Parallel kernel splits are not bitwise reproducible across
/// schedules; replicate-level parallelism supplies the throughput instead,
/// and artifacts stay byte-identical across worker counts.
pub fn deterministic_kernels() {
    KERNEL_INIT.call_once(|| {
        faer::set_global_parallelism(faer::Par::Seq);
    });
}

/// Square root on the branch whose boundary values continue the upper half
/// plane: `Im sqrt(w) >= 0` for `Im w >= 0`, positive root for real `w >= 0`,
/// and the conjugate-symmetric extension `sqrt(conj w) = conj(sqrt w)` below
/// the real axis.
pub fn branch_sqrt(w: Complex64) -> Complex64 {
    if w.im < 0.0 {
        return branch_sqrt(w.conj()).conj();
    }
    let s = w.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

/// `sqrt((z - a)(z - b))` with each factor on the [`branch_sqrt`] branch.
/// For real `z > max(a, b)` both factors are positive reals.
pub fn edge_sqrt(z: Complex64, a: f64, b: f64) -> Complex64 {
    branch_sqrt(z - a) * branch_sqrt(z - b)
}

// 15-point Kronrod abscissae/weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]` by interval
/// halving, to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // (lo, hi, value, err) work queue; worst interval first.
    let (v0, e0) = gk15(&f, a, b);
    let mut intervals = vec![(a, b, v0, e0)];
    let max_intervals = 4096;
    loop {
        let total_err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if total_err <= tol || intervals.len() >= max_intervals {
            return intervals.iter().map(|iv| iv.2).sum();
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval no longer splittable in f64
            let (v, e) = gk15(&f, lo, hi);
            intervals.push((lo, hi, v, 0.0 * e));
            continue;
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Bisection on a bracketing interval `[lo, hi]` with `f(lo)` and `f(hi)` of
/// opposite signs. Stops when the bracket is narrower than `xtol` or the
/// midpoint residual is below `ftol`. Returns the midpoint of the final
/// bracket.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, xtol: f64, ftol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Argument(format!(
            "bisect: no sign change on [{lo}, {hi}] (f = {flo}, {fhi})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < xtol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fmid = f(mid);
        if fmid == 0.0 || fmid.abs() < ftol {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Determinant of a small dense complex matrix (row-major), by Gaussian
/// elimination with partial pivoting. Intended for low-rank blocks.
pub fn small_det(data: &mut [Complex64], k: usize) -> Complex64 {
    debug_assert_eq!(data.len(), k * k);
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..k {
        let mut pivot_row = col;
        let mut pivot_mag = data[col * k + col].norm_sqr();
        for row in col + 1..k {
            let mag = data[row * k + col].norm_sqr();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if pivot_mag == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot_row != col {
            for j in 0..k {
                data.swap(col * k + j, pivot_row * k + j);
            }
            det = -det;
        }
        let pivot = data[col * k + col];
        det *= pivot;
        for row in col + 1..k {
            let factor = data[row * k + col] / pivot;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for j in col..k {
                let sub = factor * data[col * k + j];
                data[row * k + j] -= sub;
            }
        }
    }
    det
}

/// Two-sided relative error, `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Relative error for complex values.
pub fn rel_err_c(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_sqrt_conventions() {
        assert_eq!(
            branch_sqrt(Complex64::new(4.0, 0.0)),
            Complex64::new(2.0, 0.0)
        );
        let s = branch_sqrt(Complex64::new(-1.0, 0.0));
        assert!((s - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        // conjugate symmetry off the real axis
        let w = Complex64::new(-0.3, 0.7);
        let a = branch_sqrt(w.conj());
        let b = branch_sqrt(w).conj();
        assert!((a - b).norm() < 1e-15);
        // square of the root recovers the argument on both half planes
        for &w in &[Complex64::new(0.2, 1.3), Complex64::new(-2.0, -0.4)] {
            let s = branch_sqrt(w);
            assert!((s * s - w).norm() < 1e-14);
        }
    }

    #[test]
    fn quadrature_polynomial_and_singular() {
        let exact = 2.0 / 3.0;
        let got = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12);
        assert!((got - exact).abs() < 1e-9);
        let got = integrate(|x: f64| 3.0 * x * x + 1.0, -1.0, 2.0, 1e-12);
        assert!((got - 12.0).abs() < 1e-10);
    }

    #[test]
    fn bisect_finds_root() {
        let root = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 0.0).unwrap();
        assert!((root - 2f64.sqrt()).abs() < 1e-12);
        assert!(bisect(|x| x * x + 1.0, 0.0, 1.0, 1e-12, 0.0).is_err());
    }

    #[test]
    fn small_det_matches_closed_form() {
        // [[1, 2], [3, 4]] has determinant -2
        let mut m = [
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(3.0, 0.0),
            Complex64::new(4.0, 0.0),
        ];
        let d = small_det(&mut m, 2);
        assert!((d - Complex64::new(-2.0, 0.0)).norm() < 1e-14);
    }
}
