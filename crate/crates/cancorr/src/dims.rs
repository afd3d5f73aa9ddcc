//! Sample sizes and aspect ratios.

use crate::error::{Error, Result};

/// Default validation margin: the admissible region is
/// `tau <= c2 <= c1` and `c1 + c2 <= 1 - tau`, with `r <= 1/tau` spikes.
pub const DEFAULT_TAU: f64 = 0.01;

/// Sample sizes `(p, q, n)` together with the aspect ratios
/// `c1 = p/n` and `c2 = q/n` that parameterize every limiting formula.
///
/// Convention: `q <= p` (equivalently `c2 <= c1`) and `c1 + c2 < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionRatios {
    p: usize,
    q: usize,
    n: usize,
    c1: f64,
    c2: f64,
    tau: f64,
}

impl DimensionRatios {
    /// Validates with the default margin [`DEFAULT_TAU`].
    pub fn new(p: usize, q: usize, n: usize) -> Result<Self> {
        Self::with_margin(p, q, n, DEFAULT_TAU)
    }

    /// Validates `tau <= c2 <= c1` and `c1 + c2 <= 1 - tau`.
    ///
    /// A smaller `tau` admits more extreme geometries at the caller's risk;
    /// every limit theorem degrades as the margins shrink.
    pub fn with_margin(p: usize, q: usize, n: usize, tau: f64) -> Result<Self> {
        if p == 0 || q == 0 || n == 0 {
            return Err(Error::Constraint(format!(
                "dimensions must be positive, got p = {p}, q = {q}, n = {n}"
            )));
        }
        if !(tau > 0.0 && tau < 0.5) {
            return Err(Error::Constraint(format!(
                "margin tau must lie in (0, 0.5), got {tau}"
            )));
        }
        let c1 = p as f64 / n as f64;
        let c2 = q as f64 / n as f64;
        if c2 > c1 {
            return Err(Error::Constraint(format!(
                "require c2 <= c1 (q <= p), got c1 = {c1}, c2 = {c2}"
            )));
        }
        if c2 < tau {
            return Err(Error::Constraint(format!(
                "require c2 >= tau, got c2 = {c2}, tau = {tau}"
            )));
        }
        if c1 + c2 > 1.0 - tau {
            return Err(Error::Constraint(format!(
                "require c1 + c2 <= 1 - tau, got c1 + c2 = {} with tau = {tau}",
                c1 + c2
            )));
        }
        Ok(Self {
            p,
            q,
            n,
            c1,
            c2,
            tau,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `p/n`, exact for the stored integers.
    pub fn c1(&self) -> f64 {
        self.c1
    }

    /// `q/n`, exact for the stored integers.
    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Largest admissible spike rank, `floor(1/tau)`.
    pub fn max_rank(&self) -> usize {
        (1.0 / self.tau) as usize
    }
}
