//! Entry distributions, all normalized so a matrix entry has mean zero and
//! variance `1/n` after scaling.

use rand::Rng;
use rand_distr::{Distribution, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EntryDistribution {
    Gaussian,
    Rademacher,
    UniformSymmetric,
    /// Student-t with `nu > 2` degrees of freedom, rescaled to unit variance.
    /// Tail index `nu <= 4` violates the fourth-moment condition and is only
    /// meant for heavy-tail experiments.
    StudentT {
        nu: f64,
    },
}

impl EntryDistribution {
    pub fn validate(&self) -> Result<()> {
        if let EntryDistribution::StudentT { nu } = self {
            if !(*nu > 2.0) {
                return Err(Error::Constraint(format!(
                    "student-t needs nu > 2 for a finite variance, got {nu}"
                )));
            }
        }
        Ok(())
    }

    /// One draw with mean zero and unit variance (before the `1/sqrt(n)`
    /// matrix scaling).
    pub fn sample_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            EntryDistribution::Gaussian => {
                let d = rand_distr::StandardNormal;
                Distribution::<f64>::sample(&d, rng)
            }
            EntryDistribution::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            EntryDistribution::UniformSymmetric => {
                // U(-sqrt(3), sqrt(3)) has variance 1
                let u: f64 = rng.random();
                (2.0 * u - 1.0) * 3f64.sqrt()
            }
            EntryDistribution::StudentT { nu } => {
                let t = StudentT::new(*nu).expect("validated nu");
                let raw: f64 = t.sample(rng);
                // variance of t_nu is nu/(nu-2)
                raw * ((nu - 2.0) / nu).sqrt()
            }
        }
    }

    /// Whether the distribution fails the `E|sqrt(n) x|^a <= C, a > 4`
    /// moment condition the outlier theory needs.
    pub fn violates_fourth_moment(&self) -> bool {
        matches!(self, EntryDistribution::StudentT { nu } if *nu <= 4.0)
    }

    /// Largest safely finite moment order, used for support levels; `None`
    /// means all moments are finite.
    pub fn moment_order(&self) -> Option<f64> {
        match self {
            EntryDistribution::StudentT { nu } => Some(nu - 1.0),
            _ => None,
        }
    }
}
