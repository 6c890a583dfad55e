//! Monte-Carlo batches with Wilson confidence intervals.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::cdf::CdfScheme;
use super::channel::MwrcConfig;
use super::fdf::{FdfScheme, TrialReport};
use super::rates::RateAllocation;
use super::{DecoderConfig, SimError};
use crate::prob::derive_seed;

/// Normal quantile for a two-sided 95% interval.
pub const WILSON_Z: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Fdf,
    Cdf,
}

impl Scheme {
    fn tag(self) -> u64 {
        match self {
            Scheme::Fdf => 0,
            Scheme::Cdf => 1,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Fdf => "fdf",
            Scheme::Cdf => "cdf",
        })
    }
}

impl FromStr for Scheme {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        match s {
            "fdf" => Ok(Scheme::Fdf),
            "cdf" => Ok(Scheme::Cdf),
            other => Err(SimError::Unsupported(format!("unknown scheme {other:?} (expected fdf or cdf)"))),
        }
    }
}

/// Aggregate of one `(scheme, n)` batch.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult {
    pub scheme: Scheme,
    pub users: usize,
    pub field: String,
    pub n: u64,
    pub trials: u64,
    pub rates: String,
    pub errors: u64,
    pub relay_errors: u64,
    pub user_errors: u64,
    pub seed: u64,
}

impl BatchResult {
    pub fn p_e(&self) -> f64 {
        ratio(self.errors, self.trials)
    }

    pub fn ci(&self) -> (f64, f64) {
        wilson_interval(self.errors, self.trials, WILSON_Z)
    }

    pub fn relay_err(&self) -> f64 {
        ratio(self.relay_errors, self.trials)
    }

    pub fn user_err(&self) -> f64 {
        ratio(self.user_errors, self.trials)
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Runs `trials` independent trials. All configuration and budget errors are
/// raised before the first trial; trial `t` draws only from streams derived
/// from `(seed, scheme, n, t)`, so results do not depend on thread count.
pub fn run_batch(
    scheme: Scheme,
    config: &MwrcConfig,
    rates: &RateAllocation,
    n: u64,
    trials: u64,
    seed: u64,
    decoder: &DecoderConfig,
) -> Result<BatchResult, SimError> {
    let master = derive_seed(seed, &[scheme.tag(), n]);
    let reports: Vec<TrialReport> = match scheme {
        Scheme::Fdf => {
            let s = FdfScheme::new(config, rates, n, decoder)?;
            (0..trials).into_par_iter().map(|t| s.run_trial(master, t)).collect::<Result<_, _>>()?
        }
        Scheme::Cdf => {
            let s = CdfScheme::new(config, rates, n, decoder)?;
            (0..trials).into_par_iter().map(|t| s.run_trial(master, t)).collect::<Result<_, _>>()?
        }
    };
    let count = |f: fn(&TrialReport) -> bool| reports.iter().filter(|r| f(r)).count() as u64;
    Ok(BatchResult {
        scheme,
        users: config.num_users(),
        field: config.field().to_string(),
        n,
        trials,
        rates: rates.tuple_string(),
        errors: count(TrialReport::error),
        relay_errors: count(TrialReport::relay_error),
        user_errors: count(TrialReport::user_error),
        seed,
    })
}
