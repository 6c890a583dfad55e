//! The multi-way relay channel and Monte-Carlo trials of the FDF scheme and
//! the CDF baseline.

pub mod batch;
pub mod cdf;
pub mod channel;
pub mod fdf;
pub mod rates;

use rand::Rng;
use thiserror::Error;

use crate::code::{Candidates, CodeError, InformationSetDecoder, LinearCode, MessageVector, MlDecoder, DEFAULT_BUDGET};
use crate::field::{Element, Field, FieldError};
use crate::prob::NoisePmf;

pub use batch::{run_batch, wilson_interval, BatchResult, Scheme};
pub use cdf::{run_cdf_trial, CdfScheme};
pub use channel::MwrcConfig;
pub use fdf::{chain_decode, run_fdf_trial, FdfCodes, FdfMessages, FdfScheme, TrialReport, UplinkOutcome};
pub use rates::{build_schedule, parse_rate, BlockKind, RateAllocation, SubBlock, SubblockSchedule};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("a relay channel needs at least 2 users, got {0}")]
    TooFewUsers(usize),
    #[error("expected {expected} {what}, got {got}")]
    CountMismatch { what: &'static str, expected: usize, got: usize },
    #[error("{what} gain of user {user} must be a nonzero field element")]
    ZeroGain { what: &'static str, user: usize },
    #[error("noise of node {node} is over {noise}, the channel is over {field}")]
    NoiseFieldMismatch { node: usize, field: String, noise: String },
    #[error("cannot parse rate {0:?}")]
    InvalidRate(String),
    #[error("rate {0} is negative")]
    NegativeRate(String),
    #[error("all rates are zero")]
    ZeroRates,
    #[error("blocklength {n} leaves fractional sub-block lengths; use a multiple of {minimal}")]
    IndivisibleBlocklength { n: u64, minimal: u64 },
    #[error("{stage} needs {k} symbols in a block of length {n}")]
    RateTooHigh { stage: String, k: usize, n: usize },
    #[error("{stage}: {candidates} candidates exceed the enumeration budget of {budget}")]
    BudgetExceeded { stage: String, candidates: u128, budget: u64 },
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// How a trial decodes each block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecoderPolicy {
    /// Exact ML within the budget, information-set decoding for larger binary
    /// codes, and a budget error otherwise.
    #[default]
    Auto,
    /// Exact ML only.
    Exact,
    /// Information-set decoding for every binary block.
    InformationSet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig {
    pub policy: DecoderPolicy,
    pub budget: u64,
    pub isd: InformationSetDecoder,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig { policy: DecoderPolicy::Auto, budget: DEFAULT_BUDGET, isd: InformationSetDecoder::default() }
    }
}

enum Method {
    Exact,
    InformationSet,
}

impl DecoderConfig {
    fn method(&self, field: &Field, candidates: u128, stage: &str) -> Result<Method, SimError> {
        let fits = candidates <= self.budget as u128;
        match self.policy {
            DecoderPolicy::Exact if fits => Ok(Method::Exact),
            DecoderPolicy::Auto if fits => Ok(Method::Exact),
            DecoderPolicy::Auto | DecoderPolicy::InformationSet if field.is_binary() => Ok(Method::InformationSet),
            _ => Err(SimError::BudgetExceeded { stage: stage.to_string(), candidates, budget: self.budget }),
        }
    }

    /// Fails when a decode of `free` unknown symbols over `field` cannot be
    /// carried out under this policy.
    pub fn check(&self, field: &Field, free: usize, stage: &str) -> Result<(), SimError> {
        let candidates = (field.order() as u128).checked_pow(free as u32).unwrap_or(u128::MAX);
        self.method(field, candidates, stage).map(|_| ())
    }

    pub(crate) fn decode<R: Rng + ?Sized>(
        &self,
        code: &LinearCode,
        y: &[Element],
        noise: &NoisePmf,
        candidates: Candidates<'_>,
        rng: &mut R,
        stage: &str,
    ) -> Result<MessageVector, SimError> {
        let count = candidates.count(code.field(), code.k());
        Ok(match self.method(code.field(), count, stage)? {
            Method::Exact => MlDecoder { budget: self.budget }.decode(code, y, noise, candidates)?,
            Method::InformationSet => self.isd.decode(code, y, noise, candidates, rng)?,
        })
    }
}

/// Smallest `k` with `|F|^k ≥ 2^bits`.
pub fn symbols_for_bits(bits: u64, field: &Field) -> usize {
    if bits == 0 {
        return 0;
    }
    let q = field.order();
    if q.is_power_of_two() {
        let z = q.trailing_zeros() as u64;
        return bits.div_ceil(z) as usize;
    }
    // log2 q is irrational here, so bits / log2 q is never an integer.
    (bits as f64 / field.log2_order()).ceil() as usize
}

/// A uniformly drawn `bits`-bit message, written as `k` base-|F| digits
/// (least significant first).
pub fn random_message<R: Rng + ?Sized>(bits: u64, k: usize, field: &Field, rng: &mut R) -> MessageVector {
    let words = bits.div_ceil(64) as usize;
    let mut limbs: Vec<u64> = (0..words).map(|_| rng.gen()).collect();
    if !bits.is_multiple_of(64) {
        if let Some(top) = limbs.last_mut() {
            *top &= (1u64 << (bits % 64)) - 1;
        }
    }
    MessageVector::new(limbs_to_digits(limbs, k, field.order() as u64))
}

/// Repeated long division of a little-endian multi-limb integer by `q`.
fn limbs_to_digits(mut limbs: Vec<u64>, k: usize, q: u64) -> Vec<Element> {
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let mut rem: u128 = 0;
        for limb in limbs.iter_mut().rev() {
            let cur = (rem << 64) | *limb as u128;
            *limb = (cur / q as u128) as u64;
            rem = cur % q as u128;
        }
        out.push(Element::from_index(rem as usize));
    }
    debug_assert!(limbs.iter().all(|&l| l == 0), "message does not fit in {k} digits");
    out
}
