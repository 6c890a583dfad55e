//! Complete-decode-forward for two users: the relay decodes both messages
//! jointly, then broadcasts the pair, and each user decodes it knowing its own
//! message.

use super::channel::MwrcConfig;
use super::fdf::{TrialReport, TAG_CODE, TAG_DECODE, TAG_DOWNLINK, TAG_MESSAGE, TAG_UPLINK};
use super::rates::RateAllocation;
use super::{random_message, symbols_for_bits, DecoderConfig, SimError};
use crate::code::{Candidates, LinearCode, MessageVector};
use crate::field::Element;
use crate::prob::stream_rng;

#[derive(Debug, Clone)]
pub struct CdfScheme {
    config: MwrcConfig,
    decoder: DecoderConfig,
    n: usize,
    bits: [u64; 2],
    k: [usize; 2],
}

impl CdfScheme {
    pub fn new(config: &MwrcConfig, rates: &RateAllocation, n: u64, decoder: &DecoderConfig) -> Result<Self, SimError> {
        if config.num_users() != 2 || rates.num_users() != 2 {
            return Err(SimError::Unsupported("complete-decode-forward is implemented for two users only".into()));
        }
        if n == 0 {
            return Err(SimError::IndivisibleBlocklength { n, minimal: 1 });
        }
        let f = config.field();
        let bits = [rates.bits(0, n), rates.bits(1, n)];
        let k = [symbols_for_bits(bits[0], f), symbols_for_bits(bits[1], f)];
        let total = k[0] + k[1];
        if total == 0 {
            return Err(SimError::ZeroRates);
        }
        if total > n as usize {
            return Err(SimError::RateTooHigh { stage: "joint uplink".into(), k: total, n: n as usize });
        }
        decoder.check(f, total, "relay joint decoding")?;
        decoder.check(f, k[1], "downlink decoding at user 1")?;
        decoder.check(f, k[0], "downlink decoding at user 2")?;
        Ok(CdfScheme { config: config.clone(), decoder: *decoder, n: n as usize, bits, k })
    }

    pub fn run_trial(&self, seed: u64, trial: u64) -> Result<TrialReport, SimError> {
        let f = self.config.field();
        let (k1, k2) = (self.k[0], self.k[1]);
        let total = k1 + k2;
        let messages: Vec<MessageVector> = (0..2)
            .map(|i| {
                random_message(self.bits[i], self.k[i], f, &mut stream_rng(seed, &[trial, TAG_MESSAGE, i as u64, 0]))
            })
            .collect();
        let truth: Vec<Element> = messages.iter().flat_map(|m| m.iter().copied()).collect();

        // One full-rank stacked generator, so distinct message pairs stay
        // distinct after the channel adds the two codewords.
        let mut rng = stream_rng(seed, &[trial, TAG_CODE]);
        let stacked = LinearCode::sample_full_rank(f, total, self.n, &mut rng)?;
        let dithers =
            [super::fdf::uniform_vector(f, self.n, &mut rng), super::fdf::uniform_vector(f, self.n, &mut rng)];
        let downlink = LinearCode::sample_full_rank(f, total, self.n, &mut rng)?;

        let offsets = [0, k1];
        let xs: Vec<Vec<Element>> = (0..2)
            .map(|i| {
                let mut x = dithers[i].clone();
                for (j, &s) in messages[i].iter().enumerate() {
                    let row = stacked.row(offsets[i] + j);
                    for (xt, &g) in x.iter_mut().zip(row) {
                        *xt = f.add(*xt, f.mul(s, g));
                    }
                }
                x
            })
            .collect();
        let y0 = self.config.uplink_block(
            &[Some(xs[0].as_slice()), Some(xs[1].as_slice())],
            self.n,
            &mut stream_rng(seed, &[trial, TAG_UPLINK]),
        );

        let h = self.config.uplink_gains();
        let rows: Vec<Vec<Element>> =
            (0..total).map(|r| f.scale_vec(if r < k1 { h[0] } else { h[1] }, stacked.row(r))).collect();
        let dither = f.add_vec(&f.scale_vec(h[0], &dithers[0]), &f.scale_vec(h[1], &dithers[1]));
        let joint = LinearCode::new(f, rows, dither)?;
        let decoded = self
            .decoder
            .decode(
                &joint,
                &y0,
                self.config.relay_noise(),
                Candidates::All,
                &mut stream_rng(seed, &[trial, TAG_DECODE, 0, 0]),
                "relay joint decoding",
            )?
            .into_inner();

        let x0 = downlink.encode(&decoded)?;
        let mut downlink_ok = Vec::with_capacity(2);
        let mut peer_ok = vec![vec![true; 2]; 2];
        for i in 0..2 {
            let y = self.config.downlink_block(i, &x0, &mut stream_rng(seed, &[trial, TAG_DOWNLINK, i as u64]));
            let inv = f.inv(self.config.downlink_gains()[i])?;
            let y = f.scale_vec(inv, &y);
            let noise = self.config.user_noise(i).scaled(inv);
            let own = offsets[i]..offsets[i] + self.k[i];
            let fixed: Vec<Option<Element>> = (0..total).map(|p| own.contains(&p).then(|| truth[p])).collect();
            let est = self
                .decoder
                .decode(
                    &downlink,
                    &y,
                    &noise,
                    Candidates::Fixed(&fixed),
                    &mut stream_rng(seed, &[trial, TAG_DECODE, i as u64 + 1, 0]),
                    "downlink decoding",
                )?
                .into_inner();
            downlink_ok.push(est == decoded);
            let j = 1 - i;
            let peer = offsets[j]..offsets[j] + self.k[j];
            peer_ok[i][j] = est[peer.clone()] == truth[peer];
        }
        Ok(TrialReport { relay_ok: vec![decoded == truth], downlink_ok, peer_ok })
    }
}

/// One CDF trial; see [`CdfScheme::run_trial`].
pub fn run_cdf_trial(
    config: &MwrcConfig,
    rates: &RateAllocation,
    n: u64,
    seed: u64,
    trial: u64,
    decoder: &DecoderConfig,
) -> Result<TrialReport, SimError> {
    CdfScheme::new(config, rates, n, decoder)?.run_trial(seed, trial)
}
