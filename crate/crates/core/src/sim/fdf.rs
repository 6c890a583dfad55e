//! Functional-decode-forward.
//!
//! Each message `W_i` is split into a common part `A_i` (⌊n R_min⌋ bits) and
//! an excess part `B_i` (⌊n R_i′⌋ bits). On the uplink, users `l` and `l + 1`
//! share pair block `l` and send their `A` codewords under one generator
//! `G_A` with their own dithers; the relay decodes only the function message
//! `h_{l,0} ⊙ S(A_l) ⊕ h_{l+1,0} ⊙ S(A_{l+1})`. Each active user then sends
//! `B_d` alone in its solo block. The relay forwards the tuple `U` of
//! everything it decoded with a fresh downlink code, and every user decodes
//! `U` knowing its own `B_i`, then unwinds the function messages with its own
//! `A_i`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::channel::MwrcConfig;
use super::rates::{build_schedule, BlockKind, RateAllocation, SubblockSchedule};
use super::{random_message, symbols_for_bits, DecoderConfig, SimError};
use crate::code::{Candidates, LinearCode, MessageVector};
use crate::field::{Element, Field};
use crate::prob::stream_rng;

pub(crate) const TAG_MESSAGE: u64 = 1;
pub(crate) const TAG_CODE: u64 = 2;
pub(crate) const TAG_UPLINK: u64 = 3;
pub(crate) const TAG_DOWNLINK: u64 = 4;
pub(crate) const TAG_DECODE: u64 = 5;

/// Outcome of one trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialReport {
    /// Per uplink sub-block (schedule order): did the relay decode it correctly.
    pub relay_ok: Vec<bool>,
    /// Per user: did its downlink decode reproduce what the relay sent.
    pub downlink_ok: Vec<bool>,
    /// `peer_ok[i][j]`: does user `i` end up with the right `W_j`.
    pub peer_ok: Vec<Vec<bool>>,
}

impl TrialReport {
    pub fn relay_error(&self) -> bool {
        self.relay_ok.iter().any(|ok| !ok)
    }

    /// A downlink failure while the relay was right.
    pub fn user_error(&self) -> bool {
        !self.relay_error() && self.downlink_ok.iter().any(|ok| !ok)
    }

    /// Some user is wrong about some other user's message.
    pub fn error(&self) -> bool {
        self.peer_ok.iter().flatten().any(|ok| !ok)
    }
}

/// Both message parts of every user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FdfMessages {
    pub a: Vec<MessageVector>,
    /// `None` for users without an excess part.
    pub b: Vec<Option<MessageVector>>,
}

/// Every code one trial uses.
#[derive(Debug, Clone)]
pub struct FdfCodes {
    /// Shared pair generator; `None` when the common part is empty.
    pub pair: Option<LinearCode>,
    /// Per-user dithers for the pair generator.
    pub pair_dithers: Vec<Vec<Element>>,
    /// Solo code of each active user.
    pub solo: Vec<Option<LinearCode>>,
    /// Relay's downlink code; `None` when `U` is empty.
    pub downlink: Option<LinearCode>,
}

/// What the relay decoded on the uplink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UplinkOutcome {
    /// Decoded `U = (S(A_{1,2}), …, S(A_{L−1,L}), S(B_{d_1}), …)`, flattened.
    pub u: Vec<Element>,
    pub block_ok: Vec<bool>,
}

/// A validated FDF configuration for one blocklength.
#[derive(Debug, Clone)]
pub struct FdfScheme {
    config: MwrcConfig,
    rates: RateAllocation,
    schedule: SubblockSchedule,
    decoder: DecoderConfig,
    bits_a: u64,
    k_a: usize,
    pair_len: usize,
    bits_b: Vec<u64>,
    k_b: Vec<usize>,
    solo_len: Vec<usize>,
    /// Offset of each user's `S(B)` inside `U`.
    b_offset: Vec<usize>,
    k_d: usize,
}

impl FdfScheme {
    /// Checks dimensions and decoding budgets before any trial runs.
    pub fn new(config: &MwrcConfig, rates: &RateAllocation, n: u64, decoder: &DecoderConfig) -> Result<Self, SimError> {
        let l = config.num_users();
        if rates.num_users() != l {
            return Err(SimError::CountMismatch { what: "rates", expected: l, got: rates.num_users() });
        }
        let f = config.field();
        let schedule = build_schedule(rates, n)?;
        let pair_len = schedule.pair_blocks().next().map_or(0, |b| b.len);
        let bits_a = rates.common_bits(n);
        let k_a = symbols_for_bits(bits_a, f);
        if k_a > pair_len {
            return Err(SimError::RateTooHigh { stage: "pair block".into(), k: k_a, n: pair_len });
        }
        let mut bits_b = vec![0; l];
        let mut k_b = vec![0; l];
        let mut solo_len = vec![0; l];
        for block in schedule.solo_blocks() {
            let BlockKind::Solo(d) = block.kind else { unreachable!() };
            bits_b[d] = rates.excess_bits(d, n);
            k_b[d] = symbols_for_bits(bits_b[d], f);
            solo_len[d] = block.len;
            if k_b[d] > block.len {
                return Err(SimError::RateTooHigh {
                    stage: format!("solo block of user {}", d + 1),
                    k: k_b[d],
                    n: block.len,
                });
            }
        }
        let mut b_offset = vec![0; l];
        let mut k_d = (l - 1) * k_a;
        for d in 0..l {
            b_offset[d] = k_d;
            k_d += k_b[d];
        }
        if k_d > n as usize {
            return Err(SimError::RateTooHigh { stage: "downlink".into(), k: k_d, n: n as usize });
        }
        decoder.check(f, k_a, "relay pair-block decoding")?;
        for (d, &k) in k_b.iter().enumerate() {
            decoder.check(f, k, &format!("relay solo-block decoding of user {}", d + 1))?;
            decoder.check(f, k_d - k, &format!("downlink decoding at user {}", d + 1))?;
        }
        Ok(FdfScheme {
            config: config.clone(),
            rates: rates.clone(),
            schedule,
            decoder: *decoder,
            bits_a,
            k_a,
            pair_len,
            bits_b,
            k_b,
            solo_len,
            b_offset,
            k_d,
        })
    }

    pub fn config(&self) -> &MwrcConfig {
        &self.config
    }

    pub fn rates(&self) -> &RateAllocation {
        &self.rates
    }

    pub fn schedule(&self) -> &SubblockSchedule {
        &self.schedule
    }

    pub fn n(&self) -> usize {
        self.schedule.n
    }

    /// Symbols per common part.
    pub fn k_a(&self) -> usize {
        self.k_a
    }

    /// Symbols of user `user`'s excess part (0 if inactive).
    pub fn k_b(&self, user: usize) -> usize {
        self.k_b[user]
    }

    /// Length of `U` in symbols.
    pub fn k_d(&self) -> usize {
        self.k_d
    }

    /// Number of `U` values user `user` must choose among once its own
    /// `S(B)` is fixed.
    pub fn downlink_candidates(&self, user: usize) -> u128 {
        (self.field().order() as u128).saturating_pow((self.k_d - self.k_b[user]) as u32)
    }

    fn field(&self) -> &Field {
        self.config.field()
    }

    fn users(&self) -> usize {
        self.config.num_users()
    }

    pub fn draw_messages(&self, seed: u64, trial: u64) -> FdfMessages {
        let f = self.field();
        let a = (0..self.users())
            .map(|i| {
                random_message(self.bits_a, self.k_a, f, &mut stream_rng(seed, &[trial, TAG_MESSAGE, i as u64, 0]))
            })
            .collect();
        let b = (0..self.users())
            .map(|i| {
                (self.solo_len[i] > 0).then(|| {
                    random_message(
                        self.bits_b[i],
                        self.k_b[i],
                        f,
                        &mut stream_rng(seed, &[trial, TAG_MESSAGE, i as u64, 1]),
                    )
                })
            })
            .collect();
        FdfMessages { a, b }
    }

    /// Fresh full-rank codes for one trial.
    pub fn draw_codes(&self, seed: u64, trial: u64) -> Result<FdfCodes, SimError> {
        let f = self.field();
        let mut rng = stream_rng(seed, &[trial, TAG_CODE]);
        let pair = match self.k_a {
            0 => None,
            k => Some(LinearCode::sample_full_rank(f, k, self.pair_len, &mut rng)?),
        };
        let pair_dithers = (0..self.users()).map(|_| uniform_vector(f, self.pair_len, &mut rng)).collect();
        let mut solo = Vec::with_capacity(self.users());
        for d in 0..self.users() {
            solo.push(match self.k_b[d] {
                0 => None,
                k => Some(LinearCode::sample_full_rank(f, k, self.solo_len[d], &mut rng)?),
            });
        }
        let downlink = match self.k_d {
            0 => None,
            k => Some(LinearCode::sample_full_rank(f, k, self.n(), &mut rng)?),
        };
        Ok(FdfCodes { pair, pair_dithers, solo, downlink })
    }

    /// User `user`'s full uplink transmission. It depends on nothing but the
    /// user's own message parts and the codes.
    pub fn transmit(
        &self,
        codes: &FdfCodes,
        user: usize,
        a: &MessageVector,
        b: Option<&MessageVector>,
    ) -> Result<Vec<Element>, SimError> {
        let mut x = vec![Element::ZERO; self.n()];
        for block in &self.schedule.blocks {
            let slot = &mut x[block.start..block.start + block.len];
            match block.kind {
                BlockKind::Pair(l) if l == user || l + 1 == user => {
                    let cw = match &codes.pair {
                        Some(g) => self.field().add_vec(&g.encode_linear(a)?, &codes.pair_dithers[user]),
                        None => codes.pair_dithers[user].clone(),
                    };
                    slot.copy_from_slice(&cw);
                }
                BlockKind::Solo(d) if d == user => {
                    let code = codes.solo[d].as_ref();
                    let cw = match (code, b) {
                        (Some(g), Some(b)) => g.encode(b)?,
                        _ => vec![Element::ZERO; block.len],
                    };
                    slot.copy_from_slice(&cw);
                }
                _ => {}
            }
        }
        Ok(x)
    }

    /// The function tuple the relay should decode.
    pub fn function_tuple(&self, messages: &FdfMessages) -> Vec<Element> {
        let f = self.field();
        let h = self.config.uplink_gains();
        let mut u = Vec::with_capacity(self.k_d);
        for l in 0..self.users() - 1 {
            u.extend(f.add_vec(&f.scale_vec(h[l], &messages.a[l]), &f.scale_vec(h[l + 1], &messages.a[l + 1])));
        }
        for b in messages.b.iter().flatten() {
            u.extend_from_slice(b);
        }
        u
    }

    /// Every user transmits, the channel adds noise, and the relay decodes
    /// each sub-block.
    pub fn uplink_round(
        &self,
        codes: &FdfCodes,
        messages: &FdfMessages,
        seed: u64,
        trial: u64,
    ) -> Result<UplinkOutcome, SimError> {
        let f = self.field();
        let h = self.config.uplink_gains();
        let xs: Vec<Vec<Element>> = (0..self.users())
            .map(|i| self.transmit(codes, i, &messages.a[i], messages.b[i].as_ref()))
            .collect::<Result<_, _>>()?;
        let blocks: Vec<Option<&[Element]>> = xs.iter().map(|x| Some(x.as_slice())).collect();
        let y0 = self.config.uplink_block(&blocks, self.n(), &mut stream_rng(seed, &[trial, TAG_UPLINK]));
        let truth = self.function_tuple(messages);

        let mut u = Vec::with_capacity(self.k_d);
        let mut block_ok = Vec::with_capacity(self.schedule.blocks.len());
        for (idx, block) in self.schedule.blocks.iter().enumerate() {
            let y = &y0[block.start..block.start + block.len];
            let mut rng = stream_rng(seed, &[trial, TAG_DECODE, 0, idx as u64]);
            let decoded = match block.kind {
                BlockKind::Pair(l) => match &codes.pair {
                    None => Vec::new(),
                    Some(g) => {
                        let dither = f.add_vec(
                            &f.scale_vec(h[l], &codes.pair_dithers[l]),
                            &f.scale_vec(h[l + 1], &codes.pair_dithers[l + 1]),
                        );
                        let code = g.with_dither(dither)?;
                        self.decode(
                            &code,
                            y,
                            self.config.relay_noise(),
                            Candidates::All,
                            &mut rng,
                            "relay pair-block decoding",
                        )?
                    }
                },
                BlockKind::Solo(d) => match &codes.solo[d] {
                    None => Vec::new(),
                    Some(g) => {
                        let inv = f.inv(h[d])?;
                        let y = f.scale_vec(inv, y);
                        let noise = self.config.relay_noise().scaled(inv);
                        self.decode(g, &y, &noise, Candidates::All, &mut rng, "relay solo-block decoding")?
                    }
                },
            };
            let range = self.u_range(block.kind);
            block_ok.push(decoded[..] == truth[range]);
            u.extend(decoded);
        }
        Ok(UplinkOutcome { u, block_ok })
    }

    fn u_range(&self, kind: BlockKind) -> std::ops::Range<usize> {
        match kind {
            BlockKind::Pair(l) => l * self.k_a..(l + 1) * self.k_a,
            BlockKind::Solo(d) => self.b_offset[d]..self.b_offset[d] + self.k_b[d],
        }
    }

    /// The relay broadcasts `u`; each user decodes it among the candidates
    /// that agree with its own excess part. Returns each user's estimate.
    pub fn downlink_round(
        &self,
        codes: &FdfCodes,
        u: &[Element],
        messages: &FdfMessages,
        seed: u64,
        trial: u64,
    ) -> Result<Vec<Vec<Element>>, SimError> {
        let f = self.field();
        let Some(code) = &codes.downlink else {
            return Ok(vec![Vec::new(); self.users()]);
        };
        let x0 = code.encode(u)?;
        let mut out = Vec::with_capacity(self.users());
        for i in 0..self.users() {
            let y = self.config.downlink_block(i, &x0, &mut stream_rng(seed, &[trial, TAG_DOWNLINK, i as u64]));
            let inv = f.inv(self.config.downlink_gains()[i])?;
            let y = f.scale_vec(inv, &y);
            let noise = self.config.user_noise(i).scaled(inv);
            let mut fixed = vec![None; self.k_d];
            if let Some(b) = &messages.b[i] {
                for (slot, &s) in fixed[self.b_offset[i]..].iter_mut().zip(b.iter()) {
                    *slot = Some(s);
                }
            }
            let mut rng = stream_rng(seed, &[trial, TAG_DECODE, i as u64 + 1, 0]);
            let decoded = self.decode(code, &y, &noise, Candidates::Fixed(&fixed), &mut rng, "downlink decoding")?;
            out.push(decoded);
        }
        Ok(out)
    }

    fn decode(
        &self,
        code: &LinearCode,
        y: &[Element],
        noise: &crate::prob::NoisePmf,
        candidates: Candidates<'_>,
        rng: &mut ChaCha8Rng,
        stage: &str,
    ) -> Result<Vec<Element>, SimError> {
        Ok(self.decoder.decode(code, y, noise, candidates, rng, stage)?.into_inner())
    }

    /// User `user`'s estimate of every message from its decoded `U`.
    pub fn recover(&self, user: usize, u: &[Element], own_a: &[Element]) -> (Vec<Vec<Element>>, Vec<Vec<Element>>) {
        let functions: Vec<Vec<Element>> =
            (0..self.users() - 1).map(|l| u[l * self.k_a..(l + 1) * self.k_a].to_vec()).collect();
        let a = chain_decode(self.field(), self.config.uplink_gains(), &functions, user, own_a);
        let b = (0..self.users()).map(|d| u[self.b_offset[d]..self.b_offset[d] + self.k_b[d]].to_vec()).collect();
        (a, b)
    }

    pub fn run_trial(&self, seed: u64, trial: u64) -> Result<TrialReport, SimError> {
        let messages = self.draw_messages(seed, trial);
        let codes = self.draw_codes(seed, trial)?;
        let up = self.uplink_round(&codes, &messages, seed, trial)?;
        let estimates = self.downlink_round(&codes, &up.u, &messages, seed, trial)?;
        let l = self.users();
        let downlink_ok = estimates.iter().map(|e| *e == up.u).collect();
        let peer_ok = (0..l)
            .map(|i| {
                let (a, b) = self.recover(i, &estimates[i], &messages.a[i]);
                (0..l)
                    .map(|j| {
                        let b_ok = match &messages.b[j] {
                            Some(truth) => b[j][..] == truth[..],
                            None => true,
                        };
                        a[j][..] == messages.a[j][..] && b_ok
                    })
                    .collect()
            })
            .collect();
        Ok(TrialReport { relay_ok: up.block_ok, downlink_ok, peer_ok })
    }
}

pub(crate) fn uniform_vector<R: Rng + ?Sized>(field: &Field, len: usize, rng: &mut R) -> Vec<Element> {
    (0..len).map(|_| Element::from_index(rng.gen_range(0..field.order()))).collect()
}

/// One FDF trial; see [`FdfScheme::run_trial`].
pub fn run_fdf_trial(
    config: &MwrcConfig,
    rates: &RateAllocation,
    n: u64,
    seed: u64,
    trial: u64,
    decoder: &DecoderConfig,
) -> Result<TrialReport, SimError> {
    FdfScheme::new(config, rates, n, decoder)?.run_trial(seed, trial)
}

/// Recovers every `S(A_j)` from the function messages
/// `functions[l] = h_l ⊙ S(A_l) ⊕ h_{l+1} ⊙ S(A_{l+1})` and user `own`'s
/// `S(A_own)`: a forward sweep up to the last user, then a backward sweep
/// down to the first.
pub fn chain_decode(
    field: &Field,
    gains: &[Element],
    functions: &[Vec<Element>],
    own: usize,
    own_a: &[Element],
) -> Vec<Vec<Element>> {
    let l = gains.len();
    assert_eq!(functions.len(), l - 1, "one function message per adjacent pair");
    let mut out = vec![Vec::new(); l];
    out[own] = own_a.to_vec();
    let solve = |target: usize, known: usize, func: &[Element], known_a: &[Element]| {
        let inv = field.inv(gains[target]).expect("gains are nonzero");
        let partial = field.sub_vec(func, &field.scale_vec(gains[known], known_a));
        field.scale_vec(inv, &partial)
    };
    for j in own + 1..l {
        out[j] = solve(j, j - 1, &functions[j - 1], &out[j - 1]);
    }
    for j in (0..own).rev() {
        out[j] = solve(j, j + 1, &functions[j], &out[j + 1]);
    }
    out
}
