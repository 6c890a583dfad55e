//! Random linear codes over a finite field.
//!
//! A code maps a message `s ∈ F^k` to the codeword `x = (s ⊙ G) ⊕ q`, where
//! the generator `G` is `k × n` and the dither `q` has length `n`. Decoding is
//! exact maximum likelihood over an enumerated candidate set; for binary codes
//! whose message space is too large to enumerate, [`isd`] provides an
//! information-set decoder.

mod bits;
pub mod ensemble;
pub mod isd;

use std::cmp::Ordering;
use std::ops::Deref;

use rand::Rng;
use thiserror::Error;

use crate::field::{Element, Field, FieldError};
use crate::prob::NoisePmf;

pub use isd::InformationSetDecoder;

/// Default cap on the number of candidates exact ML decoding will score.
pub const DEFAULT_BUDGET: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodeError {
    #[error("bad code dimensions k = {k}, n = {n} (need 1 <= k <= n)")]
    BadDimensions { k: usize, n: usize },
    #[error("expected a vector of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("message {w} does not fit in {k} symbols over a field of order {order}")]
    MessageTooLarge { w: u64, k: usize, order: usize },
    #[error("{candidates} candidates exceed the enumeration budget of {budget}")]
    BudgetExceeded { candidates: u128, budget: u64 },
    #[error("the candidate set is empty")]
    EmptyCandidates,
    #[error("noise pmf is over {noise}, code is over {code}")]
    FieldMismatch { code: String, noise: String },
    #[error("information-set decoding needs a binary code and binary noise")]
    NotBinary,
    #[error("explicit candidate lists are only supported by exact decoding")]
    UnsupportedCandidates,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A message as a vector over the field.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MessageVector(Vec<Element>);

impl MessageVector {
    pub fn new(symbols: Vec<Element>) -> Self {
        MessageVector(symbols)
    }

    pub fn zeros(k: usize) -> Self {
        MessageVector(vec![Element::ZERO; k])
    }

    pub fn symbols(&self) -> &[Element] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Element> {
        self.0
    }

    /// Orders messages by their integer encoding (the last symbol is the most
    /// significant digit).
    pub fn cmp_encoding(&self, other: &Self) -> Ordering {
        cmp_encoding(&self.0, &other.0)
    }
}

impl Deref for MessageVector {
    type Target = [Element];

    fn deref(&self) -> &[Element] {
        &self.0
    }
}

impl From<Vec<Element>> for MessageVector {
    fn from(v: Vec<Element>) -> Self {
        MessageVector(v)
    }
}

fn cmp_encoding(a: &[Element], b: &[Element]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.iter().rev().cmp(b.iter().rev()))
}

/// Base-|F| digits of `w`, least-significant first.
pub fn message_to_vector(w: u64, k: usize, field: &Field) -> Result<MessageVector, CodeError> {
    let q = field.order() as u64;
    let mut rest = w;
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        out.push(Element::from_index((rest % q) as usize));
        rest /= q;
    }
    if rest != 0 {
        return Err(CodeError::MessageTooLarge { w, k, order: field.order() });
    }
    Ok(MessageVector(out))
}

/// Inverse of [`message_to_vector`].
pub fn vector_to_message(v: &[Element], field: &Field) -> Result<u64, CodeError> {
    let q = field.order() as u64;
    let mut w = 0u64;
    for &e in v.iter().rev() {
        field.element(e.rep() as u32)?;
        w = w.checked_mul(q).and_then(|w| w.checked_add(e.rep() as u64)).ok_or(CodeError::MessageTooLarge {
            w: u64::MAX,
            k: v.len(),
            order: field.order(),
        })?;
    }
    Ok(w)
}

/// A `k × n` linear code with dither.
#[derive(Debug, Clone)]
pub struct LinearCode {
    field: Field,
    k: usize,
    n: usize,
    generator: Vec<Element>,
    dither: Vec<Element>,
}

impl LinearCode {
    /// Builds a code from generator rows and a dither.
    pub fn new(field: &Field, rows: Vec<Vec<Element>>, dither: Vec<Element>) -> Result<Self, CodeError> {
        let k = rows.len();
        let n = dither.len();
        if k == 0 || k > n {
            return Err(CodeError::BadDimensions { k, n });
        }
        let mut generator = Vec::with_capacity(k * n);
        for row in rows {
            if row.len() != n {
                return Err(CodeError::LengthMismatch { expected: n, got: row.len() });
            }
            generator.extend(row);
        }
        for &e in generator.iter().chain(&dither) {
            field.element(e.rep() as u32)?;
        }
        Ok(LinearCode { field: field.clone(), k, n, generator, dither })
    }

    /// Draws every entry of `G` and `q` independently and uniformly over F.
    pub fn sample<R: Rng + ?Sized>(field: &Field, k: usize, n: usize, rng: &mut R) -> Result<Self, CodeError> {
        if k == 0 || k > n {
            return Err(CodeError::BadDimensions { k, n });
        }
        let q = field.order();
        let mut draw =
            |len: usize| -> Vec<Element> { (0..len).map(|_| Element::from_index(rng.gen_range(0..q))).collect() };
        let generator = draw(k * n);
        let dither = draw(n);
        Ok(LinearCode { field: field.clone(), k, n, generator, dither })
    }

    /// Like [`LinearCode::sample`], conditioned on `G` having full row rank so
    /// that distinct messages have distinct codewords.
    pub fn sample_full_rank<R: Rng + ?Sized>(
        field: &Field,
        k: usize,
        n: usize,
        rng: &mut R,
    ) -> Result<Self, CodeError> {
        loop {
            let code = LinearCode::sample(field, k, n, rng)?;
            if code.rank() == k {
                return Ok(code);
            }
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Element] {
        &self.generator[i * self.n..(i + 1) * self.n]
    }

    pub fn dither(&self) -> &[Element] {
        &self.dither
    }

    /// The same generator with a different dither.
    pub fn with_dither(&self, dither: Vec<Element>) -> Result<Self, CodeError> {
        if dither.len() != self.n {
            return Err(CodeError::LengthMismatch { expected: self.n, got: dither.len() });
        }
        Ok(LinearCode { dither, ..self.clone() })
    }

    /// `s ⊙ G` without the dither.
    pub fn encode_linear(&self, s: &[Element]) -> Result<Vec<Element>, CodeError> {
        if s.len() != self.k {
            return Err(CodeError::LengthMismatch { expected: self.k, got: s.len() });
        }
        let f = &self.field;
        let mut x = vec![Element::ZERO; self.n];
        for (i, &si) in s.iter().enumerate() {
            if si.is_zero() {
                continue;
            }
            for (xt, &g) in x.iter_mut().zip(self.row(i)) {
                *xt = f.add(*xt, f.mul(si, g));
            }
        }
        Ok(x)
    }

    /// `(s ⊙ G) ⊕ q`.
    pub fn encode(&self, s: &[Element]) -> Result<Vec<Element>, CodeError> {
        let x = self.encode_linear(s)?;
        Ok(self.field.add_vec(&x, &self.dither))
    }

    /// Row rank of `G` by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let f = &self.field;
        let mut m: Vec<Vec<Element>> = (0..self.k).map(|i| self.row(i).to_vec()).collect();
        let mut rank = 0;
        for col in 0..self.n {
            let Some(p) = (rank..self.k).find(|&r| !m[r][col].is_zero()) else { continue };
            m.swap(rank, p);
            let inv = f.inv(m[rank][col]).expect("pivot is nonzero");
            let pivot: Vec<Element> = m[rank].iter().map(|&e| f.mul(inv, e)).collect();
            for (r, row) in m.iter_mut().enumerate() {
                if r != rank && !row[col].is_zero() {
                    let c = row[col];
                    for (e, &pe) in row.iter_mut().zip(&pivot) {
                        *e = f.sub(*e, f.mul(c, pe));
                    }
                }
            }
            m[rank] = pivot;
            rank += 1;
            if rank == self.k {
                break;
            }
        }
        rank
    }

    /// The code seen by a decoder that already knows the symbols marked
    /// `Some` in `fixed`: its rows are the free rows of `G`, and the known
    /// contribution is folded into the dither. Returns `None` when every symbol
    /// is fixed.
    pub(crate) fn restrict(&self, fixed: &[Option<Element>]) -> Result<Option<LinearCode>, CodeError> {
        if fixed.len() != self.k {
            return Err(CodeError::LengthMismatch { expected: self.k, got: fixed.len() });
        }
        let f = &self.field;
        let mut dither = self.dither.clone();
        let mut generator = Vec::new();
        for (i, slot) in fixed.iter().enumerate() {
            match slot {
                Some(s) => {
                    for (d, &g) in dither.iter_mut().zip(self.row(i)) {
                        *d = f.add(*d, f.mul(*s, g));
                    }
                }
                None => generator.extend_from_slice(self.row(i)),
            }
        }
        let k = generator.len() / self.n;
        Ok((k > 0).then(|| LinearCode { field: f.clone(), k, n: self.n, generator, dither }))
    }
}

/// Which messages a decoder may return.
#[derive(Debug, Clone, Copy)]
pub enum Candidates<'a> {
    /// All of F^k.
    All,
    /// An explicit list.
    Explicit(&'a [MessageVector]),
    /// Every message agreeing with the `Some` entries (side information).
    Fixed(&'a [Option<Element>]),
}

impl Candidates<'_> {
    /// Number of messages in the set for a code over `field` with `k` symbols.
    pub fn count(&self, field: &Field, k: usize) -> u128 {
        let free = match self {
            Candidates::All => k,
            Candidates::Explicit(list) => return list.len() as u128,
            Candidates::Fixed(fixed) => fixed.iter().filter(|s| s.is_none()).count(),
        };
        (field.order() as u128).checked_pow(free as u32).unwrap_or(u128::MAX)
    }
}

/// Exact maximum-likelihood decoding with a fixed enumeration budget.
#[derive(Debug, Clone, Copy)]
pub struct MlDecoder {
    pub budget: u64,
}

impl Default for MlDecoder {
    fn default() -> Self {
        MlDecoder { budget: DEFAULT_BUDGET }
    }
}

/// Exact ML decoding with [`DEFAULT_BUDGET`].
pub fn ml_decode(
    code: &LinearCode,
    y: &[Element],
    noise: &NoisePmf,
    candidates: Candidates<'_>,
) -> Result<MessageVector, CodeError> {
    MlDecoder::default().decode(code, y, noise, candidates)
}

impl MlDecoder {
    /// Returns the candidate `s` maximizing `∏ₜ p_N(y_t ⊖ encode(s)_t)`, with
    /// ties going to the smallest message encoding.
    pub fn decode(
        &self,
        code: &LinearCode,
        y: &[Element],
        noise: &NoisePmf,
        candidates: Candidates<'_>,
    ) -> Result<MessageVector, CodeError> {
        check_inputs(code, y, noise)?;
        let count = candidates.count(code.field(), code.k());
        if count == 0 {
            return Err(CodeError::EmptyCandidates);
        }
        if count > self.budget as u128 {
            return Err(CodeError::BudgetExceeded { candidates: count, budget: self.budget });
        }
        match candidates {
            Candidates::All => Ok(decode_all(code, y, noise)),
            Candidates::Explicit(list) => decode_list(code, y, noise, list),
            Candidates::Fixed(fixed) => {
                let free = match code.restrict(fixed)? {
                    Some(reduced) => decode_all(&reduced, y, noise).into_inner(),
                    None => Vec::new(),
                };
                Ok(merge_fixed(fixed, free))
            }
        }
    }
}

pub(crate) fn check_inputs(code: &LinearCode, y: &[Element], noise: &NoisePmf) -> Result<(), CodeError> {
    if y.len() != code.n() {
        return Err(CodeError::LengthMismatch { expected: code.n(), got: y.len() });
    }
    if noise.field() != code.field() {
        return Err(CodeError::FieldMismatch { code: code.field().to_string(), noise: noise.field().to_string() });
    }
    Ok(())
}

pub(crate) fn merge_fixed(fixed: &[Option<Element>], free: Vec<Element>) -> MessageVector {
    let mut free = free.into_iter();
    MessageVector(
        fixed.iter().map(|slot| slot.unwrap_or_else(|| free.next().expect("one free symbol per open slot"))).collect(),
    )
}

/// Scores a codeword by its noise-symbol histogram so that candidates with the
/// same histogram get bit-identical scores and ties are detected exactly.
struct Scorer {
    q: usize,
    logp: Vec<f64>,
    // noise[t * q + x] = y_t ⊖ x
    noise: Vec<u16>,
    counts: Vec<u32>,
}

impl Scorer {
    fn new(field: &Field, y: &[Element], noise: &NoisePmf) -> Self {
        let q = field.order();
        let mut table = Vec::with_capacity(y.len() * q);
        for &yt in y {
            for x in field.elements() {
                table.push(field.sub(yt, x).rep());
            }
        }
        Scorer { q, logp: noise.log_probs(), noise: table, counts: vec![0; q] }
    }

    fn score(&mut self, x: &[Element]) -> f64 {
        self.counts.iter_mut().for_each(|c| *c = 0);
        for (t, e) in x.iter().enumerate() {
            self.counts[self.noise[t * self.q + e.rep() as usize] as usize] += 1;
        }
        self.counts.iter().zip(&self.logp).filter(|(&c, _)| c > 0).map(|(&c, &l)| c as f64 * l).sum()
    }
}

fn decode_list(
    code: &LinearCode,
    y: &[Element],
    noise: &NoisePmf,
    list: &[MessageVector],
) -> Result<MessageVector, CodeError> {
    let mut scorer = Scorer::new(code.field(), y, noise);
    let mut best: Option<(f64, &MessageVector)> = None;
    for cand in list {
        let score = scorer.score(&code.encode(cand)?);
        let better = match best {
            None => true,
            Some((b, m)) => score > b || (score == b && cand.cmp_encoding(m) == Ordering::Less),
        };
        if better {
            best = Some((score, cand));
        }
    }
    best.map(|(_, m)| m.clone()).ok_or(CodeError::EmptyCandidates)
}

fn decode_all(code: &LinearCode, y: &[Element], noise: &NoisePmf) -> MessageVector {
    if code.field().is_binary() {
        decode_all_binary(code, y, noise)
    } else {
        decode_all_generic(code, y, noise)
    }
}

/// Odometer walk over F^k in increasing encoding order, updating the codeword
/// one digit at a time.
fn decode_all_generic(code: &LinearCode, y: &[Element], noise: &NoisePmf) -> MessageVector {
    let f = code.field();
    let q = f.order();
    let (k, n) = (code.k(), code.n());
    let mut scorer = Scorer::new(f, y, noise);

    // multiples[(j * q + c) * n + t] = (c ⊙ G_j)_t
    let mut multiples = vec![Element::ZERO; k * q * n];
    for j in 0..k {
        for c in f.elements() {
            let base = (j * q + c.rep() as usize) * n;
            for (t, &g) in code.row(j).iter().enumerate() {
                multiples[base + t] = f.mul(c, g);
            }
        }
    }

    let mut digits = vec![0usize; k];
    let mut cw = code.dither().to_vec();
    let mut best_score = f64::NEG_INFINITY;
    let mut best = digits.clone();
    let mut first = true;
    loop {
        let score = scorer.score(&cw);
        if first || score > best_score {
            best_score = score;
            best.copy_from_slice(&digits);
            first = false;
        }
        let mut j = 0;
        loop {
            if j == k {
                return MessageVector(best.into_iter().map(Element::from_index).collect());
            }
            let old = digits[j];
            let new = if old + 1 == q { 0 } else { old + 1 };
            let (ob, nb) = ((j * q + old) * n, (j * q + new) * n);
            for (t, e) in cw.iter_mut().enumerate() {
                *e = f.add(f.sub(*e, multiples[ob + t]), multiples[nb + t]);
            }
            digits[j] = new;
            if new != 0 {
                break;
            }
            j += 1;
        }
    }
}

/// Gray-code walk over GF(2)^k with bit-packed codewords.
fn decode_all_binary(code: &LinearCode, y: &[Element], noise: &NoisePmf) -> MessageVector {
    let (k, n) = (code.k(), code.n());
    let rows: Vec<bits::Packed> = (0..k).map(|i| bits::Packed::from_elements(code.row(i))).collect();
    let target = bits::Packed::from_elements(y).xor(&bits::Packed::from_elements(code.dither()));
    let scores = bits::weight_scores(n, noise);

    let mut cw = bits::Packed::zeros(n);
    let mut best_score = scores[target.weight()];
    let mut best_index = 0u64;
    for i in 1u64..(1u64 << k) {
        cw.xor_assign(&rows[i.trailing_zeros() as usize]);
        let gray = i ^ (i >> 1);
        let score = scores[cw.xor_weight(&target)];
        if score > best_score || (score == best_score && gray < best_index) {
            best_score = score;
            best_index = gray;
        }
    }
    MessageVector((0..k).map(|j| Element::from_index(((best_index >> j) & 1) as usize)).collect())
}
