//! Information-set decoding for binary codes whose message space is too large
//! to enumerate.
//!
//! Each iteration row-reduces the generator on a fresh random information
//! set, splits that set into two halves and picks a random window of
//! redundant positions. It then scores every noise pattern with at most
//! `max_flips` errors in each half and none in the window, found by matching
//! the two halves on the window (Stern's collision search). The best message
//! seen is returned.
//!
//! The search stops early in two cases. Either the best noise pattern is
//! light enough that, averaged over the random code ensemble, the chance that
//! any other codeword is at least as close is below `certainty`. Or the best
//! pattern has survived enough iterations that a strictly lighter one, if it
//! existed, would have been found with probability at least `1 − certainty`.
//! Otherwise the search runs until `max_iterations`. The result can differ
//! from exact ML; with the defaults this happens rarely at the blocklengths
//! used here.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng;

use super::bits::{weight_scores, Packed};
use super::{check_inputs, merge_fixed, Candidates, CodeError, LinearCode, MessageVector};
use crate::field::Element;
use crate::prob::NoisePmf;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InformationSetDecoder {
    /// Run exactly this many iterations and skip the early stop.
    pub iterations: Option<usize>,
    /// Largest number of errors searched in each half of the information
    /// set, at most 3. Lowered automatically when the half lists would exceed
    /// [`MAX_LIST`] entries.
    pub max_flips: usize,
    /// Ensemble probability below which a found codeword is accepted as ML.
    pub certainty: f64,
    pub max_iterations: usize,
}

impl Default for InformationSetDecoder {
    fn default() -> Self {
        InformationSetDecoder { iterations: None, max_flips: 2, certainty: 1e-6, max_iterations: 50_000 }
    }
}

/// Cap on the number of subsets enumerated in each half per iteration.
pub const MAX_LIST: usize = 1 << 14;

/// Shape of one collision search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Plan {
    /// Errors per half.
    p: usize,
    /// Window length.
    l: usize,
    /// Size of the first half; the second has the rest of the rank.
    kx: usize,
}

fn list_size(k: usize, p: usize) -> usize {
    (0..=p).map(|j| (ln_binomial(k, j).exp().round()) as usize).sum()
}

impl Plan {
    fn new(n: usize, rank: usize, max_flips: usize) -> Self {
        let kx = rank / 2;
        let mut p = 0;
        while p < max_flips.min(3) && p < rank - kx && list_size(rank - kx, p + 1) <= MAX_LIST {
            p += 1;
        }
        let bits = (list_size(rank - kx, p) as f64).log2().round() as usize;
        Plan { p, l: bits.min(16).min(n - rank), kx }
    }

    /// Chance that a fixed pattern of weight `t` is inside one search.
    fn hit(&self, n: usize, rank: usize, t: usize) -> f64 {
        let ky = rank - self.kx;
        let total = ln_binomial(n, t);
        let mut hit = 0.0;
        for a in 0..=self.p.min(t) {
            for b in 0..=self.p.min(t - a) {
                let ln = ln_binomial(self.kx, a) + ln_binomial(ky, b) + ln_binomial(n - rank - self.l, t - a - b);
                hit += (ln - total).exp();
            }
        }
        hit
    }
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64).ln() - (i as f64).ln()).sum()
}

/// `ln Σ_{i ≤ w} C(n, i)` for every `w` in `0..=n`.
fn log_binomial_prefix(n: usize) -> Vec<f64> {
    let mut ln_c = 0.0f64;
    let mut acc = f64::NEG_INFINITY;
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        if i > 0 {
            ln_c += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        let hi = acc.max(ln_c);
        acc = hi + ((acc - hi).exp() + (ln_c - hi).exp()).ln();
        out.push(acc);
    }
    out
}

impl InformationSetDecoder {
    /// Largest noise weight `w` such that, for a uniformly random `k × n`
    /// code, the expected number of other codewords within distance `w` of
    /// the received word is at most `certainty`. `None` if even `w = 0` fails.
    pub fn certified_weight(&self, n: usize, k: usize) -> Option<usize> {
        // (2^k − 1) · 2^{−n} · Σ_{i ≤ w} C(n, i)
        let ln2 = std::f64::consts::LN_2;
        let ln_others = if k >= 60 { k as f64 * ln2 } else { (((1u64 << k) - 1) as f64).ln() };
        let limit = self.certainty.ln();
        log_binomial_prefix(n).iter().rposition(|&s| ln_others - n as f64 * ln2 + s <= limit)
    }

    /// Iterations after which a noise pattern of weight `t` has been missed
    /// with probability at most `certainty`, for a rank-`rank` generator of
    /// length `n`.
    pub fn patience(&self, n: usize, rank: usize, t: usize) -> usize {
        let hit = Plan::new(n, rank, self.max_flips).hit(n, rank, t);
        if hit >= 1.0 - 1e-12 {
            1
        } else if hit <= 0.0 {
            usize::MAX
        } else {
            (self.certainty.ln() / (-hit).ln_1p()).ceil().max(1.0) as usize
        }
    }

    /// Decodes over `Candidates::All` or `Candidates::Fixed`.
    pub fn decode<R: Rng + ?Sized>(
        &self,
        code: &LinearCode,
        y: &[Element],
        noise: &NoisePmf,
        candidates: Candidates<'_>,
        rng: &mut R,
    ) -> Result<MessageVector, CodeError> {
        check_inputs(code, y, noise)?;
        if !code.field().is_binary() {
            return Err(CodeError::NotBinary);
        }
        match candidates {
            Candidates::All => Ok(self.decode_all(code, y, noise, rng)),
            Candidates::Fixed(fixed) => {
                let free = match code.restrict(fixed)? {
                    Some(reduced) => self.decode_all(&reduced, y, noise, rng).into_inner(),
                    None => Vec::new(),
                };
                Ok(merge_fixed(fixed, free))
            }
            Candidates::Explicit(_) => Err(CodeError::UnsupportedCandidates),
        }
    }

    fn decode_all<R: Rng + ?Sized>(
        &self,
        code: &LinearCode,
        y: &[Element],
        noise: &NoisePmf,
        rng: &mut R,
    ) -> MessageVector {
        let (k, n) = (code.k(), code.n());
        let scores = weight_scores(n, noise);
        let target = Packed::from_elements(y).xor(&Packed::from_elements(code.dither()));
        let rows: Vec<Packed> = (0..k).map(|i| Packed::from_elements(code.row(i))).collect();

        // Lighter noise is more likely only when p₁ < p₀.
        let monotone = noise.probs()[1] < noise.probs()[0];
        let stop_at = match self.iterations {
            None if monotone => self.certified_weight(n, k),
            _ => None,
        };
        let budget = self.iterations.unwrap_or(self.max_iterations).max(1);

        let mut best = Best::new(scores[target.weight()], &target, k);
        let mut search = Search::new(n.div_ceil(64));
        let mut sys = Systematic::new(n, k);
        let mut stale = 0;
        let mut patience = usize::MAX;
        for _ in 0..budget {
            sys.reduce(&rows, rng);
            if sys.rank == 0 {
                break;
            }
            let before = best.weight;
            let plan = Plan::new(n, sys.rank, self.max_flips);
            search.run(&sys, &rows, &target.words, &scores, plan, &mut best, rng);
            if stop_at.is_some_and(|w| best.weight <= w) {
                break;
            }
            if self.iterations.is_none() && monotone {
                if best.weight == 0 {
                    break;
                }
                if best.weight != before || patience == usize::MAX {
                    stale = 0;
                    patience = self.patience(n, sys.rank, best.weight - 1);
                }
                stale += 1;
                if stale >= patience {
                    break;
                }
            }
        }
        MessageVector::new(Packed { words: best.message }.to_elements(k))
    }
}

/// Best noise pattern so far, with the message that leaves it.
struct Best {
    score: f64,
    weight: usize,
    pattern: Vec<u64>,
    message: Vec<u64>,
}

impl Best {
    fn new(score: f64, target: &Packed, k: usize) -> Self {
        Best { score, weight: target.weight(), pattern: target.words.clone(), message: vec![0; k.div_ceil(64)] }
    }

    /// `message` is only evaluated when `pattern` would replace the current best.
    fn offer(&mut self, score: f64, weight: usize, pattern: &[u64], message: impl FnOnce() -> Vec<u64>) {
        if score < self.score || (score == self.score && pattern == self.pattern.as_slice()) {
            return;
        }
        let m = message();
        // Ties go to the smaller integer encoding (bit j has weight 2^j).
        if score > self.score || m.iter().rev().cmp(self.message.iter().rev()) == Ordering::Less {
            self.score = score;
            self.weight = weight;
            self.pattern.clear();
            self.pattern.extend_from_slice(pattern);
            self.message = m;
        }
    }
}

/// The generator row-reduced on an information set: row `i` has a 1 at
/// column `pivots[i]` and 0 at every other pivot.
struct Systematic {
    rank: usize,
    /// Words per row.
    w: usize,
    mat: Vec<u64>,
    pivots: Vec<usize>,
    is_pivot: Vec<bool>,
    order: Vec<usize>,
}

fn bit(words: &[u64], i: usize) -> bool {
    (words[i / 64] >> (i % 64)) & 1 == 1
}

/// XORs `pivot` into every row of `rows` that has bit `col` set.
fn clear_column(rows: &mut [u64], pivot: &[u64], col: usize) {
    match pivot.len() {
        1 => clear_fixed::<1>(rows, pivot, col),
        2 => clear_fixed::<2>(rows, pivot, col),
        3 => clear_fixed::<3>(rows, pivot, col),
        4 => clear_fixed::<4>(rows, pivot, col),
        _ => {
            let (word, shift) = (col / 64, col % 64);
            for row in rows.chunks_exact_mut(pivot.len()) {
                let mask = 0u64.wrapping_sub((row[word] >> shift) & 1);
                for (a, b) in row.iter_mut().zip(pivot) {
                    *a ^= b & mask;
                }
            }
        }
    }
}

// Fixed widths let the compiler unroll and vectorize the row loop.
fn clear_fixed<const W: usize>(rows: &mut [u64], pivot: &[u64], col: usize) {
    let pivot: &[u64; W] = pivot.try_into().expect("pivot width");
    let (word, shift) = (col / 64, col % 64);
    for row in rows.chunks_exact_mut(W) {
        let row: &mut [u64; W] = row.try_into().expect("row width");
        let mask = 0u64.wrapping_sub((row[word] >> shift) & 1);
        for t in 0..W {
            row[t] ^= pivot[t] & mask;
        }
    }
}

impl Systematic {
    fn new(n: usize, k: usize) -> Self {
        let w = n.div_ceil(64);
        Systematic {
            rank: 0,
            w,
            mat: vec![0; k * w],
            pivots: Vec::with_capacity(k),
            is_pivot: vec![false; n],
            order: (0..n).collect(),
        }
    }

    /// Row-reduces `rows` on a random information set.
    fn reduce<R: Rng + ?Sized>(&mut self, rows: &[Packed], rng: &mut R) {
        let (w, k) = (self.w, rows.len());
        for (i, row) in rows.iter().enumerate() {
            self.mat[i * w..(i + 1) * w].copy_from_slice(&row.words);
        }
        self.order.shuffle(rng);
        self.rank = 0;
        self.pivots.clear();
        self.is_pivot.fill(false);
        for idx in 0..self.order.len() {
            let (r, col) = (self.rank, self.order[idx]);
            if r == k {
                break;
            }
            let Some(p) = (r..k).find(|&i| bit(self.row(i), col)) else { continue };
            if p != r {
                let (lo, hi) = self.mat.split_at_mut(p * w);
                lo[r * w..(r + 1) * w].swap_with_slice(&mut hi[..w]);
            }
            let (before, rest) = self.mat.split_at_mut(r * w);
            let (pivot, after) = rest.split_at_mut(w);
            clear_column(before, pivot, col);
            clear_column(after, pivot, col);
            self.pivots.push(col);
            self.is_pivot[col] = true;
            self.rank += 1;
        }
        // Dependent rows end up zero and never change a codeword.
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.mat[i * self.w..(i + 1) * self.w]
    }

    /// The message whose codeword agrees with `codeword` on the pivots.
    fn message(&self, rows: &[Packed], codeword: &[u64]) -> Vec<u64> {
        // Reduce [G restricted to the pivots | I] and read off the inverse.
        let k = rows.len();
        let (kw, stride) = (self.rank.div_ceil(64), self.rank.div_ceil(64) + k.div_ceil(64));
        let mut mat = vec![0u64; k * stride];
        for (i, row) in rows.iter().enumerate() {
            for (j, &c) in self.pivots.iter().enumerate() {
                if bit(&row.words, c) {
                    mat[i * stride + j / 64] |= 1 << (j % 64);
                }
            }
            mat[i * stride + kw + i / 64] |= 1 << (i % 64);
        }
        let mut used = Vec::with_capacity(self.rank);
        let mut r = 0;
        for j in 0..self.rank {
            let Some(p) = (r..k).find(|&i| bit(&mat[i * stride..], j)) else { continue };
            if p != r {
                let (lo, hi) = mat.split_at_mut(p * stride);
                lo[r * stride..(r + 1) * stride].swap_with_slice(&mut hi[..stride]);
            }
            let (before, rest) = mat.split_at_mut(r * stride);
            let (pivot, after) = rest.split_at_mut(stride);
            clear_column(before, pivot, j);
            clear_column(after, pivot, j);
            used.push(j);
            r += 1;
        }
        let mut out = vec![0u64; k.div_ceil(64)];
        for (row, &j) in used.iter().enumerate() {
            if bit(codeword, self.pivots[j]) {
                xor_into(&mut out, &mat[row * stride + kw..(row + 1) * stride]);
            }
        }
        out
    }
}

/// A subset of at most three information rows.
#[derive(Clone, Copy)]
struct Subset {
    rows: [u16; 3],
    len: u8,
}

impl Subset {
    fn rows(&self) -> &[u16] {
        &self.rows[..self.len as usize]
    }
}

/// Calls `visit` on every subset of `range` with at most `p` elements.
fn subsets(range: std::ops::Range<usize>, p: usize, mut visit: impl FnMut(Subset)) {
    let end = range.end;
    visit(Subset { rows: [0; 3], len: 0 });
    if p == 0 {
        return;
    }
    for a in range {
        visit(Subset { rows: [a as u16, 0, 0], len: 1 });
        if p == 1 {
            continue;
        }
        for b in a + 1..end {
            visit(Subset { rows: [a as u16, b as u16, 0], len: 2 });
            if p == 2 {
                continue;
            }
            for c in b + 1..end {
                visit(Subset { rows: [a as u16, b as u16, c as u16], len: 3 });
            }
        }
    }
}

/// Scratch space for one collision search.
struct Search {
    base: Vec<u64>,
    window: Vec<usize>,
    free: Vec<usize>,
    row_keys: Vec<u32>,
    /// First-half subsets with their window keys, then bucketed by key.
    entries: Vec<(u32, Subset)>,
    starts: Vec<usize>,
    sorted: Vec<Subset>,
    pattern: Vec<u64>,
}

impl Search {
    fn new(w: usize) -> Self {
        Search {
            base: vec![0; w],
            window: Vec::new(),
            free: Vec::new(),
            row_keys: Vec::new(),
            entries: Vec::new(),
            starts: Vec::new(),
            sorted: Vec::new(),
            pattern: vec![0; w],
        }
    }

    fn key(window: &[usize], v: &[u64]) -> u32 {
        window.iter().enumerate().fold(0, |acc, (j, &c)| acc | (u32::from(bit(v, c)) << j))
    }

    #[allow(clippy::too_many_arguments)]
    fn run<R: Rng + ?Sized>(
        &mut self,
        sys: &Systematic,
        rows: &[Packed],
        target: &[u64],
        scores: &[f64],
        plan: Plan,
        best: &mut Best,
        rng: &mut R,
    ) {
        let r = sys.rank;
        // The pattern left by the codeword that matches the target on every pivot.
        self.base.copy_from_slice(target);
        for i in 0..r {
            if bit(target, sys.pivots[i]) {
                xor_into(&mut self.base, sys.row(i));
            }
        }

        self.free.clear();
        self.free.extend((0..sys.is_pivot.len()).filter(|&c| !sys.is_pivot[c]));
        self.window.clear();
        self.window.extend(rand::seq::index::sample(rng, self.free.len(), plan.l).iter().map(|i| self.free[i]));
        let window = &self.window;
        self.row_keys.clear();
        self.row_keys.extend((0..r).map(|i| Self::key(window, sys.row(i))));
        let base_key = Self::key(window, &self.base);
        let row_keys = &self.row_keys;
        let key_of = |s: &Subset| s.rows().iter().fold(0, |k, &i| k ^ row_keys[i as usize]);

        // First half, bucketed by window key (base included).
        let entries = &mut self.entries;
        entries.clear();
        subsets(0..plan.kx, plan.p, |s| entries.push((base_key ^ key_of(&s), s)));
        self.starts.clear();
        self.starts.resize((1 << plan.l) + 1, 0);
        for &(key, _) in entries.iter() {
            self.starts[key as usize + 1] += 1;
        }
        for b in 0..1 << plan.l {
            self.starts[b + 1] += self.starts[b];
        }
        self.sorted.clear();
        self.sorted.resize(entries.len(), Subset { rows: [0; 3], len: 0 });
        let mut fill = self.starts.clone();
        for &(key, s) in entries.iter() {
            self.sorted[fill[key as usize]] = s;
            fill[key as usize] += 1;
        }

        // Second half: every subset whose key matches leaves no error in the window.
        let (starts, sorted, base, pattern) = (&self.starts, &self.sorted, &self.base, &mut self.pattern);
        subsets(plan.kx..r, plan.p, |s| {
            let key = key_of(&s) as usize;
            for other in &sorted[starts[key]..starts[key + 1]] {
                pattern.copy_from_slice(base);
                for &i in other.rows().iter().chain(s.rows()) {
                    xor_into(pattern, sys.row(i as usize));
                }
                let weight: usize = pattern.iter().map(|x| x.count_ones() as usize).sum();
                if scores[weight] < best.score {
                    continue;
                }
                let pattern = &*pattern;
                best.offer(scores[weight], weight, pattern, || sys.message(rows, &xor(target, pattern)));
            }
        });
    }
}

fn xor_into(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x ^= y;
    }
}

fn xor(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}
