//! Exhaustive enumeration of the random linear code ensemble.
//!
//! Every `(G, q)` pair over a tiny field is visited once, and the number of
//! pairs sending each message (or pair of messages) to each codeword (or pair
//! of codewords) is tallied. Uniformity and pairwise independence of the
//! ensemble hold exactly when every tally equals `|F|^{nk}` and
//! `|F|^{n(k−1)}` respectively.

use num_rational::Ratio;

use super::{message_to_vector, CodeError, LinearCode};
use crate::field::{Element, Field};

/// Largest number of `(G, q)` assignments [`enumerate_ensemble`] will visit.
pub const MAX_ASSIGNMENTS: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleReport {
    pub order: usize,
    pub k: usize,
    pub n: usize,
    /// Number of `(G, q)` pairs, `|F|^{n(k+1)}`.
    pub assignments: u64,
    /// `single[s][x]`: pairs mapping message `s` to codeword `x`.
    pub single: Vec<Vec<u64>>,
    /// `pair[(s1, s2)][(x1, x2)]` for `s1 < s2`.
    pub pair: Vec<((usize, usize), Vec<u64>)>,
}

impl EnsembleReport {
    fn codewords(&self) -> usize {
        self.order.pow(self.n as u32)
    }

    /// The common value of Pr{s ↦ x} if it is the same for every `(s, x)`.
    pub fn marginal(&self) -> Option<Ratio<u64>> {
        common(self.single.iter().flatten()).map(|c| Ratio::new(c, self.assignments))
    }

    /// The common value of Pr{s₁ ↦ x₁, s₂ ↦ x₂} over distinct message pairs.
    pub fn joint(&self) -> Option<Ratio<u64>> {
        common(self.pair.iter().flat_map(|(_, c)| c)).map(|c| Ratio::new(c, self.assignments))
    }

    /// `p(x₁) = |F|^{−n}` for every message and codeword.
    pub fn is_uniform(&self) -> bool {
        self.marginal() == Some(Ratio::new(1, self.codewords() as u64))
    }

    /// `p(x₁, x₂) = p(x₁) p(x₂)` for every distinct message pair.
    pub fn is_pairwise_independent(&self) -> bool {
        let c = self.codewords() as u64;
        match (self.marginal(), self.joint()) {
            (Some(m), Some(j)) => j == m * m && j == Ratio::new(1, c * c),
            _ => false,
        }
    }

    /// First `(s, x, count)` whose tally differs from the uniform one.
    pub fn marginal_counterexample(&self) -> Option<(usize, usize, u64)> {
        let expected = self.assignments / self.codewords() as u64;
        self.single
            .iter()
            .enumerate()
            .find_map(|(s, row)| row.iter().position(|&c| c != expected).map(|x| (s, x, row[x])))
    }
}

fn common<'a>(mut it: impl Iterator<Item = &'a u64>) -> Option<u64> {
    let first = *it.next()?;
    it.all(|&c| c == first).then_some(first)
}

/// Visits every `(G, q)` with `G ∈ F^{k×n}`, `q ∈ F^n` and tallies codewords.
pub fn enumerate_ensemble(field: &Field, k: usize, n: usize) -> Result<EnsembleReport, CodeError> {
    if k == 0 || k > n {
        return Err(CodeError::BadDimensions { k, n });
    }
    let q = field.order();
    let entries = k * n + n;
    let assignments =
        (q as u64).checked_pow(entries as u32).filter(|&a| a <= MAX_ASSIGNMENTS).ok_or(CodeError::BudgetExceeded {
            candidates: (q as u128).saturating_pow(entries as u32),
            budget: MAX_ASSIGNMENTS,
        })?;
    let messages = q.pow(k as u32);
    let codewords = q.pow(n as u32);
    let msgs: Vec<Vec<Element>> = (0..messages)
        .map(|w| message_to_vector(w as u64, k, field).map(|m| m.into_inner()))
        .collect::<Result<_, _>>()?;

    let mut single = vec![vec![0u64; codewords]; messages];
    let mut pair: Vec<((usize, usize), Vec<u64>)> = (0..messages)
        .flat_map(|a| (a + 1..messages).map(move |b| (a, b)))
        .map(|p| (p, vec![0u64; codewords * codewords]))
        .collect();

    let mut digits = vec![Element::ZERO; entries];
    let mut cw_index = vec![0usize; messages];
    for a in 0..assignments {
        let mut rest = a;
        for d in digits.iter_mut() {
            *d = Element::from_index((rest % q as u64) as usize);
            rest /= q as u64;
        }
        let rows: Vec<Vec<Element>> = digits[..k * n].chunks(n).map(<[Element]>::to_vec).collect();
        let code = LinearCode::new(field, rows, digits[k * n..].to_vec())?;
        for (s, m) in msgs.iter().enumerate() {
            let x = code.encode(m)?;
            let idx = x.iter().rev().fold(0usize, |acc, e| acc * q + e.rep() as usize);
            cw_index[s] = idx;
            single[s][idx] += 1;
        }
        for ((s1, s2), counts) in pair.iter_mut() {
            counts[cw_index[*s1] * codewords + cw_index[*s2]] += 1;
        }
    }
    Ok(EnsembleReport { order: q, k, n, assignments, single, pair })
}
