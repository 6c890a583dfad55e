//! Bit-packed GF(2) vectors.

use crate::field::Element;
use crate::prob::NoisePmf;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Packed {
    pub(crate) words: Vec<u64>,
}

impl Packed {
    pub(crate) fn zeros(len: usize) -> Self {
        Packed { words: vec![0; len.div_ceil(64)] }
    }

    pub(crate) fn from_elements(v: &[Element]) -> Self {
        let mut p = Packed::zeros(v.len());
        for (i, e) in v.iter().enumerate() {
            if !e.is_zero() {
                p.words[i / 64] |= 1 << (i % 64);
            }
        }
        p
    }

    pub(crate) fn to_elements(&self, len: usize) -> Vec<Element> {
        (0..len).map(|i| if self.get(i) { Element::ONE } else { Element::ZERO }).collect()
    }

    pub(crate) fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub(crate) fn xor(&self, other: &Packed) -> Packed {
        Packed { words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect() }
    }

    pub(crate) fn xor_assign(&mut self, other: &Packed) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub(crate) fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn xor_weight(&self, other: &Packed) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones() as usize).sum()
    }
}

/// `scores[w] = w ln p₁ + (n − w) ln p₀`, the log-likelihood of a binary
/// noise pattern of weight `w`. Terms with a zero count contribute nothing
/// even when the matching probability is zero.
pub(crate) fn weight_scores(n: usize, noise: &NoisePmf) -> Vec<f64> {
    let (l0, l1) = (noise.probs()[0].ln(), noise.probs()[1].ln());
    let term = |count: usize, l: f64| if count == 0 { 0.0 } else { count as f64 * l };
    (0..=n).map(|w| term(w, l1) + term(n - w, l0)).collect()
}
