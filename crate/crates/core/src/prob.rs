//! Noise distributions over a finite field, entropies, and seeded sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::{Element, Field};

/// Sums within this distance of 1 are renormalized; anything further is rejected.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbError {
    #[error("pmf has {got} entries but the field has {expected} elements")]
    WrongLength { expected: usize, got: usize },
    #[error("probability {value} at index {index} is not in [0, 1]")]
    InvalidProbability { index: usize, value: f64 },
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("crossover probability {0} is outside [0, 1]")]
    OutOfRange(f64),
}

/// A probability mass function over the elements of a field, indexed by the
/// element encoding.
#[derive(Debug, Clone)]
pub struct NoisePmf {
    field: Field,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl NoisePmf {
    pub fn new(field: &Field, probs: Vec<f64>) -> Result<Self, ProbError> {
        if probs.len() != field.order() {
            return Err(ProbError::WrongLength { expected: field.order(), got: probs.len() });
        }
        for (index, &value) in probs.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(ProbError::InvalidProbability { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > RENORMALIZE_TOLERANCE {
            return Err(ProbError::NotNormalized(sum));
        }
        let probs: Vec<f64> = probs.into_iter().map(|p| p / sum).collect();
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(NoisePmf { field: field.clone(), probs, cdf })
    }

    pub fn uniform(field: &Field) -> Self {
        let q = field.order();
        NoisePmf::new(field, vec![1.0 / q as f64; q]).expect("uniform pmf is valid")
    }

    pub fn point_mass(field: &Field, at: Element) -> Self {
        let mut probs = vec![0.0; field.order()];
        probs[at.rep() as usize] = 1.0;
        NoisePmf::new(field, probs).expect("point mass is valid")
    }

    /// Zero noise.
    pub fn noiseless(field: &Field) -> Self {
        NoisePmf::point_mass(field, Element::ZERO)
    }

    /// Binary symmetric noise `{1 − ρ, ρ}` over GF(2).
    pub fn crossover(rho: f64) -> Result<Self, ProbError> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(ProbError::OutOfRange(rho));
        }
        NoisePmf::new(&Field::binary(), vec![1.0 - rho, rho])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, e: Element) -> f64 {
        self.probs[e.rep() as usize]
    }

    /// Pr{N = 1} when the field is GF(2).
    pub fn crossover_probability(&self) -> Option<f64> {
        self.field.is_binary().then(|| self.probs[1])
    }

    /// Shannon entropy in bits, with 0·log 0 = 0.
    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.probs)
    }

    /// Natural-log probabilities; `-inf` for impossible symbols.
    pub fn log_probs(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p.ln()).collect()
    }

    /// The pmf of `c ⊙ N`. Multiplication by a nonzero constant permutes the
    /// field, so the entropy is unchanged.
    pub fn scaled(&self, c: Element) -> NoisePmf {
        assert!(!c.is_zero(), "scaling noise by zero");
        let mut probs = vec![0.0; self.probs.len()];
        for e in self.field.elements() {
            probs[self.field.mul(c, e).rep() as usize] = self.prob(e);
        }
        NoisePmf::new(&self.field, probs).expect("permuted pmf stays valid")
    }

    pub fn is_point_mass(&self) -> bool {
        self.probs.contains(&1.0)
    }

    /// One draw by inverse CDF over the element encoding order.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        let u: f64 = rng.gen();
        let idx = match self.cdf.iter().position(|&c| u < c) {
            Some(i) => i,
            // Rounding can leave the last cumulative value a hair below 1.
            None => self.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0),
        };
        Element::from_index(idx)
    }

    pub fn sample_vec<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Vec<Element> {
        (0..len).map(|_| self.sample(rng)).collect()
    }
}

/// Entropy in bits of a probability vector, with 0·log 0 = 0.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    let h: f64 = probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
    h.max(0.0)
}

/// H(ρ) = −ρ log₂ρ − (1−ρ) log₂(1−ρ).
pub fn binary_entropy(rho: f64) -> Result<f64, ProbError> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(ProbError::OutOfRange(rho));
    }
    Ok(entropy_bits(&[rho, 1.0 - rho]))
}

/// Binary convolution `a(1 − b) + (1 − a)b`: the crossover of two cascaded
/// binary symmetric channels.
pub fn binary_convolution(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + (1.0 - a) * b
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a 64-bit seed for the stream addressed by `path` under `master`.
///
/// Streams at different paths are statistically independent, and the result
/// depends on nothing but its arguments, so trials can run in any order.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut state = master;
    let mut out = splitmix64(&mut state);
    for &p in path {
        state ^= p.wrapping_mul(0xD6E8_FEB8_6659_FD93).rotate_left(17);
        out = splitmix64(&mut state) ^ out.rotate_left(29);
        state ^= out;
    }
    out
}

/// A ChaCha8 generator for the stream addressed by `path` under `master`.
pub fn stream_rng(master: u64, path: &[u64]) -> ChaCha8Rng {
    let mut state = derive_seed(master, path);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_examples() {
        let f4 = Field::new(2, 2, None).unwrap();
        assert!((NoisePmf::uniform(&f4).entropy() - 2.0).abs() < 1e-12);
        assert_eq!(NoisePmf::noiseless(&f4).entropy(), 0.0);
        let h = NoisePmf::crossover(0.1).unwrap().entropy();
        assert!((h - 0.4690).abs() < 1e-3);
        assert!(((1.0 - h) - 0.531).abs() < 1e-3);
    }

    #[test]
    fn binary_entropy_examples() {
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.05).unwrap() - 0.2864).abs() < 1e-3);
        assert!((binary_entropy(0.2).unwrap() - 0.7219).abs() < 1e-3);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.5), Err(ProbError::OutOfRange(1.5)));
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn pmf_validation() {
        let f2 = Field::binary();
        assert!(matches!(NoisePmf::new(&f2, vec![1.0]), Err(ProbError::WrongLength { .. })));
        assert!(matches!(NoisePmf::new(&f2, vec![-0.1, 1.1]), Err(ProbError::InvalidProbability { .. })));
        assert!(matches!(NoisePmf::new(&f2, vec![0.5, 0.4]), Err(ProbError::NotNormalized(_))));
        let p = NoisePmf::new(&f2, vec![0.5 + 5e-10, 0.5]).unwrap();
        assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(NoisePmf::crossover(-0.01).is_err());
    }

    #[test]
    fn point_mass_always_samples_its_atom() {
        let f5 = Field::prime(5).unwrap();
        let nu = f5.element(3).unwrap();
        let pmf = NoisePmf::point_mass(&f5, nu);
        let mut rng = stream_rng(7, &[]);
        assert!((0..1000).all(|_| pmf.sample(&mut rng) == nu));
        let zero = NoisePmf::noiseless(&f5);
        assert!((0..1000).all(|_| zero.sample(&mut rng) == Element::ZERO));
    }

    #[test]
    fn uniform_binary_frequency() {
        let pmf = NoisePmf::crossover(0.5).unwrap();
        let mut rng = stream_rng(2024, &[1]);
        let draws = 1_000_000;
        let ones = (0..draws).filter(|_| pmf.sample(&mut rng) == Element::ONE).count();
        assert!((ones as f64 / draws as f64 - 0.5).abs() < 0.002);
    }

    #[test]
    fn same_seed_same_stream() {
        let pmf = NoisePmf::crossover(0.3).unwrap();
        let a = pmf.sample_vec(500, &mut stream_rng(99, &[3, 1, 4]));
        let b = pmf.sample_vec(500, &mut stream_rng(99, &[3, 1, 4]));
        let c = pmf.sample_vec(500, &mut stream_rng(99, &[3, 1, 5]));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn scaling_permutes_the_pmf() {
        let f5 = Field::prime(5).unwrap();
        let pmf = NoisePmf::new(&f5, vec![0.6, 0.2, 0.1, 0.05, 0.05]).unwrap();
        let two = f5.element(2).unwrap();
        let scaled = pmf.scaled(two);
        assert!((scaled.entropy() - pmf.entropy()).abs() < 1e-12);
        assert!((scaled.prob(two) - 0.2).abs() < 1e-12);
        assert!((scaled.prob(f5.element(4).unwrap()) - 0.1).abs() < 1e-12);
    }
}
