//! The finite-field multi-way relay channel.
//!
//! Users `0..L` send `x_i`; the relay hears `y₀ = ⊕ h_{i,0} ⊙ x_i ⊕ N₀`.
//! The relay sends `x₀`; user `i` hears `y_i = h_{0,i} ⊙ x₀ ⊕ N_i`.

use rand::Rng;

use super::SimError;
use crate::field::{Element, Field};
use crate::prob::NoisePmf;

#[derive(Debug, Clone)]
pub struct MwrcConfig {
    field: Field,
    uplink_gains: Vec<Element>,
    downlink_gains: Vec<Element>,
    /// Index 0 is the relay, `i + 1` is user `i`.
    noise: Vec<NoisePmf>,
}

impl MwrcConfig {
    pub fn new(
        field: &Field,
        uplink_gains: Vec<Element>,
        downlink_gains: Vec<Element>,
        noise: Vec<NoisePmf>,
    ) -> Result<Self, SimError> {
        let l = uplink_gains.len();
        if l < 2 {
            return Err(SimError::TooFewUsers(l));
        }
        if downlink_gains.len() != l {
            return Err(SimError::CountMismatch { what: "downlink gains", expected: l, got: downlink_gains.len() });
        }
        if noise.len() != l + 1 {
            return Err(SimError::CountMismatch { what: "noise distributions", expected: l + 1, got: noise.len() });
        }
        for (what, gains) in [("uplink", &uplink_gains), ("downlink", &downlink_gains)] {
            for (user, &g) in gains.iter().enumerate() {
                field.element(g.rep() as u32)?;
                if g.is_zero() {
                    return Err(SimError::ZeroGain { what, user });
                }
            }
        }
        for (node, pmf) in noise.iter().enumerate() {
            if pmf.field() != field {
                return Err(SimError::NoiseFieldMismatch {
                    node,
                    field: field.to_string(),
                    noise: pmf.field().to_string(),
                });
            }
        }
        Ok(MwrcConfig { field: field.clone(), uplink_gains, downlink_gains, noise })
    }

    /// Binary channel with unit gains; `rho[0]` is the relay's crossover and
    /// `rho[i + 1]` is user `i`'s.
    pub fn binary(rho: &[f64]) -> Result<Self, SimError> {
        let noise = rho
            .iter()
            .map(|&r| NoisePmf::crossover(r))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| SimError::Unsupported(e.to_string()))?;
        let l = rho.len().saturating_sub(1);
        MwrcConfig::new(&Field::binary(), vec![Element::ONE; l], vec![Element::ONE; l], noise)
    }

    /// Unit gains and zero noise everywhere.
    pub fn noiseless(field: &Field, users: usize) -> Result<Self, SimError> {
        let noise = vec![NoisePmf::noiseless(field); users + 1];
        MwrcConfig::new(field, vec![Element::ONE; users], vec![Element::ONE; users], noise)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn num_users(&self) -> usize {
        self.uplink_gains.len()
    }

    pub fn uplink_gains(&self) -> &[Element] {
        &self.uplink_gains
    }

    pub fn downlink_gains(&self) -> &[Element] {
        &self.downlink_gains
    }

    pub fn relay_noise(&self) -> &NoisePmf {
        &self.noise[0]
    }

    pub fn user_noise(&self, user: usize) -> &NoisePmf {
        &self.noise[user + 1]
    }

    /// Noise at every node, relay first.
    pub fn noise(&self) -> &[NoisePmf] {
        &self.noise
    }

    /// One relay symbol from one symbol per user.
    pub fn uplink<R: Rng + ?Sized>(&self, x: &[Element], rng: &mut R) -> Element {
        assert_eq!(x.len(), self.num_users(), "one symbol per user");
        let f = &self.field;
        let sum = x.iter().zip(&self.uplink_gains).fold(Element::ZERO, |acc, (&xi, &h)| f.add(acc, f.mul(h, xi)));
        f.add(sum, self.noise[0].sample(rng))
    }

    /// One received symbol per user from one relay symbol.
    pub fn downlink<R: Rng + ?Sized>(&self, x0: Element, rng: &mut R) -> Vec<Element> {
        let f = &self.field;
        (0..self.num_users()).map(|i| f.add(f.mul(self.downlink_gains[i], x0), self.noise[i + 1].sample(rng))).collect()
    }

    /// The relay's received block when each user sends one block (`None` for
    /// silence, i.e. the all-zero block).
    pub fn uplink_block<R: Rng + ?Sized>(
        &self,
        blocks: &[Option<&[Element]>],
        len: usize,
        rng: &mut R,
    ) -> Vec<Element> {
        assert_eq!(blocks.len(), self.num_users(), "one block per user");
        let f = &self.field;
        let mut y = self.noise[0].sample_vec(len, rng);
        for (block, &h) in blocks.iter().zip(&self.uplink_gains) {
            if let Some(x) = block {
                assert_eq!(x.len(), len, "block length");
                for (yt, &xt) in y.iter_mut().zip(x.iter()) {
                    *yt = f.add(*yt, f.mul(h, xt));
                }
            }
        }
        y
    }

    /// User `user`'s received block.
    pub fn downlink_block<R: Rng + ?Sized>(&self, user: usize, x0: &[Element], rng: &mut R) -> Vec<Element> {
        let f = &self.field;
        let h = self.downlink_gains[user];
        let noise = self.noise[user + 1].sample_vec(x0.len(), rng);
        x0.iter().zip(noise).map(|(&x, n)| f.add(f.mul(h, x), n)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::stream_rng;

    #[test]
    fn uplink_examples() {
        let mut rng = stream_rng(0, &[]);
        let bin = MwrcConfig::noiseless(&Field::binary(), 2).unwrap();
        assert_eq!(bin.uplink(&[Element::ONE, Element::ONE], &mut rng), Element::ZERO);

        let f4 = Field::new(2, 2, None).unwrap();
        let a = f4.generator_x();
        let cfg = MwrcConfig::new(&f4, vec![a, Element::ONE], vec![Element::ONE; 2], vec![NoisePmf::noiseless(&f4); 3])
            .unwrap();
        assert_eq!(cfg.uplink(&[Element::ONE, a], &mut rng), Element::ZERO);

        let f5 = Field::prime(5).unwrap();
        let nu = f5.element(4).unwrap();
        let noise = vec![NoisePmf::point_mass(&f5, nu), NoisePmf::noiseless(&f5), NoisePmf::noiseless(&f5)];
        let cfg = MwrcConfig::new(&f5, vec![Element::ONE; 2], vec![Element::ONE; 2], noise).unwrap();
        assert_eq!(cfg.uplink(&[Element::ZERO; 2], &mut rng), nu);
    }

    #[test]
    fn downlink_examples() {
        let mut rng = stream_rng(0, &[]);
        let f2 = Field::binary();
        let cfg = MwrcConfig::noiseless(&f2, 3).unwrap();
        assert_eq!(cfg.downlink(Element::ONE, &mut rng), vec![Element::ONE; 3]);

        let f5 = Field::prime(5).unwrap();
        let two = f5.element(2).unwrap();
        let cfg =
            MwrcConfig::new(&f5, vec![Element::ONE; 2], vec![two, Element::ONE], vec![NoisePmf::noiseless(&f5); 3])
                .unwrap();
        let y = cfg.downlink(f5.element(3).unwrap(), &mut rng);
        assert_eq!(y[0], Element::ONE);
    }

    #[test]
    fn downlink_noise_is_independent_across_users() {
        let cfg = MwrcConfig::binary(&[0.0, 0.3, 0.3]).unwrap();
        let mut rng = stream_rng(12, &[]);
        let trials = 100_000;
        let (mut s1, mut s2, mut s12) = (0.0, 0.0, 0.0);
        for _ in 0..trials {
            let y = cfg.downlink(Element::ZERO, &mut rng);
            let (a, b) = (y[0].rep() as f64, y[1].rep() as f64);
            s1 += a;
            s2 += b;
            s12 += a * b;
        }
        let t = trials as f64;
        let cov = s12 / t - (s1 / t) * (s2 / t);
        let corr = cov / (0.3 * 0.7);
        assert!(corr.abs() < 0.01, "correlation {corr}");
    }

    #[test]
    fn validation() {
        let f3 = Field::prime(3).unwrap();
        let quiet = vec![NoisePmf::noiseless(&f3); 3];
        assert_eq!(
            MwrcConfig::new(&f3, vec![Element::ONE], vec![Element::ONE], quiet[..2].to_vec()).unwrap_err(),
            SimError::TooFewUsers(1)
        );
        assert_eq!(
            MwrcConfig::new(&f3, vec![Element::ONE, Element::ZERO], vec![Element::ONE; 2], quiet.clone()).unwrap_err(),
            SimError::ZeroGain { what: "uplink", user: 1 }
        );
        assert!(matches!(
            MwrcConfig::new(
                &f3,
                vec![Element::ONE; 2],
                vec![Element::ONE; 2],
                vec![NoisePmf::noiseless(&Field::binary()); 3]
            ),
            Err(SimError::NoiseFieldMismatch { node: 0, .. })
        ));
        assert!(matches!(
            MwrcConfig::new(&f3, vec![Element::ONE; 2], vec![Element::ONE; 2], quiet[..2].to_vec()),
            Err(SimError::CountMismatch { .. })
        ));
    }
}
