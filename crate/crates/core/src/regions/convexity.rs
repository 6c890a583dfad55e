//! Randomized convexity test.

use rand::Rng;

use super::{Membership, MEMBERSHIP_TOLERANCE};
use crate::prob::stream_rng;

/// Two members `a`, `b` whose combination `λa + (1−λ)b` is not a member.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityWitness {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub lambda: f64,
    pub point: Vec<f64>,
}

/// A union of origin-anchored boxes `[0, u₁] × … × [0, u_L]`; not convex in general.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxUnion {
    pub uppers: Vec<Vec<f64>>,
}

impl Membership for BoxUnion {
    fn dim(&self) -> usize {
        self.uppers.first().map_or(0, Vec::len)
    }

    fn contains(&self, rates: &[f64]) -> bool {
        self.uppers.iter().any(|u| {
            u.len() == rates.len()
                && rates.iter().zip(u).all(|(r, x)| *r >= -MEMBERSHIP_TOLERANCE && *r <= x + MEMBERSHIP_TOLERANCE)
        })
    }

    fn bounding_box(&self) -> Vec<f64> {
        let mut upper = vec![0.0f64; self.dim()];
        for u in &self.uppers {
            for (a, b) in upper.iter_mut().zip(u) {
                *a = a.max(*b);
            }
        }
        upper
    }
}

/// Rejection sampling tries per requested member before giving up.
const ATTEMPTS_PER_SAMPLE: usize = 1000;

fn sample_member<R: Rng + ?Sized>(region: &dyn Membership, upper: &[f64], rng: &mut R) -> Option<Vec<f64>> {
    (0..ATTEMPTS_PER_SAMPLE).find_map(|_| {
        let p: Vec<f64> = upper.iter().map(|&u| if u > 0.0 { rng.gen_range(0.0..=u) } else { 0.0 }).collect();
        region.contains(&p).then_some(p)
    })
}

/// Draws `samples` pairs of members uniformly from the bounding box and a
/// uniform `λ` for each, and returns the first combination that falls
/// outside. `None` also when no member can be found at all.
pub fn convexity_witness<R: Rng + ?Sized>(
    region: &dyn Membership,
    samples: usize,
    rng: &mut R,
) -> Option<ConvexityWitness> {
    let upper = region.bounding_box();
    for _ in 0..samples {
        let a = sample_member(region, &upper, rng)?;
        let b = sample_member(region, &upper, rng)?;
        let lambda: f64 = rng.gen();
        let point: Vec<f64> = a.iter().zip(&b).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect();
        if !region.contains(&point) {
            return Some(ConvexityWitness { a, b, lambda, point });
        }
    }
    None
}

/// True when no counterexample turns up in `samples` random pairs.
pub fn region_convexity_check(region: &dyn Membership, samples: usize, seed: u64) -> bool {
    convexity_witness(region, samples, &mut stream_rng(seed, &[])).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::capacity_region;
    use crate::sim::MwrcConfig;

    #[test]
    fn capacity_is_convex() {
        let cfg = MwrcConfig::binary(&[0.1, 0.05, 0.2]).unwrap();
        assert!(region_convexity_check(&capacity_region(&cfg), 10_000, 1));
        let cfg3 = MwrcConfig::binary(&[0.2, 0.05, 0.3, 0.1]).unwrap();
        assert!(region_convexity_check(&capacity_region(&cfg3), 2_000, 2));
    }

    #[test]
    fn box_union_is_not() {
        let l = BoxUnion { uppers: vec![vec![1.0, 0.2], vec![0.2, 1.0]] };
        let w = convexity_witness(&l, 10_000, &mut stream_rng(4, &[])).unwrap();
        assert!(l.contains(&w.a) && l.contains(&w.b) && !l.contains(&w.point));
        assert!(!region_convexity_check(&l, 10_000, 4));
    }

    #[test]
    fn single_point_is_convex() {
        let cfg = MwrcConfig::binary(&[0.5, 0.1, 0.1]).unwrap();
        let origin = capacity_region(&cfg);
        assert_eq!(origin.bounding_box(), vec![0.0, 0.0]);
        assert!(region_convexity_check(&origin, 100, 5));
    }
}
