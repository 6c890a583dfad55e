//! Two-user regions over GF(2) with crossover probabilities `ρ₀` (relay),
//! `ρ₁` and `ρ₂` (users).
//!
//! The separate-decoding region is the convex hull of two branches. In the
//! first, user 2 carries a private part `R₂′` on top of the common rate, so
//! for a superposition parameter `β ∈ [0, 1/2]`
//!
//! ```text
//! R₁        ≤ 1 − H(β ∗ ρ₂)
//! R₂′       ≤ H(β ∗ ρ₁) − H(ρ₁)
//! R₁ + R₂′  ≤ 1 − max{H(ρ₀), H(ρ₁)}
//! ```
//!
//! with `R₂ = R₁ + R₂′` and `a ∗ b` the binary convolution. The second branch
//! swaps the users. Lowering a rate never hurts, so each `β` contributes the
//! rectangle below its best corner and the region is the hull of all corners.

use log::warn;

use super::hull::convex_hull;
use super::MEMBERSHIP_TOLERANCE;
use super::{capacity_region, HalfSpace, Membership, RateRegion, RegionError, RegionKind, EQUALITY_TOLERANCE};
use crate::prob::{binary_convolution, binary_entropy};
use crate::sim::MwrcConfig;

/// Default number of points of the `β` (and `α`) grid.
pub const DEFAULT_BETA_STEPS: usize = 2049;

/// Largest hull movement tolerated when the grid is doubled.
pub const HULL_CHANGE_TOLERANCE: f64 = 1e-4;

fn check_rho(rho: f64) -> Result<f64, RegionError> {
    if rho.is_finite() && (0.0..=0.5).contains(&rho) {
        Ok(rho)
    } else {
        Err(RegionError::InvalidCrossover(rho))
    }
}

fn h(rho: f64) -> f64 {
    binary_entropy(rho).expect("crossover checked")
}

/// The capacity region of the binary two-user channel.
pub fn binary_capacity_region(rho0: f64, rho1: f64, rho2: f64) -> Result<RateRegion, RegionError> {
    for r in [rho0, rho1, rho2] {
        check_rho(r)?;
    }
    let cfg = MwrcConfig::binary(&[rho0, rho1, rho2]).expect("crossovers checked");
    Ok(capacity_region(&cfg))
}

/// Complete decode-forward: `R₁ ≤ 1 − H(ρ₂)`, `R₂ ≤ 1 − H(ρ₁)`, `R₁ + R₂ ≤ 1 − H(ρ₀)`.
pub fn cdf_region(rho0: f64, rho1: f64, rho2: f64) -> Result<RateRegion, RegionError> {
    for r in [rho0, rho1, rho2] {
        check_rho(r)?;
    }
    let constraints = vec![
        HalfSpace::new(vec![1.0, 0.0], 1.0 - h(rho2)),
        HalfSpace::new(vec![0.0, 1.0], 1.0 - h(rho1)),
        HalfSpace::new(vec![1.0, 1.0], 1.0 - h(rho0)),
    ];
    RateRegion::new(RegionKind::Cdf, 2, constraints)
}

/// Which user carries the private part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `R₂ ≥ R₁`: user 2 sends the excess, swept over `β`.
    First,
    /// `R₁ ≥ R₂`: user 1 sends the excess, swept over `α`.
    Second,
}

/// One branch of the separate-decoding region: the union of the rectangles
/// `[0, x] × [0, y]` over its sampled corners `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparateBranch {
    pub corners: Vec<[f64; 2]>,
}

impl SeparateBranch {
    pub fn contains(&self, rates: [f64; 2]) -> bool {
        rates[0] >= -MEMBERSHIP_TOLERANCE
            && rates[1] >= -MEMBERSHIP_TOLERANCE
            && self
                .corners
                .iter()
                .any(|c| rates[0] <= c[0] + MEMBERSHIP_TOLERANCE && rates[1] <= c[1] + MEMBERSHIP_TOLERANCE)
    }
}

/// Samples the best corner of `branch` at `steps` parameter values in `[0, 1/2]`.
pub fn separate_branch(
    rho0: f64,
    rho1: f64,
    rho2: f64,
    branch: Branch,
    steps: usize,
) -> Result<SeparateBranch, RegionError> {
    for r in [rho0, rho1, rho2] {
        check_rho(r)?;
    }
    if steps < 2 {
        return Err(RegionError::GridTooSmall { got: steps, min: 2 });
    }
    // `own` is the crossover of the user carrying only the common part.
    let (own, other) = match branch {
        Branch::First => (rho1, rho2),
        Branch::Second => (rho2, rho1),
    };
    let cap = 1.0 - h(rho0).max(h(own));
    let corners = (0..steps)
        .map(|i| {
            let beta = i as f64 / (2 * (steps - 1)) as f64;
            let common = 1.0 - h(binary_convolution(beta, other));
            let private = (h(binary_convolution(beta, own)) - h(own)).max(0.0);
            let low = common.min(cap).max(0.0);
            let high = (low + private).min(cap).max(0.0);
            match branch {
                Branch::First => [low, high],
                Branch::Second => [high, low],
            }
        })
        .collect();
    Ok(SeparateBranch { corners })
}

fn hull_of_corners(corners: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = vec![[0.0, 0.0]];
    for c in corners {
        pts.extend([*c, [c[0], 0.0], [0.0, c[1]]]);
    }
    convex_hull(&pts)
}

/// Half-spaces of a hull that contains the origin and is closed under
/// lowering either coordinate. Edges on the axes are left to the
/// non-negativity constraints.
fn hull_constraints(hull: &[[f64; 2]]) -> Vec<HalfSpace> {
    if hull.len() < 3 {
        let x = hull.iter().map(|p| p[0]).fold(0.0, f64::max);
        let y = hull.iter().map(|p| p[1]).fold(0.0, f64::max);
        return vec![HalfSpace::new(vec![1.0, 0.0], x), HalfSpace::new(vec![0.0, 1.0], y)];
    }
    let mut out = Vec::with_capacity(hull.len());
    for (i, &p) in hull.iter().enumerate() {
        let q = hull[(i + 1) % hull.len()];
        if (p[0] == 0.0 && q[0] == 0.0) || (p[1] == 0.0 && q[1] == 0.0) {
            continue;
        }
        let (nx, ny) = (q[1] - p[1], p[0] - q[0]);
        let norm = nx.hypot(ny);
        let (nx, ny) = (nx / norm, ny / norm);
        out.push(HalfSpace::new(vec![nx, ny], nx * p[0] + ny * p[1]));
    }
    out
}

/// Largest violation of `constraints` over `points`.
fn excess(points: &[[f64; 2]], constraints: &[HalfSpace]) -> f64 {
    points.iter().flat_map(|p| constraints.iter().map(move |c| -c.slack(p))).fold(0.0, f64::max)
}

fn separate_hull(rho0: f64, rho1: f64, rho2: f64, steps: usize) -> Result<Vec<[f64; 2]>, RegionError> {
    let mut corners = separate_branch(rho0, rho1, rho2, Branch::First, steps)?.corners;
    corners.extend(separate_branch(rho0, rho1, rho2, Branch::Second, steps)?.corners);
    Ok(hull_of_corners(&corners))
}

/// Rate splitting with separate downlink decoding: the convex hull of both
/// branches sampled at `steps` parameter values each. The grid is checked
/// against one twice as fine; if the hulls differ by more than
/// [`HULL_CHANGE_TOLERANCE`] the region carries a warning.
pub fn fdf_separate_region(rho0: f64, rho1: f64, rho2: f64, steps: usize) -> Result<RateRegion, RegionError> {
    let hull = separate_hull(rho0, rho1, rho2, steps)?;
    let fine = separate_hull(rho0, rho1, rho2, 2 * steps)?;
    let constraints = hull_constraints(&hull);
    let change = excess(&fine, &constraints).max(excess(&hull, &hull_constraints(&fine)));
    let boundary = hull.iter().map(|p| p.to_vec()).collect();
    let mut region = RateRegion::new(RegionKind::FdfSeparate, 2, constraints)?.with_boundary(boundary);
    if change > HULL_CHANGE_TOLERANCE {
        let msg = format!("grid too coarse: the hull moves by {change:.3e} when {steps} parameter steps are doubled");
        warn!("{msg}");
        region = region.with_warning(msg);
    }
    Ok(region)
}

/// Separate decoding is optimal when `ρ₀ ≥ max{ρ₁, ρ₂}` or `ρ₁ = ρ₂`.
/// Crossovers that parse from the same decimal compare equal exactly; the
/// tolerance only absorbs representation noise.
pub fn lemma_fdf_separate_optimal(rho0: f64, rho1: f64, rho2: f64) -> bool {
    rho0 >= rho1.max(rho2) || (rho1 - rho2).abs() <= EQUALITY_TOLERANCE
}

/// Complete decode-forward is optimal when `H(ρ₀) ≤ H(ρ₁) + H(ρ₂) − 1`.
pub fn lemma_cdf_optimal(rho0: f64, rho1: f64, rho2: f64) -> bool {
    let e = |r: f64| binary_entropy(r).unwrap_or(f64::NAN);
    e(rho0) <= e(rho1) + e(rho2) - 1.0 + EQUALITY_TOLERANCE
}

impl Membership for SeparateBranch {
    fn dim(&self) -> usize {
        2
    }

    fn contains(&self, rates: &[f64]) -> bool {
        rates.len() == 2 && SeparateBranch::contains(self, [rates[0], rates[1]])
    }

    fn bounding_box(&self) -> Vec<f64> {
        let x = self.corners.iter().map(|c| c[0]).fold(0.0, f64::max);
        let y = self.corners.iter().map(|c| c[1]).fold(0.0, f64::max);
        vec![x, y]
    }
}
