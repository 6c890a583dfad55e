//! Rate regions: the cut-set bound, the capacity region, and the two-user
//! binary regions of the separate-decoding and complete-decode-forward
//! schemes, with membership tests and vertex enumeration.
//!
//! Every region is closed and lies in the non-negative orthant. Membership
//! allows a slack of [`MEMBERSHIP_TOLERANCE`] on each constraint, so points on
//! an irrational boundary are members.

mod binary;
mod convexity;
mod hull;
mod phase;

use thiserror::Error;

use crate::sim::MwrcConfig;

pub use binary::{
    binary_capacity_region, cdf_region, fdf_separate_region, lemma_cdf_optimal, lemma_fdf_separate_optimal,
    separate_branch, Branch, SeparateBranch, DEFAULT_BETA_STEPS, HULL_CHANGE_TOLERANCE,
};
pub use convexity::{convexity_witness, region_convexity_check, BoxUnion, ConvexityWitness};
pub use hull::convex_hull;
pub use phase::{grid_value, phase_diagram, PhaseCell};

/// Slack allowed on every constraint by membership tests.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

/// Tolerance of the `ρ₁ = ρ₂` and similar equality tests in the optimality predicates.
pub const EQUALITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error("crossover probability {0} is outside [0, 1/2]")]
    InvalidCrossover(f64),
    #[error("a grid needs at least {min} points, got {got}")]
    GridTooSmall { got: usize, min: usize },
    #[error("expected {expected} rate coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("constraint bound {0} is not finite")]
    NonFiniteBound(f64),
}

/// Anything that can answer "is this rate tuple achievable".
pub trait Membership {
    fn dim(&self) -> usize;
    fn contains(&self, rates: &[f64]) -> bool;
    /// Upper corner of an axis-aligned box, anchored at the origin, that holds the region.
    fn bounding_box(&self) -> Vec<f64>;
}

/// `coefficients · R ≤ bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub coefficients: Vec<f64>,
    pub bound: f64,
}

impl HalfSpace {
    pub fn new(coefficients: Vec<f64>, bound: f64) -> Self {
        HalfSpace { coefficients, bound }
    }

    /// `bound − coefficients · rates`; negative when violated.
    pub fn slack(&self, rates: &[f64]) -> f64 {
        self.bound - self.coefficients.iter().zip(rates).map(|(c, r)| c * r).sum::<f64>()
    }
}

/// Which construction produced a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionKind {
    CutSet,
    Capacity,
    FdfSeparate,
    Cdf,
}

impl RegionKind {
    pub fn name(self) -> &'static str {
        match self {
            RegionKind::CutSet => "cut-set",
            RegionKind::Capacity => "capacity",
            RegionKind::FdfSeparate => "fdf-separate",
            RegionKind::Cdf => "cdf",
        }
    }
}

/// A closed polytope `{R ≥ 0 : a_j · R ≤ b_j for all j}`, optionally with a
/// sampled boundary for regions obtained from a parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRegion {
    kind: RegionKind,
    dim: usize,
    constraints: Vec<HalfSpace>,
    boundary: Option<Vec<Vec<f64>>>,
    warnings: Vec<String>,
}

impl RateRegion {
    pub fn new(kind: RegionKind, dim: usize, constraints: Vec<HalfSpace>) -> Result<Self, RegionError> {
        for h in &constraints {
            if h.coefficients.len() != dim {
                return Err(RegionError::DimensionMismatch { expected: dim, got: h.coefficients.len() });
            }
            if !h.bound.is_finite() {
                return Err(RegionError::NonFiniteBound(h.bound));
            }
        }
        Ok(RateRegion { kind, dim, constraints, boundary: None, warnings: Vec::new() })
    }

    pub fn with_boundary(mut self, boundary: Vec<Vec<f64>>) -> Self {
        self.boundary = Some(boundary);
        self
    }

    pub(crate) fn with_warning(mut self, warning: String) -> Self {
        self.warnings.push(warning);
        self
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn constraints(&self) -> &[HalfSpace] {
        &self.constraints
    }

    /// The sampled boundary, for regions built from a parameter sweep.
    pub fn boundary_samples(&self) -> Option<&[Vec<f64>]> {
        self.boundary.as_deref()
    }

    /// Diagnostics raised while the region was built, such as a too coarse sweep.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Smallest slack over all constraints including `R_i ≥ 0`.
    pub fn slack(&self, rates: &[f64]) -> f64 {
        let nonneg = rates.iter().copied().fold(f64::INFINITY, f64::min);
        self.constraints.iter().map(|h| h.slack(rates)).fold(nonneg, f64::min)
    }

    /// All vertices, by solving every `dim`-subset of the constraints
    /// (including the coordinate planes) as equalities. In two dimensions
    /// they come out in counter-clockwise order starting at the origin;
    /// otherwise in lexicographic order.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let d = self.dim;
        let mut planes: Vec<HalfSpace> = (0..d)
            .map(|i| {
                let mut c = vec![0.0; d];
                c[i] = -1.0;
                HalfSpace::new(c, 0.0)
            })
            .collect();
        planes.extend(self.constraints.iter().cloned());
        let mut out: Vec<Vec<f64>> = Vec::new();
        let mut pick: Vec<usize> = (0..d).collect();
        if planes.len() < d {
            return out;
        }
        loop {
            if let Some(v) = solve(&pick.iter().map(|&i| &planes[i]).collect::<Vec<_>>()) {
                let v: Vec<f64> = v.into_iter().map(|x| if x.abs() < 1e-12 { 0.0 } else { x }).collect();
                if self.slack(&v) >= -MEMBERSHIP_TOLERANCE
                    && !out.iter().any(|u| u.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-9))
                {
                    out.push(v);
                }
            }
            if !next_combination(&mut pick, planes.len()) {
                break;
            }
        }
        if d == 2 {
            let hull = convex_hull(&out.iter().map(|v| [v[0], v[1]]).collect::<Vec<_>>());
            out = hull.into_iter().map(|p| p.to_vec()).collect();
        } else {
            out.sort_by(|a, b| a.partial_cmp(b).expect("finite vertices"));
        }
        out
    }

    /// The boundary samples if present, the vertices otherwise.
    pub fn polyline(&self) -> Vec<Vec<f64>> {
        match &self.boundary {
            Some(b) => b.clone(),
            None => self.vertices(),
        }
    }
}

impl Membership for RateRegion {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, rates: &[f64]) -> bool {
        rates.len() == self.dim && self.slack(rates) >= -MEMBERSHIP_TOLERANCE
    }

    fn bounding_box(&self) -> Vec<f64> {
        let mut upper = vec![0.0f64; self.dim];
        for v in self.vertices() {
            for (u, x) in upper.iter_mut().zip(v) {
                *u = u.max(x);
            }
        }
        upper
    }
}

/// Solves the square system `a_j · x = b_j` by Gaussian elimination with
/// partial pivoting; `None` if it is singular.
fn solve(planes: &[&HalfSpace]) -> Option<Vec<f64>> {
    let d = planes.len();
    let mut m: Vec<Vec<f64>> = planes
        .iter()
        .map(|h| {
            let mut row = h.coefficients.clone();
            row.push(h.bound);
            row
        })
        .collect();
    for col in 0..d {
        let p = (col..d).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[p][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, p);
        let pivot = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col {
                let f = row[col] / pivot[col];
                if f != 0.0 {
                    for (x, &y) in row[col..].iter_mut().zip(&pivot[col..]) {
                        *x -= f * y;
                    }
                }
            }
        }
    }
    Some((0..d).map(|i| m[i][d] / m[i][i]).collect())
}

/// Advances `pick` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    let Some(i) = (0..k).rev().find(|&i| pick[i] < n - k + i) else { return false };
    pick[i] += 1;
    for j in i + 1..k {
        pick[j] = pick[j - 1] + 1;
    }
    true
}

fn sum_except(dim: usize, skip: usize) -> Vec<f64> {
    (0..dim).map(|j| if j == skip { 0.0 } else { 1.0 }).collect()
}

/// The cut-set outer bound: for every user `i`, the other users' sum rate
/// `R_i^c` is at most `log₂|F| − H(N_i)` (user `i` on its own side of the
/// cut) and at most `log₂|F| − H(N₀)` (the relay on its own). The second
/// family is `R_min^c ≤ log₂|F| − H(N₀)` written as one half-space per user.
pub fn cut_set_bound(config: &MwrcConfig) -> RateRegion {
    let l = config.num_users();
    let log_q = config.field().log2_order();
    let relay = (log_q - config.relay_noise().entropy()).max(0.0);
    let mut constraints = Vec::with_capacity(2 * l);
    for i in 0..l {
        constraints.push(HalfSpace::new(sum_except(l, i), relay));
        constraints.push(HalfSpace::new(sum_except(l, i), (log_q - config.user_noise(i).entropy()).max(0.0)));
    }
    RateRegion::new(RegionKind::CutSet, l, constraints).expect("well-formed constraints")
}

/// The capacity region: `R_i^c ≤ log₂|F| − max{H(N₀), H(N_i)}` for every user.
/// As a set it equals [`cut_set_bound`].
pub fn capacity_region(config: &MwrcConfig) -> RateRegion {
    let l = config.num_users();
    let log_q = config.field().log2_order();
    let h0 = config.relay_noise().entropy();
    let constraints = (0..l)
        .map(|i| {
            let h = h0.max(config.user_noise(i).entropy());
            HalfSpace::new(sum_except(l, i), (log_q - h).max(0.0))
        })
        .collect();
    RateRegion::new(RegionKind::Capacity, l, constraints).expect("well-formed constraints")
}

/// Largest `R` with `(R, …, R)` achievable: `(log₂|F| − max_i H(N_i)) / (L − 1)`
/// with the maximum taken over the relay and every user.
pub fn common_rate_capacity(config: &MwrcConfig) -> f64 {
    let worst = config.noise().iter().map(|n| n.entropy()).fold(0.0, f64::max);
    ((config.field().log2_order() - worst) / (config.num_users() - 1) as f64).max(0.0)
}

fn grid_points(upper: &[f64], steps: usize) -> impl Iterator<Item = Vec<f64>> + '_ {
    let d = upper.len();
    let total = steps.checked_pow(d as u32).unwrap_or(usize::MAX);
    (0..total).map(move |mut idx| {
        let mut p = Vec::with_capacity(d);
        for &u in upper {
            let i = idx % steps;
            idx /= steps;
            p.push(if steps > 1 { u * i as f64 / (steps - 1) as f64 } else { 0.0 });
        }
        p
    })
}

fn joint_box(a: &dyn Membership, b: &dyn Membership) -> Vec<f64> {
    a.bounding_box().into_iter().zip(b.bounding_box()).map(|(x, y)| x.max(y)).collect()
}

/// First point of a uniform `steps`-per-axis grid that is in `inner` but not
/// in `outer`. The grid spans both bounding boxes.
pub fn containment_violation(inner: &dyn Membership, outer: &dyn Membership, steps: usize) -> Option<Vec<f64>> {
    let upper = joint_box(inner, outer);
    let found = grid_points(&upper, steps).find(|p| inner.contains(p) && !outer.contains(p));
    found
}

/// A grid point of `outer` outside `inner`, certifying that the containment
/// `inner ⊆ outer` is strict.
pub fn strict_containment_witness(inner: &dyn Membership, outer: &dyn Membership, steps: usize) -> Option<Vec<f64>> {
    containment_violation(outer, inner, steps)
}
