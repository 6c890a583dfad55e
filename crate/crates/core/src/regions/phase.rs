//! Where each scheme is optimal over the `(ρ₁, ρ₂)` plane.

use rayon::prelude::*;

use super::binary::{lemma_cdf_optimal, lemma_fdf_separate_optimal};
use super::RegionError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseCell {
    pub rho1: f64,
    pub rho2: f64,
    pub fdf_separate_optimal: bool,
    pub cdf_optimal: bool,
}

/// The `i`-th of `grid` evenly spaced points in `[0, 1/2]`.
pub fn grid_value(i: usize, grid: usize) -> f64 {
    i as f64 / (2 * (grid - 1)) as f64
}

/// Both optimality predicates on a `grid × grid` lattice of `[0, 1/2]²`,
/// row-major with `ρ₁` as the row. Rows are evaluated in parallel; the
/// output order does not depend on the thread count.
pub fn phase_diagram(rho0: f64, grid: usize) -> Result<Vec<PhaseCell>, RegionError> {
    if grid < 2 {
        return Err(RegionError::GridTooSmall { got: grid, min: 2 });
    }
    if !(rho0.is_finite() && (0.0..=0.5).contains(&rho0)) {
        return Err(RegionError::InvalidCrossover(rho0));
    }
    let rows: Vec<Vec<PhaseCell>> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let rho1 = grid_value(i, grid);
            (0..grid)
                .map(|j| {
                    let rho2 = grid_value(j, grid);
                    PhaseCell {
                        rho1,
                        rho2,
                        fdf_separate_optimal: lemma_fdf_separate_optimal(rho0, rho1, rho2),
                        cdf_optimal: lemma_cdf_optimal(rho0, rho1, rho2),
                    }
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}
