//! Norms of elastic solutions on concentric spheres.
//!
//! The Hardy norm of `u` is `sup_{0≤r<1} ‖u(r·)‖_{L^p(S)}`. For band-limited
//! data `u` is a polynomial, so sampling the profile on a grid of radii that
//! accumulates at 1 is enough to estimate it.

use crate::elastic::ElasticSolution;
use crate::quadrature::{check_exponent, FieldSamples, SphereGrid};
use crate::{Error, Result};

/// `{1 − 2⁻ᵏ : k = 1..=12}`.
pub fn default_radii() -> Vec<f64> {
    (1..=12).map(|k| 1.0 - 0.5f64.powi(k)).collect()
}

fn check_radius(r: f64) -> Result<()> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::OutsideBall { norm: r, limit: 1.0 });
    }
    Ok(())
}

/// Grid adequate for `|u(r·)|^p` when `u` has band limit `L`: exact for
/// `p = 2` and refinement-stable otherwise.
pub fn grid_for(sol: &ElasticSolution) -> SphereGrid {
    SphereGrid::new(2 * (sol.band_limit() + 2))
}

/// `u(r·)` sampled at the grid nodes.
pub fn sample_on_sphere(sol: &ElasticSolution, r: f64, grid: &SphereGrid) -> FieldSamples {
    FieldSamples::from_fn(grid, |e| sol.displacement(&(e.as_vec() * r)))
}

/// `‖u(r·)‖_{L^p(S)}`.
pub fn sphere_norm(sol: &ElasticSolution, r: f64, p: f64, grid: &SphereGrid) -> Result<f64> {
    check_radius(r)?;
    grid.lp_norm(&sample_on_sphere(sol, r, grid), p)
}

/// Increasing radii in `[0, 1)` with the sphere norm at each.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    radii: Vec<f64>,
    values: Vec<f64>,
}

impl RadialProfile {
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.radii.iter().copied().zip(self.values.iter().copied())
    }
}

pub fn radial_profile(sol: &ElasticSolution, p: f64, radii: &[f64], grid: &SphereGrid) -> Result<RadialProfile> {
    if radii.is_empty() {
        return Err(Error::Usage("radius list is empty".into()));
    }
    check_exponent(p)?;
    if let Some(w) = radii.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::Usage(format!(
            "radii must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    let values = radii
        .iter()
        .map(|&r| sphere_norm(sol, r, p, grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(RadialProfile {
        radii: radii.to_vec(),
        values,
    })
}

/// Largest sphere norm over `radii`: a lower bound for the Hardy norm.
pub fn hardy_norm(sol: &ElasticSolution, p: f64, radii: &[f64]) -> Result<f64> {
    if radii.is_empty() {
        return Err(Error::Usage("radius list is empty".into()));
    }
    let mut sorted = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    Ok(radial_profile(sol, p, &sorted, &grid_for(sol))?.max())
}

/// `‖u(r·) − f‖_{L^p(S)}` with `f` sampled on `grid`.
pub fn boundary_deviation(
    sol: &ElasticSolution,
    f: &FieldSamples,
    r: f64,
    p: f64,
    grid: &SphereGrid,
) -> Result<f64> {
    check_radius(r)?;
    if f.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            actual: f.len(),
        });
    }
    let diff = sample_on_sphere(sol, r, grid).sub(f)?;
    grid.lp_norm(&diff, p)
}
