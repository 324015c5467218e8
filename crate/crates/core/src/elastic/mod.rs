//! Lamé Dirichlet problem in the unit ball.
//!
//! Every vector spherical harmonic has a polynomial elastic extension:
//!
//! ```text
//! E⁺_{l,m} ↦ (2l+1)(Y x + α_l (|x|²−1) ∇Y) − ∇Y
//! E⁻_{l,m} ↦ ∇Y
//! E⁰_{l,m} ↦ x × ∇Y
//! ```
//!
//! with `Y` the solid harmonic and `α_l = −((l+3)τ+2) / (2(l(τ+2)+1))`,
//! `τ = (λ+μ)/μ`. A band-limited boundary field therefore has an exact
//! solution evaluable anywhere in the closed ball.

mod fd;
mod poisson;

pub use fd::{
    div_curl, lame_residual, lame_terms, relative_lame_residual, vector_laplacian, LameTerms, FIRST_DERIVATIVE_STEP,
    SECOND_DERIVATIVE_STEP,
};
pub use poisson::{
    elastic_kernel, elastic_poisson_apply, h_plus_representation, harmonic_plus_extension,
    harmonic_poisson_kernel, harmonic_vector_extension, poisson_extend, poisson_gradient,
    poisson_hessian, ElasticKernel, KERNEL_RADIUS_LIMIT,
};

use crate::decomposition::VshExpansion;
use crate::sphharm::{HarmonicIndex, SolidHarmonics};
use crate::vsh::VshFamily;
use crate::{Error, Result, Vec3};

/// Points with `|x| <= 1 + CLOSED_BALL_SLACK` count as inside the closed ball.
pub const CLOSED_BALL_SLACK: f64 = 1e-12;

/// Lamé constants `(λ, μ)`, eligible when `μ > 0` and `2μ + λ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LameParameters {
    lambda: f64,
    mu: f64,
}

impl LameParameters {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::IneligibleParameters {
                constraint: "μ>0",
                lambda,
                mu,
            });
        }
        if !(2.0 * mu + lambda > 0.0) || !lambda.is_finite() || !mu.is_finite() {
            return Err(Error::IneligibleParameters {
                constraint: "2μ+λ>0",
                lambda,
                mu,
            });
        }
        Ok(Self { lambda, mu })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `τ = (λ+μ)/μ`.
    pub fn tau(&self) -> f64 {
        (self.lambda + self.mu) / self.mu
    }

    /// `α = (λ+2μ)/(λ+3μ)`, in `(0, 1)` for eligible parameters.
    pub fn alpha(&self) -> f64 {
        (self.lambda + 2.0 * self.mu) / (self.lambda + 3.0 * self.mu)
    }

    /// `β = (λ+μ)/(2λ+6μ)`; zero exactly when `λ = −μ`.
    pub fn beta(&self) -> f64 {
        (self.lambda + self.mu) / (2.0 * self.lambda + 6.0 * self.mu)
    }
}

/// `α_l = −((l+3)τ + 2) / (2(l(τ+2) + 1))`.
pub fn alpha_ell(degree: usize, params: &LameParameters) -> f64 {
    let l = degree as f64;
    let tau = params.tau();
    -((l + 3.0) * tau + 2.0) / (2.0 * (l * (tau + 2.0) + 1.0))
}

/// `β_l = (2l+1) α_l + 1`.
pub fn beta_ell(degree: usize, params: &LameParameters) -> f64 {
    (2.0 * degree as f64 + 1.0) * alpha_ell(degree, params) + 1.0
}

fn check_closed_ball(x: &Vec3) -> Result<()> {
    let n = x.norm();
    if !(n <= 1.0 + CLOSED_BALL_SLACK) {
        return Err(Error::OutsideBall {
            norm: n,
            limit: 1.0,
        });
    }
    Ok(())
}

/// Elastic extension of one basis field, evaluated from a table at `x`.
fn basis_from_table(
    table: &SolidHarmonics,
    family: VshFamily,
    idx: HarmonicIndex,
    alpha_l: f64,
) -> Vec3 {
    let x = table.point();
    let y = table.value(idx);
    let g = table.gradient(idx);
    match family {
        VshFamily::Plus => {
            let l2 = 2.0 * idx.degree() as f64 + 1.0;
            (x * y + g * (alpha_l * (x.norm_squared() - 1.0))) * l2 - g
        }
        VshFamily::Minus => g,
        VshFamily::Zero => x.cross(&g),
    }
}

/// Elastic extension of `E^#_{l,m}` at `x`, `|x| <= 1`.
pub fn eval_basis_solution(
    family: VshFamily,
    idx: HarmonicIndex,
    params: &LameParameters,
    x: &Vec3,
) -> Result<Vec3> {
    family.check_degree(idx.degree())?;
    check_closed_ball(x)?;
    let table = SolidHarmonics::new(idx.degree(), x);
    Ok(basis_from_table(&table, family, idx, alpha_ell(idx.degree(), params)))
}

/// Interior displacement field for a band-limited boundary expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticSolution {
    params: LameParameters,
    boundary: VshExpansion,
    alphas: Vec<f64>,
}

impl ElasticSolution {
    pub fn params(&self) -> &LameParameters {
        &self.params
    }

    pub fn boundary(&self) -> &VshExpansion {
        &self.boundary
    }

    pub fn band_limit(&self) -> usize {
        self.boundary.band_limit()
    }

    /// Evaluates the polynomial field without checking `|x| <= 1`, for
    /// finite-difference stencils that may graze the sphere.
    pub fn displacement(&self, x: &Vec3) -> Vec3 {
        let table = SolidHarmonics::new(self.boundary.band_limit(), x);
        self.boundary
            .iter()
            .filter(|(_, _, a)| *a != 0.0)
            .map(|(f, i, a)| basis_from_table(&table, f, i, self.alphas[i.degree()]) * a)
            .sum()
    }

    pub fn eval(&self, x: &Vec3) -> Result<Vec3> {
        check_closed_ball(x)?;
        Ok(self.displacement(x))
    }
}

/// Linear superposition of the per-mode solutions.
pub fn solve_dirichlet(boundary: &VshExpansion, params: &LameParameters) -> ElasticSolution {
    let alphas = (0..=boundary.band_limit())
        .map(|l| alpha_ell(l, params))
        .collect();
    ElasticSolution {
        params: *params,
        boundary: boundary.clone(),
        alphas,
    }
}

pub fn eval_solution(sol: &ElasticSolution, x: &Vec3) -> Result<Vec3> {
    sol.eval(x)
}
