//! Central finite-difference PDE checks.
//!
//! Every stencil is evaluated at steps `h` and `2h` and combined by one
//! Richardson step, `(4D(h) − D(2h))/3`, which cancels the `O(h²)` term.
//! Plain second-order stencils at `h = 1e-3` lose several digits on degree-5
//! polynomials.

use super::LameParameters;
use crate::sphharm::InteriorPoint;
use crate::{Error, Result, Vec3};

/// Step for first-derivative stencils (divergence, curl).
pub const FIRST_DERIVATIVE_STEP: f64 = 1e-4;
/// Step for second-derivative stencils (Laplacian, grad-div).
pub const SECOND_DERIVATIVE_STEP: f64 = 1e-3;

// the widest stencil point sits at distance 2h·√2 < 4h from x
fn check_step(x: &InteriorPoint, h: f64) -> Result<()> {
    let n = x.norm();
    if !(h > 0.0) || !(n + 4.0 * h < 1.0) {
        return Err(Error::StepTooLarge { step: h, norm: n });
    }
    Ok(())
}

fn unit(k: usize, h: f64) -> Vec3 {
    let mut e = Vec3::zeros();
    e[k] = h;
    e
}

/// The two terms of `Δ*u = μΔu + (λ+μ)∇div u`, approximated separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LameTerms {
    pub laplacian: Vec3,
    pub grad_div: Vec3,
}

impl LameTerms {
    fn extrapolate(fine: LameTerms, coarse: LameTerms) -> LameTerms {
        LameTerms {
            laplacian: (fine.laplacian * 4.0 - coarse.laplacian) / 3.0,
            grad_div: (fine.grad_div * 4.0 - coarse.grad_div) / 3.0,
        }
    }

    pub fn combine(&self, params: &LameParameters) -> Vec3 {
        self.laplacian * params.mu() + self.grad_div * (params.lambda() + params.mu())
    }
}

/// `Δu` and `∇div u` from the 19-point stencil, extrapolated.
pub fn lame_terms<F: Fn(&Vec3) -> Vec3>(field: F, x: &InteriorPoint, h: f64) -> Result<LameTerms> {
    check_step(x, h)?;
    let x = *x.as_vec();
    Ok(LameTerms::extrapolate(
        stencil19(&field, &x, h),
        stencil19(&field, &x, 2.0 * h),
    ))
}

fn stencil19<F: Fn(&Vec3) -> Vec3>(field: &F, x: &Vec3, h: f64) -> LameTerms {
    let x = *x;
    let centre = field(&x);
    let h2 = h * h;
    let mut laplacian = Vec3::zeros();
    let mut grad_div = Vec3::zeros();
    for i in 0..3 {
        let ei = unit(i, h);
        let fp = field(&(x + ei));
        let fm = field(&(x - ei));
        let second = (fp + fm - centre * 2.0) / h2;
        laplacian += second;
        grad_div[i] += second[i];
        for j in (i + 1)..3 {
            let ej = unit(j, h);
            let pp = field(&(x + ei + ej));
            let pm = field(&(x + ei - ej));
            let mp = field(&(x - ei + ej));
            let mm = field(&(x - ei - ej));
            let mixed = (pp - pm - mp + mm) / (4.0 * h2);
            // ∂ⱼ∂ᵢuᵢ feeds component j, ∂ᵢ∂ⱼuⱼ feeds component i
            grad_div[j] += mixed[i];
            grad_div[i] += mixed[j];
        }
    }
    LameTerms { laplacian, grad_div }
}

/// `μΔu + (λ+μ)∇div u` at `x`; needs `|x| + 2h < 1`.
pub fn lame_residual<F: Fn(&Vec3) -> Vec3>(
    field: F,
    params: &LameParameters,
    x: &InteriorPoint,
    h: f64,
) -> Result<Vec3> {
    Ok(lame_terms(field, x, h)?.combine(params))
}

/// `|Δ*u| / (μ|Δu| + |λ+μ||∇div u| + (μ+|λ+μ|)|u|)` at `x`, or 0 when
/// the field vanishes to second order there.
pub fn relative_lame_residual<F: Fn(&Vec3) -> Vec3>(
    field: F,
    params: &LameParameters,
    x: &InteriorPoint,
    h: f64,
) -> Result<f64> {
    let t = lame_terms(&field, x, h)?;
    let mu = params.mu();
    let nu = (params.lambda() + params.mu()).abs();
    let scale = mu * t.laplacian.norm() + nu * t.grad_div.norm() + (mu + nu) * field(x.as_vec()).norm();
    let r = t.combine(params).norm();
    Ok(if scale == 0.0 { r } else { r / scale })
}

/// Componentwise Laplacian.
pub fn vector_laplacian<F: Fn(&Vec3) -> Vec3>(field: F, x: &InteriorPoint, h: f64) -> Result<Vec3> {
    Ok(lame_terms(field, x, h)?.laplacian)
}

/// `(div u, curl u)` by central differences.
pub fn div_curl<F: Fn(&Vec3) -> Vec3>(field: F, x: &InteriorPoint, h: f64) -> Result<(f64, Vec3)> {
    check_step(x, h)?;
    let x = *x.as_vec();
    let jac = (jacobian(&field, &x, h) * 4.0 - jacobian(&field, &x, 2.0 * h)) / 3.0;
    let curl = Vec3::new(
        jac[(2, 1)] - jac[(1, 2)],
        jac[(0, 2)] - jac[(2, 0)],
        jac[(1, 0)] - jac[(0, 1)],
    );
    Ok((jac.trace(), curl))
}

// jac[(i, k)] = ∂ₖ uᵢ
fn jacobian<F: Fn(&Vec3) -> Vec3>(field: &F, x: &Vec3, h: f64) -> crate::Mat3 {
    let mut jac = crate::Mat3::zeros();
    for k in 0..3 {
        let e = unit(k, h);
        let d = (field(&(x + e)) - field(&(x - e))) / (2.0 * h);
        jac.set_column(k, &d);
    }
    jac
}
