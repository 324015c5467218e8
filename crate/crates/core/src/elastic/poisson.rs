//! Harmonic and elastic Poisson kernels, and Poisson extensions of scalar
//! expansions.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::{beta_ell, LameParameters};
use crate::decomposition::{apply_zonal_multiplier, ScalarExpansion, VshExpansion, ZonalSequence};
use crate::quadrature::{gauss_jacobi_unit, FieldSamples, SphereGrid};
use crate::sphharm::{InteriorPoint, SolidHarmonics, UnitVector};
use crate::vsh::VshFamily;
use crate::{Error, Mat3, Result, Vec3};

/// Largest `|x|` accepted by [`elastic_poisson_apply`]. The kernel grows like
/// `(1−|x|)⁻²` towards the sphere and fixed grids stop resolving it.
pub const KERNEL_RADIUS_LIMIT: f64 = 0.9;

/// `P(x, η) = (1 − |x|²) / (4π |x − η|³)`.
pub fn harmonic_poisson_kernel(x: &InteriorPoint, eta: &UnitVector) -> f64 {
    kernel_value(x, eta)
}

fn kernel_value(x: &Vec3, eta: &Vec3) -> f64 {
    let r = (x - eta).norm();
    (1.0 - x.norm_squared()) / (4.0 * PI * r * r * r)
}

/// `∂ᵢ∂ⱼ P(x, η)` in `x`, differentiated directly. With `d = x − η`,
/// `s = 1 − |x|²`, `r = |d|`:
///
/// ```text
/// 4π ∂ᵢ∂ⱼP = −2δᵢⱼ/r³ + 6(xᵢdⱼ + dᵢxⱼ)/r⁵ − 3sδᵢⱼ/r⁵ + 15 s dᵢdⱼ/r⁷
/// ```
pub fn poisson_hessian(x: &InteriorPoint, eta: &UnitVector) -> Mat3 {
    hessian_raw(x, eta)
}

fn hessian_raw(x: &Vec3, eta: &Vec3) -> Mat3 {
    let d = x - eta;
    let r2 = d.norm_squared();
    let r = r2.sqrt();
    let r3 = r2 * r;
    let r5 = r3 * r2;
    let r7 = r5 * r2;
    let s = 1.0 - x.norm_squared();
    let xd = x * d.transpose();
    let diag = -2.0 / r3 - 3.0 * s / r5;
    (Mat3::identity() * diag + (xd + xd.transpose()) * (6.0 / r5) + d * d.transpose() * (15.0 * s / r7))
        / (4.0 * PI)
}

const T_RULE_START: usize = 32;
const T_RULE_LEVELS: usize = 5; // 32, 64, 128, 256, 512
const T_RULE_TOLERANCE: f64 = 1e-10;

/// The elastic Poisson kernel for fixed Lamé parameters:
///
/// ```text
/// P_e(x, η) = P(x, η) I + β (1 − |x|²) ∂²Φ/∂xᵢ∂xⱼ,
/// ∂²Φ/∂xᵢ∂xⱼ = ∫₀¹ (∂ᵢ∂ⱼP)(tx, η) t^{1−α} dt.
/// ```
///
/// The `t`-integral uses Gauss–Jacobi rules for the weight `t^{1−α}`, doubled
/// from 32 up to 512 nodes until successive values agree to `1e-10`. Rules are
/// built lazily and shared between evaluations.
#[derive(Debug)]
pub struct ElasticKernel {
    params: LameParameters,
    rules: [OnceLock<(Vec<f64>, Vec<f64>)>; T_RULE_LEVELS],
}

impl ElasticKernel {
    pub fn new(params: LameParameters) -> Self {
        Self {
            params,
            rules: Default::default(),
        }
    }

    pub fn params(&self) -> &LameParameters {
        &self.params
    }

    fn rule(&self, level: usize) -> &(Vec<f64>, Vec<f64>) {
        self.rules[level].get_or_init(|| gauss_jacobi_unit(T_RULE_START << level, 1.0 - self.params.alpha()))
    }

    fn t_integral(&self, x: &Vec3, eta: &Vec3, level: usize) -> Mat3 {
        let (t, w) = self.rule(level);
        t.iter()
            .zip(w)
            .map(|(t, w)| hessian_raw(&(x * *t), eta) * *w)
            .sum()
    }

    /// `∂²Φ/∂xᵢ∂xⱼ(x, η)`.
    pub fn phi_hessian(&self, x: &InteriorPoint, eta: &UnitVector) -> Result<Mat3> {
        let mut prev = self.t_integral(x, eta, 0);
        let mut change = f64::INFINITY;
        for level in 1..T_RULE_LEVELS {
            let next = self.t_integral(x, eta, level);
            change = (next - prev).norm() / next.norm().max(f64::MIN_POSITIVE);
            if change < T_RULE_TOLERANCE || (next - prev).norm() < 1e-15 {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::QuadratureNotConverged {
            change,
            nodes: T_RULE_START << (T_RULE_LEVELS - 1),
        })
    }

    pub fn eval(&self, x: &InteriorPoint, eta: &UnitVector) -> Result<Mat3> {
        let p = kernel_value(x, eta);
        let beta = self.params.beta();
        if beta == 0.0 {
            return Ok(Mat3::identity() * p);
        }
        let h = self.phi_hessian(x, eta)?;
        Ok(Mat3::identity() * p + h * (beta * (1.0 - x.norm_squared())))
    }

    /// `∫_S P_e(x, η) f(η) dσ(η)` by quadrature on `grid`.
    pub fn apply(&self, grid: &SphereGrid, f: &FieldSamples, x: &InteriorPoint) -> Result<Vec3> {
        let n = x.norm();
        if n > KERNEL_RADIUS_LIMIT {
            return Err(Error::TooCloseToBoundary {
                norm: n,
                limit: KERNEL_RADIUS_LIMIT,
            });
        }
        if f.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: f.len(),
            });
        }
        let mut acc = Vec3::zeros();
        for ((eta, w), v) in grid.nodes().iter().zip(grid.weights()).zip(f.iter()) {
            acc += self.eval(x, eta)? * v * *w;
        }
        Ok(acc)
    }
}

pub fn elastic_kernel(x: &InteriorPoint, eta: &UnitVector, params: &LameParameters) -> Result<Mat3> {
    ElasticKernel::new(*params).eval(x, eta)
}

/// Kernel-quadrature route to the elastic extension; valid for `|x| <= 0.9`.
pub fn elastic_poisson_apply(
    grid: &SphereGrid,
    f: &FieldSamples,
    x: &InteriorPoint,
    params: &LameParameters,
) -> Result<Vec3> {
    ElasticKernel::new(*params).apply(grid, f, x)
}

/// `Pg(x) = Σ a_{l,m} r^l Y_{l,m}(x')`, exact for band-limited `g`.
pub fn poisson_extend(g: &ScalarExpansion, x: &Vec3) -> f64 {
    let t = SolidHarmonics::new(g.band_limit(), x);
    g.coefficients().iter().zip(t.values()).map(|(a, y)| a * y).sum()
}

/// `∇(Pg)(x)`.
pub fn poisson_gradient(g: &ScalarExpansion, x: &Vec3) -> Vec3 {
    let t = SolidHarmonics::new(g.band_limit(), x);
    g.iter()
        .filter(|(_, a)| *a != 0.0)
        .map(|(i, a)| t.gradient(i) * a)
        .sum()
}

/// `P(L₊g)(x) = [2x·∇(Pg) + Pg] x − |x|² ∇(Pg)`, the harmonic extension of `L₊g`.
pub fn harmonic_plus_extension(g: &ScalarExpansion, x: &Vec3) -> Vec3 {
    let h = poisson_extend(g, x);
    let grad = poisson_gradient(g, x);
    x * (2.0 * x.dot(&grad) + h) - grad * x.norm_squared()
}

/// Componentwise harmonic extension of a vector expansion:
/// `∇(P g₋) + x × ∇(P g₀) + P(L₊ g₊)`.
pub fn harmonic_vector_extension(expansion: &VshExpansion, x: &Vec3) -> Vec3 {
    let part = |f: VshFamily| {
        ScalarExpansion::from_coefficients(expansion.band_limit(), expansion.family(f).to_vec())
            .expect("family vectors are dense")
    };
    poisson_gradient(&part(VshFamily::Minus), x)
        + x.cross(&poisson_gradient(&part(VshFamily::Zero), x))
        + harmonic_plus_extension(&part(VshFamily::Plus), x)
}

/// `u(x) = P(L₊g)(x) + (|x|² − 1) ∇(P(M_β g))(x)`: the elastic extension of
/// `L₊g`, written as its harmonic extension plus a β_l-weighted correction.
pub fn h_plus_representation(g: &ScalarExpansion, params: &LameParameters, x: &Vec3) -> Vec3 {
    let beta = ZonalSequence::from_fn(g.band_limit(), |l| beta_ell(l, params))
        .expect("β_l is finite for eligible parameters");
    let corrected = apply_zonal_multiplier(g, &beta).expect("multiplier covers the band limit");
    harmonic_plus_extension(g, x) + poisson_gradient(&corrected, x) * (x.norm_squared() - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{op_l_minus, op_l_plus};
    use crate::elastic::{eval_basis_solution, solve_dirichlet};
    use crate::sphharm::HarmonicIndex;
    use crate::vsh::eval_vsh;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn idx(l: usize, m: i32) -> HarmonicIndex {
        HarmonicIndex::new(l, m).unwrap()
    }

    fn random_unit(rng: &mut ChaCha8Rng) -> UnitVector {
        UnitVector::normalize(Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ))
        .unwrap()
    }

    fn random_interior(rng: &mut ChaCha8Rng, radius: f64) -> InteriorPoint {
        let r = radius * rng.random_range(0.0..1.0f64).cbrt();
        InteriorPoint::new(*random_unit(rng) * r).unwrap()
    }

    fn params(l: f64, m: f64) -> LameParameters {
        LameParameters::new(l, m).unwrap()
    }

    #[test]
    fn harmonic_kernel_basics() {
        let eta = UnitVector::normalize(Vec3::new(0.0, 1.0, 1.0)).unwrap();
        assert_abs_diff_eq!(harmonic_poisson_kernel(&InteriorPoint::origin(), &eta), 1.0 / (4.0 * PI));

        let grid = SphereGrid::new(40);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let x = random_interior(&mut rng, 0.6);
            let vals: Vec<f64> = grid.nodes().iter().map(|e| harmonic_poisson_kernel(&x, e)).collect();
            assert!(vals.iter().all(|v| *v > 0.0));
            assert_abs_diff_eq!(grid.integrate(&vals).unwrap(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn harmonic_kernel_series() {
        // P(tξ, η) = Σ_l t^l Σ_m Y(ξ)Y(η) + O(t^{L+1})
        let xi = UnitVector::normalize(Vec3::new(0.3, 0.4, -0.2)).unwrap();
        let eta = UnitVector::normalize(Vec3::new(-0.1, 0.9, 0.5)).unwrap();
        let t: f64 = 0.05;
        let lmax = 10;
        let a = SolidHarmonics::new(lmax, &(*xi * t));
        let b = SolidHarmonics::new(lmax, &eta);
        let series: f64 = a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum();
        let exact = harmonic_poisson_kernel(&InteriorPoint::new(*xi * t).unwrap(), &eta);
        assert!((series - exact).abs() < 10.0 * t.powi(lmax as i32 + 1));
    }

    #[test]
    fn hessian_at_origin_and_symmetry() {
        let eta = UnitVector::normalize(Vec3::new(0.6, -0.0, 0.8)).unwrap();
        let h = poisson_hessian(&InteriorPoint::origin(), &eta);
        let expected = (Mat3::identity() * -5.0 + *eta * eta.transpose() * 15.0) / (4.0 * PI);
        assert_abs_diff_eq!(h, expected, epsilon = 1e-15);
        assert_abs_diff_eq!(h.trace(), 0.0, epsilon = 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let x = random_interior(&mut rng, 0.8);
            let eta = random_unit(&mut rng);
            let h = poisson_hessian(&x, &eta);
            assert_abs_diff_eq!(h, h.transpose(), epsilon = 1e-12 * h.norm());
            assert!(h.trace().abs() <= 1e-12 * h.norm());
        }
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = 1e-4;
        for _ in 0..10 {
            let x = random_interior(&mut rng, 0.7);
            let eta = random_unit(&mut rng);
            let exact = poisson_hessian(&x, &eta);
            let p = |v: Vec3| kernel_value(&v, &eta);
            let mut fd = Mat3::zeros();
            for i in 0..3 {
                for j in 0..3 {
                    let (mut ei, mut ej) = (Vec3::zeros(), Vec3::zeros());
                    ei[i] = h;
                    ej[j] = h;
                    fd[(i, j)] = (p(*x + ei + ej) - p(*x + ei - ej) - p(*x - ei + ej) + p(*x - ei - ej))
                        / (4.0 * h * h);
                }
            }
            assert!((exact - fd).norm() <= 1e-6 * exact.norm(), "{exact} vs {fd}");
        }
    }

    #[test]
    fn elastic_kernel_special_cases() {
        let eta = UnitVector::normalize(Vec3::new(1.0, -2.0, 0.5)).unwrap();
        let x = InteriorPoint::new(Vec3::new(0.2, 0.1, -0.3)).unwrap();
        let degenerate = elastic_kernel(&x, &eta, &params(-1.0, 1.0)).unwrap();
        assert_eq!(degenerate, Mat3::identity() * harmonic_poisson_kernel(&x, &eta));

        let p = params(1.0, 1.0);
        let at0 = elastic_kernel(&InteriorPoint::origin(), &eta, &p).unwrap();
        let (alpha, beta) = (p.alpha(), p.beta());
        let expected = Mat3::identity() / (4.0 * PI)
            + (Mat3::identity() * -5.0 + *eta * eta.transpose() * 15.0) * (beta / (2.0 - alpha) / (4.0 * PI));
        assert_abs_diff_eq!(at0, expected, epsilon = 1e-14);
    }

    #[test]
    fn elastic_kernel_trace_and_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for p in [params(1.0, 1.0), params(2.0, 1.0), params(-0.5, 1.0)] {
            let k = ElasticKernel::new(p);
            for _ in 0..10 {
                let x = random_interior(&mut rng, 0.95);
                let eta = random_unit(&mut rng);
                let m = k.eval(&x, &eta).unwrap();
                let p3 = 3.0 * harmonic_poisson_kernel(&x, &eta);
                assert!((m.trace() - p3).abs() <= 1e-8 * p3.max(1.0));
                assert!((m - m.transpose()).norm() <= 1e-12 * m.norm());
            }
        }
    }

    #[test]
    fn phi_hessian_matches_plain_gauss_legendre_with_substitution() {
        // t = s^{1/(2−α)} removes the weight entirely; a fine plain rule in s
        // gives an independent value for the t-integral.
        let p = params(2.0, 1.0);
        let k = ElasticKernel::new(p);
        let x = InteriorPoint::new(Vec3::new(0.3, -0.2, 0.4)).unwrap();
        let eta = UnitVector::normalize(Vec3::new(0.1, 0.2, -0.9)).unwrap();
        let kappa = 1.0 / (2.0 - p.alpha());
        let (s, w) = crate::quadrature::gauss_legendre(4000);
        let oracle: Mat3 = s
            .iter()
            .zip(&w)
            .map(|(s, w)| {
                let u = 0.5 * (s + 1.0);
                hessian_raw(&(*x * u.powf(kappa)), &eta) * (0.5 * w * kappa)
            })
            .sum();
        let got = k.phi_hessian(&x, &eta).unwrap();
        assert!((got - oracle).norm() < 1e-9 * oracle.norm(), "{got} vs {oracle}");
    }

    #[test]
    fn kernel_reproduces_basis_solutions() {
        let grid = SphereGrid::new(24);
        let p = params(1.0, 1.0);
        let f = FieldSamples::from_fn(&grid, |e| eval_vsh(VshFamily::Plus, idx(1, 0), e).unwrap());
        let k = ElasticKernel::new(p);
        for x in [Vec3::new(0.2, -0.3, 0.4), Vec3::new(0.0, 0.5, 0.1)] {
            let xi = InteriorPoint::new(x).unwrap();
            let u = k.apply(&grid, &f, &xi).unwrap();
            let exact = eval_basis_solution(VshFamily::Plus, idx(1, 0), &p, &x).unwrap();
            assert!((u - exact).norm() < 1e-5, "{u} vs {exact}");
        }

        let id = FieldSamples::from_fn(&grid, |e| *e.as_vec());
        let x = InteriorPoint::new(Vec3::new(0.5, 0.2, -0.4)).unwrap();
        for p in [params(1.0, 1.0), params(-0.5, 2.0)] {
            let u = elastic_poisson_apply(&grid, &id, &x, &p).unwrap();
            assert_abs_diff_eq!(u, *x, epsilon = 1e-6);
        }

        let far = InteriorPoint::new(Vec3::new(0.95, 0.0, 0.0)).unwrap();
        assert!(matches!(
            elastic_poisson_apply(&grid, &id, &far, &p),
            Err(Error::TooCloseToBoundary { .. })
        ));
    }

    #[test]
    fn poisson_extension_examples() {
        let x = Vec3::new(0.1, 0.2, -0.6);
        let c = ScalarExpansion::basis(idx(0, 0)).scale(2.0 * PI.sqrt() * 3.0);
        assert_abs_diff_eq!(poisson_extend(&c, &x), 3.0, epsilon = 1e-14);
        assert_eq!(poisson_gradient(&c, &x), Vec3::zeros());

        let y10 = ScalarExpansion::basis(idx(1, 0));
        let k = (3.0 / (4.0 * PI)).sqrt();
        assert_abs_diff_eq!(poisson_extend(&y10, &x), k * x[2], epsilon = 1e-15);
        assert_abs_diff_eq!(poisson_gradient(&y10, &x), Vec3::new(0.0, 0.0, k), epsilon = 1e-15);

        let g = ScalarExpansion::from_fn(4, |i| (i.flat() as f64 * 0.37).sin());
        assert_abs_diff_eq!(poisson_extend(&g, &Vec3::zeros()), g.mean(), epsilon = 1e-15);
    }

    #[test]
    fn gradient_of_extension_is_extension_of_minus_field() {
        let g = ScalarExpansion::from_fn(5, |i| (i.flat() as f64 * 0.71).cos());
        let minus = op_l_minus(&g);
        let x = Vec3::new(-0.3, 0.25, 0.5);
        assert_abs_diff_eq!(
            poisson_gradient(&g, &x),
            harmonic_vector_extension(&minus, &x),
            epsilon = 1e-13
        );
    }

    #[test]
    fn h_plus_matches_spectral_solution() {
        let g = ScalarExpansion::from_fn(4, |i| (i.flat() as f64 * 1.3).sin());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for p in [params(1.0, 1.0), params(3.0, 0.5)] {
            let sol = solve_dirichlet(&op_l_plus(&g), &p);
            for _ in 0..10 {
                let x = *random_interior(&mut rng, 0.99);
                assert_abs_diff_eq!(h_plus_representation(&g, &p, &x), sol.eval(&x).unwrap(), epsilon = 1e-12);
            }
        }
        // β ≡ 0: only the harmonic part is left
        let p = params(-1.0, 1.0);
        let x = Vec3::new(0.3, 0.3, 0.3);
        assert_abs_diff_eq!(h_plus_representation(&g, &p, &x), harmonic_plus_extension(&g, &x), epsilon = 1e-14);
        // boundary restriction equals the E⁺ synthesis
        let eta = UnitVector::normalize(Vec3::new(1.0, 2.0, 3.0)).unwrap();
        assert_abs_diff_eq!(
            h_plus_representation(&g, &params(2.0, 1.0), &eta),
            crate::decomposition::synthesize(&op_l_plus(&g), &eta),
            epsilon = 1e-12
        );
    }
}
