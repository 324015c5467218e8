//! Real orthonormal spherical harmonics and their solid extensions.
//!
//! Convention: `∫_S Y_{l,m} Y_{l',m'} dσ = δ_{ll'} δ_{mm'}` against the
//! unnormalized surface measure (total mass 4π), no Condon–Shortley phase,
//! `m > 0` carries `cos(mφ)` and `m < 0` carries `sin(|m|φ)`.
//!
//! Everything is evaluated in Cartesian form. The solid harmonic
//! `r^l Y_{l,m}(x/r)` factors as `√2 · Re/Im (x + iy)^{|m|} · q_{l,|m|}(z, r²)`
//! where `q` is a homogeneous polynomial obtained from the normalized
//! associated-Legendre recurrence. No angles appear, so the poles and the
//! origin need no special treatment.

use std::f64::consts::{PI, SQRT_2};

use crate::{Error, Result, Vec3};

/// Largest degree the recurrences are tested for.
pub const MAX_TESTED_DEGREE: usize = 50;

/// Degree/order pair `(l, m)` with `|m| <= l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HarmonicIndex {
    degree: usize,
    order: i32,
}

impl HarmonicIndex {
    pub fn new(degree: usize, order: i32) -> Result<Self> {
        if order.unsigned_abs() as usize > degree {
            return Err(Error::InvalidIndex { degree, order });
        }
        Ok(Self { degree, order })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    /// Position in the dense `(L+1)²` layout: `l² + l + m`.
    pub fn flat(&self) -> usize {
        ((self.degree * self.degree + self.degree) as isize + self.order as isize) as usize
    }

    pub fn from_flat(k: usize) -> Self {
        let degree = (k as f64).sqrt() as usize;
        // guard against rounding in the sqrt
        let degree = if (degree + 1) * (degree + 1) <= k {
            degree + 1
        } else if degree * degree > k {
            degree - 1
        } else {
            degree
        };
        let order = k as i64 - (degree * degree + degree) as i64;
        Self {
            degree,
            order: order as i32,
        }
    }

    /// All indices with degree `<= max_degree`, in flat order.
    pub fn up_to(max_degree: usize) -> impl Iterator<Item = HarmonicIndex> {
        (0..dense_len(max_degree)).map(HarmonicIndex::from_flat)
    }
}

impl std::fmt::Display for HarmonicIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.degree, self.order)
    }
}

/// Number of `(l, m)` pairs with `l <= max_degree`.
pub fn dense_len(max_degree: usize) -> usize {
    (max_degree + 1) * (max_degree + 1)
}

/// A point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector(Vec3);

impl UnitVector {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !((n - 1.0).abs() <= Self::TOLERANCE) {
            return Err(Error::NotUnit(n));
        }
        Ok(Self(v))
    }

    /// Rescales `v` onto the sphere. `v` must be nonzero.
    pub fn normalize(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotUnit(n));
        }
        Ok(Self(v / n))
    }

    pub fn from_spherical(cos_theta: f64, phi: f64) -> Self {
        let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
        Self(Vec3::new(
            sin_theta * phi.cos(),
            sin_theta * phi.sin(),
            cos_theta,
        ))
    }

    pub fn as_vec(&self) -> &Vec3 {
        &self.0
    }
}

impl std::ops::Deref for UnitVector {
    type Target = Vec3;
    fn deref(&self) -> &Vec3 {
        &self.0
    }
}

/// A point of the open unit ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorPoint(Vec3);

impl InteriorPoint {
    pub fn new(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !(n < 1.0) {
            return Err(Error::OutsideBall { norm: n, limit: 1.0 });
        }
        Ok(Self(v))
    }

    pub fn origin() -> Self {
        Self(Vec3::zeros())
    }

    pub fn as_vec(&self) -> &Vec3 {
        &self.0
    }
}

impl std::ops::Deref for InteriorPoint {
    type Target = Vec3;
    fn deref(&self) -> &Vec3 {
        &self.0
    }
}

/// Values and Cartesian gradients of every solid harmonic `r^l Y_{l,m}` with
/// `l <= max_degree`, tabulated at one point of ℝ³.
#[derive(Debug, Clone)]
pub struct SolidHarmonics {
    max_degree: usize,
    point: Vec3,
    values: Vec<f64>,
    gradients: Vec<Vec3>,
}

impl SolidHarmonics {
    pub fn new(max_degree: usize, x: &Vec3) -> Self {
        let n = dense_len(max_degree);
        let mut values = vec![0.0; n];
        let mut gradients = vec![Vec3::zeros(); n];

        let (px, py, pz) = (x[0], x[1], x[2]);
        let s = x.norm_squared();
        let ez = Vec3::new(0.0, 0.0, 1.0);

        // c_m + i s_m = (x + iy)^m, with gradients
        let mut cos_part = vec![0.0; max_degree + 1];
        let mut sin_part = vec![0.0; max_degree + 1];
        let mut cos_grad = vec![Vec3::zeros(); max_degree + 1];
        let mut sin_grad = vec![Vec3::zeros(); max_degree + 1];
        cos_part[0] = 1.0;
        for m in 1..=max_degree {
            let (c, sn) = (cos_part[m - 1], sin_part[m - 1]);
            cos_part[m] = px * c - py * sn;
            sin_part[m] = px * sn + py * c;
            let mf = m as f64;
            cos_grad[m] = Vec3::new(mf * c, -mf * sn, 0.0);
            sin_grad[m] = Vec3::new(mf * sn, mf * c, 0.0);
        }

        // q_{l,m}(z, r²) columns, one order at a time
        let mut sectoral = 1.0 / (4.0 * PI).sqrt();
        let mut q = vec![0.0; max_degree + 1];
        let mut dq = vec![Vec3::zeros(); max_degree + 1];
        for m in 0..=max_degree {
            if m > 0 {
                let mf = m as f64;
                sectoral *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt();
            }
            q[m] = sectoral;
            dq[m] = Vec3::zeros();
            if m < max_degree {
                let a = (2.0 * m as f64 + 3.0).sqrt();
                q[m + 1] = a * pz * sectoral;
                dq[m + 1] = ez * (a * sectoral);
            }
            for l in (m + 2)..=max_degree {
                let (lf, mf) = (l as f64, m as f64);
                let denom = lf * lf - mf * mf;
                let a = ((4.0 * lf * lf - 1.0) / denom).sqrt();
                let b = ((2.0 * lf + 1.0) * ((lf - 1.0) * (lf - 1.0) - mf * mf)
                    / ((2.0 * lf - 3.0) * denom))
                    .sqrt();
                q[l] = a * pz * q[l - 1] - b * s * q[l - 2];
                dq[l] = (dq[l - 1] * pz + ez * q[l - 1]) * a - (dq[l - 2] * s + x * (2.0 * q[l - 2])) * b;
            }

            for l in m..=max_degree {
                let base = l * l + l;
                if m == 0 {
                    values[base] = q[l];
                    gradients[base] = dq[l];
                } else {
                    let k_cos = base + m;
                    let k_sin = base - m;
                    values[k_cos] = SQRT_2 * cos_part[m] * q[l];
                    gradients[k_cos] = (cos_grad[m] * q[l] + dq[l] * cos_part[m]) * SQRT_2;
                    values[k_sin] = SQRT_2 * sin_part[m] * q[l];
                    gradients[k_sin] = (sin_grad[m] * q[l] + dq[l] * sin_part[m]) * SQRT_2;
                }
            }
        }

        Self {
            max_degree,
            point: *x,
            values,
            gradients,
        }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn point(&self) -> &Vec3 {
        &self.point
    }

    /// # Panics
    /// If `idx.degree() > max_degree`.
    pub fn value(&self, idx: HarmonicIndex) -> f64 {
        self.values[idx.flat()]
    }

    pub fn gradient(&self, idx: HarmonicIndex) -> Vec3 {
        self.gradients[idx.flat()]
    }

    /// Surface gradient `∇Y − l·Y·x`; meaningful when the table point is on the sphere.
    pub fn surface_gradient(&self, idx: HarmonicIndex) -> Vec3 {
        self.gradient(idx) - self.point * (idx.degree() as f64 * self.value(idx))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `Y_{l,m}(η)`.
pub fn eval_scalar_harmonic(idx: HarmonicIndex, eta: &UnitVector) -> f64 {
    SolidHarmonics::new(idx.degree(), eta).value(idx)
}

/// `r^l Y_{l,m}(x/r)`; polynomial, so defined on all of ℝ³.
pub fn eval_solid_harmonic(idx: HarmonicIndex, x: &Vec3) -> f64 {
    SolidHarmonics::new(idx.degree(), x).value(idx)
}

pub fn eval_solid_gradient(idx: HarmonicIndex, x: &Vec3) -> Vec3 {
    SolidHarmonics::new(idx.degree(), x).gradient(idx)
}

/// Tangential gradient `∇_σ Y_{l,m}(η)`.
pub fn eval_surface_gradient(idx: HarmonicIndex, eta: &UnitVector) -> Vec3 {
    SolidHarmonics::new(idx.degree(), eta).surface_gradient(idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::SphereGrid;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn idx(l: usize, m: i32) -> HarmonicIndex {
        HarmonicIndex::new(l, m).unwrap()
    }

    fn unit(x: f64, y: f64, z: f64) -> UnitVector {
        UnitVector::normalize(Vec3::new(x, y, z)).unwrap()
    }

    /// Associated Legendre `P_l^m(t)` (no Condon–Shortley phase) from the
    /// monomial coefficients of `d^m/dt^m P_l`, an independent route to the
    /// angular recurrence used in the implementation.
    fn legendre_oracle(l: usize, m: usize, t: f64) -> f64 {
        let mut prev = vec![1.0];
        let mut cur = vec![0.0, 1.0];
        if l == 0 {
            cur = prev.clone();
        } else {
            for n in 1..l {
                let nf = n as f64;
                let mut next = vec![0.0; n + 2];
                for (k, c) in cur.iter().enumerate() {
                    next[k + 1] += (2.0 * nf + 1.0) * c / (nf + 1.0);
                }
                for (k, c) in prev.iter().enumerate() {
                    next[k] -= nf * c / (nf + 1.0);
                }
                prev = cur;
                cur = next;
            }
        }
        let mut coeffs = cur;
        for _ in 0..m {
            coeffs = coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect();
        }
        let poly: f64 = coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
        (1.0 - t * t).powf(m as f64 / 2.0) * poly
    }

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    fn spherical_oracle(l: usize, m: i32, eta: &UnitVector) -> f64 {
        let am = m.unsigned_abs() as usize;
        let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - am) / factorial(l + am)).sqrt();
        let phi = eta[1].atan2(eta[0]);
        let p = legendre_oracle(l, am, eta[2]);
        match m.cmp(&0) {
            std::cmp::Ordering::Equal => norm * p,
            std::cmp::Ordering::Greater => SQRT_2 * norm * p * (am as f64 * phi).cos(),
            std::cmp::Ordering::Less => SQRT_2 * norm * p * (am as f64 * phi).sin(),
        }
    }

    #[test]
    fn index_validation_and_layout() {
        assert!(matches!(
            HarmonicIndex::new(1, 2),
            Err(Error::InvalidIndex { degree: 1, order: 2 })
        ));
        assert!(HarmonicIndex::new(0, -1).is_err());
        for (k, i) in HarmonicIndex::up_to(12).enumerate() {
            assert_eq!(i.flat(), k);
            assert!(i.order().unsigned_abs() as usize <= i.degree());
        }
        assert_eq!(HarmonicIndex::from_flat(0), idx(0, 0));
        assert_eq!(HarmonicIndex::from_flat(3), idx(1, 1));
        assert_eq!(HarmonicIndex::from_flat(4), idx(2, -2));
    }

    #[test]
    fn unit_vector_and_interior_point_checks() {
        assert!(UnitVector::new(Vec3::new(1.0, 1e-5, 0.0)).is_err());
        assert!(UnitVector::new(Vec3::new(0.0, 0.0, 1.0)).is_ok());
        assert!(UnitVector::normalize(Vec3::zeros()).is_err());
        assert!(InteriorPoint::new(Vec3::new(1.0, 0.0, 0.0)).is_err());
        assert!(InteriorPoint::new(Vec3::new(0.5, 0.5, 0.5)).is_ok());
    }

    #[test]
    fn low_degree_values() {
        let c10 = (3.0 / (4.0 * PI)).sqrt();
        let e1 = unit(1.0, 0.0, 0.0);
        let e3 = unit(0.0, 0.0, 1.0);
        assert_abs_diff_eq!(eval_scalar_harmonic(idx(0, 0), &e1), 0.5 / PI.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(eval_scalar_harmonic(idx(1, 0), &e3), c10, epsilon = 1e-15);
        assert_abs_diff_eq!(eval_scalar_harmonic(idx(1, 0), &e1), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(eval_scalar_harmonic(idx(1, 0), &e3), 0.4886025119029199, epsilon = 1e-15);

        // real basis without phase: Y_{1,1} ∝ x, Y_{1,-1} ∝ y
        let eta = unit(0.3, -0.4, 0.5);
        assert_abs_diff_eq!(eval_scalar_harmonic(idx(1, 1), &eta), c10 * eta[0], epsilon = 1e-15);
        assert_abs_diff_eq!(eval_scalar_harmonic(idx(1, -1), &eta), c10 * eta[1], epsilon = 1e-15);
        // Y_{2,1} = √(15/4π) x z
        assert_abs_diff_eq!(
            eval_scalar_harmonic(idx(2, 1), &eta),
            (15.0 / (4.0 * PI)).sqrt() * eta[0] * eta[2],
            epsilon = 1e-15
        );
    }

    #[test]
    fn agrees_with_angular_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let eta = unit(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let table = SolidHarmonics::new(10, &eta);
            for i in HarmonicIndex::up_to(10) {
                let expected = spherical_oracle(i.degree(), i.order(), &eta);
                assert_abs_diff_eq!(table.value(i), expected, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn solid_extension() {
        let x = Vec3::new(0.0, 0.0, 0.5);
        assert_abs_diff_eq!(eval_solid_harmonic(idx(1, 0), &x), 0.244_301_255_951_46, epsilon = 1e-15);
        assert_abs_diff_eq!(eval_solid_harmonic(idx(0, 0), &Vec3::zeros()), 0.5 / PI.sqrt());
        for m in -2..=2 {
            assert_eq!(eval_solid_harmonic(idx(2, m), &Vec3::zeros()), 0.0);
        }
        // homogeneity: Y(r x') = r^l Y(x')
        let eta = unit(0.2, 0.7, -0.1);
        for i in HarmonicIndex::up_to(8) {
            let r: f64 = 0.37;
            let expected = r.powi(i.degree() as i32) * eval_scalar_harmonic(i, &eta);
            assert_abs_diff_eq!(eval_solid_harmonic(i, &(*eta * r)), expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn gradients_of_low_degrees() {
        let x = Vec3::new(0.1, -0.6, 0.3);
        assert_eq!(eval_solid_gradient(idx(0, 0), &x), Vec3::zeros());
        let g = eval_solid_gradient(idx(1, 0), &x);
        assert_abs_diff_eq!(g, Vec3::new(0.0, 0.0, (3.0 / (4.0 * PI)).sqrt()), epsilon = 1e-15);

        let s1 = eval_surface_gradient(idx(1, 0), &unit(1.0, 0.0, 0.0));
        assert_abs_diff_eq!(s1, Vec3::new(0.0, 0.0, 0.4886025119029199), epsilon = 1e-15);
        let s2 = eval_surface_gradient(idx(1, 0), &unit(0.0, 0.0, 1.0));
        assert_abs_diff_eq!(s2, Vec3::zeros(), epsilon = 1e-15);
        assert_eq!(eval_surface_gradient(idx(0, 0), &unit(0.3, 0.3, 0.3)), Vec3::zeros());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let x = Vec3::new(0.31, -0.22, 0.45);
        let h = 1e-5;
        for i in HarmonicIndex::up_to(9) {
            let g = eval_solid_gradient(i, &x);
            for k in 0..3 {
                let mut dx = Vec3::zeros();
                dx[k] = h;
                let fd = (eval_solid_harmonic(i, &(x + dx)) - eval_solid_harmonic(i, &(x - dx))) / (2.0 * h);
                assert_abs_diff_eq!(g[k], fd, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn gradient_on_sphere_splits_into_radial_and_tangential_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let eta = unit(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let t = SolidHarmonics::new(12, &eta);
            for i in HarmonicIndex::up_to(12) {
                let sg = t.surface_gradient(i);
                assert!(sg.dot(&eta).abs() < 1e-12);
                let recomposed = *eta * (i.degree() as f64 * t.value(i)) + sg;
                assert_abs_diff_eq!(t.gradient(i), recomposed, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn poles_are_regular() {
        for sign in [1.0, -1.0] {
            let pole = unit(0.0, 0.0, sign);
            let t = SolidHarmonics::new(20, &pole);
            for i in HarmonicIndex::up_to(20) {
                assert!(t.value(i).is_finite());
                assert!(t.surface_gradient(i).iter().all(|c| c.is_finite()));
                if i.order() != 0 {
                    assert_eq!(t.value(i), 0.0);
                }
            }
        }
    }

    #[test]
    fn orthonormal_and_eigenfunction_on_exact_grid() {
        let lmax = 10;
        let grid = SphereGrid::new(lmax);
        let n = dense_len(lmax);
        let tables: Vec<_> = grid.nodes().iter().map(|e| SolidHarmonics::new(lmax, e)).collect();
        for a in 0..n {
            for b in a..n {
                let ia = HarmonicIndex::from_flat(a);
                let ib = HarmonicIndex::from_flat(b);
                let g: f64 = tables
                    .iter()
                    .zip(grid.weights())
                    .map(|(t, w)| w * t.value(ia) * t.value(ib))
                    .sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(g, expected, epsilon = 1e-12);
            }
            // -Δ_σ Y = l(l+1) Y, integrated by parts
            let ia = HarmonicIndex::from_flat(a);
            let energy: f64 = tables
                .iter()
                .zip(grid.weights())
                .map(|(t, w)| w * t.surface_gradient(ia).norm_squared())
                .sum();
            let l = ia.degree() as f64;
            assert_abs_diff_eq!(energy, l * (l + 1.0), epsilon = 1e-10);
        }
    }

    #[test]
    fn stable_up_to_degree_fifty() {
        let lmax = MAX_TESTED_DEGREE;
        let grid = SphereGrid::new(lmax);
        let tables: Vec<_> = grid.nodes().iter().map(|e| SolidHarmonics::new(lmax, e)).collect();
        // diagonal plus a band of neighbours within each degree-50 block
        for i in HarmonicIndex::up_to(lmax).filter(|i| i.degree() >= 45) {
            let norm: f64 = tables
                .iter()
                .zip(grid.weights())
                .map(|(t, w)| w * t.value(i) * t.value(i))
                .sum();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-11);
            let j = HarmonicIndex::new(i.degree(), -i.order()).unwrap();
            if j != i {
                let cross: f64 = tables
                    .iter()
                    .zip(grid.weights())
                    .map(|(t, w)| w * t.value(i) * t.value(j))
                    .sum();
                assert_abs_diff_eq!(cross, 0.0, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn solid_harmonics_are_harmonic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = 1e-3;
        for _ in 0..10 {
            let x = Vec3::new(
                rng.random_range(-0.5..0.5),
                rng.random_range(-0.5..0.5),
                rng.random_range(-0.5..0.5),
            );
            for i in HarmonicIndex::up_to(8) {
                let f = |p: Vec3| eval_solid_harmonic(i, &p);
                let mut lap = -6.0 * f(x);
                for k in 0..3 {
                    let mut d = Vec3::zeros();
                    d[k] = h;
                    lap += f(x + d) + f(x - d);
                }
                lap /= h * h;
                // second differences of a degree-l polynomial; compare against the
                // scale of the individual second derivatives
                let scale = f(x).abs().max(1.0) * (i.degree() * i.degree()) as f64 + 1.0;
                assert!(lap.abs() <= 1e-6 * scale, "{i}: {lap}");
            }
        }
    }
}
