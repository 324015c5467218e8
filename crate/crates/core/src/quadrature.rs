//! Quadrature on the unit sphere and on `[0, 1]`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::sphharm::{HarmonicIndex, SolidHarmonics, UnitVector};
use crate::{Error, Result, Vec3};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * d * d);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Jacobi rule for `∫_0^1 f(t) t^γ dt`, `γ > -1`, via Golub–Welsch.
pub fn gauss_jacobi_unit(n: usize, gamma: f64) -> (Vec<f64>, Vec<f64>) {
    // Jacobi weight (1+x)^γ on [-1, 1], then t = (1+x)/2.
    let b = gamma;
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + b;
        jacobi[(k, k)] = if k == 0 {
            b / (b + 2.0)
        } else {
            b * b / (s * (s + 2.0))
        };
        if k + 1 < n {
            let m = kf + 1.0;
            let s = 2.0 * m + b;
            let off = (4.0 * m * m * (m + b) * (m + b) / (s * s * (s + 1.0) * (s - 1.0))).sqrt();
            jacobi[(k, k + 1)] = off;
            jacobi[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            ((1.0 + eig.eigenvalues[k]) / 2.0, v0 * v0 / (b + 1.0))
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Quadrature nodes and weights on the unit sphere.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    nodes: Vec<UnitVector>,
    weights: Vec<f64>,
    exactness_degree: usize,
}

impl SphereGrid {
    /// Product grid: `L+1` Gauss–Legendre nodes in `cos θ` times `2L+1`
    /// equispaced azimuths. Integrates every harmonic of degree `<= 2L` exactly.
    pub fn new(band_limit: usize) -> Self {
        let (cos_nodes, cos_weights) = gauss_legendre(band_limit + 1);
        let n_phi = 2 * band_limit + 1;
        let dphi = 2.0 * PI / n_phi as f64;
        let mut nodes = Vec::with_capacity(cos_nodes.len() * n_phi);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for (c, w) in cos_nodes.iter().zip(&cos_weights) {
            for k in 0..n_phi {
                nodes.push(UnitVector::from_spherical(*c, k as f64 * dphi));
                weights.push(w * dphi);
            }
        }
        Self {
            nodes,
            weights,
            exactness_degree: 2 * band_limit,
        }
    }

    /// A grid from externally supplied nodes and weights. The exactness degree
    /// is measured: the largest `d <= max_degree` such that every harmonic of
    /// degree `<= d` integrates correctly to within `1e-10`.
    pub fn from_parts(nodes: Vec<UnitVector>, weights: Vec<f64>, max_degree: usize) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: nodes.len(),
                actual: weights.len(),
            });
        }
        if nodes.is_empty() {
            return Err(Error::Usage("grid has no nodes".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0)) {
            return Err(Error::Usage(format!("quadrature weight {w} is not positive")));
        }
        let mut moments = vec![0.0; crate::sphharm::dense_len(max_degree)];
        for (e, w) in nodes.iter().zip(&weights) {
            let t = SolidHarmonics::new(max_degree, e);
            for (acc, v) in moments.iter_mut().zip(t.values()) {
                *acc += w * v;
            }
        }
        let y00_mass = 2.0 * PI.sqrt();
        let mut exactness = None;
        for d in 0..=max_degree {
            let ok = HarmonicIndex::up_to(d)
                .filter(|i| i.degree() == d)
                .all(|i| {
                    let expected = if d == 0 { y00_mass } else { 0.0 };
                    (moments[i.flat()] - expected).abs() <= 1e-10
                });
            if !ok {
                break;
            }
            exactness = Some(d);
        }
        let exactness_degree = exactness.ok_or_else(|| {
            Error::Usage("weights do not integrate constants (total weight must be 4π)".into())
        })?;
        Ok(Self {
            nodes,
            weights,
            exactness_degree,
        })
    }

    pub fn nodes(&self) -> &[UnitVector] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn exactness_degree(&self) -> usize {
        self.exactness_degree
    }

    pub fn require_exactness(&self, required: usize) -> Result<()> {
        if self.exactness_degree < required {
            return Err(Error::InsufficientExactness {
                available: self.exactness_degree,
                required,
            });
        }
        Ok(())
    }

    fn check_len(&self, actual: usize) -> Result<()> {
        if actual != self.nodes.len() {
            return Err(Error::LengthMismatch {
                expected: self.nodes.len(),
                actual,
            });
        }
        Ok(())
    }

    /// `Σ wᵢ vᵢ`.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        self.check_len(values.len())?;
        Ok(self.weights.iter().zip(values).map(|(w, v)| w * v).sum())
    }

    /// `(∫_S |f|^p dσ)^{1/p}`; `p = ∞` gives the largest node value, a lower
    /// bound for the true supremum.
    pub fn lp_norm(&self, f: &FieldSamples, p: f64) -> Result<f64> {
        self.check_len(f.len())?;
        check_exponent(p)?;
        if p.is_infinite() {
            return Ok(f.iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
        let sum: f64 = if p == 2.0 {
            self.weights.iter().zip(f.iter()).map(|(w, v)| w * v.norm_squared()).sum()
        } else {
            self.weights.iter().zip(f.iter()).map(|(w, v)| w * v.norm().powf(p)).sum()
        };
        Ok(sum.powf(1.0 / p))
    }
}

/// Same as [`SphereGrid::new`].
pub fn build_grid(band_limit: usize) -> SphereGrid {
    SphereGrid::new(band_limit)
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// Vector field values at the nodes of a grid, in node order.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSamples(Vec<Vec3>);

impl FieldSamples {
    pub fn new(values: Vec<Vec3>) -> Self {
        Self(values)
    }

    pub fn from_fn(grid: &SphereGrid, f: impl Fn(&UnitVector) -> Vec3) -> Self {
        Self(grid.nodes().iter().map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vec3> {
        self.0.iter()
    }

    pub fn values(&self) -> &[Vec3] {
        &self.0
    }

    /// Pointwise difference; lengths must agree.
    pub fn sub(&self, other: &FieldSamples) -> Result<FieldSamples> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }
}

impl std::ops::Index<usize> for FieldSamples {
    type Output = Vec3;
    fn index(&self, i: usize) -> &Vec3 {
        &self.0[i]
    }
}
