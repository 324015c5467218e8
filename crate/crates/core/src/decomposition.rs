//! Coefficient-space analysis of scalar and vector fields on the sphere.
//!
//! Scalar functions are expanded as `Σ a_{l,m} Y_{l,m}` and vector fields as
//! `Σ_# Σ a^#_{l,m} E^#_{l,m}`. The family projections, the zonal multipliers
//! and the operators `L₋`, `L₀`, `L₊` all act diagonally on these
//! coefficients.

use crate::quadrature::{FieldSamples, SphereGrid};
use crate::sphharm::{dense_len, HarmonicIndex, SolidHarmonics, UnitVector};
use crate::vsh::{vsh_from_table, vsh_norm_sq, VshFamily};
use crate::{Error, Result, Vec3};

/// Band-limited scalar expansion with dense coefficients for `l <= L`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarExpansion {
    band_limit: usize,
    coeffs: Vec<f64>,
}

impl ScalarExpansion {
    pub fn zeros(band_limit: usize) -> Self {
        Self {
            band_limit,
            coeffs: vec![0.0; dense_len(band_limit)],
        }
    }

    /// Coefficients in flat `l² + l + m` order.
    pub fn from_coefficients(band_limit: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != dense_len(band_limit) {
            return Err(Error::LengthMismatch {
                expected: dense_len(band_limit),
                actual: coeffs.len(),
            });
        }
        Ok(Self { band_limit, coeffs })
    }

    pub fn from_fn(band_limit: usize, mut f: impl FnMut(HarmonicIndex) -> f64) -> Self {
        Self {
            band_limit,
            coeffs: HarmonicIndex::up_to(band_limit).map(&mut f).collect(),
        }
    }

    /// A single basis function `Y_{l,m}`, in an expansion of band limit `l`.
    pub fn basis(idx: HarmonicIndex) -> Self {
        let mut e = Self::zeros(idx.degree());
        e.coeffs[idx.flat()] = 1.0;
        e
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Zero when `idx` lies beyond the band limit.
    pub fn get(&self, idx: HarmonicIndex) -> f64 {
        self.coeffs.get(idx.flat()).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, idx: HarmonicIndex, value: f64) -> Result<()> {
        if idx.degree() > self.band_limit {
            return Err(Error::BandLimit(format!(
                "index {idx} exceeds band limit {}",
                self.band_limit
            )));
        }
        self.coeffs[idx.flat()] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (HarmonicIndex, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &a)| (HarmonicIndex::from_flat(k), a))
    }

    /// `a_{0,0} Y_{0,0}`, i.e. the mean of the function over the sphere.
    pub fn mean(&self) -> f64 {
        self.coeffs[0] / (4.0 * std::f64::consts::PI).sqrt()
    }

    /// Copy with band limit `band_limit`, truncating or zero-padding.
    pub fn with_band_limit(&self, band_limit: usize) -> Self {
        let mut coeffs = vec![0.0; dense_len(band_limit)];
        let n = coeffs.len().min(self.coeffs.len());
        coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        Self { band_limit, coeffs }
    }

    pub fn eval(&self, eta: &UnitVector) -> f64 {
        let t = SolidHarmonics::new(self.band_limit, eta);
        self.coeffs.iter().zip(t.values()).map(|(a, y)| a * y).sum()
    }

    pub fn add(&self, other: &ScalarExpansion) -> ScalarExpansion {
        let band_limit = self.band_limit.max(other.band_limit);
        let (a, b) = (self.with_band_limit(band_limit), other.with_band_limit(band_limit));
        Self {
            band_limit,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> ScalarExpansion {
        Self {
            band_limit: self.band_limit,
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }
}

/// Band-limited expansion in the `E⁺`, `E⁻`, `E⁰` families.
///
/// Each family holds a dense coefficient vector; the `l = 0` entries of the
/// Minus and Zero families are always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct VshExpansion {
    band_limit: usize,
    plus: Vec<f64>,
    minus: Vec<f64>,
    zero: Vec<f64>,
}

impl VshExpansion {
    pub fn zeros(band_limit: usize) -> Self {
        let n = dense_len(band_limit);
        Self {
            band_limit,
            plus: vec![0.0; n],
            minus: vec![0.0; n],
            zero: vec![0.0; n],
        }
    }

    /// A single basis field `E^#_{l,m}`.
    pub fn basis(family: VshFamily, idx: HarmonicIndex) -> Result<Self> {
        let mut e = Self::zeros(idx.degree());
        e.set(family, idx, 1.0)?;
        Ok(e)
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn family(&self, family: VshFamily) -> &[f64] {
        match family {
            VshFamily::Plus => &self.plus,
            VshFamily::Minus => &self.minus,
            VshFamily::Zero => &self.zero,
        }
    }

    fn family_mut(&mut self, family: VshFamily) -> &mut Vec<f64> {
        match family {
            VshFamily::Plus => &mut self.plus,
            VshFamily::Minus => &mut self.minus,
            VshFamily::Zero => &mut self.zero,
        }
    }

    pub fn get(&self, family: VshFamily, idx: HarmonicIndex) -> f64 {
        self.family(family).get(idx.flat()).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, family: VshFamily, idx: HarmonicIndex, value: f64) -> Result<()> {
        family.check_degree(idx.degree())?;
        if idx.degree() > self.band_limit {
            return Err(Error::BandLimit(format!(
                "index {idx} exceeds band limit {}",
                self.band_limit
            )));
        }
        self.family_mut(family)[idx.flat()] = value;
        Ok(())
    }

    /// All `(family, index, coefficient)` triples, ordered by family then `(l, m)`.
    pub fn iter(&self) -> impl Iterator<Item = (VshFamily, HarmonicIndex, f64)> + '_ {
        VshFamily::ALL.into_iter().flat_map(move |f| {
            self.family(f)
                .iter()
                .enumerate()
                .map(move |(k, &a)| (f, HarmonicIndex::from_flat(k), a))
                .filter(move |(f, i, _)| i.degree() >= f.min_degree())
        })
    }

    pub fn is_zero(&self) -> bool {
        self.iter().all(|(_, _, a)| a == 0.0)
    }

    /// `Σ a² ‖E^#_{l}‖²` over one family: the squared L² norm of its part.
    pub fn family_energy(&self, family: VshFamily) -> f64 {
        self.iter()
            .filter(|(f, _, _)| *f == family)
            .map(|(f, i, a)| a * a * vsh_norm_sq(f, i.degree()).unwrap_or(0.0))
            .sum()
    }

    /// Squared L² norm of the synthesized field (Parseval).
    pub fn energy(&self) -> f64 {
        VshFamily::ALL.iter().map(|&f| self.family_energy(f)).sum()
    }

    pub fn with_band_limit(&self, band_limit: usize) -> Self {
        let mut out = Self::zeros(band_limit);
        for f in VshFamily::ALL {
            let src = self.family(f);
            let dst = out.family_mut(f);
            let n = dst.len().min(src.len());
            dst[..n].copy_from_slice(&src[..n]);
        }
        out
    }

    pub fn add(&self, other: &VshExpansion) -> VshExpansion {
        let band_limit = self.band_limit.max(other.band_limit);
        let mut out = self.with_band_limit(band_limit);
        let b = other.with_band_limit(band_limit);
        for f in VshFamily::ALL {
            for (x, y) in out.family_mut(f).iter_mut().zip(b.family(f)) {
                *x += y;
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> VshExpansion {
        let mut out = self.clone();
        for f in VshFamily::ALL {
            out.family_mut(f).iter_mut().for_each(|a| *a *= s);
        }
        out
    }

    /// The families carrying at least one nonzero coefficient.
    pub fn families_present(&self) -> Vec<VshFamily> {
        VshFamily::ALL
            .into_iter()
            .filter(|&f| self.family(f).iter().any(|a| *a != 0.0))
            .collect()
    }
}

/// Per-degree multiplier sequence `β_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalSequence(Vec<f64>);

impl ZonalSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((l, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Usage(format!("multiplier at degree {l} is not finite: {v}")));
        }
        Ok(Self(values))
    }

    pub fn from_fn(max_degree: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((0..=max_degree).map(f).collect())
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn get(&self, degree: usize) -> Option<f64> {
        self.0.get(degree).copied()
    }
}

/// `a_{l,m} = Σ wᵢ f(ηᵢ) Y_{l,m}(ηᵢ)`; exact when `f` has band limit `L`.
pub fn analyze_scalar(grid: &SphereGrid, samples: &[f64], band_limit: usize) -> Result<ScalarExpansion> {
    grid.require_exactness(2 * band_limit)?;
    if samples.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            actual: samples.len(),
        });
    }
    let mut out = ScalarExpansion::zeros(band_limit);
    for ((eta, w), f) in grid.nodes().iter().zip(grid.weights()).zip(samples) {
        let t = SolidHarmonics::new(band_limit, eta);
        for (a, y) in out.coeffs.iter_mut().zip(t.values()) {
            *a += w * f * y;
        }
    }
    Ok(out)
}

/// `a^#_{l,m} = ⟨f, E^#_{l,m}⟩ / ‖E^#_{l,m}‖²`.
///
/// The Plus family at degree `L` has degree `L+1` components, so the grid must
/// be exact to degree `2(L+1)`.
pub fn analyze_field(grid: &SphereGrid, f: &FieldSamples, band_limit: usize) -> Result<VshExpansion> {
    grid.require_exactness(2 * (band_limit + 1))?;
    if f.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            actual: f.len(),
        });
    }
    let mut out = VshExpansion::zeros(band_limit);
    for ((eta, w), v) in grid.nodes().iter().zip(grid.weights()).zip(f.iter()) {
        let t = SolidHarmonics::new(band_limit, eta);
        for idx in HarmonicIndex::up_to(band_limit) {
            for fam in VshFamily::ALL {
                if idx.degree() < fam.min_degree() {
                    continue;
                }
                out.family_mut(fam)[idx.flat()] += w * v.dot(&vsh_from_table(&t, fam, idx));
            }
        }
    }
    for fam in VshFamily::ALL {
        for (k, a) in out.family_mut(fam).iter_mut().enumerate() {
            let l = HarmonicIndex::from_flat(k).degree();
            *a = match vsh_norm_sq(fam, l) {
                Ok(n) => *a / n,
                Err(_) => 0.0,
            };
        }
    }
    Ok(out)
}

/// `Σ_# Σ a^#_{l,m} E^#_{l,m}(η)`.
pub fn synthesize(expansion: &VshExpansion, eta: &UnitVector) -> Vec3 {
    let t = SolidHarmonics::new(expansion.band_limit, eta);
    expansion
        .iter()
        .filter(|(_, _, a)| *a != 0.0)
        .map(|(f, i, a)| vsh_from_table(&t, f, i) * a)
        .sum()
}

/// Samples the synthesized field at every grid node.
pub fn synthesize_on(expansion: &VshExpansion, grid: &SphereGrid) -> FieldSamples {
    FieldSamples::from_fn(grid, |e| synthesize(expansion, e))
}

/// Keeps only the coefficients of `family`.
pub fn project(expansion: &VshExpansion, family: VshFamily) -> VshExpansion {
    let mut out = VshExpansion::zeros(expansion.band_limit);
    *out.family_mut(family) = expansion.family(family).to_vec();
    out
}

/// Scales every degree-`l` coefficient by `β_l`.
pub fn apply_zonal_multiplier(g: &ScalarExpansion, beta: &ZonalSequence) -> Result<ScalarExpansion> {
    if beta.0.len() <= g.band_limit {
        return Err(Error::BandLimit(format!(
            "multiplier covers degrees up to {:?}, expansion needs {}",
            beta.max_degree(),
            g.band_limit
        )));
    }
    Ok(ScalarExpansion {
        band_limit: g.band_limit,
        coeffs: g.iter().map(|(i, a)| beta.0[i.degree()] * a).collect(),
    })
}

fn lift(g: &ScalarExpansion, family: VshFamily) -> VshExpansion {
    let mut out = VshExpansion::zeros(g.band_limit);
    for (i, a) in g.iter() {
        if i.degree() >= family.min_degree() {
            out.family_mut(family)[i.flat()] = a;
        }
    }
    out
}

/// `L₋g = (M_l g)^∨ + ∇_σ g`, i.e. `Y_{l,m} ↦ E⁻_{l,m}`; constants are the kernel.
pub fn op_l_minus(g: &ScalarExpansion) -> VshExpansion {
    lift(g, VshFamily::Minus)
}

/// `L₀g = η × ∇_σ g`, i.e. `Y_{l,m} ↦ E⁰_{l,m}`; constants are the kernel.
pub fn op_l_zero(g: &ScalarExpansion) -> VshExpansion {
    lift(g, VshFamily::Zero)
}

/// `L₊g = (M_{l+1} g)^∨ − ∇_σ g`, i.e. `Y_{l,m} ↦ E⁺_{l,m}`; injective.
pub fn op_l_plus(g: &ScalarExpansion) -> VshExpansion {
    lift(g, VshFamily::Plus)
}

/// Inverts `L_#` on a single-family expansion. For Minus and Zero the
/// undetermined constant is fixed by giving `g` zero mean.
pub fn potential_of(expansion: &VshExpansion, family: VshFamily) -> Result<ScalarExpansion> {
    if let Some(&other) = expansion
        .families_present()
        .iter()
        .find(|&&f| f != family)
    {
        return Err(Error::MixedFamilies {
            family: other,
            expected: family,
        });
    }
    Ok(ScalarExpansion {
        band_limit: expansion.band_limit,
        coeffs: expansion.family(family).to_vec(),
    })
}
