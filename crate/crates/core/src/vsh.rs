//! The three vector spherical harmonic families.
//!
//! For a scalar harmonic `Y = Y_{l,m}` on the sphere:
//!
//! ```text
//! E⁺ = (l+1) Y η − ∇_σY      restriction of a degree l+1 harmonic polynomial field
//! E⁻ =  l    Y η + ∇_σY      restriction of ∇Y (degree l-1)
//! E⁰ =  η × ∇_σY             restriction of x × ∇Y (degree l)
//! ```
//!
//! The elements are not normalized; see [`vsh_norm_sq`].

use std::fmt;
use std::str::FromStr;

use crate::sphharm::{HarmonicIndex, SolidHarmonics, UnitVector};
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VshFamily {
    Plus,
    Minus,
    Zero,
}

impl VshFamily {
    pub const ALL: [VshFamily; 3] = [VshFamily::Plus, VshFamily::Minus, VshFamily::Zero];

    /// Smallest degree with a nonzero member.
    pub fn min_degree(self) -> usize {
        match self {
            VshFamily::Plus => 0,
            VshFamily::Minus | VshFamily::Zero => 1,
        }
    }

    pub fn check_degree(self, degree: usize) -> Result<()> {
        if degree < self.min_degree() {
            return Err(Error::EmptyFamily {
                family: self,
                degree,
            });
        }
        Ok(())
    }

    pub fn symbol(self) -> &'static str {
        match self {
            VshFamily::Plus => "+",
            VshFamily::Minus => "-",
            VshFamily::Zero => "0",
        }
    }
}

impl fmt::Display for VshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VshFamily::Plus => "E+",
            VshFamily::Minus => "E-",
            VshFamily::Zero => "E0",
        })
    }
}

impl FromStr for VshFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" | "Plus" => Ok(VshFamily::Plus),
            "-" | "minus" | "Minus" => Ok(VshFamily::Minus),
            "0" | "zero" | "Zero" => Ok(VshFamily::Zero),
            other => Err(Error::Usage(format!(
                "unknown family {other:?} (expected \"+\", \"-\" or \"0\")"
            ))),
        }
    }
}

/// `E^#_{l,m}(η)`.
pub fn eval_vsh(family: VshFamily, idx: HarmonicIndex, eta: &UnitVector) -> Result<Vec3> {
    family.check_degree(idx.degree())?;
    let table = SolidHarmonics::new(idx.degree(), eta);
    Ok(vsh_from_table(&table, family, idx))
}

/// Evaluates a family member from a table built at a unit vector. Degree
/// compatibility is the caller's responsibility (Minus/Zero at `l = 0` give 0).
pub(crate) fn vsh_from_table(table: &SolidHarmonics, family: VshFamily, idx: HarmonicIndex) -> Vec3 {
    let eta = table.point();
    let l = idx.degree() as f64;
    let y = table.value(idx);
    let sg = table.surface_gradient(idx);
    match family {
        VshFamily::Plus => eta * ((l + 1.0) * y) - sg,
        VshFamily::Minus => eta * (l * y) + sg,
        VshFamily::Zero => eta.cross(&sg),
    }
}

/// `∫_S |E^#_{l,m}|² dσ`: `(l+1)(2l+1)`, `l(2l+1)` or `l(l+1)`.
pub fn vsh_norm_sq(family: VshFamily, degree: usize) -> Result<f64> {
    family.check_degree(degree)?;
    let l = degree as f64;
    Ok(match family {
        VshFamily::Plus => (l + 1.0) * (2.0 * l + 1.0),
        VshFamily::Minus => l * (2.0 * l + 1.0),
        VshFamily::Zero => l * (l + 1.0),
    })
}
