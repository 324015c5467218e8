//! Named boundary fields for running the tools without input files.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomposition::{synthesize, VshExpansion};
use crate::sphharm::{HarmonicIndex, UnitVector};
use crate::vsh::VshFamily;
use crate::{Error, Result, Vec3};

/// Accepted names:
///
/// - `identity`: `f(η) = η`
/// - `constant-e3`: `f(η) = (0, 0, 1)`
/// - `zero`
/// - `vsh:<family>:<l>:<m>`: a single basis field
/// - `random:<L>:<seed>`: coefficients uniform in `[-1, 1]` up to degree `L`
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinField {
    Identity,
    ConstantE3,
    Zero,
    Basis(VshFamily, HarmonicIndex),
    Random { band_limit: usize, seed: u64 },
}

impl BuiltinField {
    /// Exact coefficients.
    pub fn expansion(&self) -> VshExpansion {
        match self {
            BuiltinField::Identity => {
                let mut e = VshExpansion::zeros(0);
                e.set(VshFamily::Plus, HarmonicIndex::new(0, 0).unwrap(), 2.0 * PI.sqrt())
                    .unwrap();
                e
            }
            BuiltinField::ConstantE3 => {
                let mut e = VshExpansion::zeros(1);
                e.set(VshFamily::Minus, HarmonicIndex::new(1, 0).unwrap(), (4.0 * PI / 3.0).sqrt())
                    .unwrap();
                e
            }
            BuiltinField::Zero => VshExpansion::zeros(0),
            BuiltinField::Basis(f, i) => VshExpansion::basis(*f, *i).expect("checked on parse"),
            BuiltinField::Random { band_limit, seed } => random_expansion(*band_limit, *seed),
        }
    }

    /// Pointwise value; closed form where one exists.
    pub fn sample(&self, eta: &UnitVector) -> Vec3 {
        match self {
            BuiltinField::Identity => *eta.as_vec(),
            BuiltinField::ConstantE3 => Vec3::z(),
            BuiltinField::Zero => Vec3::zeros(),
            _ => synthesize(&self.expansion(), eta),
        }
    }

    pub fn band_limit(&self) -> usize {
        self.expansion().band_limit()
    }
}

/// Every admissible coefficient drawn uniformly from `[-1, 1]`.
pub fn random_expansion(band_limit: usize, seed: u64) -> VshExpansion {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = VshExpansion::zeros(band_limit);
    for f in VshFamily::ALL {
        for i in HarmonicIndex::up_to(band_limit) {
            if f.check_degree(i.degree()).is_ok() {
                e.set(f, i, rng.random_range(-1.0..=1.0)).unwrap();
            }
        }
    }
    e
}

impl FromStr for BuiltinField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Usage(format!("unknown field {s:?} (try identity, constant-e3, zero, vsh:+:2:1, random:4:7)"));
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.parse::<i64>().map_err(|_| bad());
        match parts[..] {
            ["identity"] => Ok(BuiltinField::Identity),
            ["constant-e3"] => Ok(BuiltinField::ConstantE3),
            ["zero"] => Ok(BuiltinField::Zero),
            ["vsh", f, l, m] => {
                let family: VshFamily = f.parse()?;
                let l = usize::try_from(num(l)?).map_err(|_| bad())?;
                let m = i32::try_from(num(m)?).map_err(|_| bad())?;
                let idx = HarmonicIndex::new(l, m)?;
                family.check_degree(l)?;
                Ok(BuiltinField::Basis(family, idx))
            }
            ["random", l, seed] => Ok(BuiltinField::Random {
                band_limit: usize::try_from(num(l)?).map_err(|_| bad())?,
                seed: u64::try_from(num(seed)?).map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}
