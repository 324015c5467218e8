//! Self-checks run by `lame-ball verify`.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fields::random_expansion;
use super::files::read_coefficients;
use crate::decomposition::{analyze_field, synthesize, synthesize_on, ScalarExpansion, VshExpansion};
use crate::elastic::{
    beta_ell, elastic_kernel, eval_basis_solution, h_plus_representation, harmonic_poisson_kernel,
    relative_lame_residual, solve_dirichlet, ElasticKernel, LameParameters, SECOND_DERIVATIVE_STEP,
};
use crate::quadrature::SphereGrid;
use crate::sphharm::{HarmonicIndex, InteriorPoint, SolidHarmonics, UnitVector};
use crate::vsh::{eval_vsh, vsh_norm_sq, VshFamily};
use crate::{Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// `None` when the check could not be carried out.
    pub error: Option<f64>,
    pub tolerance: f64,
    pub note: Option<String>,
}

impl Check {
    fn measured(name: &str, error: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            error: Some(error),
            tolerance,
            note: None,
        }
    }

    fn from_result(name: &str, r: Result<f64>, tolerance: f64) -> Self {
        match r {
            Ok(e) => Self::measured(name, e, tolerance),
            Err(e) => Self {
                name: name.into(),
                error: None,
                tolerance,
                note: Some(e.to_string()),
            },
        }
    }

    pub fn passed(&self) -> bool {
        matches!(self.error, Some(e) if e <= self.tolerance)
    }

    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let error = self.error.map_or("n/a".to_string(), |e| format!("{e:.3e}"));
        let mut s = format!("{status}  {:<28} error={error:<10} tol={:.0e}", self.name, self.tolerance);
        if let Some(n) = &self.note {
            s.push_str("  ");
            s.push_str(n);
        }
        s
    }
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed)
}

fn random_unit(rng: &mut ChaCha8Rng) -> UnitVector {
    loop {
        let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if (0.1..1.0).contains(&v.norm()) {
            return UnitVector::normalize(v).unwrap();
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng, radius: f64) -> InteriorPoint {
    let e = random_unit(rng);
    InteriorPoint::new(e.as_vec() * (radius * rng.random::<f64>().cbrt())).unwrap()
}

fn params(lambda: f64, mu: f64) -> LameParameters {
    LameParameters::new(lambda, mu).expect("eligible")
}

fn scalar_orthonormality(band_limit: usize) -> f64 {
    let grid = SphereGrid::new(band_limit);
    let n = crate::sphharm::dense_len(band_limit);
    let mut gram = vec![0.0; n * n];
    for (e, w) in grid.nodes().iter().zip(grid.weights()) {
        let v = SolidHarmonics::new(band_limit, e).values().to_vec();
        for i in 0..n {
            for j in 0..n {
                gram[i * n + j] += w * v[i] * v[j];
            }
        }
    }
    (0..n * n)
        .map(|k| (gram[k] - if k / n == k % n { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
}

/// Largest deviation of the VSH Gram matrix from `diag(vsh_norm_sq)`.
pub fn vsh_gram_error(band_limit: usize) -> f64 {
    let grid = SphereGrid::new(band_limit + 1);
    let basis: Vec<(VshFamily, HarmonicIndex)> = VshFamily::ALL
        .iter()
        .flat_map(|&f| {
            HarmonicIndex::up_to(band_limit)
                .filter(move |i| f.check_degree(i.degree()).is_ok())
                .map(move |i| (f, i))
        })
        .collect();
    let n = basis.len();
    let mut gram = vec![0.0; n * n];
    for (e, w) in grid.nodes().iter().zip(grid.weights()) {
        let v: Vec<Vec3> = basis.iter().map(|(f, i)| eval_vsh(*f, *i, e).unwrap()).collect();
        for a in 0..n {
            for b in a..n {
                gram[a * n + b] += w * v[a].dot(&v[b]);
            }
        }
    }
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in a..n {
            let expected = if a == b {
                vsh_norm_sq(basis[a].0, basis[a].1.degree()).unwrap()
            } else {
                0.0
            };
            worst = worst.max((gram[a * n + b] - expected).abs());
        }
    }
    worst
}

fn basis_fields(band_limit: usize) -> impl Iterator<Item = (VshFamily, HarmonicIndex)> {
    VshFamily::ALL.into_iter().flat_map(move |f| {
        HarmonicIndex::up_to(band_limit)
            .filter(move |i| f.check_degree(i.degree()).is_ok())
            .map(move |i| (f, i))
    })
}

fn boundary_restriction(band_limit: usize, points: usize) -> f64 {
    let mut rng = rng();
    let p = params(1.0, 1.0);
    let mut worst = 0.0f64;
    for _ in 0..points {
        let e = random_unit(&mut rng);
        for (f, i) in basis_fields(band_limit) {
            let u = eval_basis_solution(f, i, &p, e.as_vec()).unwrap();
            worst = worst.max((u - eval_vsh(f, i, &e).unwrap()).norm());
        }
    }
    worst
}

fn lame_residuals(band_limit: usize, points: usize) -> Result<f64> {
    let mut rng = rng();
    let pts: Vec<InteriorPoint> = (0..points).map(|_| random_point(&mut rng, 0.95)).collect();
    let mut worst = 0.0f64;
    for p in [params(1.0, 1.0), params(-0.5, 1.0)] {
        for (f, i) in basis_fields(band_limit) {
            let u = |v: &Vec3| eval_basis_solution(f, i, &p, v).unwrap();
            for x in &pts {
                worst = worst.max(relative_lame_residual(u, &p, x, SECOND_DERIVATIVE_STEP)?);
            }
        }
    }
    Ok(worst)
}

fn kernel_structure(triples: usize) -> Result<f64> {
    let mut rng = rng();
    let mut worst = 0.0f64;
    for _ in 0..triples {
        let x = random_point(&mut rng, 0.9);
        let eta = random_unit(&mut rng);
        let mu = rng.random_range(0.1..3.0);
        let p = params(mu * rng.random_range(-1.9..5.0), mu);
        let k = elastic_kernel(&x, &eta, &p)?;
        let trace_gap = (k.trace() - 3.0 * harmonic_poisson_kernel(&x, &eta)).abs();
        worst = worst.max(trace_gap).max((k - k.transpose()).abs().max());
    }
    Ok(worst)
}

fn degenerate_beta() -> f64 {
    let p = params(-1.0, 1.0);
    (0..=50).map(|l| beta_ell(l, &p).abs()).fold(0.0, f64::max)
}

fn analysis_round_trip(e: &VshExpansion) -> Result<f64> {
    let grid = SphereGrid::new(e.band_limit() + 1);
    let back = analyze_field(&grid, &synthesize_on(e, &grid), e.band_limit())?;
    Ok(e.iter()
        .map(|(f, i, a)| (a - back.get(f, i)).abs())
        .fold(0.0, f64::max))
}

fn oracle_equivalence(points: usize) -> Result<f64> {
    let mut rng = rng();
    let boundary = random_expansion(4, 17);
    let grid = SphereGrid::new(24);
    let f = synthesize_on(&boundary, &grid);
    let mut worst = 0.0f64;
    for p in [params(1.0, 1.0), params(3.0, 0.5)] {
        let sol = solve_dirichlet(&boundary, &p);
        let kernel = ElasticKernel::new(p);
        for _ in 0..points {
            let x = random_point(&mut rng, 0.7);
            worst = worst.max((kernel.apply(&grid, &f, &x)? - sol.displacement(x.as_vec())).norm());
        }
    }
    Ok(worst)
}

fn h_plus_agreement(points: usize) -> f64 {
    let mut rng = rng();
    let g = ScalarExpansion::from_fn(4, |_| rng.random_range(-1.0..1.0));
    let mut plus = VshExpansion::zeros(4);
    for (i, a) in g.iter() {
        plus.set(VshFamily::Plus, i, a).unwrap();
    }
    let p = params(2.0, 1.0);
    let sol = solve_dirichlet(&plus, &p);
    (0..points)
        .map(|_| {
            let x = random_point(&mut rng, 1.0);
            (h_plus_representation(&g, &p, x.as_vec()) - sol.displacement(x.as_vec())).norm()
        })
        .fold(0.0, f64::max)
}

fn fixture_checks(path: &Path) -> Vec<Check> {
    let expansion = match read_coefficients(path).and_then(|c| c.into_vector(path)) {
        Ok(e) => e,
        Err(e) => {
            return vec![Check {
                name: "fixture-read".into(),
                error: None,
                tolerance: 0.0,
                note: Some(e.to_string()),
            }]
        }
    };
    let mut checks = vec![Check::measured("fixture-read", 0.0, 0.0)];
    let scale = expansion.iter().map(|(_, _, a)| a.abs()).fold(1.0, f64::max);
    checks.push(Check::from_result(
        "fixture-analysis-round-trip",
        analysis_round_trip(&expansion).map(|e| e / scale),
        1e-10,
    ));
    let p = params(1.0, 1.0);
    let sol = solve_dirichlet(&expansion, &p);
    let mut rng = rng();
    let boundary = (0..20)
        .map(|_| {
            let e = random_unit(&mut rng);
            (sol.displacement(e.as_vec()) - synthesize(&expansion, &e)).norm() / scale
        })
        .fold(0.0, f64::max);
    checks.push(Check::measured("fixture-boundary", boundary, 1e-10));
    let residual = (0..10)
        .map(|_| {
            let x = random_point(&mut rng, 0.95);
            relative_lame_residual(|v: &Vec3| sol.displacement(v), &p, &x, SECOND_DERIVATIVE_STEP)
        })
        .try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)));
    checks.push(Check::from_result("fixture-lame-residual", residual, 1e-5));
    checks
}

pub fn run_checks(level: Level, fixture: Option<&Path>) -> Vec<Check> {
    let mut checks = vec![
        Check::measured("sh-orthonormality", scalar_orthonormality(6), 1e-12),
        Check::measured("vsh-gram", vsh_gram_error(if level == Level::Full { 8 } else { 4 }), 1e-10),
        Check::measured("boundary-restriction", boundary_restriction(4, 20), 1e-12),
        Check::from_result("lame-residual", lame_residuals(if level == Level::Full { 5 } else { 3 }, 5), 1e-5),
        Check::from_result("kernel-trace-symmetry", kernel_structure(20), 1e-8),
        Check::measured("degenerate-beta", degenerate_beta(), 1e-14),
        Check::from_result("analysis-round-trip", analysis_round_trip(&random_expansion(4, 3)), 1e-10),
    ];
    if level == Level::Full {
        checks.push(Check::from_result("oracle-equivalence", oracle_equivalence(10), 1e-4));
        checks.push(Check::measured("h-plus-representation", h_plus_agreement(20), 1e-9));
    }
    if let Some(path) = fixture {
        checks.extend(fixture_checks(path));
    }
    checks
}
