//! The `lame-ball` command line.

pub mod fields;
pub mod files;
pub mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::decomposition::{analyze_field, synthesize, VshExpansion};
use crate::elastic::{elastic_kernel, harmonic_poisson_kernel, solve_dirichlet, LameParameters};
use crate::hardy::{default_radii, grid_for, radial_profile};
use crate::quadrature::{FieldSamples, SphereGrid};
use crate::sphharm::{InteriorPoint, UnitVector};
use crate::vsh::VshFamily;
use crate::{Error, Result, Vec3};
use fields::BuiltinField;
use files::{format_number, Coefficients, SampleTable};

#[derive(Debug, Parser)]
#[command(name = "lame-ball", version, about = "Spectral Lamé Dirichlet solver in the unit ball")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expand boundary samples in vector spherical harmonics.
    Decompose(DecomposeArgs),
    /// Evaluate the elastic extension of a coefficient file at interior points.
    Solve(SolveArgs),
    /// Sample a boundary field, or its extension at radius r, onto a grid.
    Eval(EvalArgs),
    /// Print the elastic Poisson kernel at (x, eta).
    Kernel(KernelArgs),
    /// Sphere norms of the extension on concentric spheres.
    Hardy(HardyArgs),
    /// Run the built-in consistency checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Material {
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
}

impl Material {
    fn params(&self) -> Result<LameParameters> {
        LameParameters::new(self.lambda, self.mu)
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Coefficient file (JSON), or a sample file for `decompose`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Built-in field: identity, constant-e3, zero, vsh:<+|-|0>:<l>:<m>, random:<L>:<seed>.
    #[arg(long)]
    pub field: Option<BuiltinField>,
}

impl Source {
    fn expansion(&self) -> Result<VshExpansion> {
        match (&self.input, &self.field) {
            (Some(path), _) => files::read_coefficients(path)?.into_vector(path),
            (None, Some(f)) => Ok(f.expansion()),
            (None, None) => Err(Error::Usage("one of --input or --field is required".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(short = 'L', long)]
    pub band_limit: usize,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Coefficient file (JSON).
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub material: Material,
    /// Evaluation point "x,y,z"; may be repeated.
    #[arg(long, allow_hyphen_values = true, value_parser = files::parse_point)]
    pub point: Vec<Vec3>,
    /// File with one "x,y,z" row per point.
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub source: Source,
    /// Grid band limit; the default integrates degree 2(L+1) for a field of band limit L.
    #[arg(short = 'L', long, conflicts_with = "grid")]
    pub band_limit: Option<usize>,
    /// Reuse the nodes and weights of this sample file.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Needed only for radius < 1.
    #[arg(long, allow_negative_numbers = true, requires = "mu")]
    pub lambda: Option<f64>,
    #[arg(long, requires = "lambda")]
    pub mu: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub material: Material,
    #[arg(long, allow_hyphen_values = true, value_parser = files::parse_point)]
    pub point: Vec3,
    /// Boundary direction; normalized if not unit.
    #[arg(long, allow_hyphen_values = true, value_parser = files::parse_point)]
    pub eta: Vec3,
}

#[derive(Debug, Args)]
pub struct HardyArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub material: Material,
    /// Exponent p >= 1, or "inf".
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Comma-separated radii in [0, 1); defaults to 1 − 2⁻ᵏ, k = 1..12.
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = verify::Level::Quick)]
    pub level: verify::Level,
    /// Coefficient file to check in addition to the built-in suite.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io {
        path: "<stdout>".into(),
        message: e.to_string(),
    }
}

fn csv_row(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(format_number).collect::<Vec<_>>().join(",")
}

fn write_to(path: Option<&Path>, out: &mut dyn Write, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        }),
        None => out.write_all(text.as_bytes()).map_err(io_err),
    }
}

fn decompose(args: &DecomposeArgs, out: &mut dyn Write) -> Result<()> {
    let l = args.band_limit;
    let expansion = match (&args.source.input, &args.source.field) {
        (Some(path), _) => {
            let table = files::read_samples(path)?;
            let grid = table.grid(2 * (l + 1))?;
            analyze_field(&grid, &table.samples(path)?, l)?
        }
        (None, Some(f)) => {
            let grid = SphereGrid::new(l + 1);
            analyze_field(&grid, &FieldSamples::from_fn(&grid, |e| f.sample(e)), l)?
        }
        (None, None) => return Err(Error::Usage("one of --input or --field is required".into())),
    };
    files::write_coefficients(&args.output, &Coefficients::Vector(expansion.clone()))?;
    for f in VshFamily::ALL {
        writeln!(out, "energy {f} {}", format_number(expansion.family_energy(f))).map_err(io_err)?;
    }
    writeln!(out, "energy total {}", format_number(expansion.energy())).map_err(io_err)
}

fn solve(args: &SolveArgs, out: &mut dyn Write) -> Result<()> {
    let params = args.material.params()?;
    let boundary = files::read_coefficients(&args.input)?.into_vector(&args.input)?;
    let mut points = args.point.clone();
    if let Some(p) = &args.points {
        points.extend(files::read_points(p)?);
    }
    if points.is_empty() {
        return Err(Error::Usage("no evaluation points (use --point or --points)".into()));
    }
    let sol = solve_dirichlet(&boundary, &params);
    let mut text = String::from("# x1,x2,x3,u1,u2,u3\n");
    for x in &points {
        let u = sol.eval(x)?;
        text.push_str(&csv_row(x.iter().chain(u.iter()).copied()));
        text.push('\n');
    }
    write_to(args.output.as_deref(), out, &text)
}

fn eval(args: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let expansion = args.source.expansion()?;
    let grid = match (&args.grid, args.band_limit) {
        (Some(path), _) => files::read_samples(path)?.grid(0)?,
        (None, Some(l)) => SphereGrid::new(l),
        (None, None) => SphereGrid::new(expansion.band_limit() + 1),
    };
    let r = args.radius;
    let samples = if r == 1.0 {
        match &args.source.field {
            Some(f) if args.source.input.is_none() => FieldSamples::from_fn(&grid, |e| f.sample(e)),
            _ => FieldSamples::from_fn(&grid, |e| synthesize(&expansion, e)),
        }
    } else {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::OutsideBall { norm: r, limit: 1.0 });
        }
        let (Some(lambda), Some(mu)) = (args.lambda, args.mu) else {
            return Err(Error::Usage("--lambda and --mu are required when --radius < 1".into()));
        };
        let sol = solve_dirichlet(&expansion, &LameParameters::new(lambda, mu)?);
        FieldSamples::from_fn(&grid, |e| sol.displacement(&(e.as_vec() * r)))
    };
    let table = SampleTable::from_grid(&grid, Some(&samples));
    match &args.output {
        Some(p) => {
            let f = std::fs::File::create(p).map_err(|e| Error::Io {
                path: p.display().to_string(),
                message: e.to_string(),
            })?;
            files::write_samples(f, &table)
        }
        None => files::write_samples(out, &table),
    }
}

fn kernel(args: &KernelArgs, out: &mut dyn Write) -> Result<()> {
    let params = args.material.params()?;
    let x = InteriorPoint::new(args.point)?;
    let eta = UnitVector::normalize(args.eta)?;
    let k = elastic_kernel(&x, &eta, &params)?;
    let p = harmonic_poisson_kernel(&x, &eta);
    for i in 0..3 {
        writeln!(out, "{}", csv_row(k.row(i).iter().copied())).map_err(io_err)?;
    }
    writeln!(out, "# trace,3P").map_err(io_err)?;
    writeln!(out, "{}", csv_row([k.trace(), 3.0 * p])).map_err(io_err)
}

fn hardy(args: &HardyArgs, out: &mut dyn Write) -> Result<()> {
    let params = args.material.params()?;
    let sol = solve_dirichlet(&args.source.expansion()?, &params);
    let radii = args.radii.clone().unwrap_or_else(default_radii);
    let profile = radial_profile(&sol, args.p, &radii, &grid_for(&sol))?;
    writeln!(out, "# r,norm").map_err(io_err)?;
    for (r, v) in profile.iter() {
        writeln!(out, "{}", csv_row([r, v])).map_err(io_err)?;
    }
    writeln!(out, "# max").map_err(io_err)?;
    writeln!(out, "{}", format_number(profile.max())).map_err(io_err)
}

fn verify_cmd(args: &VerifyArgs, out: &mut dyn Write) -> Result<bool> {
    let checks = verify::run_checks(args.level, args.input.as_deref());
    for c in &checks {
        writeln!(out, "{}", c.line()).map_err(io_err)?;
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    writeln!(out, "{} checks, {failed} failed", checks.len()).map_err(io_err)?;
    Ok(failed == 0)
}

/// Runs a parsed command. `Ok(false)` means the command ran but reported failures.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    match &cli.command {
        Command::Decompose(a) => decompose(a, out).map(|_| true),
        Command::Solve(a) => solve(a, out).map(|_| true),
        Command::Eval(a) => eval(a, out).map(|_| true),
        Command::Kernel(a) => kernel(a, out).map(|_| true),
        Command::Hardy(a) => hardy(a, out).map(|_| true),
        Command::Verify(a) => verify_cmd(a, out),
    }
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match execute(&cli, &mut stdout.lock()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
