use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pwl_moments::basis::{AngularBasis, MomentVector};
use pwl_moments::geometry::{Direction, Geometry, SphericalTriangulation, Vec3};
use pwl_moments::harness::{convergence_study, emit_csv, timing_benchmark, write_csv, StudyConfig, StudyTable};
use pwl_moments::parallel::Execution;
use pwl_moments::realizability::{check, Atom, AtomicDensity, Verdict};
use pwl_moments::{Error, Result};

#[derive(Parser)]
#[command(name = "pwl-moments", version, about = "Piecewise-linear moment closures: convergence studies, timings and realizability checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence tables for prescribed densities.
    Study(StudyArgs),
    /// Median solve times.
    Bench(StudyArgs),
    /// Realizability verdicts for moment vectors read line by line.
    Check(CheckArgs),
    /// Writes a spherical triangulation.
    Mesh(MeshArgs),
}

#[derive(Args)]
struct StudyArgs {
    /// Comma-separated densities or `all`.
    #[arg(long)]
    density: Option<String>,
    /// Models such as `M,HFM[5,9,17],PMM` or `all`.
    #[arg(long)]
    models: Option<String>,
    /// mb, be or quadratic.
    #[arg(long)]
    entropy: Option<String>,
    /// File of key=value lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// A `.csv` file (single density) or a directory receiving `<density>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Gauss-Lobatto points per slab sub-interval.
    #[arg(long)]
    quad_points: Option<usize>,
    /// Degree of the triangle rule on the sphere.
    #[arg(long)]
    quad_degree: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest number of moments.
    #[arg(long)]
    nmax: Option<usize>,
    /// Compute rows on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// Angular dimension of `hat` and `pm` vectors.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    dim: u8,
    /// Input file; standard input if absent. Lines look like `hat 0.5 1 0.5`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Instead of reading input, test this many random atomic densities per family.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct MeshArgs {
    /// Number of dyadic refinements of the octahedron.
    #[arg(long, default_value_t = 0)]
    level: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn study_config(args: &StudyArgs) -> Result<StudyConfig> {
    let mut c = StudyConfig::default();
    if let Some(p) = &args.config {
        c.apply_file(p)?;
    }
    let flags = [
        ("density", args.density.clone()),
        ("models", args.models.clone()),
        ("entropy", args.entropy.clone()),
        ("out", args.out.as_ref().map(|p| p.display().to_string())),
        ("quad_points", args.quad_points.map(|v| v.to_string())),
        ("quad_degree", args.quad_degree.map(|v| v.to_string())),
        ("seed", args.seed.map(|v| v.to_string())),
        ("nmax", args.nmax.map(|v| v.to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            c.set(k, &v)?;
        }
    }
    if args.sequential {
        c.execution = Execution::Sequential;
    }
    Ok(c)
}

fn write_tables(tables: &[StudyTable], out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) if p.extension().is_some_and(|e| e == "csv") => {
            if tables.len() != 1 {
                return Err(Error::InvalidInput(format!(
                    "{} densities need a directory for --out, not {}",
                    tables.len(),
                    p.display()
                )));
            }
            emit_csv(&tables[0].rows, p)
        }
        Some(dir) => {
            for t in tables {
                emit_csv(&t.rows, &dir.join(format!("{}.csv", t.density)))?;
            }
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            for (i, t) in tables.iter().enumerate() {
                if tables.len() > 1 {
                    if i > 0 {
                        writeln!(lock).ok();
                    }
                    writeln!(lock, "# {}", t.density).ok();
                }
                write_csv(&t.rows, &mut lock).map_err(|e| Error::Parse(e.to_string()))?;
            }
            Ok(())
        }
    }
}

fn report(tables: &[StudyTable]) -> bool {
    let mut ok = true;
    for row in tables.iter().flat_map(|t| t.failures()) {
        ok = false;
        eprintln!("failed: {}", row.failure.as_deref().unwrap_or("unknown"));
    }
    ok
}

fn run_study(args: &StudyArgs, bench: bool) -> Result<bool> {
    let config = study_config(args)?;
    let tables = if bench {
        timing_benchmark(&config)?
    } else {
        convergence_study(&config)?
    };
    write_tables(&tables, config.out.as_deref())?;
    Ok(report(&tables))
}

fn parse_basis(family: &str, len: usize, dim: u8) -> Result<AngularBasis> {
    let bad = || Error::Parse(format!("{len} values do not fit a `{family}` basis in {dim}D"));
    let sphere_level = |f: &dyn Fn(usize) -> usize| (0..8).find(|&r| f(r) == len).ok_or_else(bad);
    match (family.to_ascii_lowercase().as_str(), dim) {
        ("monomial", 1) if len > 0 => Ok(AngularBasis::Monomial1D { order: len - 1 }),
        ("legendre", 1) if len > 0 => Ok(AngularBasis::Legendre1D { order: len - 1 }),
        ("hat", 1) if len >= 2 => AngularBasis::hat_equidistant(len - 1),
        ("pm", 1) if len >= 2 && len.is_multiple_of(2) => AngularBasis::partial_equidistant(len / 2),
        ("hat", 3) => Ok(AngularBasis::hat_sphere(sphere_level(&|r| 4usize.pow(r as u32 + 1) + 2)?)),
        ("pm", 3) => Ok(AngularBasis::partial_sphere(sphere_level(&|r| 2 * 4usize.pow(r as u32 + 2))?)),
        ("sh", _) => {
            let order = (0..64).find(|n| (n + 1) * (n + 1) == len).ok_or_else(bad)?;
            Ok(AngularBasis::SphericalHarmonics { order })
        }
        _ => Err(bad()),
    }
}

fn print_verdict(out: &mut impl Write, v: &Verdict) {
    let rank = v.rank.map(|r| r.to_string()).unwrap_or_else(|| "-".into());
    writeln!(out, "status={} rank={rank}", v.status).ok();
    if let Some(w) = &v.witness {
        for a in &w.atoms {
            writeln!(out, "  atom weight={:e} at {} cell {}", a.weight, a.location, a.cell).ok();
        }
    }
}

fn check_lines(args: &CheckArgs) -> Result<bool> {
    let reader: Box<dyn BufRead> = match &args.input {
        Some(p) => Box::new(std::io::BufReader::new(std::fs::File::open(p).map_err(|source| Error::Io {
            path: p.clone(),
            source,
        })?)),
        None => Box::new(std::io::stdin().lock()),
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut ok = true;
    for line in reader.lines() {
        let line = line.map_err(|source| Error::Io {
            path: args.input.clone().unwrap_or_else(|| PathBuf::from("<stdin>")),
            source,
        })?;
        let line = line.split('#').next().unwrap_or("").trim().to_string();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let family = tokens.next().unwrap_or_default();
        let verdict = tokens
            .map(|t| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{t}`"))))
            .collect::<Result<Vec<f64>>>()
            .and_then(|values| {
                let basis = parse_basis(family, values.len(), args.dim)?;
                check(&MomentVector::new(values, basis)?)
            });
        match verdict {
            Ok(v) => print_verdict(&mut out, &v),
            Err(e) => {
                ok = false;
                writeln!(out, "error: {e}").ok();
            }
        }
    }
    Ok(ok)
}

fn random_direction(rng: &mut ChaCha8Rng, geometry: Geometry) -> Direction {
    match geometry {
        Geometry::Slab => Direction::Slab(rng.random_range(-1.0..=1.0)),
        Geometry::Sphere => {
            let z: f64 = rng.random_range(-1.0..=1.0);
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let s = (1.0 - z * z).sqrt();
            Direction::Sphere(Vec3::new(s * phi.cos(), s * phi.sin(), z))
        }
    }
}

/// Every moment vector of a random atomic density must be accepted, and
/// any witness returned must reproduce it.
fn check_random(args: &CheckArgs, count: usize) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let families = [
        AngularBasis::Monomial1D { order: 4 },
        AngularBasis::Legendre1D { order: 5 },
        AngularBasis::hat_equidistant(5)?,
        AngularBasis::partial_equidistant(4)?,
        AngularBasis::hat_sphere(0),
        AngularBasis::partial_sphere(0),
    ];
    let mut ok = true;
    for basis in &families {
        let mut failures = 0;
        for _ in 0..count {
            let atoms = (0..rng.random_range(1..=6))
                .map(|_| {
                    let location = random_direction(&mut rng, basis.geometry());
                    Ok(Atom {
                        weight: rng.random_range(0.01..1.0),
                        cell: basis.locate(&location)?,
                        location,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let u = AtomicDensity { atoms }.moments(basis)?;
            let v = check(&MomentVector::new(u.clone(), basis.clone())?)?;
            let witness_ok = v.witness.as_ref().is_none_or(|w| w.reproduces(basis, &u));
            if !v.is_realizable(false) || !witness_ok {
                failures += 1;
            }
        }
        println!("{}: {}/{count} accepted with valid witness", basis.model_name(true), count - failures);
        ok &= failures == 0;
    }
    Ok(ok)
}

fn run_mesh(args: &MeshArgs) -> Result<bool> {
    let text = SphericalTriangulation::with_level(args.level).to_text();
    match &args.out {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io {
            path: p.clone(),
            source,
        })?,
        None => print!("{text}"),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Study(a) => run_study(a, false),
        Command::Bench(a) => run_study(a, true),
        Command::Check(a) => match a.random {
            Some(k) => check_random(a, k),
            None => check_lines(a),
        },
        Command::Mesh(a) => run_mesh(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
