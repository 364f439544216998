use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use toepstab::{
    bareiss_solve, cholesky_dense, decomposition_error, displacement_generators, factor_scaled,
    factor_with, levinson_solve, scaled_residual, solution_error, solve_with_factor,
    toeplitz_generators, Algorithm, FactorSource, Instance, Method, ReflectionPattern,
    ReflectionSpec, RhsMode, ScaledDowndating, ScaledGeneratorPair,
};

mod bench;
mod error;
mod io;

use error::{CliError, CliResult, EXIT_USAGE};
use io::{Header, Kind, RawFile};

/// Cholesky factorization of SPD Toeplitz and displacement-rank-2 matrices,
/// and stability experiments against Levinson and dense Cholesky.
///
/// Exit codes: 0 success, 2 usage, 3 breakdown or not positive definite, 4 IO.
#[derive(Debug, Parser)]
#[command(name = "toepstab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the first column of a test matrix.
    Generate {
        /// Output file; stdout when absent.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
        #[command(subcommand)]
        instance: InstanceCmd,
    },
    /// Factor T = UᵀU and report the decomposition error.
    Factor(FactorArgs),
    /// Solve T x = b.
    Solve(SolveArgs),
    /// Run a battery of algorithms over one or more instances.
    Bench(BenchArgs),
}

#[derive(Debug, Subcommand)]
enum InstanceCmd {
    /// Prolate matrix: t0 = 2ω, t_k = sin(2πωk)/(πk).
    Prolate {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        omega: f64,
    },
    /// Matrix built from reflection coefficients, by pattern or from a file.
    Refl {
        #[arg(long, default_value_t = 1.0)]
        t0: f64,
        #[arg(long, requires = "magnitude")]
        pattern: Option<ReflectionPattern>,
        #[arg(long, requires = "pattern")]
        magnitude: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        /// Vector file of coefficients ρ_1 … ρ_{n−1}.
        #[arg(long, conflicts_with_all = ["pattern", "magnitude", "n"])]
        rhos: Option<PathBuf>,
    },
    /// Seeded random SPD Toeplitz matrix with |ρ_k| ≤ rho-max.
    Random {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0.9)]
        rho_max: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// A Toeplitz matrix file written by `generate`.
    File { path: PathBuf },
}

impl InstanceCmd {
    fn seed(&self) -> Option<u64> {
        match self {
            InstanceCmd::Random { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    /// The instance at order `n_override` when given, else at its own `--n`.
    fn resolve(&self, n_override: Option<usize>) -> CliResult<Instance> {
        let need_n = |n: &Option<usize>| {
            n_override
                .or(*n)
                .ok_or_else(|| CliError::Usage("--n is required".into()))
        };
        let no_sweep = |what: &str| match n_override {
            Some(_) => Err(CliError::Usage(format!("--sweep does not apply to {what}"))),
            None => Ok(()),
        };
        match self {
            InstanceCmd::Prolate { n, omega } => Ok(Instance::Prolate {
                n: need_n(n)?,
                omega: *omega,
            }),
            InstanceCmd::Random { n, rho_max, seed } => Ok(Instance::Random {
                n: need_n(n)?,
                rho_max: *rho_max,
                seed: *seed,
            }),
            InstanceCmd::Refl {
                t0,
                pattern,
                magnitude,
                n,
                rhos,
            } => {
                let spec = match (rhos, pattern, magnitude) {
                    (Some(path), _, _) => {
                        no_sweep("a coefficient file")?;
                        ReflectionSpec::new(*t0, RawFile::read(path)?.into_vector()?)?
                    }
                    (None, Some(p), Some(m)) => {
                        ReflectionSpec::from_pattern(*t0, *p, *m, need_n(n)?)?
                    }
                    _ => {
                        return Err(CliError::Usage(
                            "refl needs --pattern and --magnitude, or --rhos".into(),
                        ))
                    }
                };
                Ok(Instance::Reflection(spec))
            }
            InstanceCmd::File { path } => {
                no_sweep("a matrix file")?;
                Ok(Instance::Explicit {
                    name: path.display().to_string(),
                    matrix: RawFile::read(path)?.into_toeplitz()?,
                })
            }
        }
    }
}

#[derive(Debug, Args)]
struct FactorArgs {
    /// Toeplitz first-column file, or a dense matrix file with --dense.
    input: PathBuf,
    #[arg(long, default_value = "mixed")]
    method: Method,
    /// Read a full symmetric matrix and derive its generators.
    #[arg(long)]
    dense: bool,
    /// Factor file; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RhsKind {
    /// x = (1, −1, 1, …)/√n and b = T x.
    Unit,
    /// Seeded random unit x and b = T x.
    Random,
    /// Seeded random unit b, no reference solution.
    Scaled,
}

#[derive(Debug, Args)]
struct RhsArgs {
    #[arg(long = "rhs-mode", value_enum, default_value_t = RhsKind::Unit)]
    kind: RhsKind,
    #[arg(long = "rhs-seed", default_value_t = 0)]
    seed: u64,
}

impl RhsArgs {
    fn mode(&self) -> RhsMode {
        match self.kind {
            RhsKind::Unit => RhsMode::UnitSolution,
            RhsKind::Random => RhsMode::Random { seed: self.seed },
            RhsKind::Scaled => RhsMode::Scaled { seed: self.seed },
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Toeplitz first-column file.
    input: PathBuf,
    #[arg(long, default_value = "levinson")]
    algorithm: Algorithm,
    /// Vector file holding b; overrides --rhs-mode.
    #[arg(long)]
    rhs: Option<PathBuf>,
    #[command(flatten)]
    rhs_mode: RhsArgs,
    /// Solution file; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated algorithms, or `all`.
    #[arg(
        long,
        global = true,
        default_value = "cholesky,bareiss-hyp,bareiss-mixed,levinson"
    )]
    algorithms: String,
    /// Orders start:end:step, overriding the instance's --n.
    #[arg(long, global = true)]
    sweep: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = bench::Format::Csv)]
    format: bench::Format,
    #[arg(long = "rhs-mode", global = true, value_enum, default_value_t = RhsKind::Unit)]
    rhs_kind: RhsKind,
    #[arg(long = "rhs-seed", global = true, default_value_t = 0)]
    rhs_seed: u64,
    /// Report file; stdout when absent.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    instance: InstanceCmd,
}

/// Summary lines go to stdout unless stdout carries the data.
fn report(data_to_stdout: bool, line: &str) {
    if data_to_stdout {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

fn cmd_generate(instance: &InstanceCmd, output: Option<&Path>) -> CliResult<()> {
    if let InstanceCmd::File { .. } = instance {
        return Err(CliError::Usage(
            "generate needs a generator, not a file".into(),
        ));
    }
    let inst = instance.resolve(None)?;
    let t = inst.resolve()?;
    let header = Header::new(Kind::Toeplitz, inst.descriptor(), instance.seed());
    io::emit(output, &io::render_column(&header, t.first_column()))
}

fn cmd_factor(args: &FactorArgs) -> CliResult<()> {
    let raw = RawFile::read(&args.input)?;
    let dense_input = args.dense || raw.kind == Some(Kind::Dense);
    let (t, g) = if dense_input {
        let m = raw.into_dense()?;
        let g = displacement_generators(&m)?;
        (m, g)
    } else {
        let t = raw.into_toeplitz()?;
        let g = toeplitz_generators(&t)?;
        (t.to_dense(), g)
    };
    let name = args.input.display().to_string();
    let (text, f) = match args.method {
        Method::ScaledHyperbolic | Method::ScaledMixed => {
            let variant = match args.method {
                Method::ScaledHyperbolic => ScaledDowndating::Hyperbolic,
                _ => ScaledDowndating::Mixed,
            };
            let s = factor_scaled(&ScaledGeneratorPair::from_unscaled(&g), variant)?;
            let header = Header::new(Kind::ScaledUpper, name, None);
            let n = s.w.rows();
            let rows = (0..n).map(|i| s.w.row(i)).chain(std::iter::once(&s.d[..]));
            (io::render(&header, n, rows), s.to_unscaled())
        }
        m => {
            let f = factor_with(&g, m)?;
            let header = Header::new(Kind::Upper, name, None);
            (io::render_matrix(&header, &f.u), f)
        }
    };
    io::emit(args.output.as_deref(), &text)?;
    let to_stdout = args.output.is_none();
    report(to_stdout, &format!("method: {}", args.method));
    report(
        to_stdout,
        &format!("decomp_error: {:e}", decomposition_error(&t, &f.u)?),
    );
    if !f.warnings.is_empty() {
        eprintln!("warning: near breakdown at steps {:?}", f.warnings);
    }
    Ok(())
}

fn solve(t: &toepstab::ToeplitzSpd, b: &[f64], algorithm: Algorithm) -> CliResult<Vec<f64>> {
    let x = match algorithm {
        Algorithm::Levinson => levinson_solve(t, b)?.0,
        Algorithm::Cholesky => solve_with_factor(&cholesky_dense(&t.to_dense())?, b)?,
        Algorithm::BareissFull => bareiss_solve(t, b, FactorSource::Bareiss)?,
        other => {
            let m = other.method().expect("generator-form algorithm");
            bareiss_solve(t, b, FactorSource::Generator(m))?
        }
    };
    Ok(x)
}

fn cmd_solve(args: &SolveArgs) -> CliResult<()> {
    let t = RawFile::read(&args.input)?.into_toeplitz()?;
    let (b, x_true) = match &args.rhs {
        Some(path) => (RawFile::read(path)?.into_vector()?, None),
        None => args.rhs_mode.mode().build(&t)?,
    };
    if b.len() != t.n() {
        return Err(CliError::Usage(format!(
            "right-hand side has {} entries, matrix has order {}",
            b.len(),
            t.n()
        )));
    }
    let x = solve(&t, &b, args.algorithm)?;
    let header = Header::new(Kind::Vector, args.input.display().to_string(), None);
    io::emit(args.output.as_deref(), &io::render_column(&header, &x))?;
    let to_stdout = args.output.is_none();
    report(to_stdout, &format!("algorithm: {}", args.algorithm));
    report(
        to_stdout,
        &format!("scaled_residual: {:e}", scaled_residual(&t, &x, &b)?),
    );
    if let Some(xt) = x_true {
        report(
            to_stdout,
            &format!("soln_error: {:e}", solution_error(&x, &xt)?),
        );
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> CliResult<()> {
    let algorithms = bench::parse_algorithms(&args.algorithms)?;
    let instances = match &args.sweep {
        Some(s) => bench::parse_sweep(s)?
            .into_iter()
            .map(|n| args.instance.resolve(Some(n)))
            .collect::<CliResult<Vec<_>>>()?,
        None => vec![args.instance.resolve(None)?],
    };
    let rhs = RhsArgs {
        kind: args.rhs_kind,
        seed: args.rhs_seed,
    }
    .mode();
    let config = bench::ExperimentConfig::new(instances, algorithms, rhs)?;
    let rows = bench::run(&config)?;
    bench::write(
        &rows,
        args.format,
        args.instance.seed(),
        rhs,
        args.output.as_deref(),
    )
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Generate { output, instance } => cmd_generate(instance, output.as_deref()),
        Command::Factor(a) => cmd_factor(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
