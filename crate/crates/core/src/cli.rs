//! Command-line front end.
//!
//! Results go to the output writer as newline-delimited decimal. Anything
//! else (bench summaries, diagnostics) goes to the diagnostic writer, whose
//! last line on failure names the error class.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::bench::{self, Backend, BenchError, BenchReport, BignumOp};
use crate::bignum::{BignumError, Natural};
use crate::sequences::{self, IntBackend, SequenceError, SquareStream};

pub const BIN_NAME: &str = "oddsquares";

const DEFAULT_KERNEL_SIZES: &[usize] = &[256, 512, 1024, 2048, 4096];

#[derive(Debug, Parser)]
#[command(
    name = BIN_NAME,
    version,
    about = "Squares of the first n naturals using only addition",
    arg_required_else_help = true
)]
struct Args {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Print 1^2, 2^2, ..., n^2, one per line.
    Squares {
        n: u64,
        #[arg(long, default_value = "machine")]
        backend: Backend,
    },
    /// Print 1^2 + 2^2 + ... + n^2.
    SumSquares {
        n: u64,
        #[arg(long, default_value = "machine")]
        backend: Backend,
    },
    /// Given n^2 and n, print (n+1)^2.
    NextSquare {
        square: String,
        n: u64,
        #[arg(long, default_value = "machine")]
        backend: Backend,
    },
    /// Time the schoolbook kernels over operand sizes (in limbs) and fit
    /// their growth exponents.
    BenchOps {
        /// Comma-separated, strictly increasing limb counts.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',', default_value = "add,sub,mul,divmod")]
        ops: Vec<BignumOp>,
        #[arg(long, default_value_t = 9)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Samples CSV destination (standard output when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Slopes CSV destination.
        #[arg(long)]
        slopes_out: Option<PathBuf>,
    },
    /// Compare the additive square table with the k*k baseline.
    BenchCompare {
        /// Comma-separated, strictly increasing sequence lengths.
        #[arg(long, value_delimiter = ',', default_value = "1000")]
        sizes: Vec<u64>,
        #[arg(long, default_value = "machine")]
        backend: Backend,
        #[arg(long, default_value_t = 9)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A validated command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Squares {
        n: u64,
        backend: Backend,
    },
    SumSquares {
        n: u64,
        backend: Backend,
    },
    NextSquare {
        square: Natural,
        n: u64,
        backend: Backend,
    },
    BenchOps {
        ops: Vec<BignumOp>,
        sizes: Vec<usize>,
        trials: usize,
        seed: u64,
        out: Option<PathBuf>,
        slopes_out: Option<PathBuf>,
    },
    BenchCompare {
        sizes: Vec<u64>,
        backend: Backend,
        trials: usize,
        seed: u64,
        out: Option<PathBuf>,
    },
}

/// A rejected command line, or a request for help/version text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError {
    /// The argument that was rejected, when one can be singled out.
    pub token: Option<String>,
    /// Human-readable text, including the usage synopsis.
    pub rendered: String,
    /// True for `--help`/`--version`, which are not failures.
    pub informational: bool,
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.rendered.trim_end())
    }
}

impl std::error::Error for UsageError {}

impl UsageError {
    fn invalid(token: &str, message: &str) -> Self {
        let usage = <Args as clap::CommandFactory>::command().render_usage();
        UsageError {
            token: Some(token.to_string()),
            rendered: format!("error: {message}\n\n{usage}\n"),
            informational: false,
        }
    }

    fn from_clap(err: clap::Error) -> Self {
        let informational = matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
        let token = [
            ContextKind::InvalidArg,
            ContextKind::InvalidSubcommand,
            ContextKind::InvalidValue,
        ]
        .into_iter()
        .find_map(|kind| match err.get(kind) {
            Some(ContextValue::String(s)) => Some(s.clone()),
            Some(ContextValue::Strings(v)) => Some(v.join(" ")),
            _ => None,
        });
        UsageError {
            token,
            rendered: err.render().to_string(),
            informational,
        }
    }
}

/// Parses the arguments that follow the program name.
pub fn parse_args<I, S>(argv: I) -> Result<Command, UsageError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv = std::iter::once(BIN_NAME.to_string()).chain(argv.into_iter().map(Into::into));
    let args = Args::try_parse_from(argv).map_err(UsageError::from_clap)?;
    Ok(match args.command {
        Sub::Squares { n, backend } => Command::Squares { n, backend },
        Sub::SumSquares { n, backend } => Command::SumSquares { n, backend },
        Sub::NextSquare { square, n, backend } => {
            let square: Natural = square
                .parse()
                .map_err(|e| UsageError::invalid(&square, &format!("invalid square {square:?}: {e}")))?;
            Command::NextSquare { square, n, backend }
        }
        Sub::BenchOps {
            sizes,
            ops,
            trials,
            seed,
            out,
            slopes_out,
        } => {
            let sizes = sizes.unwrap_or_else(|| DEFAULT_KERNEL_SIZES.to_vec());
            check_sizes(&sizes)?;
            check_trials(trials)?;
            Command::BenchOps {
                ops,
                sizes,
                trials,
                seed,
                out,
                slopes_out,
            }
        }
        Sub::BenchCompare {
            sizes,
            backend,
            trials,
            seed,
            out,
        } => {
            check_sizes(&sizes)?;
            check_trials(trials)?;
            Command::BenchCompare {
                sizes,
                backend,
                trials,
                seed,
                out,
            }
        }
    })
}

fn check_sizes<T: PartialOrd + Default + fmt::Display>(sizes: &[T]) -> Result<(), UsageError> {
    let joined = sizes.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
    if sizes.is_empty() {
        return Err(UsageError::invalid("--sizes", "--sizes needs at least one value"));
    }
    if sizes.iter().any(|s| *s <= T::default()) {
        return Err(UsageError::invalid(&joined, "sizes must be positive"));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(UsageError::invalid(&joined, "sizes must be strictly increasing"));
    }
    Ok(())
}

fn check_trials(trials: usize) -> Result<(), UsageError> {
    if trials < bench::MIN_TRIALS {
        return Err(UsageError::invalid(
            &trials.to_string(),
            &format!("--trials must be at least {}", bench::MIN_TRIALS),
        ));
    }
    Ok(())
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("square of {index} does not fit in 64 bits; rerun with --backend bignum")]
    Overflow { index: u64 },
    #[error(transparent)]
    Bignum(#[from] BignumError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl From<SequenceError> for CliError {
    fn from(e: SequenceError) -> Self {
        match e {
            SequenceError::Overflow { index } => CliError::Overflow { index },
        }
    }
}

impl CliError {
    /// Short name of the error class, used in the final diagnostic line.
    pub fn class(&self) -> &'static str {
        match self {
            CliError::Overflow { .. } => "overflow",
            CliError::Bignum(BignumError::Underflow) => "underflow",
            CliError::Bignum(BignumError::DivisionByZero) => "division-by-zero",
            CliError::Bignum(BignumError::Parse(_)) => "parse",
            CliError::Bench(BenchError::Io(_)) | CliError::Io(_) => "io",
            CliError::Bench(_) => "bench",
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Runs a parsed command, returning the process exit status.
pub fn run(cmd: &Command, out: &mut impl Write, diag: &mut impl Write) -> i32 {
    let mut out = BufWriter::new(out);
    let result = execute(cmd, &mut out, diag).and_then(|()| out.flush().map_err(CliError::from));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = out.flush();
            let _ = writeln!(diag, "{BIN_NAME}: {} error: {e}", e.class());
            EXIT_FAILURE
        }
    }
}

/// Parses and runs, reporting usage problems on `diag`.
pub fn main_with_args<I, S>(argv: I, out: &mut impl Write, diag: &mut impl Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    match parse_args(argv) {
        Ok(cmd) => run(&cmd, out, diag),
        Err(e) if e.informational => {
            let _ = write!(out, "{}", e.rendered);
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(diag, "{e}");
            let token = e.token.as_deref().unwrap_or("");
            let _ = writeln!(diag, "{BIN_NAME}: usage error: {token}");
            EXIT_USAGE
        }
    }
}

fn execute(cmd: &Command, out: &mut impl Write, diag: &mut impl Write) -> Result<(), CliError> {
    match cmd {
        Command::Squares { n, backend } => match backend {
            Backend::Machine => write_squares::<u64>(*n, out),
            Backend::Bignum => write_squares::<Natural>(*n, out),
        },
        Command::SumSquares { n, backend } => {
            match backend {
                Backend::Machine => writeln!(out, "{}", sequences::sum_of_squares_first_n::<u64>(*n)?)?,
                Backend::Bignum => writeln!(out, "{}", sequences::sum_of_squares_first_n::<Natural>(*n)?)?,
            }
            Ok(())
        }
        Command::NextSquare { square, n, backend } => {
            match backend {
                Backend::Machine => {
                    let square = square.to_u64().ok_or(CliError::Overflow { index: *n })?;
                    writeln!(out, "{}", sequences::next_square(&square, *n)?)?;
                }
                Backend::Bignum => writeln!(out, "{}", sequences::next_square(square, *n)?)?,
            }
            Ok(())
        }
        Command::BenchOps {
            ops,
            sizes,
            trials,
            seed,
            out: path,
            slopes_out,
        } => {
            let report = bench::run_kernel_benchmarks(ops, sizes, *trials, *seed)?;
            write_report_header(&report, diag)?;
            for f in &report.fits {
                writeln!(
                    diag,
                    "# {}: exponent {:.3}, r^2 {:.4}",
                    f.op, f.fit.exponent, f.fit.r_squared
                )?;
            }
            with_sink(path.as_ref(), out, |w| bench::emit_csv(&report, w))?;
            if let Some(p) = slopes_out {
                let mut f = BufWriter::new(File::create(p)?);
                bench::emit_slopes_csv(&report, &mut f)?;
                f.flush()?;
            }
            Ok(())
        }
        Command::BenchCompare {
            sizes,
            backend,
            trials,
            seed,
            out: path,
        } => {
            let mut report = BenchReport::new(*seed);
            for &n in sizes {
                let c = bench::compare_square_methods(n, *backend, *trials)?;
                match c.outcome.speedup() {
                    Some(s) => writeln!(diag, "# n={n}: multiplicative/additive time ratio {s:.2}")?,
                    None => writeln!(diag, "# n={n}: no verdict ({})", c.outcome.status())?,
                }
                report.comparisons.push(c);
            }
            write_report_header(&report, diag)?;
            with_sink(path.as_ref(), out, |w| bench::emit_comparison_csv(&report, w))?;
            Ok(())
        }
    }
}

fn write_squares<B: IntBackend + fmt::Display>(n: u64, out: &mut impl Write) -> Result<(), CliError> {
    for square in SquareStream::<B>::new().into_iter_squares().take(n as usize) {
        writeln!(out, "{}", square?)?;
    }
    Ok(())
}

fn write_report_header(report: &BenchReport, diag: &mut impl Write) -> io::Result<()> {
    writeln!(
        diag,
        "# seed {} at {} ({})",
        report.seed, report.timestamp, report.environment
    )
}

fn with_sink<W: Write>(
    path: Option<&PathBuf>,
    stdout: &mut W,
    emit: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p)?);
            emit(&mut f)?;
            f.flush()?;
        }
        None => emit(stdout)?,
    }
    Ok(())
}
