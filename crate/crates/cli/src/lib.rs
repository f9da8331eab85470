//! `gcdmoment` command-line front end.
//!
//! Every subcommand renders a report as json (default), csv or text and maps
//! its outcome onto the exit code: 0 when all routes agree, 2 on a
//! disagreement, 1 on usage or resource errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gcdmoment_core::moments::Exponent;
use gcdmoment_core::Complex64;

pub mod bench;
pub mod commands;
pub mod fuzz;
pub mod report;

pub use report::Format;

/// Environment variable holding the worker count for parallel fuzzing.
pub const WORKERS_ENV: &str = "GCDMOMENT_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_DISAGREE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gcdmoment", version, about = "Moments of X(l) = gcd(l, n_1)...gcd(l, n_k) by independent routes")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Seed for every random choice (fuzz instances).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest sample space or group a brute-force route may enumerate.
    #[arg(long, global = true, default_value_t = gcdmoment_core::DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
    /// Agreement tolerance for floating-point routes.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Write the report here instead of standard output ("-" is stdout).
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Omit the generation timestamp so reports are byte-reproducible.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// E[X^w] by brute force, Euler product and census, with agreement verdict.
    Moment {
        /// Comma-separated moduli, e.g. 6,4.
        #[arg(short = 'n', long, value_parser = parse_moduli)]
        moduli: Moduli,
        /// Exponent: nonnegative integer or a+bi.
        #[arg(short = 'w', long, value_parser = parse_exponent, default_value = "1")]
        w: Exponent,
    },
    /// mu(A^w) = sum over a in A^w of 1/|a|, from the census and by enumeration.
    Mu {
        #[arg(short = 'n', long, value_parser = parse_moduli)]
        moduli: Moduli,
        /// Power w of the group.
        #[arg(short = 'w', long, default_value_t = 1)]
        multiplier: u32,
    },
    /// Built-in verification suite of golden values and exhaustive identities.
    Verify {
        /// Upper range for the exhaustive checks.
        #[arg(long, default_value_t = 1000)]
        range: u64,
    },
    /// Seeded random differential testing of all routes.
    Fuzz {
        #[arg(long, default_value_t = 500)]
        count: u64,
        /// Replace the Euler-product local factor by a broken one (harness sensitivity check).
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Igusa-type zeta at one point: series, Euler product and Hurwitz sum.
    Zeta {
        /// Free rank.
        #[arg(short = 'r', long, default_value_t = 0)]
        rank: u32,
        #[arg(short = 'n', long, value_parser = parse_moduli)]
        moduli: Moduli,
        /// Complex argument a+bi with Re(s) > r + 1.
        #[arg(short = 's', long, value_parser = parse_complex_arg)]
        s: Complex64,
        /// Dirichlet-series terms.
        #[arg(short = 'M', long, default_value_t = 1_000_000)]
        truncation: u64,
    },
    /// Residue of the Igusa-type zeta at s = r + 1 by Richardson extrapolation.
    Residue {
        #[arg(short = 'r', long, default_value_t = 0)]
        rank: u32,
        #[arg(short = 'n', long, value_parser = parse_moduli)]
        moduli: Moduli,
        /// Relative tolerance against the exact E[X].
        #[arg(long, default_value_t = 1e-5)]
        residue_tolerance: f64,
    },
    /// Wall time of each route over a ladder of lcm values.
    Bench {
        #[arg(short = 'w', long, default_value_t = 1)]
        w: u32,
        /// Skip ladder rungs above this lcm.
        #[arg(long, default_value_t = 1_000_000)]
        max_lcm: u64,
        /// Repetitions per measurement (the minimum is reported).
        #[arg(long, default_value_t = 3)]
        reps: u32,
    },
}

/// Comma-separated list of positive moduli.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Moduli(pub Vec<u64>);

pub fn parse_moduli(s: &str) -> Result<Moduli, String> {
    let out: Result<Vec<u64>, _> = s.split(',').map(|t| t.trim().parse::<u64>()).collect();
    match out {
        Ok(v) if !v.is_empty() && !v.contains(&0) => Ok(Moduli(v)),
        _ => Err(format!("expected a comma-separated list of positive integers, got {s:?}")),
    }
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    s.parse::<Exponent>().map_err(|e| e.to_string())
}

fn parse_complex_arg(s: &str) -> Result<Complex64, String> {
    gcdmoment_core::moments::parse_complex(s).ok_or_else(|| format!("expected a+bi with decimal a, b, got {s:?}"))
}

/// Report text plus the exit code it implies.
pub struct Outcome {
    pub rendered: String,
    pub code: i32,
}

/// Runs the CLI on `args` (including the program name), writing the report
/// to `stdout` (or `--output`) and diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match commands::dispatch(&cli) {
        Ok(outcome) => match write_report(&cli.global, &outcome.rendered, stdout) {
            Ok(()) => outcome.code,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e:#}");
                EXIT_ERROR
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn write_report(global: &GlobalOpts, text: &str, stdout: &mut dyn Write) -> anyhow::Result<()> {
    match &global.output {
        Some(path) if path.as_os_str() != "-" => {
            std::fs::write(path, text).map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display()))
        }
        _ => Ok(stdout.write_all(text.as_bytes())?),
    }
}
