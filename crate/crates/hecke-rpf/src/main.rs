use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hecke_rpf::commands::{cmd_cycle, cmd_group, cmd_verify, Which};
use hecke_rpf::input::{parse_form, CoeffInput, SpecFile, TermFile};
use hecke_rpf::{CliError, Format, Outcome, Report, RunConfig, PRECISION_ENV};

/// Hecke groups, rational period functions and Dirichlet-series remainder terms.
#[derive(Parser)]
#[command(name = "hecke-rpf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Base tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tolerance: f64,
    /// Working precision in bits (53..=64: binary64, above: double-double).
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = 64)]
    precision: u32,
    /// Seed for every random grid.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of half-plane samples for the RPF relations.
    #[arg(long, global = true, default_value_t = 100)]
    samples: usize,
    /// Number of strip points for the Mellin-side checks.
    #[arg(long, global = true, default_value_t = 10)]
    strip_points: usize,
    /// Orbit-search depth (default 4p).
    #[arg(long, global = true)]
    max_depth: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Check T² = (ST)^p = I and the interval decomposition of the real line.
    Group {
        #[arg(long)]
        p: u32,
    },
    /// Enumerate the simple numbers of a form class and certify the cycle.
    Cycle {
        #[arg(long)]
        p: u32,
        /// Seed form `[A,B,C]`; entries may be `Z[λ]` coordinate lists.
        #[arg(long)]
        form: String,
    },
    /// Run verification suites for an RPF given by a spec file or by --p/--k/--form.
    Verify {
        /// Spec file (JSON).
        spec_file: Option<PathBuf>,
        #[arg(long, conflicts_with = "spec_file")]
        spec: Option<PathBuf>,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        form: Option<String>,
        /// Fourier coefficients for the functional-equation check (JSON).
        #[arg(long)]
        coeffs: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Which::All)]
        which: Which,
    },
}

fn config(c: &Common) -> RunConfig {
    RunConfig {
        precision_bits: c.precision,
        tolerance: c.tolerance,
        sample_count: c.samples,
        strip_points: c.strip_points,
        rng_seed: c.seed,
        output: c.format,
        max_depth: c.max_depth,
    }
}

fn spec_file(
    path: Option<PathBuf>,
    p: Option<u32>,
    k: Option<u32>,
    form: Option<String>,
) -> Result<SpecFile, CliError> {
    match path {
        Some(path) => {
            let mut file = SpecFile::read(&path)?;
            if let Some(k) = k {
                file.k = k;
            }
            if p.is_some_and(|p| p != file.p) {
                return Err(CliError::Input("--p disagrees with the spec file".into()));
            }
            Ok(file)
        }
        None => {
            let (Some(p), Some(form)) = (p, form) else {
                return Err(CliError::Input(
                    "verify needs a spec file or --p and --form".into(),
                ));
            };
            Ok(SpecFile {
                p,
                k: k.unwrap_or(1),
                c0: 0.0,
                nu: 0.0,
                eta: 0.0,
                terms: vec![TermFile {
                    seed_form: parse_form(&form)?,
                    d: 1.0,
                }],
                max_depth: None,
            })
        }
    }
}

fn run(cli: Cli) -> Result<Report, CliError> {
    let cfg = config(&cli.common);
    cfg.validate()?;
    match cli.command {
        Command::Group { p } => cmd_group(p, &cfg),
        Command::Cycle { p, form } => cmd_cycle(p, &parse_form(&form)?, &cfg),
        Command::Verify {
            spec_file: positional,
            spec,
            p,
            k,
            form,
            coeffs,
            which,
        } => {
            let file = spec_file(positional.or(spec), p, k, form)?;
            let rpf = file.build(cfg.max_depth)?;
            let lambda = rpf.ring().lambda_f64();
            let coeffs = coeffs.map(|c| CoeffInput::read(&c, lambda)).transpose()?;
            let report = cmd_verify(&rpf, coeffs.as_ref(), which, &cfg)?;
            if matches!(which, Which::R2 | Which::All) {
                let trace = report
                    .checks
                    .iter()
                    .find(|c| c.name == "r2")
                    .and_then(|c| c.details["trace"].as_array());
                for line in trace.into_iter().flatten() {
                    eprintln!("{}", line.as_str().unwrap_or_default());
                }
            }
            Ok(report)
        }
    }
}

fn emit(report: &Report, common: &Common) -> Result<(), CliError> {
    match &common.out {
        Some(path) => {
            let mut f =
                File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            report.write(common.format, &mut f)
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            report.write(common.format, &mut lock)?;
            lock.flush().map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(Outcome::InputError as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let common = cli.common.clone();
    let outcome = match run(cli).and_then(|r| emit(&r, &common).map(|_| r)) {
        Ok(r) if r.pass => Outcome::Pass,
        Ok(_) => Outcome::Fail,
        Err(e) => {
            eprintln!("hecke-rpf: {e}");
            e.outcome()
        }
    };
    ExitCode::from(outcome as u8)
}
