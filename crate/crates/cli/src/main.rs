use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use growthbound::ge::PivotStrategy;
use growthbound::lp::Selector;
use growthbound_cli::checks::{constants_report, render_checks, selftest};
use growthbound_cli::demo::{appendix_a, ge_run};
use growthbound_cli::figure::{
    active_constraints, active_constraints_exact, active_csv, active_svg, growth_csv, growth_rows,
    growth_svg, ACTIVITY_TOLERANCE, DEFAULT_POINTS,
};
use growthbound_cli::report::{check_certificate, run_bound, BoundOptions, ProgramKind};
use growthbound_cli::{thread_cap, CliError, CliResult};

#[derive(Parser)]
#[command(name = "growthbound", version, about = "Growth factor bounds for Gaussian elimination with complete pivoting")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProgramArg {
    Wilkinson,
    Geomean,
    Improved,
}

impl From<ProgramArg> for ProgramKind {
    fn from(p: ProgramArg) -> Self {
        match p {
            ProgramArg::Wilkinson => ProgramKind::Wilkinson,
            ProgramArg::Geomean => ProgramKind::Geomean,
            ProgramArg::Improved => ProgramKind::Improved,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Pivoting {
    Complete,
    Partial,
    None,
}

#[derive(Args, Clone)]
struct SelectorArgs {
    /// full, wilkinson-only, band, diagonal, band+diagonal or theorem1.
    #[arg(long, default_value = "band")]
    selector: String,
    #[arg(long, default_value_t = 4)]
    band_width: usize,
}

impl SelectorArgs {
    fn selector(&self) -> CliResult<Selector> {
        Ok(Selector::parse(&self.selector, self.band_width)?)
    }
}

#[derive(Args, Clone)]
struct LpArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "improved")]
    program: ProgramArg,
    #[command(flatten)]
    selector: SelectorArgs,
    /// Right-hand sides are rounded up to multiples of 2^-bits.
    #[arg(long, default_value_t = 60)]
    precision_bits: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one program and report the bound on ln g(n).
    Bound {
        #[command(flatten)]
        lp: LpArgs,
        /// Certify the bound with exact rational multipliers.
        #[arg(long)]
        certify: bool,
        /// Report file (JSON).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Certificate file, written with --certify.
        #[arg(long)]
        certificate: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Produce a certificate, or re-verify one with --check.
    Certify {
        #[command(flatten)]
        lp: Option<LpArgs>,
        /// Certificate file to re-verify from scratch.
        #[arg(long, conflicts_with = "n")]
        check: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Gaussian elimination on a matrix file.
    Ge {
        #[command(subcommand)]
        command: GeCommand,
    },
    /// Figure data.
    Figure {
        #[command(subcommand)]
        command: FigureCommand,
    },
    /// Demonstrations.
    Demo {
        #[command(subcommand)]
        command: DemoCommand,
    },
    /// Constants of the asymptotic argument and their numerical checks.
    Constants {
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quick end-to-end checks.
    Selftest {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum GeCommand {
    Run {
        #[arg(long)]
        matrix_file: PathBuf,
        #[arg(long, value_enum, default_value = "complete")]
        pivoting: Pivoting,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum FigureCommand {
    /// Wilkinson, improved and Theorem 1 curves over a geometric n grid.
    GrowthBounds {
        #[arg(long, default_value_t = 1000)]
        nmax: usize,
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
        #[command(flatten)]
        selector: SelectorArgs,
        #[arg(long)]
        certify: bool,
        #[arg(long, default_value_t = 60)]
        precision_bits: u32,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Active (k, l) rows at the optimum of one instance.
    ActiveConstraints {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "band+diagonal")]
        selector: String,
        #[arg(long, default_value_t = 4)]
        band_width: usize,
        /// Exact simplex and exact slack comparisons.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = ACTIVITY_TOLERANCE)]
        tolerance: f64,
        #[arg(long, default_value_t = 60)]
        precision_bits: u32,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DemoCommand {
    /// Partial versus complete pivoting on Wilkinson's matrix.
    AppendixA {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn emit(out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn only(format: Format, allowed: &[Format], what: &str) -> CliResult<()> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("unsupported --format for {what}")))
    }
}

fn verification(passed: bool, what: &str) -> CliResult<()> {
    if passed {
        Ok(())
    } else {
        Err(CliError::Verification(what.to_string()))
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Bound {
            lp,
            certify,
            out,
            certificate,
            format,
        } => {
            only(format, &[Format::Text, Format::Json], "bound")?;
            let opts = BoundOptions {
                n: lp.n,
                program: lp.program.into(),
                selector: lp.selector.selector()?,
                certify,
                precision_bits: lp.precision_bits,
            };
            let (report, cert) = run_bound(&opts)?;
            if let Some(path) = &out {
                std::fs::write(path, report.to_json())?;
            }
            match format {
                Format::Json => print!("{}", report.to_json()),
                _ => print!("{}", report.to_text()),
            }
            eprintln!(
                "timings: build {:.1} ms, solve {:.1} ms, certify {:.1} ms",
                report.timings.build_ms, report.timings.solve_ms, report.timings.certify_ms
            );
            if let Some(cert) = cert {
                let path = certificate.unwrap_or_else(|| {
                    PathBuf::from(format!(
                        "certificate-{}-n{}.json",
                        opts.program.as_str(),
                        opts.n
                    ))
                });
                std::fs::write(&path, cert.to_json())?;
                eprintln!("certificate written to {}", path.display());
                verification(cert.verified, "the certificate did not verify")?;
            }
            Ok(())
        }
        Command::Certify {
            lp,
            check,
            out,
            format,
        } => {
            only(format, &[Format::Text, Format::Json], "certify")?;
            if let Some(path) = check {
                let text = std::fs::read_to_string(&path)?;
                let rep = check_certificate(&text)?;
                match format {
                    Format::Json => emit(out.as_ref(), &json(&rep))?,
                    _ => emit(
                        out.as_ref(),
                        &format!(
                            "[{}] {}: n = {}, {} multipliers, bound {:.12}: {}\n",
                            if rep.passed { "PASS" } else { "FAIL" },
                            path.display(),
                            rep.n,
                            rep.multipliers,
                            rep.bound_f64,
                            rep.message
                        ),
                    )?,
                }
                return verification(rep.passed, &rep.message);
            }
            let Some(lp) = lp else {
                return Err(CliError::Usage("certify needs --n or --check".into()));
            };
            let opts = BoundOptions {
                n: lp.n,
                program: lp.program.into(),
                selector: lp.selector.selector()?,
                certify: true,
                precision_bits: lp.precision_bits,
            };
            let (report, cert) = run_bound(&opts)?;
            let cert = cert.expect("certification requested");
            emit(out.as_ref(), &cert.to_json())?;
            if out.is_some() {
                print!("{}", report.to_text());
            }
            verification(cert.verified, "the certificate did not verify")
        }
        Command::Ge {
            command:
                GeCommand::Run {
                    matrix_file,
                    pivoting,
                    format,
                    out,
                },
        } => {
            only(format, &[Format::Text, Format::Json], "ge run")?;
            let text = std::fs::read_to_string(&matrix_file)?;
            let strategy = match pivoting {
                Pivoting::Complete => PivotStrategy::Complete,
                Pivoting::Partial => PivotStrategy::Partial,
                Pivoting::None => PivotStrategy::None,
            };
            let rep = ge_run(&text, strategy)?;
            match format {
                Format::Json => emit(out.as_ref(), &json(&rep)),
                _ => emit(out.as_ref(), &rep.to_text()),
            }
        }
        Command::Figure { command } => match command {
            FigureCommand::GrowthBounds {
                nmax,
                points,
                selector,
                certify,
                precision_bits,
                format,
                out,
            } => {
                only(format, &[Format::Csv, Format::Svg, Format::Json], "figure growth-bounds")?;
                let rows = growth_rows(nmax, points, selector.selector()?, certify, precision_bits)?;
                let text = match format {
                    Format::Svg => growth_svg(&rows),
                    Format::Json => json(&rows),
                    _ => growth_csv(&rows),
                };
                emit(out.as_ref(), &text)
            }
            FigureCommand::ActiveConstraints {
                n,
                selector,
                band_width,
                exact,
                tolerance,
                precision_bits,
                format,
                out,
            } => {
                only(format, &[Format::Csv, Format::Svg, Format::Json], "figure active-constraints")?;
                let sel = Selector::parse(&selector, band_width)?;
                let rec = if exact {
                    active_constraints_exact(n, sel, precision_bits)?
                } else {
                    active_constraints(n, sel, precision_bits, tolerance)?
                };
                let text = match format {
                    Format::Svg => active_svg(&rec),
                    Format::Json => json(&rec),
                    _ => active_csv(&rec),
                };
                emit(out.as_ref(), &text)
            }
        },
        Command::Demo {
            command: DemoCommand::AppendixA { n, format },
        } => {
            only(format, &[Format::Text, Format::Json], "demo appendix-a")?;
            let rep = appendix_a(n, cli.seed)?;
            match format {
                Format::Json => print!("{}", json(&rep)),
                _ => print!("{}", rep.to_text()),
            }
            Ok(())
        }
        Command::Constants { json: as_json, out } => {
            let rep = constants_report()?;
            if as_json {
                emit(out.as_ref(), &json(&rep))?;
            } else {
                emit(out.as_ref(), &rep.to_text())?;
            }
            verification(rep.passed(), "a constants check failed")
        }
        Command::Selftest { format } => {
            only(format, &[Format::Text, Format::Json], "selftest")?;
            let checks = selftest()?;
            match format {
                Format::Json => print!("{}", json(&checks)),
                _ => print!("{}", render_checks(&checks)),
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            verification(failed == 0, &format!("{failed} self-test checks failed"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = thread_cap() {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("growthbound: {e}");
            ExitCode::from(e.status() as u8)
        }
    }
}
