use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use curtain::figures::{self, FigureId, FigureParams, Format};
use curtain::spectral::SpectralConfig;
use curtain::verify::{self, Context, Suite};

/// Positive-frequency wave packets: figure datasets and verification.
#[derive(Parser, Debug)]
#[command(name = "curtain", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit the dataset behind one figure.
    #[command(allow_negative_numbers = true)]
    Figure {
        /// Figure number, 1 to 5.
        #[arg(value_parser = ["1", "2", "3", "4", "5"])]
        id: String,
        /// Packet half-width (figure 5 defaults to both 0.5 and 0.01).
        #[arg(long)]
        b: Option<f64>,
        /// Source packet centre.
        #[arg(long)]
        x0: Option<f64>,
        /// Detector packet centre (figures 4 and 5).
        #[arg(long)]
        x1: Option<f64>,
        /// Snapshot time (figures 1-4).
        #[arg(long)]
        t: Option<f64>,
        /// End of the time axis (figure 5).
        #[arg(long)]
        t_max: Option<f64>,
        /// Time step (figure 5).
        #[arg(long)]
        dt: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the verification suite; exits with status 1 if any check fails.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        /// Comma-separated damping schedule for the quadrature oracles.
        #[arg(long, value_delimiter = ',')]
        eps_schedule: Option<Vec<f64>>,
        /// Tolerance override, NAME=VALUE; repeatable.
        #[arg(long = "tolerance", value_parser = parse_override)]
        tolerances: Vec<(String, f64)>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long)]
    grid_min: Option<f64>,
    #[arg(long)]
    grid_max: Option<f64>,
    #[arg(long)]
    grid_n: Option<usize>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Dsv)]
    format: FormatArg,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SuiteArg {
    Fast,
    Full,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Dsv,
    Structured,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Dsv => Format::Dsv,
            FormatArg::Structured => Format::Structured,
        }
    }
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got {s}"))?;
    let value: f64 = value.parse().map_err(|e| format!("bad tolerance {value}: {e}"))?;
    Ok((name.to_string(), value))
}

fn sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Figure { id, b, x0, x1, t, t_max, dt, grid, output } => {
            let figure: FigureId = match id.parse() {
                Ok(f) => f,
                Err(e) => return usage_error(e),
            };
            let params = FigureParams {
                b,
                x0,
                x1,
                t,
                t_max,
                dt,
                grid_min: grid.grid_min,
                grid_max: grid.grid_max,
                grid_n: grid.grid_n,
            };
            let dataset = match figures::build(figure, &params) {
                Ok(d) => d,
                Err(e) => return usage_error(e),
            };
            let written = sink(&output.out)
                .map_err(curtain::Error::from)
                .and_then(|mut w| {
                    dataset.write(&mut w, output.format.into())?;
                    w.flush()?;
                    Ok(())
                });
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => usage_error(e),
            }
        }
        Command::Verify { suite, eps_schedule, tolerances, output } => {
            let suite = match suite {
                SuiteArg::Fast => Suite::Fast,
                SuiteArg::Full => Suite::Full,
            };
            let mut spectral = SpectralConfig::default();
            if let Some(schedule) = eps_schedule {
                spectral = spectral.with_eps_schedule(schedule);
            }
            let overrides: BTreeMap<String, f64> = tolerances.into_iter().collect();
            let report = match verify::run(suite, &Context { spectral }, &overrides) {
                Ok(r) => r,
                Err(e) => return usage_error(e),
            };
            let written = sink(&output.out)
                .map_err(curtain::Error::from)
                .and_then(|mut w| {
                    report.write(&mut w, output.format.into())?;
                    w.flush()?;
                    Ok(())
                });
            if let Err(e) = written {
                return usage_error(e);
            }
            for c in report.failures() {
                eprintln!(
                    "FAIL {}: measured {} {} {}",
                    c.name,
                    c.measured,
                    c.relation.symbol(),
                    c.tolerance
                );
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
