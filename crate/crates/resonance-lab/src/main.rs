use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use resonance_core::resonator::ProfileMode;
use resonance_lab::config::{FormSelector, RunConfig, DEFAULT_TOL};
use resonance_lab::runner::{self, CommandOutput};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormArg {
    Delta,
    Maass,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Standard,
    Custom,
}

#[derive(Subcommand, Clone, Copy, Debug)]
enum Command {
    /// Run the verification suite; exit 1 if any check fails.
    Verify,
    /// Solve the prescribed-argument points and tabulate L along them (CSV).
    Scan,
    /// Full moment report for the configured resonator.
    Moments,
    /// Oscillatory-kernel diagnostics.
    Kernels,
}

#[derive(Parser, Debug)]
#[command(
    name = "resonance-lab",
    about = "Numerical laboratory for the resonance method on degree-2 L-functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Which form to work with
    #[arg(long, global = true, value_enum, default_value_t = FormArg::Delta)]
    form: FormArg,

    /// Maass input file (required with --form maass)
    #[arg(long, global = true)]
    maass_file: Option<PathBuf>,

    /// Center T of the sech weight
    #[arg(long = "T", global = true, default_value_t = 200.0)]
    t: f64,

    /// Prescribed argument theta
    #[arg(long, global = true, default_value_t = 0.0)]
    theta: f64,

    /// Resonator exponent parameter xi in (0, 1/3)
    #[arg(long, global = true, default_value_t = 0.05)]
    xi: f64,

    /// Resonator mode
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Custom)]
    mode: ModeArg,

    /// Custom-mode window lower edge
    #[arg(long, global = true, default_value_t = 100.0)]
    pmin: f64,

    /// Custom-mode window upper edge
    #[arg(long, global = true, default_value_t = 10_000.0)]
    pmax: f64,

    /// Custom-mode resonator length parameter
    #[arg(long = "L", global = true, default_value_t = 5.0)]
    l_value: f64,

    /// Tolerance scale (verify thresholds scale with tol / 1e-9)
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,

    /// Output file (CSV for scan, JSON copy otherwise)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Cli {
    fn to_config(&self) -> Result<RunConfig, String> {
        let form = match self.form {
            FormArg::Delta => FormSelector::Delta,
            FormArg::Maass => FormSelector::MaassFile(
                self.maass_file
                    .clone()
                    .ok_or("--form maass requires --maass-file")?,
            ),
        };
        Ok(RunConfig {
            form,
            t: self.t,
            theta: self.theta,
            xi: self.xi,
            mode: match self.mode {
                ModeArg::Standard => ProfileMode::Standard,
                ModeArg::Custom => ProfileMode::Custom,
            },
            pmin: self.pmin,
            pmax: self.pmax,
            l_value: self.l_value,
            tol: self.tol,
            out: self.out.clone(),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match cli.to_config() {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Verify => runner::cmd_verify(&config),
        Command::Scan => runner::cmd_scan(&config),
        Command::Moments => runner::cmd_moments(&config),
        Command::Kernels => runner::cmd_kernels(&config),
    };
    let output: CommandOutput = match result {
        Ok(o) => o,
        Err(err) => {
            eprintln!("error: {err:?}");
            return ExitCode::from(runner::exit_code(&err) as u8);
        }
    };
    if let Some(csv) = &output.csv {
        // plot-ready rows go to the file, the summary to stdout
        let Some(path) = &config.out else {
            eprintln!("error: scan writes CSV and requires --out");
            return ExitCode::from(2);
        };
        if let Err(e) = std::fs::write(path, csv) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    } else if let Some(path) = &config.out {
        let text = serde_json::to_string_pretty(&output.json).expect("serializable report");
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&output.json).expect("serializable report")
    );
    if output.all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
