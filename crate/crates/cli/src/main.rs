//! `sea`: passivity analysis, frequency responses, simulations and gain
//! studies for series elastic actuators.
//!
//! Exit codes: 0 success (or passive), 1 usage/IO/parse error, 2 analyzed
//! but not passive, 3 a reproduction assertion failed.

mod commands;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_ERROR: u8 = 1;
pub const EXIT_NOT_PASSIVE: u8 = 2;
pub const EXIT_ASSERTION: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "sea",
    version,
    about = "Passivity analysis and simulation of series elastic actuators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Configuration file plus command-line edits.
#[derive(Args, Debug)]
pub struct Input {
    /// JSON configuration file.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Replace one parameter, e.g. `ca.kp=750`. Repeatable.
    #[arg(long = "override", value_name = "PATH=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Args, Debug)]
pub struct FreqArgs {
    #[arg(long, default_value_t = 1e-2)]
    pub omega_min: f64,
    #[arg(long, default_value_t = 1e4)]
    pub omega_max: f64,
    #[arg(long, default_value_t = 400)]
    pub points: usize,
}

/// Load-release run settings.
#[derive(Args, Debug)]
pub struct RunArgs {
    /// Load mass, kg.
    #[arg(long, default_value_t = 10.0)]
    pub mass: f64,
    /// Integration step, s.
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    /// Initial load displacement from the setpoint, m.
    #[arg(long, default_value_t = 0.5)]
    pub step: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify passivity of the interaction impedance.
    Analyze {
        #[command(flatten)]
        input: Input,
        /// Also write `analysis.json` here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Frequency response of the rendered stiffness.
    Bode {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        freq: FreqArgs,
        /// Write `bode.csv` here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a log-log magnitude plot (needs --out).
        #[arg(long)]
        svg: bool,
    },
    /// Release the load from a displacement and record the response.
    Simulate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: RunArgs,
        /// Simulated time, s.
        #[arg(long, default_value_t = 10.0)]
        duration: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        svg: bool,
    },
    /// Rendered stiffness from constant-force pushes on the load.
    Stiffness {
        #[command(flatten)]
        input: Input,
        /// Load mass, kg.
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        /// Applied force, N. Repeatable.
        #[arg(long = "step", default_values_t = [10.0])]
        forces: Vec<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Sweep one parameter over values and load masses.
    Sweep {
        #[command(flatten)]
        input: Input,
        /// Parameter path, e.g. `cl.kp`.
        #[arg(long)]
        param: String,
        /// `start:stop:step` (inclusive) or a comma-separated list.
        #[arg(long)]
        values: String,
        /// Load mass, kg. Repeatable.
        #[arg(long = "mass", default_values_t = [10.0])]
        masses: Vec<f64>,
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        /// Time cap per run, s.
        #[arg(long, default_value_t = sea_core::experiments::SWEEP_CAP)]
        duration: f64,
        /// Initial load displacement, m.
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// One settling-time plot per mass.
        #[arg(long)]
        svg: bool,
    },
    /// Grid search for the fastest passive gains.
    Tune {
        #[command(flatten)]
        input: Input,
        /// `path=lo:hi`, log-spaced when `lo > 0`. Repeatable.
        #[arg(long = "gain", required = true)]
        gains: Vec<String>,
        /// Grid points per gain.
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 10.0)]
        duration: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a scripted comparison and check its expected outcome.
    Reproduce {
        target: Target,
        /// Configuration for the stiffness study (a damped actuator-side PD
        /// by default).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "override", value_name = "PATH=VALUE")]
        overrides: Vec<String>,
        /// Grid points per gain when tuning.
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Load mass for the stiffness study, kg.
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        /// Forces for the stiffness study, N. Repeatable.
        #[arg(long = "step", default_values_t = [5.0, 10.0, 20.0])]
        forces: Vec<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        svg: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Target {
    Fig3,
    Fig4,
    Stiffness,
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    use commands as c;
    match cli.command {
        Command::Analyze { input, out } => c::analyze(&input, out.as_deref()),
        Command::Bode {
            input,
            freq,
            out,
            svg,
        } => c::bode(&input, &freq, out.as_deref(), svg),
        Command::Simulate {
            input,
            run,
            duration,
            out,
            svg,
        } => c::simulate(&input, &run, duration, &out, svg),
        Command::Stiffness {
            input,
            mass,
            forces,
            out,
        } => c::stiffness(&input, mass, &forces, &out),
        Command::Sweep {
            input,
            param,
            values,
            masses,
            dt,
            duration,
            step,
            out,
            svg,
        } => c::sweep(
            &input,
            &c::SweepArgs {
                param: &param,
                values: &values,
                masses,
                dt,
                duration,
                x0: step,
            },
            &out,
            svg,
        ),
        Command::Tune {
            input,
            gains,
            points,
            run,
            duration,
            out,
        } => c::tune(&input, &gains, points, &run, duration, &out),
        Command::Reproduce {
            target,
            config,
            overrides,
            points,
            mass,
            forces,
            out,
            svg,
        } => match target {
            Target::Fig3 => c::reproduce_fig3(points, &out),
            Target::Fig4 => c::reproduce_fig4(&out, svg),
            Target::Stiffness => {
                c::reproduce_stiffness(config.as_deref(), &overrides, mass, &forces, &out)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn overrides_and_repeats_parse() {
        let cli = Cli::try_parse_from([
            "sea",
            "sweep",
            "--config",
            "c.json",
            "--override",
            "ca.kp=1",
            "--override",
            "b=2",
            "--param",
            "cl.kp",
            "--values",
            "0:10:5",
            "--mass",
            "1",
            "--mass",
            "2",
        ])
        .unwrap();
        let Command::Sweep { input, masses, .. } = cli.command else {
            panic!("wrong subcommand")
        };
        assert_eq!(input.overrides, ["ca.kp=1", "b=2"]);
        assert_eq!(masses, [1.0, 2.0]);
    }

    #[test]
    fn unknown_flag_rejected() {
        assert!(Cli::try_parse_from(["sea", "analyze", "--config", "c.json", "--bogus"]).is_err());
        assert!(Cli::try_parse_from(["sea", "frobnicate"]).is_err());
    }
}
