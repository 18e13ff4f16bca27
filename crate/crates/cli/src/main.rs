use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crossjump_cli::commands::{self, SweepParam};
use crossjump_cli::CliError;
use crossjump_core::Point2;

/// Global dynamics of a planar hybrid system: two exponentially stable
/// linear fields switched across a broken line, with a power-law jump on
/// crossing. Verdicts are analytic; the simulator is the cross-check.
#[derive(Parser)]
#[command(name = "crossjump", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the global verdict and print it as JSON.
    Classify { spec: PathBuf },
    /// Tabulate the displacement map on a log-spaced grid.
    Displacement {
        spec: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        x_min: f64,
        #[arg(long, default_value_t = 100.0)]
        x_max: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value = "displacement.csv")]
        out: PathBuf,
    },
    /// Integrate one orbit; write trajectory and event tables.
    Simulate {
        spec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, allow_hyphen_values = true)]
        y0: f64,
        /// Override the time budget from the spec file.
        #[arg(long)]
        t_max: Option<f64>,
        /// Override the jump budget from the spec file.
        #[arg(long)]
        max_jumps: Option<usize>,
        #[arg(long, default_value = "trajectory.csv")]
        out: PathBuf,
        #[arg(long, default_value = "events.csv")]
        events_out: PathBuf,
    },
    /// Draw the phase portrait as a standalone SVG.
    Portrait {
        spec: PathBuf,
        #[arg(long, default_value = "portrait.svg")]
        out: PathBuf,
        /// Orbit starting point "x,y"; repeat the flag for more orbits.
        #[arg(long = "seed", value_parser = parse_point, allow_hyphen_values = true)]
        seeds: Vec<Point2>,
        /// Fixed frame "x_min,x_max,y_min,y_max"; fitted to the data if absent.
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<Window>,
    },
    /// Re-classify while one parameter moves over a linear grid.
    Sweep {
        spec: PathBuf,
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long, allow_hyphen_values = true)]
        min: f64,
        #[arg(long, allow_hyphen_values = true)]
        max: f64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
    },
}

type Window = [f64; 4];

fn parse_point(text: &str) -> Result<Point2, String> {
    let fields = parse_floats(text)?;
    match *fields.as_slice() {
        [x, y] => Ok(Point2::new(x, y)),
        _ => Err(format!("expected \"x,y\", got \"{text}\"")),
    }
}

fn parse_window(text: &str) -> Result<Window, String> {
    let fields = parse_floats(text)?;
    match *fields.as_slice() {
        [a, b, c, d] => Ok([a, b, c, d]),
        _ => Err(format!("expected \"x_min,x_max,y_min,y_max\", got \"{text}\"")),
    }
}

fn parse_floats(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|field| field.trim().parse::<f64>().map_err(|err| format!("{err}: \"{field}\"")))
        .collect()
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Classify { spec } => {
            let report = commands::classify(&spec)?;
            println!("{}", report.to_json());
        }
        Command::Displacement { spec, x_min, x_max, samples, out } => {
            commands::displacement_table(&spec, x_min, x_max, samples, &out)?;
        }
        Command::Simulate { spec, x0, y0, t_max, max_jumps, out, events_out } => {
            let trajectory = commands::simulate(
                &spec,
                Point2::new(x0, y0),
                t_max,
                max_jumps,
                &out,
                &events_out,
            )?;
            println!("{}", commands::termination_label(trajectory.termination));
        }
        Command::Portrait { spec, out, seeds, window } => {
            commands::portrait(&spec, &out, &seeds, window)?;
        }
        Command::Sweep { spec, param, min, max, samples, out } => {
            commands::sweep(&spec, param, min, max, samples, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // Verbosity via CROSSJUMP_LOG (error/warn/info/debug); warnings on by
    // default so fragile verdicts are never silent.
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CROSSJUMP_LOG", "warn"))
        .init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
