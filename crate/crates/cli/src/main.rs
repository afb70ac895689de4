use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spinscatter_cli::acceptance;
use spinscatter_cli::commands::{angle_range, parse_initial_state, Run, DEFAULT_SWEEP_WIDTHS};
use spinscatter_cli::{CliError, Overrides, Result, RunConfig};

/// Spin-photon scattering simulations.
///
/// Settings come from built-in defaults, then the --config file, then the
/// flags below; a flag always wins over the file.
#[derive(Parser)]
#[command(name = "spinscatter", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed for every sampled output.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for the output files.
    #[arg(long, global = true, value_name = "PATH")]
    output_dir: Option<PathBuf>,
    /// Exact expectations and zero background.
    #[arg(long, global = true)]
    noiseless: bool,
    /// Single detector direction, no window averaging.
    #[arg(long, global = true)]
    ideal: bool,
    /// Full Larmor phase window in degrees.
    #[arg(long, global = true)]
    window_deg: Option<f64>,
    /// Numerical aperture of the collection optics.
    #[arg(long, global = true)]
    na: Option<f64>,
    /// Background fraction of detected events.
    #[arg(long, global = true)]
    background: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Process matrices, collapse surface and ellipsoid.
    Process,
    /// Entropy and concurrence maps over the Bloch sphere.
    Maps,
    /// Half-wave-plate polarization scan.
    Scan {
        /// `x`, `-x`, `y`, ... or `bx,by,bz`.
        #[arg(long, default_value = "x", allow_hyphen_values = true)]
        initial: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        from_deg: f64,
        /// Excluded.
        #[arg(long, default_value_t = 180.0, allow_hyphen_values = true)]
        to_deg: f64,
        #[arg(long, default_value_t = 36)]
        steps: usize,
    },
    /// Aspect ratio against window width.
    Sweep {
        /// Full window widths in degrees.
        #[arg(long, value_delimiter = ',')]
        widths: Option<Vec<f64>>,
    },
    /// Runs the acceptance suite.
    Selftest,
}

fn config(g: &Global) -> Result<RunConfig> {
    let base = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let o = Overrides {
        seed: g.seed,
        output_dir: g.output_dir.clone(),
        noiseless: g.noiseless,
        ideal: g.ideal,
        window_deg: g.window_deg,
        na: g.na,
        background: g.background,
    };
    Ok(base.apply(&o))
}

fn execute(cli: Cli) -> Result<()> {
    if let Command::Selftest = cli.command {
        let outcomes = acceptance::run_all();
        for o in &outcomes {
            println!("{o}");
        }
        let failed = outcomes.iter().filter(|o| !o.passed).count();
        return if failed == 0 { Ok(()) } else { Err(CliError::Acceptance(failed)) };
    }
    let run = Run::new(config(&cli.global)?)?;
    let files = match cli.command {
        Command::Process => run.process()?,
        Command::Maps => run.maps()?,
        Command::Scan { initial, from_deg, to_deg, steps } => {
            run.scan(&parse_initial_state(&initial)?, &angle_range(from_deg, to_deg, steps)?)?
        }
        Command::Sweep { widths } => run.sweep(widths.as_deref().unwrap_or(&DEFAULT_SWEEP_WIDTHS))?,
        Command::Selftest => unreachable!(),
    };
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
