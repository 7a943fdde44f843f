use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sastirap::cli_io::{emit_csv, emit_plot, parse_config, Overrides, Record, RunConfig};
use sastirap::experiments::{
    run_efficiency_sweep, run_population_trace, run_pulse_preview, run_robustness_grid,
    ScenarioKind,
};
use sastirap::propagator::max_intermediate_population;
use sastirap::Result;

/// Like `println!`, but a closed stdout (e.g. piped into `head`) is not an error.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

/// STIRAP and superadiabatic STIRAP in a three-level V system.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Level populations over one protocol run.
    Trace(Flags),
    /// Transfer efficiency against total duration.
    Sweep(Flags),
    /// Robustness map over Gaussian width and separation.
    Grid(Flags),
    /// Pulse envelopes and correction amplitude.
    Pulses(Flags),
}

#[derive(Args)]
struct Flags {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// stirap | sa | exact-cd
    #[arg(long)]
    protocol: Option<String>,
    /// gaussian | exponential | trigonometric
    #[arg(long)]
    family: Option<String>,
    /// Peak Rabi frequency Ω₀/2π in MHz.
    #[arg(long)]
    omega0_mhz: Option<f64>,
    /// Protocol duration T in μs.
    #[arg(long = "T-us", alias = "t-us")]
    t_us: Option<f64>,
    /// Correction detuning Δ/2π in MHz.
    #[arg(long, allow_negative_numbers = true)]
    delta_mhz: Option<f64>,
    /// Integration steps per run.
    #[arg(long)]
    steps: Option<usize>,
    /// magnus4 | midpoint | rk4
    #[arg(long)]
    method: Option<String>,
    /// default | m1 | p1 | 0 | dark
    #[arg(long)]
    initial_state: Option<String>,
    /// Sweep threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long)]
    plot: bool,
    /// Skip the CSV output.
    #[arg(long)]
    no_csv: bool,
}

impl Flags {
    fn overrides(&self) -> Overrides {
        Overrides {
            family: self.family.clone(),
            protocol: self.protocol.clone(),
            omega0_mhz: self.omega0_mhz,
            t_us: self.t_us,
            delta_mhz: self.delta_mhz,
            steps: self.steps,
            method: self.method.clone(),
            initial_state: self.initial_state.clone(),
            workers: self.workers,
            output_dir: self.output_dir.clone(),
            csv: self.no_csv.then_some(false),
            plot: self.plot.then_some(true),
        }
    }
}

fn write(config: &RunConfig, record: Record<'_>) -> Result<()> {
    let spec = &config.scenario;
    if config.csv {
        let files = emit_csv(&config.output_dir, record, spec, &config.resolved)?;
        out!("wrote {}", files.csv.display());
        out!("wrote {}", files.metadata.display());
    }
    if config.plot {
        for path in emit_plot(&config.output_dir, record, spec)? {
            out!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let (kind, flags) = match &cli.command {
        Command::Trace(f) => (ScenarioKind::PopulationTrace, f),
        Command::Sweep(f) => (ScenarioKind::EfficiencyVsDuration, f),
        Command::Grid(f) => (ScenarioKind::RobustnessGrid, f),
        Command::Pulses(f) => (ScenarioKind::PulsePreview, f),
    };
    let config = parse_config(kind, flags.config.as_deref(), &flags.overrides())?;
    let spec = &config.scenario;
    match kind {
        ScenarioKind::PopulationTrace => {
            let rec = run_population_trace(spec)?;
            out!(
                "efficiency={:.9} max_intermediate={:.9}",
                rec.efficiency,
                max_intermediate_population(&rec)
            );
            write(&config, Record::Trace(&rec))
        }
        ScenarioKind::EfficiencyVsDuration => {
            write(&config, Record::Sweep(&run_efficiency_sweep(spec)?))
        }
        ScenarioKind::RobustnessGrid => {
            let rec = run_robustness_grid(spec)?;
            for s in &rec.series {
                let cells = s.efficiency.iter().filter(|&&e| e >= 0.9).count();
                out!(
                    "{}: {cells}/{} cells with efficiency >= 0.9",
                    s.protocol.name(),
                    rec.cell_count()
                );
            }
            write(&config, Record::Sweep(&rec))
        }
        ScenarioKind::PulsePreview => write(&config, Record::Preview(&run_pulse_preview(spec)?)),
    }
}

fn fail(kind: &str, message: &str) -> ExitCode {
    let message = message
        .trim()
        .replace('\\', "\\\\")
        .replace('"', "\\\"")
        .replace('\n', "\\n");
    eprintln!("error kind={kind} message=\"{message}\"");
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // --help and --version
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", &e.to_string()),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), &e.to_string()),
    }
}
