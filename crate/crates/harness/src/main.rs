use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use inertia_core::{generate, InertiaMode, Method, ProfileKind};
use inertia_harness::records::{read_records_file, write_records_file};
use inertia_harness::summary::{write_summary, write_sweep};
use inertia_harness::{
    horizon_sweep, run_grid, summarize, ConfigError, ExperimentConfig, NamedSatellite,
};

#[derive(Parser)]
#[command(
    name = "inertia-id",
    version,
    about = "Spacecraft inertia identification experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment grid and write results.csv and summary.csv.
    Run(GridArgs),
    /// Rerun the static grid at several horizons.
    Sweep {
        #[command(flatten)]
        grid: GridArgs,
        /// Comma-separated horizons in seconds.
        #[arg(long, value_delimiter = ',', default_value = "10,60,120,300,600")]
        durations: Vec<f64>,
    },
    /// Aggregate a results CSV per cell.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write one excitation profile as CSV.
    ProfileDump {
        #[arg(long)]
        kind: ProfileKind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "CubeSat")]
        satellite: String,
        #[arg(long, default_value_t = 300.0)]
        horizon: f64,
        #[arg(long, default_value_t = 0.1)]
        dt_ctrl: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, num_args = 1..)]
    satellite: Vec<String>,
    #[arg(long, num_args = 1..)]
    profile: Vec<ProfileKind>,
    #[arg(long, num_args = 1..)]
    mode: Vec<InertiaMode>,
    #[arg(long, num_args = 1..)]
    estimator: Vec<Method>,
    /// Use seeds 0..N.
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    no_noise: bool,
    #[arg(long)]
    no_disturbance: bool,
    #[arg(long)]
    export_traces: bool,
    /// Fill the wall_time_s column (output is then no longer byte-reproducible).
    #[arg(long)]
    timing: bool,
}

impl GridArgs {
    fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = ExperimentConfig::load(self.config.as_deref())?;
        if let Some(out) = &self.out {
            cfg.output = out.clone();
        }
        if !self.satellite.is_empty() {
            cfg.satellites = self
                .satellite
                .iter()
                .map(|s| NamedSatellite::parse(s))
                .collect::<Result<_, _>>()?;
        }
        if !self.profile.is_empty() {
            cfg.profiles = self.profile.clone();
        }
        if !self.mode.is_empty() {
            cfg.modes = self.mode.clone();
        }
        if !self.estimator.is_empty() {
            cfg.estimators = self.estimator.clone();
        }
        if let Some(n) = self.seeds {
            cfg.seeds = (0..n).collect();
        }
        if let Some(h) = self.horizon {
            cfg.horizon = h;
        }
        cfg.sensors.enabled &= !self.no_noise;
        cfg.disturbances.enabled &= !self.no_disturbance;
        cfg.export_traces |= self.export_traces;
        cfg.record_timing |= self.timing;
        cfg.validate()?;
        Ok(cfg)
    }
}

enum Failure {
    Config(String),
    Runs(usize),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn io(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            std::fs::create_dir_all(&cfg.output).map_err(io)?;
            let out = run_grid(&cfg).map_err(io)?;
            write_records_file(&out.records, &cfg.output.join("results.csv")).map_err(io)?;
            let file = std::fs::File::create(cfg.output.join("summary.csv")).map_err(io)?;
            write_summary(&summarize(&out.records), std::io::BufWriter::new(file)).map_err(io)?;
            for r in out.records.iter().filter(|r| r.failed()) {
                eprintln!(
                    "failed: {} {} {} {} seed {}: {}",
                    r.satellite,
                    r.profile,
                    r.inertia_mode,
                    r.estimator,
                    r.seed,
                    r.failure.as_deref().unwrap_or("unknown")
                );
            }
            println!(
                "{} runs written to {}",
                out.records.len(),
                cfg.output.display()
            );
            match out.failures() {
                0 => Ok(()),
                n => Err(Failure::Runs(n)),
            }
        }
        Command::Sweep { grid, durations } => {
            let cfg = grid.resolve()?;
            let rows = horizon_sweep(&cfg, &durations).map_err(Failure::Config)?;
            std::fs::create_dir_all(&cfg.output).map_err(io)?;
            let file = std::fs::File::create(cfg.output.join("sweep.csv")).map_err(io)?;
            write_sweep(&rows, std::io::BufWriter::new(file)).map_err(io)?;
            println!(
                "sweep written to {}",
                cfg.output.join("sweep.csv").display()
            );
            Ok(())
        }
        Command::Summarize { input, out } => {
            let records = read_records_file(&input).map_err(io)?;
            if records.is_empty() {
                return Err(Failure::Config(format!("{}: no records", input.display())));
            }
            let file = std::fs::File::create(&out).map_err(io)?;
            write_summary(&summarize(&records), std::io::BufWriter::new(file)).map_err(io)?;
            Ok(())
        }
        Command::ProfileDump {
            kind,
            out,
            satellite,
            horizon,
            dt_ctrl,
            seed,
        } => {
            let sat = NamedSatellite::parse(&satellite)?;
            let profile =
                generate(kind, horizon, dt_ctrl, sat.params.rw_max_torque, seed).map_err(io)?;
            let file = std::fs::File::create(&out).map_err(io)?;
            profile
                .write_csv(std::io::BufWriter::new(file))
                .map_err(io)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    // usage errors share exit code 1 with config errors; 2 is reserved for failed runs
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runs(n)) => {
            eprintln!("{n} run(s) failed");
            ExitCode::from(2)
        }
    }
}
