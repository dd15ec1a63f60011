use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use floquet_sweep::config::parse_key_values;
use floquet_sweep::{compare_phases, run_sweep, Pipeline, SweepConfig, SweepError};

/// Sweep an (E, ω) grid of the driven dissipative qubit and write phase-diagram CSV.
#[derive(Debug, Parser)]
#[command(name = "floquet-sweep", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count non-Lindbladian points in two sweeps over the same grid.
    Compare { run_a: PathBuf, run_b: PathBuf },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Key-value file supplying defaults; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dissipation rate γ [default: 0.01]
    #[arg(long)]
    gamma: Option<f64>,
    /// Drive phase φ [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    /// Smallest drive amplitude E [default: 0]
    #[arg(long)]
    e_min: Option<f64>,
    /// Largest drive amplitude E [default: 2]
    #[arg(long)]
    e_max: Option<f64>,
    /// Number of E values [default: 20]
    #[arg(long)]
    e_count: Option<usize>,
    /// Smallest drive frequency ω [default: 0.3]
    #[arg(long)]
    omega_min: Option<f64>,
    /// Largest drive frequency ω [default: 3]
    #[arg(long)]
    omega_max: Option<f64>,
    /// Number of ω values [default: 20]
    #[arg(long)]
    omega_count: Option<usize>,
    /// Generator to test [default: exact]
    #[arg(long, value_enum)]
    pipeline: Option<Pipeline>,
    /// Expansion order of the approximate pipelines [default: 1]
    #[arg(long)]
    order: Option<usize>,
    /// Branch indices scanned in [−x, x] [default: 5]
    #[arg(long)]
    x_range: Option<i32>,
    /// RK4 steps per drive period [default: 2000]
    #[arg(long)]
    steps_per_period: Option<usize>,
    /// Points with ω below this are written as NaN [default: 0.3]
    #[arg(long)]
    omega_floor: Option<f64>,
    /// Output CSV; metadata goes to <out>.meta.json [default: sweep.csv]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads [default: 1]
    #[arg(long)]
    workers: Option<usize>,
}

impl RunArgs {
    fn flag_entries(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("gamma", self.gamma.map(|v| v.to_string()));
        put("phi", self.phi.map(|v| v.to_string()));
        put("e-min", self.e_min.map(|v| v.to_string()));
        put("e-max", self.e_max.map(|v| v.to_string()));
        put("e-count", self.e_count.map(|v| v.to_string()));
        put("omega-min", self.omega_min.map(|v| v.to_string()));
        put("omega-max", self.omega_max.map(|v| v.to_string()));
        put("omega-count", self.omega_count.map(|v| v.to_string()));
        put("pipeline", self.pipeline.map(|v| v.to_string()));
        put("order", self.order.map(|v| v.to_string()));
        put("x-range", self.x_range.map(|v| v.to_string()));
        put("steps-per-period", self.steps_per_period.map(|v| v.to_string()));
        put("omega-floor", self.omega_floor.map(|v| v.to_string()));
        put("out", self.out.as_ref().map(|v| v.display().to_string()));
        put("workers", self.workers.map(|v| v.to_string()));
        m
    }

    fn resolve(&self) -> Result<SweepConfig, SweepError> {
        let mut cfg = SweepConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| SweepError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            cfg.apply_entries(&parse_key_values(&text)?)?;
        }
        cfg.apply_entries(&self.flag_entries())?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), SweepError> {
    match cli.command {
        Some(Command::Compare { run_a, run_b }) => {
            let c = compare_phases(&run_a, &run_b)?;
            println!("points={} count_a={} count_b={} difference={} overlap={}", c.points, c.count_a, c.count_b, c.difference, c.overlap);
        }
        None => {
            let cfg = cli.run.resolve()?;
            let out = run_sweep(&cfg)?;
            let s = &out.summary;
            println!(
                "wrote {} points to {} (lindbladian={} non_lindbladian={} nan={} degenerate={}) in {} ms",
                s.points,
                cfg.output_path.display(),
                s.lindbladian,
                s.non_lindbladian,
                s.nan_points,
                s.degenerate,
                s.wall_time_ms
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("floquet-sweep: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
