use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use tumorsim_core::config::{parse_config, RunConfig};
use tumorsim_core::preset::{preset, with_mesh_width};
use tumorsim_core::run::{run, Simulation};
use tumorsim_core::verify::{verify, VerifyMode};
use tumorsim_core::{Error, Result};

const DEFAULT_OUT: &str = "output";

#[derive(Parser)]
#[command(name = "tumorsim", version, about = "Finite-difference tumor growth simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation and write snapshots, diagnostics.csv and manifest.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to `output.directory` from the config, then `output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print or write the config of a named preset.
    Preset {
        #[arg(long)]
        name: String,
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Rescale the preset grid to this mesh width.
        #[arg(long)]
        h: Option<f64>,
    },
    /// Run a verification mode and print a JSON report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// One of invariants, convergence, manufactured.
        #[arg(long)]
        mode: String,
    },
    /// Print the step-size bounds for the initial state without running.
    Cfl {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &Path) -> Result<RunConfig> {
    parse_config(&fs::read_to_string(path)?)
}

fn print_json(value: serde_json::Result<serde_json::Value>) -> Result<()> {
    let text = value.and_then(|v| serde_json::to_string_pretty(&v)).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    println!("{text}");
    Ok(())
}

fn execute(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Run { config, out } => {
            let cfg = load(&config)?;
            let dir = out.or_else(|| cfg.output_directory.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
            let outcome = run(&cfg, &dir)?;
            let m = &outcome.manifest;
            println!(
                "completed {} steps to t = {} ({} snapshots, {} violations) in {}",
                m.steps.len(),
                m.total_time,
                m.snapshots.len(),
                m.violations.len(),
                outcome.out_dir.display()
            );
            Ok(true)
        }
        Command::Preset { name, emit, h } => {
            let mut cfg = preset(&name)?;
            if let Some(h) = h {
                cfg = with_mesh_width(cfg, h)?;
            }
            match emit {
                Some(path) => fs::write(path, cfg.to_string())?,
                None => print!("{cfg}"),
            }
            Ok(true)
        }
        Command::Verify { config, mode } => {
            let mode: VerifyMode = mode.parse()?;
            let report = verify(&load(&config)?, mode)?;
            print_json(serde_json::to_value(&report))?;
            Ok(report.passed)
        }
        Command::Cfl { config } => {
            let sim = Simulation::new(load(&config)?)?;
            let (cfl, nutrient, drug) = sim.stepper().step_sizes(sim.state());
            print_json(Ok(json!({
                "bounds": sim.bounds(),
                "macro": cfl,
                "nutrient": nutrient,
                "drug": drug,
                "initial_solver_iterations": sim.initial_solver_iterations(),
            })))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
