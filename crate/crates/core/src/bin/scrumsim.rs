use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use scrumsim::metrics::{read_csv, write_csv};
use scrumsim::report::{render_cells, scenario_report, sweep_summary};
use scrumsim::sweep::{execute_sweep, SweepDesign, DEFAULT_REPETITIONS};
use scrumsim::{run, Error, Result, RunResult, WorldConfig};

#[derive(Debug, Parser)]
#[command(
    name = "scrumsim",
    version,
    about = "Competence propagation in Scrum teams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one simulation and print its metrics row.
    Run {
        #[arg(long, value_parser = existing_file)]
        config: PathBuf,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a factorial sweep described by a design file.
    Sweep {
        #[arg(long, value_parser = existing_file)]
        design: PathBuf,
        #[arg(long, env = "SIM_WORKERS", value_parser = clap::value_parser!(u32).range(1..))]
        workers: Option<u32>,
        /// Overrides the design's master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the four sociable/curious scenarios over a base config.
    Scenarios {
        #[arg(long, value_parser = existing_file)]
        config: PathBuf,
        #[arg(long, default_value_t = DEFAULT_REPETITIONS, value_parser = clap::value_parser!(u32).range(1..))]
        reps: u32,
        #[arg(long, env = "SIM_WORKERS", value_parser = clap::value_parser!(u32).range(1..))]
        workers: Option<u32>,
        /// Master seed; defaults to the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render the scenario report for an existing results CSV.
    Report {
        #[arg(value_parser = existing_file)]
        csv: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn existing_file(s: &str) -> std::result::Result<PathBuf, String> {
    let p = PathBuf::from(s);
    if p.is_file() {
        Ok(p)
    } else {
        Err(format!("no such file: {s}"))
    }
}

fn workers_or_default(workers: Option<u32>) -> usize {
    workers.map(|w| w as usize).unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(NonZeroUsize::get)
            .unwrap_or(1)
    })
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::io(p, e))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_rows(rows: &[RunResult], out: Option<&Path>) -> Result<()> {
    let mut w = sink(out)?;
    write_csv(rows, &mut w)?;
    w.flush()
        .map_err(|e| Error::io(out.unwrap_or(Path::new("<stdout>")), e))
}

/// With `--out` the CSV goes to the file and the report to stdout;
/// otherwise the CSV owns stdout and the report goes to stderr.
fn emit_report(text: &str, csv_to_file: bool) {
    if csv_to_file {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
}

/// Writes the sweep CSV, then the per-cell table. The scenario comparison is
/// appended when the rows cover all four cells with at least two runs each.
fn sweep_and_report(design: &SweepDesign, workers: Option<u32>, out: Option<&Path>) -> Result<()> {
    let rows = execute_sweep(design, workers_or_default(workers))?;
    write_rows(&rows, out)?;
    let text = match scenario_report(&rows) {
        Ok(rep) => rep.to_string(),
        Err(_) => render_cells(&sweep_summary(design, &rows)),
    };
    emit_report(&text, out.is_some());
    Ok(())
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config, seed, out } => {
            let mut cfg = WorldConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let row = run(&cfg)?;
            write_rows(&[row], out.as_deref())
        }
        Command::Sweep {
            design,
            workers,
            seed,
            out,
        } => {
            let mut design = SweepDesign::load(&design)?;
            if let Some(s) = seed {
                design.master_seed = s;
            }
            sweep_and_report(&design, workers, out.as_deref())
        }
        Command::Scenarios {
            config,
            reps,
            workers,
            seed,
            out,
        } => {
            let base = WorldConfig::load(&config)?;
            let master = seed.unwrap_or(base.seed);
            let design = SweepDesign::scenarios(base, reps, master);
            sweep_and_report(&design, workers, out.as_deref())
        }
        Command::Report { csv, out } => {
            let file = File::open(&csv).map_err(|e| Error::io(&csv, e))?;
            let rows = read_csv(file)?;
            let text = scenario_report(&rows)?.to_string();
            let mut w = sink(out.as_deref())?;
            w.write_all(text.as_bytes())
                .and_then(|_| w.flush())
                .map_err(|e| Error::io(out.as_deref().unwrap_or(Path::new("<stdout>")), e))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("scrumsim: {e}");
            ExitCode::from(1)
        }
    }
}
