//! `decoprobe`: scan lattice models with a dephasing-qubit probe.
//!
//! Every data command takes one validated TOML configuration (from a file
//! or a built-in preset), runs deterministically, and writes a CSV table,
//! an optional JSON mirror with identical numbers, and a run manifest
//! carrying the configuration echo and the wall time.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::RunError;
use config::{allowed_params, config_hash, preset, OutputSpec, RunConfig, MODEL_IDS, PRESETS};
use output::{write_table, DataTable};

/// Decoherence probe of gap closings in free-fermion lattice models.
#[derive(Parser)]
#[command(name = "decoprobe", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a model parameter and mark decoherence cusps
    Sweep(RunArgs),
    /// Map the per-momentum overlap over the full zone
    Kmap(RunArgs),
    /// Bands and overlap along a momentum path
    Path(RunArgs),
    /// Decoherence factor against time
    Series(RunArgs),
    /// Locate direct-gap minima (band touchings) in the zone
    Nodes(RunArgs),
    /// Quantized invariant of a two-band bulk model
    Topo(RunArgs),
    /// Eigenvalue spectra and localization measures
    Spectrum(RunArgs),
    /// List models, parameters, and built-in presets
    ListModels,
}

#[derive(Args)]
struct RunArgs {
    /// Path to a TOML run configuration
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Name of a built-in configuration (see list-models)
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Output stem; overrides `output.path` from the configuration
    #[arg(long, value_name = "STEM")]
    out: Option<PathBuf>,
    /// Output format; json adds a JSON mirror next to the CSV
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Worker thread count (defaults to the number of cores)
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep(args) => run(commands::sweep, args),
        Command::Kmap(args) => run(commands::kmap, args),
        Command::Path(args) => run(commands::path, args),
        Command::Series(args) => run(commands::series, args),
        Command::Nodes(args) => run(commands::nodes, args),
        Command::Topo(args) => run(commands::topo, args),
        Command::Spectrum(args) => run(commands::spectrum, args),
        Command::ListModels => {
            print_models();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Resolve the configuration, execute the command, write the files.
fn run(
    command: fn(&RunConfig) -> Result<DataTable, RunError>,
    args: &RunArgs,
) -> Result<(), RunError> {
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(RunError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| RunError::Run(format!("thread pool setup failed: {e}")))?;
    }

    let (mut config, preset_name) = resolve_config(args)?;
    if let Some(out) = &args.out {
        let spec = config.output.get_or_insert_with(|| OutputSpec { path: None, format: None });
        spec.path = Some(out.display().to_string());
    }
    if let Some(format) = args.format {
        let spec = config.output.get_or_insert_with(|| OutputSpec { path: None, format: None });
        spec.format = Some(
            match format {
                OutputFormat::Csv => "csv",
                OutputFormat::Json => "json",
            }
            .to_string(),
        );
    }

    let stem: PathBuf = match config.output.as_ref().and_then(|o| o.path.clone()) {
        Some(path) => PathBuf::from(path),
        // A preset run lands next to the working directory under its own name.
        None => match preset_name {
            Some(name) => PathBuf::from(name),
            None => {
                return Err(RunError::Config(
                    "field `output.path`: set it in the config or pass --out <STEM>".into(),
                ))
            }
        },
    };
    let json_mirror = config
        .output
        .as_ref()
        .and_then(|o| o.format.as_deref())
        .is_some_and(|f| f == "json");

    let hash = config_hash(&config);
    let started = Instant::now();
    let table = command(&config)?;
    let wall_time_ms = started.elapsed().as_millis();
    let files = write_table(&stem, &table, &config, &hash, json_mirror, wall_time_ms)?;

    println!("wrote {}", files.data.display());
    if let Some(mirror) = &files.mirror {
        println!("wrote {}", mirror.display());
    }
    println!("wrote {}", files.manifest.display());
    Ok(())
}

fn resolve_config(args: &RunArgs) -> Result<(RunConfig, Option<&'static str>), RunError> {
    match (&args.config, &args.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                RunError::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            Ok((RunConfig::from_toml(&text)?, None))
        }
        (None, Some(name)) => {
            let p = preset(name)?;
            Ok((p.config(), Some(p.name)))
        }
        (None, None) => Err(RunError::Config(
            "provide --config <FILE> or --preset <NAME>".into(),
        )),
        (Some(_), Some(_)) => Err(RunError::Config(
            "--config and --preset are mutually exclusive".into(),
        )),
    }
}

fn print_models() {
    const SUMMARIES: [(&str, &str); 6] = [
        ("ssh", "bulk dimerized chain"),
        ("ssh-open", "dimerized chain with open ends"),
        ("qwz", "bulk two-band checkerboard model"),
        ("qwz-strip", "checkerboard strip, open across"),
        ("km-ribbon", "honeycomb spin-orbit ribbon, zigzag edges"),
        ("weyl", "cubic four-band semimetal"),
    ];
    println!("models:");
    for id in MODEL_IDS {
        let summary = SUMMARIES
            .iter()
            .find(|(name, _)| *name == id)
            .map_or("", |(_, s)| s);
        println!("  {id:<10} {summary:<42} params: {}", allowed_params(id).join(", "));
    }
    println!();
    println!("presets (run with `decoprobe <command> --preset <name>`):");
    for p in PRESETS {
        println!("  {:<6} {:<9} {}", p.name, p.command, p.summary);
    }
}
