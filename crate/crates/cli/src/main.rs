use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qpdno::hops::Algorithm;
use qpdno_cli::archive::dump_expansion;
use qpdno_cli::config::load_config;
use qpdno_cli::{run_to_dir, validate, CliError};

#[derive(Parser)]
#[command(name = "qpdno", version, about = "Convergence studies for quasiperiodic Dirichlet-Neumann operators")]
struct Cli {
    /// Output directory (defaults to `output.dir` from the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override a config key, e.g. `--override study.order=8`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the convergence study and write results.csv and metadata.json.
    Run { config: PathBuf },
    /// Write the coefficient archive of one algorithm, one file per epsilon.
    Dump {
        config: PathBuf,
        #[arg(long)]
        algorithm: Algorithm,
    },
    /// Check a config and list every problem found.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Invalid(_) | CliError::Parse(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    }
    let path = match &cli.command {
        Command::Run { config } | Command::Dump { config, .. } | Command::Validate { config } => config,
    };
    let config = load_config(path, &cli.overrides)?;
    let exp = validate(&config)?;
    for w in &exp.warnings {
        log::warn!("{w}");
    }
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(&config.output.dir));
    match cli.command {
        Command::Validate { .. } => {
            println!("{}: ok", path.display());
            for w in &exp.warnings {
                println!("warning: {w}");
            }
        }
        Command::Run { .. } => {
            let (report, csv) = run_to_dir(&exp, &out)?;
            println!("{} rows written to {}", report.rows.len(), csv.display());
        }
        Command::Dump { algorithm, .. } => {
            for p in dump_expansion(&exp, algorithm, &out)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}
