use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use aeta_lab::experiment::{load_config, run, verify, write_report, ExperimentConfig, Format};
use aeta_lab::Error;

/// Cryptanalysis laboratory for the alpha-eta quantum-noise stream cipher.
#[derive(Parser)]
#[command(name = "aeta-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its CSV/JSON report.
    Run(RunArgs),
    /// Validate a config and print derived quantities without running it.
    Verify(ConfigArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set noise.kind=truncated`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Master seed (overrides `master_seed`).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Worker threads; results do not depend on this.
    #[arg(long, env = "AETA_LAB_WORKERS")]
    workers: Option<usize>,
    /// Output directory (overrides `output`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Both)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Both,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
            FormatArg::Both => Format::Both,
        }
    }
}

fn resolve(args: &ConfigArgs) -> Result<ExperimentConfig, Error> {
    let mut config = load_config(args.config.as_deref(), &args.overrides)?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    Ok(config)
}

fn fail(e: &Error) -> ExitCode {
    let report = json!({"error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code()});
    eprintln!("{report}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify(args) => {
            let config = match resolve(&args) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let report = verify(&config);
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            ExitCode::from(report.exit_code() as u8)
        }
        Command::Run(args) => {
            let result = resolve(&args.config).and_then(|mut config| {
                if let Some(out) = &args.out {
                    config.output = out.display().to_string();
                }
                if args.workers == Some(0) {
                    return Err(Error::InvalidParameter("--workers must be positive".into()));
                }
                let report = run(&config, args.workers)?;
                let files = write_report(&report, config.output.as_ref(), args.format.into())?;
                Ok((report, files))
            });
            match result {
                Ok((report, files)) => {
                    let files: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
                    println!(
                        "{}",
                        json!({"quantity": report.quantity.name(), "params_hash": report.params_hash, "files": files})
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
    }
}
