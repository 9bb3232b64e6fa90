use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use aiot_cli::config::{process_env, ScenarioConfig};
use aiot_cli::{describe, run_file};

#[derive(Parser)]
#[command(name = "aiot", version, about = "Ambient-IoT backscatter link and network experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment in CONFIG and write its CSV.
    Run {
        config: PathBuf,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV path; defaults to the config's `output`, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print every resolved parameter of CONFIG.
    Describe { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let env = process_env();
    let result = match cli.command {
        Command::Run { config, seed, out } => run_file(&config, seed, out, &env).map(|(path, res)| {
            match path {
                Some(p) => println!("{} -> {}", res.summary, p.display()),
                None => {
                    print!("{}", res.csv);
                    eprintln!("{}", res.summary);
                }
            }
        }),
        Command::Describe { config } => {
            ScenarioConfig::load(&config, &env).and_then(|cfg| describe(&cfg)).map(|s| print!("{s}"))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("aiot: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
