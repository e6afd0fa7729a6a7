use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use pencil_cli::commands::load_config;
use pencil_cli::{run, Command, Num, RunOptions};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    /// Sample the surface grid and write OBJ mesh and CSV report.
    Build,
    /// Check the D-type condition along the curve and write the CSV report.
    Verify,
    /// Report whether the curve is planar, a helix, Salkowski or anti-Salkowski.
    Classify,
    /// Emit a config whose marching scale realizes the requested constant.
    Synthesize,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Build => Command::Build,
            CommandArg::Verify => Command::Verify,
            CommandArg::Classify => Command::Classify,
            CommandArg::Synthesize => Command::Synthesize,
        }
    }
}

/// Surface pencils with a common D-type curve.
///
/// Exit codes: 0 success, 1 not D-type (verify), 2 invalid input,
/// 3 infeasible constant, 4 numerical or output failure.
#[derive(Debug, Parser)]
#[command(name = "pencil", version)]
struct Cli {
    #[arg(value_enum)]
    command: CommandArg,
    /// Bundled scene, e.g. example1 .. example4.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Path to a JSON scene config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Verification tolerance (default 1e-8 for unit-speed curves, 1e-6 otherwise).
    #[arg(long)]
    tol: Option<f64>,
    /// Number of curve samples used for verification and classification.
    #[arg(long)]
    samples: Option<usize>,
    /// Output directory for OBJ and CSV files.
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
    /// Override the target constant; accepts expressions such as sqrt(3)/2.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Override the sign of the binormal coefficient (1 or -1).
    #[arg(long, allow_hyphen_values = true)]
    sign: Option<f64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let opts = RunOptions {
        tol: cli.tol,
        samples: cli.samples,
        out_dir: cli.out,
        c: cli.c.map(Num::Expr),
        sign: cli.sign,
    };
    let result = load_config(cli.preset.as_deref(), cli.config.as_deref())
        .and_then(|cfg| run(cli.command.into(), cfg, &opts));
    match result {
        Ok(outcome) => {
            println!("{}", serde_json::to_string_pretty(&outcome.stdout).expect("JSON output"));
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("pencil: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
