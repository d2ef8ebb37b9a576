//! Thin command-line front end over [`caustic_forge::scenario`].
//!
//! Exit codes: 0 on success, 2 for configuration problems (bad flags, bad
//! JSON, invalid scenario), 3 for numerical failures.  Errors go to stderr
//! as one JSON object with `error` and `kind` fields.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use caustic_forge::scenario::{Runner, Scenario};

#[derive(Parser)]
#[command(
    name = "caustic-forge",
    version,
    about = "Light-ray billiards in convex mirrors: caustics, invariant checks, \
             curve-shortening flow, wave fronts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate beams and extract caustics with cusp reports
    Caustic(RunArgs),
    /// Run the invariant checks and write one pass/fail report
    Check(RunArgs),
    /// Shorten the reflected curve to a geodesic, with monitors
    Flow(RunArgs),
    /// Build wave fronts and cross-check vertices against cusps
    Front(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON file
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing)
    #[arg(long)]
    out: PathBuf,
    /// Override a scenario field: dot.path=json-value (repeatable)
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (&RunArgs, fn(&Runner) -> caustic_forge::Result<bool>) =
        match &cli.command {
            Command::Caustic(a) => (a, |r| r.run_caustic().map(|_| true)),
            Command::Check(a) => (a, |r| r.run_check().map(|rep| rep.pass)),
            Command::Flow(a) => (a, |r| r.run_flow().map(|_| true)),
            Command::Front(a) => (a, |r| r.run_front().map(|_| true)),
        };
    let outcome = Scenario::load(&args.config, &args.overrides)
        .and_then(|scenario| Runner::new(scenario, &args.out))
        .and_then(|runner| run(&runner));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("{{\"error\":\"one or more checks failed\",\"kind\":\"checks_failed\"}}");
            ExitCode::from(3)
        }
        Err(e) => {
            let message = serde_json::json!({
                "error": e.to_string(),
                "kind": e.kind(),
            });
            eprintln!("{message}");
            ExitCode::from(e.exit_code())
        }
    }
}
