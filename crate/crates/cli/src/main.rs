use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stieltjes_cli::dsl::{parse_jobs, Command};
use stieltjes_cli::run::{run, Outcome};

#[derive(Parser)]
#[command(name = "stieltjes", version, about = "Young, Dushnik and Kurzweil-Stieltjes integrals of regulated functions")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Integrate f against g.
    Integrate(JobArgs),
    /// Check K = Y and both integration-by-parts identities.
    VerifyMain(JobArgs),
    /// Check the sum and integral estimates on a sampled partition.
    VerifyBounds(JobArgs),
    /// Evaluate the integral by brute force from its definition.
    Oracle(JobArgs),
}

#[derive(Args)]
struct JobArgs {
    /// Emit one JSON object per job.
    #[arg(long)]
    json: bool,
    /// Overrides the tolerance of every job.
    #[arg(long)]
    tol: Option<f64>,
    /// Overrides the seed of every job.
    #[arg(long)]
    seed: Option<u64>,
    /// Read jobs from a file, one per line.
    #[arg(long, conflicts_with = "job")]
    spec: Option<PathBuf>,
    /// Inline job, e.g. `kind=K f=affine[0,1]{slope:1} g=step[0,1]{...}`.
    #[arg(required_unless_present = "spec", num_args = 1..)]
    job: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Integrate(a) => (Command::Integrate, a),
        Sub::VerifyMain(a) => (Command::VerifyMain, a),
        Sub::VerifyBounds(a) => (Command::VerifyBounds, a),
        Sub::Oracle(a) => (Command::Oracle, a),
    };
    let outcomes = execute(command, &args);
    let mut stdout = std::io::stdout().lock();
    for o in &outcomes {
        let text = if args.json { format!("{}\n", o.to_json()) } else { o.to_human() };
        // a closed pipe is not worth a panic
        if stdout.write_all(text.as_bytes()).is_err() {
            break;
        }
    }
    let code = outcomes.iter().map(|o| o.exit_code).max().unwrap_or(0);
    ExitCode::from(code as u8)
}

fn execute(command: Command, args: &JobArgs) -> Vec<Outcome> {
    let text = match &args.spec {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return vec![Outcome::usage_error(Some(command), format!("{}: {e}", path.display()))],
        },
        None => args.job.join(" "),
    };
    if let Some(tol) = args.tol.filter(|t| !(*t > 0.0)) {
        return vec![Outcome::usage_error(Some(command), format!("tolerance must be positive, got {tol}"))];
    }
    let mut jobs = match parse_jobs(&text, Some(command)) {
        Ok(jobs) if jobs.is_empty() => return vec![Outcome::usage_error(Some(command), "no job given")],
        Ok(jobs) => jobs,
        Err(e) => return vec![Outcome::usage_error(Some(command), e.to_string())],
    };
    for job in &mut jobs {
        if let Some(tol) = args.tol {
            job.tol = tol;
        }
        if let Some(seed) = args.seed {
            job.seed = seed;
        }
    }
    jobs.iter().map(run).collect()
}
