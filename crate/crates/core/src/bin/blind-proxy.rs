use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use blind_proxy::agents::Role;
use blind_proxy::cli::{cmd_run, cmd_validate, OutputFormat, RunOptions, Sweep, ValidateOptions};
use blind_proxy::ElectoralMode;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    version,
    about = "Blind proxy voting: run scenarios, sweep seeds, desk-check ballots"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Write data here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also emit what a role saw: ra, ec, public or proxy:<name>. Repeatable.
    #[arg(long = "view", value_parser = |s: &str| s.parse::<Role>())]
    views: Vec<Role>,
    /// Also emit the full event trace.
    #[arg(long)]
    trace: bool,
    /// Also emit each voter's ground-truth outcome.
    #[arg(long)]
    truth: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario.
    Run {
        scenario: PathBuf,
        /// Use this seed instead of the one in the file.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Run a scenario over consecutive seeds.
    Sweep {
        scenario: PathBuf,
        #[arg(long, default_value_t = 0)]
        start: u64,
        #[arg(long)]
        count: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Match grid/grille pairs or ballot files and print a verdict for each.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Candidate names, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        candidates: Vec<String>,
        #[arg(long, default_value_t = 1)]
        seats: u32,
        #[arg(long, value_enum, default_value_t = Mode::Subset)]
        mode: Mode,
        /// Check the position-sum fingerprint too.
        #[arg(long)]
        embellishment: bool,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Mode {
    Subset,
    FirstPastThePost,
    PluralityAtLarge,
}

impl From<Mode> for ElectoralMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Subset => ElectoralMode::Subset,
            Mode::FirstPastThePost => ElectoralMode::FirstPastThePost,
            Mode::PluralityAtLarge => ElectoralMode::PluralityAtLarge,
        }
    }
}

fn run_options(scenario: PathBuf, seed: Option<u64>, sweep: Option<Sweep>, output: Output) -> RunOptions {
    RunOptions {
        scenario_path: scenario,
        seed_override: seed,
        sweep,
        output_format: output.format,
        output_path: output.output,
        emit_views: output.views,
        emit_trace: output.trace,
        emit_truth: output.truth,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    let code = match cli.command {
        Command::Run { scenario, seed, output } => {
            cmd_run(&run_options(scenario, seed, None, output), &mut out, &mut err)
        }
        Command::Sweep {
            scenario,
            start,
            count,
            output,
        } => cmd_run(
            &run_options(scenario, None, Some(Sweep { start, count }), output),
            &mut out,
            &mut err,
        ),
        Command::Validate {
            files,
            candidates,
            seats,
            mode,
            embellishment,
            format,
        } => cmd_validate(
            &ValidateOptions {
                files,
                candidates,
                seats,
                mode: mode.into(),
                embellishment,
                output_format: format,
            },
            &mut out,
            &mut err,
        ),
    };
    ExitCode::from(code as u8)
}
