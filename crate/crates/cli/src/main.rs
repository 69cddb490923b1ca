mod commands;
mod exit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "ottr", version, about = "Check a plain-text course and publish it as a book site, a Leanpub manuscript and Coursera embed pages")]
struct Cli {
    /// More log output on stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    /// Only log errors.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create a starter course.
    New {
        dest: PathBuf,
        #[arg(long, default_value = "My Course")]
        title: String,
    },
    /// Check the course and render the requested targets.
    Build(BuildArgs),
    /// Run the enabled checks and write reports/check_report.{md,json}.
    Check(CheckArgs),
    /// Quiz file tools.
    #[command(subcommand)]
    Quiz(QuizCommand),
    /// Bring template-owned files up to date with the upstream template.
    Sync(SyncArgs),
}

#[derive(Args)]
struct CourseArgs {
    /// Course directory, or the path of its `_ottr.yml`.
    #[arg(long, default_value = ".")]
    config: PathBuf,
}

#[derive(Args)]
struct ProbeArgs {
    /// Offline URL statuses: lines of `<url> <status>`.
    #[arg(long, value_name = "FILE")]
    url_fixture: Option<PathBuf>,
    /// Seconds before a URL probe gives up.
    #[arg(long, default_value_t = 10)]
    url_timeout: u64,
    /// Extra attempts for a failing URL.
    #[arg(long, default_value_t = 1)]
    url_retries: u32,
    /// Concurrent URL probes.
    #[arg(long, default_value_t = 8)]
    url_parallelism: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    Site,
    Leanpub,
    Coursera,
    All,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    course: CourseArgs,
    /// Targets to render (repeatable); `all` means every target in the manifest.
    #[arg(long, value_enum, default_value = "all")]
    target: Vec<TargetArg>,
    /// Output root; defaults to `<course>/_output`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Render even if checks fail.
    #[arg(long)]
    force: bool,
    /// Build clock in epoch seconds, for byte-stable output.
    #[arg(long, env = "OTTR_BUILD_EPOCH")]
    timestamp: Option<i64>,
    /// Site URL that Coursera embed pages point at; overrides `base_url`.
    #[arg(long)]
    base_url: Option<String>,
    /// Resolve `slides://deck/slide` images to `<dir>/<deck>/<slide>.png` instead of Google Slides URLs.
    #[arg(long, value_name = "DIR")]
    slides_dir: Option<String>,
    #[command(flatten)]
    probe: ProbeArgs,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    course: CourseArgs,
    /// Comma-separated subset of checks: spelling, urls, quizzes, alt_text.
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    /// Report clock in epoch seconds.
    #[arg(long, env = "OTTR_BUILD_EPOCH")]
    timestamp: Option<i64>,
    #[arg(long, value_name = "DIR")]
    slides_dir: Option<String>,
    #[command(flatten)]
    probe: ProbeArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuizFormat {
    Coursera,
}

#[derive(Subcommand)]
enum QuizCommand {
    /// Print the quiz-bank entry for one quiz file on stdout.
    Convert {
        input: PathBuf,
        #[arg(long, value_enum)]
        to: QuizFormat,
    },
    /// Report format problems as `path:line: severity[code]: message` on stderr.
    Lint {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct SyncArgs {
    #[command(flatten)]
    course: CourseArgs,
    /// Template location (path or git URL); defaults to `sync.upstream`.
    #[arg(long)]
    upstream: Option<String>,
    /// Show the changes without touching files.
    #[arg(long, conflicts_with = "apply")]
    dry_run: bool,
    /// Write the changes.
    #[arg(long)]
    apply: bool,
    /// With --apply, apply this saved patchset.json instead of computing one.
    #[arg(long, value_name = "FILE", requires = "apply")]
    patchset: Option<PathBuf>,
    /// Save the computed patchset as FILE (JSON) and FILE with a .diff extension.
    #[arg(long, value_name = "FILE")]
    patchset_out: Option<PathBuf>,
}

fn init_logging(verbose: u8, quiet: bool) {
    let level = match (quiet, verbose) {
        (true, _) => log::LevelFilter::Error,
        (false, 0) => log::LevelFilter::Warn,
        (false, 1) => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .format_target(false)
        .parse_env("OTTR_LOG")
        .init();
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.verbose, cli.quiet);
    let result = match cli.command {
        Command::New { dest, title } => commands::new(&dest, &title),
        Command::Build(args) => commands::build(args),
        Command::Check(args) => commands::check(args),
        Command::Quiz(QuizCommand::Convert { input, to: QuizFormat::Coursera }) => commands::quiz_convert(&input),
        Command::Quiz(QuizCommand::Lint { inputs }) => commands::quiz_lint(&inputs),
        Command::Sync(args) => commands::sync(args),
    };
    match result {
        Ok(status) => status.into(),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.status.into()
        }
    }
}
