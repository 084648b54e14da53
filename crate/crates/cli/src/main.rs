mod commands;
mod config;
mod output;
mod verify;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use config::{OutputFormat, RunConfig, Section};
use output::Output;

#[derive(Parser, Debug)]
#[command(
    name = "eisenlab",
    version,
    about = "Verification suites and sweeps for the Eisenstein fourth-moment lab"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format (`--out` is accepted as well)
    #[arg(long, global = true, alias = "out", value_enum)]
    format: Option<OutputFormat>,

    /// Worker threads
    #[arg(long, global = true, env = "EISENLAB_THREADS")]
    threads: Option<usize>,

    /// Seed for pseudo-random test points
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// `key = value` file with [verify] and [sweep] sections
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write to this file instead of stdout
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the registered identity checks
    Verify(commands::VerifyArgs),
    /// Tabulate predictors or pipeline values over a list of levels
    Sweep(commands::SweepArgs),
    /// Recipe-side evaluations
    #[command(subcommand)]
    Recipe(commands::RecipeCmd),
    /// Cusp-zone pipeline for the (cleaned) fourth moment
    #[command(subcommand)]
    Moment(commands::MomentCmd),
    /// Eisenstein series values
    #[command(subcommand)]
    Eis(commands::EisCmd),
    /// Γ₀(N) geometry
    #[command(subcommand)]
    Geom(commands::GeomCmd),
    /// Dirichlet L-values
    Lvalue(commands::LvalueArgs),
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn init_pool(threads: usize) -> Result<()> {
    if threads == 0 {
        bail!("thread count must be positive");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("building the worker pool")
}

fn common_overrides(cli: &Cli) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    if let Some(f) = cli.format {
        m.insert("format".into(), f.to_string());
    }
    if let Some(t) = cli.threads {
        m.insert("threads".into(), t.to_string());
    }
    if let Some(s) = cli.seed {
        m.insert("seed".into(), s.to_string());
    }
    m
}

fn run(cli: &Cli) -> Result<(Output, OutputFormat)> {
    let configured = |section: Section, extra: BTreeMap<String, String>| -> Result<RunConfig> {
        let mut over = common_overrides(cli);
        over.extend(extra);
        let cfg = RunConfig::resolve(section, cli.config.as_deref(), over, default_threads())?;
        init_pool(cfg.thread_count)?;
        Ok(cfg)
    };
    match &cli.command {
        Command::Verify(a) => {
            let cfg = configured(Section::Verify, a.overrides())?;
            Ok((commands::verify(&cfg, &a.only)?, cfg.output_format))
        }
        Command::Sweep(a) => {
            let cfg = configured(Section::Sweep, a.overrides())?;
            Ok((commands::sweep(&cfg)?, cfg.output_format))
        }
        other => {
            if cli.config.is_some() {
                bail!("--config applies to verify and sweep only");
            }
            init_pool(cli.threads.unwrap_or_else(default_threads))?;
            let out = match other {
                Command::Recipe(c) => commands::recipe(c)?,
                Command::Moment(c) => commands::moment(c)?,
                Command::Eis(c) => commands::eis(c)?,
                Command::Geom(c) => commands::geom(c)?,
                Command::Lvalue(a) => commands::lvalue(a)?,
                Command::Verify(_) | Command::Sweep(_) => unreachable!(),
            };
            Ok((out, cli.format.unwrap_or_default()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, format)) => {
            let text = out.render(format);
            let written = match &cli.output {
                Some(p) => std::fs::write(p, &text).with_context(|| format!("writing {}", p.display())),
                None => std::io::stdout().write_all(text.as_bytes()).context("writing stdout"),
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if out.pass == Some(false) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
