use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use mshot_cli::{CliConfig, Mode, EXIT_INPUT_ERROR};
use mshot_core::control::parse_enum_mode;
use mshot_core::syntax::parse_term;
use mshot_core::SolveStatus;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Default,
    Inc,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StopArg {
    Sat,
    Unsat,
}

/// Multi-shot answer set solver.
#[derive(Parser, Debug)]
#[command(name = "mshot", version)]
struct Args {
    /// Input files; standard input when none are given.
    files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "default")]
    mode: ModeArg,
    /// Control script to run instead of the default mode.
    #[arg(long, value_name = "FILE")]
    script: Option<PathBuf>,
    /// Constant override, `name=term`.
    #[arg(long = "const", value_name = "NAME=TERM")]
    consts: Vec<String>,
    /// Number of models, 0 for all.
    #[arg(long)]
    models: Option<usize>,
    /// first, all, intersection (cautious) or union (brave).
    #[arg(long = "enum")]
    enum_mode: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "sat")]
    istop: StopArg,
    #[arg(long, default_value_t = 1)]
    iinit: i64,
    #[arg(long)]
    imax: Option<i64>,
    /// Print the ground program before solving.
    #[arg(long)]
    dump_ground: bool,
    #[arg(short, action = clap::ArgAction::Count)]
    verbose: u8,
}

fn config(args: Args) -> Result<CliConfig> {
    let mut consts = Vec::new();
    for c in &args.consts {
        let (name, value) = c.split_once('=').with_context(|| format!("expected NAME=TERM, got `{c}`"))?;
        let term = parse_term(value).with_context(|| format!("constant `{name}`"))?;
        consts.push((name.trim().to_string(), term));
    }
    let enum_mode = match &args.enum_mode {
        Some(m) => match parse_enum_mode(m) {
            Some(mode) => Some(mode),
            None => bail!("unknown enumeration mode `{m}`"),
        },
        None => None,
    };
    let mode = match (args.script, args.mode) {
        (Some(path), ModeArg::Default) => Mode::Script(path),
        (Some(_), ModeArg::Inc) => bail!("--script cannot be combined with --mode=inc"),
        (None, ModeArg::Default) => Mode::Default,
        (None, ModeArg::Inc) => Mode::Inc,
    };
    Ok(CliConfig {
        files: args.files,
        mode,
        consts,
        models: args.models,
        enum_mode,
        seed: args.seed,
        istop: match args.istop {
            StopArg::Sat => SolveStatus::Sat,
            StopArg::Unsat => SolveStatus::Unsat,
        },
        iinit: args.iinit,
        imax: args.imax,
        verbose: args.verbose,
        dump_ground: args.dump_ground,
    })
}

fn main() -> ExitCode {
    let config = match config(Args::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_INPUT_ERROR);
        }
    };
    let cancel = Arc::new(AtomicBool::new(false));
    let flag = Arc::clone(&cancel);
    if let Err(e) = ctrlc::set_handler(move || flag.store(true, Ordering::SeqCst)) {
        eprintln!("warning: cannot install interrupt handler: {e}");
    }
    let stdout = std::io::stdout().lock();
    match mshot_cli::run(&config, stdout, cancel) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}
