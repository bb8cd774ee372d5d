//! Command-line driver: single-shot solving, control scripts and the
//! incremental horizon loop.

mod output;
mod script;

use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use mshot_core::{Engine, EnumMode, GroundAtom, SolveOptions, SolveResult, SolveStatus, Term};
use thiserror::Error;

pub use output::Printer;
pub use script::{parse_script, Command, ScriptError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    Default,
    Inc,
    Script(PathBuf),
}

#[derive(Debug, Clone)]
pub struct CliConfig {
    pub files: Vec<PathBuf>,
    pub mode: Mode,
    pub consts: Vec<(String, Term)>,
    pub models: Option<usize>,
    pub enum_mode: Option<EnumMode>,
    pub seed: u64,
    /// Stop status of the incremental loop.
    pub istop: SolveStatus,
    pub iinit: i64,
    pub imax: Option<i64>,
    pub verbose: u8,
    pub dump_ground: bool,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            files: Vec::new(),
            mode: Mode::Default,
            consts: Vec::new(),
            models: None,
            enum_mode: None,
            seed: 0,
            istop: SolveStatus::Sat,
            iinit: 1,
            imax: None,
            verbose: 0,
            dump_ground: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: String, source: mshot_core::Error },
    #[error(transparent)]
    Engine(#[from] mshot_core::Error),
    #[error(transparent)]
    Script(#[from] ScriptError),
    #[error("incremental mode needs subprogram `{0}`")]
    MissingSubprogram(String),
    #[error("writing output: {0}")]
    Output(#[source] std::io::Error),
}

/// Exit status for a final solve status: 10 satisfiable, 20 unsatisfiable,
/// 0 otherwise.
pub fn exit_code(status: Option<SolveStatus>) -> u8 {
    match status {
        Some(SolveStatus::Sat) => 10,
        Some(SolveStatus::Unsat) => 20,
        _ => 0,
    }
}

/// Exit status for input and script errors.
pub const EXIT_INPUT_ERROR: u8 = 65;

/// One engine plus the output stream it reports to.
pub struct Runner<W: Write> {
    pub engine: Engine,
    pub printer: Printer<W>,
    cancel: Arc<AtomicBool>,
    dump_ground: bool,
    dumped: usize,
}

impl<W: Write> Runner<W> {
    pub fn new(config: &CliConfig, out: W, cancel: Arc<AtomicBool>) -> Result<Self, CliError> {
        let mut engine = Engine::new();
        for (name, value) in &config.consts {
            engine.set_const(name, value.clone());
        }
        let mut conf = format!("seed={}", config.seed);
        if let Some(n) = config.models {
            conf += &format!(" models={n}");
        }
        engine.set_conf(&conf, true)?;
        if let Some(mode) = config.enum_mode {
            engine.set_conf(&format!("enum-mode={}", enum_name(mode)), false)?;
        }
        Ok(Runner { engine, printer: Printer::new(out), cancel, dump_ground: config.dump_ground, dumped: 0 })
    }

    /// Reads and loads the input files; `-` or no files at all means stdin.
    pub fn load_files(&mut self, files: &[PathBuf]) -> Result<(), CliError> {
        let stdin = [PathBuf::from("-")];
        let files = if files.is_empty() { &stdin[..] } else { files };
        for f in files {
            let path = f.display().to_string();
            let text = if path == "-" {
                std::io::read_to_string(std::io::stdin())
                    .map_err(|source| CliError::Io { path: path.clone(), source })?
            } else {
                std::fs::read_to_string(f).map_err(|source| CliError::Io { path: path.clone(), source })?
            };
            self.engine.load(&text).map_err(|source| CliError::Input { path, source })?;
        }
        Ok(())
    }

    /// Flushes pending grounding, then solves and prints the models and the
    /// verdict.
    pub fn solve(&mut self, opts: SolveOptions) -> Result<SolveResult, CliError> {
        self.engine.flush()?;
        if self.dump_ground {
            let incs = &self.engine.store().increments()[self.dumped..];
            let text = mshot_core::grounder::dump_ground(incs.iter().map(|i| &i.unit), self.engine.store().atoms());
            self.dumped += incs.len();
            self.printer.raw(&text).map_err(CliError::Output)?;
        }
        let opts = SolveOptions { cancel: Some(Arc::clone(&self.cancel)), ..opts };
        let optimize = !self.engine.store().objective().is_empty();
        let printer = &mut self.printer;
        let mut err = None;
        let result = self.engine.solve(opts, |m| match printer.model(m, optimize) {
            Ok(()) => true,
            Err(e) => {
                err = Some(e);
                false
            }
        })?;
        if let Some(e) = err {
            return Err(CliError::Output(e));
        }
        self.printer.verdict(&result, optimize).map_err(CliError::Output)?;
        Ok(result)
    }

    pub fn stats(&mut self) -> Result<(), CliError> {
        let stats = self.engine.get_stats();
        self.printer.stats(&stats).map_err(CliError::Output)
    }
}

fn enum_name(mode: EnumMode) -> &'static str {
    match mode {
        EnumMode::First => "first",
        EnumMode::All => "all",
        EnumMode::Intersection => "intersection",
        EnumMode::Union => "union",
    }
}

/// Grounds and solves `base`.
pub fn run_default<W: Write>(config: &CliConfig, runner: &mut Runner<W>) -> Result<u8, CliError> {
    runner.load_files(&config.files)?;
    runner.engine.ground("base", vec![])?;
    let r = runner.solve(SolveOptions::default())?;
    finish(config, runner)?;
    Ok(exit_code(Some(r.status)))
}

/// Executes a control script against the loaded files.
pub fn run_script<W: Write>(config: &CliConfig, script: &str, runner: &mut Runner<W>) -> Result<u8, CliError> {
    runner.load_files(&config.files)?;
    let commands = parse_script(script)?;
    let mut last = None;
    for (line, cmd) in commands {
        let at = |e: CliError| -> CliError {
            match e {
                CliError::Engine(e) => ScriptError { line, message: e.to_string() }.into(),
                other => other,
            }
        };
        match cmd {
            Command::Ground(name, args) => runner.engine.ground(&name, args).map_err(|e| at(e.into()))?,
            Command::Assign(atom, value) => runner.engine.assign_external(&atom, value).map_err(|e| at(e.into()))?,
            Command::Release(atom) => runner.engine.release_external(&atom).map_err(|e| at(e.into()))?,
            Command::Solve { models, mode } => {
                let opts = SolveOptions { models, mode, ..Default::default() };
                let r = runner.solve(opts).map_err(at)?;
                last = Some(r.status);
                if r.status == SolveStatus::Interrupted {
                    break;
                }
            }
            Command::Add { name, params, text } => {
                let params: Vec<&str> = params.iter().map(String::as_str).collect();
                runner.engine.add(&name, &params, &text).map_err(|e| at(e.into()))?
            }
            Command::Conf { options, replace } => {
                runner.engine.set_conf(&options, replace).map_err(|e| at(e.into()))?
            }
            Command::Stats => runner.stats()?,
        }
    }
    finish(config, runner)?;
    Ok(exit_code(last))
}

/// The incremental loop: ground `base`, then for each step ground
/// `cumulative(step)`, assume `query(step)` and solve until the status
/// equals `istop`, releasing the query of every unsuccessful step.
pub fn run_inc<W: Write>(config: &CliConfig, runner: &mut Runner<W>) -> Result<u8, CliError> {
    runner.load_files(&config.files)?;
    if !runner.engine.subprograms().any(|d| d.name == "cumulative" && d.params.len() == 1) {
        return Err(CliError::MissingSubprogram("cumulative/1".into()));
    }
    runner.engine.ground("base", vec![])?;
    let mut step = config.iinit;
    let mut last = None;
    loop {
        if config.imax.is_some_and(|max| step > max) {
            break;
        }
        runner.printer.step(step).map_err(CliError::Output)?;
        runner.engine.ground("cumulative", vec![Term::Integer(step)])?;
        let query = GroundAtom::new("query", vec![Term::Integer(step)]);
        runner.engine.assign_external(&query, true)?;
        let r = runner.solve(SolveOptions::default())?;
        last = Some(r.status);
        if r.status == config.istop || r.status == SolveStatus::Interrupted {
            break;
        }
        runner.engine.release_external(&query)?;
        step += 1;
    }
    finish(config, runner)?;
    Ok(exit_code(last))
}

fn finish<W: Write>(config: &CliConfig, runner: &mut Runner<W>) -> Result<(), CliError> {
    if config.verbose > 0 {
        runner.stats()?;
    }
    runner.printer.flush().map_err(CliError::Output)
}

/// Runs `config` to completion, writing to `out`. Errors are returned to the
/// caller, which maps them to [`EXIT_INPUT_ERROR`].
pub fn run<W: Write>(config: &CliConfig, out: W, cancel: Arc<AtomicBool>) -> Result<u8, CliError> {
    let mut runner = Runner::new(config, out, cancel)?;
    match &config.mode {
        Mode::Default => run_default(config, &mut runner),
        Mode::Inc => run_inc(config, &mut runner),
        Mode::Script(path) => {
            let script = std::fs::read_to_string(path)
                .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
            run_script(config, &script, &mut runner)
        }
    }
}
