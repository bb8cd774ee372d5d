use std::io::{self, Write};

use mshot_core::control::status_name;
use mshot_core::{Model, SolveResult, SolveStatus, Statistics};

/// Writes models and verdicts in the usual solver output format.
pub struct Printer<W: Write> {
    out: W,
}

impl<W: Write> Printer<W> {
    pub fn new(out: W) -> Self {
        Printer { out }
    }

    pub fn into_inner(self) -> W {
        self.out
    }

    pub fn raw(&mut self, text: &str) -> io::Result<()> {
        self.out.write_all(text.as_bytes())
    }

    pub fn step(&mut self, step: i64) -> io::Result<()> {
        writeln!(self.out, "Step: {step}")
    }

    pub fn model(&mut self, m: &Model, optimize: bool) -> io::Result<()> {
        writeln!(self.out, "Answer: {}", m.number)?;
        writeln!(self.out, "{}", m.shown_strings().join(" "))?;
        if optimize {
            let costs: Vec<String> = m.cost.values_desc().iter().map(i64::to_string).collect();
            writeln!(self.out, "Optimization: {}", costs.join(" "))?;
        }
        Ok(())
    }

    pub fn verdict(&mut self, r: &SolveResult, optimize: bool) -> io::Result<()> {
        let line = if optimize && r.status == SolveStatus::Sat && r.optimum.is_some() {
            "OPTIMUM FOUND"
        } else {
            status_name(r.status)
        };
        writeln!(self.out, "{line}")
    }

    pub fn stats(&mut self, s: &Statistics) -> io::Result<()> {
        writeln!(self.out, "Models       : {}", s.models_found)?;
        writeln!(self.out, "Calls        : {}", s.solve_calls)?;
        writeln!(self.out, "Time         : {:.3}s", s.last_solve_time)?;
        writeln!(self.out, "Choices      : {}", s.choices)?;
        writeln!(self.out, "Conflicts    : {}", s.conflicts)?;
        writeln!(self.out, "Restarts     : {}", s.restarts)?;
        writeln!(self.out, "Rules        : {}", s.rules_ground)?;
        writeln!(self.out, "Atoms        : {}", s.atoms)
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }
}
