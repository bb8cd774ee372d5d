//! Multi-shot answer set programming.
//!
//! Programs are split into parameterised subprograms (`#program name(k).`)
//! that are grounded on request and joined into one growing ground program.
//! Between solve calls, `#external` atoms can be assigned or released, which
//! lets a controlling loop extend a planning horizon step by step without
//! regrounding or restarting anything.
//!
//! ```
//! use mshot_core::{Engine, SolveOptions, Term};
//!
//! let mut engine = Engine::new();
//! engine.load("a(1). #program acid(k). b(k). #program base. a(2).").unwrap();
//! engine.ground("acid", vec![Term::Integer(42)]).unwrap();
//! let mut shown = Vec::new();
//! engine.solve(SolveOptions::default(), |m| { shown = m.shown_strings(); true }).unwrap();
//! assert_eq!(shown, ["b(42)"]);
//! ```

pub mod control;
pub mod graph;
pub mod grounder;
pub mod solver;
pub mod store;
pub mod syntax;

use thiserror::Error;

pub use control::{Config, Engine, Error, Model, SolveHandle, SolveOptions, Statistics};
pub use grounder::{GroundAtom, GroundError, GroundHead, GroundLiteral, GroundRule, GroundUnit, MinimizeEntry};
pub use solver::{compare_costs, CostVector, EnumMode, SolveResult, SolveStatus, SolverProgram};
pub use store::{AtomId, AtomTable, ExternalState, Store, StoreError};
pub use syntax::{parse_program, ParseError, Signature, SubprogramDef, SyntaxError, Term};

/// Non-fatal diagnostics collected while grounding and joining.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Warning {
    #[error("constant `{name}` is shadowed by a parameter of subprogram `{subprogram}`")]
    ConstShadowed { name: String, subprogram: String },
    #[error("condition of {context} for `{atom}` is not fixed by facts")]
    ConditionNotDomain { atom: String, context: String },
    #[error("external atom `{atom}` is now defined by rules")]
    ExternalDefined { atom: String },
}
