//! End-to-end unsatisfiability check of an SMT-LIB string script.

use thiserror::Error;

use crate::abstraction::{abstract_script, select_predicates, Abstraction, AbstractionOpts, PredicateMode};
use crate::smtlib::{parse_script, FrontendError};
use crate::solver::{emit_smt2, solve, SolveResult, SolverConfig, SolverError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("solver timed out")]
    Timeout,
}

#[derive(Debug, Clone, Default)]
pub struct CheckOpts {
    pub mode: PredicateMode,
    pub abstraction: AbstractionOpts,
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Unsat,
    /// Carries the reason no conclusion was drawn.
    Unknown(String),
}

impl Verdict {
    /// The verdict line printed by the command-line tool.
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Unsat => "unsat",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub warnings: Vec<String>,
    pub num_predicates: usize,
    pub num_vars: usize,
    pub smt2: String,
}

/// Parses `text` and abstracts it over the predicates selected by `mode`.
pub fn abstract_text(text: &str, mode: PredicateMode, opts: AbstractionOpts) -> Result<Abstraction, FrontendError> {
    let script = parse_script(text)?;
    let psi = select_predicates(&script, mode);
    Ok(abstract_script(&script, psi, opts))
}

pub fn check_script(text: &str, opts: &CheckOpts) -> Result<CheckReport, PipelineError> {
    let abs = abstract_text(text, opts.mode, opts.abstraction)?;
    let smt2 = emit_smt2(&abs.formula);
    let verdict = match solve(&smt2, &opts.solver)? {
        SolveResult::Unsat => Verdict::Unsat,
        SolveResult::Sat(_) => Verdict::Unknown("abstraction is satisfiable".into()),
        SolveResult::Unknown => Verdict::Unknown("solver returned unknown".into()),
        SolveResult::Timeout => return Err(PipelineError::Timeout),
    };
    Ok(CheckReport {
        verdict,
        warnings: abs.warnings,
        num_predicates: abs.psi.len(),
        num_vars: abs.formula.vars.len(),
        smt2,
    })
}
