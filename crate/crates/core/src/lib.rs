//! Predicate-counting (Parikh image) abstractions of symbolic automata and
//! parametric context-free grammars, and their use as a fast unsatisfiability
//! filter for SMT-LIB string constraints.
//!
//! The pipeline for string constraints is
//!
//! 1. [`smtlib::parse_script`] reads a QF_SLIA script,
//! 2. [`abstraction::select_predicates`] picks the counted predicates,
//! 3. [`abstraction::abstract_script`] replaces every string by a vector of
//!    predicate counts, using [`symbolic_parikh::build_phi_regex`] for regular
//!    membership,
//! 4. [`solver::emit_smt2`] and [`solver::solve`] hand the resulting linear
//!    arithmetic formula to an external SMT solver.
//!
//! An unsatisfiable abstraction proves the original script unsatisfiable; a
//! satisfiable one proves nothing, so the tool only ever answers `unsat` or
//! `unknown`.

pub mod abstraction;
pub mod ast;
pub mod cfg;
pub mod charset;
pub mod formula;
pub mod guard;
pub mod oracle;
pub mod param_grammar;
pub mod param_pushdown;
pub mod parikh_core;
pub mod pipeline;
pub mod regex;
pub mod sexp;
pub mod sfa;
pub mod smtlib;
pub mod solver;
pub mod symbolic_parikh;
pub mod wordeq;

pub use charset::{CharPred, MAX_CHAR};
pub use formula::{Formula, LinFormula, Sort, Term, Var, VarTable};
pub use regex::Regex;
pub use sfa::Sfa;
