//! SMT-LIB2 emission of [`LinFormula`] and a subprocess driver for external
//! solvers.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{Read, Write as _};
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::charset::CharPred;
use crate::formula::{Assignment, Formula, LinFormula, Sort, Term, VarTable};
use crate::sexp::{self, Sexp};

pub const DEFAULT_SOLVER: &str = "smt-solver";
pub const SOLVER_ENV: &str = "SYMPARIKH_SOLVER";

/// Solvers tried, in order, when the default command is not on `PATH`.
const FALLBACK_SOLVERS: &[&str] = &["z3", "cvc5"];

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("failed to run solver `{cmd}`: {source}")]
    Spawn { cmd: String, source: std::io::Error },
    #[error("solver I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver produced no result (exit status {status}): {detail}")]
    NoResult { status: String, detail: String },
    #[error("cannot parse solver model: {0}")]
    Model(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Model),
    Unsat,
    Unknown,
    Timeout,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveResult::Unsat)
    }
}

/// Integer bindings reported by the solver, keyed by symbol name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    pub values: HashMap<String, i64>,
}

impl Model {
    pub fn get(&self, name: &str) -> Option<i64> {
        self.values.get(name).copied()
    }

    /// Bindings for the variables of `table` that the model mentions.
    pub fn to_assignment(&self, table: &VarTable) -> Assignment {
        table
            .iter()
            .filter_map(|(v, info)| self.values.get(&info.name).map(|&x| (v, x)))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Executable followed by extra arguments; the script path is appended.
    pub command: Vec<String>,
    pub timeout: Duration,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::from_env(None)
    }
}

impl SolverConfig {
    /// Resolves the command from an explicit flag, then `SYMPARIKH_SOLVER`,
    /// then the default name. When the default is not installed, the first of
    /// `z3`, `cvc5` found on `PATH` is used.
    pub fn from_env(explicit: Option<&str>) -> Self {
        let cmdline = explicit
            .map(str::to_string)
            .or_else(|| std::env::var(SOLVER_ENV).ok().filter(|s| !s.trim().is_empty()));
        let command = match cmdline {
            Some(s) => s.split_whitespace().map(str::to_string).collect(),
            None => {
                let name = std::iter::once(DEFAULT_SOLVER)
                    .chain(FALLBACK_SOLVERS.iter().copied())
                    .find(|n| on_path(n))
                    .unwrap_or(DEFAULT_SOLVER);
                vec![name.to_string()]
            }
        };
        SolverConfig { command, timeout: Duration::from_secs(30) }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }
}

fn on_path(name: &str) -> bool {
    std::env::var_os("PATH").is_some_and(|paths| {
        std::env::split_paths(&paths).any(|dir| is_executable(&dir.join(name)))
    })
}

fn is_executable(p: &Path) -> bool {
    use std::os::unix::fs::PermissionsExt;
    p.metadata()
        .map(|m| m.is_file() && m.permissions().mode() & 0o111 != 0)
        .unwrap_or(false)
}

fn write_int(out: &mut String, c: i64) {
    if c < 0 {
        let _ = write!(out, "(- {})", c.unsigned_abs());
    } else {
        let _ = write!(out, "{c}");
    }
}

fn write_term(out: &mut String, t: &Term, table: &VarTable) {
    match t {
        Term::Const(c) => write_int(out, *c),
        Term::Var(v) => out.push_str(table.name(*v)),
        Term::Add(ts) => {
            out.push_str("(+");
            for t in ts {
                out.push(' ');
                write_term(out, t, table);
            }
            out.push(')');
        }
        Term::Mul(k, t) => {
            out.push_str("(* ");
            write_int(out, *k);
            out.push(' ');
            write_term(out, t, table);
            out.push(')');
        }
        Term::Ite(c, a, b) => {
            out.push_str("(ite ");
            write_formula(out, c, table);
            out.push(' ');
            write_term(out, a, table);
            out.push(' ');
            write_term(out, b, table);
            out.push(')');
        }
    }
}

fn write_pred(out: &mut String, p: &CharPred, t: &Term, table: &VarTable) {
    let mut subject = String::new();
    write_term(&mut subject, t, table);
    let iv = p.intervals();
    if iv.len() > 1 {
        out.push_str("(or");
    }
    for &(lo, hi) in iv {
        if iv.len() > 1 {
            out.push(' ');
        }
        if lo == hi {
            let _ = write!(out, "(= {subject} {lo})");
        } else {
            let _ = write!(out, "(and (<= {lo} {subject}) (<= {subject} {hi}))");
        }
    }
    if iv.len() > 1 {
        out.push(')');
    }
}

fn write_formula(out: &mut String, f: &Formula, table: &VarTable) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Cmp(op, a, b) => {
            let _ = write!(out, "({} ", op.smt_name());
            write_term(out, a, table);
            out.push(' ');
            write_term(out, b, table);
            out.push(')');
        }
        Formula::PredHolds(p, t) => {
            if p.is_empty() {
                out.push_str("false");
            } else {
                write_pred(out, p, t, table);
            }
        }
        Formula::Not(g) => {
            out.push_str("(not ");
            write_formula(out, g, table);
            out.push(')');
        }
        Formula::And(fs) | Formula::Or(fs) => {
            out.push_str(if matches!(f, Formula::And(_)) { "(and" } else { "(or" });
            for g in fs {
                out.push(' ');
                write_formula(out, g, table);
            }
            out.push(')');
        }
    }
}

/// Renders a single formula with the variable names of `table`.
pub fn formula_to_smt2(f: &Formula, table: &VarTable) -> String {
    let mut s = String::new();
    write_formula(&mut s, f, table);
    s
}

fn emit(f: &LinFormula, want_model: bool) -> String {
    let mut out = String::new();
    if want_model {
        out.push_str("(set-option :produce-models true)\n");
    }
    out.push_str("(set-logic QF_LIA)\n");
    for (_, info) in f.vars.iter() {
        let _ = writeln!(out, "(declare-const {} Int)", info.name);
    }
    for (_, info) in f.vars.iter() {
        let name = &info.name;
        match (info.sort.lower(), info.sort.upper()) {
            (Some(lo), Some(hi)) => {
                let _ = writeln!(out, "(assert (and (<= {lo} {name}) (<= {name} {hi})))");
            }
            (Some(lo), None) => {
                let _ = writeln!(out, "(assert (>= {name} {lo}))");
            }
            _ => debug_assert_eq!(info.sort, Sort::Int),
        }
    }
    let conjuncts: Vec<&Formula> = match &f.body {
        Formula::And(fs) => fs.iter().collect(),
        g => vec![g],
    };
    for g in conjuncts {
        out.push_str("(assert ");
        write_formula(&mut out, g, &f.vars);
        out.push_str(")\n");
    }
    out.push_str("(check-sat)\n");
    if want_model {
        out.push_str("(get-model)\n");
    }
    out
}

/// Deterministic QF_LIA script: declarations in allocation order, one range
/// assertion per sorted variable, the body (one assertion per top-level
/// conjunct), then `(check-sat)`.
pub fn emit_smt2(f: &LinFormula) -> String {
    emit(f, false)
}

/// Like [`emit_smt2`] but asks the solver for a model.
pub fn emit_smt2_with_model(f: &LinFormula) -> String {
    emit(f, true)
}

/// Raw output of one solver run, or `None` on timeout.
fn run_solver(script: &str, cfg: &SolverConfig) -> Result<Option<(String, String, String)>, SolverError> {
    let mut file = tempfile::Builder::new().prefix("symparikh-").suffix(".smt2").tempfile()?;
    file.write_all(script.as_bytes())?;
    file.flush()?;

    let (exe, args) = cfg
        .command
        .split_first()
        .ok_or_else(|| SolverError::Spawn {
            cmd: String::new(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidInput, "empty solver command"),
        })?;
    let mut child = Command::new(exe)
        .args(args)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|source| SolverError::Spawn { cmd: cfg.command.join(" "), source })?;

    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    let out_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let err_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });

    let start = Instant::now();
    let mut poll = Duration::from_millis(1);
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if start.elapsed() >= cfg.timeout {
            let _ = child.kill();
            let _ = child.wait();
            return Ok(None);
        }
        std::thread::sleep(poll);
        poll = (poll * 2).min(Duration::from_millis(20));
    };
    let stdout = out_reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();
    Ok(Some((stdout, stderr, status.to_string())))
}

fn no_result(stdout: &str, stderr: &str, status: String) -> SolverError {
    SolverError::NoResult {
        status,
        detail: first_line(if stderr.trim().is_empty() { stdout } else { stderr }),
    }
}

/// Runs the solver on `script` and reads its verdict. A model is parsed when
/// the answer is `sat` and the script requested one.
pub fn solve(script: &str, cfg: &SolverConfig) -> Result<SolveResult, SolverError> {
    let Some((stdout, stderr, status)) = run_solver(script, cfg)? else {
        return Ok(SolveResult::Timeout);
    };
    parse_output(&stdout).ok_or_else(|| no_result(&stdout, &stderr, status))?
}

/// Decides `f ∧ q` for every query `q` in a single solver process, using
/// `push`/`pop` around each query. Models are not requested. The timeout
/// covers the whole batch; on expiry every query reports
/// [`SolveResult::Timeout`].
pub fn check_each(f: &LinFormula, queries: &[Formula], cfg: &SolverConfig) -> Result<Vec<SolveResult>, SolverError> {
    let mut script = emit_smt2(f);
    let trailer = script.rfind("(check-sat)").expect("emitted scripts end with check-sat");
    script.truncate(trailer);
    for q in queries {
        script.push_str("(push 1)\n(assert ");
        write_formula(&mut script, q, &f.vars);
        script.push_str(")\n(check-sat)\n(pop 1)\n");
    }
    let Some((stdout, stderr, status)) = run_solver(&script, cfg)? else {
        return Ok(vec![SolveResult::Timeout; queries.len()]);
    };
    let verdicts: Vec<SolveResult> = stdout
        .split_whitespace()
        .map_while(|tok| match tok {
            "sat" => Some(SolveResult::Sat(Model::default())),
            "unsat" => Some(SolveResult::Unsat),
            "unknown" => Some(SolveResult::Unknown),
            _ => None,
        })
        .collect();
    if verdicts.len() != queries.len() {
        return Err(no_result(&stdout, &stderr, status));
    }
    Ok(verdicts)
}

fn first_line(s: &str) -> String {
    s.lines().find(|l| !l.trim().is_empty()).unwrap_or("").trim().to_string()
}

/// `None` when no verdict token is present.
fn parse_output(stdout: &str) -> Option<Result<SolveResult, SolverError>> {
    let trimmed = stdout.trim_start();
    let token_end = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
    let rest = &trimmed[token_end..];
    Some(match &trimmed[..token_end] {
        "sat" => parse_model(rest).map(SolveResult::Sat),
        "unsat" => Ok(SolveResult::Unsat),
        "unknown" => Ok(SolveResult::Unknown),
        "timeout" => Ok(SolveResult::Timeout),
        _ => return None,
    })
}

fn parse_model(text: &str) -> Result<Model, SolverError> {
    let mut model = Model::default();
    if text.trim().is_empty() {
        return Ok(model);
    }
    let items = sexp::parse_all(text).map_err(|e| SolverError::Model(e.to_string()))?;
    let mut defs: Vec<&Sexp> = Vec::new();
    for item in &items {
        match item.head() {
            Some("define-fun") => defs.push(item),
            // z3 and cvc5 wrap definitions in a bare list, older z3 in `(model ...)`.
            _ => {
                if let Some(list) = item.as_list() {
                    defs.extend(list.iter().filter(|s| s.head() == Some("define-fun")));
                }
            }
        }
    }
    for d in defs {
        let parts = d.as_list().unwrap_or_default();
        if parts.len() != 5 || parts[2].as_list().is_none_or(|a| !a.is_empty()) {
            continue;
        }
        let Some(name) = parts[1].as_atom() else { continue };
        if parts[3].as_atom() != Some("Int") {
            continue;
        }
        let value = int_value(&parts[4])
            .ok_or_else(|| SolverError::Model(format!("non-integer value for {name}")))?;
        model.values.insert(name.to_string(), value);
    }
    Ok(model)
}

fn int_value(s: &Sexp) -> Option<i64> {
    match s {
        Sexp::Atom(a, _) => a.parse().ok(),
        Sexp::List(items, _) if items.len() == 2 && items[0].as_atom() == Some("-") => {
            int_value(&items[1]).map(|v| -v)
        }
        _ => None,
    }
}

/// Emits `f`, solves it, and returns the verdict.
pub fn check(f: &LinFormula, cfg: &SolverConfig, want_model: bool) -> Result<SolveResult, SolverError> {
    let script = if want_model { emit_smt2_with_model(f) } else { emit_smt2(f) };
    solve(&script, cfg)
}
