use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use symparikh::abstraction::{AbstractionOpts, PredicateMode};
use symparikh::pipeline::{abstract_text, check_script, CheckOpts, PipelineError};
use symparikh::sfa::DEFAULT_STATE_CAP;
use symparikh::smtlib::FrontendError;
use symparikh::solver::{emit_smt2, SolverConfig};
use symparikh::symbolic_parikh::EncodeOpts;
use symparikh::wordeq::{gen_wordeq, load_regex_pool};

const EXIT_IO: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;
const EXIT_SOLVER: u8 = 4;
const EXIT_TIMEOUT: u8 = 5;

#[derive(Parser)]
#[command(name = "symparikh", version, about = "Parikh-image unsatisfiability filter for SMT-LIB string constraints")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print `unsat` if the abstraction is unsatisfiable, else `unknown`.
    Check {
        file: PathBuf,
        #[command(flatten)]
        opts: PipelineArgs,
        /// Write the abstraction as SMT-LIB to this path.
        #[arg(long)]
        dump_smt2: Option<PathBuf>,
        /// Explain `unknown` verdicts and print weakening warnings.
        #[arg(short, long)]
        verbose: bool,
    },
    /// Print the abstraction as an SMT-LIB QF_LIA script.
    Dump {
        file: PathBuf,
        #[command(flatten)]
        opts: AbstractionArgs,
    },
    /// Generate word-equation benchmarks.
    GenWordeq {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// One SMT-LIB regex per line.
        #[arg(long)]
        regex_pool: PathBuf,
        /// Output directory; scripts go to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every `.smt2` file in a directory and write a CSV report.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        opts: PipelineArgs,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scripts checked in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Regex,
    #[value(name = "regex+literals")]
    RegexLiterals,
}

#[derive(Args, Clone)]
struct AbstractionArgs {
    /// Predicate selection.
    #[arg(long, value_enum, default_value = "regex")]
    mode: Mode,
    /// Use the plain character bound instead of per-label buckets.
    #[arg(long)]
    no_buckets: bool,
    /// Drop symmetry-breaking constraints on representative characters.
    #[arg(long)]
    no_symmetry: bool,
    /// State cap when complementing automata.
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    complement_cap: usize,
}

#[derive(Args, Clone)]
struct PipelineArgs {
    #[command(flatten)]
    abs: AbstractionArgs,
    /// Solver command; the script path is appended.
    #[arg(long)]
    solver: Option<String>,
    /// Seconds.
    #[arg(long, default_value_t = 30)]
    timeout: u64,
}

impl AbstractionArgs {
    fn mode(&self) -> PredicateMode {
        match self.mode {
            Mode::Regex => PredicateMode::Regex,
            Mode::RegexLiterals => PredicateMode::RegexLiterals,
        }
    }

    fn opts(&self) -> AbstractionOpts {
        AbstractionOpts {
            encode: EncodeOpts {
                use_buckets: !self.no_buckets,
                use_symmetry: !self.no_symmetry,
                char_vars: None,
            },
            complement_cap: self.complement_cap,
        }
    }
}

impl PipelineArgs {
    fn check_opts(&self) -> CheckOpts {
        CheckOpts {
            mode: self.abs.mode(),
            abstraction: self.abs.opts(),
            solver: SolverConfig::from_env(self.solver.as_deref())
                .with_timeout(Duration::from_secs(self.timeout)),
        }
    }
}

fn frontend_code(e: &FrontendError) -> u8 {
    match e {
        FrontendError::Parse { .. } => EXIT_PARSE,
        FrontendError::Unsupported { .. } => EXIT_UNSUPPORTED,
    }
}

fn error_code(e: &PipelineError) -> u8 {
    match e {
        PipelineError::Frontend(f) => frontend_code(f),
        PipelineError::Solver(_) => EXIT_SOLVER,
        PipelineError::Timeout => EXIT_TIMEOUT,
    }
}

fn read(path: &Path) -> Result<String, ExitCode> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(EXIT_IO)
    })
}

fn run(cli: Cli) -> Result<(), ExitCode> {
    match cli.cmd {
        Cmd::Check { file, opts, dump_smt2, verbose } => {
            let text = read(&file)?;
            let report = check_script(&text, &opts.check_opts()).map_err(|e| {
                eprintln!("error: {}: {e}", file.display());
                ExitCode::from(error_code(&e))
            })?;
            if let Some(p) = dump_smt2 {
                fs::write(&p, &report.smt2).map_err(|e| {
                    eprintln!("error: {}: {e}", p.display());
                    ExitCode::from(EXIT_IO)
                })?;
            }
            if verbose {
                for w in &report.warnings {
                    eprintln!("warning: {w}");
                }
            }
            match (&report.verdict, verbose) {
                (symparikh::pipeline::Verdict::Unknown(reason), true) => println!("unknown ({reason})"),
                (v, _) => println!("{}", v.as_str()),
            }
        }
        Cmd::Dump { file, opts } => {
            let text = read(&file)?;
            let abs = abstract_text(&text, opts.mode(), opts.opts()).map_err(|e| {
                eprintln!("error: {}: {e}", file.display());
                ExitCode::from(frontend_code(&e))
            })?;
            for w in &abs.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", emit_smt2(&abs.formula));
        }
        Cmd::GenWordeq { seed, count, regex_pool, out } => {
            let pool = load_regex_pool(&read(&regex_pool)?).map_err(|e| {
                eprintln!("error: {}: {e}", regex_pool.display());
                ExitCode::from(EXIT_PARSE)
            })?;
            let scripts = gen_wordeq(seed, count, &pool).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_PARSE)
            })?;
            match out {
                None => scripts.iter().for_each(|s| print!("{s}")),
                Some(dir) => {
                    let io = |e: std::io::Error| {
                        eprintln!("error: {}: {e}", dir.display());
                        ExitCode::from(EXIT_IO)
                    };
                    fs::create_dir_all(&dir).map_err(io)?;
                    for (i, s) in scripts.iter().enumerate() {
                        fs::write(dir.join(format!("wordeq_{seed}_{i:04}.smt2")), s).map_err(io)?;
                    }
                }
            }
        }
        Cmd::Bench { dir, opts, out, jobs } => bench(&dir, &opts.check_opts(), out.as_deref(), jobs)?,
    }
    Ok(())
}

fn bench(dir: &Path, opts: &CheckOpts, out: Option<&Path>, jobs: usize) -> Result<(), ExitCode> {
    let io = |e: &dyn std::fmt::Display| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_IO)
    };
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io(&e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "smt2"))
        .collect();
    files.sort();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().map_err(|e| io(&e))?;
    let rows: Vec<[String; 4]> = pool.install(|| {
        files
            .par_iter()
            .map(|f| {
                let start = Instant::now();
                let result = fs::read_to_string(f)
                    .map_err(|e| e.to_string())
                    .and_then(|t| check_script(&t, opts).map_err(|e| e.to_string()));
                let ms = start.elapsed().as_millis().to_string();
                let name = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                match result {
                    Ok(r) => [name, r.verdict.as_str().to_string(), ms, r.num_vars.to_string()],
                    Err(e) => [name, format!("error: {e}"), ms, String::new()],
                }
            })
            .collect()
    });
    let sink: Box<dyn std::io::Write> = match out {
        Some(p) => Box::new(fs::File::create(p).map_err(|e| io(&e))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["file", "verdict", "wall_time_ms", "formula_var_count"]).map_err(|e| io(&e))?;
    for r in &rows {
        w.write_record(r).map_err(|e| io(&e))?;
    }
    w.flush().map_err(|e| io(&e))?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
