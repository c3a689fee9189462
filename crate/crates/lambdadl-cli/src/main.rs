//! Command-line front end: load a knowledge base, type check and run
//! programs, query concepts, and drive an interactive REPL.
//!
//! Exit codes are a stable contract: 0 ok, 1 type error, 2 parse or I/O
//! error, 3 stuck (`head nil` / `tail nil`), 4 step limit, 5 reasoner
//! budget.

mod render;
mod repl;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use lambdadl::kb::line_col;
use lambdadl::syntax::parse_term;
use lambdadl::typecheck::{typecheck, TypeErrorKind, TypingContext};
use lambdadl::{
    evaluate_with, Budget, EvalConfig, KnowledgeBase, KnowledgeSystem, RunResult, StuckKind,
    TableauReasoner, Term, TermKind,
};

pub(crate) const EXIT_TYPE_ERROR: u8 = 1;
pub(crate) const EXIT_INPUT_ERROR: u8 = 2;
pub(crate) const EXIT_STUCK: u8 = 3;
pub(crate) const EXIT_STEP_LIMIT: u8 = 4;
pub(crate) const EXIT_REASONER_BUDGET: u8 = 5;

#[derive(Parser)]
#[command(
    name = "lambdadl",
    version,
    about = "A typed functional language over description-logic knowledge bases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BudgetArgs {
    /// Tableau node budget per reasoner query (env: LAMBDADL_NODE_BUDGET).
    #[arg(long, value_name = "N")]
    node_budget: Option<usize>,
    /// Time budget per reasoner query in milliseconds
    /// (env: LAMBDADL_TIME_BUDGET_MS).
    #[arg(long, value_name = "MS")]
    time_budget_ms: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        let mut budget = Budget::from_env();
        if let Some(nodes) = self.node_budget {
            budget.max_nodes = nodes;
        }
        if let Some(ms) = self.time_budget_ms {
            budget.max_time = Duration::from_millis(ms);
        }
        budget
    }
}

#[derive(Subcommand)]
enum Command {
    /// Type check a program and print its type.
    Check {
        /// Knowledge base file (.kb).
        #[arg(long)]
        kb: PathBuf,
        /// Program file (.ldl).
        program: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Type check a program, evaluate it, and print the final value.
    Run {
        #[arg(long)]
        kb: PathBuf,
        program: PathBuf,
        /// Print every intermediate term, prefixed by its step index.
        #[arg(long)]
        trace: bool,
        /// Maximum number of reduction steps.
        #[arg(long, value_name = "N")]
        step_limit: Option<usize>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Print the named instances of a concept, one per line.
    Query {
        #[arg(long)]
        kb: PathBuf,
        /// Concept expression, e.g. "MusicArtist & exists recorded.Song".
        concept: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Interactive session against a knowledge base.
    Repl {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long, value_name = "N")]
        step_limit: Option<usize>,
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

/// A failure that terminates the process with a specific exit code.
pub(crate) struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

pub(crate) fn load_reasoner(path: &Path, budget: Budget) -> Result<TableauReasoner, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_INPUT_ERROR, format!("{}: {e}", path.display())))?;
    let kb = KnowledgeBase::parse(&text)
        .map_err(|e| Failure::new(EXIT_INPUT_ERROR, format!("{}: {e}", path.display())))?;
    Ok(TableauReasoner::with_budget(kb, budget))
}

fn read_program(path: &Path) -> Result<(String, Term), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_INPUT_ERROR, format!("{}: {e}", path.display())))?;
    let term = parse_term(&text)
        .map_err(|e| Failure::new(EXIT_INPUT_ERROR, format!("{}: {e}", path.display())))?;
    Ok((text, term))
}

/// Render a type error with its source position and violated rule.
pub(crate) fn type_error_failure(src: &str, err: &lambdadl::TypeError, origin: &str) -> Failure {
    let (line, col) = line_col(src, err.span.start);
    let code = match err.kind {
        TypeErrorKind::Reasoner(_) => EXIT_REASONER_BUDGET,
        _ => EXIT_TYPE_ERROR,
    };
    Failure::new(code, format!("{origin}:{line}:{col}: type error [{err}]"))
}

fn cmd_check(kb_path: &Path, program: &Path, budget: Budget) -> Result<(), Failure> {
    let ks = load_reasoner(kb_path, budget)?;
    let (src, term) = read_program(program)?;
    let ty = typecheck(&ks, &TypingContext::new(), &term)
        .map_err(|e| type_error_failure(&src, &e, &program.display().to_string()))?;
    println!("{ty}");
    Ok(())
}

fn cmd_run(
    kb_path: &Path,
    program: &Path,
    trace: bool,
    step_limit: Option<usize>,
    budget: Budget,
) -> Result<(), Failure> {
    let ks = load_reasoner(kb_path, budget)?;
    let (src, term) = read_program(program)?;
    // Never evaluate a program the checker rejects.
    typecheck(&ks, &TypingContext::new(), &term)
        .map_err(|e| type_error_failure(&src, &e, &program.display().to_string()))?;
    let cfg = EvalConfig {
        step_limit: step_limit.unwrap_or(lambdadl::eval::DEFAULT_STEP_LIMIT),
        trace,
    };
    let result = evaluate_with(&ks, &term, &cfg, |index, term| {
        println!("{index}: {term}");
    })
    .map_err(|e| Failure::new(EXIT_REASONER_BUDGET, e.to_string()))?;
    match result {
        RunResult::Value(value) => {
            println!("{}", render::value(&value));
            Ok(())
        }
        RunResult::Stuck { kind, term } => {
            let form = match kind {
                StuckKind::HeadNil => "head nil",
                StuckKind::TailNil => "tail nil",
            };
            Err(Failure::new(
                EXIT_STUCK,
                format!("runtime error: reached the stuck form `{form}` in `{term}`"),
            ))
        }
        RunResult::StepLimitExceeded { .. } => Err(Failure::new(
            EXIT_STEP_LIMIT,
            format!("step limit of {} exceeded", cfg.step_limit),
        )),
    }
}

fn cmd_query(kb_path: &Path, concept_text: &str, budget: Budget) -> Result<(), Failure> {
    let ks = load_reasoner(kb_path, budget)?;
    let concept = lambdadl::kb::parse_concept_str(concept_text)
        .map_err(|e| Failure::new(EXIT_INPUT_ERROR, format!("concept: {e}")))?;
    // Reuse the checker on `query C` for name validation and the
    // satisfiability gate.
    let query = Term::synthetic(TermKind::Query(concept.clone()));
    match typecheck(&ks, &TypingContext::new(), &query) {
        Ok(_) => {}
        Err(e) if e.kind == TypeErrorKind::UnsatisfiableQuery => {
            eprintln!("warning: concept `{concept}` is unsatisfiable; no instances exist");
            return Ok(());
        }
        Err(e) if matches!(e.kind, TypeErrorKind::Reasoner(_)) => {
            return Err(Failure::new(EXIT_REASONER_BUDGET, e.to_string()));
        }
        Err(e) => return Err(Failure::new(EXIT_INPUT_ERROR, format!("concept: {e}"))),
    }
    let instances = ks
        .query_instances(&concept)
        .map_err(|e| Failure::new(EXIT_REASONER_BUDGET, e.to_string()))?;
    for object in instances {
        println!("{object}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check {
            kb,
            program,
            budget,
        } => cmd_check(kb, program, budget.budget()),
        Command::Run {
            kb,
            program,
            trace,
            step_limit,
            budget,
        } => cmd_run(kb, program, *trace, *step_limit, budget.budget()),
        Command::Query {
            kb,
            concept,
            budget,
        } => cmd_query(kb, concept, budget.budget()),
        Command::Repl {
            kb,
            step_limit,
            trace,
            budget,
        } => repl::run(kb, *step_limit, *trace, budget.budget()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
