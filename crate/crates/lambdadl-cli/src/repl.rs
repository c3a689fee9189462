//! Interactive session: bindings accumulate, the knowledge base stays
//! immutable, and `:load` swaps it out (resetting all bindings).

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::path::Path;

use lambdadl::syntax::{parse_repl_line, ReplInput};
use lambdadl::typecheck::{typecheck, TypingContext};
use lambdadl::{
    evaluate_with, substitute, Budget, EvalConfig, KnowledgeSystem, RunResult, StuckKind,
    TableauReasoner, Term, Type, Value,
};

use crate::{load_reasoner, render, Failure};

struct Session {
    reasoner: TableauReasoner,
    ctx: TypingContext,
    values: BTreeMap<String, Value>,
    cfg: EvalConfig,
    budget: Budget,
}

impl Session {
    fn reset_kb(&mut self, path: &Path) -> Result<(), Failure> {
        self.reasoner = load_reasoner(path, self.budget.clone())?;
        self.ctx.clear();
        self.values.clear();
        Ok(())
    }

    /// Close the term over the session bindings before evaluating.
    fn close(&self, term: &Term) -> Term {
        let mut closed = term.clone();
        for (name, value) in &self.values {
            closed = substitute(&closed, name, value);
        }
        closed
    }

    fn eval_term(&self, term: &Term) -> Result<(Type, Value), String> {
        let ty = typecheck(&self.reasoner, &self.ctx, term).map_err(|e| format!("type error [{e}]"))?;
        let closed = self.close(term);
        let result = evaluate_with(&self.reasoner, &closed, &self.cfg, |index, term| {
            println!("{index}: {term}");
        })
        .map_err(|e| e.to_string())?;
        match result {
            RunResult::Value(value) => Ok((ty, value)),
            RunResult::Stuck { kind, term } => {
                let form = match kind {
                    StuckKind::HeadNil => "head nil",
                    StuckKind::TailNil => "tail nil",
                };
                Err(format!("runtime error: stuck at `{form}` in `{term}`"))
            }
            RunResult::StepLimitExceeded { .. } => {
                Err(format!("step limit of {} exceeded", self.cfg.step_limit))
            }
        }
    }
}

pub fn run(
    kb_path: &Path,
    step_limit: Option<usize>,
    trace: bool,
    budget: Budget,
) -> Result<(), Failure> {
    let reasoner = load_reasoner(kb_path, budget.clone())?;
    let mut session = Session {
        reasoner,
        ctx: TypingContext::new(),
        values: BTreeMap::new(),
        cfg: EvalConfig {
            step_limit: step_limit.unwrap_or(lambdadl::eval::DEFAULT_STEP_LIMIT),
            trace,
        },
        budget,
    };
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    loop {
        eprint!("λdl> ");
        io::stderr().flush().ok();
        let Some(line) = lines.next() else {
            return Ok(());
        };
        let line = line.map_err(|e| Failure::new(crate::EXIT_INPUT_ERROR, e.to_string()))?;
        let input = line.trim();
        if input.is_empty() {
            continue;
        }
        match dispatch(&mut session, input) {
            Ok(true) => return Ok(()),
            Ok(false) => {}
            Err(message) => eprintln!("{message}"),
        }
    }
}

/// Handle one line; `Ok(true)` means quit.
fn dispatch(session: &mut Session, input: &str) -> Result<bool, String> {
    if input == ":quit" || input == ":q" {
        return Ok(true);
    }
    if input == ":kb" {
        print!("{}", session.reasoner.kb());
        return Ok(false);
    }
    if let Some(path) = input.strip_prefix(":load ") {
        session
            .reset_kb(Path::new(path.trim()))
            .map_err(|f| f.message)?;
        println!("loaded {}", path.trim());
        return Ok(false);
    }
    if let Some(rest) = input.strip_prefix(":type ") {
        let term = lambdadl::syntax::parse_term_with_bound(rest, &session.ctx.names())
            .map_err(|e| e.to_string())?;
        let ty = typecheck(&session.reasoner, &session.ctx, &term)
            .map_err(|e| format!("type error [{e}]"))?;
        println!("{ty}");
        return Ok(false);
    }
    if input.starts_with(':') {
        return Err(format!(
            "unknown command `{input}` (commands: :type t, :kb, :load <path>, :quit)"
        ));
    }
    match parse_repl_line(input, &session.ctx.names()).map_err(|e| e.to_string())? {
        ReplInput::Term(term) => {
            let (ty, value) = session.eval_term(&term)?;
            println!("- : {ty} = {}", render::value(&value));
        }
        ReplInput::Bind { name, body } => {
            let (ty, value) = session.eval_term(&body)?;
            println!("{name} : {ty} = {}", render::value(&value));
            session.ctx.bind(name.clone(), ty);
            session.values.insert(name, value);
        }
    }
    Ok(false)
}
