//! Recursive-descent parser for terms and types.
//!
//! Application is left-associative and projection `t.R` binds tighter
//! than application, so `getNames obj.influencedBy` applies `getNames` to
//! the projection. `letrec x:T = t1 in t2` is sugar for
//! `let x = fix (fun(x:T). t1) in t2`. Identifiers bound by `let`,
//! `letrec`, `fun`, or a case arm parse as variables; free identifiers
//! are knowledge-base object literals.

use std::collections::BTreeSet;

use crate::kb::parse::{expect_name, is_reserved, parse_concept, parse_role};
use crate::kb::{ConceptExpr, Cursor, ParseError, PrimValue, TokenKind};

use super::{CaseArm, Term, TermKind, Type, Value};

/// Parse a complete program (one term).
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    parse_term_with_bound(src, &BTreeSet::new())
}

/// Parse a term with the given names treated as bound variables (used by
/// the REPL for session bindings).
pub fn parse_term_with_bound(src: &str, bound: &BTreeSet<String>) -> Result<Term, ParseError> {
    let mut parser = TermParser {
        cur: Cursor::new(src)?,
        scope: bound.iter().cloned().collect(),
    };
    let term = parser.term()?;
    if !parser.cur.at_eof() {
        return Err(parser
            .cur
            .error(format!("unexpected {} after term", parser.cur.peek())));
    }
    Ok(term)
}

/// Parse a complete input as a type.
pub fn parse_type_str(src: &str) -> Result<Type, ParseError> {
    let mut cur = Cursor::new(src)?;
    let ty = parse_type(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.error(format!("unexpected {} after type", cur.peek())));
    }
    Ok(ty)
}

/// One line of interactive input: either a term to evaluate or a
/// binding (`let x = t`, or `letrec x:T = t` which binds the fixed
/// point).
#[derive(Debug, Clone, PartialEq)]
pub enum ReplInput {
    Term(Term),
    Bind { name: String, body: Term },
}

/// Parse interactive input. A line that parses as a full term is a term;
/// otherwise the `in`-less binding forms are tried.
pub fn parse_repl_line(src: &str, bound: &BTreeSet<String>) -> Result<ReplInput, ParseError> {
    let term_error = match parse_term_with_bound(src, bound) {
        Ok(term) => return Ok(ReplInput::Term(term)),
        Err(e) => e,
    };
    let mut parser = TermParser {
        cur: Cursor::new(src)?,
        scope: bound.iter().cloned().collect(),
    };
    let binding = if parser.cur.eat_word("let") {
        let name = expect_name(&mut parser.cur)?;
        if !parser.cur.eat(&TokenKind::Eq) {
            return Err(term_error);
        }
        let body = parser.term()?;
        ReplInput::Bind { name, body }
    } else if parser.cur.eat_word("letrec") {
        let name = expect_name(&mut parser.cur)?;
        if !parser.cur.eat(&TokenKind::Colon) {
            return Err(term_error);
        }
        let annot = parse_type(&mut parser.cur)?;
        if !parser.cur.eat(&TokenKind::Eq) {
            return Err(term_error);
        }
        parser.scope.push(name.clone());
        let recursive = parser.term()?;
        parser.scope.pop();
        let closure = Value::Closure {
            param: name.clone(),
            annot,
            body: Box::new(recursive),
        };
        ReplInput::Bind {
            name,
            body: Term::synthetic(TermKind::Fix(Box::new(closure.term()))),
        }
    } else {
        return Err(term_error);
    };
    if !parser.cur.at_eof() {
        return Err(term_error);
    }
    Ok(binding)
}

struct TermParser<'a> {
    cur: Cursor<'a>,
    scope: Vec<String>,
}

impl TermParser<'_> {
    fn term(&mut self) -> Result<Term, ParseError> {
        let start = self.cur.peek_span();
        if self.cur.eat_word("let") {
            let name = expect_name(&mut self.cur)?;
            self.cur.expect(&TokenKind::Eq)?;
            let bound = self.term()?;
            self.cur.expect_word("in")?;
            self.scope.push(name.clone());
            let body = self.term()?;
            self.scope.pop();
            let span = start.merge(body.span);
            return Ok(Term::new(
                TermKind::Let {
                    name,
                    bound: Box::new(bound),
                    body: Box::new(body),
                },
                span,
            ));
        }
        if self.cur.eat_word("letrec") {
            // letrec x:T = t1 in t2  ≡  let x = fix (fun(x:T). t1) in t2
            let name = expect_name(&mut self.cur)?;
            self.cur.expect(&TokenKind::Colon)?;
            let annot = parse_type(&mut self.cur)?;
            self.cur.expect(&TokenKind::Eq)?;
            self.scope.push(name.clone());
            let recursive_body = self.term()?;
            self.scope.pop();
            self.cur.expect_word("in")?;
            self.scope.push(name.clone());
            let body = self.term()?;
            self.scope.pop();
            let span = start.merge(body.span);
            let closure = Value::Closure {
                param: name.clone(),
                annot,
                body: Box::new(recursive_body),
            };
            return Ok(Term::new(
                TermKind::Let {
                    name,
                    bound: Box::new(Term::new(
                        TermKind::Fix(Box::new(Term::new(TermKind::Value(closure), span))),
                        span,
                    )),
                    body: Box::new(body),
                },
                span,
            ));
        }
        if self.cur.eat_word("fun") {
            self.cur.expect(&TokenKind::LParen)?;
            let param = expect_name(&mut self.cur)?;
            self.cur.expect(&TokenKind::Colon)?;
            let annot = parse_type(&mut self.cur)?;
            self.cur.expect(&TokenKind::RParen)?;
            self.cur.expect(&TokenKind::Dot)?;
            self.scope.push(param.clone());
            let body = self.term()?;
            self.scope.pop();
            let span = start.merge(body.span);
            return Ok(Term::new(
                TermKind::Value(Value::Closure {
                    param,
                    annot,
                    body: Box::new(body),
                }),
                span,
            ));
        }
        if self.cur.eat_word("if") {
            let cond = self.term()?;
            self.cur.expect_word("then")?;
            let then_branch = self.term()?;
            self.cur.expect_word("else")?;
            let else_branch = self.term()?;
            let span = start.merge(else_branch.span);
            return Ok(Term::new(
                TermKind::If {
                    cond: Box::new(cond),
                    then_branch: Box::new(then_branch),
                    else_branch: Box::new(else_branch),
                },
                span,
            ));
        }
        if self.cur.eat_word("case") {
            let scrutinee = self.term()?;
            self.cur.expect_word("of")?;
            let mut arms = Vec::new();
            loop {
                self.cur.expect(&TokenKind::Pipe)?;
                if self.cur.eat_word("default") {
                    let default = self.term()?;
                    let span = start.merge(default.span);
                    return Ok(Term::new(
                        TermKind::Case {
                            scrutinee: Box::new(scrutinee),
                            arms,
                            default: Box::new(default),
                        },
                        span,
                    ));
                }
                self.cur.expect_word("type")?;
                let concept = parse_concept(&mut self.cur)?;
                self.cur.expect_word("as")?;
                let binder = expect_name(&mut self.cur)?;
                self.cur.expect(&TokenKind::Arrow)?;
                self.scope.push(binder.clone());
                let body = self.term()?;
                self.scope.pop();
                arms.push(CaseArm {
                    concept,
                    binder,
                    body,
                });
            }
        }
        self.eq_term()
    }

    fn eq_term(&mut self) -> Result<Term, ParseError> {
        let lhs = self.app_term()?;
        if self.cur.eat(&TokenKind::Eq) {
            let rhs = self.app_term()?;
            if matches!(self.cur.peek(), TokenKind::Eq) {
                return Err(self.cur.error("equivalence does not chain; use parentheses"));
            }
            let span = lhs.span.merge(rhs.span);
            return Ok(Term::new(
                TermKind::Eq {
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            ));
        }
        Ok(lhs)
    }

    /// The keyword operators sit at application level, so their result
    /// can head a further application chain (`fix f x` applies the fixed
    /// point to `x`).
    fn app_term(&mut self) -> Result<Term, ParseError> {
        let start = self.cur.peek_span();
        let unary = |p: &mut Self, make: fn(Box<Term>) -> TermKind| -> Result<Term, ParseError> {
            let arg = p.atom()?;
            let span = start.merge(arg.span);
            Ok(Term::new(make(Box::new(arg)), span))
        };
        let mut term = if self.cur.eat_word("fix") {
            unary(self, TermKind::Fix)?
        } else if self.cur.eat_word("null") {
            unary(self, TermKind::Null)?
        } else if self.cur.eat_word("head") {
            unary(self, TermKind::Head)?
        } else if self.cur.eat_word("tail") {
            unary(self, TermKind::Tail)?
        } else if self.cur.eat_word("cons") {
            let head = self.atom()?;
            let tail = self.atom()?;
            let span = start.merge(tail.span);
            Term::new(
                TermKind::Cons {
                    head: Box::new(head),
                    tail: Box::new(tail),
                },
                span,
            )
        } else if self.cur.eat_word("query") {
            let concept = parse_concept(&mut self.cur)?;
            let span = start.merge(self.cur.peek_span());
            Term::new(TermKind::Query(concept), span)
        } else {
            self.atom()?
        };
        while self.starts_atom() {
            let arg = self.atom()?;
            let span = term.span.merge(arg.span);
            term = Term::new(
                TermKind::App {
                    func: Box::new(term),
                    arg: Box::new(arg),
                },
                span,
            );
        }
        Ok(term)
    }

    fn starts_atom(&self) -> bool {
        match self.cur.peek() {
            TokenKind::LParen | TokenKind::Str(_) => true,
            TokenKind::Word(w) => {
                matches!(w.as_str(), "true" | "false" | "nil") || !is_reserved(w)
            }
            _ => false,
        }
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let mut term = self.primary()?;
        while self.cur.eat(&TokenKind::Dot) {
            let role = parse_role(&mut self.cur)?;
            let span = term.span.merge(self.cur.peek_span());
            term = Term::new(
                TermKind::Proj {
                    subject: Box::new(term),
                    role,
                },
                span,
            );
        }
        Ok(term)
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        let start = self.cur.peek_span();
        match self.cur.peek().clone() {
            TokenKind::LParen => {
                self.cur.next();
                let term = self.term()?;
                self.cur.expect(&TokenKind::RParen)?;
                Ok(term)
            }
            TokenKind::Str(s) => {
                self.cur.next();
                Ok(Term::new(
                    TermKind::Value(Value::Prim(PrimValue::Str(s))),
                    start,
                ))
            }
            TokenKind::Word(w) if w == "true" || w == "false" => {
                self.cur.next();
                Ok(Term::new(
                    TermKind::Value(Value::bool(w == "true")),
                    start,
                ))
            }
            TokenKind::Word(w) if w == "nil" => {
                self.cur.next();
                self.cur.expect(&TokenKind::LBracket)?;
                let annot = parse_type(&mut self.cur)?;
                self.cur.expect(&TokenKind::RBracket)?;
                Ok(Term::new(TermKind::Value(Value::Nil(annot)), start))
            }
            TokenKind::Word(w) if !is_reserved(&w) && !w.starts_with("xsd:") => {
                self.cur.next();
                if self.scope.iter().any(|s| *s == w) {
                    Ok(Term::new(TermKind::Var(w), start))
                } else {
                    Ok(Term::new(TermKind::Value(Value::Object(w)), start))
                }
            }
            other => Err(self.cur.error(format!("expected a term, found {other}"))),
        }
    }
}

/// Type grammar: `->` is right-associative and loosest; `|`/`&` combine
/// concept types; `list` is postfix and binds tightest. A parenthesized
/// type may be any type; parentheses inside a concept atom stay concepts.
fn parse_type(cur: &mut Cursor) -> Result<Type, ParseError> {
    let domain = parse_type_union(cur)?;
    if cur.eat(&TokenKind::Arrow) {
        let codomain = parse_type(cur)?;
        return Ok(Type::func(domain, codomain));
    }
    Ok(domain)
}

fn parse_type_union(cur: &mut Cursor) -> Result<Type, ParseError> {
    let mut lhs = parse_type_intersection(cur)?;
    while matches!(cur.peek(), TokenKind::Pipe)
        && !matches!(cur.peek2(), TokenKind::Word(w) if w == "type" || w == "default")
    {
        cur.next();
        let rhs = parse_type_intersection(cur)?;
        lhs = combine_concepts(cur, lhs, rhs, ConceptExpr::or, "|")?;
    }
    Ok(lhs)
}

fn parse_type_intersection(cur: &mut Cursor) -> Result<Type, ParseError> {
    let mut lhs = parse_type_postfix(cur)?;
    while cur.eat(&TokenKind::Amp) {
        let rhs = parse_type_postfix(cur)?;
        lhs = combine_concepts(cur, lhs, rhs, ConceptExpr::and, "&")?;
    }
    Ok(lhs)
}

fn combine_concepts(
    cur: &Cursor,
    lhs: Type,
    rhs: Type,
    combine: fn(ConceptExpr, ConceptExpr) -> ConceptExpr,
    op: &str,
) -> Result<Type, ParseError> {
    match (lhs, rhs) {
        (Type::Concept(l), Type::Concept(r)) => Ok(Type::Concept(combine(l, r))),
        _ => Err(cur.error(format!("`{op}` combines concept types only"))),
    }
}

fn parse_type_postfix(cur: &mut Cursor) -> Result<Type, ParseError> {
    let mut ty = parse_type_atom(cur)?;
    while cur.eat_word("list") {
        ty = Type::list(ty);
    }
    Ok(ty)
}

fn parse_type_atom(cur: &mut Cursor) -> Result<Type, ParseError> {
    match cur.peek().clone() {
        TokenKind::Word(w) if w == "bool" => {
            cur.next();
            Ok(Type::BOOL)
        }
        TokenKind::Word(w) if w == "string" => {
            cur.next();
            Ok(Type::STRING)
        }
        TokenKind::LParen => {
            cur.next();
            let ty = parse_type(cur)?;
            cur.expect(&TokenKind::RParen)?;
            Ok(ty)
        }
        _ => Ok(Type::Concept(crate::kb::parse::parse_prefix_concept(cur)?)),
    }
}
