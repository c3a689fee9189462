//! Recursive-descent parsers for concept expressions and axiom files.

use super::expr::{ConceptExpr, PrimType, PrimValue, RoleExpr};
use super::lex::{Cursor, ParseError, TokenKind};
use super::Axiom;

/// Words with fixed meaning in `.kb` and `.ldl` files; not usable as
/// concept, role, or object names.
pub(crate) const RESERVED: &[&str] = &[
    "let", "letrec", "in", "fun", "fix", "if", "then", "else", "cons", "null", "head", "tail",
    "query", "case", "of", "type", "as", "default", "nil", "true", "false", "exists", "forall",
    "Top", "Bot", "sub", "equiv", "bool", "string", "list",
];

pub(crate) fn is_reserved(word: &str) -> bool {
    RESERVED.contains(&word)
}

/// Consume a plain (non-reserved) name.
pub(crate) fn expect_name(cur: &mut Cursor) -> Result<String, ParseError> {
    match cur.peek().clone() {
        TokenKind::Word(w) if !is_reserved(&w) && !w.starts_with("xsd:") => {
            cur.next();
            Ok(w)
        }
        TokenKind::Word(w) => Err(cur.error(format!("`{w}` is a reserved word"))),
        other => Err(cur.error(format!("expected a name, found {other}"))),
    }
}

/// `R` or `R^-`.
pub(crate) fn parse_role(cur: &mut Cursor) -> Result<RoleExpr, ParseError> {
    let name = expect_name(cur)?;
    if cur.eat(&TokenKind::InverseMark) {
        Ok(RoleExpr::inverse_of(name))
    } else {
        Ok(RoleExpr::atomic(name))
    }
}

/// Concept expression. Union binds loosest, then intersection, then the
/// prefix forms; quantifier fillers are prefix-level, so
/// `exists r.A & B` reads as `(exists r.A) & B`.
///
/// A `|` directly followed by `type` or `default` is not consumed: those
/// keywords can only belong to an enclosing typecase, never to a concept.
pub fn parse_concept(cur: &mut Cursor) -> Result<ConceptExpr, ParseError> {
    let mut lhs = parse_intersection(cur)?;
    while matches!(cur.peek(), TokenKind::Pipe)
        && !matches!(cur.peek2(), TokenKind::Word(w) if w == "type" || w == "default")
    {
        cur.next();
        let rhs = parse_intersection(cur)?;
        lhs = ConceptExpr::or(lhs, rhs);
    }
    Ok(lhs)
}

fn parse_intersection(cur: &mut Cursor) -> Result<ConceptExpr, ParseError> {
    let mut lhs = parse_prefix_concept(cur)?;
    while cur.eat(&TokenKind::Amp) {
        let rhs = parse_prefix_concept(cur)?;
        lhs = ConceptExpr::and(lhs, rhs);
    }
    Ok(lhs)
}

/// Prefix-level concept: negation, a quantifier, or a primary. This is
/// also the concept level usable as a type atom.
pub(crate) fn parse_prefix_concept(cur: &mut Cursor) -> Result<ConceptExpr, ParseError> {
    if cur.eat(&TokenKind::Bang) {
        return Ok(ConceptExpr::not(parse_prefix_concept(cur)?));
    }
    if cur.eat_word("exists") {
        let role = parse_role(cur)?;
        cur.expect(&TokenKind::Dot)?;
        return Ok(ConceptExpr::exists(role, parse_prefix_concept(cur)?));
    }
    if cur.eat_word("forall") {
        let role = parse_role(cur)?;
        cur.expect(&TokenKind::Dot)?;
        return Ok(ConceptExpr::forall(role, parse_prefix_concept(cur)?));
    }
    parse_primary(cur)
}

fn parse_primary(cur: &mut Cursor) -> Result<ConceptExpr, ParseError> {
    match cur.peek().clone() {
        TokenKind::Word(w) if w == "Top" => {
            cur.next();
            Ok(ConceptExpr::Top)
        }
        TokenKind::Word(w) if w == "Bot" => {
            cur.next();
            Ok(ConceptExpr::Bottom)
        }
        TokenKind::Word(w) if w == "xsd:string" => {
            cur.next();
            Ok(ConceptExpr::Datatype(PrimType::Str))
        }
        TokenKind::Word(w) if w == "xsd:boolean" => {
            cur.next();
            Ok(ConceptExpr::Datatype(PrimType::Bool))
        }
        TokenKind::Word(w) if w.starts_with("xsd:") => {
            Err(cur.error(format!("unsupported datatype `{w}`")))
        }
        TokenKind::Word(_) => Ok(ConceptExpr::Atomic(expect_name(cur)?)),
        TokenKind::LBrace => {
            cur.next();
            let object = expect_name(cur)?;
            cur.expect(&TokenKind::RBrace)?;
            Ok(ConceptExpr::Nominal(object))
        }
        TokenKind::LParen => {
            cur.next();
            let inner = parse_concept(cur)?;
            cur.expect(&TokenKind::RParen)?;
            Ok(inner)
        }
        other => Err(cur.error(format!("expected a concept, found {other}"))),
    }
}

/// Parse a complete input as a single concept expression.
pub fn parse_concept_str(text: &str) -> Result<ConceptExpr, ParseError> {
    let mut cur = Cursor::new(text)?;
    let concept = parse_concept(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.error(format!("unexpected {} after concept", cur.peek())));
    }
    Ok(concept)
}

/// Parse an axiom file into its axiom list, in source order.
pub(crate) fn parse_axioms(text: &str) -> Result<Vec<Axiom>, ParseError> {
    let mut cur = Cursor::new(text)?;
    let mut axioms = Vec::new();
    while !cur.at_eof() {
        axioms.push(parse_axiom(&mut cur)?);
    }
    Ok(axioms)
}

fn parse_axiom(cur: &mut Cursor) -> Result<Axiom, ParseError> {
    // Assertions on pairs: `(a, b) : R` and `(a, "v") : r`. The comma
    // distinguishes them from a parenthesized concept.
    if matches!(cur.peek(), TokenKind::LParen)
        && matches!(cur.peek2(), TokenKind::Word(_))
        && matches!(cur.peek_nth(2), TokenKind::Comma)
    {
        return parse_pair_assertion(cur);
    }
    // Domain/Range abbreviations.
    if (cur.at_word("Domain") || cur.at_word("Range")) && matches!(cur.peek2(), TokenKind::LParen)
    {
        let domain = cur.at_word("Domain");
        cur.next();
        cur.expect(&TokenKind::LParen)?;
        let role = parse_role(cur)?;
        cur.expect(&TokenKind::Comma)?;
        let concept = parse_concept(cur)?;
        cur.expect(&TokenKind::RParen)?;
        return Ok(if domain {
            Axiom::Subsumption(ConceptExpr::exists(role, ConceptExpr::Top), concept)
        } else {
            Axiom::Subsumption(ConceptExpr::Top, ConceptExpr::forall(role, concept))
        });
    }

    let lhs = parse_concept(cur)?;
    match cur.peek().clone() {
        TokenKind::Word(w) if w == "sub" => {
            cur.next();
            let rhs = parse_concept(cur)?;
            Ok(Axiom::Subsumption(lhs, rhs))
        }
        TokenKind::Word(w) if w == "equiv" => {
            cur.next();
            let rhs = parse_concept(cur)?;
            Ok(Axiom::ConceptEquality(lhs, rhs))
        }
        TokenKind::Colon => {
            cur.next();
            let object = match lhs {
                ConceptExpr::Atomic(name) => name,
                other => {
                    return Err(cur.error(format!(
                        "assertion subject must be a plain object name, found `{other}`"
                    )))
                }
            };
            let concept = parse_concept(cur)?;
            Ok(Axiom::ConceptAssertion { object, concept })
        }
        TokenKind::Eq => {
            cur.next();
            let a = match lhs {
                ConceptExpr::Atomic(name) => name,
                other => {
                    return Err(cur.error(format!(
                        "object equivalence takes plain object names, found `{other}`"
                    )))
                }
            };
            let b = expect_name(cur)?;
            Ok(Axiom::ObjectEquivalence(a, b))
        }
        other => Err(cur.error(format!(
            "expected `sub`, `equiv`, `:` or `=` after concept, found {other}"
        ))),
    }
}

fn parse_pair_assertion(cur: &mut Cursor) -> Result<Axiom, ParseError> {
    cur.expect(&TokenKind::LParen)?;
    let subject = expect_name(cur)?;
    cur.expect(&TokenKind::Comma)?;
    enum Filler {
        Object(String),
        Literal(PrimValue),
    }
    let filler = match cur.peek().clone() {
        TokenKind::Str(s) => {
            cur.next();
            Filler::Literal(PrimValue::Str(s))
        }
        TokenKind::Word(w) if w == "true" => {
            cur.next();
            Filler::Literal(PrimValue::Bool(true))
        }
        TokenKind::Word(w) if w == "false" => {
            cur.next();
            Filler::Literal(PrimValue::Bool(false))
        }
        _ => Filler::Object(expect_name(cur)?),
    };
    cur.expect(&TokenKind::RParen)?;
    cur.expect(&TokenKind::Colon)?;
    let role = parse_role(cur)?;
    match filler {
        Filler::Object(object) => Ok(Axiom::RoleAssertion {
            subject,
            object,
            role,
        }),
        Filler::Literal(value) => {
            if role.inverted {
                return Err(cur.error("data assertion on an inverted role"));
            }
            Ok(Axiom::DataAssertion {
                subject,
                role: role.name,
                value,
            })
        }
    }
}
