//! Tokenizer shared by the knowledge-base parser and the program parser.

use std::fmt;

/// Byte range into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    /// Span for terms synthesized during evaluation (no source position).
    pub fn synthetic() -> Self {
        Span { start: 0, end: 0 }
    }

    pub fn merge(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

/// 1-based line/column position, computed from a byte offset.
pub fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let mut line = 1;
    let mut col = 1;
    for (i, ch) in src.char_indices() {
        if i >= offset {
            break;
        }
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    /// Identifier or keyword, including `xsd:`-prefixed datatype tags.
    Word(String),
    /// Double-quoted string literal (unescaped contents).
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Dot,
    Comma,
    Colon,
    Pipe,
    Amp,
    Bang,
    Eq,
    Arrow,
    /// `^-`, the role-inverse suffix.
    InverseMark,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Word(w) => write!(f, "`{w}`"),
            TokenKind::Str(_) => write!(f, "string literal"),
            TokenKind::LParen => write!(f, "`(`"),
            TokenKind::RParen => write!(f, "`)`"),
            TokenKind::LBrace => write!(f, "`{{`"),
            TokenKind::RBrace => write!(f, "`}}`"),
            TokenKind::LBracket => write!(f, "`[`"),
            TokenKind::RBracket => write!(f, "`]`"),
            TokenKind::Dot => write!(f, "`.`"),
            TokenKind::Comma => write!(f, "`,`"),
            TokenKind::Colon => write!(f, "`:`"),
            TokenKind::Pipe => write!(f, "`|`"),
            TokenKind::Amp => write!(f, "`&`"),
            TokenKind::Bang => write!(f, "`!`"),
            TokenKind::Eq => write!(f, "`=`"),
            TokenKind::Arrow => write!(f, "`->`"),
            TokenKind::InverseMark => write!(f, "`^-`"),
            TokenKind::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

/// Parse failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn at(src: &str, offset: usize, message: impl Into<String>) -> Self {
        let (line, col) = line_col(src, offset);
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

fn is_ident_start(ch: char) -> bool {
    ch.is_ascii_alphabetic() || ch == '_'
}

fn is_ident_continue(ch: char) -> bool {
    ch.is_ascii_alphanumeric() || ch == '_'
}

/// Tokenize the whole input. The final token is always `Eof`.
///
/// The DL glyphs used in typeset notation are accepted as aliases for the
/// ASCII spellings so axioms can be pasted verbatim.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(start, ch)) = chars.peek() {
        let simple = |kind: TokenKind, len: usize| Token {
            kind,
            span: Span::new(start, start + len),
        };
        match ch {
            c if c.is_whitespace() => {
                chars.next();
            }
            '/' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, '/')) => {
                        for (_, c) in chars.by_ref() {
                            if c == '\n' {
                                break;
                            }
                        }
                    }
                    _ => return Err(ParseError::at(src, start, "unexpected `/`")),
                }
            }
            '"' => {
                chars.next();
                let mut text = String::new();
                let mut closed = false;
                while let Some((i, c)) = chars.next() {
                    match c {
                        '"' => {
                            closed = true;
                            tokens.push(Token {
                                kind: TokenKind::Str(text),
                                span: Span::new(start, i + 1),
                            });
                            break;
                        }
                        '\\' => match chars.next() {
                            Some((_, '"')) => text.push('"'),
                            Some((_, '\\')) => text.push('\\'),
                            Some((_, 'n')) => text.push('\n'),
                            Some((_, 't')) => text.push('\t'),
                            Some((j, other)) => {
                                return Err(ParseError::at(
                                    src,
                                    j,
                                    format!("unknown escape `\\{other}`"),
                                ))
                            }
                            None => break,
                        },
                        _ => text.push(c),
                    }
                }
                if !closed {
                    return Err(ParseError::at(src, start, "unterminated string literal"));
                }
            }
            '(' => {
                chars.next();
                tokens.push(simple(TokenKind::LParen, 1));
            }
            ')' => {
                chars.next();
                tokens.push(simple(TokenKind::RParen, 1));
            }
            '{' => {
                chars.next();
                tokens.push(simple(TokenKind::LBrace, 1));
            }
            '}' => {
                chars.next();
                tokens.push(simple(TokenKind::RBrace, 1));
            }
            '[' => {
                chars.next();
                tokens.push(simple(TokenKind::LBracket, 1));
            }
            ']' => {
                chars.next();
                tokens.push(simple(TokenKind::RBracket, 1));
            }
            '.' => {
                chars.next();
                tokens.push(simple(TokenKind::Dot, 1));
            }
            ',' => {
                chars.next();
                tokens.push(simple(TokenKind::Comma, 1));
            }
            ':' => {
                chars.next();
                tokens.push(simple(TokenKind::Colon, 1));
            }
            '|' | '\u{2294}' => {
                chars.next();
                tokens.push(simple(TokenKind::Pipe, ch.len_utf8()));
            }
            '&' | '\u{2293}' => {
                chars.next();
                tokens.push(simple(TokenKind::Amp, ch.len_utf8()));
            }
            '!' | '\u{00ac}' => {
                chars.next();
                tokens.push(simple(TokenKind::Bang, ch.len_utf8()));
            }
            '=' => {
                chars.next();
                tokens.push(simple(TokenKind::Eq, 1));
            }
            '-' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, '>')) => {
                        chars.next();
                        tokens.push(simple(TokenKind::Arrow, 2));
                    }
                    _ => return Err(ParseError::at(src, start, "unexpected `-`")),
                }
            }
            '\u{2192}' => {
                chars.next();
                tokens.push(simple(TokenKind::Arrow, ch.len_utf8()));
            }
            '^' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, '-')) => {
                        chars.next();
                        tokens.push(simple(TokenKind::InverseMark, 2));
                    }
                    _ => return Err(ParseError::at(src, start, "expected `-` after `^`")),
                }
            }
            '\u{207b}' => {
                chars.next();
                tokens.push(simple(TokenKind::InverseMark, ch.len_utf8()));
            }
            '\u{2291}' => {
                chars.next();
                tokens.push(Token {
                    kind: TokenKind::Word("sub".into()),
                    span: Span::new(start, start + ch.len_utf8()),
                });
            }
            '\u{2261}' => {
                chars.next();
                tokens.push(Token {
                    kind: TokenKind::Word("equiv".into()),
                    span: Span::new(start, start + ch.len_utf8()),
                });
            }
            '\u{2203}' => {
                chars.next();
                tokens.push(Token {
                    kind: TokenKind::Word("exists".into()),
                    span: Span::new(start, start + ch.len_utf8()),
                });
            }
            '\u{2200}' => {
                chars.next();
                tokens.push(Token {
                    kind: TokenKind::Word("forall".into()),
                    span: Span::new(start, start + ch.len_utf8()),
                });
            }
            '\u{22a4}' => {
                chars.next();
                tokens.push(Token {
                    kind: TokenKind::Word("Top".into()),
                    span: Span::new(start, start + ch.len_utf8()),
                });
            }
            '\u{22a5}' => {
                chars.next();
                tokens.push(Token {
                    kind: TokenKind::Word("Bot".into()),
                    span: Span::new(start, start + ch.len_utf8()),
                });
            }
            c if is_ident_start(c) => {
                let mut end = start;
                while let Some(&(i, c)) = chars.peek() {
                    if is_ident_continue(c) {
                        end = i + c.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                let mut word = src[start..end].to_string();
                // `xsd:string` / `xsd:boolean` lex as one word.
                if word == "xsd" {
                    if let Some(&(_, ':')) = chars.peek() {
                        chars.next();
                        let tag_start = end + 1;
                        let mut tag_end = tag_start;
                        while let Some(&(i, c)) = chars.peek() {
                            if is_ident_continue(c) {
                                tag_end = i + c.len_utf8();
                                chars.next();
                            } else {
                                break;
                            }
                        }
                        if tag_end == tag_start {
                            return Err(ParseError::at(src, end, "expected datatype after `xsd:`"));
                        }
                        word = format!("xsd:{}", &src[tag_start..tag_end]);
                        end = tag_end;
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Word(word),
                    span: Span::new(start, end),
                });
            }
            other => {
                return Err(ParseError::at(
                    src,
                    start,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        span: Span::new(src.len(), src.len()),
    });
    Ok(tokens)
}

/// Cursor over a token stream with the usual peek/expect helpers.
pub struct Cursor<'a> {
    pub src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Result<Self, ParseError> {
        Ok(Cursor {
            src,
            tokens: tokenize(src)?,
            pos: 0,
        })
    }

    pub fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    pub fn peek2(&self) -> &TokenKind {
        self.peek_nth(1)
    }

    pub fn peek_nth(&self, n: usize) -> &TokenKind {
        &self.tokens[(self.pos + n).min(self.tokens.len() - 1)].kind
    }

    pub fn peek_span(&self) -> Span {
        self.tokens[self.pos].span
    }

    pub fn next(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), TokenKind::Eof)
    }

    pub fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == kind {
            self.next();
            true
        } else {
            false
        }
    }

    /// True when the next token is the given keyword.
    pub fn at_word(&self, word: &str) -> bool {
        matches!(self.peek(), TokenKind::Word(w) if w == word)
    }

    pub fn eat_word(&mut self, word: &str) -> bool {
        if self.at_word(word) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, kind: &TokenKind) -> Result<Token, ParseError> {
        if self.peek() == kind {
            Ok(self.next())
        } else {
            Err(self.error(format!("expected {kind}, found {}", self.peek())))
        }
    }

    pub fn expect_word(&mut self, word: &str) -> Result<Token, ParseError> {
        if self.at_word(word) {
            Ok(self.next())
        } else {
            Err(self.error(format!("expected `{word}`, found {}", self.peek())))
        }
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::at(self.src, self.peek_span().start, message)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_and_puncts() {
        let toks = tokenize("exists recorded.Song sub MusicArtist").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.kind.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                TokenKind::Word("exists".into()),
                TokenKind::Word("recorded".into()),
                TokenKind::Dot,
                TokenKind::Word("Song".into()),
                TokenKind::Word("sub".into()),
                TokenKind::Word("MusicArtist".into()),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn xsd_tag_is_one_word() {
        let toks = tokenize("Range(artistName, xsd:string)").unwrap();
        assert!(toks
            .iter()
            .any(|t| t.kind == TokenKind::Word("xsd:string".into())));
    }

    #[test]
    fn string_escapes() {
        let toks = tokenize(r#""Jimmy \"H\" \\ ok""#).unwrap();
        assert_eq!(toks[0].kind, TokenKind::Str("Jimmy \"H\" \\ ok".into()));
    }

    #[test]
    fn glyph_aliases() {
        let ascii = tokenize("exists r.A & !B sub Top").unwrap();
        let glyphs = tokenize("\u{2203}r.A \u{2293} \u{00ac}B \u{2291} \u{22a4}").unwrap();
        let k = |ts: &[Token]| ts.iter().map(|t| t.kind.clone()).collect::<Vec<_>>();
        assert_eq!(k(&ascii), k(&glyphs));
    }

    #[test]
    fn comments_skipped() {
        let toks = tokenize("a // rest of line\nb").unwrap();
        assert_eq!(toks.len(), 3);
    }

    #[test]
    fn inverse_mark() {
        let toks = tokenize("recorded^-").unwrap();
        assert_eq!(toks[1].kind, TokenKind::InverseMark);
    }

    #[test]
    fn error_position() {
        let err = tokenize("abc\n  #").unwrap_err();
        assert_eq!((err.line, err.col), (2, 3));
    }
}
