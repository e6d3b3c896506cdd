//! Minimal s-expression reader for PDDL text.
//!
//! Symbols and lists only; `;` starts a comment running to end of line.
//! Every node keeps the position of its first character so that later
//! stages can report errors against the source.

use std::fmt;

use thiserror::Error;

/// 1-based line and column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    pub fn new(line: usize, col: usize) -> Self {
        Pos { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SExpr {
    Symbol(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Symbol(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            SExpr::Symbol(s, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Symbol(..) => None,
        }
    }

    /// Head symbol of a list, lowercased.
    pub fn head(&self) -> Option<String> {
        self.as_list()
            .and_then(|items| items.first())
            .and_then(SExpr::as_symbol)
            .map(str::to_ascii_lowercase)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("{0}: unexpected `)`")]
    UnbalancedClose(Pos),
    #[error("{0}: unclosed `(`")]
    Unclosed(Pos),
    #[error("{pos}: unexpected character {ch:?}")]
    BadChar { pos: Pos, ch: char },
    #[error("{0}: empty input")]
    Empty(Pos),
    #[error("{0}: trailing input after top-level expression")]
    Trailing(Pos),
}

impl LexError {
    pub fn pos(&self) -> Pos {
        match self {
            LexError::UnbalancedClose(p)
            | LexError::Unclosed(p)
            | LexError::Empty(p)
            | LexError::Trailing(p) => *p,
            LexError::BadChar { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, PartialEq)]
enum Token {
    Open,
    Close,
    Symbol(String),
}

fn tokenize(src: &str) -> Result<Vec<(Token, Pos)>, LexError> {
    let mut tokens = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos::new(line, col);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                chars.next();
                col += 1;
                tokens.push((Token::Open, pos));
            }
            ')' => {
                chars.next();
                col += 1;
                tokens.push((Token::Close, pos));
            }
            c if is_symbol_char(c) => {
                let mut sym = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_symbol_char(c) {
                        break;
                    }
                    sym.push(c);
                    chars.next();
                    col += 1;
                }
                tokens.push((Token::Symbol(sym), pos));
            }
            ch => return Err(LexError::BadChar { pos, ch }),
        }
    }
    Ok(tokens)
}

fn is_symbol_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '-' | '_' | ':' | '?' | '=' | '.' | '<' | '>' | '+' | '*' | '/')
}

/// Parses exactly one top-level expression.
pub fn parse(src: &str) -> Result<SExpr, LexError> {
    let tokens = tokenize(src)?;
    let mut iter = tokens.into_iter().peekable();
    let expr = match iter.next() {
        None => return Err(LexError::Empty(Pos::new(1, 1))),
        Some(tok) => read(tok, &mut iter)?,
    };
    if let Some((_, pos)) = iter.next() {
        return Err(LexError::Trailing(pos));
    }
    Ok(expr)
}

fn read<I>(first: (Token, Pos), rest: &mut std::iter::Peekable<I>) -> Result<SExpr, LexError>
where
    I: Iterator<Item = (Token, Pos)>,
{
    match first {
        (Token::Symbol(s), pos) => Ok(SExpr::Symbol(s, pos)),
        (Token::Close, pos) => Err(LexError::UnbalancedClose(pos)),
        (Token::Open, open_pos) => {
            let mut items = Vec::new();
            loop {
                match rest.next() {
                    None => return Err(LexError::Unclosed(open_pos)),
                    Some((Token::Close, _)) => return Ok(SExpr::List(items, open_pos)),
                    Some(tok) => items.push(read(tok, rest)?),
                }
            }
        }
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Symbol(s, _) => f.write_str(s),
            SExpr::List(items, _) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}
