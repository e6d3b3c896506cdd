//! Compact symbolic surface syntax: `onTable(Green)`, `!on(Blue, Magenta)`,
//! `moveToTable(Indigo, Yellow)`, and `l1 & l2` for conjunctions.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Atom, Condition, GroundAction, Literal};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("malformed term `{0}`: expected `name(arg, ...)`")]
    Malformed(String),
    #[error("empty name in `{0}`")]
    EmptyName(String),
    #[error("{0}")]
    Condition(String),
}

/// Display spellings for lowercase predicate and action names.
/// Names without an entry print as-is; parsing is case-insensitive.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Notation {
    spellings: BTreeMap<String, String>,
}

impl Notation {
    pub fn new<I, K, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        Notation {
            spellings: pairs
                .into_iter()
                .map(|(k, v)| (k.into().to_ascii_lowercase(), v.into()))
                .collect(),
        }
    }

    pub fn spell<'a>(&'a self, name: &'a str) -> &'a str {
        self.spellings.get(name).map(String::as_str).unwrap_or(name)
    }

    fn call(&self, name: &str, args: &[String]) -> String {
        format!("{}({})", self.spell(name), args.join(", "))
    }

    pub fn atom(&self, a: &Atom) -> String {
        self.call(&a.predicate, &a.args)
    }

    pub fn literal(&self, l: &Literal) -> String {
        if l.positive {
            self.atom(&l.atom)
        } else {
            format!("!{}", self.atom(&l.atom))
        }
    }

    pub fn condition(&self, c: &Condition) -> String {
        match c {
            Condition::Literal(l) => self.literal(l),
            Condition::And(a, b) => format!("{} & {}", self.literal(a), self.literal(b)),
        }
    }

    pub fn action(&self, a: &GroundAction) -> String {
        self.call(&a.name, &a.args)
    }
}

/// Splits `name(a, b)` into a lowercased name and trimmed arguments.
pub fn parse_call(text: &str) -> Result<(String, Vec<String>), SyntaxError> {
    let t = text.trim();
    let malformed = || SyntaxError::Malformed(t.to_string());
    let open = t.find('(').ok_or_else(malformed)?;
    let body = t[open + 1..].strip_suffix(')').ok_or_else(malformed)?;
    let name = t[..open].trim();
    if name.is_empty() {
        return Err(SyntaxError::EmptyName(t.to_string()));
    }
    if name.contains(|c: char| !(c.is_alphanumeric() || c == '_' || c == '-')) || body.contains(['(', ')']) {
        return Err(malformed());
    }
    let args = if body.trim().is_empty() {
        Vec::new()
    } else {
        body.split(',')
            .map(|a| {
                let a = a.trim();
                if a.is_empty() || a.contains(char::is_whitespace) {
                    Err(malformed())
                } else {
                    Ok(a.to_string())
                }
            })
            .collect::<Result<_, _>>()?
    };
    Ok((name.to_ascii_lowercase(), args))
}

pub fn parse_atom(text: &str) -> Result<Atom, SyntaxError> {
    let (predicate, args) = parse_call(text)?;
    Ok(Atom { predicate, args })
}

pub fn parse_literal(text: &str) -> Result<Literal, SyntaxError> {
    let t = text.trim();
    match t.strip_prefix('!') {
        Some(rest) => Ok(Literal::neg(parse_atom(rest)?)),
        None => Ok(Literal::pos(parse_atom(t)?)),
    }
}

pub fn parse_condition(text: &str) -> Result<Condition, SyntaxError> {
    let parts: Vec<&str> = text.split('&').collect();
    match parts.as_slice() {
        [one] => Ok(Condition::Literal(parse_literal(one)?)),
        [a, b] => Condition::and(parse_literal(a)?, parse_literal(b)?)
            .map_err(|e| SyntaxError::Condition(e.to_string())),
        _ => Err(SyntaxError::Condition(format!("at most two conjuncts allowed in `{}`", text.trim()))),
    }
}
