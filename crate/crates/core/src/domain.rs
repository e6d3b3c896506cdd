//! Typed STRIPS domains: the `:strips` + `:typing` subset of PDDL.
//!
//! Preconditions are conjunctions of positive atoms. Effects are
//! conjunctions of literals; `(not p)` lands in the delete list and a bare
//! atom in the add list. Predicate, action, type and variable names are
//! lowercased on parse.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sexpr::{self, LexError, Pos, SExpr};

/// Root of every type hierarchy; never needs declaring.
pub const OBJECT_TYPE: &str = "object";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeDecl {
    pub name: String,
    pub parent: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Param {
    /// Variable name without the leading `?`.
    pub var: String,
    pub ty: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateSchema {
    pub name: String,
    pub params: Vec<Param>,
}

impl PredicateSchema {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

/// An atom whose arguments are schema variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SchemaAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl SchemaAtom {
    pub fn new(predicate: &str, args: &[&str]) -> Self {
        SchemaAtom {
            predicate: predicate.to_string(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }
}

impl fmt::Display for SchemaAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " ?{a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<Param>,
    pub precondition: Vec<SchemaAtom>,
    pub add_list: Vec<SchemaAtom>,
    pub delete_list: Vec<SchemaAtom>,
}

impl ActionSchema {
    pub fn param_index(&self, var: &str) -> Option<usize> {
        self.params.iter().position(|p| p.var == var)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub name: String,
    pub requirements: Vec<String>,
    pub types: Vec<TypeDecl>,
    pub predicates: Vec<PredicateSchema>,
    pub actions: Vec<ActionSchema>,
}

impl DomainSpec {
    pub fn predicate(&self, name: &str) -> Option<&PredicateSchema> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn predicate_index(&self, name: &str) -> Option<usize> {
        self.predicates.iter().position(|p| p.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn type_names(&self) -> Vec<&str> {
        self.types.iter().map(|t| t.name.as_str()).collect()
    }

    fn parent_of(&self, ty: &str) -> Option<&str> {
        self.types
            .iter()
            .find(|t| t.name == ty)
            .map(|t| t.parent.as_deref().unwrap_or(OBJECT_TYPE))
    }

    /// True if `ty` equals `ancestor` or descends from it.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        if ancestor == OBJECT_TYPE || ty == ancestor {
            return true;
        }
        let mut seen = HashSet::new();
        let mut cur = ty;
        while let Some(parent) = self.parent_of(cur) {
            if parent == ancestor {
                return true;
            }
            if !seen.insert(parent) || parent == OBJECT_TYPE {
                break;
            }
            cur = parent;
        }
        false
    }

    fn type_known(&self, ty: &str) -> bool {
        ty == OBJECT_TYPE || self.types.iter().any(|t| t.name == ty)
    }

    /// Canonical PDDL text; re-parsing it yields an identical domain.
    pub fn to_pddl(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "(define (domain {})", self.name);
        if !self.requirements.is_empty() {
            let _ = writeln!(out, "  (:requirements {})", self.requirements.join(" "));
        }
        if !self.types.is_empty() {
            let decls: Vec<String> = self
                .types
                .iter()
                .map(|t| format!("{} - {}", t.name, t.parent.as_deref().unwrap_or(OBJECT_TYPE)))
                .collect();
            let _ = writeln!(out, "  (:types {})", decls.join(" "));
        }
        if !self.predicates.is_empty() {
            out.push_str("  (:predicates");
            for p in &self.predicates {
                let _ = write!(out, "\n    ({}{})", p.name, typed_list(&p.params));
            }
            out.push_str(")\n");
        }
        for a in &self.actions {
            let _ = writeln!(out, "  (:action {}", a.name);
            let _ = writeln!(out, "    :parameters ({})", typed_list(&a.params).trim_start());
            let _ = writeln!(out, "    :precondition (and{})", atom_list(&a.precondition, false));
            let effects = format!(
                "{}{}",
                atom_list(&a.delete_list, true),
                atom_list(&a.add_list, false)
            );
            let _ = writeln!(out, "    :effect (and{}))", effects);
        }
        out.push_str(")\n");
        out
    }
}

fn typed_list(params: &[Param]) -> String {
    params.iter().map(|p| format!(" ?{} - {}", p.var, p.ty)).collect()
}

fn atom_list(atoms: &[SchemaAtom], negated: bool) -> String {
    atoms
        .iter()
        .map(|a| if negated { format!(" (not {a})") } else { format!(" {a}") })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseDomainError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("{pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: unsupported requirement `{flag}` (only :strips and :typing)")]
    UnsupportedRequirement { pos: Pos, flag: String },
    #[error("{pos}: unsupported construct `{construct}` in {context}")]
    Unsupported { pos: Pos, construct: String, context: String },
    #[error("{pos}: action `{action}`: `{predicate}` takes {expected} argument(s), found {found}")]
    ArityMismatch {
        pos: Pos,
        action: String,
        predicate: String,
        expected: usize,
        found: usize,
    },
}

impl ParseDomainError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseDomainError::Lex(e) => e.pos(),
            ParseDomainError::Syntax { pos, .. }
            | ParseDomainError::UnsupportedRequirement { pos, .. }
            | ParseDomainError::Unsupported { pos, .. }
            | ParseDomainError::ArityMismatch { pos, .. } => *pos,
        }
    }
}

fn syntax(pos: Pos, message: impl Into<String>) -> ParseDomainError {
    ParseDomainError::Syntax { pos, message: message.into() }
}

pub fn parse_domain(source: &str) -> Result<DomainSpec, ParseDomainError> {
    let root = sexpr::parse(source)?;
    let items = root
        .as_list()
        .ok_or_else(|| syntax(root.pos(), "expected `(define ...)`"))?;
    match items.first().and_then(SExpr::as_symbol) {
        Some(s) if s.eq_ignore_ascii_case("define") => {}
        _ => return Err(syntax(root.pos(), "expected `define`")),
    }
    let header = items.get(1).ok_or_else(|| syntax(root.pos(), "missing `(domain <name>)`"))?;
    let name = match header.as_list() {
        Some([kw, name]) if kw.as_symbol().is_some_and(|k| k.eq_ignore_ascii_case("domain")) => {
            lower_symbol(name, "domain name")?
        }
        _ => return Err(syntax(header.pos(), "expected `(domain <name>)`")),
    };

    let mut domain = DomainSpec {
        name,
        requirements: Vec::new(),
        types: Vec::new(),
        predicates: Vec::new(),
        actions: Vec::new(),
    };
    for section in &items[2..] {
        let head = section
            .head()
            .ok_or_else(|| syntax(section.pos(), "expected a `(:section ...)` list"))?;
        let body = &section.as_list().unwrap()[1..];
        match head.as_str() {
            ":requirements" => parse_requirements(body, &mut domain)?,
            ":types" => {
                for (names, parent, _) in parse_typed_names(body, false)? {
                    let parent = parent.filter(|p| p != OBJECT_TYPE);
                    for n in names {
                        domain.types.push(TypeDecl { name: n, parent: parent.clone() });
                    }
                }
            }
            ":predicates" => {
                for p in body {
                    domain.predicates.push(parse_predicate(p)?);
                }
            }
            ":action" => {
                let action = parse_action(section.pos(), body, &domain)?;
                domain.actions.push(action);
            }
            other => {
                return Err(ParseDomainError::Unsupported {
                    pos: section.pos(),
                    construct: other.to_string(),
                    context: "domain definition".into(),
                })
            }
        }
    }
    Ok(domain)
}

fn lower_symbol(e: &SExpr, what: &str) -> Result<String, ParseDomainError> {
    e.as_symbol()
        .map(str::to_ascii_lowercase)
        .ok_or_else(|| syntax(e.pos(), format!("expected {what}")))
}

fn parse_requirements(body: &[SExpr], domain: &mut DomainSpec) -> Result<(), ParseDomainError> {
    for r in body {
        let flag = lower_symbol(r, "requirement flag")?;
        if flag != ":strips" && flag != ":typing" {
            return Err(ParseDomainError::UnsupportedRequirement { pos: r.pos(), flag });
        }
        domain.requirements.push(flag);
    }
    Ok(())
}

/// Parses `a b - t c` style lists. Groups of names share the type after
/// the dash; trailing names without one get `None`.
fn parse_typed_names(
    body: &[SExpr],
    variables: bool,
) -> Result<Vec<(Vec<String>, Option<String>, Vec<Pos>)>, ParseDomainError> {
    let mut groups = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut pending_pos: Vec<Pos> = Vec::new();
    let mut i = 0;
    while i < body.len() {
        let tok = &body[i];
        let sym = tok
            .as_symbol()
            .ok_or_else(|| match tok.head().as_deref() {
                Some("either") => ParseDomainError::Unsupported {
                    pos: tok.pos(),
                    construct: "either".into(),
                    context: "typed list".into(),
                },
                _ => syntax(tok.pos(), "expected a name in typed list"),
            })?
            .to_ascii_lowercase();
        if sym == "-" {
            let ty = body
                .get(i + 1)
                .ok_or_else(|| syntax(tok.pos(), "missing type after `-`"))?;
            let ty = lower_symbol(ty, "type name")?;
            if pending.is_empty() {
                return Err(syntax(tok.pos(), "`-` without preceding names"));
            }
            groups.push((std::mem::take(&mut pending), Some(ty), std::mem::take(&mut pending_pos)));
            i += 2;
            continue;
        }
        let name = if variables {
            sym.strip_prefix('?')
                .filter(|v| !v.is_empty())
                .ok_or_else(|| syntax(tok.pos(), format!("expected a `?variable`, found `{sym}`")))?
                .to_string()
        } else {
            sym
        };
        pending.push(name);
        pending_pos.push(tok.pos());
        i += 1;
    }
    if !pending.is_empty() {
        groups.push((pending, None, pending_pos));
    }
    Ok(groups)
}

fn parse_params(body: &[SExpr]) -> Result<Vec<Param>, ParseDomainError> {
    let mut params = Vec::new();
    for (names, ty, _) in parse_typed_names(body, true)? {
        let ty = ty.unwrap_or_else(|| OBJECT_TYPE.to_string());
        params.extend(names.into_iter().map(|var| Param { var, ty: ty.clone() }));
    }
    Ok(params)
}

fn parse_predicate(e: &SExpr) -> Result<PredicateSchema, ParseDomainError> {
    let items = e
        .as_list()
        .filter(|items| !items.is_empty())
        .ok_or_else(|| syntax(e.pos(), "expected `(predicate ?x - type ...)`"))?;
    Ok(PredicateSchema {
        name: lower_symbol(&items[0], "predicate name")?,
        params: parse_params(&items[1..])?,
    })
}

fn parse_action(pos: Pos, body: &[SExpr], domain: &DomainSpec) -> Result<ActionSchema, ParseDomainError> {
    let name_expr = body.first().ok_or_else(|| syntax(pos, "missing action name"))?;
    let name = lower_symbol(name_expr, "action name")?;
    let mut action = ActionSchema {
        name,
        params: Vec::new(),
        precondition: Vec::new(),
        add_list: Vec::new(),
        delete_list: Vec::new(),
    };
    let mut i = 1;
    while i < body.len() {
        let key = lower_symbol(&body[i], "action keyword")?;
        let value = body
            .get(i + 1)
            .ok_or_else(|| syntax(body[i].pos(), format!("missing value for `{key}`")))?;
        match key.as_str() {
            ":parameters" => {
                let list = value
                    .as_list()
                    .ok_or_else(|| syntax(value.pos(), "expected a parameter list"))?;
                action.params = parse_params(list)?;
            }
            ":precondition" => {
                for (atom, p) in parse_conjunction(value, "precondition")? {
                    if !atom.1 {
                        return Err(ParseDomainError::Unsupported {
                            pos: p,
                            construct: "not".into(),
                            context: format!("precondition of `{}`", action.name),
                        });
                    }
                    check_arity(domain, &action.name, &atom.0, p)?;
                    push_unique(&mut action.precondition, atom.0);
                }
            }
            ":effect" => {
                for (atom, p) in parse_conjunction(value, "effect")? {
                    check_arity(domain, &action.name, &atom.0, p)?;
                    if atom.1 {
                        push_unique(&mut action.add_list, atom.0);
                    } else {
                        push_unique(&mut action.delete_list, atom.0);
                    }
                }
            }
            other => {
                return Err(ParseDomainError::Unsupported {
                    pos: body[i].pos(),
                    construct: other.to_string(),
                    context: format!("action `{}`", action.name),
                })
            }
        }
        i += 2;
    }
    Ok(action)
}

fn push_unique(list: &mut Vec<SchemaAtom>, atom: SchemaAtom) {
    if !list.contains(&atom) {
        list.push(atom);
    }
}

fn check_arity(domain: &DomainSpec, action: &str, atom: &SchemaAtom, pos: Pos) -> Result<(), ParseDomainError> {
    match domain.predicate(&atom.predicate) {
        Some(p) if p.arity() != atom.args.len() => Err(ParseDomainError::ArityMismatch {
            pos,
            action: action.to_string(),
            predicate: atom.predicate.clone(),
            expected: p.arity(),
            found: atom.args.len(),
        }),
        // Undeclared predicates are left for validation to report.
        _ => Ok(()),
    }
}

/// Flattens `(and l1 l2 ...)`, a single literal, or `()` into
/// `(atom, positive)` pairs.
fn parse_conjunction(e: &SExpr, context: &str) -> Result<Vec<((SchemaAtom, bool), Pos)>, ParseDomainError> {
    let items = e
        .as_list()
        .ok_or_else(|| syntax(e.pos(), format!("expected a formula in {context}")))?;
    if items.is_empty() {
        return Ok(Vec::new());
    }
    match e.head().as_deref() {
        Some("and") => {
            let mut out = Vec::new();
            for sub in &items[1..] {
                if sub.head().as_deref() == Some("and") {
                    out.extend(parse_conjunction(sub, context)?);
                } else {
                    out.push((parse_literal(sub, context)?, sub.pos()));
                }
            }
            Ok(out)
        }
        _ => Ok(vec![(parse_literal(e, context)?, e.pos())]),
    }
}

fn parse_literal(e: &SExpr, context: &str) -> Result<(SchemaAtom, bool), ParseDomainError> {
    let head = e
        .head()
        .ok_or_else(|| syntax(e.pos(), format!("expected an atom in {context}")))?;
    match head.as_str() {
        "not" => {
            let items = e.as_list().unwrap();
            match items {
                [_, inner] if inner.head().as_deref() != Some("not") => {
                    Ok((parse_atom(inner, context)?, false))
                }
                _ => Err(syntax(e.pos(), "`not` takes exactly one atom")),
            }
        }
        "or" | "imply" | "forall" | "exists" | "when" | "=" | "increase" | "decrease" => {
            Err(ParseDomainError::Unsupported {
                pos: e.pos(),
                construct: head,
                context: context.to_string(),
            })
        }
        _ => Ok((parse_atom(e, context)?, true)),
    }
}

fn parse_atom(e: &SExpr, context: &str) -> Result<SchemaAtom, ParseDomainError> {
    let items = e
        .as_list()
        .filter(|items| !items.is_empty())
        .ok_or_else(|| syntax(e.pos(), format!("expected an atom in {context}")))?;
    let predicate = lower_symbol(&items[0], "predicate name")?;
    let mut args = Vec::with_capacity(items.len() - 1);
    for a in &items[1..] {
        let sym = lower_symbol(a, "argument")?;
        match sym.strip_prefix('?') {
            Some(v) if !v.is_empty() => args.push(v.to_string()),
            _ => {
                return Err(ParseDomainError::Unsupported {
                    pos: a.pos(),
                    construct: format!("constant `{sym}`"),
                    context: context.to_string(),
                })
            }
        }
    }
    Ok(SchemaAtom { predicate, args })
}

/// A located diagnostic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub location: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    fn error(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.errors.push(Issue { location: location.into(), message: message.into() });
    }

    fn warn(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.warnings.push(Issue { location: location.into(), message: message.into() });
    }
}

/// Checks every structural invariant and reports all violations.
pub fn validate_domain(d: &DomainSpec) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut seen = HashSet::new();
    for t in &d.types {
        if t.name == OBJECT_TYPE || !seen.insert(t.name.as_str()) {
            report.error(format!("type `{}`", t.name), "duplicate type declaration");
        }
        if let Some(p) = &t.parent {
            if !d.type_known(p) {
                report.error(format!("type `{}`", t.name), format!("undeclared parent type `{p}`"));
            }
        }
    }

    let mut seen = HashSet::new();
    for p in &d.predicates {
        let loc = format!("predicate `{}`", p.name);
        if !seen.insert(p.name.as_str()) {
            report.error(&loc, "duplicate predicate name");
        }
        check_params(d, &p.params, &loc, &mut report);
    }

    let mut seen = HashSet::new();
    let mut used_predicates = HashSet::new();
    for a in &d.actions {
        let loc = format!("action `{}`", a.name);
        if !seen.insert(a.name.as_str()) {
            report.error(&loc, "duplicate action name");
        }
        check_params(d, &a.params, &loc, &mut report);
        let types: HashMap<&str, &str> = a.params.iter().map(|p| (p.var.as_str(), p.ty.as_str())).collect();
        for (part, atoms) in [
            ("precondition", &a.precondition),
            ("add list", &a.add_list),
            ("delete list", &a.delete_list),
        ] {
            for atom in atoms {
                used_predicates.insert(atom.predicate.as_str());
                let aloc = format!("{loc}, {part} {atom}");
                let Some(schema) = d.predicate(&atom.predicate) else {
                    report.error(&aloc, format!("undeclared predicate `{}`", atom.predicate));
                    continue;
                };
                if schema.arity() != atom.args.len() {
                    report.error(
                        &aloc,
                        format!("`{}` takes {} argument(s), found {}", schema.name, schema.arity(), atom.args.len()),
                    );
                    continue;
                }
                for (arg, expected) in atom.args.iter().zip(&schema.params) {
                    match types.get(arg.as_str()) {
                        None => report.error(&aloc, format!("variable `?{arg}` is not a parameter")),
                        Some(ty) if !d.is_subtype(ty, &expected.ty) => report.error(
                            &aloc,
                            format!("`?{arg}` has type `{ty}`, expected `{}`", expected.ty),
                        ),
                        Some(_) => {}
                    }
                }
            }
        }
        let adds: BTreeSet<&SchemaAtom> = a.add_list.iter().collect();
        for atom in &a.delete_list {
            if adds.contains(atom) {
                report.error(&loc, format!("{atom} is both added and deleted"));
            }
        }
        if a.add_list.is_empty() && a.delete_list.is_empty() {
            report.warn(&loc, "action has no effects");
        }
    }

    for p in &d.predicates {
        if !used_predicates.contains(p.name.as_str()) {
            report.warn(format!("predicate `{}`", p.name), "never used by any action");
        }
    }
    report
}

fn check_params(d: &DomainSpec, params: &[Param], loc: &str, report: &mut ValidationReport) {
    let mut vars = HashSet::new();
    for p in params {
        if !vars.insert(p.var.as_str()) {
            report.error(loc, format!("duplicate variable `?{}`", p.var));
        }
        if !d.type_known(&p.ty) {
            report.error(loc, format!("undeclared type `{}` for `?{}`", p.ty, p.var));
        }
    }
}
