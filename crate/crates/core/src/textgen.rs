//! English rendering of symbolic instances from sentence templates, the
//! matching sentence parser, and the language-model input formats.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::blocksworld::{builtin_domain, capitalize};
use crate::domain::DomainSpec;
use crate::strips::{Atom, Condition, EngineError, Literal};
use crate::taskgen::{ProblemInstance, Task};

pub const TEMPLATES: &str = include_str!("../data/templates.txt");

/// Joins the two clauses of a conjunctive goal.
pub const GOAL_JOINER: &str = " and ";

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: `{key}` is not a predicate or action of the domain")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: placeholder `{{{name}}}` is not a parameter of `{key}`")]
    UnknownPlaceholder { line: usize, key: String, name: String },
    #[error("line {line}: parameter `{name}` of `{key}` never appears in the template")]
    UnusedParameter { line: usize, key: String, name: String },
    #[error("line {line}: `{key}` defined twice")]
    Duplicate { line: usize, key: String },
    #[error("no template for `{0}`")]
    Missing(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Piece {
    Text(String),
    Slot(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Template {
    pieces: Vec<Piece>,
}

impl Template {
    /// `Err(Ok(name))` for an unknown placeholder, `Err(Err(msg))` for bad braces.
    fn compile(text: &str, params: &[String]) -> Result<Self, Result<String, &'static str>> {
        let mut pieces = Vec::new();
        let mut rest = text;
        while let Some(open) = rest.find('{') {
            if open > 0 {
                pieces.push(Piece::Text(rest[..open].to_string()));
            }
            let close = rest[open..].find('}').ok_or(Err("unclosed `{`"))? + open;
            let name = &rest[open + 1..close];
            let slot = params.iter().position(|p| p == name).ok_or_else(|| Ok(name.to_string()))?;
            pieces.push(Piece::Slot(slot));
            rest = &rest[close + 1..];
        }
        if rest.contains('}') {
            return Err(Err("stray `}`"));
        }
        if !rest.is_empty() {
            pieces.push(Piece::Text(rest.to_string()));
        }
        Ok(Template { pieces })
    }

    fn fill(&self, args: &[String]) -> String {
        let mut out = String::new();
        for p in &self.pieces {
            match p {
                Piece::Text(t) => out.push_str(t),
                Piece::Slot(i) => out.push_str(&args[*i].to_lowercase()),
            }
        }
        out
    }

    /// Inverse of `fill`: object names are single words.
    fn matches(&self, sentence: &str, arity: usize) -> Option<Vec<String>> {
        let mut args: Vec<Option<String>> = vec![None; arity];
        let mut rest = sentence;
        for p in &self.pieces {
            match p {
                Piece::Text(t) => rest = rest.strip_prefix(t.as_str())?,
                Piece::Slot(i) => {
                    let end = rest.find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '-')).unwrap_or(rest.len());
                    if end == 0 {
                        return None;
                    }
                    let word = capitalize(&rest[..end]);
                    match &args[*i] {
                        Some(prev) if *prev != word => return None,
                        _ => args[*i] = Some(word),
                    }
                    rest = &rest[end..];
                }
            }
        }
        if rest.is_empty() {
            args.into_iter().collect()
        } else {
            None
        }
    }
}

/// Sentence templates for one domain's predicates (both polarities) and
/// actions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemplateSet {
    predicates: BTreeMap<(String, bool), (Template, usize)>,
    actions: BTreeMap<String, (Template, usize)>,
    digest: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionStyle {
    /// Capitalized sentences, one per literal.
    Projection,
    /// Lowercase clauses joined by "and", one terminal period.
    Goal,
}

/// One sentence recovered from rendered text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sentence {
    Literal(Literal),
    Action { name: String, args: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TextParseError {
    #[error("sentence matches no template: `{0}`")]
    NoMatch(String),
    #[error("sentence matches several templates: `{0}`")]
    Ambiguous(String),
    #[error("unexpected sentence for this position: `{0}`")]
    Unexpected(String),
    #[error("missing terminal period in `{0}`")]
    Unterminated(String),
    #[error(transparent)]
    Condition(#[from] EngineError),
}

impl TemplateSet {
    pub fn parse(text: &str, domain: &DomainSpec) -> Result<Self, TemplateError> {
        let mut predicates = BTreeMap::new();
        let mut actions = BTreeMap::new();
        let mut in_actions: Option<bool> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            match t {
                "[predicates]" => {
                    in_actions = Some(false);
                    continue;
                }
                "[actions]" => {
                    in_actions = Some(true);
                    continue;
                }
                _ => {}
            }
            let syntax = |message: &str| TemplateError::Syntax { line, message: message.to_string() };
            let section = in_actions.ok_or_else(|| syntax("entry outside a section"))?;
            let (key, body) = t.split_once('=').ok_or_else(|| syntax("expected `key = template`"))?;
            let key = key.trim().to_ascii_lowercase();
            let body = body.trim();
            if body.contains(GOAL_JOINER) {
                return Err(syntax("templates may not contain the goal joiner ` and `"));
            }
            let (name, positive) = match key.strip_prefix('!') {
                Some(n) if !section => (n.to_string(), false),
                Some(_) => return Err(syntax("actions have no negated form")),
                None => (key.clone(), true),
            };
            let params: Vec<String> = if section {
                domain.action(&name).map(|a| a.params.iter().map(|p| p.var.clone()).collect())
            } else {
                domain.predicate(&name).map(|p| p.params.iter().map(|p| p.var.clone()).collect())
            }
            .ok_or_else(|| TemplateError::UnknownKey { line, key: key.clone() })?;
            let tpl = Template::compile(body, &params).map_err(|e| match e {
                Ok(name) => TemplateError::UnknownPlaceholder { line, key: key.clone(), name },
                Err(message) => syntax(message),
            })?;
            if let Some(unused) = (0..params.len()).find(|i| !tpl.pieces.contains(&Piece::Slot(*i))) {
                return Err(TemplateError::UnusedParameter { line, key, name: params[unused].clone() });
            }
            let dup = if section {
                actions.insert(name, (tpl, params.len())).is_some()
            } else {
                predicates.insert((name, positive), (tpl, params.len())).is_some()
            };
            if dup {
                return Err(TemplateError::Duplicate { line, key });
            }
        }
        for p in &domain.predicates {
            for positive in [true, false] {
                if !predicates.contains_key(&(p.name.clone(), positive)) {
                    return Err(TemplateError::Missing(if positive { p.name.clone() } else { format!("!{}", p.name) }));
                }
            }
        }
        for a in &domain.actions {
            if !actions.contains_key(&a.name) {
                return Err(TemplateError::Missing(a.name.clone()));
            }
        }
        Ok(TemplateSet { predicates, actions, digest: hex::encode(Sha256::digest(text.as_bytes())) })
    }

    /// The bundled blocks-world templates.
    pub fn builtin() -> &'static TemplateSet {
        static SET: OnceLock<TemplateSet> = OnceLock::new();
        SET.get_or_init(|| TemplateSet::parse(TEMPLATES, builtin_domain()).expect("bundled templates parse"))
    }

    /// SHA-256 of the template file, hex.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn render_literal(&self, l: &Literal) -> String {
        let (tpl, _) = &self.predicates[&(l.atom.predicate.clone(), l.positive)];
        tpl.fill(&l.atom.args)
    }

    /// One sentence per atom, in the order given.
    pub fn render_state(&self, atoms: &[Atom]) -> String {
        join(atoms.iter().map(|a| self.render_literal(&Literal::pos(a.clone()))))
    }

    pub fn render_action(&self, name: &str, args: &[String]) -> String {
        self.actions[name].0.fill(args)
    }

    pub fn render_actions<'a, I>(&self, seq: I) -> String
    where
        I: IntoIterator<Item = (&'a str, &'a [String])>,
    {
        join(seq.into_iter().map(|(n, a)| self.render_action(n, a)))
    }

    pub fn render_condition(&self, c: &Condition, style: ConditionStyle) -> String {
        let sentences = c.literals().into_iter().map(|l| self.render_literal(l));
        match style {
            ConditionStyle::Projection => join(sentences),
            ConditionStyle::Goal => {
                let clauses: Vec<String> = sentences.map(|s| clause(&s)).collect();
                format!("{}.", clauses.join(GOAL_JOINER))
            }
        }
    }

    pub fn render_instance(&self, p: &ProblemInstance) -> RenderedInstance {
        let state = self.render_state(&p.initial_state);
        let actions = self.render_actions(p.actions.iter().map(|a| (a.name.as_str(), a.args.as_slice())));
        let cond = |style| p.condition.as_ref().map(|c| self.render_condition(c, style)).unwrap_or_default();
        let (context, query) = match p.task {
            Task::Projection => (join([state, actions]), cond(ConditionStyle::Projection)),
            Task::Executability => (state, actions),
            Task::Planning => (join([state, cond(ConditionStyle::Goal)]), actions),
            Task::GoalRecognition => (join([state, actions]), cond(ConditionStyle::Goal)),
        };
        RenderedInstance { context, query, label: p.label }
    }

    /// Matches one sentence (with its period) against every template.
    pub fn parse_sentence(&self, sentence: &str) -> Result<Sentence, TextParseError> {
        let mut found = Vec::new();
        for ((name, positive), (tpl, arity)) in &self.predicates {
            if let Some(args) = tpl.matches(sentence, *arity) {
                found.push(Sentence::Literal(Literal { atom: Atom { predicate: name.clone(), args }, positive: *positive }));
            }
        }
        for (name, (tpl, arity)) in &self.actions {
            if let Some(args) = tpl.matches(sentence, *arity) {
                found.push(Sentence::Action { name: name.clone(), args });
            }
        }
        match found.len() {
            0 => Err(TextParseError::NoMatch(sentence.to_string())),
            1 => Ok(found.pop().unwrap()),
            _ => Err(TextParseError::Ambiguous(sentence.to_string())),
        }
    }

    /// Parses a goal rendered in [`ConditionStyle::Goal`].
    pub fn parse_goal(&self, text: &str) -> Result<Condition, TextParseError> {
        let body = text.strip_suffix('.').ok_or_else(|| TextParseError::Unterminated(text.to_string()))?;
        let mut lits = Vec::new();
        for part in body.split(GOAL_JOINER) {
            match self.parse_sentence(&format!("{}.", capitalize(part)))? {
                Sentence::Literal(l) => lits.push(l),
                Sentence::Action { .. } => return Err(TextParseError::Unexpected(part.to_string())),
            }
        }
        condition_from(lits, text)
    }

    /// Recovers the symbolic instance behind a rendering. The goal of a
    /// planning context is its trailing lowercase sentence.
    pub fn parse_rendered(&self, task: Task, r: &RenderedInstance) -> Result<ParsedInstance, TextParseError> {
        let mut out = ParsedInstance::default();
        let mut context = split_sentences(&r.context)?;
        if task == Task::Planning {
            let goal = context.pop().ok_or_else(|| TextParseError::Unexpected(r.context.clone()))?;
            out.condition = Some(self.parse_goal(&goal)?);
        }
        // State sentences come first, then any action sentences.
        for s in &context {
            match self.parse_sentence(s)? {
                Sentence::Literal(l) if l.positive && out.actions.is_empty() => out.initial_state.push(l.atom),
                Sentence::Action { name, args } if matches!(task, Task::Projection | Task::GoalRecognition) => {
                    out.actions.push((name, args))
                }
                _ => return Err(TextParseError::Unexpected(s.clone())),
            }
        }
        match task {
            Task::Projection => {
                let mut lits = Vec::new();
                for s in split_sentences(&r.query)? {
                    match self.parse_sentence(&s)? {
                        Sentence::Literal(l) => lits.push(l),
                        Sentence::Action { .. } => return Err(TextParseError::Unexpected(s)),
                    }
                }
                out.condition = Some(condition_from(lits, &r.query)?);
            }
            Task::GoalRecognition => out.condition = Some(self.parse_goal(r.query.trim())?),
            Task::Executability | Task::Planning => {
                for s in split_sentences(&r.query)? {
                    match self.parse_sentence(&s)? {
                        Sentence::Action { name, args } => out.actions.push((name, args)),
                        Sentence::Literal(_) => return Err(TextParseError::Unexpected(s)),
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Symbolic content recovered by [`TemplateSet::parse_rendered`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParsedInstance {
    pub initial_state: Vec<Atom>,
    pub actions: Vec<(String, Vec<String>)>,
    pub condition: Option<Condition>,
}

fn condition_from(mut lits: Vec<Literal>, text: &str) -> Result<Condition, TextParseError> {
    match lits.len() {
        1 => Ok(Condition::literal(lits.pop().unwrap())),
        2 => {
            let b = lits.pop().unwrap();
            Ok(Condition::and(lits.pop().unwrap(), b)?)
        }
        _ => Err(TextParseError::Unexpected(text.to_string())),
    }
}

fn join<I: IntoIterator<Item = String>>(parts: I) -> String {
    parts.into_iter().filter(|p| !p.is_empty()).collect::<Vec<_>>().join(" ")
}

/// "The x block is clear." -> "the x block is clear"
fn clause(sentence: &str) -> String {
    let s = sentence.strip_suffix('.').unwrap_or(sentence);
    let mut cs = s.chars();
    match cs.next() {
        Some(c) => c.to_lowercase().chain(cs).collect(),
        None => String::new(),
    }
}

/// Splits on terminal periods; object names never contain one.
fn split_sentences(text: &str) -> Result<Vec<String>, TextParseError> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    if !t.ends_with('.') {
        return Err(TextParseError::Unterminated(t.to_string()));
    }
    Ok(t.split_inclusive('.').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
}

/// Context, query and answer of one rendered problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedInstance {
    pub context: String,
    pub query: String,
    pub label: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LmStyle {
    /// `<s> context </s> query </s>`, target 0/1.
    Separator,
    /// `context query`, target 0/1.
    Concat,
    /// `context query`, target No/Yes.
    Text2text,
}

impl FromStr for LmStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "separator" => Ok(LmStyle::Separator),
            "concat" => Ok(LmStyle::Concat),
            "text2text" => Ok(LmStyle::Text2text),
            other => Err(format!("unknown style `{other}` (separator|concat|text2text)")),
        }
    }
}

impl fmt::Display for LmStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LmStyle::Separator => "separator",
            LmStyle::Concat => "concat",
            LmStyle::Text2text => "text2text",
        })
    }
}

/// Model input and target text.
pub fn format_for_lm(r: &RenderedInstance, style: LmStyle) -> (String, String) {
    match style {
        LmStyle::Separator => (format!("<s> {} </s> {} </s>", r.context, r.query), u8::from(r.label).to_string()),
        LmStyle::Concat => (format!("{} {}", r.context, r.query), u8::from(r.label).to_string()),
        LmStyle::Text2text => {
            (format!("{} {}", r.context, r.query), if r.label { "Yes" } else { "No" }.to_string())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::parse_domain;
    use crate::strips::parse_literal;

    fn t() -> &'static TemplateSet {
        TemplateSet::builtin()
    }

    fn atoms(xs: &[&str]) -> Vec<Atom> {
        xs.iter().map(|x| crate::strips::parse_atom(x).unwrap()).collect()
    }

    fn s(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn state_sentences_follow_display_order() {
        let st = atoms(&["onTable(Olive)", "on(Yellow, Olive)", "clear(Indigo)", "on(Indigo, Yellow)"]);
        assert_eq!(
            t().render_state(&st),
            "The olive block is on the table. The yellow block is on top of the olive block. The indigo block is clear. The indigo block is on top of the yellow block."
        );
        assert_eq!(t().render_state(&[]), "");
    }

    #[test]
    fn action_sentences() {
        assert_eq!(
            t().render_action("movefromtable", &s(&["Green", "Red"])),
            "Jane moves the green block from the table to the red block."
        );
        assert_eq!(
            t().render_action("movetotable", &s(&["Indigo", "Yellow"])),
            "Jane moves the indigo block from the yellow block onto the table."
        );
        assert_eq!(
            t().render_action("move", &s(&["A", "B", "C"])),
            "Jane moves the a block from the b block to the c block."
        );
        assert_eq!(t().render_actions(std::iter::empty()), "");
    }

    #[test]
    fn condition_styles() {
        let q = Condition::literal(parse_literal("on(Blue, Red)").unwrap());
        assert_eq!(t().render_condition(&q, ConditionStyle::Projection), "The blue block is on top of the red block.");
        let g = Condition::literal(parse_literal("!on(Blue, Magenta)").unwrap());
        assert_eq!(t().render_condition(&g, ConditionStyle::Goal), "the blue block is not on top of the magenta block.");
        let c = Condition::and(parse_literal("clear(Green)").unwrap(), parse_literal("!on(Gray, Yellow)").unwrap()).unwrap();
        assert_eq!(
            t().render_condition(&c, ConditionStyle::Projection),
            "The green block is clear. The gray block is not on top of the yellow block."
        );
        let c = Condition::and(parse_literal("onTable(Blue)").unwrap(), parse_literal("!on(Green, Blue)").unwrap()).unwrap();
        assert_eq!(
            t().render_condition(&c, ConditionStyle::Goal),
            "the blue block is on the table and the green block is not on top of the blue block."
        );
        assert_eq!(t().parse_goal("the blue block is on the table and the green block is not on top of the blue block.").unwrap(), c);
    }

    #[test]
    fn lm_formats() {
        let r = RenderedInstance { context: "C.".into(), query: "Q.".into(), label: false };
        assert_eq!(format_for_lm(&r, LmStyle::Separator), ("<s> C. </s> Q. </s>".into(), "0".into()));
        assert_eq!(format_for_lm(&r, LmStyle::Concat), ("C. Q.".into(), "0".into()));
        assert_eq!(format_for_lm(&r, LmStyle::Text2text), ("C. Q.".into(), "No".into()));
        let yes = RenderedInstance { label: true, ..r };
        assert_eq!(format_for_lm(&yes, LmStyle::Text2text).1, "Yes");
        assert_eq!(format_for_lm(&yes, LmStyle::Separator).1, "1");
    }

    #[test]
    fn sentences_parse_back() {
        for (text, expect) in [
            ("The olive block is on the table.", Sentence::Literal(parse_literal("onTable(Olive)").unwrap())),
            ("The gray block is not on top of the yellow block.", Sentence::Literal(parse_literal("!on(Gray, Yellow)").unwrap())),
            ("The gray block is not clear.", Sentence::Literal(parse_literal("!clear(Gray)").unwrap())),
            (
                "Jane moves the indigo block from the yellow block onto the table.",
                Sentence::Action { name: "movetotable".into(), args: s(&["Indigo", "Yellow"]) },
            ),
        ] {
            assert_eq!(t().parse_sentence(text).unwrap(), expect);
        }
        assert!(matches!(t().parse_sentence("The olive block is happy."), Err(TextParseError::NoMatch(_))));
        assert!(matches!(t().parse_sentence("The olive block is on the table"), Err(TextParseError::NoMatch(_))));
    }

    #[test]
    fn template_file_is_checked_against_the_domain() {
        let d = builtin_domain();
        let missing = TEMPLATES.replace("!clear = The {x} block is not clear.", "");
        assert_eq!(TemplateSet::parse(&missing, d), Err(TemplateError::Missing("!clear".into())));
        let bad = TEMPLATES.replace("clear = The {x} block is clear.", "clear = The {q} block is clear.");
        assert!(matches!(TemplateSet::parse(&bad, d), Err(TemplateError::UnknownPlaceholder { ref name, .. }) if name == "q"));
        let unused = TEMPLATES.replace("to the {z} block", "to the table");
        assert!(matches!(TemplateSet::parse(&unused, d), Err(TemplateError::UnusedParameter { ref name, .. }) if name == "z"));
        let extra = format!("{TEMPLATES}\nfly = Jane flies the {{x}} block.\n");
        assert!(matches!(TemplateSet::parse(&extra, d), Err(TemplateError::UnknownKey { .. })));
        let twice = format!("{TEMPLATES}\nmove = Jane moves {{x}} {{y}} {{z}}.\n");
        assert!(matches!(TemplateSet::parse(&twice, d), Err(TemplateError::Duplicate { .. })));

        let tiny = parse_domain("(define (domain t) (:predicates (lit ?l)) (:action flip :parameters (?l) :precondition (lit ?l) :effect (not (lit ?l))))").unwrap();
        let ts = TemplateSet::parse("[predicates]\nlit = The {l} lamp is lit.\n!lit = The {l} lamp is dark.\n[actions]\nflip = Jane flips the {l} lamp.\n", &tiny).unwrap();
        assert_eq!(ts.render_state(&atoms(&["lit(Desk)"])), "The desk lamp is lit.");
    }
}
