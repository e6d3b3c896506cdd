//! Grounded STRIPS semantics over named objects.
//!
//! The types here carry object names and are what the rest of the crate
//! exchanges. Search-heavy code goes through [`Grounding`], which compiles a
//! domain and object universe into bitset states.

mod grounded;
mod syntax;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{ActionSchema, DomainSpec, SchemaAtom};

pub use grounded::{ActionId, AtomId, BitState, CompiledCondition, Grounding, Reachable};
pub use syntax::{parse_atom, parse_call, parse_condition, parse_literal, Notation, SyntaxError};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Object {
    pub name: String,
    pub ty: String,
}

/// The objects of one problem, in a fixed order. Names are pairwise distinct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectUniverse {
    objects: Vec<Object>,
}

impl ObjectUniverse {
    pub fn new(objects: Vec<Object>) -> Result<Self, EngineError> {
        if objects.is_empty() {
            return Err(EngineError::EmptyUniverse);
        }
        let mut seen = BTreeSet::new();
        for o in &objects {
            if !seen.insert(o.name.as_str()) {
                return Err(EngineError::DuplicateObject(o.name.clone()));
            }
        }
        Ok(ObjectUniverse { objects })
    }

    /// All objects share one type.
    pub fn of_type<S: AsRef<str>>(names: &[S], ty: &str) -> Result<Self, EngineError> {
        Self::new(
            names
                .iter()
                .map(|n| Object { name: n.as_ref().to_string(), ty: ty.to_string() })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn objects(&self) -> &[Object] {
        &self.objects
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.objects.iter().map(|o| o.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.name == name)
    }
}

/// A ground atom. Predicate names are lowercase; object names keep case.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new<S: AsRef<str>>(predicate: &str, args: &[S]) -> Self {
        Atom {
            predicate: predicate.to_ascii_lowercase(),
            args: args.iter().map(|a| a.as_ref().to_string()).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Notation::default().atom(self))
    }
}

/// A set of ground atoms under the closed-world assumption. Iteration is
/// in canonical (predicate, args) order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct State(BTreeSet<Atom>);

impl State {
    pub fn new() -> Self {
        State(BTreeSet::new())
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.0.contains(atom)
    }

    pub fn insert(&mut self, atom: Atom) -> bool {
        self.0.insert(atom)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.0.iter()
    }
}

impl FromIterator<Atom> for State {
    fn from_iter<T: IntoIterator<Item = Atom>>(iter: T) -> Self {
        State(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a State {
    type Item = &'a Atom;
    type IntoIter = std::collections::btree_set::Iter<'a, Atom>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// An action schema instantiated with concrete, pairwise-distinct objects.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundAction {
    pub name: String,
    pub args: Vec<String>,
    pub precondition: BTreeSet<Atom>,
    pub add: BTreeSet<Atom>,
    pub delete: BTreeSet<Atom>,
}

impl GroundAction {
    /// Same schema and arguments; the atom sets follow from those.
    pub fn same_call(&self, other: &GroundAction) -> bool {
        self.name == other.name && self.args == other.args
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Notation::default().action(self))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, positive: false }
    }

    pub fn negated(&self) -> Self {
        Literal { atom: self.atom.clone(), positive: !self.positive }
    }
}

/// A literal or a conjunction of exactly two literals over distinct atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    Literal(Literal),
    And(Literal, Literal),
}

impl Condition {
    pub fn literal(l: Literal) -> Self {
        Condition::Literal(l)
    }

    /// Rejects duplicate and complementary pairs.
    pub fn and(a: Literal, b: Literal) -> Result<Self, EngineError> {
        if a.atom == b.atom {
            return Err(EngineError::DegenerateConjunction { complementary: a.positive != b.positive });
        }
        Ok(Condition::And(a, b))
    }

    pub fn literals(&self) -> Vec<&Literal> {
        match self {
            Condition::Literal(l) => vec![l],
            Condition::And(a, b) => vec![a, b],
        }
    }

    pub fn is_conjunction(&self) -> bool {
        matches!(self, Condition::And(..))
    }

    /// Order-insensitive form used for identity.
    pub fn canonical(&self) -> Vec<&Literal> {
        let mut ls = self.literals();
        ls.sort();
        ls
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Notation::default().condition(self))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExecutionResult {
    Success(State),
    /// `index` is the first inapplicable action; `state` the state before it.
    Failure { index: usize, state: State },
}

impl ExecutionResult {
    pub fn is_success(&self) -> bool {
        matches!(self, ExecutionResult::Success(_))
    }

    pub fn final_state(&self) -> Option<&State> {
        match self {
            ExecutionResult::Success(s) => Some(s),
            ExecutionResult::Failure { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("object universe is empty")]
    EmptyUniverse,
    #[error("too many objects ({0})")]
    UniverseTooLarge(usize),
    #[error("duplicate object `{0}`")]
    DuplicateObject(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("`{name}` takes {expected} argument(s), got {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("`{name}`: object `{object}` has type `{found}`, expected `{expected}`")]
    TypeMismatch { name: String, object: String, expected: String, found: String },
    #[error("`{0}`: arguments must be pairwise distinct")]
    RepeatedArgument(String),
    #[error("`{0}` is not applicable")]
    NotApplicable(String),
    #[error("{}", if *.complementary { "conjunction of complementary literals" } else { "conjunction of duplicate literals" })]
    DegenerateConjunction { complementary: bool },
    #[error("atom `{0}` is outside the grounded atom space")]
    AtomOutsideGrounding(String),
}

fn instantiate(schema: &ActionSchema, atoms: &[SchemaAtom], args: &[String]) -> BTreeSet<Atom> {
    atoms
        .iter()
        .map(|a| Atom {
            predicate: a.predicate.clone(),
            args: a
                .args
                .iter()
                .map(|v| args[schema.param_index(v).expect("validated domain")].clone())
                .collect(),
        })
        .collect()
}

/// Instantiates one schema. Arguments must be distinct and type-correct.
pub fn ground_action<S: AsRef<str>>(
    d: &DomainSpec,
    u: &ObjectUniverse,
    name: &str,
    args: &[S],
) -> Result<GroundAction, EngineError> {
    let name = name.to_ascii_lowercase();
    let schema = d.action(&name).ok_or_else(|| EngineError::UnknownAction(name.clone()))?;
    if schema.params.len() != args.len() {
        return Err(EngineError::Arity { name, expected: schema.params.len(), found: args.len() });
    }
    let args: Vec<String> = args.iter().map(|a| a.as_ref().to_string()).collect();
    for (i, (arg, param)) in args.iter().zip(&schema.params).enumerate() {
        let obj = u
            .index_of(arg)
            .map(|k| &u.objects()[k])
            .ok_or_else(|| EngineError::UnknownObject(arg.clone()))?;
        if !d.is_subtype(&obj.ty, &param.ty) {
            return Err(EngineError::TypeMismatch {
                name,
                object: arg.clone(),
                expected: param.ty.clone(),
                found: obj.ty.clone(),
            });
        }
        if args[..i].contains(arg) {
            return Err(EngineError::RepeatedArgument(name));
        }
    }
    Ok(GroundAction {
        precondition: instantiate(schema, &schema.precondition, &args),
        add: instantiate(schema, &schema.add_list, &args),
        delete: instantiate(schema, &schema.delete_list, &args),
        name,
        args,
    })
}

/// Every type-correct instantiation with pairwise-distinct arguments,
/// ordered by schema name, then by argument tuple in universe order.
pub fn ground_actions(d: &DomainSpec, u: &ObjectUniverse) -> Vec<GroundAction> {
    let mut schemas: Vec<&ActionSchema> = d.actions.iter().collect();
    schemas.sort_by(|a, b| a.name.cmp(&b.name));
    let mut out = Vec::new();
    for schema in schemas {
        for tuple in distinct_tuples(d, u, &schema.params.iter().map(|p| p.ty.as_str()).collect::<Vec<_>>()) {
            let args: Vec<String> = tuple.iter().map(|&i| u.objects()[i].name.clone()).collect();
            out.push(GroundAction {
                precondition: instantiate(schema, &schema.precondition, &args),
                add: instantiate(schema, &schema.add_list, &args),
                delete: instantiate(schema, &schema.delete_list, &args),
                name: schema.name.clone(),
                args,
            });
        }
    }
    out
}

/// Index tuples, lexicographic, with pairwise-distinct entries whose
/// objects fit the given parameter types.
pub(crate) fn distinct_tuples(d: &DomainSpec, u: &ObjectUniverse, types: &[&str]) -> Vec<Vec<usize>> {
    let candidates: Vec<Vec<usize>> = types
        .iter()
        .map(|ty| {
            (0..u.len())
                .filter(|&i| d.is_subtype(&u.objects()[i].ty, ty))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(types.len());
    fn rec(cands: &[Vec<usize>], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == cands.len() {
            out.push(cur.clone());
            return;
        }
        for &i in &cands[cur.len()] {
            if !cur.contains(&i) {
                cur.push(i);
                rec(cands, cur, out);
                cur.pop();
            }
        }
    }
    rec(&candidates, &mut cur, &mut out);
    out
}

pub fn applicable(s: &State, a: &GroundAction) -> bool {
    a.precondition.iter().all(|p| s.contains(p))
}

/// `(s \ delete) ∪ add`; the input state is left untouched.
pub fn apply(s: &State, a: &GroundAction) -> Result<State, EngineError> {
    if !applicable(s, a) {
        return Err(EngineError::NotApplicable(a.to_string()));
    }
    let mut next: BTreeSet<Atom> = s.0.iter().filter(|x| !a.delete.contains(x)).cloned().collect();
    next.extend(a.add.iter().cloned());
    Ok(State(next))
}

pub fn execute(s: &State, seq: &[GroundAction]) -> ExecutionResult {
    let mut cur = s.clone();
    for (index, a) in seq.iter().enumerate() {
        match apply(&cur, a) {
            Ok(next) => cur = next,
            Err(_) => return ExecutionResult::Failure { index, state: cur },
        }
    }
    ExecutionResult::Success(cur)
}

pub fn eval_literal(s: &State, l: &Literal) -> bool {
    s.contains(&l.atom) == l.positive
}

pub fn eval_condition(s: &State, c: &Condition) -> bool {
    c.literals().into_iter().all(|l| eval_literal(s, l))
}

/// Breadth-first closure of `s0` under the grounded actions, stopping
/// once `cap` states have been collected.
pub fn reachable_states(g: &Grounding, s0: &State, cap: usize) -> Result<Reachable, EngineError> {
    let start = g.encode_state(s0)?;
    Ok(g.reachable(&start, cap))
}

/// Checks every atom against the domain's predicate schemas and the universe.
pub fn check_state(d: &DomainSpec, u: &ObjectUniverse, s: &State) -> Result<(), EngineError> {
    let types: HashMap<&str, &str> = u.objects().iter().map(|o| (o.name.as_str(), o.ty.as_str())).collect();
    for atom in s {
        let schema = d
            .predicate(&atom.predicate)
            .ok_or_else(|| EngineError::UnknownPredicate(atom.predicate.clone()))?;
        if schema.arity() != atom.args.len() {
            return Err(EngineError::Arity {
                name: atom.predicate.clone(),
                expected: schema.arity(),
                found: atom.args.len(),
            });
        }
        for (arg, p) in atom.args.iter().zip(&schema.params) {
            let ty = types.get(arg.as_str()).ok_or_else(|| EngineError::UnknownObject(arg.clone()))?;
            if !d.is_subtype(ty, &p.ty) {
                return Err(EngineError::TypeMismatch {
                    name: atom.predicate.clone(),
                    object: arg.clone(),
                    expected: p.ty.clone(),
                    found: ty.to_string(),
                });
            }
        }
    }
    Ok(())
}
