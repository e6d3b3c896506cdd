use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use smallvec::SmallVec;

use super::{distinct_tuples, Atom, Condition, EngineError, GroundAction, ObjectUniverse, State};
use crate::domain::{DomainSpec, SchemaAtom};

pub type AtomId = usize;
pub type ActionId = usize;

type Args = SmallVec<[u16; 4]>;

/// A state as a bitset over the grounded atom space.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitState(SmallVec<[u64; 2]>);

impl BitState {
    fn empty(words: usize) -> Self {
        BitState(SmallVec::from_elem(0, words))
    }

    pub fn contains(&self, id: AtomId) -> bool {
        self.0[id / 64] >> (id % 64) & 1 == 1
    }

    fn insert(&mut self, id: AtomId) {
        self.0[id / 64] |= 1 << (id % 64);
    }

    fn is_superset(&self, other: &BitState) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| b & !a == 0)
    }

    fn is_disjoint(&self, other: &BitState) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == 0)
    }

    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }
}

impl fmt::Debug for BitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ones()).finish()
    }
}

/// A condition as two bitsets: atoms that must hold and atoms that must not.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompiledCondition {
    pos: BitState,
    neg: BitState,
}

impl CompiledCondition {
    pub fn holds(&self, s: &BitState) -> bool {
        s.is_superset(&self.pos) && s.is_disjoint(&self.neg)
    }
}

#[derive(Clone, Debug)]
struct CompiledAction {
    schema: usize,
    args: Args,
    pre: BitState,
    add: BitState,
    del: BitState,
}

/// Result of a bounded breadth-first closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reachable {
    pub states: BTreeSet<State>,
    pub truncated: bool,
}

/// A domain compiled against one object universe.
///
/// Atom ids follow predicate declaration order, then argument tuples in
/// universe order. Action ids follow [`super::ground_actions`], minus any
/// instantiation whose precondition repeats an object. Neither
/// depends on object names, so renaming the universe keeps every id.
#[derive(Clone, Debug)]
pub struct Grounding {
    domain: DomainSpec,
    universe: ObjectUniverse,
    object_ids: HashMap<String, u16>,
    atoms: Vec<(usize, Args)>,
    atom_ids: HashMap<(usize, Args), AtomId>,
    atoms_by_predicate: Vec<Vec<AtomId>>,
    actions: Vec<CompiledAction>,
    action_ids: HashMap<(usize, Args), ActionId>,
    // Each action is listed under one precondition atom; empty
    // preconditions go to `unconditional`.
    triggers: Vec<Vec<ActionId>>,
    unconditional: Vec<ActionId>,
    words: usize,
}

impl Grounding {
    pub fn new(d: &DomainSpec, u: ObjectUniverse) -> Result<Self, EngineError> {
        if u.len() > u16::MAX as usize {
            return Err(EngineError::UniverseTooLarge(u.len()));
        }
        let mut atoms = Vec::new();
        let mut atom_ids = HashMap::new();
        let mut atoms_by_predicate = Vec::new();
        for (pi, p) in d.predicates.iter().enumerate() {
            let types: Vec<&str> = p.params.iter().map(|x| x.ty.as_str()).collect();
            let mut ids = Vec::new();
            for tuple in distinct_tuples(d, &u, &types) {
                let args: Args = tuple.iter().map(|&i| i as u16).collect();
                atom_ids.insert((pi, args.clone()), atoms.len());
                ids.push(atoms.len());
                atoms.push((pi, args));
            }
            atoms_by_predicate.push(ids);
        }
        let words = atoms.len().div_ceil(64).max(1);

        let mut order: Vec<usize> = (0..d.actions.len()).collect();
        order.sort_by(|&a, &b| d.actions[a].name.cmp(&d.actions[b].name));
        let mut actions = Vec::new();
        let mut action_ids = HashMap::new();
        for si in order {
            let schema = &d.actions[si];
            let types: Vec<&str> = schema.params.iter().map(|x| x.ty.as_str()).collect();
            for tuple in distinct_tuples(d, &u, &types) {
                let args: Args = tuple.iter().map(|&i| i as u16).collect();
                let compile = |list: &[SchemaAtom]| -> Result<BitState, EngineError> {
                    let mut bits = BitState::empty(words);
                    for a in list {
                        let pi = d
                            .predicate_index(&a.predicate)
                            .ok_or_else(|| EngineError::UnknownPredicate(a.predicate.clone()))?;
                        let key: Args = a
                            .args
                            .iter()
                            .map(|v| args[schema.param_index(v).expect("validated domain")])
                            .collect();
                        match atom_ids.get(&(pi, key)) {
                            Some(&id) => bits.insert(id),
                            // Repeated objects in an atom can never hold.
                            None => return Err(EngineError::AtomOutsideGrounding(a.to_string())),
                        }
                    }
                    Ok(bits)
                };
                let pre = match compile(&schema.precondition) {
                    Ok(bits) => bits,
                    // A precondition that can never hold: the action is dead.
                    Err(EngineError::AtomOutsideGrounding(_)) => continue,
                    Err(e) => return Err(e),
                };
                let add = compile(&schema.add_list)?;
                let del = compile(&schema.delete_list)?;
                action_ids.insert((si, args.clone()), actions.len());
                actions.push(CompiledAction { schema: si, args, pre, add, del });
            }
        }

        let mut triggers = vec![Vec::new(); atoms.len()];
        let mut unconditional = Vec::new();
        for (id, a) in actions.iter().enumerate() {
            // Prefer the most specific atom (highest arity) as the trigger.
            match a.pre.ones().max_by_key(|&at| (atoms[at].1.len(), std::cmp::Reverse(at))) {
                Some(at) => triggers[at].push(id),
                None => unconditional.push(id),
            }
        }

        let object_ids = u.names().enumerate().map(|(i, n)| (n.to_string(), i as u16)).collect();
        Ok(Grounding {
            domain: d.clone(),
            universe: u,
            object_ids,
            atoms,
            atom_ids,
            atoms_by_predicate,
            actions,
            action_ids,
            triggers,
            unconditional,
            words,
        })
    }

    /// Same structure over a renamed universe of identical size and types.
    pub fn renamed(&self, u: ObjectUniverse) -> Result<Self, EngineError> {
        let same_shape = u.len() == self.universe.len()
            && u.objects().iter().zip(self.universe.objects()).all(|(a, b)| a.ty == b.ty);
        if !same_shape {
            return Self::new(&self.domain, u);
        }
        let mut g = self.clone();
        g.object_ids = u.names().enumerate().map(|(i, n)| (n.to_string(), i as u16)).collect();
        g.universe = u;
        Ok(g)
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn universe(&self) -> &ObjectUniverse {
        &self.universe
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn atoms_of_predicate(&self, predicate: usize) -> &[AtomId] {
        &self.atoms_by_predicate[predicate]
    }

    fn name(&self, i: u16) -> String {
        self.universe.objects()[i as usize].name.clone()
    }

    pub fn atom(&self, id: AtomId) -> Atom {
        let (p, args) = &self.atoms[id];
        Atom {
            predicate: self.domain.predicates[*p].name.clone(),
            args: args.iter().map(|&i| self.name(i)).collect(),
        }
    }

    pub fn atom_id(&self, atom: &Atom) -> Result<AtomId, EngineError> {
        let p = self
            .domain
            .predicate_index(&atom.predicate)
            .ok_or_else(|| EngineError::UnknownPredicate(atom.predicate.clone()))?;
        let args = atom
            .args
            .iter()
            .map(|a| self.object_ids.get(a).copied().ok_or_else(|| EngineError::UnknownObject(a.clone())))
            .collect::<Result<Args, _>>()?;
        self.atom_ids
            .get(&(p, args))
            .copied()
            .ok_or_else(|| EngineError::AtomOutsideGrounding(atom.to_string()))
    }

    pub fn encode_state(&self, s: &State) -> Result<BitState, EngineError> {
        let mut bits = BitState::empty(self.words);
        for atom in s {
            bits.insert(self.atom_id(atom)?);
        }
        Ok(bits)
    }

    pub fn decode_state(&self, bits: &BitState) -> State {
        bits.ones().map(|id| self.atom(id)).collect()
    }

    pub fn action(&self, id: ActionId) -> GroundAction {
        let a = &self.actions[id];
        let decode = |bits: &BitState| bits.ones().map(|i| self.atom(i)).collect();
        GroundAction {
            name: self.domain.actions[a.schema].name.clone(),
            args: a.args.iter().map(|&i| self.name(i)).collect(),
            precondition: decode(&a.pre),
            add: decode(&a.add),
            delete: decode(&a.del),
        }
    }

    pub fn action_id<S: AsRef<str>>(&self, name: &str, args: &[S]) -> Result<ActionId, EngineError> {
        let name = name.to_ascii_lowercase();
        let si = self
            .domain
            .actions
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| EngineError::UnknownAction(name.clone()))?;
        let expected = self.domain.actions[si].params.len();
        if expected != args.len() {
            return Err(EngineError::Arity { name, expected, found: args.len() });
        }
        let ids = args
            .iter()
            .map(|a| {
                let a = a.as_ref();
                self.object_ids.get(a).copied().ok_or_else(|| EngineError::UnknownObject(a.to_string()))
            })
            .collect::<Result<Args, _>>()?;
        self.action_ids
            .get(&(si, ids))
            .copied()
            .ok_or(EngineError::RepeatedArgument(name))
    }

    pub fn encode_actions(&self, seq: &[GroundAction]) -> Result<Vec<ActionId>, EngineError> {
        seq.iter().map(|a| self.action_id(&a.name, &a.args)).collect()
    }

    pub fn encode_condition(&self, c: &Condition) -> Result<CompiledCondition, EngineError> {
        let mut pos = BitState::empty(self.words);
        let mut neg = BitState::empty(self.words);
        for l in c.literals() {
            match self.atom_id(&l.atom) {
                Ok(id) if l.positive => pos.insert(id),
                Ok(id) => neg.insert(id),
                // An atom with a repeated object is false in every state.
                Err(EngineError::AtomOutsideGrounding(_)) if !l.positive => {}
                Err(EngineError::AtomOutsideGrounding(_)) => return Ok(self.unsatisfiable()),
                Err(e) => return Err(e),
            }
        }
        Ok(CompiledCondition { pos, neg })
    }

    /// Requires and forbids the same bit, so it never holds.
    fn unsatisfiable(&self) -> CompiledCondition {
        let mut pos = BitState::empty(self.words);
        pos.insert(0);
        CompiledCondition { neg: pos.clone(), pos }
    }

    /// Conjunction of `(atom, positive)` literals given by id.
    pub fn literals_condition(&self, literals: &[(AtomId, bool)]) -> CompiledCondition {
        let mut pos = BitState::empty(self.words);
        let mut neg = BitState::empty(self.words);
        for &(atom, positive) in literals {
            if positive {
                pos.insert(atom);
            } else {
                neg.insert(atom);
            }
        }
        CompiledCondition { pos, neg }
    }

    pub fn applicable(&self, s: &BitState, id: ActionId) -> bool {
        s.is_superset(&self.actions[id].pre)
    }

    /// Applies without checking the precondition.
    pub fn successor(&self, s: &BitState, id: ActionId) -> BitState {
        let a = &self.actions[id];
        let mut out = s.clone();
        for ((w, del), add) in out.0.iter_mut().zip(&a.del.0).zip(&a.add.0) {
            *w = (*w & !del) | add;
        }
        out
    }

    /// Applicable action ids in canonical order.
    pub fn applicable_actions(&self, s: &BitState) -> Vec<ActionId> {
        let mut out = Vec::new();
        self.applicable_into(s, &mut out);
        out.sort_unstable();
        out
    }

    /// Replaces `out` with the applicable action ids, in no fixed order.
    pub fn applicable_into(&self, s: &BitState, out: &mut Vec<ActionId>) {
        out.clear();
        out.extend_from_slice(&self.unconditional);
        for atom in s.ones() {
            out.extend(self.triggers[atom].iter().copied().filter(|&id| self.applicable(s, id)));
        }
    }

    /// Runs the sequence; `Err(i)` names the first inapplicable step.
    pub fn execute(&self, s: &BitState, seq: &[ActionId]) -> Result<BitState, usize> {
        let mut cur = s.clone();
        for (i, &id) in seq.iter().enumerate() {
            if !self.applicable(&cur, id) {
                return Err(i);
            }
            cur = self.successor(&cur, id);
        }
        Ok(cur)
    }

    pub fn reachable(&self, start: &BitState, cap: usize) -> Reachable {
        let mut seen: HashSet<BitState> = HashSet::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        let mut truncated = false;
        if cap > 0 {
            seen.insert(start.clone());
            order.push(start.clone());
            queue.push_back(start.clone());
        } else {
            truncated = true;
        }
        'outer: while let Some(s) = queue.pop_front() {
            for id in self.applicable_actions(&s) {
                let next = self.successor(&s, id);
                if seen.contains(&next) {
                    continue;
                }
                if seen.len() >= cap {
                    truncated = true;
                    break 'outer;
                }
                seen.insert(next.clone());
                order.push(next.clone());
                queue.push_back(next);
            }
        }
        Reachable { states: order.iter().map(|b| self.decode_state(b)).collect(), truncated }
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocksworld::builtin_domain;
    use crate::strips::{apply, applicable, ground_actions, Literal};

    fn grounding(names: &[&str]) -> Grounding {
        Grounding::new(builtin_domain(), ObjectUniverse::of_type(names, "block").unwrap()).unwrap()
    }

    #[test]
    fn action_table_matches_ground_actions() {
        let g = grounding(&["A", "B", "C", "D"]);
        let named = ground_actions(builtin_domain(), g.universe());
        assert_eq!(g.num_actions(), named.len());
        for (id, a) in named.iter().enumerate() {
            assert_eq!(&g.action(id), a);
            assert_eq!(g.action_id(&a.name, &a.args).unwrap(), id);
        }
        assert_eq!(g.num_atoms(), 4 + 12 + 4);
    }

    #[test]
    fn compiled_semantics_agree_with_named_semantics() {
        let g = grounding(&["A", "B", "C"]);
        let table: State = ["A", "B", "C"]
            .iter()
            .flat_map(|n| [Atom::new("ontable", &[n]), Atom::new("clear", &[n])])
            .collect();
        let all = g.reachable(&g.encode_state(&table).unwrap(), 100);
        for s in &all.states {
            let bits = g.encode_state(s).unwrap();
            assert_eq!(&g.decode_state(&bits), s);
            let app = g.applicable_actions(&bits);
            for id in 0..g.num_actions() {
                let a = g.action(id);
                assert_eq!(applicable(s, &a), app.contains(&id));
                if applicable(s, &a) {
                    assert_eq!(g.decode_state(&g.successor(&bits, id)), apply(s, &a).unwrap());
                }
            }
        }
    }

    #[test]
    fn renaming_keeps_ids() {
        let g = grounding(&["A", "B", "C"]);
        let h = g.renamed(ObjectUniverse::of_type(&["X", "Y", "Z"], "block").unwrap()).unwrap();
        for id in 0..g.num_actions() {
            let a = g.action(id);
            let b = h.action(id);
            assert_eq!(a.name, b.name);
            assert_eq!(h.action_id(&b.name, &b.args).unwrap(), id);
        }
        assert_eq!(h.atom(0), Atom::new("clear", &["X"]));
    }

    #[test]
    fn repeated_object_atoms_compile_to_constants() {
        let g = grounding(&["A", "B"]);
        let s = g.encode_state(&State::new()).unwrap();
        let never = g.encode_condition(&Condition::literal(Literal::pos(Atom::new("on", &["A", "A"])))).unwrap();
        let always = g.encode_condition(&Condition::literal(Literal::neg(Atom::new("on", &["A", "A"])))).unwrap();
        assert!(!never.holds(&s));
        assert!(always.holds(&s));
    }
}
