//! Optimal-length planning by blind breadth-first search, and the plan
//! predicates that label planning and goal-recognition problems.

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::strips::{
    eval_condition, execute, ActionId, BitState, CompiledCondition, Condition, EngineError, GroundAction,
    Grounding, State,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanCost {
    Finite(usize),
    Unreachable,
}

impl PlanCost {
    pub fn finite(self) -> Option<usize> {
        match self {
            PlanCost::Finite(k) => Some(k),
            PlanCost::Unreachable => None,
        }
    }
}

/// Any blocks-world goal that some configuration satisfies is reachable in
/// at most 2M - 2 moves (unstack everything, rebuild); two steps of slack.
pub fn default_bound(objects: usize) -> usize {
    2 * objects + 2
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanSet {
    pub plans: Vec<Vec<GroundAction>>,
    /// False when `cap` cut the enumeration short.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PlannerError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("goal unreachable within {0} steps")]
    Unreachable(usize),
}

/// Shortest distance from `s` to a state satisfying `goal`, searching at
/// most `bound` steps deep with visited-state pruning.
pub fn cost_from(g: &Grounding, s: &BitState, goal: &CompiledCondition, bound: usize) -> PlanCost {
    if goal.holds(s) {
        return PlanCost::Finite(0);
    }
    let mut visited: HashSet<BitState> = HashSet::default();
    visited.insert(s.clone());
    let mut frontier = vec![s.clone()];
    let mut acts = Vec::new();
    for depth in 1..=bound {
        let mut next = Vec::new();
        for st in &frontier {
            g.applicable_into(st, &mut acts);
            for &id in &acts {
                let n = g.successor(st, id);
                if visited.contains(&n) {
                    continue;
                }
                if goal.holds(&n) {
                    return PlanCost::Finite(depth);
                }
                visited.insert(n.clone());
                next.push(n);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    PlanCost::Unreachable
}

/// Prefix test on compiled inputs; see [`is_optimal_prefix`].
pub fn optimal_prefix_bits(g: &Grounding, s: &BitState, goal: &CompiledCondition, seq: &[ActionId], bound: usize) -> bool {
    let Ok(end) = g.execute(s, seq) else {
        return false;
    };
    let PlanCost::Finite(k) = cost_from(g, s, goal, bound) else {
        return false;
    };
    if seq.len() > k {
        return false;
    }
    // Distance from `end` is at least k - len, so reaching the goal within
    // that many steps means exactly that many.
    cost_from(g, &end, goal, k - seq.len()).finite().is_some()
}

pub fn optimal_cost(g: &Grounding, s: &State, goal: &Condition, bound: usize) -> Result<PlanCost, EngineError> {
    Ok(cost_from(g, &g.encode_state(s)?, &g.encode_condition(goal)?, bound))
}

pub fn achievable_within(g: &Grounding, s: &State, goal: &Condition, n: usize) -> Result<bool, EngineError> {
    Ok(matches!(optimal_cost(g, s, goal, n)?, PlanCost::Finite(k) if k <= n))
}

/// The sequence executes from `s` and `goal` holds in the final state.
/// Goals reached midway and then undone do not count.
pub fn is_goal_achieving(s: &State, goal: &Condition, seq: &[GroundAction]) -> bool {
    execute(s, seq).final_state().is_some_and(|end| eval_condition(end, goal))
}

/// The sequence is a prefix of some optimal plan for `goal`. False when
/// the goal is unreachable within `bound`.
pub fn is_optimal_prefix(
    g: &Grounding,
    s: &State,
    goal: &Condition,
    seq: &[GroundAction],
    bound: usize,
) -> Result<bool, EngineError> {
    let ids = g.encode_actions(seq)?;
    Ok(optimal_prefix_bits(g, &g.encode_state(s)?, &g.encode_condition(goal)?, &ids, bound))
}

/// Every optimal plan, in canonical action order, up to `cap` plans.
pub fn enumerate_optimal_plans(
    g: &Grounding,
    s: &State,
    goal: &Condition,
    bound: usize,
    cap: usize,
) -> Result<PlanSet, PlannerError> {
    let start = g.encode_state(s)?;
    let goal_bits = g.encode_condition(goal)?;
    let k = cost_from(g, &start, &goal_bits, bound)
        .finite()
        .ok_or(PlannerError::Unreachable(bound))?;
    let mut search = PlanEnumeration { g, goal: &goal_bits, memo: HashMap::default(), plans: Vec::new(), cap, complete: true };
    let mut prefix = Vec::with_capacity(k);
    search.extend(&start, k, &mut prefix);
    Ok(PlanSet {
        plans: search.plans.iter().map(|p| p.iter().map(|&id| g.action(id)).collect()).collect(),
        complete: search.complete,
    })
}

struct PlanEnumeration<'a> {
    g: &'a Grounding,
    goal: &'a CompiledCondition,
    // (state, steps left) -> goal reachable in exactly that many steps
    memo: HashMap<(BitState, usize), bool>,
    plans: Vec<Vec<ActionId>>,
    cap: usize,
    complete: bool,
}

impl PlanEnumeration<'_> {
    fn extend(&mut self, s: &BitState, remaining: usize, prefix: &mut Vec<ActionId>) {
        if remaining == 0 {
            if self.goal.holds(s) {
                if self.plans.len() >= self.cap {
                    self.complete = false;
                } else {
                    self.plans.push(prefix.clone());
                }
            }
            return;
        }
        for id in self.g.applicable_actions(s) {
            if !self.complete {
                return;
            }
            let n = self.g.successor(s, id);
            let key = (n, remaining - 1);
            let viable = match self.memo.get(&key) {
                Some(&v) => v,
                None => {
                    let v = cost_from(self.g, &key.0, self.goal, key.1).finite().is_some();
                    self.memo.insert(key.clone(), v);
                    v
                }
            };
            if viable {
                prefix.push(id);
                self.extend(&key.0, remaining - 1, prefix);
                prefix.pop();
            }
        }
    }
}
