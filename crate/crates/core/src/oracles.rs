//! Brute-force reference implementations for cross-checking the planner and
//! the configuration sampler.
//!
//! Nothing here touches the compiled grounding or the planner; everything
//! runs on named states through `applicable` and `apply`. Slow on purpose.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::DomainSpec;
use crate::planner::PlanCost;
use crate::strips::{applicable, apply, eval_condition, ground_actions, Condition, GroundAction, ObjectUniverse, State};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleBudget {
    /// Node expansions allowed per call, summed over all deepening rounds.
    pub max_states: u64,
    pub max_depth: usize,
}

impl OracleBudget {
    pub fn new(max_states: u64, max_depth: usize) -> Self {
        assert!(max_states > 0 && max_depth > 0, "oracle budget must be positive");
        OracleBudget { max_states, max_depth }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle budget exceeded after {0} expansions")]
    BudgetExceeded(u64),
}

struct Search<'a> {
    actions: Vec<GroundAction>,
    goal: &'a Condition,
    budget: OracleBudget,
    expanded: u64,
}

impl<'a> Search<'a> {
    fn new(d: &DomainSpec, u: &ObjectUniverse, goal: &'a Condition, budget: OracleBudget) -> Self {
        Search { actions: ground_actions(d, u), goal, budget, expanded: 0 }
    }

    fn tick(&mut self) -> Result<(), OracleError> {
        self.expanded += 1;
        if self.expanded > self.budget.max_states {
            Err(OracleError::BudgetExceeded(self.expanded))
        } else {
            Ok(())
        }
    }

    /// Whether some sequence of exactly `depth` actions ends in the goal.
    fn reaches(&mut self, s: &State, depth: usize) -> Result<bool, OracleError> {
        self.tick()?;
        if depth == 0 {
            return Ok(eval_condition(s, self.goal));
        }
        for i in 0..self.actions.len() {
            if !applicable(s, &self.actions[i]) {
                continue;
            }
            let next = apply(s, &self.actions[i]).expect("checked applicable");
            if self.reaches(&next, depth - 1)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn deepen(&mut self, s: &State) -> Result<PlanCost, OracleError> {
        for depth in 0..=self.budget.max_depth {
            if self.reaches(s, depth)? {
                return Ok(PlanCost::Finite(depth));
            }
        }
        Ok(PlanCost::Unreachable)
    }

    fn collect(&mut self, s: &State, depth: usize, prefix: &mut Vec<GroundAction>, out: &mut Vec<Vec<GroundAction>>) -> Result<(), OracleError> {
        self.tick()?;
        if depth == 0 {
            if eval_condition(s, self.goal) {
                out.push(prefix.clone());
            }
            return Ok(());
        }
        for i in 0..self.actions.len() {
            if !applicable(s, &self.actions[i]) {
                continue;
            }
            let next = apply(s, &self.actions[i]).expect("checked applicable");
            prefix.push(self.actions[i].clone());
            self.collect(&next, depth - 1, prefix, out)?;
            prefix.pop();
        }
        Ok(())
    }
}

/// Optimal plan length by iterative deepening over every applicable action,
/// revisiting states freely. `Unreachable` means none within `max_depth`.
pub fn oracle_optimal_cost(
    d: &DomainSpec,
    u: &ObjectUniverse,
    s: &State,
    goal: &Condition,
    budget: OracleBudget,
) -> Result<PlanCost, OracleError> {
    Search::new(d, u, goal, budget).deepen(s)
}

/// All optimal plans, found by listing every applicable sequence of the
/// optimal length. Empty when the goal is unreachable within budget.
pub fn oracle_optimal_plans(
    d: &DomainSpec,
    u: &ObjectUniverse,
    s: &State,
    goal: &Condition,
    budget: OracleBudget,
) -> Result<Vec<Vec<GroundAction>>, OracleError> {
    let mut search = Search::new(d, u, goal, budget);
    let PlanCost::Finite(k) = search.deepen(s)? else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    search.collect(s, k, &mut Vec::with_capacity(k), &mut out)?;
    Ok(out)
}

/// Literal prefix membership against a precomputed list of plans.
pub fn is_prefix_of_any(plans: &[Vec<GroundAction>], seq: &[GroundAction]) -> bool {
    plans.iter().any(|p| p.len() >= seq.len() && p.iter().zip(seq).all(|(a, b)| a.same_call(b)))
}

pub fn oracle_prefix_check(
    d: &DomainSpec,
    u: &ObjectUniverse,
    s: &State,
    goal: &Condition,
    seq: &[GroundAction],
    budget: OracleBudget,
) -> Result<bool, OracleError> {
    Ok(is_prefix_of_any(&oracle_optimal_plans(d, u, s, goal, budget)?, seq))
}

/// Counts set-of-towers arrangements of `m` labelled blocks by building
/// them: the lowest unplaced block picks its tower-mates from the rest, the
/// tower is ordered every possible way, and the remainder recurses.
pub fn oracle_count_configurations(m: usize) -> u64 {
    assert!(m <= 8, "oracle counting is limited to 8 blocks");
    fn orders(k: u32) -> u64 {
        // Build each ordering by choosing the next block from those left.
        if k == 0 {
            1
        } else {
            (0..k).map(|_| orders(k - 1)).sum()
        }
    }
    fn count(remaining: u32) -> u64 {
        if remaining == 0 {
            return 1;
        }
        let lowest = remaining & remaining.wrapping_neg();
        let rest = remaining & !lowest;
        let mut total = 0;
        // Every subset of `rest`, including the empty one.
        let mut sub = rest;
        loop {
            total += orders(sub.count_ones() + 1) * count(rest & !sub);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        total
    }
    count(((1u64 << m) - 1) as u32)
}
