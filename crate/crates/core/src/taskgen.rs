//! Labelled symbolic problems for the four tasks, exact label balancing,
//! deduplication, and the standard and generalization dataset suite.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::blocksworld::{builtin_domain, configuration_to_state, sample_configuration, universe, NamePool, NamePoolError, PoolKind};
use crate::planner::{cost_from, default_bound, is_goal_achieving, is_optimal_prefix, optimal_prefix_bits};
use crate::rng::{derive_seed, derive_seed_labeled, SeededRng};
use crate::strips::{
    eval_condition, execute, ActionId, AtomId, BitState, CompiledCondition, Condition, EngineError, GroundAction,
    Grounding, Literal, State, Atom,
};

/// Condition redraws before the whole instance is resampled.
pub const CONDITION_REDRAWS: usize = 200;
/// Whole-instance resamples before giving up on one index.
pub const FULL_RESAMPLES: usize = 100;
/// Fresh attempts for one index whose draws keep duplicating earlier ones.
pub const DUPLICATE_RETRIES: u64 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Projection,
    Executability,
    Planning,
    GoalRecognition,
}

impl Task {
    pub const ALL: [Task; 4] = [Task::Projection, Task::Executability, Task::Planning, Task::GoalRecognition];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Projection => "projection",
            Task::Executability => "executability",
            Task::Planning => "planning",
            Task::GoalRecognition => "goal_recognition",
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            Task::Projection => "pr",
            Task::Executability => "ex",
            Task::Planning => "pl",
            Task::GoalRecognition => "gr",
        }
    }

    pub fn has_condition(self) -> bool {
        self != Task::Executability
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.as_str() == s || t.short() == s || (s == "goal-recognition" && *t == Task::GoalRecognition))
            .ok_or_else(|| format!("unknown task `{s}` (projection|executability|planning|goal_recognition)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionShape {
    Literals,
    Conjunctions,
    /// Half literals, half conjunctions, by coin flip.
    Mixed,
}

impl ConditionShape {
    pub fn as_str(self) -> &'static str {
        match self {
            ConditionShape::Literals => "literals",
            ConditionShape::Conjunctions => "conjunctions",
            ConditionShape::Mixed => "mixed",
        }
    }
}

impl fmt::Display for ConditionShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConditionShape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "literals" => Ok(ConditionShape::Literals),
            "conjunctions" => Ok(ConditionShape::Conjunctions),
            "mixed" => Ok(ConditionShape::Mixed),
            other => Err(format!("unknown shape `{other}` (literals|conjunctions|mixed)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GeTag {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "GE1")]
    Ge1,
    #[serde(rename = "GE2")]
    Ge2,
    #[serde(rename = "GE3")]
    Ge3,
    #[serde(rename = "GE4-lit")]
    Ge4Lit,
    #[serde(rename = "GE4-conj")]
    Ge4Conj,
}

impl GeTag {
    pub fn as_str(self) -> &'static str {
        match self {
            GeTag::None => "none",
            GeTag::Ge1 => "GE1",
            GeTag::Ge2 => "GE2",
            GeTag::Ge3 => "GE3",
            GeTag::Ge4Lit => "GE4-lit",
            GeTag::Ge4Conj => "GE4-conj",
        }
    }
}

impl fmt::Display for GeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub task: Task,
    pub objects: usize,
    pub length: usize,
    pub count: usize,
    pub seed: u64,
    pub pool: PoolKind,
    pub shape: ConditionShape,
    pub ge_tag: GeTag,
    /// Deepest goal distance searched when sampling goal-recognition
    /// goals; goals farther away are redrawn. Defaults to
    /// [`default_bound`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal_horizon: Option<usize>,
}

impl GenConfig {
    pub fn new(task: Task, objects: usize, length: usize, count: usize, seed: u64) -> Self {
        GenConfig {
            task,
            objects,
            length,
            count,
            seed,
            pool: PoolKind::Standard,
            shape: ConditionShape::Mixed,
            ge_tag: GeTag::None,
            goal_horizon: None,
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError::InvalidConfig(m));
        if self.count % 2 != 0 {
            return bad(format!("count {} is odd; labels must split evenly", self.count));
        }
        if self.length == 0 {
            return bad("sequence length must be at least 1".into());
        }
        if self.objects < 2 {
            return bad(format!("{} objects; at least 2 needed", self.objects));
        }
        let available = NamePool::builtin().pool(self.pool).len();
        if self.objects > available {
            return bad(format!("{} objects but the {} pool has {available} names", self.objects, self.pool));
        }
        if self.goal_horizon == Some(0) {
            return bad("goal horizon must be positive".into());
        }
        Ok(())
    }

    pub fn horizon(&self) -> usize {
        self.goal_horizon.unwrap_or_else(|| default_bound(self.objects))
    }

    /// File stem used by the suite, e.g. `pr-L2` or `gr-ge1-M10-L2`.
    pub fn dataset_name(&self) -> String {
        let t = self.task.short();
        match self.ge_tag {
            GeTag::None => format!("{t}-L{}", self.length),
            GeTag::Ge1 => format!("{t}-ge1-M{}-L{}", self.objects, self.length),
            GeTag::Ge2 => format!("{t}-ge2-L{}", self.length),
            GeTag::Ge3 => format!("{t}-ge3-L{}", self.length),
            GeTag::Ge4Lit => format!("{t}-ge4-literals"),
            GeTag::Ge4Conj => format!("{t}-ge4-conjunctions"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub objects: usize,
    pub length: usize,
    pub ge_tag: GeTag,
    /// Seed of this instance's own random stream.
    pub seed: u64,
    pub pool: PoolKind,
    pub names: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemInstance {
    pub task: Task,
    /// Initial state atoms in display order.
    pub initial_state: Vec<Atom>,
    pub actions: Vec<GroundAction>,
    /// Query condition (projection) or goal (planning, goal recognition).
    pub condition: Option<Condition>,
    pub label: bool,
    pub meta: InstanceMeta,
}

impl ProblemInstance {
    pub fn state(&self) -> State {
        self.initial_state.iter().cloned().collect()
    }

    /// Order-insensitive in the state and in conjunctions; display order
    /// is presentation only.
    pub fn canonical(&self) -> String {
        let state: Vec<String> = self.state().iter().map(|a| a.to_string()).collect();
        let actions: Vec<String> = self.actions.iter().map(|a| a.to_string()).collect();
        let cond = match &self.condition {
            Some(c) => {
                let lits: Vec<String> = c
                    .canonical()
                    .into_iter()
                    .map(|l| format!("{}{}", if l.positive { "" } else { "!" }, l.atom))
                    .collect();
                lits.join("&")
            }
            None => String::new(),
        };
        format!("{}|{}|{}|{}", self.task, state.join(";"), actions.join(";"), cond)
    }

    /// First 16 bytes of the SHA-256 of [`Self::canonical`], hex.
    pub fn id(&self) -> String {
        hex::encode(&Sha256::digest(self.canonical().as_bytes())[..16])
    }

    /// Recomputes the answer from the symbolic fields with the named-state
    /// engine and the planner. `g` must ground the instance's objects.
    pub fn recompute_label(&self, g: &Grounding) -> Result<bool, GenError> {
        let s = self.state();
        if self.task == Task::Executability {
            return Ok(execute(&s, &self.actions).is_success());
        }
        let cond = self.condition.as_ref().ok_or(GenError::MissingCondition(self.task))?;
        Ok(match self.task {
            Task::Projection => execute(&s, &self.actions).final_state().is_some_and(|end| eval_condition(end, cond)),
            Task::Planning => is_goal_achieving(&s, cond, &self.actions),
            _ => is_optimal_prefix(g, &s, cond, &self.actions, default_bound(self.meta.objects))?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("index {index}: no instance with label {target} after {attempts} resamples")]
    ResampleBudgetExceeded { index: usize, target: bool, attempts: usize },
    #[error("only {generated} of {requested} distinct instances; {duplicates} duplicates rejected")]
    YieldFailure { generated: usize, requested: usize, duplicates: u64 },
    #[error("{0} instance has no condition")]
    MissingCondition(Task),
    #[error(transparent)]
    Names(#[from] NamePoolError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Rejection bookkeeping, reported in the manifest.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenCounters {
    pub condition_redraws: u64,
    pub sequence_redraws: u64,
    pub full_resamples: u64,
    pub duplicates_rejected: u64,
}

impl GenCounters {
    fn add(&mut self, o: &GenCounters) {
        self.condition_redraws += o.condition_redraws;
        self.sequence_redraws += o.sequence_redraws;
        self.full_resamples += o.full_resamples;
        self.duplicates_rejected += o.duplicates_rejected;
    }
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub config: GenConfig,
    pub instances: Vec<ProblemInstance>,
    pub counters: GenCounters,
}

/// An instance in id space before names are attached.
struct Draft {
    state: BitState,
    actions: Vec<ActionId>,
    condition: Vec<(AtomId, bool)>,
}

/// Per-dataset generator. Generation runs over placeholder object names;
/// real names are attached at the end, so the draws do not depend on them.
pub struct Generator {
    cfg: GenConfig,
    generic: Grounding,
    placeholders: Vec<String>,
}

impl Generator {
    pub fn new(cfg: GenConfig) -> Result<Self, GenError> {
        cfg.validate()?;
        let placeholders: Vec<String> = (0..cfg.objects).map(|i| format!("b{i}")).collect();
        let generic = Grounding::new(builtin_domain(), universe(&placeholders)?)?;
        Ok(Generator { cfg, generic, placeholders })
    }

    pub fn config(&self) -> &GenConfig {
        &self.cfg
    }

    /// Instance `index` (label true iff `index` is even) from attempt
    /// `attempt`'s random stream. Pure in `(cfg, index, attempt)`.
    pub fn instance(&self, index: usize, attempt: u64) -> Result<(ProblemInstance, GenCounters), GenError> {
        let seed = derive_seed(self.cfg.seed, &[index as u64, attempt]);
        let mut rng = SeededRng::new(seed);
        let target = index % 2 == 0;
        let mut counters = GenCounters::default();
        let names = NamePool::builtin().assign_names(self.cfg.objects, self.cfg.pool, &mut rng)?;
        for _ in 0..FULL_RESAMPLES {
            if let Some(d) = self.draft(target, &mut rng, &mut counters) {
                return Ok((self.finish(d, target, names, seed, &mut rng)?, counters));
            }
            counters.full_resamples += 1;
        }
        Err(GenError::ResampleBudgetExceeded { index, target, attempts: FULL_RESAMPLES })
    }

    fn finish(&self, d: Draft, label: bool, names: Vec<String>, seed: u64, rng: &mut SeededRng) -> Result<ProblemInstance, GenError> {
        let g = self.generic.renamed(universe(&names)?)?;
        let mut order: Vec<AtomId> = d.state.ones().collect();
        rng.shuffle(&mut order);
        let lits: Vec<Literal> = d.condition.iter().map(|&(a, positive)| Literal { atom: g.atom(a), positive }).collect();
        let condition = match lits.as_slice() {
            [] => None,
            [l] => Some(Condition::literal(l.clone())),
            [a, b] => Some(Condition::and(a.clone(), b.clone())?),
            _ => unreachable!("conditions have at most two literals"),
        };
        Ok(ProblemInstance {
            task: self.cfg.task,
            initial_state: order.into_iter().map(|a| g.atom(a)).collect(),
            actions: d.actions.iter().map(|&a| g.action(a)).collect(),
            condition,
            label,
            meta: InstanceMeta {
                objects: self.cfg.objects,
                length: self.cfg.length,
                ge_tag: self.cfg.ge_tag,
                seed,
                pool: self.cfg.pool,
                names,
            },
        })
    }

    fn sample_state(&self, rng: &mut SeededRng) -> BitState {
        let c = sample_configuration(self.cfg.objects, rng);
        self.generic
            .encode_state(&configuration_to_state(&c, &self.placeholders))
            .expect("configurations ground over their own objects")
    }

    /// One or two distinct ground atoms with independent polarities.
    fn sample_condition(&self, rng: &mut SeededRng) -> Vec<(AtomId, bool)> {
        let conj = match self.cfg.shape {
            ConditionShape::Literals => false,
            ConditionShape::Conjunctions => true,
            ConditionShape::Mixed => rng.coin(),
        };
        let n = self.generic.num_atoms();
        let a = rng.below(n);
        let first = (a, rng.coin());
        if !conj {
            return vec![first];
        }
        let mut b = rng.below(n - 1);
        if b >= a {
            b += 1;
        }
        vec![first, (b, rng.coin())]
    }

    fn compile(&self, lits: &[(AtomId, bool)]) -> CompiledCondition {
        self.generic.literals_condition(lits)
    }

    /// Uniform choice among applicable actions at every step.
    fn walk(&self, s: &BitState, n: usize, rng: &mut SeededRng) -> Option<Vec<ActionId>> {
        let mut cur = s.clone();
        let mut seq = Vec::with_capacity(n);
        for _ in 0..n {
            let &a = rng.choose(&self.generic.applicable_actions(&cur))?;
            cur = self.generic.successor(&cur, a);
            seq.push(a);
        }
        Some(seq)
    }

    /// Independent uniform draws from the whole ground-action space.
    fn uniform_sequence(&self, n: usize, rng: &mut SeededRng) -> Vec<ActionId> {
        (0..n).map(|_| rng.below(self.generic.num_actions())).collect()
    }

    fn draft(&self, target: bool, rng: &mut SeededRng, c: &mut GenCounters) -> Option<Draft> {
        let n = self.cfg.length;
        let g = &self.generic;
        let s = self.sample_state(rng);
        match self.cfg.task {
            Task::Projection => {
                let actions = self.walk(&s, n, rng)?;
                let end = g.execute(&s, &actions).expect("walks are executable");
                for _ in 0..CONDITION_REDRAWS {
                    let cond = self.sample_condition(rng);
                    if self.compile(&cond).holds(&end) == target {
                        return Some(Draft { state: s, actions, condition: cond });
                    }
                    c.condition_redraws += 1;
                }
                None
            }
            Task::Executability => {
                if target {
                    let actions = self.walk(&s, n, rng)?;
                    return Some(Draft { state: s, actions, condition: Vec::new() });
                }
                for _ in 0..CONDITION_REDRAWS {
                    let actions = self.uniform_sequence(n, rng);
                    if g.execute(&s, &actions).is_err() {
                        return Some(Draft { state: s, actions, condition: Vec::new() });
                    }
                    c.sequence_redraws += 1;
                }
                None
            }
            Task::Planning => {
                let (cond, goal) = (0..CONDITION_REDRAWS).find_map(|_| {
                    let cond = self.sample_condition(rng);
                    let goal = self.compile(&cond);
                    if cost_from(g, &s, &goal, n).finite().is_some() {
                        Some((cond, goal))
                    } else {
                        c.condition_redraws += 1;
                        None
                    }
                })?;
                if target {
                    let actions = self.exact_plan(&s, &goal, n, rng)?;
                    return Some(Draft { state: s, actions, condition: cond });
                }
                for _ in 0..CONDITION_REDRAWS {
                    // Same two processes as the other tasks, filtered by label.
                    let actions = if rng.coin() { self.walk(&s, n, rng)? } else { self.uniform_sequence(n, rng) };
                    let achieved = g.execute(&s, &actions).is_ok_and(|end| goal.holds(&end));
                    if !achieved {
                        return Some(Draft { state: s, actions, condition: cond });
                    }
                    c.sequence_redraws += 1;
                }
                None
            }
            Task::GoalRecognition => {
                let horizon = self.cfg.horizon();
                for _ in 0..CONDITION_REDRAWS {
                    let cond = self.sample_condition(rng);
                    let goal = self.compile(&cond);
                    let Some(k) = cost_from(g, &s, &goal, horizon).finite() else {
                        c.condition_redraws += 1;
                        continue;
                    };
                    if target {
                        if k < n {
                            c.condition_redraws += 1;
                            continue;
                        }
                        let actions = self.optimal_prefix(&s, &goal, k, n, rng);
                        return Some(Draft { state: s, actions, condition: cond });
                    }
                    let actions = self.walk(&s, n, rng)?;
                    if !optimal_prefix_bits(g, &s, &goal, &actions, horizon) {
                        return Some(Draft { state: s, actions, condition: cond });
                    }
                    c.sequence_redraws += 1;
                }
                None
            }
        }
    }

    /// A uniformly stepped walk of exactly `n` actions ending in `goal`:
    /// each step picks among successors from which the goal is still
    /// reachable in exactly the remaining number of steps.
    fn exact_plan(&self, s: &BitState, goal: &CompiledCondition, n: usize, rng: &mut SeededRng) -> Option<Vec<ActionId>> {
        let g = &self.generic;
        let mut memo = std::collections::HashMap::new();
        fn reaches(
            g: &Grounding,
            goal: &CompiledCondition,
            s: &BitState,
            r: usize,
            memo: &mut std::collections::HashMap<(BitState, usize), bool>,
        ) -> bool {
            if r == 0 {
                return goal.holds(s);
            }
            if let Some(&v) = memo.get(&(s.clone(), r)) {
                return v;
            }
            let v = g.applicable_actions(s).into_iter().any(|a| reaches(g, goal, &g.successor(s, a), r - 1, memo));
            memo.insert((s.clone(), r), v);
            v
        }
        if !reaches(g, goal, s, n, &mut memo) {
            return None;
        }
        let mut cur = s.clone();
        let mut seq = Vec::with_capacity(n);
        for step in 0..n {
            let r = n - step - 1;
            let viable: Vec<ActionId> = g
                .applicable_actions(&cur)
                .into_iter()
                .filter(|&a| reaches(g, goal, &g.successor(&cur, a), r, &mut memo))
                .collect();
            let &a = rng.choose(&viable).expect("viability was checked one step earlier");
            cur = g.successor(&cur, a);
            seq.push(a);
        }
        Some(seq)
    }

    /// First `n` steps of a random optimal plan of length `k >= n`.
    fn optimal_prefix(&self, s: &BitState, goal: &CompiledCondition, k: usize, n: usize, rng: &mut SeededRng) -> Vec<ActionId> {
        let g = &self.generic;
        let mut cur = s.clone();
        let mut seq = Vec::with_capacity(n);
        for step in 0..n {
            let r = k - step - 1;
            let viable: Vec<ActionId> = g
                .applicable_actions(&cur)
                .into_iter()
                .filter(|&a| cost_from(g, &g.successor(&cur, a), goal, r).finite().is_some())
                .collect();
            let &a = rng.choose(&viable).expect("an optimal plan continues from every state on it");
            cur = g.successor(&cur, a);
            seq.push(a);
        }
        seq
    }
}

#[cfg(feature = "parallel")]
fn map_indices<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_indices<T, F: Fn(usize) -> T>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

/// `cfg.count` distinct instances, even indices labelled true. Indices are
/// generated independently (in parallel with the `parallel` feature) and
/// merged in index order; a duplicate is replaced by the next attempt for
/// its index, so the result does not depend on the worker count.
pub fn gen_dataset(cfg: &GenConfig) -> Result<Dataset, GenError> {
    let generator = Generator::new(cfg.clone())?;
    let first = map_indices(cfg.count, |i| generator.instance(i, 0));
    let mut seen = HashSet::with_capacity(cfg.count);
    let mut instances = Vec::with_capacity(cfg.count);
    let mut counters = GenCounters::default();
    for (i, r) in first.into_iter().enumerate() {
        let (mut inst, c) = r?;
        counters.add(&c);
        let mut attempt = 0;
        while !seen.insert(inst.canonical()) {
            counters.duplicates_rejected += 1;
            attempt += 1;
            if attempt > DUPLICATE_RETRIES {
                return Err(GenError::YieldFailure {
                    generated: instances.len(),
                    requested: cfg.count,
                    duplicates: counters.duplicates_rejected,
                });
            }
            let (next, c) = generator.instance(i, attempt)?;
            counters.add(&c);
            inst = next;
        }
        instances.push(inst);
    }
    Ok(Dataset { config: cfg.clone(), instances, counters })
}

/// Standard datasets have 15,000 examples; the generalization test sets
/// and the literal-only training sets do too, the conjunction-only sets
/// 3,000.
pub const STANDARD_COUNT: usize = 15_000;
pub const GE4_CONJ_COUNT: usize = 3_000;
pub const STANDARD_OBJECTS: usize = 5;
pub const GE1_OBJECTS: usize = 10;
/// Sequence length used where a generalization set varies something else.
pub const GE_LENGTH: usize = 2;
/// Goal-recognition goal horizon at ten objects; see [`GenConfig::goal_horizon`].
pub const GE1_GR_HORIZON: usize = 5;

/// Seed for one dataset. The pool and tag are left out so that each
/// unseen-name set shares its draws with the standard set of the same
/// shape.
pub fn dataset_seed(base: u64, task: Task, objects: usize, length: usize, shape: ConditionShape, count: usize) -> u64 {
    derive_seed_labeled(base, &format!("{task}/M{objects}/N{length}/{shape}/{count}"))
}

/// The 32 datasets: 12 standard, then GE1, GE2, GE3 and GE4.
pub fn ge_suite(base_seed: u64) -> Vec<GenConfig> {
    let mk = |task: Task, objects: usize, length: usize, count: usize, shape: ConditionShape, pool: PoolKind, ge_tag: GeTag| {
        GenConfig {
            task,
            objects,
            length,
            count,
            seed: dataset_seed(base_seed, task, objects, length, shape, count),
            pool,
            shape,
            ge_tag,
            goal_horizon: None,
        }
    };
    let std_pool = PoolKind::Standard;
    let mixed = ConditionShape::Mixed;
    let mut out = Vec::with_capacity(32);
    for task in Task::ALL {
        for n in 1..=3 {
            out.push(mk(task, STANDARD_OBJECTS, n, STANDARD_COUNT, mixed, std_pool, GeTag::None));
        }
    }
    for task in Task::ALL {
        let mut c = mk(task, GE1_OBJECTS, GE_LENGTH, STANDARD_COUNT, mixed, std_pool, GeTag::Ge1);
        if task == Task::GoalRecognition {
            c.goal_horizon = Some(GE1_GR_HORIZON);
        }
        out.push(c);
    }
    for task in [Task::Projection, Task::Executability, Task::Planning] {
        for n in [4, 5] {
            out.push(mk(task, STANDARD_OBJECTS, n, STANDARD_COUNT, mixed, std_pool, GeTag::Ge2));
        }
    }
    for task in Task::ALL {
        out.push(mk(task, STANDARD_OBJECTS, GE_LENGTH, STANDARD_COUNT, mixed, PoolKind::Unseen, GeTag::Ge3));
    }
    for task in [Task::Projection, Task::Planning, Task::GoalRecognition] {
        out.push(mk(task, STANDARD_OBJECTS, GE_LENGTH, STANDARD_COUNT, ConditionShape::Literals, std_pool, GeTag::Ge4Lit));
        out.push(mk(task, STANDARD_OBJECTS, GE_LENGTH, GE4_CONJ_COUNT, ConditionShape::Conjunctions, std_pool, GeTag::Ge4Conj));
    }
    out
}
