//! The bundled blocks world: domain, legal-state sampling, and block names.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use thiserror::Error;

use crate::domain::{parse_domain, validate_domain, DomainSpec};
use crate::rng::SeededRng;
use crate::strips::{Atom, Notation, ObjectUniverse, State};

pub const BLOCKSWORLD_PDDL: &str = include_str!("../data/blocksworld.pddl");
pub const NAMES_MANIFEST: &str = include_str!("../data/names.txt");
pub const BLOCK_TYPE: &str = "block";

pub fn builtin_domain() -> &'static DomainSpec {
    static DOMAIN: OnceLock<DomainSpec> = OnceLock::new();
    DOMAIN.get_or_init(|| {
        let d = parse_domain(BLOCKSWORLD_PDDL).expect("bundled domain parses");
        assert!(validate_domain(&d).is_ok(), "bundled domain validates");
        d
    })
}

/// camelCase spellings used in symbolic output.
pub fn notation() -> Notation {
    Notation::new([
        ("ontable", "onTable"),
        ("movetotable", "moveToTable"),
        ("movefromtable", "moveFromTable"),
    ])
}

pub fn universe<S: AsRef<str>>(names: &[S]) -> Result<ObjectUniverse, crate::strips::EngineError> {
    ObjectUniverse::of_type(names, BLOCK_TYPE)
}

/// Towers of block indices, bottom to top. Kept sorted by bottom block so
/// that equal configurations compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockConfiguration {
    towers: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfigurationError {
    #[error("block {0} appears more than once")]
    Repeated(usize),
    #[error("empty tower")]
    EmptyTower,
    #[error("blocks must be numbered 0..{0}")]
    Gap(usize),
}

impl BlockConfiguration {
    pub fn new(mut towers: Vec<Vec<usize>>) -> Result<Self, ConfigurationError> {
        let mut seen = BTreeSet::new();
        for t in &towers {
            if t.is_empty() {
                return Err(ConfigurationError::EmptyTower);
            }
            for &b in t {
                if !seen.insert(b) {
                    return Err(ConfigurationError::Repeated(b));
                }
            }
        }
        if seen.iter().copied().ne(0..seen.len()) {
            return Err(ConfigurationError::Gap(seen.len()));
        }
        towers.sort();
        Ok(BlockConfiguration { towers })
    }

    pub fn towers(&self) -> &[Vec<usize>] {
        &self.towers
    }

    pub fn num_blocks(&self) -> usize {
        self.towers.iter().map(Vec::len).sum()
    }
}

/// Lah number L(n, k): ways to split n labeled items into k non-empty lists.
fn lah(n: u32, k: u32) -> u128 {
    if n == 0 && k == 0 {
        return 1;
    }
    if n == 0 || k == 0 || k > n {
        return 0;
    }
    let binom = (0..(k - 1) as u128).fold(1u128, |acc, i| acc * ((n - 1) as u128 - i) / (i + 1));
    let ratio: u128 = ((k + 1)..=n).map(u128::from).product();
    binom * ratio
}

/// Number of legal configurations of `m` labeled blocks.
pub fn count_configurations(m: usize) -> u128 {
    (0..=m as u32).map(|k| lah(m as u32, k)).sum()
}

/// Uniform over all legal configurations of `m` blocks.
///
/// Draws the tower count with weight L(m, k), then a uniform permutation cut
/// at k - 1 uniform gaps. Each configuration with k towers arises from
/// exactly k! (permutation, cut) pairs, so the result is uniform.
pub fn sample_configuration(m: usize, rng: &mut SeededRng) -> BlockConfiguration {
    assert!((1..=25).contains(&m), "supported block counts are 1..=25");
    let total = count_configurations(m);
    let mut r = rng.below_u128(total);
    let mut k = 1;
    loop {
        let w = lah(m as u32, k as u32);
        if r < w {
            break;
        }
        r -= w;
        k += 1;
    }
    let mut order: Vec<usize> = (0..m).collect();
    rng.shuffle(&mut order);
    let mut gaps: Vec<usize> = (1..m).collect();
    // Partial shuffle: the first k - 1 entries are a uniform (k-1)-subset.
    for i in 0..k - 1 {
        let j = i + rng.below(gaps.len() - i);
        gaps.swap(i, j);
    }
    let mut cuts: Vec<usize> = gaps[..k - 1].to_vec();
    cuts.sort_unstable();
    let mut towers = Vec::with_capacity(k);
    let mut start = 0;
    for c in cuts.into_iter().chain(std::iter::once(m)) {
        towers.push(order[start..c].to_vec());
        start = c;
    }
    BlockConfiguration::new(towers).expect("sampler yields a partition")
}

/// Emits `ontable` for each bottom, `on` for each adjacent pair, and
/// `clear` for each top. Atoms come out tower by tower, bottom up.
pub fn configuration_atoms<S: AsRef<str>>(c: &BlockConfiguration, names: &[S]) -> Vec<Atom> {
    let name = |b: usize| names[b].as_ref();
    let mut atoms = Vec::new();
    for t in &c.towers {
        atoms.push(Atom::new("ontable", &[name(t[0])]));
        for w in t.windows(2) {
            atoms.push(Atom::new("on", &[name(w[1]), name(w[0])]));
        }
        atoms.push(Atom::new("clear", &[name(*t.last().unwrap())]));
    }
    atoms
}

pub fn configuration_to_state<S: AsRef<str>>(c: &BlockConfiguration, names: &[S]) -> State {
    configuration_atoms(c, names).into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LegalityError {
    #[error("unknown block `{0}`")]
    UnknownBlock(String),
    #[error("unexpected atom `{0}`")]
    UnexpectedAtom(String),
    #[error("block `{0}` must be on exactly one of the table or another block")]
    Support(String),
    #[error("block `{0}` has more than one block on it")]
    Crowded(String),
    #[error("clear({0}) disagrees with what is on it")]
    Clear(String),
    #[error("the on-relation has a cycle through `{0}`")]
    Cycle(String),
}

/// The blocks-world physical invariants: each block is on the table or on
/// exactly one block, at most one block sits on any block, `clear(x)` holds
/// iff nothing is on `x`, and `on` is acyclic.
pub fn check_legal<S: AsRef<str>>(s: &State, names: &[S]) -> Result<(), LegalityError> {
    state_to_configuration(s, names).map(|_| ())
}

/// Inverse of [`configuration_to_state`]; fails on illegal states.
pub fn state_to_configuration<S: AsRef<str>>(s: &State, names: &[S]) -> Result<BlockConfiguration, LegalityError> {
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_ref(), i)).collect();
    let m = names.len();
    let lookup = |n: &str| index.get(n).copied().ok_or_else(|| LegalityError::UnknownBlock(n.to_string()));
    let mut below: Vec<Option<usize>> = vec![None; m];
    let mut supports = vec![0usize; m];
    let mut above: Vec<Option<usize>> = vec![None; m];
    let mut clear = vec![false; m];
    for atom in s {
        match (atom.predicate.as_str(), atom.args.as_slice()) {
            ("ontable", [x]) => supports[lookup(x)?] += 1,
            ("clear", [x]) => clear[lookup(x)?] = true,
            ("on", [x, y]) => {
                let (xi, yi) = (lookup(x)?, lookup(y)?);
                supports[xi] += 1;
                below[xi] = Some(yi);
                if above[yi].replace(xi).is_some() {
                    return Err(LegalityError::Crowded(y.clone()));
                }
            }
            _ => return Err(LegalityError::UnexpectedAtom(atom.to_string())),
        }
    }
    for b in 0..m {
        if supports[b] != 1 {
            return Err(LegalityError::Support(names[b].as_ref().to_string()));
        }
        if clear[b] != above[b].is_none() {
            return Err(LegalityError::Clear(names[b].as_ref().to_string()));
        }
    }
    let mut towers = Vec::new();
    let mut placed = 0;
    for b in (0..m).filter(|&b| below[b].is_none()) {
        let mut tower = vec![b];
        let mut cur = b;
        while let Some(next) = above[cur] {
            tower.push(next);
            cur = next;
        }
        placed += tower.len();
        towers.push(tower);
    }
    if placed != m {
        let stuck = (0..m).find(|&b| below[b].is_some() && !towers.iter().flatten().any(|&t| t == b)).unwrap();
        return Err(LegalityError::Cycle(names[stuck].as_ref().to_string()));
    }
    Ok(BlockConfiguration::new(towers).expect("legal state is a partition"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolKind {
    Standard,
    Unseen,
}

impl std::str::FromStr for PoolKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(PoolKind::Standard),
            "unseen" => Ok(PoolKind::Unseen),
            other => Err(format!("unknown name pool `{other}` (standard|unseen)")),
        }
    }
}

impl std::fmt::Display for PoolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PoolKind::Standard => "standard",
            PoolKind::Unseen => "unseen",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NamePoolError {
    #[error("line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("{pool} pool has {available} names, {requested} requested")]
    Exhausted { pool: PoolKind, requested: usize, available: usize },
}

/// Lowercase color words. Symbolic forms capitalize them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamePool {
    pub standard: Vec<String>,
    pub unseen: Vec<String>,
}

impl NamePool {
    /// Reads the `[standard]` / `[unseen]` manifest: one word per line, `#`
    /// comments.
    pub fn parse(text: &str) -> Result<Self, NamePoolError> {
        let mut standard = Vec::new();
        let mut unseen = Vec::new();
        let mut section: Option<PoolKind> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            let err = |message: String| NamePoolError::Manifest { line: i + 1, message };
            if line.is_empty() {
                continue;
            }
            match line {
                "[standard]" => section = Some(PoolKind::Standard),
                "[unseen]" => section = Some(PoolKind::Unseen),
                word => {
                    if !word.chars().all(|c| c.is_ascii_lowercase()) {
                        return Err(err(format!("`{word}` is not a single lowercase word")));
                    }
                    match section {
                        Some(PoolKind::Standard) => standard.push(word.to_string()),
                        Some(PoolKind::Unseen) => unseen.push(word.to_string()),
                        None => return Err(err("name outside a section".into())),
                    }
                }
            }
        }
        let mut all = BTreeSet::new();
        for w in standard.iter().chain(&unseen) {
            if !all.insert(w) {
                return Err(NamePoolError::Manifest { line: 0, message: format!("`{w}` listed twice") });
            }
        }
        Ok(NamePool { standard, unseen })
    }

    pub fn builtin() -> &'static NamePool {
        static POOL: OnceLock<NamePool> = OnceLock::new();
        POOL.get_or_init(|| NamePool::parse(NAMES_MANIFEST).expect("bundled name manifest parses"))
    }

    pub fn pool(&self, kind: PoolKind) -> &[String] {
        match kind {
            PoolKind::Standard => &self.standard,
            PoolKind::Unseen => &self.unseen,
        }
    }

    /// `M` distinct capitalized names drawn without replacement. The draw
    /// depends only on the pool size, so equal-size pools line up by index.
    pub fn assign_names(&self, m: usize, kind: PoolKind, rng: &mut SeededRng) -> Result<Vec<String>, NamePoolError> {
        let pool = self.pool(kind);
        if m > pool.len() {
            return Err(NamePoolError::Exhausted { pool: kind, requested: m, available: pool.len() });
        }
        let mut idx: Vec<usize> = (0..pool.len()).collect();
        for i in 0..m {
            let j = i + rng.below(pool.len() - i);
            idx.swap(i, j);
        }
        Ok(idx[..m].iter().map(|&i| capitalize(&pool[i])).collect())
    }

    /// Maps a capitalized name to its index-aligned partner in the other pool.
    pub fn translate(&self, name: &str, from: PoolKind, to: PoolKind) -> Option<String> {
        let lower = name.to_ascii_lowercase();
        let i = self.pool(from).iter().position(|w| *w == lower)?;
        self.pool(to).get(i).map(|w| capitalize(w))
    }
}

pub fn capitalize(word: &str) -> String {
    let mut cs = word.chars();
    match cs.next() {
        Some(c) => c.to_uppercase().chain(cs).collect(),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::SchemaAtom;
    use crate::strips::{ground_actions, Grounding};

    const LETTERS: [&str; 8] = ["A", "B", "C", "D", "E", "F", "G", "H"];

    /// Enumerates configurations by inserting block n into every slot of
    /// every configuration of n - 1 blocks; independent of the sampler.
    fn enumerate(m: usize) -> BTreeSet<BlockConfiguration> {
        let mut configs: BTreeSet<Vec<Vec<usize>>> = BTreeSet::from([vec![]]);
        for b in 0..m {
            let mut next = BTreeSet::new();
            for towers in &configs {
                let mut alone = towers.clone();
                alone.push(vec![b]);
                alone.sort();
                next.insert(alone);
                for t in 0..towers.len() {
                    for pos in 0..=towers[t].len() {
                        let mut c = towers.clone();
                        c[t].insert(pos, b);
                        c.sort();
                        next.insert(c);
                    }
                }
            }
            configs = next;
        }
        configs.into_iter().map(|t| BlockConfiguration::new(t).unwrap()).collect()
    }

    #[test]
    fn builtin_domain_shape() {
        let d = builtin_domain();
        let names: BTreeSet<_> = d.actions.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, BTreeSet::from(["move", "movetotable", "movefromtable"]));
        let preds: Vec<_> = d.predicates.iter().map(|p| (p.name.as_str(), p.arity())).collect();
        assert_eq!(preds, vec![("clear", 1), ("on", 2), ("ontable", 1)]);
        let mv = d.action("move").unwrap();
        let pre: BTreeSet<_> = mv.precondition.iter().cloned().collect();
        assert_eq!(
            pre,
            BTreeSet::from([SchemaAtom::new("clear", &["x"]), SchemaAtom::new("clear", &["z"]), SchemaAtom::new("on", &["x", "y"])])
        );
    }

    #[test]
    fn configuration_counts() {
        let expected = [1u128, 1, 3, 13, 73, 501, 4051, 37633];
        for (m, &n) in expected.iter().enumerate() {
            assert_eq!(count_configurations(m), n, "M={m}");
            if (1..=5).contains(&m) {
                assert_eq!(enumerate(m).len() as u128, n);
            }
        }
        assert_eq!(count_configurations(10), 58_941_091);
    }

    #[test]
    fn single_block_has_one_configuration() {
        let mut rng = SeededRng::new(3);
        let c = sample_configuration(1, &mut rng);
        assert_eq!(c.towers(), &[vec![0]]);
    }

    #[test]
    fn sampler_is_uniform_for_three_blocks() {
        let all: Vec<_> = enumerate(3).into_iter().collect();
        let mut counts = BTreeMap::new();
        let mut rng = SeededRng::new(11);
        let draws = 13_000;
        for _ in 0..draws {
            *counts.entry(sample_configuration(3, &mut rng)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 13);
        let expect = draws as f64 / 13.0;
        let sigma = (draws as f64 * (1.0 / 13.0) * (12.0 / 13.0)).sqrt();
        for c in &all {
            let n = counts[c] as f64;
            assert!((n - expect).abs() < 3.0 * sigma, "{c:?}: {n}");
        }
    }

    #[test]
    fn state_conversion_reference_and_round_trip() {
        let names = ["White", "Magenta", "Blue"];
        let c = BlockConfiguration::new(vec![vec![0, 1, 2]]).unwrap();
        let s = configuration_to_state(&c, &names);
        let expected: State = [
            Atom::new("ontable", &["White"]),
            Atom::new("on", &["Magenta", "White"]),
            Atom::new("on", &["Blue", "Magenta"]),
            Atom::new("clear", &["Blue"]),
        ]
        .into_iter()
        .collect();
        assert_eq!(s, expected);

        let two = configuration_to_state(&BlockConfiguration::new(vec![vec![0], vec![1]]).unwrap(), &["A", "B"]);
        assert_eq!(two.len(), 4);
        assert!(two.contains(&Atom::new("clear", &["A"])) && two.contains(&Atom::new("ontable", &["B"])));

        for c in enumerate(4) {
            let s = configuration_to_state(&c, &LETTERS[..4]);
            assert_eq!(state_to_configuration(&s, &LETTERS[..4]).unwrap(), c);
        }
        assert_eq!(enumerate(4).len(), 73);
    }

    #[test]
    fn legality_rejects_broken_states() {
        let n = ["A", "B"];
        let mk = |atoms: &[(&str, &[&str])]| -> State { atoms.iter().map(|(p, a)| Atom::new(p, a)).collect() };
        assert!(check_legal(&mk(&[("ontable", &["A"]), ("clear", &["A"]), ("ontable", &["B"]), ("clear", &["B"])]), &n).is_ok());
        assert!(matches!(check_legal(&mk(&[("ontable", &["A"]), ("clear", &["A"])]), &n), Err(LegalityError::Support(_))));
        assert!(matches!(
            check_legal(&mk(&[("ontable", &["A"]), ("clear", &["A"]), ("on", &["B", "A"]), ("clear", &["B"])]), &n),
            Err(LegalityError::Support(_) | LegalityError::Clear(_))
        ));
        assert!(matches!(
            check_legal(&mk(&[("on", &["A", "B"]), ("on", &["B", "A"])]), &n),
            Err(LegalityError::Cycle(_))
        ));
    }

    #[test]
    fn reachable_space_is_every_configuration() {
        let d = builtin_domain();
        for m in 1..=4 {
            let names = &LETTERS[..m];
            let g = Grounding::new(d, universe(names).unwrap()).unwrap();
            let legal: BTreeSet<State> = enumerate(m).iter().map(|c| configuration_to_state(c, names)).collect();
            for start in &legal {
                let r = g.reachable(&g.encode_state(start).unwrap(), 1000);
                assert_eq!(r.states, legal, "M={m}");
            }
        }
    }

    #[test]
    fn random_walks_stay_legal() {
        let d = builtin_domain();
        let names = &LETTERS[..6];
        let u = universe(names).unwrap();
        let actions = ground_actions(d, &u);
        let mut rng = SeededRng::new(5);
        for _ in 0..1000 {
            let mut s = configuration_to_state(&sample_configuration(6, &mut rng), names);
            for _ in 0..50 {
                let app: Vec<_> = actions.iter().filter(|a| crate::strips::applicable(&s, a)).collect();
                let a = rng.choose(&app).expect("some action always applies with 6 blocks");
                s = crate::strips::apply(&s, a).unwrap();
                check_legal(&s, names).unwrap();
            }
        }
    }

    #[test]
    fn name_pools() {
        let pool = NamePool::builtin();
        assert_eq!(&pool.standard[..10], ["red", "green", "blue", "yellow", "magenta", "white", "gray", "pink", "olive", "indigo"]);
        assert_eq!(pool.standard.len(), 20);
        assert_eq!(pool.unseen.len(), 20);
        let std: BTreeSet<_> = pool.standard.iter().collect();
        assert!(pool.unseen.iter().all(|w| !std.contains(w)));

        let a = pool.assign_names(5, PoolKind::Standard, &mut SeededRng::new(9)).unwrap();
        let b = pool.assign_names(5, PoolKind::Unseen, &mut SeededRng::new(9)).unwrap();
        assert_eq!(a.iter().collect::<BTreeSet<_>>().len(), 5);
        assert!(a.iter().zip(&b).all(|(x, y)| x != y));
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(pool.translate(y, PoolKind::Unseen, PoolKind::Standard).as_ref(), Some(x));
        }
        assert!(a[0].chars().next().unwrap().is_uppercase());
        assert_eq!(
            pool.assign_names(21, PoolKind::Standard, &mut SeededRng::new(1)),
            Err(NamePoolError::Exhausted { pool: PoolKind::Standard, requested: 21, available: 20 })
        );
    }

    #[test]
    fn manifest_errors() {
        assert!(matches!(NamePool::parse("red"), Err(NamePoolError::Manifest { line: 1, .. })));
        assert!(matches!(NamePool::parse("[standard]\nRed"), Err(NamePoolError::Manifest { line: 2, .. })));
        assert!(NamePool::parse("[standard]\nred\n[unseen]\nred").is_err());
    }
}
