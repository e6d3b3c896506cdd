//! JSON Lines records with symbolic provenance, splits, independent
//! verification, statistics, and the suite manifest.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::blocksworld::{builtin_domain, notation, universe, PoolKind, BLOCKSWORLD_PDDL, NAMES_MANIFEST};
use crate::planner::cost_from;
use crate::rng::{derive_seed_labeled, SeededRng};
use crate::strips::{
    execute, ground_action, parse_atom, parse_call, parse_condition, EngineError, Grounding, SyntaxError,
};
use crate::taskgen::{gen_dataset, ge_suite, Dataset, GeTag, GenConfig, GenCounters, GenError, InstanceMeta, ProblemInstance, Task};
use crate::textgen::{format_for_lm, LmStyle, RenderedInstance, TemplateSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Symbolic fields in the compact surface syntax, state in display order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicForm {
    pub initial_state: Vec<String>,
    pub actions: Vec<String>,
    pub condition: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordMeta {
    pub objects: usize,
    pub length: usize,
    pub ge_tag: GeTag,
    pub seed: u64,
    pub split: Split,
    pub pool: PoolKind,
    pub names: Vec<String>,
}

/// One line of a dataset file. Field order is the serialized key order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub task: Task,
    pub context: String,
    pub query: String,
    pub label: u8,
    pub symbolic: SymbolicForm,
    pub meta: RecordMeta,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("record {id}: {message}")]
    Record { id: String, message: String },
    #[error("split {train}/{dev}/{test} does not fit {count} records with {trues} true labels")]
    InfeasibleSplit { train: usize, dev: usize, test: usize, count: usize, trues: usize },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Generation(#[from] GenError),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.to_path_buf(), source }
}

impl DatasetRecord {
    pub fn from_instance(p: &ProblemInstance, templates: &TemplateSet, split: Split) -> Self {
        let n = notation();
        let r = templates.render_instance(p);
        DatasetRecord {
            id: p.id(),
            task: p.task,
            context: r.context,
            query: r.query,
            label: u8::from(p.label),
            symbolic: SymbolicForm {
                initial_state: p.initial_state.iter().map(|a| n.atom(a)).collect(),
                actions: p.actions.iter().map(|a| n.action(a)).collect(),
                condition: p.condition.as_ref().map(|c| n.condition(c)),
            },
            meta: RecordMeta {
                objects: p.meta.objects,
                length: p.meta.length,
                ge_tag: p.meta.ge_tag,
                seed: p.meta.seed,
                split,
                pool: p.meta.pool,
                names: p.meta.names.clone(),
            },
        }
    }

    /// Rebuilds the symbolic instance; the stored label is carried over
    /// unchecked.
    pub fn to_instance(&self) -> Result<ProblemInstance, DatasetError> {
        let bad = |m: String| DatasetError::Record { id: self.id.clone(), message: m };
        let syn = |e: SyntaxError| bad(e.to_string());
        let eng = |e: EngineError| bad(e.to_string());
        let u = universe(&self.meta.names).map_err(eng)?;
        let initial_state = self.symbolic.initial_state.iter().map(|a| parse_atom(a)).collect::<Result<Vec<_>, _>>().map_err(syn)?;
        let mut actions = Vec::with_capacity(self.symbolic.actions.len());
        for a in &self.symbolic.actions {
            let (name, args) = parse_call(a).map_err(syn)?;
            actions.push(ground_action(builtin_domain(), &u, &name, &args).map_err(eng)?);
        }
        let condition = self.symbolic.condition.as_deref().map(parse_condition).transpose().map_err(syn)?;
        if self.label > 1 {
            return Err(bad(format!("label {} is not 0 or 1", self.label)));
        }
        Ok(ProblemInstance {
            task: self.task,
            initial_state,
            actions,
            condition,
            label: self.label == 1,
            meta: InstanceMeta {
                objects: self.meta.objects,
                length: self.meta.length,
                ge_tag: self.meta.ge_tag,
                seed: self.meta.seed,
                pool: self.meta.pool,
                names: self.meta.names.clone(),
            },
        })
    }

    pub fn rendered(&self) -> RenderedInstance {
        RenderedInstance { context: self.context.clone(), query: self.query.clone(), label: self.label == 1 }
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DatasetError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    // Temporary files are created owner-only.
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(fs::Permissions::from_mode(0o644)).map_err(io_err(path))?;
    }
    tmp.persist(path).map_err(|e| DatasetError::Io { path: path.to_path_buf(), source: e.error })?;
    Ok(())
}

pub fn to_jsonl(records: &[DatasetRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn write_dataset(records: &[DatasetRecord], path: &Path) -> Result<(), DatasetError> {
    write_atomic(path, to_jsonl(records).as_bytes())
}

pub fn read_dataset(path: &Path) -> Result<Vec<DatasetRecord>, DatasetError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line).map_err(|e| DatasetError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(r);
    }
    Ok(out)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_digest(path: &Path) -> Result<String, DatasetError> {
    Ok(sha256_hex(&fs::read(path).map_err(io_err(path))?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: usize,
    pub dev: usize,
    pub test: usize,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec { train: 10_000, dev: 2_000, test: 3_000 }
    }
}

impl SplitSpec {
    /// 2/3, 2/15 and the rest, each rounded down to an even size; the
    /// default sizes at 15,000 records.
    pub fn proportional(count: usize) -> Self {
        let even = |x: usize| x - x % 2;
        let train = even(count * 2 / 3);
        let dev = even(count * 2 / 15);
        SplitSpec { train, dev, test: count - train - dev }
    }

    pub fn total(&self) -> usize {
        self.train + self.dev + self.test
    }
}

impl FromStr for SplitSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|e| format!("bad split size `{p}`: {e}")))
            .collect::<Result<_, _>>()?;
        match parts.as_slice() {
            [train, dev, test] => Ok(SplitSpec { train: *train, dev: *dev, test: *test }),
            _ => Err(format!("expected train,dev,test sizes, got `{s}`")),
        }
    }
}

/// Assigns each record to a split: trues and falses are shuffled
/// separately with `seed` and dealt out half-and-half to every split.
/// Records keep their positions; only `meta.split` changes.
pub fn assign_splits(records: &mut [DatasetRecord], spec: SplitSpec, seed: u64) -> Result<(), DatasetError> {
    let trues: Vec<usize> = (0..records.len()).filter(|&i| records[i].label == 1).collect();
    let falses: Vec<usize> = (0..records.len()).filter(|&i| records[i].label == 0).collect();
    let infeasible = spec.total() != records.len()
        || trues.len() != falses.len()
        || [spec.train, spec.dev, spec.test].iter().any(|s| s % 2 != 0);
    if infeasible {
        return Err(DatasetError::InfeasibleSplit {
            train: spec.train,
            dev: spec.dev,
            test: spec.test,
            count: records.len(),
            trues: trues.len(),
        });
    }
    let mut rng = SeededRng::new(seed);
    for mut group in [trues, falses] {
        rng.shuffle(&mut group);
        let mut it = group.into_iter();
        for (split, size) in [(Split::Train, spec.train), (Split::Dev, spec.dev), (Split::Test, spec.test)] {
            for i in it.by_ref().take(size / 2) {
                records[i].meta.split = split;
            }
        }
    }
    Ok(())
}

/// Train, dev and test record lists, each in original order.
pub fn split_dataset(records: &[DatasetRecord], spec: SplitSpec, seed: u64) -> Result<[Vec<DatasetRecord>; 3], DatasetError> {
    let mut all = records.to_vec();
    assign_splits(&mut all, spec, seed)?;
    Ok(Split::ALL.map(|s| all.iter().filter(|r| r.meta.split == s).cloned().collect()))
}

/// Generic groundings per object count, renamed per record.
struct Groundings(HashMap<usize, Grounding>);

impl Groundings {
    fn for_records(records: &[DatasetRecord]) -> Result<Self, EngineError> {
        let mut map = HashMap::new();
        for m in records.iter().map(|r| r.meta.objects).collect::<HashSet<_>>() {
            let names: Vec<String> = (0..m).map(|i| format!("b{i}")).collect();
            map.insert(m, Grounding::new(builtin_domain(), universe(&names)?)?);
        }
        Ok(Groundings(map))
    }

    fn get(&self, names: &[String]) -> Result<Grounding, EngineError> {
        let generic = self.0.get(&names.len()).expect("object counts were collected up front");
        generic.renamed(universe(names)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub line: usize,
    pub id: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub records: usize,
    pub true_labels: usize,
    pub label_mismatches: Vec<Mismatch>,
    pub render_mismatches: Vec<Mismatch>,
    pub id_mismatches: Vec<Mismatch>,
    /// Records that do not parse or break a generation constraint.
    pub invalid: Vec<Mismatch>,
    pub duplicates: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.label_mismatches.is_empty()
            && self.render_mismatches.is_empty()
            && self.id_mismatches.is_empty()
            && self.invalid.is_empty()
            && self.duplicates.is_empty()
    }

    pub fn balanced(&self) -> bool {
        2 * self.true_labels == self.records
    }
}

#[derive(Default)]
struct RecordCheck {
    label: Option<String>,
    render: Option<String>,
    id: Option<String>,
    invalid: Option<String>,
    canonical: Option<String>,
}

fn check_record(r: &DatasetRecord, templates: &TemplateSet, groundings: &Groundings) -> RecordCheck {
    let mut out = RecordCheck::default();
    let p = match r.to_instance() {
        Ok(p) => p,
        Err(e) => {
            out.invalid = Some(e.to_string());
            return out;
        }
    };
    if let Err(msg) = check_constraints(&p, groundings) {
        out.invalid = Some(msg);
        return out;
    }
    if p.id() != r.id {
        out.id = Some(format!("content hash is {}", p.id()));
    }
    match groundings.get(&p.meta.names).map_err(GenError::from).and_then(|g| p.recompute_label(&g)) {
        Ok(label) if label != p.label => out.label = Some(format!("stored {}, recomputed {}", r.label, u8::from(label))),
        Ok(_) => {}
        Err(e) => out.invalid = Some(e.to_string()),
    }
    let fresh = templates.render_instance(&p);
    if fresh.context != r.context {
        out.render = Some(format!("context differs from `{}`", fresh.context));
    } else if fresh.query != r.query {
        out.render = Some(format!("query differs from `{}`", fresh.query));
    } else {
        match templates.parse_rendered(p.task, &r.rendered()) {
            Ok(parsed) => {
                let actions: Vec<(String, Vec<String>)> = p.actions.iter().map(|a| (a.name.clone(), a.args.clone())).collect();
                if parsed.initial_state != p.initial_state || parsed.actions != actions || parsed.condition != p.condition {
                    out.render = Some("text parses back to a different instance".into());
                }
            }
            Err(e) => out.render = Some(format!("text does not parse back: {e}")),
        }
    }
    out.canonical = Some(p.canonical());
    out
}

/// Structural rules every generated instance obeys, beyond its label.
fn check_constraints(p: &ProblemInstance, groundings: &Groundings) -> Result<(), String> {
    if p.actions.len() != p.meta.length {
        return Err(format!("{} actions, meta says {}", p.actions.len(), p.meta.length));
    }
    if p.condition.is_some() != p.task.has_condition() {
        return Err("condition presence does not match the task".into());
    }
    let state = p.state();
    if state.len() != p.initial_state.len() {
        return Err("initial state repeats an atom".into());
    }
    crate::blocksworld::check_legal(&state, &p.meta.names).map_err(|e| format!("illegal initial state: {e}"))?;
    match p.task {
        Task::Projection | Task::GoalRecognition if !execute(&state, &p.actions).is_success() => {
            Err("context action sequence is not executable".into())
        }
        Task::Planning => {
            let g = groundings.get(&p.meta.names).map_err(|e| e.to_string())?;
            let goal = g.encode_condition(p.condition.as_ref().unwrap()).map_err(|e| e.to_string())?;
            let s = g.encode_state(&state).map_err(|e| e.to_string())?;
            match cost_from(&g, &s, &goal, p.meta.length).finite() {
                Some(_) => Ok(()),
                None => Err(format!("goal not achievable within {} steps", p.meta.length)),
            }
        }
        _ => Ok(()),
    }
}

#[cfg(feature = "parallel")]
fn map_records<T: Send, F: Fn(&DatasetRecord) -> T + Sync + Send>(records: &[DatasetRecord], f: F) -> Vec<T> {
    use rayon::prelude::*;
    records.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_records<T, F: Fn(&DatasetRecord) -> T>(records: &[DatasetRecord], f: F) -> Vec<T> {
    records.iter().map(f).collect()
}

/// Re-derives every label, rendering and id from the symbolic fields.
pub fn verify_records(records: &[DatasetRecord], templates: &TemplateSet) -> VerifyReport {
    let mut report = VerifyReport { records: records.len(), ..Default::default() };
    let groundings = match Groundings::for_records(records) {
        Ok(g) => g,
        Err(e) => {
            report.invalid.push(Mismatch { line: 0, id: String::new(), message: e.to_string() });
            return report;
        }
    };
    let checks = map_records(records, |r| check_record(r, templates, &groundings));
    let mut seen = HashMap::new();
    for (i, (r, c)) in records.iter().zip(checks).enumerate() {
        let line = i + 1;
        let m = |message: String| Mismatch { line, id: r.id.clone(), message };
        report.true_labels += usize::from(r.label == 1);
        if let Some(x) = c.label {
            report.label_mismatches.push(m(x));
        }
        if let Some(x) = c.render {
            report.render_mismatches.push(m(x));
        }
        if let Some(x) = c.id {
            report.id_mismatches.push(m(x));
        }
        if let Some(x) = c.invalid {
            report.invalid.push(m(x));
        }
        if let Some(canon) = c.canonical {
            if let Some(first) = seen.insert(canon, line) {
                report.duplicates.push(m(format!("same instance as line {first}")));
            }
        }
    }
    report
}

pub fn verify_dataset(path: &Path) -> Result<VerifyReport, DatasetError> {
    Ok(verify_records(&read_dataset(path)?, TemplateSet::builtin()))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub records: usize,
    pub true_labels: usize,
    pub false_labels: usize,
    pub splits: BTreeMap<String, usize>,
    /// Sentences in the initial-state description.
    pub state_sentences: BTreeMap<usize, usize>,
    pub mean_state_sentences: f64,
    pub mean_state_words: f64,
    pub context_sentences: BTreeMap<usize, usize>,
    pub query_tokens: BTreeMap<usize, usize>,
    /// First failing step of non-executable sequences (executability).
    pub failure_index: BTreeMap<usize, usize>,
    pub literal_conditions: usize,
    pub conjunction_conditions: usize,
}

fn sentence_count(text: &str) -> usize {
    text.matches('.').count()
}

pub fn compute_stats(records: &[DatasetRecord], templates: &TemplateSet) -> Result<DatasetStats, DatasetError> {
    let mut st = DatasetStats { records: records.len(), ..Default::default() };
    let (mut sentences, mut words) = (0usize, 0usize);
    for r in records {
        let p = r.to_instance()?;
        if r.label == 1 {
            st.true_labels += 1;
        } else {
            st.false_labels += 1;
        }
        *st.splits.entry(r.meta.split.to_string()).or_default() += 1;
        let n = p.initial_state.len();
        sentences += n;
        words += templates.render_state(&p.initial_state).split_whitespace().count();
        *st.state_sentences.entry(n).or_default() += 1;
        *st.context_sentences.entry(sentence_count(&r.context)).or_default() += 1;
        *st.query_tokens.entry(r.query.split_whitespace().count()).or_default() += 1;
        if let crate::strips::ExecutionResult::Failure { index, .. } = execute(&p.state(), &p.actions) {
            if p.task == Task::Executability {
                *st.failure_index.entry(index).or_default() += 1;
            }
        }
        match &p.condition {
            Some(c) if c.is_conjunction() => st.conjunction_conditions += 1,
            Some(_) => st.literal_conditions += 1,
            None => {}
        }
    }
    if !records.is_empty() {
        st.mean_state_sentences = sentences as f64 / records.len() as f64;
        st.mean_state_words = words as f64 / records.len() as f64;
    }
    Ok(st)
}

/// Model-ready rows: id, input text, target text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LmRow {
    pub id: String,
    pub input: String,
    pub target: String,
}

pub fn format_records(records: &[DatasetRecord], style: LmStyle) -> Vec<LmRow> {
    records
        .iter()
        .map(|r| {
            let (input, target) = format_for_lm(&r.rendered(), style);
            LmRow { id: r.id.clone(), input, target }
        })
        .collect()
}

/// Concatenates datasets. With `take`, each input contributes its first
/// `take / 2` true and first `take / 2` false records. Records whose id
/// already appeared are dropped; the number dropped is returned.
pub fn merge_datasets(inputs: &[Vec<DatasetRecord>], take: Option<usize>) -> Result<(Vec<DatasetRecord>, usize), DatasetError> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut dropped = 0;
    for (k, records) in inputs.iter().enumerate() {
        let chosen: Vec<&DatasetRecord> = match take {
            None => records.iter().collect(),
            Some(t) => {
                if t % 2 != 0 {
                    return Err(DatasetError::Usage(format!("take {t} is odd")));
                }
                let pick = |label| records.iter().filter(move |r| r.label == label).take(t / 2);
                let mut both: Vec<(usize, &DatasetRecord)> = pick(1).chain(pick(0)).map(|r| (0, r)).collect();
                if both.len() != t {
                    return Err(DatasetError::Usage(format!("input {} has fewer than {} records per label", k + 1, t / 2)));
                }
                // Keep the input's own order.
                for (pos, r) in both.iter_mut() {
                    *pos = records.iter().position(|x| std::ptr::eq(x, *r)).unwrap();
                }
                both.sort_by_key(|(pos, _)| *pos);
                both.into_iter().map(|(_, r)| r).collect()
            }
        };
        for r in chosen {
            if seen.insert(r.id.clone()) {
                out.push(r.clone());
            } else {
                dropped += 1;
            }
        }
    }
    Ok((out, dropped))
}

/// Datasets with train/dev/test splits; the rest are test-only.
pub fn is_training_set(cfg: &GenConfig) -> bool {
    matches!(cfg.ge_tag, GeTag::None | GeTag::Ge4Lit)
}

pub fn records_for(ds: &Dataset, templates: &TemplateSet) -> Vec<DatasetRecord> {
    ds.instances.iter().map(|p| DatasetRecord::from_instance(p, templates, Split::Test)).collect()
}

/// Split assignment seed for a dataset.
pub fn split_seed(cfg: &GenConfig) -> u64 {
    derive_seed_labeled(cfg.seed, "split")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub file: String,
    pub sha256: String,
    pub records: usize,
    pub config: GenConfig,
    pub splits: Option<SplitSpec>,
    pub counters: GenCounters,
    pub mean_state_sentences: f64,
    pub mean_state_words: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub base_seed: u64,
    pub domain_sha256: String,
    pub templates_sha256: String,
    pub names_sha256: String,
    pub datasets: Vec<ManifestEntry>,
    pub assumptions: Vec<String>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Choices the generated data depends on, recorded in every manifest.
pub fn assumptions() -> Vec<String> {
    [
        "labels balanced per dataset: even indices true, odd false",
        "condition redraws per instance capped at 200, then the whole instance is resampled",
        "mixed condition shape: fair coin between one literal and a conjunction of two distinct atoms",
        "negatives drawn from the positive-generating processes and filtered by label",
        "planning positives: uniformly stepped walks restricted to successors that still reach the goal in exactly the remaining steps",
        "goal-recognition goals farther than the goal horizon are redrawn (horizon 2M+2, or 5 at ten objects)",
        "state sentence order: seeded uniform permutation per instance",
        "splits stratified by label; test-only datasets marked test",
        "unseen-name datasets share seeds with the standard datasets of the same shape",
        "goals always end with a period",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

/// Generates every config and writes one JSON Lines file per dataset plus
/// the manifest under `dir`. `progress` sees each finished entry.
pub fn run_suite(
    configs: &[GenConfig],
    base_seed: u64,
    dir: &Path,
    mut progress: impl FnMut(&ManifestEntry),
) -> Result<Manifest, DatasetError> {
    let templates = TemplateSet::builtin();
    let mut datasets = Vec::with_capacity(configs.len());
    for cfg in configs {
        let ds = gen_dataset(cfg)?;
        let mut records = records_for(&ds, templates);
        let splits = if is_training_set(cfg) {
            let spec = SplitSpec::proportional(cfg.count);
            assign_splits(&mut records, spec, split_seed(cfg))?;
            Some(spec)
        } else {
            None
        };
        let file = format!("{}.jsonl", cfg.dataset_name());
        let body = to_jsonl(&records);
        write_atomic(&dir.join(&file), body.as_bytes())?;
        let stats = compute_stats(&records, templates)?;
        let entry = ManifestEntry {
            name: cfg.dataset_name(),
            file,
            sha256: sha256_hex(body.as_bytes()),
            records: records.len(),
            config: cfg.clone(),
            splits,
            counters: ds.counters,
            mean_state_sentences: stats.mean_state_sentences,
            mean_state_words: stats.mean_state_words,
        };
        progress(&entry);
        datasets.push(entry);
    }
    let manifest = Manifest {
        tool: "trac".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        base_seed,
        domain_sha256: sha256_hex(BLOCKSWORLD_PDDL.as_bytes()),
        templates_sha256: templates.digest().to_string(),
        names_sha256: sha256_hex(NAMES_MANIFEST.as_bytes()),
        datasets,
        assumptions: assumptions(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write_atomic(&dir.join(MANIFEST_FILE), json.as_bytes())?;
    Ok(manifest)
}

/// The full 32-dataset suite.
pub fn write_suite(base_seed: u64, dir: &Path, progress: impl FnMut(&ManifestEntry)) -> Result<Manifest, DatasetError> {
    run_suite(&ge_suite(base_seed), base_seed, dir, progress)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, DatasetError> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    serde_json::from_str(&text).map_err(|e| DatasetError::Parse { path, line: e.line(), message: e.to_string() })
}
