// Acceptance checks, one PASS/FAIL line each. Runs without the libtest
// harness so the lines always reach stdout.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use trac_core::blocksworld::{
    builtin_domain, configuration_to_state, count_configurations, sample_configuration, universe, BlockConfiguration,
    NamePool, PoolKind,
};
use trac_core::dataset::{read_dataset, read_manifest, DatasetRecord, Manifest};
use trac_core::oracles::{is_prefix_of_any, oracle_count_configurations, oracle_optimal_cost, oracle_optimal_plans, OracleBudget};
use trac_core::planner::{default_bound, is_optimal_prefix, optimal_cost};
use trac_core::rng::SeededRng;
use trac_core::strips::{
    ground_action, ground_actions, parse_atom, parse_call, parse_condition, reachable_states, Atom, Condition, GroundAction,
    Grounding, Literal, State,
};
use trac_core::taskgen::{ConditionShape, GeTag, InstanceMeta, ProblemInstance, Task};
use trac_core::textgen::{format_for_lm, LmStyle, TemplateSet};

const SUITE_SEED: u64 = 20240611;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |name: &str| filter.is_empty() || filter.iter().any(|f| name.contains(f.as_str()));
    let work = tempfile::tempdir().expect("temp dir");
    let suite_a = work.path().join("a");
    let suite_b = work.path().join("b");

    let mut failures = 0;
    let mut run = |name: &str, limit: Duration, f: &mut dyn FnMut() -> Outcome| {
        if !wanted(name) {
            return;
        }
        let t = Instant::now();
        let o = f();
        let took = t.elapsed();
        let pass = o.pass && took <= limit;
        if !pass {
            failures += 1;
        }
        let over = if took > limit { format!(" over limit {:.0}s", limit.as_secs_f64()) } else { String::new() };
        println!("{} {name}: {} [{:.1}s{over}]", if pass { "PASS" } else { "FAIL" }, o.detail, took.as_secs_f64());
    };

    let min = |m: u64| Duration::from_secs(60 * m);
    run("1 golden-fixtures", Duration::from_secs(1), &mut golden_fixtures);
    run("2 lm-formats", Duration::from_secs(1), &mut lm_formats);
    run("3 combinatorial-anchors", Duration::from_secs(10), &mut combinatorial_anchors);
    run("4a planner-cost-vs-oracle-M3", min(1), &mut planner_cost_vs_oracle);
    run("4b prefix-vs-oracle-M4", min(10), &mut prefix_vs_oracle);
    run("5 suite-verify", min(30), &mut || suite_and_verify(&suite_a));
    run("6 balance-dedup", min(5), &mut || balance_and_dedup(&suite_a));
    run("7 determinism", min(30), &mut || determinism(&suite_a, &suite_b));
    run("8 manifest-shape", Duration::from_secs(5), &mut || manifest_shape(&suite_a));
    run("9 ge3-isomorphism", min(5), &mut || ge3_isomorphism(&suite_a));
    run("10a sampler-uniformity", Duration::from_secs(10), &mut sampler_uniformity);
    run("10b ge1-context-size", min(2), &mut || ge1_context_size(&suite_a));

    if failures > 0 {
        println!("{failures} acceptance check(s) failed");
        std::process::exit(1);
    }
}

fn instance(task: Task, state: &[&str], actions: &[&str], condition: Option<&str>, label: bool) -> ProblemInstance {
    let initial_state: Vec<Atom> = state.iter().map(|a| parse_atom(a).unwrap()).collect();
    let mut names: Vec<String> = Vec::new();
    for a in &initial_state {
        for n in &a.args {
            if !names.contains(n) {
                names.push(n.clone());
            }
        }
    }
    let u = universe(&names).unwrap();
    let actions = actions
        .iter()
        .map(|c| {
            let (name, args) = parse_call(c).unwrap();
            ground_action(builtin_domain(), &u, &name, &args).unwrap()
        })
        .collect::<Vec<_>>();
    ProblemInstance {
        task,
        initial_state,
        condition: condition.map(|c| parse_condition(c).unwrap()),
        label,
        meta: InstanceMeta { objects: names.len(), length: actions.len(), ge_tag: GeTag::None, seed: 0, pool: PoolKind::Standard, names },
        actions,
    }
}

fn grounding(names: &[String]) -> Grounding {
    Grounding::new(builtin_domain(), universe(names).unwrap()).unwrap()
}

fn golden_fixtures() -> Outcome {
    let t = TemplateSet::builtin();
    let bmw = ["clear(Blue)", "on(Blue, Magenta)", "on(Magenta, White)", "onTable(White)"];
    let bmw_text = "The blue block is clear. The blue block is on top of the magenta block. \
                    The magenta block is on top of the white block. The white block is on the table.";
    let down = "Jane moves the blue block from the magenta block onto the table.";
    let cases = [
        (
            instance(
                Task::Projection,
                &["onTable(Green)", "clear(Red)", "clear(Blue)", "clear(Green)", "onTable(Red)", "onTable(Blue)"],
                &["moveFromTable(Green, Red)"],
                Some("on(Blue, Red)"),
                false,
            ),
            "The green block is on the table. The red block is clear. The blue block is clear. The green block is clear. \
             The red block is on the table. The blue block is on the table. Jane moves the green block from the table to the red block."
                .to_string(),
            "The blue block is on top of the red block.".to_string(),
        ),
        (
            instance(
                Task::Executability,
                &["onTable(Olive)", "on(Yellow, Olive)", "clear(Indigo)", "on(Indigo, Yellow)"],
                &["moveToTable(Indigo, Yellow)"],
                None,
                true,
            ),
            "The olive block is on the table. The yellow block is on top of the olive block. The indigo block is clear. \
             The indigo block is on top of the yellow block."
                .to_string(),
            "Jane moves the indigo block from the yellow block onto the table.".to_string(),
        ),
        (
            instance(Task::Planning, &bmw, &["moveToTable(Blue, Magenta)"], Some("!on(Blue, Magenta)"), true),
            // Goal clauses always end with a period; the printed row omits it.
            format!("{bmw_text} the blue block is not on top of the magenta block."),
            down.to_string(),
        ),
        (
            instance(Task::GoalRecognition, &bmw, &["moveToTable(Blue, Magenta)"], Some("on(Blue, Magenta)"), false),
            format!("{bmw_text} {down}"),
            "the blue block is on top of the magenta block.".to_string(),
        ),
    ];
    let mut bad = Vec::new();
    let mut answers = Vec::new();
    for (p, context, query) in &cases {
        let r = t.render_instance(p);
        let label = p.recompute_label(&grounding(&p.meta.names)).unwrap();
        answers.push(if label { "True" } else { "False" });
        if r.context != *context || r.query != *query || label != p.label {
            bad.push(format!("{}: got {:?} / {:?} / {label}", p.task.short(), r.context, r.query));
        }
    }
    outcome(
        bad.is_empty(),
        format!("4/4 context+query strings byte-exact, answers {} (planning goal carries a terminal period) {}", answers.join("/"), bad.join("; ")),
    )
}

fn lm_formats() -> Outcome {
    let p = instance(
        Task::Projection,
        &[
            "onTable(Yellow)",
            "on(Magenta, Pink)",
            "clear(Gray)",
            "onTable(Gray)",
            "clear(Magenta)",
            "on(Pink, Green)",
            "onTable(Green)",
            "clear(Yellow)",
        ],
        &["moveFromTable(Yellow, Gray)"],
        Some("clear(Green) & !on(Gray, Yellow)"),
        false,
    );
    let label = p.recompute_label(&grounding(&p.meta.names)).unwrap();
    let r = TemplateSet::builtin().render_instance(&p);
    let body = "The yellow block is on the table. The magenta block is on top of the pink block. The gray block is clear. \
                The gray block is on the table. The magenta block is clear. The pink block is on top of the green block. \
                The green block is on the table. The yellow block is clear. Jane moves the yellow block from the table to the gray block.";
    let q = "The green block is clear. The gray block is not on top of the yellow block.";
    let expected = [
        (LmStyle::Separator, format!("<s> {body} </s> {q} </s>"), "0"),
        (LmStyle::Concat, format!("{body} {q}"), "0"),
        (LmStyle::Text2text, format!("{body} {q}"), "No"),
    ];
    let mut bad = Vec::new();
    for (style, input, target) in expected {
        let (i, o) = format_for_lm(&r, style);
        if i != input || o != target {
            bad.push(format!("{style}: {i:?} -> {o:?}"));
        }
    }
    if label {
        bad.push("recomputed label is true".into());
    }
    outcome(bad.is_empty(), format!("separator/concat/text2text inputs byte-exact, targets 0/0/No {}", bad.join("; ")))
}

fn names(m: usize) -> Vec<String> {
    (0..m).map(|i| format!("B{i}")).collect()
}

fn all_on_table(ns: &[String]) -> State {
    ns.iter().flat_map(|n| [Atom::new("ontable", &[n]), Atom::new("clear", &[n])]).collect()
}

fn all_states(m: usize) -> (Grounding, Vec<State>) {
    let ns = names(m);
    let g = grounding(&ns);
    let r = reachable_states(&g, &all_on_table(&ns), 100_000).unwrap();
    assert!(!r.truncated);
    (g, r.states.into_iter().collect())
}

fn combinatorial_anchors() -> Outcome {
    let expected = [1u64, 3, 13, 73, 501];
    let mut rows = Vec::new();
    let mut ok = true;
    for (i, &want) in expected.iter().enumerate() {
        let m = i + 1;
        let closed = count_configurations(m) as u64;
        let oracle = oracle_count_configurations(m);
        let reach = all_states(m).1.len() as u64;
        ok &= closed == want && oracle == want && reach == want;
        rows.push(format!("M={m}:{closed}/{oracle}/{reach}"));
    }
    let ns = names(5);
    let schemas = ground_actions(builtin_domain(), &universe(&ns).unwrap()).len();
    let compiled = grounding(&ns).num_actions();
    ok &= schemas == 100 && compiled == 100;
    outcome(ok, format!("sampler/oracle/reachable {}; ground actions at M=5: {schemas}/{compiled}", rows.join(" ")))
}

fn single_literal_goals(g: &Grounding) -> Vec<Condition> {
    (0..g.num_atoms())
        .flat_map(|id| {
            let a = g.atom(id);
            [Condition::literal(Literal::pos(a.clone())), Condition::literal(Literal::neg(a))]
        })
        .collect()
}

fn planner_cost_vs_oracle() -> Outcome {
    let (g, states) = all_states(3);
    let bound = default_bound(3);
    let budget = OracleBudget::new(u64::MAX, bound);
    let goals = single_literal_goals(&g);
    let mut pairs = 0;
    let mut bad = Vec::new();
    for s in &states {
        for goal in &goals {
            pairs += 1;
            let ours = optimal_cost(&g, s, goal, bound).unwrap();
            let theirs = oracle_optimal_cost(builtin_domain(), g.universe(), s, goal, budget).unwrap();
            if ours != theirs {
                bad.push(format!("{goal}: {ours:?} vs {theirs:?}"));
            }
        }
    }
    outcome(bad.is_empty(), format!("{pairs} (state, goal) pairs, {} disagreements {}", bad.len(), bad.iter().take(3).cloned().collect::<Vec<_>>().join("; ")))
}

fn prefix_vs_oracle() -> Outcome {
    let (g, states) = all_states(4);
    let bound = default_bound(4);
    let budget = OracleBudget::new(u64::MAX, bound);
    let goals = single_literal_goals(&g);
    let actions: Vec<GroundAction> = (0..g.num_actions()).map(|id| g.action(id)).collect();
    let mut seqs: Vec<Vec<GroundAction>> = vec![Vec::new()];
    for a in &actions {
        seqs.push(vec![a.clone()]);
        for b in &actions {
            seqs.push(vec![a.clone(), b.clone()]);
        }
    }
    let (mut checks, mut positives) = (0u64, 0u64);
    let mut bad = Vec::new();
    for s in &states {
        for goal in &goals {
            let plans = oracle_optimal_plans(builtin_domain(), g.universe(), s, goal, budget).unwrap();
            for seq in &seqs {
                checks += 1;
                let ours = is_optimal_prefix(&g, s, goal, seq, bound).unwrap();
                let theirs = is_prefix_of_any(&plans, seq);
                positives += ours as u64;
                if ours != theirs && bad.len() < 3 {
                    bad.push(format!("{goal} after {} actions: {ours} vs {theirs}", seq.len()));
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{} states x {} goals x {} sequences = {checks} checks ({positives} true), disagreements: {}",
            states.len(),
            goals.len(),
            seqs.len(),
            if bad.is_empty() { "none".to_string() } else { bad.join("; ") }
        ),
    )
}

fn trac(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_trac")).args(args).output().expect("trac binary runs")
}

fn suite_and_verify(dir: &Path) -> Outcome {
    let seed = SUITE_SEED.to_string();
    let gen = trac(&["--jobs", "1", "suite", "--seed", &seed, "--out", dir.to_str().unwrap()]);
    if !gen.status.success() {
        return outcome(false, format!("suite failed: {}", String::from_utf8_lossy(&gen.stderr)));
    }
    let out = trac(&["verify", dir.to_str().unwrap()]);
    let (mut sets, mut records, mut labels, mut renders, mut other) = (0, 0u64, 0u64, 0u64, 0u64);
    for line in String::from_utf8_lossy(&out.stdout).lines() {
        let v: serde_json::Value = serde_json::from_str(line).expect("verify prints JSON lines");
        let n = |k: &str| v[k].as_u64().unwrap_or(0);
        sets += 1;
        records += n("records");
        labels += n("label_mismatches");
        renders += n("render_mismatches");
        other += n("id_mismatches") + n("invalid") + n("duplicates") + u64::from(v["digest_matches"] != true);
    }
    outcome(
        out.status.success() && sets == 32 && labels == 0 && renders == 0 && other == 0,
        format!("{sets} datasets, {records} records, {labels} label mismatches, {renders} render mismatches, {other} other problems"),
    )
}

fn datasets(dir: &Path) -> Option<(Manifest, Vec<(String, Vec<DatasetRecord>)>)> {
    let m = read_manifest(dir).ok()?;
    let sets = m.datasets.iter().map(|e| Some((e.name.clone(), read_dataset(&dir.join(&e.file)).ok()?))).collect::<Option<_>>()?;
    Some((m, sets))
}

fn balance_and_dedup(dir: &Path) -> Outcome {
    let Some((_, sets)) = datasets(dir) else {
        return outcome(false, "suite output unavailable");
    };
    let mut bad = Vec::new();
    for (name, records) in &sets {
        let trues = records.iter().filter(|r| r.label == 1).count();
        let forms: HashSet<String> = records.iter().map(|r| r.to_instance().unwrap().canonical()).collect();
        if trues * 2 != records.len() || forms.len() != records.len() {
            bad.push(format!("{name}: {trues}/{} true, {} distinct", records.len(), forms.len()));
        }
    }
    outcome(bad.is_empty(), format!("{} datasets exactly 50% true with distinct canonical forms {}", sets.len(), bad.join("; ")))
}

fn digests(dir: &Path) -> Option<BTreeMap<String, String>> {
    let m = read_manifest(dir).ok()?;
    Some(m.datasets.into_iter().map(|e| (e.file, e.sha256)).collect())
}

fn determinism(first: &Path, second: &Path) -> Outcome {
    let seed = SUITE_SEED.to_string();
    let gen = trac(&["--jobs", "2", "suite", "--seed", &seed, "--out", second.to_str().unwrap()]);
    if !gen.status.success() {
        return outcome(false, format!("second suite failed: {}", String::from_utf8_lossy(&gen.stderr)));
    }
    let (Some(a), Some(b)) = (digests(first), digests(second)) else {
        return outcome(false, "manifest missing");
    };
    let mut differing: Vec<&String> = a.iter().filter(|(f, d)| b.get(*f) != Some(d)).map(|(f, _)| f).collect();
    for f in a.keys() {
        if std::fs::read(first.join(f)).ok() != std::fs::read(second.join(f)).ok() && !differing.contains(&f) {
            differing.push(f);
        }
    }
    let manifests_equal = std::fs::read(first.join("manifest.json")).ok() == std::fs::read(second.join("manifest.json")).ok();
    outcome(
        differing.is_empty() && manifests_equal && a.len() == 32,
        format!("1 vs 2 workers: {} file digests compared, {} differ, manifests identical: {manifests_equal}", a.len(), differing.len()),
    )
}

fn manifest_shape(dir: &Path) -> Outcome {
    let Ok(m) = read_manifest(dir) else {
        return outcome(false, "manifest unreadable");
    };
    let mut found: BTreeMap<GeTag, Vec<(Task, usize, usize, usize, PoolKind, ConditionShape)>> = BTreeMap::new();
    for e in &m.datasets {
        let c = &e.config;
        if e.records != c.count {
            return outcome(false, format!("{}: {} records, config says {}", e.name, e.records, c.count));
        }
        found.entry(c.ge_tag).or_default().push((c.task, c.objects, c.length, c.count, c.pool, c.shape));
    }
    use ConditionShape::*;
    use PoolKind::*;
    use Task::*;
    let mut want: BTreeMap<GeTag, Vec<_>> = BTreeMap::new();
    for task in Task::ALL {
        for n in 1..=3 {
            want.entry(GeTag::None).or_default().push((task, 5, n, 15_000, Standard, Mixed));
        }
        want.entry(GeTag::Ge1).or_default().push((task, 10, 2, 15_000, Standard, Mixed));
        want.entry(GeTag::Ge3).or_default().push((task, 5, 2, 15_000, Unseen, Mixed));
    }
    for task in [Projection, Executability, Planning] {
        for n in [4, 5] {
            want.entry(GeTag::Ge2).or_default().push((task, 5, n, 15_000, Standard, Mixed));
        }
    }
    for task in [Projection, Planning, GoalRecognition] {
        want.entry(GeTag::Ge4Lit).or_default().push((task, 5, 2, 15_000, Standard, Literals));
        want.entry(GeTag::Ge4Conj).or_default().push((task, 5, 2, 3_000, Standard, Conjunctions));
    }
    let mut bad = Vec::new();
    for (tag, rows) in &mut want {
        rows.sort();
        let got = found.get_mut(tag).map(|v| {
            v.sort();
            v.clone()
        });
        if got.as_ref() != Some(rows) {
            bad.push(format!("{}: expected {rows:?}, got {got:?}", tag.as_str()));
        }
    }
    let standard = found.get(&GeTag::None).map_or(0, Vec::len);
    outcome(
        bad.is_empty() && m.datasets.len() == 32,
        format!("{standard} standard + {} GE datasets with expected parameters {}", m.datasets.len() - standard, bad.join("; ")),
    )
}

fn translate_instance(p: &ProblemInstance, pool: &NamePool) -> ProblemInstance {
    let tr = |n: &String| pool.translate(n, PoolKind::Unseen, PoolKind::Standard).expect("unseen name has a partner");
    let atom = |a: &Atom| Atom::new(&a.predicate, &a.args.iter().map(tr).collect::<Vec<_>>());
    let lit = |l: &Literal| Literal { atom: atom(&l.atom), positive: l.positive };
    let names: Vec<String> = p.meta.names.iter().map(tr).collect();
    let u = universe(&names).unwrap();
    ProblemInstance {
        task: p.task,
        initial_state: p.initial_state.iter().map(atom).collect(),
        actions: p
            .actions
            .iter()
            .map(|a| ground_action(builtin_domain(), &u, &a.name, &a.args.iter().map(tr).collect::<Vec<_>>()).unwrap())
            .collect(),
        condition: p.condition.as_ref().map(|c| match c {
            Condition::Literal(l) => Condition::Literal(lit(l)),
            Condition::And(a, b) => Condition::And(lit(a), lit(b)),
        }),
        label: p.label,
        meta: InstanceMeta { pool: PoolKind::Standard, names, ..p.meta.clone() },
    }
}

fn ge3_isomorphism(dir: &Path) -> Outcome {
    let Some((m, sets)) = datasets(dir) else {
        return outcome(false, "suite output unavailable");
    };
    let by_name: HashMap<&str, &Vec<DatasetRecord>> = sets.iter().map(|(n, r)| (n.as_str(), r)).collect();
    let pool = NamePool::builtin();
    let generic = grounding(&names(5));
    let (mut total, mut unchanged, mut mirrored) = (0, 0, 0);
    for e in m.datasets.iter().filter(|e| e.config.ge_tag == GeTag::Ge3) {
        let standard = by_name.get(format!("{}-L2", e.config.task.short()).as_str()).copied();
        for (i, r) in by_name[e.name.as_str()].iter().enumerate() {
            total += 1;
            let p = translate_instance(&r.to_instance().unwrap(), pool);
            let g = generic.renamed(universe(&p.meta.names).unwrap()).unwrap();
            if p.recompute_label(&g).unwrap() == p.label {
                unchanged += 1;
            }
            if standard.is_some_and(|s| s.get(i).is_some_and(|s| s.id == p.id())) {
                mirrored += 1;
            }
        }
    }
    outcome(
        total == 60_000 && unchanged == total,
        format!("{unchanged}/{total} translated GE3 records keep their label; {mirrored}/{total} equal the standard L2 record at the same index"),
    )
}

fn sampler_uniformity() -> Outcome {
    // Upper 1% point of chi-square with 12 degrees of freedom.
    const CRITICAL: f64 = 26.217;
    let draws = 26_000;
    let (_, states) = all_states(3);
    let index: HashMap<State, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let mut counts = vec![0u64; states.len()];
    let mut rng = SeededRng::new(SUITE_SEED);
    let ns = names(3);
    for _ in 0..draws {
        let c: BlockConfiguration = sample_configuration(3, &mut rng);
        counts[index[&configuration_to_state(&c, &ns)]] += 1;
    }
    let expected = draws as f64 / states.len() as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    outcome(
        states.len() == 13 && chi2 < CRITICAL,
        format!("{draws} draws over {} configurations, chi2 = {chi2:.2} < {CRITICAL} (alpha 0.01, 12 df)", states.len()),
    )
}

fn ge1_context_size(dir: &Path) -> Outcome {
    let Some((m, sets)) = datasets(dir) else {
        return outcome(false, "suite output unavailable");
    };
    let tags: HashMap<&str, GeTag> = m.datasets.iter().map(|e| (e.name.as_str(), e.config.ge_tag)).collect();
    let mean = |tag: GeTag| {
        let (mut n, mut sentences, mut words) = (0f64, 0f64, 0f64);
        for (name, records) in &sets {
            if tags[name.as_str()] != tag {
                continue;
            }
            for r in records {
                n += 1.0;
                sentences += r.context.matches(". ").count() as f64 + 1.0;
                words += r.context.split_whitespace().count() as f64;
            }
        }
        (sentences / n, words / n)
    };
    let (gs, gw) = mean(GeTag::Ge1);
    let (ss, sw) = mean(GeTag::None);
    outcome(
        gs > ss,
        format!(
            "GE1 contexts average {gs:.2} sentences / {gw:.1} words vs {ss:.2} / {sw:.1} standard: +{:.1} sentences, +{:.1} words (reference +6.1 / +52.1)",
            gs - ss,
            gw - sw
        ),
    )
}
