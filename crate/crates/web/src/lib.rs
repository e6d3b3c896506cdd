//! Browser bindings for the demo page in `www/`.
//!
//! Everything is plain Rust returning serializable views; the
//! `#[wasm_bindgen]` wrappers only move JSON strings across the boundary.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use trac_core::blocksworld::state_to_configuration;
use trac_core::dataset::{DatasetRecord, Split};
use trac_core::strips::{apply, applicable, State};
use trac_core::taskgen::{ConditionShape, GenConfig, Generator, ProblemInstance, Task};
use trac_core::textgen::{format_for_lm, LmStyle, RenderedInstance, TemplateSet};

/// Block names per tower, bottom first.
pub type Towers = Vec<Vec<String>>;

#[derive(Clone, Debug, Serialize)]
pub struct Step {
    pub action: String,
    pub sentence: String,
    pub applicable: bool,
    /// Towers after the step; absent once execution has failed.
    pub towers: Option<Towers>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LmView {
    pub style: String,
    pub input: String,
    pub target: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceView {
    pub record: DatasetRecord,
    pub towers: Towers,
    pub trace: Vec<Step>,
    pub lm: Vec<LmView>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    pub task: String,
    pub objects: usize,
    pub length: usize,
    pub seed: u64,
    pub index: usize,
    pub shape: String,
    pub pool: String,
}

pub fn towers(s: &State, names: &[String]) -> Result<Towers, String> {
    let c = state_to_configuration(s, names).map_err(|e| e.to_string())?;
    Ok(c.towers().iter().map(|t| t.iter().map(|&b| names[b].clone()).collect()).collect())
}

/// Runs the action sequence from the initial state, stopping the tower
/// snapshots at the first inapplicable action.
pub fn trace(p: &ProblemInstance, templates: &TemplateSet) -> Result<Vec<Step>, String> {
    let mut state = Some(p.state());
    let mut steps = Vec::with_capacity(p.actions.len());
    for a in &p.actions {
        let ok = state.as_ref().is_some_and(|s| applicable(s, a));
        state = match state {
            Some(s) if ok => Some(apply(&s, a).map_err(|e| e.to_string())?),
            _ => None,
        };
        steps.push(Step {
            action: a.to_string(),
            sentence: templates.render_action(&a.name, &a.args),
            applicable: ok,
            towers: state.as_ref().map(|s| towers(s, &p.meta.names)).transpose()?,
        });
    }
    Ok(steps)
}

pub fn lm_views(r: &RenderedInstance) -> Vec<LmView> {
    [LmStyle::Separator, LmStyle::Concat, LmStyle::Text2text]
        .into_iter()
        .map(|style| {
            let (input, target) = format_for_lm(r, style);
            LmView { style: style.to_string(), input, target }
        })
        .collect()
}

/// One instance of a dataset configuration. Even indices are true
/// instances, odd ones false.
pub fn generate_view(p: &Params) -> Result<InstanceView, String> {
    let task: Task = p.task.parse()?;
    let mut cfg = GenConfig::new(task, p.objects, p.length, 2, p.seed);
    cfg.shape = p.shape.parse()?;
    cfg.pool = p.pool.parse()?;
    if !task.has_condition() {
        cfg.shape = ConditionShape::Mixed;
    }
    let generator = Generator::new(cfg).map_err(|e| e.to_string())?;
    let (instance, _) = generator.instance(p.index, 0).map_err(|e| e.to_string())?;
    let templates = TemplateSet::builtin();
    let record = DatasetRecord::from_instance(&instance, templates, Split::Train);
    Ok(InstanceView {
        towers: towers(&instance.state(), &instance.meta.names)?,
        trace: trace(&instance, templates)?,
        lm: lm_views(&record.rendered()),
        record,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string())).map_err(|e| JsValue::from_str(&e))
}

/// JSON-encoded [`InstanceView`].
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn generate(task: &str, objects: usize, length: usize, seed: u32, index: usize, shape: &str, pool: &str) -> Result<String, JsValue> {
    to_js(generate_view(&Params {
        task: task.into(),
        objects,
        length,
        seed: u64::from(seed),
        index,
        shape: shape.into(),
        pool: pool.into(),
    }))
}

pub fn lm_view(context: &str, query: &str, label: bool, style: &str) -> Result<LmView, String> {
    let r = RenderedInstance { context: context.into(), query: query.into(), label };
    let style: LmStyle = style.parse()?;
    let (input, target) = format_for_lm(&r, style);
    Ok(LmView { style: style.to_string(), input, target })
}

/// LM input/target for free-form context and query text.
#[wasm_bindgen]
pub fn format_lm(context: &str, query: &str, label: bool, style: &str) -> Result<String, JsValue> {
    to_js(lm_view(context, query, label, style))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(task: &str, index: usize) -> Params {
        Params {
            task: task.into(),
            objects: 5,
            length: 3,
            seed: 9,
            index,
            shape: "mixed".into(),
            pool: "standard".into(),
        }
    }

    #[test]
    fn towers_cover_every_block_once() {
        for task in ["projection", "executability", "planning", "goal_recognition"] {
            let v = generate_view(&params(task, 0)).unwrap();
            let mut blocks: Vec<String> = v.towers.concat();
            blocks.sort();
            let mut names = v.record.meta.names.clone();
            names.sort();
            assert_eq!(blocks, names);
            assert_eq!(v.trace.len(), 3);
        }
    }

    #[test]
    fn labels_follow_index_parity() {
        assert_eq!(generate_view(&params("pr", 4)).unwrap().record.label, 1);
        assert_eq!(generate_view(&params("pr", 5)).unwrap().record.label, 0);
    }

    #[test]
    fn executability_trace_matches_label() {
        for index in 0..6 {
            let v = generate_view(&params("ex", index)).unwrap();
            let all = v.trace.iter().all(|s| s.applicable);
            assert_eq!(all, v.record.label == 1);
            if let Some(k) = v.trace.iter().position(|s| !s.applicable) {
                assert!(v.trace[k..].iter().all(|s| s.towers.is_none()));
            }
        }
    }

    #[test]
    fn lm_views_cover_three_styles() {
        let v = generate_view(&params("gr", 1)).unwrap();
        let styles: Vec<&str> = v.lm.iter().map(|l| l.style.as_str()).collect();
        assert_eq!(styles, ["separator", "concat", "text2text"]);
        assert_eq!(v.lm[2].target, "No");
        assert!(v.lm[0].input.starts_with("<s> "));
    }

    #[test]
    fn bad_parameters_are_reported() {
        let mut p = params("pr", 0);
        p.objects = 1;
        assert!(generate_view(&p).is_err());
        p = params("sorting", 0);
        assert!(generate_view(&p).is_err());
        assert!(lm_view("a.", "b.", true, "xml").is_err());
        assert_eq!(lm_view("a.", "b.", true, "concat").unwrap().target, "1");
    }
}
