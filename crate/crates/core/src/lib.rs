//! Generator for textual reasoning-about-actions benchmarks.
//!
//! A typed STRIPS domain is parsed from PDDL, problems for four tasks
//! (projection, executability, planning, goal recognition) are sampled
//! symbolically and labeled by an exact engine and optimal planner, then
//! rendered to English with fixed templates.

pub mod blocksworld;
pub mod dataset;
pub mod domain;
pub mod oracles;
pub mod planner;
pub mod rng;
pub mod sexpr;
pub mod taskgen;
pub mod textgen;
pub mod strips;
