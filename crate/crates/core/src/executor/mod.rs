//! Turns a bare action sequence into an executable plan by inserting
//! movement and prerequisite steps, then runs it.

mod path;
mod plan;

pub use path::{shortest_path, Unreachable};
pub use plan::{
    augment_with_navigation, resolve_prerequisites, run_episode, Episode, FailureReason, Plan, PlanFailure, PlanStep,
    Provenance, DEFAULT_DEPTH_BUDGET,
};
