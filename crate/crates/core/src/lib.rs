//! Text-adventure engine with a declarative world language, plus a
//! pipeline that turns a language-model story into a game action sequence
//! and improves the prompt from the game score.

pub mod assets;
pub mod dsl;
pub mod engine;
pub mod executor;
pub mod llm;
pub mod story;
pub mod world;

pub use dsl::{parse_worldspec, serialize_worldspec, ParseDiagnostic};
pub use engine::{new_game, parse_command, run_commands, Command, EpisodeResult, GameState, TurnRecord};
pub use executor::{augment_with_navigation, run_episode, shortest_path, Plan, PlanFailure};
pub use llm::{ChatBackend, ChatRequest, LlmError};
pub use story::{run_pipeline, ObjectMapping, PipelineRun, StoryError, Storyteller};
pub use world::{validate_world, ActionDef, Condition, Effect, Tier, World, WorldSpec};
