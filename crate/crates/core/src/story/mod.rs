//! Story pipeline: rename world objects for a story setting, have a
//! language model (or the deterministic stand-in) write a story with those
//! objects, distil it into verb/object phrases, translate the phrases back
//! into game commands, play them, and feed the score back into the next
//! prompt.

mod feedback;
mod generate;
mod lexicon;
mod mapping;
mod names;
mod pipeline;
mod prompts;
mod simplify;
mod translate;

use std::sync::Mutex;

use serde::Serialize;
use thiserror::Error;

use crate::llm::{ChatBackend, ChatRequest, LlmError};

pub use feedback::feedback_augmentation;
pub use generate::{segment_sentences, validate_story_constraint, ImaginaryStory};
pub use lexicon::VerbLexicon;
pub use mapping::{setting_lookup, MappingEntry, ObjectMapping};
pub use names::{Mention, NameMatcher};
pub use pipeline::{run_pipeline, write_run_artifacts, PipelineOutcome, PipelineRun};
pub use prompts::{PromptSet, PromptTemplate, TRAINING_SAMPLES};
pub use simplify::{Phrase, Simplified};
pub use translate::{TranslatedCommand, TranslatedSequence, TranslationRule};

pub const DEFAULT_MAX_ITERATIONS: usize = 3;
/// Extra attempts granted when a generated story breaks the one-new-object rule.
pub const REGENERATION_ATTEMPTS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "error", content = "detail", rename_all = "snake_case")]
pub enum StoryError {
    #[error("the object mapping is empty")]
    EmptyMapping,
    #[error("at least one training sample is required")]
    NoTrainingSamples,
    #[error("a story needs at least {needed} sentences to be continued, got {got}")]
    StoryTooShort { needed: usize, got: usize },
    #[error("the backend returned no sentences")]
    EmptyStory,
    #[error("the backend returned an empty continuation")]
    EmptyContinuation,
    #[error("sentences {violations:?} introduce more than one new object after {attempts} attempts")]
    ConstraintUnsatisfied { violations: Vec<usize>, attempts: usize },
    #[error("imaginary object `{0}` is not in the mapping")]
    UnmappedObject(String),
    #[error("object `{object}` has no admissible action")]
    NoAdmissibleAction { object: String },
    #[error("invalid object mapping: {0}")]
    InvalidMapping(String),
    #[error("feedback is only produced for lost episodes")]
    FeedbackOnWin,
    #[error("max_iterations must be at least 1")]
    InvalidIterations,
    #[error(transparent)]
    Backend(#[from] LlmError),
}

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[error("iteration {iteration}: {source}")]
pub struct PipelineError {
    /// 0 for the object mapping step, then 1-based iterations.
    pub iteration: usize,
    pub source: StoryError,
}

/// Who writes and reads the stories.
#[derive(Clone, Copy)]
pub enum StoryBackend<'a> {
    /// Templated stories and rule-based distillation; no model involved.
    Deterministic,
    Llm(&'a dyn ChatBackend),
}

/// One prompt and the answer it got.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exchange {
    pub stage: String,
    pub request: ChatRequest,
    pub response: String,
}

/// Bundles the backend with prompt templates, training samples and the
/// verb lexicon, and logs every model exchange.
pub struct Storyteller<'a> {
    backend: StoryBackend<'a>,
    prompts: PromptSet,
    samples: Vec<String>,
    lexicon: VerbLexicon,
    log: Mutex<Vec<Exchange>>,
}

impl<'a> Storyteller<'a> {
    pub fn new(backend: StoryBackend<'a>) -> Self {
        Storyteller {
            backend,
            prompts: PromptSet::bundled(),
            samples: TRAINING_SAMPLES.iter().map(|s| s.trim().to_string()).collect(),
            lexicon: VerbLexicon::bundled(),
            log: Mutex::new(Vec::new()),
        }
    }

    pub fn deterministic() -> Self {
        Storyteller::new(StoryBackend::Deterministic)
    }

    pub fn llm(backend: &'a dyn ChatBackend) -> Self {
        Storyteller::new(StoryBackend::Llm(backend))
    }

    pub fn with_prompts(mut self, prompts: PromptSet) -> Self {
        self.prompts = prompts;
        self
    }

    pub fn with_samples(mut self, samples: Vec<String>) -> Self {
        self.samples = samples;
        self
    }

    pub fn backend(&self) -> StoryBackend<'a> {
        self.backend
    }

    pub fn prompts(&self) -> &PromptSet {
        &self.prompts
    }

    pub fn samples(&self) -> &[String] {
        &self.samples
    }

    /// Removes and returns the exchanges logged so far.
    pub fn take_exchanges(&self) -> Vec<Exchange> {
        std::mem::take(&mut *self.log.lock().unwrap_or_else(|e| e.into_inner()))
    }

    fn ask(&self, backend: &dyn ChatBackend, stage: &str, request: ChatRequest) -> Result<String, StoryError> {
        let response = backend.complete(&request)?;
        self.log.lock().unwrap_or_else(|e| e.into_inner()).push(Exchange {
            stage: stage.to_string(),
            request,
            response: response.clone(),
        });
        Ok(response)
    }
}

#[cfg(test)]
mod tests;
