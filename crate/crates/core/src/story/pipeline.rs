use std::fs;
use std::io;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use super::feedback::feedback_augmentation;
use super::generate::ImaginaryStory;
use super::mapping::ObjectMapping;
use super::simplify::Simplified;
use super::translate::TranslatedSequence;
use super::{Exchange, PipelineError, StoryError, Storyteller};
use crate::engine::{write_transcript, EpisodeResult, TurnRecord};
use crate::executor::{run_episode, Plan};
use crate::world::World;

#[derive(Debug, Clone, Serialize)]
pub struct PipelineRun {
    pub iteration: usize,
    pub story: ImaginaryStory,
    pub simplified: Simplified,
    pub sequence: TranslatedSequence,
    pub plan: Plan,
    pub result: EpisodeResult,
    #[serde(skip)]
    pub transcript: Vec<TurnRecord>,
    /// Set when the episode was lost; it goes into the next prompt.
    pub feedback: Option<String>,
    pub exchanges: Vec<Exchange>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineOutcome {
    pub mapping: ObjectMapping,
    pub mapping_exchanges: Vec<Exchange>,
    pub runs: Vec<PipelineRun>,
}

impl PipelineOutcome {
    pub fn won(&self) -> bool {
        self.runs.last().is_some_and(|r| r.result.win)
    }
}

/// Maps the objects once, then writes, distils, translates and plays
/// stories until one wins or `max_iterations` runs are done. From the
/// second iteration on the previous story is continued with the score
/// feedback in the prompt.
pub fn run_pipeline(
    world: &Arc<World>,
    setting: &str,
    topic: &str,
    teller: &Storyteller<'_>,
    max_iterations: usize,
) -> Result<PipelineOutcome, PipelineError> {
    let at = |iteration: usize| move |source: StoryError| PipelineError { iteration, source };
    if max_iterations == 0 {
        return Err(at(0)(StoryError::InvalidIterations));
    }
    teller.take_exchanges();
    let mapping = teller.map_objects(world, setting).map_err(at(0))?;
    let mapping_exchanges = teller.take_exchanges();
    let mut runs: Vec<PipelineRun> = Vec::new();
    for iteration in 1..=max_iterations {
        let story = match runs.last() {
            None => teller.generate_story(world, &mapping, topic, None),
            Some(prev) if prev.story.sentences.len() >= 2 => {
                teller.continue_story(world, &prev.story, &mapping, prev.feedback.as_deref())
            }
            Some(prev) => teller
                .generate_story(world, &mapping, topic, prev.feedback.as_deref())
                .map(|s| ImaginaryStory { iteration, ..s }),
        }
        .map_err(at(iteration))?;
        let simplified = teller.simplify_story(world, &story, &mapping).map_err(at(iteration))?;
        let sequence = teller.translate_phrases(world, &simplified.phrases, &mapping).map_err(at(iteration))?;
        let episode = run_episode(world, &sequence.commands());
        let feedback = if episode.result.win {
            None
        } else {
            Some(feedback_augmentation(&episode.result).map_err(at(iteration))?)
        };
        let won = episode.result.win;
        runs.push(PipelineRun {
            iteration,
            story,
            simplified,
            sequence,
            plan: episode.plan,
            result: episode.result,
            transcript: episode.transcript,
            feedback,
            exchanges: teller.take_exchanges(),
        });
        if won {
            break;
        }
    }
    Ok(PipelineOutcome { mapping, mapping_exchanges, runs })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

/// Writes every artifact of a pipeline run into `dir`, creating it.
pub fn write_run_artifacts(dir: &Path, outcome: &PipelineOutcome) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    write_json(&dir.join("mapping.json"), &outcome.mapping)?;
    write_json(&dir.join("prompts.mapping.json"), &outcome.mapping_exchanges)?;
    for run in &outcome.runs {
        let n = run.iteration;
        let mut story = run.story.sentences.join("\n");
        story.push('\n');
        fs::write(dir.join(format!("story.iter{n}.txt")), story)?;
        write_json(&dir.join(format!("phrases.iter{n}.json")), &run.simplified)?;
        write_json(&dir.join(format!("sequence.iter{n}.json")), &run.sequence)?;
        write_json(
            &dir.join(format!("result.iter{n}.json")),
            &serde_json::json!({ "plan": run.plan, "result": run.result }),
        )?;
        let mut episode = Vec::new();
        write_transcript(&mut episode, &run.transcript)?;
        fs::write(dir.join(format!("episode.iter{n}.jsonl")), episode)?;
        if let Some(feedback) = &run.feedback {
            fs::write(dir.join(format!("feedback.iter{n}.txt")), format!("{feedback}\n"))?;
        }
        write_json(&dir.join(format!("prompts.iter{n}.json")), &run.exchanges)?;
    }
    Ok(())
}
