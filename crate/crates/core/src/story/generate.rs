use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::mapping::ObjectMapping;
use super::names::NameMatcher;
use super::{StoryBackend, StoryError, Storyteller, REGENERATION_ATTEMPTS};
use crate::llm::{ChatBackend, ChatRequest, GENERATION_TEMPERATURE};
use crate::world::World;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImaginaryStory {
    pub topic: String,
    pub sentences: Vec<String>,
    pub iteration: usize,
}

impl ImaginaryStory {
    pub fn text(&self) -> String {
        self.sentences.join(" ")
    }
}

fn strip_list_marker(line: &str) -> &str {
    let t = line.trim_start();
    let t = t.strip_prefix("- ").or_else(|| t.strip_prefix("* ")).unwrap_or(t);
    let digits = t.len() - t.trim_start_matches(|c: char| c.is_ascii_digit()).len();
    if digits > 0 {
        let after = &t[digits..];
        if let Some(rest) = after.strip_prefix(". ").or_else(|| after.strip_prefix(") ")) {
            return rest;
        }
    }
    t
}

/// Splits text into sentences at `.`, `!` or `?` followed by whitespace.
/// List markers are dropped and a missing final stop is added.
pub fn segment_sentences(text: &str) -> Vec<String> {
    let joined = text.lines().map(strip_list_marker).collect::<Vec<_>>().join(" ");
    let chars: Vec<char> = joined.chars().collect();
    let mut out = Vec::new();
    let mut current = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        current.push(c);
        i += 1;
        if matches!(c, '.' | '!' | '?') {
            while i < chars.len() && matches!(chars[i], '"' | '\'' | ')' | '\u{201d}' | '\u{2019}') {
                current.push(chars[i]);
                i += 1;
            }
            if i >= chars.len() || chars[i].is_whitespace() {
                push_sentence(&mut out, &current);
                current.clear();
            }
        }
    }
    push_sentence(&mut out, &current);
    out
}

fn push_sentence(out: &mut Vec<String>, raw: &str) {
    let s = raw.split_whitespace().collect::<Vec<_>>().join(" ");
    if !s.chars().any(char::is_alphanumeric) {
        return;
    }
    let ends = s.trim_end_matches(['"', '\'', ')', '\u{201d}', '\u{2019}']).ends_with(['.', '!', '?']);
    out.push(if ends { s } else { format!("{s}.") });
}

/// Per sentence: the names mentioned, and those mentioned for the first time.
pub(crate) fn introductions(sentences: &[String], matcher: &NameMatcher) -> Vec<(Vec<super::Mention>, Vec<usize>)> {
    let mut seen = HashSet::new();
    sentences
        .iter()
        .map(|s| {
            let mentions = matcher.find(s);
            let mut new = Vec::new();
            for m in &mentions {
                if seen.insert(m.name) {
                    new.push(m.name);
                }
            }
            (mentions, new)
        })
        .collect()
}

/// Indices of sentences that bring in two or more objects never seen before.
pub fn validate_story_constraint(story: &ImaginaryStory, mapping: &ObjectMapping) -> Result<(), Vec<usize>> {
    constraint_violations(&story.sentences, mapping)
}

fn constraint_violations(sentences: &[String], mapping: &ObjectMapping) -> Result<(), Vec<usize>> {
    let bad: Vec<usize> = introductions(sentences, &mapping.matcher())
        .iter()
        .enumerate()
        .filter(|(_, (_, new))| new.len() >= 2)
        .map(|(i, _)| i)
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad)
    }
}

/// Rooms, their exits and the imaginary objects that start in them.
pub(crate) fn adjacency_summary(world: &World, mapping: &ObjectMapping) -> String {
    let room_name = |id: &str| world.room(id).map_or(id.to_string(), |r| r.display_name.clone());
    world
        .rooms()
        .iter()
        .map(|room| {
            let objects: Vec<String> = world
                .objects()
                .iter()
                .filter(|o| o.location == room.id)
                .map(|o| match mapping.imaginary_for(&o.id) {
                    Some(name) => format!("{name} ({})", o.display_name),
                    None => o.display_name.clone(),
                })
                .collect();
            let exits: Vec<String> =
                world.exits(&room.id).iter().map(|(d, to)| format!("{} to the {}", d.as_str(), room_name(to))).collect();
            let holds = if objects.is_empty() { "nothing to use".to_string() } else { objects.join(", ") };
            let exits = if exits.is_empty() { "no exits".to_string() } else { format!("exits {}", exits.join(", ")) };
            format!("- The {} has {holds}; {exits}.", room.display_name)
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn topic_clause(topic: &str) -> String {
    topic.trim().trim_end_matches(['.', '!', '?']).trim().to_string()
}

fn templated_story(names: &[&str], topic: &str) -> Vec<String> {
    let mut out: Vec<String> = names.iter().map(|n| format!("Find the {n}.")).collect();
    if let Some(last) = names.last() {
        out.push(format!("Use the {last} to {}.", topic_clause(topic)));
    }
    out
}

fn violation_note(violations: &[usize]) -> String {
    let list: Vec<String> = violations.iter().map(|i| (i + 1).to_string()).collect();
    format!(
        "Sentence {} brings in more than one new object. Rewrite so that every sentence brings in at most one new object.",
        list.join(", ")
    )
}

impl Storyteller<'_> {
    fn feedback_block(feedback: Option<&str>) -> String {
        match feedback {
            Some(f) if !f.trim().is_empty() => format!("Feedback from the last game: {}", f.trim()),
            _ => String::new(),
        }
    }

    /// Writes a story that puts the mapped objects to use toward `topic`.
    pub fn generate_story(
        &self,
        world: &World,
        mapping: &ObjectMapping,
        topic: &str,
        feedback: Option<&str>,
    ) -> Result<ImaginaryStory, StoryError> {
        if mapping.is_empty() {
            return Err(StoryError::EmptyMapping);
        }
        if self.samples.is_empty() {
            return Err(StoryError::NoTrainingSamples);
        }
        let backend = match self.backend {
            StoryBackend::Deterministic => {
                let sentences = templated_story(&mapping.names(), topic);
                return Ok(ImaginaryStory { topic: topic.to_string(), sentences, iteration: 1 });
            }
            StoryBackend::Llm(b) => b,
        };
        let samples = self.samples.join("\n\n");
        let names = mapping.names().join(", ");
        let adjacency = adjacency_summary(world, mapping);
        let feedback = Self::feedback_block(feedback);
        let (system, user) = self.prompts.generate.render(&[
            ("setting", &mapping.setting),
            ("samples", &samples),
            ("topic", topic),
            ("objects", &names),
            ("adjacency", &adjacency),
            ("feedback", &feedback),
        ]);
        let request = ChatRequest::new(system, user, GENERATION_TEMPERATURE);
        let sentences = self.ask_for_story(backend, "generate_story", request, mapping, &[], StoryError::EmptyStory)?;
        Ok(ImaginaryStory { topic: topic.to_string(), sentences, iteration: 1 })
    }

    /// Drops the last sentence and has the backend carry on from there.
    pub fn continue_story(
        &self,
        world: &World,
        story: &ImaginaryStory,
        mapping: &ObjectMapping,
        feedback: Option<&str>,
    ) -> Result<ImaginaryStory, StoryError> {
        if story.sentences.len() < 2 {
            return Err(StoryError::StoryTooShort { needed: 2, got: story.sentences.len() });
        }
        if mapping.is_empty() {
            return Err(StoryError::EmptyMapping);
        }
        let prefix = &story.sentences[..story.sentences.len() - 1];
        let next = |sentences| ImaginaryStory { topic: story.topic.clone(), sentences, iteration: story.iteration + 1 };
        let backend = match self.backend {
            StoryBackend::Deterministic => {
                let matcher = mapping.matcher();
                let names = mapping.names();
                let seen: HashSet<usize> = prefix.iter().flat_map(|s| matcher.find(s)).map(|m| m.name).collect();
                let missing: Vec<&str> = (0..names.len()).filter(|i| !seen.contains(i)).map(|i| names[i]).collect();
                let mut sentences = prefix.to_vec();
                sentences.extend(missing.iter().map(|n| format!("Find the {n}.")));
                sentences.push(format!("Use the {} to {}.", names[names.len() - 1], topic_clause(&story.topic)));
                return Ok(next(sentences));
            }
            StoryBackend::Llm(b) => b,
        };
        let names = mapping.names().join(", ");
        let adjacency = adjacency_summary(world, mapping);
        let feedback = Self::feedback_block(feedback);
        let so_far = prefix.join(" ");
        let (system, user) = self.prompts.continuation.render(&[
            ("setting", &mapping.setting),
            ("topic", &story.topic),
            ("objects", &names),
            ("story", &so_far),
            ("adjacency", &adjacency),
            ("feedback", &feedback),
        ]);
        let request = ChatRequest::new(system, user, GENERATION_TEMPERATURE);
        let sentences = self.ask_for_story(backend, "continue_story", request, mapping, prefix, StoryError::EmptyContinuation)?;
        Ok(next(sentences))
    }

    /// Asks until the story (prefix + answer) keeps the one-new-object rule.
    fn ask_for_story(
        &self,
        backend: &dyn ChatBackend,
        stage: &str,
        mut request: ChatRequest,
        mapping: &ObjectMapping,
        prefix: &[String],
        empty: StoryError,
    ) -> Result<Vec<String>, StoryError> {
        let attempts = 1 + REGENERATION_ATTEMPTS;
        let mut violations = Vec::new();
        for _ in 0..attempts {
            let response = self.ask(backend, stage, request.clone())?;
            let mut added = segment_sentences(&response);
            // Some models repeat the story so far before continuing it.
            if !prefix.is_empty() && added.len() >= prefix.len() && added[..prefix.len()] == *prefix {
                added.drain(..prefix.len());
            }
            if added.is_empty() {
                return Err(empty);
            }
            let mut sentences = prefix.to_vec();
            sentences.extend(added);
            match constraint_violations(&sentences, mapping) {
                Ok(()) => return Ok(sentences),
                Err(bad) => {
                    request = request.follow_up(response, violation_note(&bad));
                    violations = bad;
                }
            }
        }
        Err(StoryError::ConstraintUnsatisfied { violations, attempts })
    }
}
