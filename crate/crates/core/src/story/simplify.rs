use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::generate::{introductions, validate_story_constraint, ImaginaryStory};
use super::lexicon::VerbLexicon;
use super::mapping::ObjectMapping;
use super::names::{words, Mention, NameMatcher, Word};
use super::{StoryBackend, StoryError, Storyteller};
use crate::llm::{ChatRequest, EXTRACTION_TEMPERATURE};
use crate::world::World;

/// Verb used when a sentence has no recognisable verb at all.
pub const DEFAULT_VERB: &str = "use";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phrase {
    pub verb: String,
    /// Imaginary name exactly as written in the mapping.
    pub imaginary_object: String,
    /// 0-based sentence index.
    pub source_sentence: usize,
}

impl Phrase {
    pub fn text(&self) -> String {
        format!("{} {}", self.verb, self.imaginary_object)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Simplified {
    pub phrases: Vec<Phrase>,
    /// Sentences that mention no mapped object.
    pub skipped: Vec<usize>,
}

/// Lowercased verb at `j`, extended to a multi-word world verb if one
/// starts there and stays clear of the object mentions.
fn verb_at(ws: &[Word], j: usize, limit: usize, lexicon: &VerbLexicon) -> String {
    let lowers: Vec<String> = ws[j..limit].iter().map(|w| w.lower.clone()).collect();
    let n = lexicon.phrase_len(&lowers).unwrap_or(1);
    ws[j..j + n].iter().map(|w| w.surface.to_lowercase()).collect::<Vec<_>>().join(" ")
}

fn rule_phrase(
    sentence: &str,
    index: usize,
    mentions: &[Mention],
    new: &[usize],
    matcher: &NameMatcher,
    names: &[&str],
    lexicon: &VerbLexicon,
) -> Phrase {
    let ws = words(sentence);
    debug_assert_eq!(matcher.find_in(&ws), mentions);
    let target = new
        .first()
        .and_then(|n| mentions.iter().find(|m| m.name == *n))
        .unwrap_or(&mentions[0]);
    let in_mention = |j: usize| mentions.iter().any(|m| m.start <= j && j < m.end);
    let next_mention = |j: usize| mentions.iter().map(|m| m.start).filter(|&s| s > j).min().unwrap_or(ws.len());
    let before = (0..target.start).rev().find(|&j| !in_mention(j) && lexicon.is_verb(&ws[j].lower));
    let verb = before
        .or_else(|| (0..ws.len()).find(|&j| !in_mention(j) && lexicon.is_verb(&ws[j].lower)))
        .map(|j| verb_at(&ws, j, next_mention(j), lexicon))
        .unwrap_or_else(|| DEFAULT_VERB.to_string());
    Phrase { verb, imaginary_object: names[target.name].to_string(), source_sentence: index }
}

/// Reads `N. verb Object` lines into (sentence index, phrase) pairs.
fn parse_phrase_lines(text: &str, matcher: &NameMatcher, names: &[&str]) -> Vec<(usize, Phrase)> {
    let mut out = Vec::new();
    for (line_no, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let t = line.trim().trim_start_matches(['-', '*']).trim_start();
        let digits = t.len() - t.trim_start_matches(|c: char| c.is_ascii_digit()).len();
        let (index, rest) = match t[..digits].parse::<usize>() {
            Ok(n) if n >= 1 => (n - 1, t[digits..].trim_start_matches(['.', ')', ':'])),
            _ => (line_no, t),
        };
        let ws = words(rest);
        let Some(m) = matcher.find_in(&ws).into_iter().next() else { continue };
        let verb = ws[..m.start].iter().map(|w| w.surface.to_lowercase()).collect::<Vec<_>>().join(" ");
        if verb.is_empty() {
            continue;
        }
        out.push((index, Phrase { verb, imaginary_object: names[m.name].to_string(), source_sentence: index }));
    }
    out
}

impl Storyteller<'_> {
    /// One verb/object phrase per sentence that mentions a mapped object.
    pub fn simplify_story(
        &self,
        world: &World,
        story: &ImaginaryStory,
        mapping: &ObjectMapping,
    ) -> Result<Simplified, StoryError> {
        if let Err(violations) = validate_story_constraint(story, mapping) {
            return Err(StoryError::ConstraintUnsatisfied { violations, attempts: 0 });
        }
        let lexicon = self.lexicon.for_world(world);
        let matcher = mapping.matcher();
        let names = mapping.names();
        let intro = introductions(&story.sentences, &matcher);

        let mut proposed: BTreeMap<usize, Phrase> = BTreeMap::new();
        if let StoryBackend::Llm(backend) = self.backend {
            let numbered: Vec<String> =
                story.sentences.iter().enumerate().map(|(i, s)| format!("{}. {s}", i + 1)).collect();
            let (system, user) = self
                .prompts
                .simplify
                .render(&[("objects", &names.join(", ")), ("story", &numbered.join("\n"))]);
            let response = self.ask(backend, "simplify_story", ChatRequest::new(system, user, EXTRACTION_TEMPERATURE))?;
            for (index, phrase) in parse_phrase_lines(&response, &matcher, &names) {
                // Keep a model phrase only if its object really is in that sentence.
                let valid = intro
                    .get(index)
                    .is_some_and(|(mentions, _)| mentions.iter().any(|m| names[m.name] == phrase.imaginary_object));
                if valid {
                    proposed.entry(index).or_insert(phrase);
                }
            }
        }

        let mut out = Simplified::default();
        for (i, (sentence, (mentions, new))) in story.sentences.iter().zip(&intro).enumerate() {
            if mentions.is_empty() {
                out.skipped.push(i);
                continue;
            }
            let phrase = match proposed.remove(&i) {
                Some(p) => p,
                None => rule_phrase(sentence, i, mentions, new, &matcher, &names, &lexicon),
            };
            out.phrases.push(phrase);
        }
        Ok(out)
    }
}
