use serde::Serialize;

use super::lexicon::VerbLexicon;
use super::mapping::ObjectMapping;
use super::names::words;
use super::simplify::Phrase;
use super::{StoryBackend, StoryError, Storyteller};
use crate::engine::Command;
use crate::llm::{ChatRequest, EXTRACTION_TEMPERATURE};
use crate::world::{ActionDef, World};

/// Which rule picked the action for a phrase, in the order they are tried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TranslationRule {
    ExactVerb,
    Synonym,
    SingleAction,
    Similarity,
    FirstDeclared,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslatedCommand {
    pub command: Command,
    pub phrase: Phrase,
    pub action_id: String,
    pub rule: TranslationRule,
}

impl Serialize for TranslatedCommand {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row<'a> {
            command: String,
            action_id: &'a str,
            phrase: String,
            source_sentence: usize,
            rule: TranslationRule,
        }
        Row {
            command: self.command.to_string(),
            action_id: &self.action_id,
            phrase: self.phrase.text(),
            source_sentence: self.phrase.source_sentence,
            rule: self.rule,
        }
        .serialize(serializer)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct TranslatedSequence {
    pub commands: Vec<TranslatedCommand>,
}

impl TranslatedSequence {
    pub fn commands(&self) -> Vec<Command> {
        self.commands.iter().map(|c| c.command.clone()).collect()
    }

    pub fn texts(&self) -> Vec<String> {
        self.commands.iter().map(|c| c.command.to_string()).collect()
    }
}

/// The phrase verb as written and with its first word in base form.
fn verb_forms(verb: &str, lexicon: &VerbLexicon) -> Vec<String> {
    let verb = verb.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    let mut forms = vec![verb.clone()];
    let mut parts = verb.splitn(2, ' ');
    if let Some(base) = parts.next().and_then(|w| lexicon.base_form(w)) {
        let based = match parts.next() {
            Some(rest) => format!("{base} {rest}"),
            None => base,
        };
        if based != verb {
            forms.push(based);
        }
    }
    forms
}

/// Picks the candidate verb named in a free-text answer.
fn match_answer<'a>(answer: &str, candidates: &[&'a ActionDef], world: &World) -> Option<&'a ActionDef> {
    let answer: Vec<String> = words(answer).into_iter().map(|w| w.lower).collect();
    let joined = answer.join(" ");
    if let Some(a) = candidates.iter().find(|a| a.verb == joined || world.canonical_verb(&joined) == Some(a.verb.as_str())) {
        return Some(a);
    }
    // Longest candidate verb appearing as whole words.
    let mut by_len: Vec<&&ActionDef> = candidates.iter().collect();
    by_len.sort_by_key(|a| std::cmp::Reverse(a.verb.split(' ').count()));
    by_len
        .into_iter()
        .find(|a| {
            let v: Vec<&str> = a.verb.split(' ').collect();
            answer.windows(v.len()).any(|w| w.iter().zip(&v).all(|(x, y)| x == y))
        })
        .copied()
}

impl Storyteller<'_> {
    /// Maps phrases back to declared actions on the real objects.
    pub fn translate_phrases(
        &self,
        world: &World,
        phrases: &[Phrase],
        mapping: &ObjectMapping,
    ) -> Result<TranslatedSequence, StoryError> {
        let lexicon = self.lexicon.for_world(world);
        let mut out = TranslatedSequence::default();
        for phrase in phrases {
            let real = mapping
                .real_for(&phrase.imaginary_object)
                .ok_or_else(|| StoryError::UnmappedObject(phrase.imaginary_object.clone()))?;
            let candidates: Vec<&ActionDef> = world.actions_on(real).collect();
            if candidates.is_empty() {
                return Err(StoryError::NoAdmissibleAction { object: real.to_string() });
            }
            let forms = verb_forms(&phrase.verb, &lexicon);
            let exact = candidates.iter().find(|a| forms.contains(&a.verb));
            let synonym = || {
                candidates
                    .iter()
                    .find(|a| forms.iter().any(|f| world.canonical_verb(f) == Some(a.verb.as_str())))
            };
            let (action, rule) = if let Some(a) = exact {
                (*a, TranslationRule::ExactVerb)
            } else if let Some(a) = synonym() {
                (*a, TranslationRule::Synonym)
            } else if candidates.len() == 1 {
                (candidates[0], TranslationRule::SingleAction)
            } else {
                match self.similar_action(world, phrase, real, &candidates)? {
                    Some(a) => (a, TranslationRule::Similarity),
                    None => (candidates[0], TranslationRule::FirstDeclared),
                }
            };
            out.commands.push(TranslatedCommand {
                command: Command::act(action.verb.clone(), action.object.clone()),
                phrase: phrase.clone(),
                action_id: action.id.clone(),
                rule,
            });
        }
        Ok(out)
    }

    fn similar_action<'w>(
        &self,
        world: &World,
        phrase: &Phrase,
        real: &str,
        candidates: &[&'w ActionDef],
    ) -> Result<Option<&'w ActionDef>, StoryError> {
        let StoryBackend::Llm(backend) = self.backend else { return Ok(None) };
        let display = world.object(real).map_or(real, |o| o.display_name.as_str());
        let verbs: Vec<&str> = candidates.iter().map(|a| a.verb.as_str()).collect();
        let (system, user) = self.prompts.translate.render(&[
            ("phrase", &phrase.text()),
            ("imaginary", &phrase.imaginary_object),
            ("object", display),
            ("verbs", &verbs.join(", ")),
        ]);
        let answer = self.ask(backend, "translate_action", ChatRequest::new(system, user, EXTRACTION_TEMPERATURE))?;
        Ok(match_answer(&answer, candidates, world))
    }
}
