use std::collections::HashSet;

use crate::world::World;

pub const BUNDLED_VERBS: &str = include_str!("../../assets/lexicon/verbs.txt");

/// Known action verbs in base form. Third-person forms ("discovers",
/// "carries") are recognised; past participles are not, so adjectives like
/// "hidden" or "enchanted" never count as verbs.
#[derive(Debug, Clone, Default)]
pub struct VerbLexicon {
    words: HashSet<String>,
    /// Multi-word verbs such as "turn on", split into words.
    phrases: Vec<Vec<String>>,
}

impl VerbLexicon {
    pub fn bundled() -> Self {
        let mut lex = VerbLexicon::default();
        lex.extend(BUNDLED_VERBS.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')));
        lex
    }

    pub fn extend<'a>(&mut self, verbs: impl IntoIterator<Item = &'a str>) {
        for verb in verbs {
            let parts: Vec<String> = verb.split_whitespace().map(str::to_lowercase).collect();
            match parts.len() {
                0 => {}
                1 => {
                    self.words.insert(parts[0].clone());
                }
                _ => {
                    self.words.insert(parts[0].clone());
                    if !self.phrases.contains(&parts) {
                        self.phrases.push(parts);
                    }
                }
            }
        }
        self.phrases.sort_by_key(|p| std::cmp::Reverse(p.len()));
    }

    /// The bundled list plus every verb and synonym the world declares.
    pub fn for_world(&self, world: &World) -> Self {
        let mut lex = self.clone();
        let mut forms: Vec<&str> = world.verb_forms().collect();
        forms.sort_unstable();
        lex.extend(forms);
        lex
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Base form of `word` if it is a known verb.
    pub fn base_form(&self, word: &str) -> Option<String> {
        let w = word.to_lowercase();
        if self.words.contains(&w) {
            return Some(w);
        }
        let candidates = [
            w.strip_suffix("ies").map(|s| format!("{s}y")),
            w.strip_suffix("es").map(str::to_string),
            w.strip_suffix('s').map(str::to_string),
        ];
        candidates.into_iter().flatten().find(|c| c.len() > 1 && self.words.contains(c))
    }

    pub fn is_verb(&self, word: &str) -> bool {
        self.base_form(word).is_some()
    }

    /// Length in words of the longest multi-word verb starting at `words[0]`.
    pub(crate) fn phrase_len(&self, words: &[String]) -> Option<usize> {
        let first = self.base_form(words.first()?)?;
        self.phrases
            .iter()
            .find(|p| p.len() <= words.len() && p[0] == first && p[1..].iter().zip(&words[1..]).all(|(a, b)| a == b))
            .map(Vec::len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inflections() {
        let lex = VerbLexicon::bundled();
        assert!(lex.len() >= 200);
        assert_eq!(lex.base_form("Discovers").as_deref(), Some("discover"));
        assert_eq!(lex.base_form("carries").as_deref(), Some("carry"));
        assert_eq!(lex.base_form("reveal").as_deref(), Some("reveal"));
        for not_verbs in ["hidden", "enchanted", "transformed", "power", "recipe", "passage", "abilities", "staff"] {
            assert!(!lex.is_verb(not_verbs), "{not_verbs}");
        }
    }

    #[test]
    fn world_verbs_are_added() {
        let world = crate::assets::housework();
        let lex = VerbLexicon::bundled().for_world(&world);
        assert!(lex.is_verb("irrigate"));
        assert_eq!(lex.phrase_len(&["switch".into(), "on".into(), "the".into()]), Some(2));
        assert_eq!(lex.phrase_len(&["switch".into(), "off".into()]), None);
    }
}
