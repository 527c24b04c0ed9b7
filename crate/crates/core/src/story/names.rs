use std::collections::HashMap;

/// A word of text, lowercased for matching but keeping its surface form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Word {
    pub lower: String,
    pub surface: String,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\'' || c == '-'
}

pub(crate) fn words(text: &str) -> Vec<Word> {
    text.split(|c: char| !is_word_char(c))
        .map(|w| w.trim_matches(|c| c == '\'' || c == '-'))
        .filter(|w| !w.is_empty())
        .map(|w| {
            let lower = w.to_lowercase();
            let lower = lower.strip_suffix("'s").map(str::to_string).unwrap_or(lower);
            Word { lower, surface: w.to_string() }
        })
        .collect()
}

/// One occurrence of an imaginary name, as a word range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mention {
    /// Index into the name list the matcher was built from.
    pub name: usize,
    pub start: usize,
    pub end: usize,
}

/// Finds imaginary names in text, case-insensitively, preferring the
/// longest match. A multi-word name also matches by its last word
/// ("chest" for "Ancient Chest") unless another name claims that word.
#[derive(Debug, Clone)]
pub struct NameMatcher {
    /// (word sequence, name index), longest first.
    forms: Vec<(Vec<String>, usize)>,
}

impl NameMatcher {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        let full: Vec<Vec<String>> = names.iter().map(|n| words(n.as_ref()).into_iter().map(|w| w.lower).collect()).collect();
        let mut claims: HashMap<&str, usize> = HashMap::new();
        for f in &full {
            if let Some(last) = f.last() {
                *claims.entry(last.as_str()).or_default() += 1;
            }
        }
        let mut forms = Vec::new();
        for (i, f) in full.iter().enumerate() {
            if f.is_empty() {
                continue;
            }
            forms.push((f.clone(), i));
            if f.len() >= 2 {
                let head = &f[f.len() - 1];
                let taken_as_name = full.iter().any(|g| g.len() == 1 && &g[0] == head);
                if claims[head.as_str()] == 1 && !taken_as_name {
                    forms.push((vec![head.clone()], i));
                }
            }
        }
        forms.sort_by_key(|f| std::cmp::Reverse(f.0.len()));
        NameMatcher { forms }
    }

    pub fn find(&self, text: &str) -> Vec<Mention> {
        self.find_in(&words(text))
    }

    pub(crate) fn find_in(&self, ws: &[Word]) -> Vec<Mention> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < ws.len() {
            let hit = self.forms.iter().find(|(form, _)| {
                form.len() <= ws.len() - i && form.iter().zip(&ws[i..]).all(|(f, w)| *f == w.lower)
            });
            match hit {
                Some((form, name)) => {
                    out.push(Mention { name: *name, start: i, end: i + form.len() });
                    i += form.len();
                }
                None => i += 1,
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn longest_match_and_head_nouns() {
        let m = NameMatcher::new(&["Ancient Chest", "Enchanted Staff", "Crescent Mirror", "Whisperweaver"]);
        let found = m.find("Harness the power of the enchanted staff and mirror, then open the chest.");
        assert_eq!(found.iter().map(|x| x.name).collect::<Vec<_>>(), vec![1, 2, 0]);
        assert_eq!((found[0].start, found[0].end), (5, 7));
        assert_eq!(m.find("Whisperweaver's plan")[0].name, 3);
        assert!(m.find("staffs").is_empty());
    }

    #[test]
    fn shared_head_words_do_not_match_alone() {
        let m = NameMatcher::new(&["Fire Stone", "Ice Stone", "Stone"]);
        let found = m.find("The stone and the ice stone.");
        assert_eq!(found.iter().map(|x| x.name).collect::<Vec<_>>(), vec![2, 1]);
        let m = NameMatcher::new(&["Fire Stone", "Ice Stone"]);
        assert!(m.find("a stone").is_empty());
    }
}
