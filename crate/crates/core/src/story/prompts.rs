use std::fs;
use std::io;
use std::path::Path;

pub const TRAINING_SAMPLES: [&str; 3] = [
    include_str!("../../assets/samples/dragon.txt"),
    include_str!("../../assets/samples/princess.txt"),
    include_str!("../../assets/samples/key.txt"),
];

/// A system prompt and a user prompt with `{name}` placeholders.
///
/// The file form is a `[system]` line followed by the system text and a
/// `[user]` line followed by the user text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub system: String,
    pub user: String,
}

impl PromptTemplate {
    pub fn parse(text: &str) -> Result<Self, String> {
        let text = text.strip_prefix('\u{feff}').unwrap_or(text);
        let mut sections: [Option<Vec<&str>>; 2] = [None, None];
        let mut current = None;
        for line in text.lines() {
            let header = match line.trim() {
                "[system]" => Some(0),
                "[user]" => Some(1),
                _ => None,
            };
            match (header, current) {
                (Some(i), _) => {
                    if sections[i].is_some() {
                        return Err(format!("more than one {} section", line.trim()));
                    }
                    sections[i] = Some(Vec::new());
                    current = Some(i);
                }
                (None, Some(i)) => sections[i].get_or_insert_with(Vec::new).push(line),
                (None, None) if line.trim().is_empty() => {}
                (None, None) => return Err("text before the first section".into()),
            }
        }
        let [system, user] = sections;
        let join = |v: Option<Vec<&str>>| v.map(|l| l.join("\n").trim().to_string());
        Ok(PromptTemplate {
            system: join(system).unwrap_or_default(),
            user: join(user).ok_or("missing [user] section")?,
        })
    }

    /// Fills placeholders. Unknown placeholders are left as written.
    pub fn render(&self, vars: &[(&str, &str)]) -> (String, String) {
        let fill = |text: &str| {
            let mut out = String::with_capacity(text.len());
            let mut rest = text;
            while let Some(open) = rest.find('{') {
                out.push_str(&rest[..open]);
                let tail = &rest[open..];
                let value = tail.find('}').and_then(|close| {
                    let name = &tail[1..close];
                    vars.iter().find(|(n, _)| *n == name).map(|(_, v)| (*v, close))
                });
                match value {
                    Some((v, close)) => {
                        out.push_str(v);
                        rest = &tail[close + 1..];
                    }
                    None => {
                        out.push('{');
                        rest = &tail[1..];
                    }
                }
            }
            out.push_str(rest);
            out
        };
        (fill(&self.system), fill(&self.user))
    }
}

/// The five prompts used by the pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptSet {
    pub map: PromptTemplate,
    pub generate: PromptTemplate,
    pub continuation: PromptTemplate,
    pub simplify: PromptTemplate,
    pub translate: PromptTemplate,
}

const BUNDLED: [(&str, &str); 5] = [
    ("map_objects.txt", include_str!("../../assets/prompts/map_objects.txt")),
    ("generate_story.txt", include_str!("../../assets/prompts/generate_story.txt")),
    ("continue_story.txt", include_str!("../../assets/prompts/continue_story.txt")),
    ("simplify_story.txt", include_str!("../../assets/prompts/simplify_story.txt")),
    ("translate_action.txt", include_str!("../../assets/prompts/translate_action.txt")),
];

impl PromptSet {
    pub const FILE_NAMES: [&'static str; 5] = [BUNDLED[0].0, BUNDLED[1].0, BUNDLED[2].0, BUNDLED[3].0, BUNDLED[4].0];

    pub fn bundled() -> Self {
        let texts = BUNDLED.map(|(_, text)| text.to_string());
        Self::from_texts(texts).expect("bundled prompts parse")
    }

    /// Bundled prompts, with any file of the same name in `dir` taking over.
    pub fn from_dir(dir: &Path) -> io::Result<Self> {
        let mut texts = BUNDLED.map(|(_, text)| text.to_string());
        for (i, (name, _)) in BUNDLED.iter().enumerate() {
            let path = dir.join(name);
            if path.is_file() {
                texts[i] = fs::read_to_string(&path)?;
            }
        }
        Self::from_texts(texts).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }

    fn from_texts(texts: [String; 5]) -> Result<Self, String> {
        let parse = |i: usize| PromptTemplate::parse(&texts[i]).map_err(|e| format!("{}: {e}", BUNDLED[i].0));
        Ok(PromptSet { map: parse(0)?, generate: parse(1)?, continuation: parse(2)?, simplify: parse(3)?, translate: parse(4)? })
    }
}
