use std::fmt;

use thiserror::Error;

use crate::world::{Direction, World};

const ARTICLES: [&str; 3] = ["the", "a", "an"];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CommandKind {
    Go(Direction),
    Take(String),
    Drop(String),
    /// A declared action; `verb` is canonical.
    Act { verb: String, object: String },
}

/// A resolved player command. Equality ignores the raw text, so two
/// synonym spellings of one command compare equal.
#[derive(Debug, Clone)]
pub struct Command {
    pub kind: CommandKind,
    pub raw_text: String,
}

impl PartialEq for Command {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Command {}

impl Command {
    fn with_canonical_text(kind: CommandKind) -> Self {
        let mut cmd = Command { kind, raw_text: String::new() };
        cmd.raw_text = cmd.to_string();
        cmd
    }

    pub fn go(direction: Direction) -> Self {
        Command::with_canonical_text(CommandKind::Go(direction))
    }

    pub fn take(object: impl Into<String>) -> Self {
        Command::with_canonical_text(CommandKind::Take(object.into()))
    }

    pub fn drop(object: impl Into<String>) -> Self {
        Command::with_canonical_text(CommandKind::Drop(object.into()))
    }

    pub fn act(verb: impl Into<String>, object: impl Into<String>) -> Self {
        Command::with_canonical_text(CommandKind::Act { verb: verb.into(), object: object.into() })
    }

    pub fn is_movement(&self) -> bool {
        matches!(self.kind, CommandKind::Go(_))
    }
}

/// Canonical text, e.g. `go north`, `take kettle`, `turn on light`.
impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            CommandKind::Go(d) => write!(f, "go {d}"),
            CommandKind::Take(o) => write!(f, "take {o}"),
            CommandKind::Drop(o) => write!(f, "drop {o}"),
            CommandKind::Act { verb, object } => write!(f, "{verb} {object}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CommandError {
    #[error("empty command")]
    Empty,
    #[error("unknown verb `{0}`")]
    UnknownVerb(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("`{phrase}` could mean any of: {}", candidates.join(", "))]
    AmbiguousObject { phrase: String, candidates: Vec<String> },
    #[error("`{0}` is not a direction")]
    UnknownDirection(String),
}

fn normalize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| matches!(c, '.' | '!' | '?' | ',' | ';' | ':')).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

fn strip_articles(words: &[String]) -> Vec<&str> {
    words.iter().map(String::as_str).filter(|w| !ARTICLES.contains(w)).collect()
}

fn resolve_object(world: &World, words: &[String]) -> Result<String, CommandError> {
    let wanted = strip_articles(words).join(" ");
    if wanted.is_empty() {
        return Err(CommandError::UnknownObject(String::new()));
    }
    let names_match = |name: &str| {
        let name_words = normalize(name);
        strip_articles(&name_words).join(" ") == wanted
    };
    let matches: Vec<&str> = world
        .objects()
        .iter()
        .filter(|o| {
            o.id == wanted
                || o.id.replace('_', " ") == wanted
                || names_match(&o.display_name)
                || o.aliases.iter().any(|a| names_match(a))
        })
        .map(|o| o.id.as_str())
        .collect();
    match matches.as_slice() {
        [] => Err(CommandError::UnknownObject(wanted)),
        [one] => Ok(one.to_string()),
        many => Err(CommandError::AmbiguousObject {
            phrase: wanted,
            candidates: many.iter().map(|s| s.to_string()).collect(),
        }),
    }
}

/// Parses `verb object` text against a world's vocabulary.
///
/// Multi-word verbs resolve by longest match, synonyms map to the
/// canonical verb, and objects match by id, display name or alias,
/// case-insensitively and ignoring articles. `go <direction>` (or a bare
/// direction) is a movement.
pub fn parse_command(text: &str, world: &World) -> Result<Command, CommandError> {
    let words = normalize(text);
    if words.is_empty() {
        return Err(CommandError::Empty);
    }
    let raw_text = text.trim().to_string();
    if words.len() == 1 {
        if let Ok(d) = words[0].parse::<Direction>() {
            return Ok(Command { kind: CommandKind::Go(d), raw_text });
        }
    }
    let max_words = world.verb_forms().map(|v| v.split(' ').count()).max().unwrap_or(1).max(1);
    let mut verb = None;
    for len in (1..=max_words.min(words.len())).rev() {
        let candidate = words[..len].join(" ");
        if world.canonical_verb(&candidate).is_some() || crate::world::BUILTIN_VERBS.contains(&candidate.as_str()) {
            verb = Some((candidate, len));
            break;
        }
    }
    let Some((verb, len)) = verb else {
        return Err(CommandError::UnknownVerb(words[0].clone()));
    };
    let rest = &words[len..];
    let kind = match verb.as_str() {
        "go" => {
            let dir = strip_articles(rest).join(" ");
            let d = dir.parse::<Direction>().map_err(|()| CommandError::UnknownDirection(dir.clone()))?;
            CommandKind::Go(d)
        }
        "take" => CommandKind::Take(resolve_object(world, rest)?),
        "drop" => CommandKind::Drop(resolve_object(world, rest)?),
        _ => {
            let canonical = world.canonical_verb(&verb).unwrap_or(&verb).to_string();
            CommandKind::Act { verb: canonical, object: resolve_object(world, rest)? }
        }
    };
    Ok(Command { kind, raw_text })
}
