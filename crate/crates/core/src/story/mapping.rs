use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::names::{words, NameMatcher};
use super::{StoryBackend, StoryError, Storyteller};
use crate::llm::{ChatRequest, GENERATION_TEMPERATURE};
use crate::world::{GameObject, World};

const SETTING_TABLE: &str = include_str!("../../assets/settings/objects.tsv");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingEntry {
    pub real: String,
    pub imaginary: String,
    pub rationale: String,
}

/// Injective renaming of world objects for one story setting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectMapping {
    pub setting: String,
    pub entries: Vec<MappingEntry>,
}

impl ObjectMapping {
    pub fn new(setting: impl Into<String>, entries: Vec<MappingEntry>) -> Result<Self, StoryError> {
        let mut reals = HashSet::new();
        let mut names = HashSet::new();
        for e in &entries {
            if !reals.insert(e.real.as_str()) {
                return Err(StoryError::InvalidMapping(format!("object `{}` is mapped twice", e.real)));
            }
            if words(&e.imaginary).is_empty() {
                return Err(StoryError::InvalidMapping(format!("object `{}` has an empty imaginary name", e.real)));
            }
            if !names.insert(e.imaginary.to_lowercase()) {
                return Err(StoryError::InvalidMapping(format!("imaginary name `{}` is used twice", e.imaginary)));
            }
        }
        Ok(ObjectMapping { setting: setting.into(), entries })
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.imaginary.as_str()).collect()
    }

    pub fn matcher(&self) -> NameMatcher {
        NameMatcher::new(&self.names())
    }

    pub fn imaginary_for(&self, real: &str) -> Option<&str> {
        self.entries.iter().find(|e| e.real == real).map(|e| e.imaginary.as_str())
    }

    /// Case-insensitive reverse lookup.
    pub fn real_for(&self, imaginary: &str) -> Option<&str> {
        let wanted = imaginary.to_lowercase();
        self.entries.iter().find(|e| e.imaginary.to_lowercase() == wanted).map(|e| e.real.as_str())
    }

    pub fn check_world(&self, world: &World) -> Result<(), StoryError> {
        match self.entries.iter().find(|e| world.object(&e.real).is_none()) {
            Some(e) => Err(StoryError::InvalidMapping(format!("unknown object `{}`", e.real))),
            None => Ok(()),
        }
    }
}

/// Imaginary counterpart of `object` from the bundled table, matched on
/// the object id or display name.
pub fn setting_lookup(setting: &str, object: &GameObject) -> Option<&'static str> {
    let setting = setting.trim().to_lowercase();
    let display = object.display_name.to_lowercase();
    SETTING_TABLE
        .lines()
        .filter(|l| !l.starts_with('#'))
        .filter_map(|l| {
            let mut cols = l.split('\t');
            Some((cols.next()?, cols.next()?, cols.next()?))
        })
        .find(|(s, real, _)| *s == setting && (*real == object.id || *real == display))
        .map(|(_, _, imaginary)| imaginary)
}

fn table_entry(setting: &str, object: &GameObject, rationale: &str) -> MappingEntry {
    let imaginary = match setting_lookup(setting, object) {
        Some(name) => name.to_string(),
        None => format!("{} {}", setting.trim(), object.display_name),
    };
    MappingEntry { real: object.id.clone(), imaginary, rationale: rationale.to_string() }
}

/// Renames later duplicates (case-insensitive) to `name-2`, `name-3`, ...
pub(crate) fn make_injective(entries: &mut [MappingEntry]) {
    let mut used: HashSet<String> = HashSet::new();
    for e in entries.iter_mut() {
        if used.insert(e.imaginary.to_lowercase()) {
            continue;
        }
        let mut n = 2;
        let renamed = loop {
            let candidate = format!("{}-{n}", e.imaginary);
            if !used.contains(&candidate.to_lowercase()) {
                break candidate;
            }
            n += 1;
        };
        used.insert(renamed.to_lowercase());
        e.imaginary = renamed;
    }
}

fn duplicates(entries: &[MappingEntry]) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut dups = Vec::new();
    for e in entries {
        let key = e.imaginary.to_lowercase();
        if !seen.insert(key.clone()) && !dups.iter().any(|d: &String| d.to_lowercase() == key) {
            dups.push(e.imaginary.clone());
        }
    }
    dups
}

/// Reads `object: Imaginary Name | reason` lines. Lines naming unknown or
/// already-mapped objects are ignored.
pub(crate) fn parse_mapping_response(text: &str, world: &World) -> Vec<MappingEntry> {
    let mut out: Vec<MappingEntry> = Vec::new();
    for line in text.lines() {
        let line = line.trim().trim_start_matches(['-', '*']).trim_start();
        let line = line.trim_start_matches(|c: char| c.is_ascii_digit()).trim_start_matches(['.', ')']).trim();
        let Some((left, right)) = line.split_once(':') else { continue };
        let key = left.trim().trim_matches(['"', '\'', '`']).to_lowercase();
        let Some(object) = world
            .objects()
            .iter()
            .find(|o| o.id == key || o.display_name.to_lowercase() == key || o.id.replace('_', " ") == key)
        else {
            continue;
        };
        if out.iter().any(|e| e.real == object.id) {
            continue;
        }
        let (name, rationale) = right.split_once('|').unwrap_or((right, ""));
        let name = name.trim().trim_matches(['"', '\'', '`', '*']).trim_end_matches('.').trim();
        if words(name).is_empty() {
            continue;
        }
        out.push(MappingEntry { real: object.id.clone(), imaginary: name.to_string(), rationale: rationale.trim().to_string() });
    }
    out
}

fn object_list(world: &World) -> String {
    world.objects().iter().map(|o| format!("- {}: {}", o.id, o.display_name)).collect::<Vec<_>>().join("\n")
}

impl Storyteller<'_> {
    /// One imaginary object per world object, injective.
    pub fn map_objects(&self, world: &World, setting: &str) -> Result<ObjectMapping, StoryError> {
        let backend = match self.backend {
            StoryBackend::Deterministic => {
                let mut entries: Vec<MappingEntry> =
                    world.objects().iter().map(|o| table_entry(setting, o, "bundled setting table")).collect();
                make_injective(&mut entries);
                return ObjectMapping::new(setting, entries);
            }
            StoryBackend::Llm(b) => b,
        };
        if world.objects().is_empty() {
            return ObjectMapping::new(setting, Vec::new());
        }
        let (system, user) =
            self.prompts.map.render(&[("setting", setting), ("objects", &object_list(world))]);
        let request = ChatRequest::new(system, user, GENERATION_TEMPERATURE);
        let first = self.ask(backend, "map_objects", request.clone())?;
        let mut parsed = parse_mapping_response(&first, world);
        let dups = duplicates(&parsed);
        if !dups.is_empty() {
            let retry = request.follow_up(
                first,
                format!(
                    "These names are used for more than one object: {}. Give every object a different name, in the same format.",
                    dups.join(", ")
                ),
            );
            let second = self.ask(backend, "map_objects", retry)?;
            parsed = parse_mapping_response(&second, world);
        }
        let mut entries: Vec<MappingEntry> = world
            .objects()
            .iter()
            .map(|o| match parsed.iter().find(|e| e.real == o.id) {
                Some(e) => e.clone(),
                None => table_entry(setting, o, "not named by the model; bundled setting table"),
            })
            .collect();
        make_injective(&mut entries);
        ObjectMapping::new(setting, entries)
    }
}
