//! Immutable world vocabulary: rooms, objects, actions and scores.
//!
//! A [`WorldSpec`] is plain data as authored. [`World`] wraps a spec that
//! passed [`validate_world`] and adds the lookup indexes the engine and the
//! planner need.

mod validate;

pub use validate::{validate_world, Subject, Violation, ViolationCode};

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

/// Verbs the engine handles itself. Worlds may not declare actions or
/// synonyms with these names.
pub const BUILTIN_VERBS: [&str; 3] = ["go", "take", "drop"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    East,
    North,
    South,
    West,
}

impl Direction {
    /// All directions in lexicographic order of their names.
    pub const ALL: [Direction; 4] = [Direction::East, Direction::North, Direction::South, Direction::West];

    pub fn opposite(self) -> Direction {
        match self {
            Direction::North => Direction::South,
            Direction::South => Direction::North,
            Direction::East => Direction::West,
            Direction::West => Direction::East,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::North => "north",
            Direction::South => "south",
            Direction::East => "east",
            Direction::West => "west",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "north" | "n" => Ok(Direction::North),
            "south" | "s" => Ok(Direction::South),
            "east" | "e" => Ok(Direction::East),
            "west" | "w" => Ok(Direction::West),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Room {
    pub id: String,
    pub display_name: String,
    pub description: String,
}

/// A directed edge between two rooms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Connection {
    pub from: String,
    pub direction: Direction,
    pub to: String,
}

impl Connection {
    pub fn new(from: impl Into<String>, direction: Direction, to: impl Into<String>) -> Self {
        Connection { from: from.into(), direction, to: to.into() }
    }

    pub fn is_reverse_of(&self, other: &Connection) -> bool {
        self.from == other.to && self.to == other.from && self.direction == other.direction.opposite()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateVar {
    pub name: String,
    pub initial: String,
    pub legal: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameObject {
    pub id: String,
    pub display_name: String,
    /// Extra names the command parser accepts for this object.
    #[serde(default)]
    pub aliases: Vec<String>,
    pub location: String,
    pub portable: bool,
    #[serde(default)]
    pub state_vars: Vec<StateVar>,
}

impl GameObject {
    pub fn state_var(&self, name: &str) -> Option<&StateVar> {
        self.state_vars.iter().find(|v| v.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    StandAlone,
    Interactive,
    Win,
}

impl Tier {
    /// The only score a validated action of this tier may carry.
    pub fn score(self) -> u32 {
        match self {
            Tier::StandAlone => 2,
            Tier::Interactive => 3,
            Tier::Win => 5,
        }
    }

    pub fn from_score(score: u32) -> Option<Tier> {
        match score {
            2 => Some(Tier::StandAlone),
            3 => Some(Tier::Interactive),
            5 => Some(Tier::Win),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Tier::StandAlone => "stand_alone",
            Tier::Interactive => "interactive",
            Tier::Win => "win",
        }
    }
}

impl FromStr for Tier {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stand_alone" => Ok(Tier::StandAlone),
            "interactive" => Ok(Tier::Interactive),
            "win" => Ok(Tier::Win),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Condition {
    AgentInRoom { room: String },
    AgentHolds { object: String },
    ObjectState { object: String, var: String, value: String },
    AgentColocatedWith { object: String },
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::AgentInRoom { room } => write!(f, "agent in {room}"),
            Condition::AgentHolds { object } => write!(f, "agent holds {object}"),
            Condition::ObjectState { object, var, value } => write!(f, "{object} {var} = {value}"),
            Condition::AgentColocatedWith { object } => write!(f, "agent near {object}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Effect {
    SetState { object: String, var: String, value: String },
    Take { object: String },
    Drop { object: String },
    EndGame,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionDef {
    pub id: String,
    pub verb: String,
    pub object: String,
    pub tier: Tier,
    pub score: u32,
    #[serde(default)]
    pub preconditions: Vec<Condition>,
    #[serde(default)]
    pub effects: Vec<Effect>,
}

impl ActionDef {
    /// Default id for a verb/object pair: words joined by underscores.
    pub fn derive_id(verb: &str, object: &str) -> String {
        verb.split_whitespace().chain(std::iter::once(object)).collect::<Vec<_>>().join("_")
    }

    /// Command text that triggers this action, e.g. `"turn on light"`.
    pub fn command_text(&self) -> String {
        format!("{} {}", self.verb, self.object)
    }

    pub fn ends_game(&self) -> bool {
        self.tier == Tier::Win || self.effects.iter().any(|e| matches!(e, Effect::EndGame))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldSpec {
    pub name: String,
    pub rooms: Vec<Room>,
    pub connections: Vec<Connection>,
    pub objects: Vec<GameObject>,
    pub actions: Vec<ActionDef>,
    /// Canonical verb to its synonyms, in declaration order.
    pub verb_synonyms: IndexMap<String, Vec<String>>,
    pub start_room: String,
    pub win_action: String,
}

impl WorldSpec {
    pub fn room(&self, id: &str) -> Option<&Room> {
        self.rooms.iter().find(|r| r.id == id)
    }

    pub fn object(&self, id: &str) -> Option<&GameObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn action(&self, id: &str) -> Option<&ActionDef> {
        self.actions.iter().find(|a| a.id == id)
    }
}

/// A validated world with lookup indexes. Immutable and `Sync`.
#[derive(Debug, Clone)]
pub struct World {
    spec: WorldSpec,
    rooms: HashMap<String, usize>,
    objects: HashMap<String, usize>,
    actions: HashMap<String, usize>,
    by_verb_object: HashMap<(String, String), usize>,
    canonical_verbs: HashMap<String, String>,
}

impl World {
    pub fn new(spec: WorldSpec) -> Result<World, Vec<Violation>> {
        let violations = validate_world(&spec);
        if !violations.is_empty() {
            return Err(violations);
        }
        let index = |ids: Vec<&String>| ids.into_iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        let rooms = index(spec.rooms.iter().map(|r| &r.id).collect());
        let objects = index(spec.objects.iter().map(|o| &o.id).collect());
        let actions = index(spec.actions.iter().map(|a| &a.id).collect());
        let by_verb_object = spec
            .actions
            .iter()
            .enumerate()
            .map(|(i, a)| ((a.verb.clone(), a.object.clone()), i))
            .collect();
        let mut canonical_verbs = HashMap::new();
        for action in &spec.actions {
            canonical_verbs.insert(action.verb.clone(), action.verb.clone());
        }
        for (canonical, synonyms) in &spec.verb_synonyms {
            canonical_verbs.insert(canonical.clone(), canonical.clone());
            for s in synonyms {
                canonical_verbs.insert(s.clone(), canonical.clone());
            }
        }
        Ok(World { spec, rooms, objects, actions, by_verb_object, canonical_verbs })
    }

    pub fn spec(&self) -> &WorldSpec {
        &self.spec
    }

    pub fn into_spec(self) -> WorldSpec {
        self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn start_room(&self) -> &str {
        &self.spec.start_room
    }

    pub fn rooms(&self) -> &[Room] {
        &self.spec.rooms
    }

    pub fn objects(&self) -> &[GameObject] {
        &self.spec.objects
    }

    pub fn actions(&self) -> &[ActionDef] {
        &self.spec.actions
    }

    pub fn connections(&self) -> &[Connection] {
        &self.spec.connections
    }

    pub fn room(&self, id: &str) -> Option<&Room> {
        self.rooms.get(id).map(|&i| &self.spec.rooms[i])
    }

    pub fn object(&self, id: &str) -> Option<&GameObject> {
        self.objects.get(id).map(|&i| &self.spec.objects[i])
    }

    pub fn action(&self, id: &str) -> Option<&ActionDef> {
        self.actions.get(id).map(|&i| &self.spec.actions[i])
    }

    pub fn win_action(&self) -> &ActionDef {
        self.action(&self.spec.win_action).expect("validated world has a win action")
    }

    pub fn action_for(&self, verb: &str, object: &str) -> Option<&ActionDef> {
        self.by_verb_object
            .get(&(verb.to_string(), object.to_string()))
            .map(|&i| &self.spec.actions[i])
    }

    /// Actions declared on one object, in declaration order.
    pub fn actions_on<'a>(&'a self, object: &'a str) -> impl Iterator<Item = &'a ActionDef> + 'a {
        self.spec.actions.iter().filter(move |a| a.object == object)
    }

    /// Maps a verb or synonym to its canonical verb.
    pub fn canonical_verb(&self, verb: &str) -> Option<&str> {
        self.canonical_verbs.get(verb).map(String::as_str)
    }

    /// Every verb form the parser accepts (canonical verbs and synonyms).
    pub fn verb_forms(&self) -> impl Iterator<Item = &str> {
        self.canonical_verbs.keys().map(String::as_str)
    }

    pub fn exit(&self, from: &str, direction: Direction) -> Option<&str> {
        self.spec
            .connections
            .iter()
            .find(|c| c.from == from && c.direction == direction)
            .map(|c| c.to.as_str())
    }

    /// Outgoing edges of a room, sorted by direction name.
    pub fn exits(&self, from: &str) -> Vec<(Direction, &str)> {
        let mut out: Vec<_> = self
            .spec
            .connections
            .iter()
            .filter(|c| c.from == from)
            .map(|c| (c.direction, c.to.as_str()))
            .collect();
        out.sort();
        out
    }
}

impl PartialEq for World {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}
