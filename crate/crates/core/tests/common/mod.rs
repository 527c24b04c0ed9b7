#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;

use indexmap::IndexMap;
use imagiplay::llm::{ChatRequest, FixtureStore, FnBackend, LlmError, RecordingBackend};
use imagiplay::world::{Connection, Direction, GameObject, Room, StateVar};
use imagiplay::{ActionDef, Condition, Effect, Tier, World, WorldSpec};
use proptest::prelude::Rng;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub const SETTING: &str = "magical";
pub const TOPIC: &str = "save the princess";

pub const STORY_1: &str = "Whisperweaver discovers hidden passage. Uncover ancient chest in hidden passage. \
Open chest to reveal enchanted staff. Also find Crescent Mirror in chest. Wield enchanted staff for enhanced \
spellcasting. Use Crescent Mirror for scrying and divination. Harness the power of the enchanted staff and mirror \
to defeat evil forces and save princess.";

pub const STORY_2_TAIL: &str = "Discover recipe for elixir with Crescent Mirror. Brew elixir in the cauldron. \
Use enchanted staff to activate the elixir. Use transformed abilities from elixir to defeat the evil threat.";

pub const SIMPLIFIED_1: [&str; 7] = [
    "Discovers Whisperweaver",
    "Uncover Ancient Chest",
    "Reveal Enchanted Staff",
    "Find Crescent Mirror",
    "Wield Enchanted Staff",
    "Use Crescent Mirror",
    "Harness Enchanted Staff",
];

pub const TRANSLATION_1: [&str; 7] =
    ["Wear clothes", "Open nightstand", "Use broom", "Open dresser", "Use broom", "Open dresser", "Use broom"];

pub const SIMPLIFIED_2_TAIL: [&str; 4] = ["Discover Elixir", "Brew Cauldron", "Use Enchanted Staff", "Use Elixir"];

const MAPPING: &str = "clothes: Whisperweaver | a cloak woven from whispers that the hero wears
nightstand: Ancient Chest | both keep small things beside the bed
broom: Enchanted Staff | a long wooden pole in the hand
dresser: Crescent Mirror | a dresser usually carries a mirror
kettle: Cauldron | both heat water over a fire
mug: Elixir | what one drinks from a mug";

fn numbered(lines: &[&str]) -> String {
    lines.iter().enumerate().map(|(i, l)| format!("{}. {l}", i + 1)).collect::<Vec<_>>().join("\n")
}

/// Scripted stand-in for the language model that answers every prompt of
/// the magical pipeline with the bundled princess story.
pub fn scripted_responder(req: &ChatRequest) -> Result<String, LlmError> {
    let user = req.last_user_message();
    let system = req.system_prompt.as_str();
    let unexpected = || LlmError::InvalidRequest { message: format!("unscripted prompt: {system}") };
    if system.contains("household objects") {
        return Ok(MAPPING.to_string());
    }
    if system.starts_with("You write short") {
        return Ok(STORY_1.to_string());
    }
    if system.starts_with("You continue short") {
        return Ok(STORY_2_TAIL.to_string());
    }
    if system.starts_with("You reduce story sentences") {
        let mut lines: Vec<&str> = SIMPLIFIED_1[..6].to_vec();
        if user.contains("Brew elixir") {
            lines.extend(SIMPLIFIED_2_TAIL);
        } else {
            lines.push(SIMPLIFIED_1[6]);
        }
        return Ok(numbered(&lines));
    }
    if system.starts_with("You match actions") {
        let answer = [
            ("reveal Enchanted Staff", "use"),
            ("harness Enchanted Staff", "Use."),
            ("discover Elixir", "fill"),
            ("use Elixir", "drink"),
            ("cast wand", "sweep"),
        ]
        .iter()
        .find(|(phrase, _)| user.contains(&format!("does this: {phrase}.")))
        .map(|(_, a)| a.to_string());
        return answer.ok_or_else(unexpected);
    }
    Err(unexpected())
}

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets/fixtures/magical_bedroom.json")
}

/// Runs the magical pipeline against the scripted responder and returns
/// the exchanges as a fixture store.
pub fn record_fixture() -> FixtureStore {
    let recorder = RecordingBackend::new(FnBackend(scripted_responder));
    {
        let teller = imagiplay::Storyteller::llm(&recorder);
        imagiplay::run_pipeline(&imagiplay::assets::magical_bedroom(), SETTING, TOPIC, &teller, 3)
            .expect("scripted pipeline runs");
    }
    recorder.into_store()
}

pub fn load_fixture() -> FixtureStore {
    FixtureStore::load(&fixture_path()).expect("bundled fixture file")
}

pub fn case_fold(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").trim_end_matches('.').to_lowercase()
}

pub fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

pub fn rng(seed: u64) -> TestRng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    TestRng::from_seed(RngAlgorithm::ChaCha, &bytes)
}

// ---------------------------------------------------------------------------
// Random worlds

const VERBS: [&str; 12] =
    ["poke", "twist", "shake", "lift", "paint", "tap", "spin", "press", "turn on", "pick at", "polish", "hum at"];
const SYNONYMS: [&str; 10] = ["jab", "twirl", "rattle", "hoist", "daub", "knock", "whirl", "push", "buff", "prod"];
const NAMES: [&str; 10] = ["red box", "lamp", "Old \"Tin\" Can", "vase", "rope", "bell", "café sign", "drum", "kite", "mask"];

/// Rooms joined by a random spanning tree plus a few extra symmetric edges.
pub fn random_map(rng: &mut TestRng, rooms: usize) -> (Vec<Room>, Vec<Connection>) {
    let rooms_v: Vec<Room> = (0..rooms)
        .map(|i| Room { id: format!("r{i}"), display_name: format!("Room {i}"), description: String::new() })
        .collect();
    let mut used: HashSet<(usize, Direction)> = HashSet::new();
    let mut conns = Vec::new();
    let link = |a: usize, b: usize, d: Direction, used: &mut HashSet<(usize, Direction)>, conns: &mut Vec<Connection>| {
        used.insert((a, d));
        used.insert((b, d.opposite()));
        conns.push(Connection::new(format!("r{a}"), d, format!("r{b}")));
        conns.push(Connection::new(format!("r{b}"), d.opposite(), format!("r{a}")));
    };
    for b in 1..rooms {
        loop {
            let a = rng.random_range(0..b);
            let d = Direction::ALL[rng.random_range(0..4)];
            if !used.contains(&(a, d)) && !used.contains(&(b, d.opposite())) {
                link(a, b, d, &mut used, &mut conns);
                break;
            }
        }
    }
    for _ in 0..rng.random_range(0..=rooms) {
        let a = rng.random_range(0..rooms);
        let b = rng.random_range(0..rooms);
        let d = Direction::ALL[rng.random_range(0..4)];
        let linked = conns.iter().any(|c| c.from == format!("r{a}") && c.to == format!("r{b}"));
        if a != b && !linked && !used.contains(&(a, d)) && !used.contains(&(b, d.opposite())) {
            link(a, b, d, &mut used, &mut conns);
        }
    }
    (rooms_v, conns)
}

pub fn random_spec(rng: &mut TestRng) -> WorldSpec {
    let n_rooms = rng.random_range(1..=6);
    let (mut rooms, connections) = random_map(rng, n_rooms);
    for r in rooms.iter_mut() {
        if rng.random_bool(0.5) {
            r.description = format!("A plain room \"{}\".\nNothing else.", r.id);
        }
    }
    let n_objects = rng.random_range(1..=5);
    let mut objects: Vec<GameObject> = (0..n_objects)
        .map(|i| {
            let vars = (0..rng.random_range(0..=2))
                .map(|v| {
                    let legal: Vec<String> = if rng.random_bool(0.5) {
                        vec!["false".into(), "true".into()]
                    } else {
                        vec!["a".into(), "b".into(), "c".into()]
                    };
                    let initial = legal[rng.random_range(0..legal.len())].clone();
                    StateVar { name: format!("s{v}"), initial, legal }
                })
                .collect();
            GameObject {
                id: format!("o{i}"),
                display_name: format!("{} {i}", NAMES[rng.random_range(0..NAMES.len())]),
                aliases: if rng.random_bool(0.3) { vec![format!("thing{i}")] } else { vec![] },
                location: format!("r{}", rng.random_range(0..n_rooms)),
                portable: rng.random_bool(0.5),
                state_vars: vars,
            }
        })
        .collect();
    // Something the win action can depend on must exist.
    objects.sort_by(|a, b| a.id.cmp(&b.id));

    let mut synonyms: IndexMap<String, Vec<String>> = IndexMap::new();
    let mut syn_pool: Vec<&str> = SYNONYMS.to_vec();
    let mut actions: Vec<ActionDef> = Vec::new();
    for obj in &objects {
        let mut verbs: Vec<&str> = VERBS.to_vec();
        for _ in 0..rng.random_range(1..=3) {
            let verb = verbs.remove(rng.random_range(0..verbs.len()));
            let tier = if rng.random_bool(0.5) { Tier::StandAlone } else { Tier::Interactive };
            let mut preconditions = Vec::new();
            let mut effects = Vec::new();
            for _ in 0..rng.random_range(0..=2) {
                match rng.random_range(0..3) {
                    0 => preconditions.push(Condition::AgentInRoom { room: format!("r{}", rng.random_range(0..n_rooms)) }),
                    1 => {
                        if let Some(p) = objects.iter().filter(|o| o.portable).nth(rng.random_range(0..objects.len())) {
                            preconditions.push(Condition::AgentHolds { object: p.id.clone() });
                        }
                    }
                    _ => {
                        let o = &objects[rng.random_range(0..objects.len())];
                        if let Some(v) = o.state_vars.first() {
                            let value = v.legal[rng.random_range(0..v.legal.len())].clone();
                            preconditions.push(Condition::ObjectState { object: o.id.clone(), var: v.name.clone(), value });
                        }
                    }
                }
            }
            for v in &obj.state_vars {
                if rng.random_bool(0.7) {
                    effects.push(Effect::SetState {
                        object: obj.id.clone(),
                        var: v.name.clone(),
                        value: v.legal[rng.random_range(0..v.legal.len())].clone(),
                    });
                }
            }
            if obj.portable && rng.random_bool(0.2) {
                effects.push(Effect::Take { object: obj.id.clone() });
            }
            let id = if rng.random_bool(0.1) { format!("custom-{}-{}", obj.id, actions.len()) } else { ActionDef::derive_id(verb, &obj.id) };
            actions.push(ActionDef {
                id,
                verb: verb.to_string(),
                object: obj.id.clone(),
                tier,
                score: tier.score(),
                preconditions,
                effects,
            });
            if !synonyms.contains_key(verb) && !syn_pool.is_empty() && rng.random_bool(0.5) {
                let syn = syn_pool.remove(rng.random_range(0..syn_pool.len()));
                synonyms.insert(verb.to_string(), vec![syn.to_string()]);
            }
        }
    }
    let win = rng.random_range(0..actions.len());
    actions[win].tier = Tier::Win;
    actions[win].score = 5;
    let win_action = actions[win].id.clone();
    WorldSpec {
        name: format!("random {}", rng.random_range(0..1000)),
        rooms,
        connections,
        objects,
        actions,
        verb_synonyms: synonyms,
        start_room: format!("r{}", rng.random_range(0..n_rooms)),
        win_action,
    }
}

pub fn random_world(rng: &mut TestRng) -> World {
    let spec = random_spec(rng);
    World::new(spec.clone()).unwrap_or_else(|v| panic!("generator made an invalid world: {v:?}\n{spec:#?}"))
}

// ---------------------------------------------------------------------------
// Path oracle

/// Every simple path from `from` to `to`, as direction lists.
pub fn all_simple_paths(world: &World, from: &str, to: &str) -> Vec<Vec<Direction>> {
    fn walk(
        world: &World,
        here: &str,
        to: &str,
        seen: &mut BTreeSet<String>,
        path: &mut Vec<Direction>,
        out: &mut Vec<Vec<Direction>>,
    ) {
        if here == to {
            out.push(path.clone());
            return;
        }
        for c in world.connections().iter().filter(|c| c.from == here) {
            if seen.insert(c.to.clone()) {
                path.push(c.direction);
                walk(world, &c.to, to, seen, path, out);
                path.pop();
                seen.remove(&c.to);
            }
        }
    }
    let mut out = Vec::new();
    let mut seen = BTreeSet::from([from.to_string()]);
    walk(world, from, to, &mut seen, &mut Vec::new(), &mut out);
    out
}

/// Shortest path by enumeration, ties broken by comparing direction names.
pub fn oracle_path(world: &World, from: &str, to: &str) -> Option<Vec<Direction>> {
    all_simple_paths(world, from, to)
        .into_iter()
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| names(a).cmp(&names(b))))
}

fn names(p: &[Direction]) -> Vec<&'static str> {
    p.iter().map(|d| d.as_str()).collect()
}
