use std::fmt::Write;

use super::lexer::is_word_char;
use crate::world::{ActionDef, Condition, Effect, WorldSpec};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// A value that may be written bare when it lexes back as a single word.
fn value(s: &str) -> String {
    if !s.is_empty() && s.chars().all(is_word_char) {
        s.to_string()
    } else {
        quote(s)
    }
}

/// A verb phrase: bare words when every word is bare-safe, quoted otherwise.
fn verb(s: &str) -> String {
    let bare = !s.is_empty() && s.split(' ').all(|w| !w.is_empty() && w.chars().all(is_word_char));
    if bare {
        s.to_string()
    } else {
        quote(s)
    }
}

fn condition(c: &Condition) -> String {
    match c {
        Condition::AgentInRoom { room } => format!("in {room}"),
        Condition::AgentHolds { object } => format!("holds {object}"),
        Condition::AgentColocatedWith { object } => format!("near {object}"),
        Condition::ObjectState { object, var, value: v } => format!("state {object} {var} = {}", value(v)),
    }
}

fn effect(e: &Effect) -> String {
    match e {
        Effect::SetState { object, var, value: v } => format!("set {object} {var} = {}", value(v)),
        Effect::Take { object } => format!("take {object}"),
        Effect::Drop { object } => format!("drop {object}"),
        Effect::EndGame => "end_game".into(),
    }
}

fn action_block(out: &mut String, a: &ActionDef) {
    let _ = writeln!(out, "action {}", quote(&a.command_text()));
    if a.id != ActionDef::derive_id(&a.verb, &a.object) {
        let _ = writeln!(out, "  id {}", a.id);
    }
    let _ = writeln!(out, "  tier {}", a.tier.as_str());
    let _ = writeln!(out, "  score {}", a.score);
    for c in &a.preconditions {
        let _ = writeln!(out, "  require {}", condition(c));
    }
    for e in &a.effects {
        let _ = writeln!(out, "  effect {}", effect(e));
    }
}

/// Renders a world as `.world` text. Declaration order is preserved, so
/// parsing the output yields a structurally equal spec.
pub fn serialize_worldspec(spec: &WorldSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "world {}", quote(&spec.name));
    let _ = writeln!(out, "start {}", spec.start_room);
    let _ = writeln!(out, "win {}", spec.win_action);

    if !spec.verb_synonyms.is_empty() {
        out.push('\n');
        for (canonical, synonyms) in &spec.verb_synonyms {
            let list: Vec<String> = synonyms.iter().map(|s| verb(s)).collect();
            let _ = writeln!(out, "synonyms {} = {}", verb(canonical), list.join(", "));
        }
    }

    for room in &spec.rooms {
        out.push('\n');
        let _ = writeln!(out, "room {} {}", room.id, quote(&room.display_name));
        if !room.description.is_empty() {
            let _ = writeln!(out, "  description {}", quote(&room.description));
        }
    }

    if !spec.connections.is_empty() {
        out.push('\n');
        let conns = &spec.connections;
        let mut i = 0;
        while i < conns.len() {
            let c = &conns[i];
            if conns.get(i + 1).is_some_and(|next| next.is_reverse_of(c)) {
                let _ = writeln!(out, "connect {} {} {}", c.from, c.direction, c.to);
                i += 2;
            } else {
                let _ = writeln!(out, "exit {} {} {}", c.from, c.direction, c.to);
                i += 1;
            }
        }
    }

    for obj in &spec.objects {
        out.push('\n');
        let _ = writeln!(out, "object {} {}", obj.id, quote(&obj.display_name));
        for alias in &obj.aliases {
            let _ = writeln!(out, "  alias {}", quote(alias));
        }
        let _ = writeln!(out, "  in {}", obj.location);
        if obj.portable {
            out.push_str("  portable\n");
        }
        for var in &obj.state_vars {
            let legal: Vec<String> = var.legal.iter().map(|v| value(v)).collect();
            let _ = writeln!(out, "  state {} = {} in [{}]", var.name, value(&var.initial), legal.join(", "));
        }
    }

    for action in &spec.actions {
        out.push('\n');
        action_block(&mut out, action);
    }
    out
}
