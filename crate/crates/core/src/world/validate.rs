use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::{Condition, Effect, Tier, WorldSpec, BUILTIN_VERBS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    DuplicateId,
    InvalidId,
    UnknownRoom,
    UnknownObject,
    UnknownStateVar,
    IllegalStateValue,
    DuplicateStateVar,
    AsymmetricConnection,
    DuplicateExit,
    DuplicateAction,
    InvalidScore,
    ScoreTierMismatch,
    InvalidVerb,
    ReservedVerb,
    VerbIsSynonym,
    SynonymConflict,
    NotPortable,
    UnknownWinAction,
    WinActionMismatch,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::DuplicateId => "DUPLICATE_ID",
            ViolationCode::InvalidId => "INVALID_ID",
            ViolationCode::UnknownRoom => "UNKNOWN_ROOM",
            ViolationCode::UnknownObject => "UNKNOWN_OBJECT",
            ViolationCode::UnknownStateVar => "UNKNOWN_STATE_VAR",
            ViolationCode::IllegalStateValue => "ILLEGAL_STATE_VALUE",
            ViolationCode::DuplicateStateVar => "DUPLICATE_STATE_VAR",
            ViolationCode::AsymmetricConnection => "ASYMMETRIC_CONNECTION",
            ViolationCode::DuplicateExit => "DUPLICATE_EXIT",
            ViolationCode::DuplicateAction => "DUPLICATE_ACTION",
            ViolationCode::InvalidScore => "INVALID_SCORE",
            ViolationCode::ScoreTierMismatch => "SCORE_TIER_MISMATCH",
            ViolationCode::InvalidVerb => "INVALID_VERB",
            ViolationCode::ReservedVerb => "RESERVED_VERB",
            ViolationCode::VerbIsSynonym => "VERB_IS_SYNONYM",
            ViolationCode::SynonymConflict => "SYNONYM_CONFLICT",
            ViolationCode::NotPortable => "NOT_PORTABLE",
            ViolationCode::UnknownWinAction => "UNKNOWN_WIN_ACTION",
            ViolationCode::WinActionMismatch => "WIN_ACTION_MISMATCH",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The declaration a violation is about; the DSL layer maps it to a span.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum Subject {
    World,
    Start,
    Win,
    Room(usize),
    Connection(usize),
    Object(usize),
    Action(usize),
    Synonyms(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub subject: Subject,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

fn is_valid_id(id: &str) -> bool {
    !id.is_empty() && id.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
}

fn is_normalized_verb(verb: &str) -> bool {
    !verb.is_empty()
        && verb.split(' ').all(|w| {
            !w.is_empty() && w.chars().all(|c| c.is_lowercase() || c.is_ascii_digit() || c == '-' || c == '\'')
        })
}

struct Checker<'a> {
    spec: &'a WorldSpec,
    out: Vec<Violation>,
}

impl<'a> Checker<'a> {
    fn push(&mut self, code: ViolationCode, subject: Subject, message: String) {
        self.out.push(Violation { code, subject, message });
    }

    fn room_exists(&self, id: &str) -> bool {
        self.spec.rooms.iter().any(|r| r.id == id)
    }

    fn check_room_ref(&mut self, subject: Subject, id: &str, what: &str) {
        if !self.room_exists(id) {
            self.push(ViolationCode::UnknownRoom, subject, format!("{what} names unknown room `{id}`"));
        }
    }

    fn check_ids(&mut self) {
        let mut seen = HashSet::new();
        for (i, room) in self.spec.rooms.iter().enumerate() {
            if !is_valid_id(&room.id) {
                self.push(
                    ViolationCode::InvalidId,
                    Subject::Room(i),
                    format!("room id `{}` must be lowercase letters, digits and underscores", room.id),
                );
            }
            if !seen.insert(room.id.as_str()) {
                self.push(ViolationCode::DuplicateId, Subject::Room(i), format!("room `{}` declared twice", room.id));
            }
        }
        let mut seen = HashSet::new();
        for (i, obj) in self.spec.objects.iter().enumerate() {
            if !is_valid_id(&obj.id) {
                self.push(
                    ViolationCode::InvalidId,
                    Subject::Object(i),
                    format!("object id `{}` must be lowercase letters, digits and underscores", obj.id),
                );
            }
            if !seen.insert(obj.id.as_str()) {
                self.push(ViolationCode::DuplicateId, Subject::Object(i), format!("object `{}` declared twice", obj.id));
            }
        }
        let mut seen = HashSet::new();
        for (i, action) in self.spec.actions.iter().enumerate() {
            if action.id.is_empty()
                || !action.id.chars().all(|c| c.is_lowercase() || c.is_ascii_digit() || matches!(c, '_' | '-' | '\''))
            {
                self.push(ViolationCode::InvalidId, Subject::Action(i), format!("action id `{}` is not an identifier", action.id));
            }
            if !seen.insert(action.id.as_str()) {
                self.push(ViolationCode::DuplicateId, Subject::Action(i), format!("action `{}` declared twice", action.id));
            }
        }
    }

    fn check_connections(&mut self) {
        let spec = self.spec;
        let mut exits = HashSet::new();
        for (i, conn) in spec.connections.iter().enumerate() {
            self.check_room_ref(Subject::Connection(i), &conn.from, "connection");
            self.check_room_ref(Subject::Connection(i), &conn.to, "connection");
            if !exits.insert((conn.from.as_str(), conn.direction)) {
                self.push(
                    ViolationCode::DuplicateExit,
                    Subject::Connection(i),
                    format!("room `{}` has two exits {}", conn.from, conn.direction),
                );
            }
            if !spec.connections.iter().any(|c| c.is_reverse_of(conn)) {
                self.push(
                    ViolationCode::AsymmetricConnection,
                    Subject::Connection(i),
                    format!(
                        "connection {} {} {} has no reverse edge {} {} {}",
                        conn.from,
                        conn.direction,
                        conn.to,
                        conn.to,
                        conn.direction.opposite(),
                        conn.from
                    ),
                );
            }
        }
    }

    fn check_objects(&mut self) {
        let spec = self.spec;
        for (i, obj) in spec.objects.iter().enumerate() {
            self.check_room_ref(Subject::Object(i), &obj.location, &format!("object `{}`", obj.id));
            let mut names = HashSet::new();
            for var in &obj.state_vars {
                if !names.insert(var.name.as_str()) {
                    self.push(
                        ViolationCode::DuplicateStateVar,
                        Subject::Object(i),
                        format!("object `{}` declares state `{}` twice", obj.id, var.name),
                    );
                }
                if !var.legal.contains(&var.initial) {
                    self.push(
                        ViolationCode::IllegalStateValue,
                        Subject::Object(i),
                        format!("initial value `{}` of `{}.{}` is not a legal value", var.initial, obj.id, var.name),
                    );
                }
            }
        }
    }

    fn check_state_ref(&mut self, subject: Subject, object: &str, var: &str, value: &str) {
        let Some(obj) = self.spec.object(object) else {
            self.push(ViolationCode::UnknownObject, subject, format!("unknown object `{object}`"));
            return;
        };
        match obj.state_var(var) {
            None => self.push(ViolationCode::UnknownStateVar, subject, format!("object `{object}` has no state `{var}`")),
            Some(sv) if !sv.legal.iter().any(|v| v == value) => self.push(
                ViolationCode::IllegalStateValue,
                subject,
                format!("`{value}` is not a legal value of `{object}.{var}`"),
            ),
            Some(_) => {}
        }
    }

    fn check_portable_ref(&mut self, subject: Subject, object: &str, what: &str) {
        match self.spec.object(object) {
            None => self.push(ViolationCode::UnknownObject, subject, format!("unknown object `{object}`")),
            Some(obj) if !obj.portable => self.push(
                ViolationCode::NotPortable,
                subject,
                format!("{what} needs portable object but `{object}` is fixed in place"),
            ),
            Some(_) => {}
        }
    }

    fn check_actions(&mut self) {
        let spec = self.spec;
        let synonym_of: HashMap<&str, &str> = spec
            .verb_synonyms
            .iter()
            .flat_map(|(canon, syns)| syns.iter().map(move |s| (s.as_str(), canon.as_str())))
            .collect();
        let mut pairs = HashSet::new();
        for (i, action) in spec.actions.iter().enumerate() {
            let subj = Subject::Action(i);
            if spec.object(&action.object).is_none() {
                self.push(
                    ViolationCode::UnknownObject,
                    subj.clone(),
                    format!("action `{}` targets unknown object `{}`", action.id, action.object),
                );
            }
            if !is_normalized_verb(&action.verb) {
                self.push(
                    ViolationCode::InvalidVerb,
                    subj.clone(),
                    format!("verb `{}` must be lowercase words separated by single spaces", action.verb),
                );
            }
            if BUILTIN_VERBS.contains(&action.verb.as_str()) {
                self.push(ViolationCode::ReservedVerb, subj.clone(), format!("verb `{}` is built in", action.verb));
            }
            if let Some(canon) = synonym_of.get(action.verb.as_str()) {
                self.push(
                    ViolationCode::VerbIsSynonym,
                    subj.clone(),
                    format!("action verb `{}` is declared as a synonym of `{}`", action.verb, canon),
                );
            }
            if !pairs.insert((action.verb.as_str(), action.object.as_str())) {
                self.push(
                    ViolationCode::DuplicateAction,
                    subj.clone(),
                    format!("`{} {}` is declared by more than one action", action.verb, action.object),
                );
            }
            match Tier::from_score(action.score) {
                None => self.push(
                    ViolationCode::InvalidScore,
                    subj.clone(),
                    format!("action `{}` scores {}; scores must be 2, 3 or 5", action.id, action.score),
                ),
                Some(tier) if tier != action.tier => self.push(
                    ViolationCode::ScoreTierMismatch,
                    subj.clone(),
                    format!(
                        "action `{}` is tier {} but scores {} (expected {})",
                        action.id,
                        action.tier.as_str(),
                        action.score,
                        action.tier.score()
                    ),
                ),
                Some(_) => {}
            }
            for cond in &action.preconditions {
                match cond {
                    Condition::AgentInRoom { room } => self.check_room_ref(subj.clone(), room, "condition"),
                    Condition::AgentHolds { object } => self.check_portable_ref(subj.clone(), object, "holds condition"),
                    Condition::AgentColocatedWith { object } => {
                        if spec.object(object).is_none() {
                            self.push(ViolationCode::UnknownObject, subj.clone(), format!("unknown object `{object}`"));
                        }
                    }
                    Condition::ObjectState { object, var, value } => self.check_state_ref(subj.clone(), object, var, value),
                }
            }
            for effect in &action.effects {
                match effect {
                    Effect::SetState { object, var, value } => self.check_state_ref(subj.clone(), object, var, value),
                    Effect::Take { object } => self.check_portable_ref(subj.clone(), object, "take effect"),
                    Effect::Drop { object } => self.check_portable_ref(subj.clone(), object, "drop effect"),
                    Effect::EndGame => {}
                }
            }
        }
    }

    fn check_synonyms(&mut self) {
        let spec = self.spec;
        let mut owner: HashMap<&str, &str> = HashMap::new();
        for (i, (canon, syns)) in spec.verb_synonyms.iter().enumerate() {
            let subj = Subject::Synonyms(i);
            for verb in std::iter::once(canon).chain(syns) {
                if !is_normalized_verb(verb) {
                    self.push(ViolationCode::InvalidVerb, subj.clone(), format!("verb `{verb}` is not normalized"));
                }
                if BUILTIN_VERBS.contains(&verb.as_str()) {
                    self.push(ViolationCode::ReservedVerb, subj.clone(), format!("verb `{verb}` is built in"));
                }
            }
            for syn in syns {
                if syn == canon || spec.verb_synonyms.contains_key(syn) {
                    self.push(
                        ViolationCode::SynonymConflict,
                        subj.clone(),
                        format!("synonym `{syn}` is itself a canonical verb"),
                    );
                }
                if let Some(prev) = owner.insert(syn, canon) {
                    self.push(
                        ViolationCode::SynonymConflict,
                        subj.clone(),
                        format!("synonym `{syn}` maps to both `{prev}` and `{canon}`"),
                    );
                }
            }
        }
    }

    fn check_start_and_win(&mut self) {
        let spec = self.spec;
        if !self.room_exists(&spec.start_room) {
            self.push(ViolationCode::UnknownRoom, Subject::Start, format!("start room `{}` does not exist", spec.start_room));
        }
        if spec.action(&spec.win_action).is_none() {
            self.push(
                ViolationCode::UnknownWinAction,
                Subject::Win,
                format!("win action `{}` is not declared", spec.win_action),
            );
        }
        for (i, action) in spec.actions.iter().enumerate() {
            let is_win = action.id == spec.win_action;
            if is_win && action.tier != Tier::Win {
                self.push(
                    ViolationCode::WinActionMismatch,
                    Subject::Action(i),
                    format!("win action `{}` has tier {}", action.id, action.tier.as_str()),
                );
            } else if !is_win && action.tier == Tier::Win {
                self.push(
                    ViolationCode::WinActionMismatch,
                    Subject::Action(i),
                    format!("action `{}` has tier win but the win action is `{}`", action.id, spec.win_action),
                );
            }
        }
    }
}

/// Checks every world invariant. An empty list means the world is valid.
pub fn validate_world(spec: &WorldSpec) -> Vec<Violation> {
    let mut checker = Checker { spec, out: Vec::new() };
    checker.check_ids();
    checker.check_connections();
    checker.check_objects();
    checker.check_synonyms();
    checker.check_actions();
    checker.check_start_and_win();
    checker.out
}
