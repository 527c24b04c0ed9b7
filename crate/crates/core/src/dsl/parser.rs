use indexmap::IndexMap;

use super::lexer::{lex_line, Tok, Token};
use super::{Diagnostics, ParseDiagnostic, Severity, SourceSpan};
use crate::world::{
    validate_world, ActionDef, Condition, Connection, Direction, Effect, GameObject, Room, StateVar, Subject,
    Tier, World, WorldSpec,
};

/// A successfully parsed world plus any warnings.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub world: World,
    pub warnings: Vec<ParseDiagnostic>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

const TOP_LEVEL: [&str; 9] = ["world", "start", "win", "synonyms", "room", "connect", "exit", "object", "action"];
const ROOM_KEYS: [&str; 1] = ["description"];
const OBJECT_KEYS: [&str; 5] = ["alias", "in", "portable", "fixed", "state"];
const ACTION_KEYS: [&str; 5] = ["id", "tier", "score", "require", "effect"];

#[derive(Debug, Clone, Copy)]
enum Block {
    None,
    Room(usize),
    Object(usize),
    Action(usize),
}

struct ObjectDraft {
    obj: GameObject,
    has_location: bool,
}

struct ActionDraft {
    id: Option<String>,
    verb: String,
    object: String,
    tier: Option<Tier>,
    score: Option<u32>,
    preconditions: Vec<Condition>,
    effects: Vec<Effect>,
}

struct Cursor<'t> {
    toks: &'t [Token],
    i: usize,
    line: usize,
    end_column: usize,
}

type Fail = (Pos, &'static str, String);

impl<'t> Cursor<'t> {
    fn pos(&self) -> Pos {
        let column = self.toks.get(self.i).map_or(self.end_column, |t| t.column);
        Pos { line: self.line, column }
    }

    fn fail<T>(&self, what: &str) -> Result<T, Fail> {
        let found = match self.toks.get(self.i).map(|t| &t.tok) {
            None => "end of line".to_string(),
            Some(Tok::Word(w)) => format!("`{w}`"),
            Some(Tok::Str(s)) => format!("string \"{}\"", s.escape_debug()),
            Some(Tok::Eq) => "`=`".into(),
            Some(Tok::Comma) => "`,`".into(),
            Some(Tok::LBracket) => "`[`".into(),
            Some(Tok::RBracket) => "`]`".into(),
        };
        Err((self.pos(), "SYNTAX", format!("expected {what}, found {found}")))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn word(&mut self, what: &str) -> Result<String, Fail> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.i += 1;
                Ok(w)
            }
            _ => self.fail(what),
        }
    }

    fn text(&mut self, what: &str) -> Result<String, Fail> {
        match self.peek() {
            Some(Tok::Word(w)) | Some(Tok::Str(w)) => {
                let w = w.clone();
                self.i += 1;
                Ok(w)
            }
            _ => self.fail(what),
        }
    }

    fn string(&mut self, what: &str) -> Result<String, Fail> {
        match self.peek() {
            Some(Tok::Str(s)) => {
                let s = s.clone();
                self.i += 1;
                Ok(s)
            }
            _ => self.fail(what),
        }
    }

    fn optional_string(&mut self) -> Option<String> {
        match self.peek() {
            Some(Tok::Str(s)) => {
                let s = s.clone();
                self.i += 1;
                Some(s)
            }
            _ => None,
        }
    }

    fn punct(&mut self, tok: Tok, what: &str) -> Result<(), Fail> {
        if self.peek() == Some(&tok) {
            self.i += 1;
            Ok(())
        } else {
            self.fail(what)
        }
    }

    /// Words and strings up to the next `,`, `=` or end of line, joined by spaces.
    fn phrase(&mut self, what: &str) -> Result<String, Fail> {
        let mut parts = Vec::new();
        while let Some(Tok::Word(w)) | Some(Tok::Str(w)) = self.peek() {
            parts.push(w.clone());
            self.i += 1;
        }
        if parts.is_empty() {
            return self.fail(what);
        }
        Ok(parts.join(" "))
    }

    fn finish(&self) -> Result<(), Fail> {
        if self.i < self.toks.len() {
            return Err((self.pos(), "TRAILING_TOKENS", "unexpected tokens at end of line".into()));
        }
        Ok(())
    }
}

struct Builder<'a> {
    file: &'a str,
    diags: Vec<ParseDiagnostic>,
    name: Option<(String, Pos)>,
    start: Option<(String, Pos)>,
    win: Option<(String, Pos)>,
    rooms: Vec<(Room, Pos)>,
    connections: Vec<(Connection, Pos)>,
    objects: Vec<(ObjectDraft, Pos)>,
    actions: Vec<(ActionDraft, Pos)>,
    synonyms: IndexMap<String, (Vec<String>, Pos)>,
    block: Block,
    seen_statement: bool,
}

impl<'a> Builder<'a> {
    fn span(&self, pos: Pos) -> SourceSpan {
        SourceSpan { file: self.file.to_string(), line: pos.line, column: pos.column }
    }

    fn diag(&mut self, pos: Pos, severity: Severity, code: &str, message: String) {
        let span = self.span(pos);
        self.diags.push(ParseDiagnostic { span, severity, code: code.to_string(), message });
    }

    fn error(&mut self, pos: Pos, code: &str, message: String) {
        self.diag(pos, Severity::Error, code, message);
    }

    fn statement(&mut self, toks: &[Token], line: usize, line_len: usize) {
        let mut cur = Cursor { toks, i: 0, line, end_column: line_len + 1 };
        let pos = cur.pos();
        let keyword = match cur.word("a keyword") {
            Ok(k) => k,
            Err((p, code, msg)) => return self.error(p, code, msg),
        };
        let first = !self.seen_statement;
        self.seen_statement = true;
        if first && keyword != "world" {
            self.error(pos, "MISSING_WORLD_HEADER", "file must start with a `world` declaration".into());
        }
        let result = if TOP_LEVEL.contains(&keyword.as_str()) {
            self.top_level(&keyword, pos, &mut cur)
        } else {
            self.attribute(&keyword, pos, &mut cur)
        };
        if let Err((p, code, msg)) = result.and_then(|()| cur.finish()) {
            self.error(p, code, msg);
        }
    }

    fn top_level(&mut self, keyword: &str, pos: Pos, cur: &mut Cursor) -> Result<(), Fail> {
        self.block = Block::None;
        match keyword {
            "world" => {
                let name = cur.text("a world name")?;
                if self.name.is_some() {
                    return Err((pos, "DUPLICATE_DECLARATION", "`world` declared more than once".into()));
                }
                self.name = Some((name, pos));
            }
            "start" | "win" => {
                let id = cur.word(if keyword == "start" { "a room id" } else { "an action id" })?;
                let slot = if keyword == "start" { &mut self.start } else { &mut self.win };
                if slot.is_some() {
                    return Err((pos, "DUPLICATE_DECLARATION", format!("`{keyword}` declared more than once")));
                }
                *slot = Some((id, pos));
            }
            "synonyms" => {
                let canonical = cur.phrase("a canonical verb")?;
                cur.punct(Tok::Eq, "`=`")?;
                let mut list = vec![cur.phrase("a synonym")?];
                while cur.peek() == Some(&Tok::Comma) {
                    cur.i += 1;
                    list.push(cur.phrase("a synonym")?);
                }
                self.synonyms.entry(canonical).or_insert_with(|| (Vec::new(), pos)).0.extend(list);
            }
            "room" => {
                let id = cur.word("a room id")?;
                let display_name = cur.optional_string().unwrap_or_else(|| id.clone());
                self.rooms.push((Room { id, display_name, description: String::new() }, pos));
                self.block = Block::Room(self.rooms.len() - 1);
            }
            "connect" | "exit" => {
                let from = cur.word("a room id")?;
                let dir_pos = cur.pos();
                let dir_word = cur.word("a direction")?;
                let direction: Direction = dir_word.parse().map_err(|()| {
                    (dir_pos, "BAD_DIRECTION", format!("`{dir_word}` is not one of north, south, east, west"))
                })?;
                let to = cur.word("a room id")?;
                self.connections.push((Connection::new(from.clone(), direction, to.clone()), pos));
                if keyword == "connect" {
                    self.connections.push((Connection::new(to, direction.opposite(), from), pos));
                }
            }
            "object" => {
                let id = cur.word("an object id")?;
                let display_name = cur.optional_string().unwrap_or_else(|| id.clone());
                let obj = GameObject {
                    id,
                    display_name,
                    aliases: Vec::new(),
                    location: String::new(),
                    portable: false,
                    state_vars: Vec::new(),
                };
                self.objects.push((ObjectDraft { obj, has_location: false }, pos));
                self.block = Block::Object(self.objects.len() - 1);
            }
            "action" => {
                let text_pos = cur.pos();
                let text = cur.string("a quoted \"verb object\" phrase")?;
                let mut words: Vec<&str> = text.split_whitespace().collect();
                if words.len() < 2 {
                    return Err((text_pos, "BAD_ACTION", format!("action \"{text}\" needs a verb and an object")));
                }
                let object = words.pop().unwrap_or_default().to_string();
                let draft = ActionDraft {
                    id: None,
                    verb: words.join(" "),
                    object,
                    tier: None,
                    score: None,
                    preconditions: Vec::new(),
                    effects: Vec::new(),
                };
                self.actions.push((draft, pos));
                self.block = Block::Action(self.actions.len() - 1);
            }
            _ => unreachable!("caller checks TOP_LEVEL"),
        }
        Ok(())
    }

    fn attribute(&mut self, key: &str, pos: Pos, cur: &mut Cursor) -> Result<(), Fail> {
        let known_somewhere = ROOM_KEYS.contains(&key) || OBJECT_KEYS.contains(&key) || ACTION_KEYS.contains(&key);
        let fits = match self.block {
            Block::None => false,
            Block::Room(_) => ROOM_KEYS.contains(&key),
            Block::Object(_) => OBJECT_KEYS.contains(&key),
            Block::Action(_) => ACTION_KEYS.contains(&key),
        };
        if !fits {
            if known_somewhere {
                return Err((pos, "MISPLACED_KEY", format!("`{key}` is not valid here")));
            }
            self.diag(pos, Severity::Warning, "UNKNOWN_KEY", format!("unknown key `{key}` ignored"));
            cur.i = cur.toks.len();
            return Ok(());
        }
        match self.block {
            Block::Room(i) => {
                let text = cur.string("a quoted description")?;
                self.rooms[i].0.description = text;
            }
            Block::Object(i) => {
                let draft = &mut self.objects[i].0;
                match key {
                    "alias" => draft.obj.aliases.push(cur.text("an alias")?),
                    "in" => {
                        draft.obj.location = cur.word("a room id")?;
                        draft.has_location = true;
                    }
                    "portable" => draft.obj.portable = true,
                    "fixed" => draft.obj.portable = false,
                    "state" => {
                        let name = cur.word("a state name")?;
                        cur.punct(Tok::Eq, "`=`")?;
                        let initial = cur.text("an initial value")?;
                        let in_pos = cur.pos();
                        if cur.word("`in`")? != "in" {
                            return Err((in_pos, "SYNTAX", "expected `in`".into()));
                        }
                        cur.punct(Tok::LBracket, "`[`")?;
                        let mut legal = vec![cur.text("a value")?];
                        while cur.peek() == Some(&Tok::Comma) {
                            cur.i += 1;
                            legal.push(cur.text("a value")?);
                        }
                        cur.punct(Tok::RBracket, "`]`")?;
                        draft.obj.state_vars.push(StateVar { name, initial, legal });
                    }
                    _ => unreachable!(),
                }
            }
            Block::Action(i) => {
                let draft = &mut self.actions[i].0;
                match key {
                    "id" => draft.id = Some(cur.word("an action id")?),
                    "tier" => {
                        let p = cur.pos();
                        let w = cur.word("a tier")?;
                        draft.tier = Some(w.parse().map_err(|()| {
                            (p, "BAD_TIER", format!("`{w}` is not one of stand_alone, interactive, win"))
                        })?);
                    }
                    "score" => {
                        let p = cur.pos();
                        let w = cur.word("a score")?;
                        draft.score =
                            Some(w.parse().map_err(|_| (p, "BAD_SCORE", format!("`{w}` is not a non-negative integer")))?);
                    }
                    "require" => {
                        let cond = parse_condition(cur)?;
                        draft.preconditions.push(cond);
                    }
                    "effect" => {
                        let effect = parse_effect(cur)?;
                        draft.effects.push(effect);
                    }
                    _ => unreachable!(),
                }
            }
            Block::None => unreachable!(),
        }
        Ok(())
    }

    fn finish(mut self) -> Result<Parsed, Diagnostics> {
        let origin = Pos { line: 1, column: 1 };
        let Some((name, name_pos)) = self.name.clone() else {
            if !self.diags.iter().any(|d| d.code == "MISSING_WORLD_HEADER") {
                self.error(origin, "MISSING_WORLD_HEADER", "no `world` declaration".into());
            }
            return Err(Diagnostics(self.diags));
        };
        let start = self.start.clone().map(|(s, _)| s);
        let win = self.win.clone().map(|(w, _)| w);
        if start.is_none() {
            self.error(name_pos, "MISSING_START", "no `start` room declared".into());
        }
        if win.is_none() {
            self.error(name_pos, "MISSING_WIN", "no `win` action declared".into());
        }
        let mut objects = Vec::new();
        let mut missing = Vec::new();
        for (draft, pos) in &self.objects {
            if !draft.has_location {
                missing.push((*pos, draft.obj.id.clone()));
            }
            objects.push(draft.obj.clone());
        }
        for (pos, id) in missing {
            self.error(pos, "MISSING_LOCATION", format!("object `{id}` has no `in` room"));
        }
        let mut actions = Vec::new();
        let mut unscored = Vec::new();
        for (draft, pos) in &self.actions {
            let (tier, score) = match (draft.tier, draft.score) {
                (Some(t), Some(s)) => (t, s),
                (Some(t), None) => (t, t.score()),
                (None, Some(s)) => match Tier::from_score(s) {
                    Some(t) => (t, s),
                    None => (Tier::StandAlone, s),
                },
                (None, None) => {
                    unscored.push(*pos);
                    continue;
                }
            };
            actions.push(ActionDef {
                id: draft.id.clone().unwrap_or_else(|| ActionDef::derive_id(&draft.verb, &draft.object)),
                verb: draft.verb.clone(),
                object: draft.object.clone(),
                tier,
                score,
                preconditions: draft.preconditions.clone(),
                effects: draft.effects.clone(),
            });
        }
        for pos in unscored {
            self.error(pos, "MISSING_SCORE", "action declares neither `score` nor `tier`".into());
        }
        if self.diags.iter().any(ParseDiagnostic::is_error) {
            return Err(Diagnostics(self.diags));
        }
        let spec = WorldSpec {
            name,
            rooms: self.rooms.iter().map(|(r, _)| r.clone()).collect(),
            connections: self.connections.iter().map(|(c, _)| c.clone()).collect(),
            objects,
            actions,
            verb_synonyms: self.synonyms.iter().map(|(k, (v, _))| (k.clone(), v.clone())).collect(),
            start_room: start.unwrap_or_default(),
            win_action: win.unwrap_or_default(),
        };
        let violations = validate_world(&spec);
        if !violations.is_empty() {
            for v in violations {
                let pos = match v.subject {
                    Subject::World => name_pos,
                    Subject::Start => self.start.as_ref().map_or(name_pos, |(_, p)| *p),
                    Subject::Win => self.win.as_ref().map_or(name_pos, |(_, p)| *p),
                    Subject::Room(i) => self.rooms[i].1,
                    Subject::Connection(i) => self.connections[i].1,
                    Subject::Object(i) => self.objects[i].1,
                    Subject::Action(i) => self.actions[i].1,
                    Subject::Synonyms(i) => self.synonyms.get_index(i).map_or(name_pos, |(_, (_, p))| *p),
                };
                self.error(pos, v.code.as_str(), v.message);
            }
            return Err(Diagnostics(self.diags));
        }
        let world = World::new(spec).map_err(|_| Diagnostics(self.diags.clone()))?;
        Ok(Parsed { world, warnings: self.diags })
    }
}

fn parse_condition(cur: &mut Cursor) -> Result<Condition, Fail> {
    let p = cur.pos();
    let kind = cur.word("a condition (in, holds, near, state)")?;
    Ok(match kind.as_str() {
        "in" => Condition::AgentInRoom { room: cur.word("a room id")? },
        "holds" => Condition::AgentHolds { object: cur.word("an object id")? },
        "near" => Condition::AgentColocatedWith { object: cur.word("an object id")? },
        "state" => {
            let object = cur.word("an object id")?;
            let var = cur.word("a state name")?;
            cur.punct(Tok::Eq, "`=`")?;
            let value = cur.text("a value")?;
            Condition::ObjectState { object, var, value }
        }
        other => return Err((p, "BAD_CONDITION", format!("unknown condition `{other}`"))),
    })
}

fn parse_effect(cur: &mut Cursor) -> Result<Effect, Fail> {
    let p = cur.pos();
    let kind = cur.word("an effect (set, take, drop, end_game)")?;
    Ok(match kind.as_str() {
        "set" => {
            let object = cur.word("an object id")?;
            let var = cur.word("a state name")?;
            cur.punct(Tok::Eq, "`=`")?;
            let value = cur.text("a value")?;
            Effect::SetState { object, var, value }
        }
        "take" => Effect::Take { object: cur.word("an object id")? },
        "drop" => Effect::Drop { object: cur.word("an object id")? },
        "end_game" => Effect::EndGame,
        other => return Err((p, "BAD_EFFECT", format!("unknown effect `{other}`"))),
    })
}

/// Parses `.world` source. Diagnostics use `<input>` as the file name.
pub fn parse_worldspec(source: &str) -> Result<Parsed, Diagnostics> {
    parse_worldspec_named(source, "<input>")
}

pub fn parse_worldspec_named(source: &str, file: &str) -> Result<Parsed, Diagnostics> {
    let mut builder = Builder {
        file,
        diags: Vec::new(),
        name: None,
        start: None,
        win: None,
        rooms: Vec::new(),
        connections: Vec::new(),
        objects: Vec::new(),
        actions: Vec::new(),
        synonyms: IndexMap::new(),
        block: Block::None,
        seen_statement: false,
    };
    let source = source.strip_prefix('\u{feff}').unwrap_or(source);
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        match lex_line(line) {
            Ok(toks) if toks.is_empty() => {}
            Ok(toks) => builder.statement(&toks, line_no, line.chars().count()),
            Err(e) => {
                builder.seen_statement = true;
                builder.error(Pos { line: line_no, column: e.column }, e.code, e.message);
            }
        }
    }
    builder.finish()
}
