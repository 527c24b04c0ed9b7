use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::command::{parse_command, Command, CommandKind};
use crate::executor::PlanFailure;
use crate::world::{ActionDef, Condition, Effect, Tier, World};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Room(String),
    Inventory,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "conditions", rename_all = "snake_case")]
pub enum Outcome {
    Succeeded,
    Blocked(Vec<Condition>),
    UnknownCommand,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Succeeded => "succeeded",
            Outcome::Blocked(_) => "blocked",
            Outcome::UnknownCommand => "unknown_command",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TurnRecord {
    /// 1-based turn number.
    pub turn: usize,
    pub input: String,
    /// `None` when the input did not parse.
    pub command: Option<Command>,
    pub outcome: Outcome,
    pub reward: u32,
    /// Cumulative score after this turn.
    pub score: u32,
    pub narration: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("the game is over")]
    GameOver,
    #[error("there is no action `{verb} {object}` in this world")]
    NoSuchAction { verb: String, object: String },
    #[error("unknown object `{0}`")]
    UnknownObject(String),
}

/// The conditions an action checks: being next to (or holding) its object,
/// then its declared preconditions.
pub fn requirements(action: &ActionDef) -> Vec<Condition> {
    let near = Condition::AgentColocatedWith { object: action.object.clone() };
    let mut out = vec![near.clone()];
    out.extend(action.preconditions.iter().filter(|c| **c != near).cloned());
    out
}

/// Mutable state of one episode. Cloning is cheap enough for planning;
/// the world is shared.
#[derive(Debug, Clone)]
pub struct GameState {
    world: Arc<World>,
    agent_room: String,
    object_rooms: BTreeMap<String, Location>,
    object_states: BTreeMap<(String, String), String>,
    cumulative_score: u32,
    awarded: Vec<String>,
    ended: bool,
    log: Vec<TurnRecord>,
}

impl PartialEq for GameState {
    fn eq(&self, other: &Self) -> bool {
        self.eq_ignoring_log(other) && self.log == other.log
    }
}

pub fn new_game(world: Arc<World>) -> GameState {
    GameState::new(world)
}

impl GameState {
    pub fn new(world: Arc<World>) -> GameState {
        let object_rooms = world.objects().iter().map(|o| (o.id.clone(), Location::Room(o.location.clone()))).collect();
        let object_states = world
            .objects()
            .iter()
            .flat_map(|o| o.state_vars.iter().map(move |v| ((o.id.clone(), v.name.clone()), v.initial.clone())))
            .collect();
        GameState {
            agent_room: world.start_room().to_string(),
            world,
            object_rooms,
            object_states,
            cumulative_score: 0,
            awarded: Vec::new(),
            ended: false,
            log: Vec::new(),
        }
    }

    pub fn world(&self) -> &Arc<World> {
        &self.world
    }

    pub fn agent_room(&self) -> &str {
        &self.agent_room
    }

    pub fn cumulative_score(&self) -> u32 {
        self.cumulative_score
    }

    pub fn ended(&self) -> bool {
        self.ended
    }

    pub fn log(&self) -> &[TurnRecord] {
        &self.log
    }

    /// Action ids in the order they were first awarded.
    pub fn awarded(&self) -> &[String] {
        &self.awarded
    }

    pub fn is_awarded(&self, action_id: &str) -> bool {
        self.awarded.iter().any(|a| a == action_id)
    }

    pub fn object_state(&self, object: &str, var: &str) -> Option<&str> {
        self.object_states.get(&(object.to_string(), var.to_string())).map(String::as_str)
    }

    pub fn object_location(&self, object: &str) -> Option<&Location> {
        self.object_rooms.get(object)
    }

    pub fn holds(&self, object: &str) -> bool {
        self.object_rooms.get(object) == Some(&Location::Inventory)
    }

    /// Objects carried by the agent, in id order.
    pub fn inventory(&self) -> impl Iterator<Item = &str> {
        self.object_rooms.iter().filter(|(_, l)| **l == Location::Inventory).map(|(o, _)| o.as_str())
    }

    /// Objects lying in a room, in world declaration order.
    pub fn objects_in(&self, room: &str) -> Vec<&str> {
        self.world
            .objects()
            .iter()
            .filter(|o| matches!(self.object_rooms.get(&o.id), Some(Location::Room(r)) if r == room))
            .map(|o| o.id.as_str())
            .collect()
    }

    /// Equality over everything except the turn log.
    pub fn eq_ignoring_log(&self, other: &GameState) -> bool {
        (Arc::ptr_eq(&self.world, &other.world) || self.world == other.world)
            && self.agent_room == other.agent_room
            && self.object_rooms == other.object_rooms
            && self.object_states == other.object_states
            && self.cumulative_score == other.cumulative_score
            && self.awarded == other.awarded
            && self.ended == other.ended
    }

    pub fn condition_holds(&self, cond: &Condition) -> bool {
        match cond {
            Condition::AgentInRoom { room } => self.agent_room == *room,
            Condition::AgentHolds { object } => self.holds(object),
            Condition::ObjectState { object, var, value } => self.object_state(object, var) == Some(value.as_str()),
            Condition::AgentColocatedWith { object } => match self.object_rooms.get(object) {
                Some(Location::Inventory) => true,
                Some(Location::Room(r)) => *r == self.agent_room,
                None => false,
            },
        }
    }

    /// Requirements of `action` that do not hold right now.
    pub fn unmet(&self, action: &ActionDef) -> Vec<Condition> {
        requirements(action).into_iter().filter(|c| !self.condition_holds(c)).collect()
    }

    fn display(&self, object: &str) -> String {
        self.world.object(object).map_or_else(|| object.to_string(), |o| o.display_name.clone())
    }

    fn room_name(&self, room: &str) -> String {
        self.world.room(room).map_or_else(|| room.to_string(), |r| r.display_name.clone())
    }

    fn describe_condition(&self, cond: &Condition) -> String {
        match cond {
            Condition::AgentInRoom { room } => format!("you need to be in the {}", self.room_name(room)),
            Condition::AgentHolds { object } => format!("you need to hold the {}", self.display(object)),
            Condition::ObjectState { object, var, value } => {
                format!("the {} must have {var} = {value}", self.display(object))
            }
            Condition::AgentColocatedWith { object } => format!("the {} is not here", self.display(object)),
        }
    }

    fn record(&mut self, input: String, command: Option<Command>, outcome: Outcome, reward: u32, narration: String) -> TurnRecord {
        let record = TurnRecord {
            turn: self.log.len() + 1,
            input,
            command,
            outcome,
            reward,
            score: self.cumulative_score,
            narration,
        };
        self.log.push(record.clone());
        record
    }

    /// Executes one command. Blocked turns change nothing but the log.
    pub fn step(&mut self, cmd: &Command) -> Result<TurnRecord, StepError> {
        if self.ended {
            return Err(StepError::GameOver);
        }
        let input = cmd.raw_text.clone();
        match &cmd.kind {
            CommandKind::Go(direction) => {
                let target = self.world.exit(&self.agent_room, *direction).map(str::to_string);
                Ok(match target {
                    Some(room) => {
                        let narration = format!("You go {direction} to the {}.", self.room_name(&room));
                        self.agent_room = room;
                        self.record(input, Some(cmd.clone()), Outcome::Succeeded, 0, narration)
                    }
                    None => {
                        let narration = format!("You can't go {direction} from here.");
                        self.record(input, Some(cmd.clone()), Outcome::Blocked(Vec::new()), 0, narration)
                    }
                })
            }
            CommandKind::Take(object) => {
                let obj = self.world.object(object).ok_or_else(|| StepError::UnknownObject(object.clone()))?;
                let name = obj.display_name.clone();
                let portable = obj.portable;
                let near = Condition::AgentColocatedWith { object: object.clone() };
                Ok(if self.holds(object) {
                    self.record(input, Some(cmd.clone()), Outcome::Succeeded, 0, format!("You already have the {name}."))
                } else if !self.condition_holds(&near) {
                    let narration = format!("You can't take the {name}: {}.", self.describe_condition(&near));
                    self.record(input, Some(cmd.clone()), Outcome::Blocked(vec![near]), 0, narration)
                } else if !portable {
                    self.record(input, Some(cmd.clone()), Outcome::Blocked(Vec::new()), 0, format!("The {name} can't be carried."))
                } else {
                    self.object_rooms.insert(object.clone(), Location::Inventory);
                    self.record(input, Some(cmd.clone()), Outcome::Succeeded, 0, format!("You take the {name}."))
                })
            }
            CommandKind::Drop(object) => {
                let obj = self.world.object(object).ok_or_else(|| StepError::UnknownObject(object.clone()))?;
                let name = obj.display_name.clone();
                Ok(if self.holds(object) {
                    self.object_rooms.insert(object.clone(), Location::Room(self.agent_room.clone()));
                    self.record(input, Some(cmd.clone()), Outcome::Succeeded, 0, format!("You drop the {name}."))
                } else {
                    let cond = Condition::AgentHolds { object: object.clone() };
                    self.record(input, Some(cmd.clone()), Outcome::Blocked(vec![cond]), 0, format!("You don't have the {name}."))
                })
            }
            CommandKind::Act { verb, object } => {
                let action = self
                    .world
                    .action_for(verb, object)
                    .cloned()
                    .ok_or_else(|| StepError::NoSuchAction { verb: verb.clone(), object: object.clone() })?;
                Ok(self.perform(input, cmd, &action))
            }
        }
    }

    fn perform(&mut self, input: String, cmd: &Command, action: &ActionDef) -> TurnRecord {
        let name = self.display(&action.object);
        let failed = self.unmet(action);
        if !failed.is_empty() {
            let reasons: Vec<String> = failed.iter().map(|c| self.describe_condition(c)).collect();
            let narration = format!("You can't {} the {name} yet: {}.", action.verb, reasons.join("; "));
            return self.record(input, Some(cmd.clone()), Outcome::Blocked(failed), 0, narration);
        }
        let mut end = action.tier == Tier::Win;
        for effect in &action.effects {
            match effect {
                Effect::SetState { object, var, value } => {
                    self.object_states.insert((object.clone(), var.clone()), value.clone());
                }
                Effect::Take { object } => {
                    self.object_rooms.insert(object.clone(), Location::Inventory);
                }
                Effect::Drop { object } => {
                    if self.holds(object) {
                        self.object_rooms.insert(object.clone(), Location::Room(self.agent_room.clone()));
                    }
                }
                Effect::EndGame => end = true,
            }
        }
        let reward = if self.is_awarded(&action.id) {
            0
        } else {
            self.awarded.push(action.id.clone());
            self.cumulative_score += action.score;
            action.score
        };
        let mut narration = format!("You {} the {name}.", action.verb);
        if reward == 0 {
            narration.push_str(" Nothing new happens.");
        }
        if end {
            self.ended = true;
            narration.push_str(" The game is over.");
        }
        self.record(input, Some(cmd.clone()), Outcome::Succeeded, reward, narration)
    }

    /// Parses and executes raw text. Unparseable input and verb/object
    /// pairs the world does not declare become `unknown_command` turns.
    pub fn submit(&mut self, text: &str) -> Result<TurnRecord, StepError> {
        if self.ended {
            return Err(StepError::GameOver);
        }
        match parse_command(text, &self.world) {
            Ok(cmd) => match self.step(&cmd) {
                Err(StepError::NoSuchAction { verb, object }) => {
                    let narration = format!("You can't {verb} the {} here.", self.display(&object));
                    Ok(self.record(text.trim().to_string(), Some(cmd), Outcome::UnknownCommand, 0, narration))
                }
                other => other,
            },
            Err(e) => {
                let narration = format!("I don't understand that: {e}.");
                Ok(self.record(text.trim().to_string(), None, Outcome::UnknownCommand, 0, narration))
            }
        }
    }

    /// Room name, description, visible objects and exits.
    pub fn describe_room(&self) -> String {
        let room = self.world.room(&self.agent_room);
        let mut out = room.map_or_else(|| self.agent_room.clone(), |r| r.display_name.clone());
        if let Some(r) = room.filter(|r| !r.description.is_empty()) {
            out.push('\n');
            out.push_str(&r.description);
        }
        let here: Vec<String> = self.objects_in(&self.agent_room).iter().map(|o| self.display(o)).collect();
        if !here.is_empty() {
            out.push_str(&format!("\nYou see: {}.", here.join(", ")));
        }
        let exits: Vec<&str> = self.world.exits(&self.agent_room).iter().map(|(d, _)| d.as_str()).collect();
        if exits.is_empty() {
            out.push_str("\nThere are no exits.");
        } else {
            out.push_str(&format!("\nExits: {}.", exits.join(", ")));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailedTurn {
    pub turn: usize,
    pub input: String,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EpisodeResult {
    pub cumulative_score: u32,
    pub last_reward: u32,
    pub win: bool,
    pub failures: Vec<FailedTurn>,
    pub plan_failure: Option<PlanFailure>,
}

impl EpisodeResult {
    pub fn from_state(state: &GameState) -> EpisodeResult {
        let failures: Vec<FailedTurn> = state
            .log
            .iter()
            .filter(|t| t.outcome != Outcome::Succeeded)
            .map(|t| FailedTurn { turn: t.turn, input: t.input.clone(), outcome: t.outcome.clone() })
            .collect();
        let last_action_is_win = state
            .log
            .iter()
            .rev()
            .find(|t| t.outcome == Outcome::Succeeded && matches!(t.command.as_ref().map(|c| &c.kind), Some(CommandKind::Act { .. })))
            .and_then(|t| match t.command.as_ref().map(|c| &c.kind) {
                Some(CommandKind::Act { verb, object }) => state.world.action_for(verb, object),
                _ => None,
            })
            .is_some_and(|a| a.tier == Tier::Win);
        EpisodeResult {
            cumulative_score: state.cumulative_score,
            last_reward: state.log.last().map_or(0, |t| t.reward),
            win: last_action_is_win && failures.is_empty(),
            failures,
            plan_failure: None,
        }
    }
}

/// Executes commands in order until the list runs out or the game ends.
/// Failed turns are recorded in the result, never raised.
pub fn run_commands(state: &mut GameState, commands: &[Command]) -> EpisodeResult {
    for cmd in commands {
        if state.ended {
            break;
        }
        if let Err(StepError::NoSuchAction { .. } | StepError::UnknownObject(_)) = state.step(cmd) {
            let narration = format!("There is no way to {cmd} here.");
            state.record(cmd.raw_text.clone(), Some(cmd.clone()), Outcome::UnknownCommand, 0, narration);
        }
    }
    EpisodeResult::from_state(state)
}
