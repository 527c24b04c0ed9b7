// PlanFailure carries the failing condition by value; it is not on a hot path.
#![allow(clippy::result_large_err)]

use std::sync::Arc;

use serde::Serialize;

use super::path::shortest_path;
use crate::engine::{requirements, run_commands, Command, CommandKind, EpisodeResult, GameState, Location, Outcome, TurnRecord};
use crate::world::{ActionDef, Condition, Direction, Effect, World};

/// Backward-chaining depth used by [`augment_with_navigation`] callers
/// that have no better number.
pub const DEFAULT_DEPTH_BUDGET: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Given,
    Navigation,
    Prerequisite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanStep {
    pub command: Command,
    pub provenance: Provenance,
}

impl Serialize for PlanStep {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row<'a> {
            step: String,
            provenance: &'a Provenance,
        }
        Row { step: self.command.to_string(), provenance: &self.provenance }.serialize(serializer)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
    /// Given commands left out because the game ended before them.
    #[serde(skip_serializing_if = "is_zero")]
    pub dropped_after_end: usize,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

impl Plan {
    pub fn commands(&self) -> Vec<Command> {
        self.steps.iter().map(|s| s.command.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureReason {
    UnreachableRoom { room: String },
    UnsatisfiableCondition { condition: Condition },
    DepthExceeded { condition: Condition },
    NoExit { direction: Direction },
    UnknownAction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanFailure {
    /// Action id, or the command text for built-in commands.
    pub failing_action: String,
    /// The failing command as the player would type it.
    pub action_text: String,
    pub reason: FailureReason,
}

struct Planner<'w> {
    world: &'w World,
    sim: GameState,
    steps: Vec<PlanStep>,
    failing: (String, String),
}

impl<'w> Planner<'w> {
    fn fail(&self, reason: FailureReason) -> PlanFailure {
        PlanFailure { failing_action: self.failing.0.clone(), action_text: self.failing.1.clone(), reason }
    }

    fn push(&mut self, command: Command, provenance: Provenance) -> Result<(), PlanFailure> {
        let record = self.sim.step(&command).map_err(|_| self.fail(FailureReason::UnknownAction))?;
        match record.outcome {
            Outcome::Succeeded => {
                self.steps.push(PlanStep { command, provenance });
                Ok(())
            }
            Outcome::Blocked(conds) => Err(match (conds.into_iter().next(), &command.kind) {
                (Some(condition), _) => self.fail(FailureReason::UnsatisfiableCondition { condition }),
                (None, CommandKind::Go(direction)) => self.fail(FailureReason::NoExit { direction: *direction }),
                (None, CommandKind::Take(object)) => self.fail(FailureReason::UnsatisfiableCondition {
                    condition: Condition::AgentHolds { object: object.clone() },
                }),
                (None, _) => self.fail(FailureReason::UnknownAction),
            }),
            Outcome::UnknownCommand => Err(self.fail(FailureReason::UnknownAction)),
        }
    }

    fn goto(&mut self, room: &str) -> Result<(), PlanFailure> {
        let path = shortest_path(self.world, self.sim.agent_room(), room)
            .map_err(|_| self.fail(FailureReason::UnreachableRoom { room: room.to_string() }))?;
        for d in path {
            self.push(Command::go(d), Provenance::Navigation)?;
        }
        Ok(())
    }

    fn achieve(&mut self, cond: &Condition, depth: u32) -> Result<(), PlanFailure> {
        if self.sim.condition_holds(cond) {
            return Ok(());
        }
        let unsatisfiable = || FailureReason::UnsatisfiableCondition { condition: cond.clone() };
        match cond {
            Condition::AgentInRoom { room } => self.goto(room),
            Condition::AgentColocatedWith { object } => match self.sim.object_location(object).cloned() {
                Some(Location::Room(room)) => self.goto(&room),
                Some(Location::Inventory) => Ok(()),
                None => Err(self.fail(unsatisfiable())),
            },
            Condition::AgentHolds { object } => {
                let portable = self.world.object(object).is_some_and(|o| o.portable);
                let Some(Location::Room(room)) = self.sim.object_location(object).cloned().filter(|_| portable) else {
                    return Err(self.fail(unsatisfiable()));
                };
                self.goto(&room)?;
                self.push(Command::take(object.clone()), Provenance::Prerequisite)
            }
            Condition::ObjectState { object, var, value } => {
                if depth == 0 {
                    return Err(self.fail(FailureReason::DepthExceeded { condition: cond.clone() }));
                }
                let producer = self
                    .world
                    .actions()
                    .iter()
                    .filter(|a| {
                        a.effects.iter().any(|e| {
                            matches!(e, Effect::SetState { object: o, var: v, value: x } if o == object && v == var && x == value)
                        })
                    })
                    .min_by_key(|a| self.sim.unmet(a).len())
                    .cloned();
                let Some(producer) = producer else {
                    return Err(self.fail(unsatisfiable()));
                };
                self.satisfy(&producer, depth - 1)?;
                self.push(Command::act(producer.verb.clone(), producer.object.clone()), Provenance::Prerequisite)?;
                if self.sim.condition_holds(cond) {
                    Ok(())
                } else {
                    Err(self.fail(unsatisfiable()))
                }
            }
        }
    }

    /// Makes every requirement of `action` hold in the simulated state.
    /// Object-related conditions go first and locations last, so the walk
    /// to the action's own room happens after fetching what it needs.
    fn satisfy(&mut self, action: &ActionDef, depth: u32) -> Result<(), PlanFailure> {
        let mut ordered = requirements(action);
        ordered.sort_by_key(|c| matches!(c, Condition::AgentInRoom { .. } | Condition::AgentColocatedWith { .. }));
        for _ in 0..3 {
            if self.sim.unmet(action).is_empty() {
                return Ok(());
            }
            for cond in &ordered {
                self.achieve(cond, depth)?;
            }
        }
        match self.sim.unmet(action).into_iter().next() {
            None => Ok(()),
            Some(condition) => Err(self.fail(FailureReason::UnsatisfiableCondition { condition })),
        }
    }
}

/// Steps that make `action` executable from `state`, not including the
/// action itself. Works on a copy of the state.
pub fn resolve_prerequisites(
    world: &World,
    state: &GameState,
    action: &ActionDef,
    depth_budget: u32,
) -> Result<Vec<PlanStep>, PlanFailure> {
    let mut planner = Planner {
        world,
        sim: state.clone(),
        steps: Vec::new(),
        failing: (action.id.clone(), action.command_text()),
    };
    planner.satisfy(action, depth_budget)?;
    Ok(planner.steps)
}

fn plan_sequence(world: &Arc<World>, sequence: &[Command], depth_budget: u32) -> (Plan, Option<PlanFailure>) {
    let mut planner = Planner {
        world,
        sim: GameState::new(Arc::clone(world)),
        steps: Vec::new(),
        failing: (String::new(), String::new()),
    };
    let mut checkpoint = 0;
    for (i, cmd) in sequence.iter().enumerate() {
        if planner.sim.ended() {
            planner.steps.truncate(checkpoint);
            let plan = Plan { steps: planner.steps, dropped_after_end: sequence.len() - i };
            return (plan, None);
        }
        let result = match &cmd.kind {
            CommandKind::Act { verb, object } => match world.action_for(verb, object) {
                Some(action) => {
                    planner.failing = (action.id.clone(), action.command_text());
                    planner.satisfy(action, depth_budget)
                }
                None => {
                    planner.failing = (cmd.to_string(), cmd.to_string());
                    Err(planner.fail(FailureReason::UnknownAction))
                }
            },
            CommandKind::Go(_) => {
                planner.failing = (cmd.to_string(), cmd.to_string());
                Ok(())
            }
            CommandKind::Take(object) => {
                planner.failing = (cmd.to_string(), cmd.to_string());
                planner.achieve(&Condition::AgentColocatedWith { object: object.clone() }, depth_budget)
            }
            CommandKind::Drop(object) => {
                planner.failing = (cmd.to_string(), cmd.to_string());
                planner.achieve(&Condition::AgentHolds { object: object.clone() }, depth_budget)
            }
        };
        if let Err(failure) = result.and_then(|()| planner.push(cmd.clone(), Provenance::Given)) {
            planner.steps.truncate(checkpoint);
            return (Plan { steps: planner.steps, dropped_after_end: 0 }, Some(failure));
        }
        checkpoint = planner.steps.len();
    }
    (Plan { steps: planner.steps, dropped_after_end: 0 }, None)
}

/// Inserts movement and prerequisite steps so every command runs where
/// the agent stands. The plan is simulated from the start state and
/// contains no blocked turn.
pub fn augment_with_navigation(world: &Arc<World>, sequence: &[Command], depth_budget: u32) -> Result<Plan, PlanFailure> {
    match plan_sequence(world, sequence, depth_budget) {
        (plan, None) => Ok(plan),
        (_, Some(failure)) => Err(failure),
    }
}

/// A finished episode: the result, the plan that was executed, and the
/// turn log.
#[derive(Debug, Clone)]
pub struct Episode {
    pub result: EpisodeResult,
    pub plan: Plan,
    pub transcript: Vec<TurnRecord>,
}

/// Plans and runs a sequence. When planning fails, the steps planned for
/// the commands before the failing one are still executed and the failure
/// rides along in the result.
pub fn run_episode(world: &Arc<World>, sequence: &[Command]) -> Episode {
    let (plan, failure) = plan_sequence(world, sequence, DEFAULT_DEPTH_BUDGET);
    let mut state = GameState::new(Arc::clone(world));
    let mut result = run_commands(&mut state, &plan.commands());
    if let Some(failure) = failure {
        result.win = false;
        result.plan_failure = Some(failure);
    }
    Episode { result, plan, transcript: state.log().to_vec() }
}
