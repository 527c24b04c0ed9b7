use super::StoryError;
use crate::engine::{EpisodeResult, Outcome};
use crate::executor::FailureReason;
use crate::world::Condition;

fn describe(cond: &Condition) -> String {
    match cond {
        Condition::AgentInRoom { room } => format!("the agent has to be in the {room}"),
        Condition::AgentHolds { object } => format!("the agent has to hold the {object}"),
        Condition::ObjectState { object, var, value } => format!("the {object} has to have {var} = {value}"),
        Condition::AgentColocatedWith { object } => format!("the agent has to be next to the {object}"),
    }
}

fn failure_sentence(result: &EpisodeResult) -> String {
    if let Some(f) = &result.plan_failure {
        let why = match &f.reason {
            FailureReason::UnreachableRoom { room } => format!("the room {room} cannot be reached from where the agent is"),
            FailureReason::UnsatisfiableCondition { condition } => {
                format!("{} and nothing the agent can do makes that true", describe(condition))
            }
            FailureReason::DepthExceeded { condition } => {
                format!("{} and getting there takes too many preparation steps", describe(condition))
            }
            FailureReason::NoExit { direction } => format!("there is no exit to the {}", direction.as_str()),
            FailureReason::UnknownAction => "the game has no such action".to_string(),
        };
        return format!("The action \"{}\" failed because {why}.", f.action_text);
    }
    match result.failures.first() {
        Some(turn) => match &turn.outcome {
            Outcome::Blocked(conds) if !conds.is_empty() => {
                let why: Vec<String> = conds.iter().map(describe).collect();
                format!("The action \"{}\" was blocked because {}.", turn.input, why.join(" and "))
            }
            Outcome::Blocked(_) => format!("The action \"{}\" was blocked.", turn.input),
            _ => format!("The action \"{}\" is not understood by the game.", turn.input),
        },
        None => "Every action worked, but the sequence did not end with the win action.".to_string(),
    }
}

/// Text appended to the next story prompt after a lost episode.
pub fn feedback_augmentation(result: &EpisodeResult) -> Result<String, StoryError> {
    if result.win {
        return Err(StoryError::FeedbackOnWin);
    }
    Ok(format!(
        "The agent finished with {} points and the last action gave {} points, so the win state was not reached. {} \
         In the new sentences, include directional information: say which room each object is in and which direction \
         the hero walks to reach it.",
        result.cumulative_score,
        result.last_reward,
        failure_sentence(result)
    ))
}
