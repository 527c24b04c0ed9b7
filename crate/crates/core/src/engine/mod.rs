//! Episode execution: command parsing, precondition checks, effects,
//! scoring and win detection.

mod command;
mod state;
mod transcript;

pub use command::{parse_command, Command, CommandError, CommandKind};
pub use state::{
    new_game, requirements, run_commands, EpisodeResult, FailedTurn, GameState, Location, Outcome, StepError,
    TurnRecord,
};
pub use transcript::{read_transcript, transcript_line, write_transcript, TranscriptLine};
