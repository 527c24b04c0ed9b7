//! JSON-lines transcript export: one object per turn with the fields
//! `turn`, `input`, `outcome`, `reward`, `score`, `narration`, plus
//! `blocked_by` on blocked turns.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use super::state::{Outcome, TurnRecord};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptLine {
    pub turn: usize,
    pub input: String,
    pub outcome: String,
    pub reward: u32,
    pub score: u32,
    pub narration: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocked_by: Option<Vec<String>>,
}

pub fn transcript_line(record: &TurnRecord) -> TranscriptLine {
    TranscriptLine {
        turn: record.turn,
        input: record.input.clone(),
        outcome: record.outcome.as_str().to_string(),
        reward: record.reward,
        score: record.score,
        narration: record.narration.clone(),
        blocked_by: match &record.outcome {
            Outcome::Blocked(conds) => Some(conds.iter().map(ToString::to_string).collect()),
            _ => None,
        },
    }
}

pub fn write_transcript<W: Write>(mut out: W, records: &[TurnRecord]) -> io::Result<()> {
    for record in records {
        serde_json::to_writer(&mut out, &transcript_line(record))?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_transcript<R: BufRead>(input: R) -> io::Result<Vec<TranscriptLine>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?);
    }
    Ok(out)
}
