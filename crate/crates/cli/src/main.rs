use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use imagiplay::engine::write_transcript;
use imagiplay::llm::{FixtureStore, LiveClient, LiveConfig, RecordingBackend, ReplayBackend};
use imagiplay::story::{write_run_artifacts, PipelineOutcome, PromptSet, StoryBackend};
use imagiplay::{new_game, parse_command, run_episode, StoryError, Storyteller, World};

/// Text-adventure worlds and the story-to-action pipeline.
#[derive(Parser)]
#[command(name = "imagiplay", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a world file and print its diagnostics.
    Validate { world: PathBuf },
    /// Play a world in the terminal. `quit` ends the session.
    Play {
        world: PathBuf,
        /// Where the JSON-lines transcript goes on exit.
        #[arg(long, default_value = "transcript.jsonl")]
        transcript: PathBuf,
    },
    /// Plan and execute a sequence file (one command per line, `#` comments)
    /// and print the episode result as JSON.
    Run {
        world: PathBuf,
        sequence: PathBuf,
        /// Also print the augmented plan with the origin of every step.
        #[arg(long)]
        explain: bool,
    },
    /// Write stories for a world, play them and iterate on the score.
    Pipeline {
        world: PathBuf,
        #[arg(long, default_value = "magical")]
        setting: String,
        #[arg(long)]
        topic: String,
        #[arg(long, value_enum, default_value_t = Backend::Deterministic)]
        backend: Backend,
        /// Fixture file read by `replay` and written by `record`.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long, default_value_t = imagiplay::story::DEFAULT_MAX_ITERATIONS)]
        max_iter: usize,
        /// Run directory for the artifacts.
        #[arg(long, default_value = "run")]
        out: PathBuf,
        /// Directory with prompt template overrides.
        #[arg(long)]
        prompts: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Backend {
    Deterministic,
    Replay,
    Record,
    Live,
}

enum Failure {
    /// Validation errors, lost episodes, exhausted pipelines.
    Domain(String),
    Usage(anyhow::Error),
    Backend(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.into())
    }
}

type Status = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match cli.command {
        Cmd::Validate { world } => validate(&world),
        Cmd::Play { world, transcript } => play(&world, &transcript),
        Cmd::Run { world, sequence, explain } => run(&world, &sequence, explain),
        Cmd::Pipeline { world, setting, topic, backend, fixtures, max_iter, out, prompts } => {
            pipeline(&world, &setting, &topic, backend, fixtures.as_deref(), max_iter, &out, prompts.as_deref())
        }
    };
    match status {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            if !msg.is_empty() {
                eprintln!("{msg}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Backend(msg)) => {
            eprintln!("backend error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load_world(path: &Path) -> Result<Arc<World>, Failure> {
    let source = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let name = path.display().to_string();
    match imagiplay::dsl::parse_worldspec_named(&source, &name) {
        Ok(parsed) => {
            for w in &parsed.warnings {
                eprintln!("{w}");
            }
            Ok(Arc::new(parsed.world))
        }
        Err(diags) => Err(Failure::Domain(diags.to_string())),
    }
}

fn validate(path: &Path) -> Status {
    let world = load_world(path)?;
    println!(
        "{}: {} rooms, {} objects, {} actions",
        world.name(),
        world.rooms().len(),
        world.objects().len(),
        world.actions().len()
    );
    Ok(())
}

fn play(path: &Path, transcript: &Path) -> Status {
    let world = load_world(path)?;
    let mut state = new_game(world);
    let stdin = io::stdin();
    let mut out = io::stdout().lock();
    writeln!(out, "{}", state.describe_room())?;
    for line in stdin.lock().lines() {
        let line = line?;
        let input = line.trim();
        if input.is_empty() {
            continue;
        }
        if input == "quit" {
            break;
        }
        if input == "look" {
            writeln!(out, "{}", state.describe_room())?;
            continue;
        }
        let before = state.agent_room().to_string();
        let rec = state.submit(input).map_err(|e| Failure::Usage(e.into()))?;
        writeln!(out, "{}", rec.narration)?;
        writeln!(out, "[{}] reward {}, score {}", rec.outcome.as_str(), rec.reward, rec.score)?;
        if state.ended() {
            break;
        }
        if state.agent_room() != before {
            writeln!(out, "{}", state.describe_room())?;
        }
        out.flush()?;
    }
    let result = imagiplay::EpisodeResult::from_state(&state);
    writeln!(out, "final score {}{}", result.cumulative_score, if result.win { ", you won" } else { "" })?;
    let file = fs::File::create(transcript).with_context(|| format!("writing {}", transcript.display()))?;
    write_transcript(io::BufWriter::new(file), state.log())?;
    Ok(())
}

fn run(world_path: &Path, sequence: &Path, explain: bool) -> Status {
    let world = load_world(world_path)?;
    let text = fs::read_to_string(sequence).with_context(|| format!("reading {}", sequence.display()))?;
    let mut commands = Vec::new();
    let mut bad = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match parse_command(line, &world) {
            Ok(c) => commands.push(c),
            Err(e) => bad.push(format!("{}:{}: {e}", sequence.display(), i + 1)),
        }
    }
    if !bad.is_empty() {
        return Err(Failure::Domain(bad.join("\n")));
    }
    let episode = run_episode(&world, &commands);
    let json = if explain {
        serde_json::json!({ "plan": episode.plan, "result": episode.result })
    } else {
        serde_json::to_value(&episode.result).context("encoding result")?
    };
    println!("{}", serde_json::to_string_pretty(&json).context("encoding result")?);
    if episode.result.win {
        Ok(())
    } else {
        Err(Failure::Domain(String::new()))
    }
}

#[allow(clippy::too_many_arguments)]
fn pipeline(
    world_path: &Path,
    setting: &str,
    topic: &str,
    backend: Backend,
    fixtures: Option<&Path>,
    max_iter: usize,
    out: &Path,
    prompts: Option<&Path>,
) -> Status {
    let world = load_world(world_path)?;
    let prompts = match prompts {
        Some(dir) => PromptSet::from_dir(dir).with_context(|| format!("reading prompts from {}", dir.display()))?,
        None => PromptSet::bundled(),
    };
    let need_fixtures = || {
        fixtures.ok_or_else(|| Failure::Usage(anyhow::anyhow!("--fixtures is required for this backend")))
    };
    let outcome = match backend {
        Backend::Deterministic => drive(&world, setting, topic, StoryBackend::Deterministic, prompts, max_iter),
        Backend::Replay => {
            let path = need_fixtures()?;
            let store = FixtureStore::load(path).with_context(|| format!("reading {}", path.display()))?;
            let replay = ReplayBackend::new(store);
            drive(&world, setting, topic, StoryBackend::Llm(&replay), prompts, max_iter)
        }
        Backend::Record => {
            let path = need_fixtures()?;
            let store = if path.exists() {
                FixtureStore::load(path).with_context(|| format!("reading {}", path.display()))?
            } else {
                FixtureStore::new()
            };
            let recorder = RecordingBackend::with_store(live_client()?, store);
            let outcome = drive(&world, setting, topic, StoryBackend::Llm(&recorder), prompts, max_iter);
            recorder.snapshot().save(path).with_context(|| format!("writing {}", path.display()))?;
            outcome
        }
        Backend::Live => {
            let client = live_client()?;
            drive(&world, setting, topic, StoryBackend::Llm(&client), prompts, max_iter)
        }
    }?;
    write_run_artifacts(out, &outcome).with_context(|| format!("writing artifacts to {}", out.display()))?;
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "iteration\tsentences\tphrases\tscore\twin")?;
    for run in &outcome.runs {
        writeln!(
            stdout,
            "{}\t{}\t{}\t{}\t{}",
            run.iteration,
            run.story.sentences.len(),
            run.simplified.phrases.len(),
            run.result.cumulative_score,
            run.result.win
        )?;
    }
    if outcome.won() {
        Ok(())
    } else {
        Err(Failure::Domain(format!("no win after {} iterations", outcome.runs.len())))
    }
}

fn live_client() -> Result<LiveClient, Failure> {
    let config = LiveConfig::from_env();
    if config.api_key.is_none() {
        return Err(Failure::Usage(anyhow::anyhow!(
            "set {} to use a live model",
            imagiplay::llm::ENV_API_KEY
        )));
    }
    Ok(LiveClient::new(config))
}

fn drive(
    world: &Arc<World>,
    setting: &str,
    topic: &str,
    backend: StoryBackend<'_>,
    prompts: PromptSet,
    max_iter: usize,
) -> Result<PipelineOutcome, Failure> {
    let teller = Storyteller::new(backend).with_prompts(prompts);
    imagiplay::story::run_pipeline(world, setting, topic, &teller, max_iter).map_err(|e| match e.source {
        StoryError::Backend(_) => Failure::Backend(e.to_string()),
        StoryError::InvalidIterations => Failure::Usage(anyhow::anyhow!("--max-iter must be at least 1")),
        _ => Failure::Domain(e.to_string()),
    })
}
