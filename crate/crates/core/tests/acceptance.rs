//! One line per acceptance criterion, then a single assertion over all of
//! them. Run with `cargo test -p imagiplay --test acceptance -- --nocapture`.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use imagiplay::engine::Outcome;
use imagiplay::llm::{FnBackend, ReplayBackend};
use imagiplay::story::{write_run_artifacts, MappingEntry, Phrase, TranslationRule};
use imagiplay::world::{Direction, ViolationCode};
use imagiplay::{
    assets, augment_with_navigation, new_game, parse_command, parse_worldspec, run_episode, run_pipeline,
    serialize_worldspec, shortest_path, Command, ObjectMapping, Storyteller, Tier, World,
};
use proptest::prelude::*;

/// Wall-clock limit for the two timed criteria.
const TIME_LIMIT: Duration = Duration::from_secs(1);
const TIER_WORLDS: u64 = 200;
const SYNONYM_CASES: u32 = 1000;
const RANDOM_MAPS: u64 = 100;
const MAX_MAP_ROOMS: usize = 8;
const PURITY_STREAMS: u32 = 1000;
const ROUND_TRIP_SPECS: u64 = 500;
const FUZZ_INPUTS: u32 = 10_000;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn commands(world: &World, texts: &[&str]) -> Vec<Command> {
    texts.iter().map(|t| parse_command(t, world).unwrap()).collect()
}

fn housework_scores() -> Check {
    let t = Instant::now();
    let world = assets::housework();
    let short = run_episode(&world, &commands(&world, &["fill kettle", "water plant"]));
    ensure(short.result.cumulative_score == 4, || format!("kettle and plant scored {}", short.result.cumulative_score))?;
    let full = run_episode(&world, &commands(&world, &["wash clothes", "fill kettle", "water plant", "consume bananas"]));
    let last = full.transcript.last().unwrap();
    ensure(last.input == "consume bananas" && last.reward == 5, || format!("last turn {:?}", last))?;
    ensure(full.result.win, || format!("no win: {:?}", full.result))?;
    let elapsed = t.elapsed();
    ensure(elapsed < TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("score 4, final reward 5, win, {} ms", elapsed.as_millis()))
}

fn golden_pipeline() -> Check {
    let t = Instant::now();
    let backend = ReplayBackend::new(load_fixture());
    let teller = Storyteller::llm(&backend);
    let out = run_pipeline(&assets::magical_bedroom(), SETTING, TOPIC, &teller, 3).map_err(|e| e.to_string())?;
    let first = &out.runs[0];
    let phrases: Vec<String> = first.simplified.phrases.iter().map(|p| case_fold(&p.text())).collect();
    let want: Vec<String> = SIMPLIFIED_1.iter().map(|s| case_fold(s)).collect();
    ensure(phrases == want, || format!("phrases {phrases:?}"))?;
    let cmds: Vec<String> = first.sequence.texts().iter().map(|s| case_fold(s)).collect();
    let want: Vec<String> = TRANSLATION_1.iter().map(|s| case_fold(s)).collect();
    ensure(cmds == want, || format!("translation {cmds:?}"))?;
    let second = out.runs.get(1).ok_or("no second iteration")?;
    ensure(second.story.sentences[..6] == first.story.sentences[..6], || "second story diverges early".into())?;
    let elapsed = t.elapsed();
    ensure(elapsed < TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("7 phrases, 7 commands, 6 shared sentences, {} ms", elapsed.as_millis()))
}

fn distillation_anchors() -> Check {
    let world = assets::magical_bedroom();
    let teller = Storyteller::deterministic();
    let pairs = [("nightstand", "Ancient Chest"), ("broom", "Enchanted Staff")];
    let entries =
        pairs.iter().map(|(r, i)| MappingEntry { real: r.to_string(), imaginary: i.to_string(), rationale: String::new() });
    let mapping = ObjectMapping::new(SETTING, entries.collect()).map_err(|e| e.to_string())?;
    let story = imagiplay::story::ImaginaryStory {
        topic: TOPIC.into(),
        sentences: vec!["Uncover ancient chest in hidden passage.".into(), "Open chest to reveal enchanted staff.".into()],
        iteration: 1,
    };
    let s = teller.simplify_story(&world, &story, &mapping).map_err(|e| e.to_string())?;
    let p = &s.phrases[1];
    ensure(p.verb == "reveal" && p.imaginary_object == "Enchanted Staff", || format!("{p:?}"))?;

    // A broom that can only be swept or picked up.
    let mut spec = world.spec().clone();
    spec.actions.retain(|a| a.id != "use_broom");
    let world = Arc::new(World::new(spec).map_err(|v| format!("{v:?}"))?);
    let wand = ObjectMapping::new(
        SETTING,
        vec![MappingEntry { real: "broom".into(), imaginary: "wand".into(), rationale: String::new() }],
    )
    .map_err(|e| e.to_string())?;
    let phrase = Phrase { verb: "cast".into(), imaginary_object: "wand".into(), source_sentence: 0 };
    let rules = teller.translate_phrases(&world, std::slice::from_ref(&phrase), &wand).map_err(|e| e.to_string())?;
    let scripted = FnBackend(scripted_responder);
    let llm = Storyteller::llm(&scripted);
    let similar = llm.translate_phrases(&world, std::slice::from_ref(&phrase), &wand).map_err(|e| e.to_string())?;
    for (seq, rule) in [(&rules, TranslationRule::FirstDeclared), (&similar, TranslationRule::Similarity)] {
        let c = &seq.commands[0];
        ensure(c.command.to_string() == "sweep broom" && c.rule == rule, || format!("{c:?}"))?;
    }
    Ok("reveal Enchanted Staff; cast wand -> sweep broom".into())
}

fn tier_bijection() -> Check {
    let pairs = [(Tier::StandAlone, 2), (Tier::Interactive, 3), (Tier::Win, 5)];
    let mut actions = 0;
    for seed in 0..TIER_WORLDS {
        let world = random_world(&mut rng(seed));
        for a in world.actions() {
            ensure(pairs.contains(&(a.tier, a.score)), || format!("seed {seed}: {} has {:?}/{}", a.id, a.tier, a.score))?;
            actions += 1;
        }
        let mut spec = world.spec().clone();
        let a = &mut spec.actions[0];
        a.score = if a.score == 2 { 3 } else { 2 };
        let refused = World::new(spec).err().is_some_and(|v| v.iter().any(|v| v.code == ViolationCode::ScoreTierMismatch));
        ensure(refused, || format!("seed {seed}: mismatched score accepted"))?;
    }
    Ok(format!("{TIER_WORLDS} worlds, {actions} actions, mismatches refused"))
}

fn synonym_invariance() -> Check {
    let mut runner = runner(SYNONYM_CASES);
    runner
        .run(&(any::<u64>(), 0usize..10), |(seed, prefix)| {
            let mut r = rng(seed);
            let mut spec = random_spec(&mut r);
            if spec.verb_synonyms.is_empty() {
                let verb = spec.actions[0].verb.clone();
                spec.verb_synonyms.insert(verb, vec!["nudge".into()]);
            }
            let world = Arc::new(World::new(spec).unwrap());
            let mut state = new_game(world.clone());
            for _ in 0..prefix {
                let a = &world.actions()[r.random_range(0..world.actions().len())];
                if !state.ended() {
                    let _ = state.step(&Command::act(a.verb.clone(), a.object.clone()));
                }
            }
            prop_assume!(!state.ended());
            let (verb, syns) = world.spec().verb_synonyms.get_index(r.random_range(0..world.spec().verb_synonyms.len())).unwrap();
            let syn = &syns[r.random_range(0..syns.len())];
            let object = world.actions().iter().find(|a| &a.verb == verb).unwrap().object.clone();
            let (mut x, mut y) = (state.clone(), state);
            let a = x.submit(&format!("{verb} {object}")).unwrap();
            let b = y.submit(&format!("{syn} {object}")).unwrap();
            prop_assert!(x.eq_ignoring_log(&y));
            prop_assert_eq!((a.reward, a.outcome), (b.reward, b.outcome));
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("{SYNONYM_CASES} cases"))
}

fn navigation_oracle() -> Check {
    let mut worlds: Vec<World> = vec![(*assets::housework()).clone(), (*assets::magical_bedroom()).clone()];
    for seed in 0..RANDOM_MAPS {
        let mut r = rng(1_000_000 + seed);
        let n = r.random_range(1..=MAX_MAP_ROOMS);
        let (rooms, connections) = random_map(&mut r, n);
        let mut spec = random_spec(&mut r);
        let shift = |id: &str| format!("r{}", id[1..].parse::<usize>().unwrap() % n);
        for o in spec.objects.iter_mut() {
            o.location = shift(&o.location);
        }
        for a in spec.actions.iter_mut() {
            for c in a.preconditions.iter_mut() {
                if let imagiplay::Condition::AgentInRoom { room } = c {
                    *room = shift(room);
                }
            }
        }
        spec.start_room = shift(&spec.start_room);
        spec.rooms = rooms;
        spec.connections = connections;
        worlds.push(World::new(spec).map_err(|v| format!("map {seed}: {v:?}"))?);
    }
    let mut pairs = 0;
    let mut plans = 0;
    for world in &worlds {
        for a in world.rooms() {
            for b in world.rooms() {
                let got = shortest_path(world, &a.id, &b.id).ok();
                let want = oracle_path(world, &a.id, &b.id);
                ensure(got == want, || format!("{}: {} -> {}: {got:?} vs {want:?}", world.name(), a.id, b.id))?;
                pairs += 1;
            }
        }
        // Every leg of a plan made of bare moves is an oracle path.
        let world = Arc::new(world.clone());
        for obj in world.objects() {
            let seq = [Command::take(obj.id.clone())];
            let Ok(plan) = augment_with_navigation(&world, &seq, imagiplay::executor::DEFAULT_DEPTH_BUDGET) else { continue };
            let moves: Vec<Direction> = plan
                .steps
                .iter()
                .map_while(|s| match s.command.kind {
                    imagiplay::engine::CommandKind::Go(d) => Some(d),
                    _ => None,
                })
                .collect();
            let want = oracle_path(&world, world.start_room(), &obj.location).unwrap();
            ensure(moves == want, || format!("{}: plan to {} walks {moves:?}, oracle {want:?}", world.name(), obj.id))?;
            plans += 1;
        }
    }
    Ok(format!("{} worlds, {pairs} room pairs, {plans} plans, 0 mismatches", worlds.len()))
}

fn prerequisite_resolution() -> Check {
    let base = assets::housework();
    for room in base.rooms() {
        let mut spec = base.spec().clone();
        spec.start_room = room.id.clone();
        let world = Arc::new(World::new(spec).unwrap());
        let water = commands(&world, &["water plant"]);
        let plan = augment_with_navigation(&world, &water, imagiplay::executor::DEFAULT_DEPTH_BUDGET)
            .map_err(|f| format!("from {}: {f:?}", room.id))?;
        let texts: Vec<String> = plan.steps.iter().map(|s| s.command.to_string()).collect();
        let at = |t: &str| texts.iter().position(|x| x == t);
        let ordered = matches!((at("take kettle"), at("fill kettle"), at("water plant")), (Some(a), Some(b), Some(c)) if a < b && b < c);
        ensure(ordered, || format!("from {}: {texts:?}", room.id))?;
        let ep = run_episode(&world, &water);
        let kettle = ep.transcript.iter().find(|t| t.input == "fill kettle").map(|t| t.reward);
        ensure(ep.result.failures.is_empty() && kettle == Some(2), || format!("from {}: {:?}", room.id, ep.result))?;
    }
    Ok(format!("{} start rooms", base.rooms().len()))
}

fn engine_purity() -> Check {
    let tally = std::cell::Cell::new(0usize);
    let mut runner = runner(PURITY_STREAMS);
    runner
        .run(&any::<u64>(), |seed| {
            let mut r = rng(seed);
            let world = Arc::new(random_world(&mut r));
            let mut state = new_game(world.clone());
            for _ in 0..30 {
                if state.ended() {
                    break;
                }
                let obj = world.objects()[r.random_range(0..world.objects().len())].id.clone();
                let cmd = match r.random_range(0..4) {
                    0 => Command::go(Direction::ALL[r.random_range(0..4)]),
                    1 => Command::take(obj),
                    2 => Command::drop(obj),
                    _ => {
                        let a = &world.actions()[r.random_range(0..world.actions().len())];
                        Command::act(a.verb.clone(), a.object.clone())
                    }
                };
                let before = state.clone();
                if let Ok(rec) = state.step(&cmd) {
                    if rec.outcome == Outcome::Succeeded {
                        continue;
                    }
                }
                tally.set(tally.get() + 1);
                prop_assert!(state.eq_ignoring_log(&before));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    let blocked = tally.get();
    ensure(blocked > 0, || "no blocked turns generated".into())?;
    Ok(format!("{PURITY_STREAMS} streams, {blocked} blocked turns"))
}

fn dsl_round_trip() -> Check {
    for world in [assets::housework(), assets::magical_bedroom()] {
        let back = parse_worldspec(&serialize_worldspec(world.spec())).map_err(|d| d.to_string())?;
        ensure(back.world.spec() == world.spec(), || format!("{} changed", world.name()))?;
    }
    for seed in 0..ROUND_TRIP_SPECS {
        let spec = random_spec(&mut rng(seed));
        let back = parse_worldspec(&serialize_worldspec(&spec)).map_err(|d| format!("seed {seed}: {d}"))?;
        ensure(back.world.spec() == &spec, || format!("seed {seed} changed"))?;
    }
    let mut runner = runner(FUZZ_INPUTS);
    runner
        .run(&any::<String>(), |text| {
            let _ = parse_worldspec(&text);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("2 bundled + {ROUND_TRIP_SPECS} random specs, {FUZZ_INPUTS} fuzz inputs"))
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
        .collect()
}

fn offline_determinism() -> Check {
    let store = load_fixture();
    let mut runs = Vec::new();
    for _ in 0..2 {
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
        let backend = ReplayBackend::new(store.clone());
        let teller = Storyteller::llm(&backend);
        let out = run_pipeline(&assets::magical_bedroom(), SETTING, TOPIC, &teller, 3).map_err(|e| e.to_string())?;
        write_run_artifacts(&tmp.path().join("replay"), &out).map_err(|e| e.to_string())?;
        let teller = Storyteller::deterministic();
        let out = run_pipeline(&assets::housework(), "magical", "eat the bananas", &teller, 3).map_err(|e| e.to_string())?;
        write_run_artifacts(&tmp.path().join("rules"), &out).map_err(|e| e.to_string())?;
        runs.push((snapshot(&tmp.path().join("replay")), snapshot(&tmp.path().join("rules"))));
    }
    ensure(runs[0] == runs[1], || "artifacts differ between runs".into())?;
    let files = runs[0].0.len() + runs[0].1.len();
    Ok(format!("{files} artifact files byte-identical across two offline runs"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("housework scores", housework_scores),
        ("golden pipeline", golden_pipeline),
        ("distillation anchors", distillation_anchors),
        ("tier bijection", tier_bijection),
        ("synonym invariance", synonym_invariance),
        ("navigation oracle", navigation_oracle),
        ("prerequisite resolution", prerequisite_resolution),
        ("engine purity", engine_purity),
        ("dsl round trip", dsl_round_trip),
        ("offline determinism", offline_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
