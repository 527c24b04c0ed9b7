use std::sync::Arc;

use super::*;
use crate::assets;
use crate::engine::{EpisodeResult, FailedTurn, Outcome};
use crate::executor::{FailureReason, PlanFailure};
use crate::world::Condition;

fn magical_mapping() -> ObjectMapping {
    Storyteller::deterministic().map_objects(&assets::magical_bedroom(), "magical").unwrap()
}

#[test]
fn deterministic_mapping_turns_the_broom_into_a_wand() {
    let mapping = magical_mapping();
    assert_eq!(mapping.imaginary_for("broom"), Some("wand"));
    assert_eq!(mapping.real_for("Wand"), Some("broom"));
    assert_eq!(mapping.len(), assets::magical_bedroom().objects().len());
}

#[test]
fn duplicates_get_numbered() {
    let mut entries: Vec<MappingEntry> = ["orb", "Orb", "orb-2", "wand"]
        .iter()
        .enumerate()
        .map(|(i, n)| MappingEntry { real: format!("o{i}"), imaginary: n.to_string(), rationale: String::new() })
        .collect();
    mapping::make_injective(&mut entries);
    let names: Vec<&str> = entries.iter().map(|e| e.imaginary.as_str()).collect();
    assert_eq!(names, vec!["orb", "Orb-2", "orb-2-2", "wand"]);
    assert!(ObjectMapping::new("x", entries).is_ok());
}

#[test]
fn templated_story_for_one_object() {
    let world = assets::magical_bedroom();
    let mapping = ObjectMapping::new(
        "magical",
        vec![MappingEntry { real: "broom".into(), imaginary: "wand".into(), rationale: String::new() }],
    )
    .unwrap();
    let story = Storyteller::deterministic().generate_story(&world, &mapping, "defeat the dragon", None).unwrap();
    assert_eq!(story.text(), "Find the wand. Use the wand to defeat the dragon.");
    assert_eq!(story.iteration, 1);
}

#[test]
fn preconditions() {
    let world = assets::magical_bedroom();
    let teller = Storyteller::deterministic();
    let empty = ObjectMapping::new("magical", vec![]).unwrap();
    assert_eq!(teller.generate_story(&world, &empty, "t", None), Err(StoryError::EmptyMapping));
    let teller = Storyteller::deterministic().with_samples(vec![]);
    assert_eq!(teller.generate_story(&world, &magical_mapping(), "t", None), Err(StoryError::NoTrainingSamples));
    let short = ImaginaryStory { topic: "t".into(), sentences: vec!["Find the wand.".into()], iteration: 1 };
    assert_eq!(
        teller.continue_story(&world, &short, &magical_mapping(), None),
        Err(StoryError::StoryTooShort { needed: 2, got: 1 })
    );
}

#[test]
fn constraint_counts_new_objects_per_sentence() {
    let mapping = magical_mapping();
    let story = |s: &[&str]| ImaginaryStory { topic: "t".into(), sentences: s.iter().map(|x| x.to_string()).collect(), iteration: 1 };
    assert_eq!(validate_story_constraint(&story(&["Take the wand and the magic mirror."]), &mapping), Err(vec![0]));
    assert_eq!(validate_story_constraint(&story(&["Take the wand.", "Wave the wand at the mirror."]), &mapping), Ok(()));
    assert_eq!(validate_story_constraint(&story(&["Nothing here.", "Still nothing."]), &mapping), Ok(()));
}

#[test]
fn feedback_names_the_failure() {
    let lost = |plan_failure, failures| EpisodeResult { cumulative_score: 2, last_reward: 2, win: false, failures, plan_failure };
    let unreachable = lost(
        Some(PlanFailure {
            failing_action: "water_plant".into(),
            action_text: "water plant".into(),
            reason: FailureReason::UnreachableRoom { room: "patio".into() },
        }),
        vec![],
    );
    let text = feedback_augmentation(&unreachable).unwrap();
    assert!(text.contains("water plant") && text.contains("direction"), "{text}");
    assert_eq!(text, feedback_augmentation(&unreachable.clone()).unwrap());

    let blocked = lost(
        None,
        vec![FailedTurn {
            turn: 3,
            input: "water plant".into(),
            outcome: Outcome::Blocked(vec![Condition::ObjectState {
                object: "kettle".into(),
                var: "filled".into(),
                value: "true".into(),
            }]),
        }],
    );
    assert!(feedback_augmentation(&blocked).unwrap().contains("kettle"));

    let won = EpisodeResult { win: true, ..lost(None, vec![]) };
    assert_eq!(feedback_augmentation(&won), Err(StoryError::FeedbackOnWin));
}

#[test]
fn deterministic_pipeline_single_iteration() {
    let world = assets::magical_bedroom();
    let teller = Storyteller::deterministic();
    let out = run_pipeline(&world, "magical", "save the princess", &teller, 1).unwrap();
    assert_eq!(out.runs.len(), 1);
    assert!(!out.won());
    assert!(out.runs[0].feedback.is_some());
    assert!(matches!(
        run_pipeline(&Arc::clone(&world), "magical", "t", &teller, 0),
        Err(PipelineError { iteration: 0, source: StoryError::InvalidIterations })
    ));
}
