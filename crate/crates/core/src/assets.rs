//! Files bundled into the library: worlds, prompt templates, training
//! samples, lexicons and replay fixtures.

use std::sync::Arc;

use crate::dsl::parse_worldspec_named;
use crate::world::World;

pub const HOUSEWORK_WORLD: &str = include_str!("../assets/worlds/housework.world");
pub const MAGICAL_BEDROOM_WORLD: &str = include_str!("../assets/worlds/magical_bedroom.world");

/// `(file name, source)` of every bundled world.
pub const WORLDS: [(&str, &str); 2] =
    [("housework.world", HOUSEWORK_WORLD), ("magical_bedroom.world", MAGICAL_BEDROOM_WORLD)];

fn load(name: &str, source: &str) -> Arc<World> {
    let parsed = parse_worldspec_named(source, name).unwrap_or_else(|d| panic!("bundled world {name} is invalid:\n{d}"));
    Arc::new(parsed.world)
}

pub fn housework() -> Arc<World> {
    load("housework.world", HOUSEWORK_WORLD)
}

pub fn magical_bedroom() -> Arc<World> {
    load("magical_bedroom.world", MAGICAL_BEDROOM_WORLD)
}
