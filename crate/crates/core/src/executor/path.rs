use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::world::{Direction, World};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("room `{to}` cannot be reached from `{from}`")]
pub struct Unreachable {
    pub from: String,
    pub to: String,
}

/// Breadth-first shortest path. Among equally short paths the one whose
/// direction names are lexicographically smallest wins.
///
/// Neighbours are expanded in direction-name order, so each room is first
/// reached along its lexicographically smallest shortest path.
pub fn shortest_path(world: &World, from: &str, to: &str) -> Result<Vec<Direction>, Unreachable> {
    let unreachable = || Unreachable { from: from.to_string(), to: to.to_string() };
    if world.room(from).is_none() || world.room(to).is_none() {
        return Err(unreachable());
    }
    if from == to {
        return Ok(Vec::new());
    }
    let mut parent: HashMap<&str, (&str, Direction)> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    while let Some(room) = queue.pop_front() {
        for (dir, next) in world.exits(room) {
            if next == from || parent.contains_key(next) {
                continue;
            }
            parent.insert(next, (room, dir));
            if next == to {
                let mut path = Vec::new();
                let mut cur = to;
                while let Some(&(prev, d)) = parent.get(cur) {
                    path.push(d);
                    cur = prev;
                }
                path.reverse();
                return Ok(path);
            }
            queue.push_back(next);
        }
    }
    Err(unreachable())
}
