//! Structural counts of a game, grouped by name prefix.
//!
//! The prefix of a node is its name up to the first `.` (the whole name if
//! there is none), which separates the players of generated PCP games and
//! the added nodes of translated games.

use std::collections::BTreeMap;

use petrisynth_net::{PetriGame, WinningCondition};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Census {
    pub places: usize,
    pub system_places: usize,
    pub env_places: usize,
    pub transitions: usize,
    /// Place/transition pairs connected by an arc, either direction.
    pub arcs: usize,
    pub initial_tokens: u64,
    pub condition: &'static str,
    pub good_patterns: usize,
    pub bad_patterns: usize,
    pub place_groups: BTreeMap<String, usize>,
    pub transition_groups: BTreeMap<String, usize>,
}

fn prefix(name: &str) -> String {
    name.split('.').next().unwrap_or(name).to_string()
}

pub fn census(game: &PetriGame) -> Census {
    let net = &game.net;
    let mut place_groups = BTreeMap::new();
    for p in net.places() {
        *place_groups.entry(prefix(net.place_name(p))).or_default() += 1;
    }
    let mut transition_groups = BTreeMap::new();
    let mut arcs = 0;
    for t in net.transitions() {
        *transition_groups.entry(prefix(&t.name)).or_default() += 1;
        arcs += t.pre.support().count() + t.post.support().count();
    }
    let (good_patterns, bad_patterns) = match &game.winning {
        WinningCondition::BadPlaces(b) => (0, b.len()),
        WinningCondition::BadMarkings(b) => (0, b.len()),
        WinningCondition::GoodMarkings(g) => (g.len(), 0),
        WinningCondition::GoodAndBad { good, bad } => (good.len(), bad.len()),
    };
    Census {
        places: net.num_places(),
        system_places: game.system_places().count(),
        env_places: game.env_places().count(),
        transitions: net.num_transitions(),
        arcs,
        initial_tokens: net.initial().total(),
        condition: game.winning.kind_name(),
        good_patterns,
        bad_patterns,
        place_groups,
        transition_groups,
    }
}
