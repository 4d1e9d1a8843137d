//! Reduction of Petri games with one environment player and bad markings to
//! Büchi games.
//!
//! Each system player is tracked as a decision tuple: its place, the
//! transitions it currently allows, whether it takes part in a loop that no
//! longer needs the environment, and a tag for the last environment
//! synchronisation it saw. Players record backward moves so the arena can
//! rewind concurrent steps and find bad markings or nondeterminism that a
//! different interleaving would expose. Winning Büchi strategies are
//! translated back into finite Petri-game strategies by [`extract`].

pub mod arena;
pub mod classify;
pub mod ctx;
pub mod error;
pub mod extract;
pub mod rewind;
pub mod successors;
pub mod types;

pub use arena::{
    build_arena, edge_label, explain, rewound_markings, show_state, show_tuple, solve_game, witness, Diagnosis,
    ReducedGame, Solved, Witness, BAD, GOOD,
};
pub use classify::{classify_state, corresponds_to_mcut};
pub use ctx::{Ctx, ReduceOptions};
pub use error::ReduceError;
pub use extract::{extract, ExtractError};
pub use rewind::{redo, rewind, undo, RewindNode};
pub use successors::{expand, initial_state, Expansion};
pub use types::*;
