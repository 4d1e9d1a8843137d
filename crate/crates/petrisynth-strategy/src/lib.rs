//! Strategies for Petri games as labelled nets.
//!
//! A strategy is a branching process of the game: a labelled occurrence net
//! where each system place's postset is the set of transitions the player
//! allows. Finite strategies for infinite behaviour fold the branching process
//! back onto itself with loop-back arcs. This crate validates both forms
//! (determinism, justified refusal, deadlock avoidance, winning for bad
//! markings) by exploring the strategy's own reachable markings.

pub mod error;
pub mod net;
pub mod simulate;
pub mod unroll;
pub mod validate;

pub use error::StrategyError;
pub use net::{SMarking, SPlace, STrans, StrategyFile, StrategyNet};
pub use simulate::{simulate_play, Play};
pub use unroll::unroll;
pub use validate::{
    all_violations, check_deadlock_avoiding, check_deterministic, check_justified_refusal, check_labels, check_safe,
    check_winning_bad_markings, validate_branching_process, Violation,
};
