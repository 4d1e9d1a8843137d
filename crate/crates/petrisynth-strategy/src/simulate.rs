//! Replaying firing sequences on a game.

use petrisynth_net::{Marking, MarkingClass, PetriGame};
use serde::Serialize;

use crate::error::StrategyError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Play {
    /// Markings before the first and after every step.
    pub markings: Vec<Marking>,
    /// Index into `markings` of the first bad marking, if any.
    pub first_bad: Option<usize>,
    /// Index into `markings` of the first good marking, if any.
    pub first_good: Option<usize>,
    /// No transition is enabled at the end.
    pub maximal: bool,
}

/// Fires `names` from the initial marking, recording the trace and where it
/// first meets a good or bad marking.
pub fn simulate_play(game: &PetriGame, names: &[&str]) -> Result<Play, StrategyError> {
    let mut cur = game.net.initial().clone();
    let mut markings = vec![cur.clone()];
    for n in names {
        cur = game.net.fire_sequence(&cur, &[n])?;
        markings.push(cur.clone());
    }
    let class = |m: &Marking| petrisynth_net::classify_marking(game, m).ok();
    let first_bad = markings.iter().position(|m| class(m) == Some(MarkingClass::Bad));
    let first_good = markings.iter().position(|m| class(m) == Some(MarkingClass::Good));
    let maximal = game.net.is_final(&cur);
    Ok(Play { markings, first_bad, first_good, maximal })
}
