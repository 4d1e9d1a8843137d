use petrisynth_buchi::BuchiError;
use petrisynth_net::GameError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Buchi(#[from] BuchiError),
    #[error("winning condition `{0}` is not supported by the reduction (only bad places / bad markings)")]
    Unsupported(&'static str),
    #[error("{0} simultaneous system players exceed the supported 255")]
    TooManyPlayers(u32),
    #[error("place `{0}` has more than 63 outgoing transitions")]
    TooManyChoices(String),
    #[error("arena exceeded {0} states")]
    StateCap(usize),
    #[error("a backward-move sequence exceeded length {0}")]
    BmCap(usize),
    #[error("rewinding a state visited more than {0} decision markings")]
    RewindCap(usize),
    #[error("internal invariant broken: {0}")]
    Invariant(String),
    #[error("strategy extraction failed: {0}")]
    Extract(String),
}
