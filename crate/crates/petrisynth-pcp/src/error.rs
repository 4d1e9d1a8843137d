use petrisynth_net::{GameError, NetError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PcpError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("the index sequence is empty")]
    EmptySequence,
    #[error("index {0} is out of range")]
    NoSuchIndex(usize),
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("expected a good-and-bad game, found `{0}`")]
    WrongCondition(&'static str),
    #[error("more than {0} reachable markings")]
    CapExceeded(usize),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Net(#[from] NetError),
}
