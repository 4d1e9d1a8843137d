use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("strategy exploration exceeded {0} markings")]
    CapExceeded(usize),
    #[error("label `{0}` does not exist in the game")]
    UnknownLabel(String),
    #[error("malformed strategy: {0}")]
    Malformed(String),
    #[error(transparent)]
    Net(#[from] petrisynth_net::NetError),
}
