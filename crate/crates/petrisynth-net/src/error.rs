use thiserror::Error;

/// Errors raised by net construction, firing and state-space exploration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("duplicate node name `{0}`")]
    DuplicateNode(String),
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("place `{place}` exceeds bound {bound} in reachable marking {marking}")]
    BoundViolated { place: String, bound: u32, marking: String },
    #[error("state-space cap of {0} markings exceeded")]
    CapExceeded(usize),
    #[error("invalid flow annotation on `{transition}`: {reason}")]
    InvalidFlow { transition: String, reason: String },
}

/// Errors specific to Petri games and their winning conditions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("marking {0} matches both a good and a bad pattern")]
    AmbiguousClass(String),
    #[error("reachable marking {0} does not hold exactly one environment token")]
    NotOneEnvPlayer(String),
    #[error("transition `{0}` has an empty preset")]
    EmptyPreset(String),
    #[error("flow of `{0}` moves a token between a system and an environment place")]
    FlowChangesKind(String),
    #[error("winning condition is not `{expected}`")]
    WrongCondition { expected: &'static str },
}
