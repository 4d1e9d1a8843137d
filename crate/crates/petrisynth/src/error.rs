use petrisynth_net::{GameError, NetError, ParseError};
use petrisynth_pcp::PcpError;
use petrisynth_reduce::ReduceError;
use petrisynth_strategy::StrategyError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const WIN: i32 = 0;
    pub const INTERNAL: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const CAP: i32 = 3;
    pub const LOSE: i32 = 10;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Pcp(#[from] PcpError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Reduce(ReduceError::StateCap(_) | ReduceError::BmCap(_) | ReduceError::RewindCap(_))
            | CliError::Reduce(ReduceError::Game(GameError::Net(NetError::CapExceeded(_))))
            | CliError::Game(GameError::Net(NetError::CapExceeded(_)))
            | CliError::Pcp(PcpError::CapExceeded(_)) => exit::CAP,
            CliError::Reduce(ReduceError::Invariant(_) | ReduceError::Extract(_) | ReduceError::Buchi(_)) => {
                exit::INTERNAL
            }
            _ => exit::INPUT,
        }
    }
}
