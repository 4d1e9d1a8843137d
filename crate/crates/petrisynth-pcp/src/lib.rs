//! Undecidability constructions as concrete Petri games.
//!
//! [`gen_pcp_game`] encodes a Post correspondence instance as a game with
//! good and bad markings played by two system players and one environment
//! player; [`check_pcp_play`] replays a candidate solution on it.
//! [`good_bad_to_good`] turns any game with good and bad markings into one
//! with good markings only, and [`census`] reports structural counts of
//! the results.

pub mod census;
pub mod error;
pub mod gen;
pub mod goodonly;
pub mod instance;
pub mod play;

pub use census::{census, Census};
pub use error::PcpError;
pub use gen::{gen_pcp_game, pattern_families, Check, EnvChoice, Family, Label, PcpPlace, PcpTransition, Pos, Suspect};
pub use goodonly::{expand_bad_markings, good_bad_to_good, good_bad_to_good_with, sample_projections, ProjectionReport, Scheduler};
pub use instance::PcpInstance;
pub use play::{canonical_firing, check_pcp_play, check_pcp_play_with, PlayReport, PlayVerdict};
