//! Place/transition nets and Petri games.
//!
//! The crate provides the data model shared by the rest of the workspace:
//! canonical multisets, interned nets with weighted arcs, explicit
//! reachability, marking patterns, winning conditions, the decidable-class
//! check, and the plain-text game format.

pub mod error;
pub mod format;
pub mod game;
pub mod multiset;
pub mod net;
pub mod pattern;
pub mod reach;

pub use error::{GameError, NetError};
pub use format::{parse_game, print_game, ParseError};
pub use game::{
    badplaces_to_badmarkings, check_decidable_class, check_disjoint, classify_marking, ClassReport, MarkingClass,
    PetriGame, PlaceKind, TransitPair, WinningCondition,
};
pub use multiset::Multiset;
pub use net::{FlowEnd, Marking, NetBuilder, Node, PetriNet, PlaceId, TransId, Transition, TransitionSpec};
pub use pattern::{MarkingPattern, Range};
pub use reach::{reachable_from, reachable_markings, ReachGraph};
