//! Decision tuples, arena states and backward moves.

use std::fmt;

use petrisynth_net::{Marking, PlaceId, TransId};
use serde::Serialize;

/// Status of a player with respect to a non-environment-synchronising loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Nes {
    False,
    True,
    End,
}

/// The transitions a player currently allows: undecided (`Top`) or a subset
/// of the postset of its place, as a bitmask over that postset in ascending
/// transition order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Decision {
    Top,
    Set(u64),
}

/// One player: identifier (0 for the environment), place, loop status,
/// decision, and last-mcut counter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DTuple {
    pub id: u8,
    pub place: PlaceId,
    pub nes: Nes,
    pub dec: Decision,
    pub lmc: u8,
}

/// A decision marking: tuples sorted by id (ids are unique).
pub type DecisionMarking = Vec<DTuple>;

pub fn marking_of<'a>(dm: impl IntoIterator<Item = &'a DTuple>) -> Marking {
    dm.into_iter().map(|d| d.place).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MoveKind {
    Transition(TransId),
    /// Status change of players that did not take part in the transition.
    NesBoundary,
}

/// A backward move: replacing `post` by `pre` undoes one step. `owners` are
/// the player ids whose backward-move sequences record this move; it may only
/// be undone when it is the last entry of every owner's sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BackMove {
    pub kind: MoveKind,
    pub pre: Vec<DTuple>,
    pub post: Vec<DTuple>,
    pub owners: Vec<u8>,
}

/// A game state of the arena (other than the two sink states).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pub dm: DecisionMarking,
    /// Marking of the looping players when the current loop started; empty
    /// outside loops.
    pub mt2: Marking,
    /// Backward-move sequence per system id (index `id - 1`), as indices into
    /// the move table.
    pub bm: Vec<Vec<u32>>,
}

impl State {
    pub fn has_top(&self) -> bool {
        self.dm.iter().any(|d| d.dec == Decision::Top)
    }

    pub fn has_true(&self) -> bool {
        self.dm.iter().any(|d| d.nes == Nes::True)
    }

    pub fn has_end(&self) -> bool {
        self.dm.iter().any(|d| d.nes == Nes::End)
    }

    pub fn marking(&self) -> Marking {
        marking_of(&self.dm)
    }

    pub fn tuple(&self, id: u8) -> Option<&DTuple> {
        self.dm.iter().find(|d| d.id == id)
    }
}

/// Node of the reduced game.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    State(State),
    /// Sink reached by a finished, good play (accepting).
    Good,
    /// Sink reached by a losing play (rejecting).
    Bad,
}

/// Losing and terminal conditions of a state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Flags {
    pub term: bool,
    pub dl: bool,
    pub ndet: bool,
    pub bad: bool,
    pub dl_t2: bool,
    pub sync_t2: bool,
    pub van_t2: bool,
    pub ur: bool,
}

impl Flags {
    pub fn losing(&self) -> bool {
        (self.dl && !self.term) || self.ndet || self.bad || self.dl_t2 || self.sync_t2 || self.van_t2 || self.ur
    }

    pub fn names(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        let all = [
            (self.term, "TERM"),
            (self.dl, "DL"),
            (self.ndet, "NDET"),
            (self.bad, "BAD"),
            (self.dl_t2, "DL_t2"),
            (self.sync_t2, "SYNC_t2"),
            (self.van_t2, "VAN_t2"),
            (self.ur, "UR"),
        ];
        for (on, name) in all {
            if on {
                v.push(name);
            }
        }
        v
    }
}

impl fmt::Display for Flags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.names();
        if n.is_empty() {
            write!(f, "-")
        } else {
            write!(f, "{}", n.join(","))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum EdgeKind {
    Top,
    Sys(TransId),
    Mcut(TransId),
    NesFire(TransId),
    NesFinish(TransId),
    NesBad(TransId),
    StopGood,
    StopBad,
    Loop,
}

impl EdgeKind {
    pub fn transition(&self) -> Option<TransId> {
        match *self {
            EdgeKind::Sys(t) | EdgeKind::Mcut(t) | EdgeKind::NesFire(t) | EdgeKind::NesFinish(t) | EdgeKind::NesBad(t) => {
                Some(t)
            }
            _ => None,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            EdgeKind::Top => "TOP",
            EdgeKind::Sys(_) => "SYS",
            EdgeKind::Mcut(_) => "MCUT",
            EdgeKind::NesFire(_) => "NES_fire",
            EdgeKind::NesFinish(_) => "NES_finish",
            EdgeKind::NesBad(_) => "NES_bad",
            EdgeKind::StopGood => "STOP_B",
            EdgeKind::StopBad => "STOP_N",
            EdgeKind::Loop => "LOOP",
        }
    }
}

/// A fired transition instance: consumed player ids and produced
/// `(id, place)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Firing {
    pub pre_ids: Vec<u8>,
    pub post: Vec<(u8, PlaceId)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeInfo {
    pub kind: EdgeKind,
    pub firing: Option<Firing>,
}
