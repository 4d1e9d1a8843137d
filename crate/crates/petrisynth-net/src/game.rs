//! Petri games: nets whose places are split between system and environment,
//! together with a winning condition.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::GameError;
use crate::net::{FlowEnd, Marking, PetriNet, PlaceId, TransId};
use crate::pattern::MarkingPattern;
use crate::reach::{reachable_markings, ReachGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlaceKind {
    System,
    Env,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WinningCondition {
    BadPlaces(BTreeSet<PlaceId>),
    BadMarkings(Vec<MarkingPattern>),
    GoodMarkings(Vec<MarkingPattern>),
    GoodAndBad { good: Vec<MarkingPattern>, bad: Vec<MarkingPattern> },
}

impl WinningCondition {
    pub fn kind_name(&self) -> &'static str {
        match self {
            WinningCondition::BadPlaces(_) => "bad-places",
            WinningCondition::BadMarkings(_) => "bad-markings",
            WinningCondition::GoodMarkings(_) => "good-markings",
            WinningCondition::GoodAndBad { .. } => "good-and-bad",
        }
    }
}

/// Classification of a single marking under the game's winning condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MarkingClass {
    Good,
    Bad,
    Neutral,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PetriGame {
    pub net: PetriNet,
    kinds: Vec<PlaceKind>,
    pub winning: WinningCondition,
}

/// Facts established by [`check_decidable_class`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    /// Maximal number of system tokens in any reachable marking.
    pub max_s: u32,
    pub reachable: usize,
    pub bound: u32,
}

/// One token movement of a transition: `(from, to)`, `None` meaning
/// created (as source) or removed (as target).
pub type TransitPair = (Option<PlaceId>, Option<PlaceId>);

impl PetriGame {
    /// `kinds` is indexed by [`PlaceId`].
    pub fn new(net: PetriNet, kinds: Vec<PlaceKind>, winning: WinningCondition) -> Result<Self, GameError> {
        assert_eq!(kinds.len(), net.num_places(), "one kind per place");
        let game = Self { net, kinds, winning };
        for t in game.net.transition_ids() {
            if let Some(flow) = &game.net.transition(t).flow {
                for (s, d) in flow {
                    if let (FlowEnd::Place(a), FlowEnd::Place(b)) = (s, d) {
                        if game.kind(*a) != game.kind(*b) {
                            return Err(GameError::FlowChangesKind(game.net.transition(t).name.clone()));
                        }
                    }
                }
            }
        }
        Ok(game)
    }

    pub fn kind(&self, p: PlaceId) -> PlaceKind {
        self.kinds[p.idx()]
    }

    pub fn kinds(&self) -> &[PlaceKind] {
        &self.kinds
    }

    pub fn is_system(&self, p: PlaceId) -> bool {
        self.kind(p) == PlaceKind::System
    }

    pub fn is_env(&self, p: PlaceId) -> bool {
        self.kind(p) == PlaceKind::Env
    }

    pub fn system_places(&self) -> impl Iterator<Item = PlaceId> + '_ {
        self.net.places().filter(|&p| self.is_system(p))
    }

    pub fn env_places(&self) -> impl Iterator<Item = PlaceId> + '_ {
        self.net.places().filter(|&p| self.is_env(p))
    }

    pub fn system_tokens(&self, m: &Marking) -> u32 {
        m.iter().filter(|(p, _)| self.is_system(**p)).map(|(_, &c)| c).sum()
    }

    pub fn env_tokens(&self, m: &Marking) -> u32 {
        m.iter().filter(|(p, _)| self.is_env(**p)).map(|(_, &c)| c).sum()
    }

    /// Does the preset of `t` contain an environment place?
    pub fn involves_env(&self, t: TransId) -> bool {
        self.net.pre(t).support().any(|&p| self.is_env(p))
    }

    /// How the tokens of `t` move. Explicit flow annotations are used as
    /// given; otherwise the consumed and produced tokens of each player kind
    /// are paired in ascending place order, surplus consumed tokens are
    /// removed and surplus produced tokens are created.
    pub fn transit_pairs(&self, t: TransId) -> Vec<TransitPair> {
        let tr = self.net.transition(t);
        if let Some(flow) = &tr.flow {
            return flow
                .iter()
                .map(|(s, d)| {
                    let s = match s {
                        FlowEnd::Place(p) => Some(*p),
                        _ => None,
                    };
                    let d = match d {
                        FlowEnd::Place(p) => Some(*p),
                        _ => None,
                    };
                    (s, d)
                })
                .collect();
        }
        let mut out = Vec::new();
        for kind in [PlaceKind::Env, PlaceKind::System] {
            let pre: Vec<PlaceId> = tr.pre.elements().copied().filter(|&p| self.kind(p) == kind).collect();
            let post: Vec<PlaceId> = tr.post.elements().copied().filter(|&p| self.kind(p) == kind).collect();
            for i in 0..pre.len().max(post.len()) {
                out.push((pre.get(i).copied(), post.get(i).copied()));
            }
        }
        out
    }

    pub fn is_bad_marking(&self, m: &Marking) -> bool {
        match &self.winning {
            WinningCondition::BadPlaces(b) => m.support().any(|p| b.contains(p)),
            WinningCondition::BadMarkings(pats) => pats.iter().any(|p| p.matches(m)),
            WinningCondition::GoodMarkings(_) => false,
            WinningCondition::GoodAndBad { good, bad } => {
                bad.iter().any(|p| p.matches(m)) && !good.iter().any(|p| p.matches(m))
            }
        }
    }

    pub fn is_good_marking(&self, m: &Marking) -> bool {
        match &self.winning {
            WinningCondition::GoodMarkings(pats) | WinningCondition::GoodAndBad { good: pats, .. } => {
                pats.iter().any(|p| p.matches(m))
            }
            _ => false,
        }
    }
}

/// Classifies `m`; a marking matching both a good and a bad pattern is an error.
pub fn classify_marking(game: &PetriGame, m: &Marking) -> Result<MarkingClass, GameError> {
    let (good, bad) = match &game.winning {
        WinningCondition::BadPlaces(b) => (false, m.support().any(|p| b.contains(p))),
        WinningCondition::BadMarkings(pats) => (false, pats.iter().any(|p| p.matches(m))),
        WinningCondition::GoodMarkings(pats) => (pats.iter().any(|p| p.matches(m)), false),
        WinningCondition::GoodAndBad { good, bad } => {
            (good.iter().any(|p| p.matches(m)), bad.iter().any(|p| p.matches(m)))
        }
    };
    match (good, bad) {
        (true, true) => Err(GameError::AmbiguousClass(game.net.show_marking(m))),
        (true, false) => Ok(MarkingClass::Good),
        (false, true) => Ok(MarkingClass::Bad),
        (false, false) => Ok(MarkingClass::Neutral),
    }
}

/// Checks the preconditions of the decidable class: `bound`-bounded, exactly
/// one environment token in every reachable marking, and every transition
/// consumes at least one token. Returns `max_S`, the largest number of system
/// tokens in a reachable marking.
pub fn check_decidable_class(game: &PetriGame, bound: u32, cap: usize) -> Result<ClassReport, GameError> {
    for t in game.net.transitions() {
        if t.pre.is_empty() {
            return Err(GameError::EmptyPreset(t.name.clone()));
        }
    }
    let g = reachable_markings(&game.net, bound, cap)?;
    let mut max_s = 0;
    for m in &g.markings {
        if game.env_tokens(m) != 1 {
            return Err(GameError::NotOneEnvPlayer(game.net.show_marking(m)));
        }
        max_s = max_s.max(game.system_tokens(m));
    }
    Ok(ClassReport { max_s, reachable: g.len(), bound })
}

/// Checks that no reachable marking is both good and bad.
pub fn check_disjoint(game: &PetriGame, graph: &ReachGraph) -> Result<(), GameError> {
    for m in &graph.markings {
        classify_marking(game, m)?;
    }
    Ok(())
}

/// Replaces a bad-places condition by the equivalent bad-markings condition:
/// one pattern "at least one token on `p`" per bad place.
pub fn badplaces_to_badmarkings(game: &PetriGame) -> Result<PetriGame, GameError> {
    let WinningCondition::BadPlaces(bad) = &game.winning else {
        return Err(GameError::WrongCondition { expected: "bad-places" });
    };
    let pats = bad.iter().map(|&p| MarkingPattern::at_least(&Marking::singleton(p))).collect();
    Ok(PetriGame { net: game.net.clone(), kinds: game.kinds.clone(), winning: WinningCondition::BadMarkings(pats) })
}
