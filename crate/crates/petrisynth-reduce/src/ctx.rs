//! Per-game lookup tables and the move table shared by the reduction.

use std::collections::HashMap;

use itertools::Itertools;
use petrisynth_net::{PetriGame, PlaceId, TransId, TransitPair};

use crate::error::ReduceError;
use crate::types::{BackMove, DTuple, Decision, Nes};

/// Caps on the explored state space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReduceOptions {
    /// Token bound used for the decidable-class check.
    pub bound: u32,
    /// Reachable markings explored by the class check.
    pub max_markings: usize,
    /// Arena states.
    pub max_states: usize,
    /// Length of any backward-move sequence.
    pub max_bm: usize,
    /// Decision markings visited while rewinding a single state.
    pub max_rewind: usize,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        Self { bound: 16, max_markings: 1_000_000, max_states: 5_000_000, max_bm: 10_000, max_rewind: 1_000_000 }
    }
}

pub struct Ctx<'g> {
    pub game: &'g PetriGame,
    pub max_s: u8,
    pub opts: ReduceOptions,
    /// Postset of every place, ascending.
    post_of: Vec<Vec<TransId>>,
    transit: Vec<Vec<TransitPair>>,
    sys_only: Vec<bool>,
    pre: Vec<Vec<(PlaceId, u32)>>,
    pub moves: Vec<BackMove>,
    move_index: HashMap<BackMove, u32>,
}

impl<'g> Ctx<'g> {
    pub fn new(game: &'g PetriGame, max_s: u32, opts: ReduceOptions) -> Result<Self, ReduceError> {
        let max_s = u8::try_from(max_s).map_err(|_| ReduceError::TooManyPlayers(max_s))?;
        let net = &game.net;
        let mut post_of = Vec::new();
        for p in net.places() {
            let post = net.place_postset(p).to_vec();
            if post.len() > 63 {
                return Err(ReduceError::TooManyChoices(net.place_name(p).to_string()));
            }
            post_of.push(post);
        }
        let transit = net.transition_ids().map(|t| game.transit_pairs(t)).collect();
        let sys_only = net.transition_ids().map(|t| !game.involves_env(t)).collect();
        let pre = net.transition_ids().map(|t| net.pre(t).iter().map(|(&p, &c)| (p, c)).collect()).collect();
        Ok(Self {
            game,
            max_s,
            opts,
            post_of,
            transit,
            sys_only,
            pre,
            moves: Vec::new(),
            move_index: HashMap::new(),
        })
    }

    pub fn postset(&self, p: PlaceId) -> &[TransId] {
        &self.post_of[p.idx()]
    }

    pub fn full_mask(&self, p: PlaceId) -> u64 {
        (1u64 << self.post_of[p.idx()].len()) - 1
    }

    pub fn pre(&self, t: TransId) -> &[(PlaceId, u32)] {
        &self.pre[t.idx()]
    }

    pub fn transit(&self, t: TransId) -> &[TransitPair] {
        &self.transit[t.idx()]
    }

    pub fn sys_only(&self, t: TransId) -> bool {
        self.sys_only[t.idx()]
    }

    pub fn is_env(&self, p: PlaceId) -> bool {
        self.game.is_env(p)
    }

    /// Does the player allow `t` (and take part in decisions at all)?
    pub fn allows(&self, d: &DTuple, t: TransId) -> bool {
        if d.nes == Nes::End {
            return false;
        }
        match d.dec {
            Decision::Top => false,
            Decision::Set(mask) => match self.post_of[d.place.idx()].binary_search(&t) {
                Ok(bit) => mask >> bit & 1 == 1,
                Err(_) => false,
            },
        }
    }

    /// Allowed transitions of a decided tuple, ascending.
    pub fn allowed(&self, d: &DTuple) -> Vec<TransId> {
        match d.dec {
            Decision::Top => Vec::new(),
            Decision::Set(mask) => self.post_of[d.place.idx()]
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &t)| t)
                .collect(),
        }
    }

    pub fn env_tuple(&self, p: PlaceId) -> DTuple {
        DTuple { id: 0, place: p, nes: Nes::False, dec: Decision::Set(self.full_mask(p)), lmc: 0 }
    }

    /// Is `t` enabled using only tuples that allow it and satisfy `pred`?
    pub fn enabled_allowed(&self, dm: &[DTuple], t: TransId, pred: impl Fn(&DTuple) -> bool) -> bool {
        self.pre(t).iter().all(|&(q, w)| {
            dm.iter().filter(|d| d.place == q && pred(d) && self.allows(d, t)).count() >= w as usize
        })
    }

    /// All ways of choosing concrete tuples (as sorted indices into `dm`)
    /// that allow `t`, satisfy `pred`, and together carry exactly `pre(t)`.
    pub fn instances(&self, dm: &[DTuple], t: TransId, pred: impl Fn(&DTuple) -> bool) -> Vec<Vec<usize>> {
        let mut groups = Vec::new();
        for &(q, w) in self.pre(t) {
            let cands: Vec<usize> =
                (0..dm.len()).filter(|&i| dm[i].place == q && pred(&dm[i]) && self.allows(&dm[i], t)).collect();
            if cands.len() < w as usize {
                return Vec::new();
            }
            groups.push(cands.into_iter().combinations(w as usize).collect::<Vec<_>>());
        }
        groups
            .into_iter()
            .multi_cartesian_product()
            .map(|parts| parts.into_iter().flatten().sorted().collect())
            .collect()
    }

    /// Is `pre(t)` contained in the marking of the tuples satisfying `pred`
    /// (ignoring decisions)?
    pub fn covered(&self, dm: &[DTuple], t: TransId, pred: impl Fn(&DTuple) -> bool) -> bool {
        self.pre(t).iter().all(|&(q, w)| dm.iter().filter(|d| d.place == q && pred(d)).count() >= w as usize)
    }

    pub fn intern(&mut self, mv: BackMove) -> u32 {
        if let Some(&i) = self.move_index.get(&mv) {
            return i;
        }
        let i = self.moves.len() as u32;
        self.move_index.insert(mv.clone(), i);
        self.moves.push(mv);
        i
    }

    pub fn place_name(&self, p: PlaceId) -> &str {
        self.game.net.place_name(p)
    }

    pub fn trans_name(&self, t: TransId) -> &str {
        &self.game.net.transition(t).name
    }
}
