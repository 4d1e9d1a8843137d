//! Translation of a winning Büchi strategy into a finite Petri-game strategy.
//!
//! The arena is walked breadth first along the Player-0 strategy (and along
//! every edge at mcuts). Each visited arena state carries a cut of the
//! strategy net under construction mapping player ids to strategy places.
//! Transition edges add a strategy transition with fresh post places; a
//! closed loop folds its last step back onto the places where the loop
//! started, and reaching an arena state a second time folds the new cut onto
//! the one of the first visit.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use petrisynth_buchi::{Player, Solution};
use petrisynth_net::{PetriGame, PlaceId};
use petrisynth_strategy::{SPlace, STrans, StrategyNet};
use thiserror::Error;

use crate::arena::{ReducedGame, BAD, GOOD};
use crate::types::{marking_of, EdgeInfo, EdgeKind, Firing, Nes, State};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("the system players do not win the initial state")]
    NotWinning,
    #[error("cannot fold arena state {state}: {reason}")]
    FoldFailed { state: usize, reason: String },
    #[error("internal invariant broken: {0}")]
    Invariant(String),
}

/// Arena states may be unfolded this many times when folding fails.
const MAX_VISITS: usize = 4;

type Cut = BTreeMap<u8, usize>;

#[derive(Clone, Debug)]
struct LoopStart {
    cut: Cut,
    /// Looping players per place at the start, ascending ids.
    by_place: BTreeMap<PlaceId, Vec<u8>>,
}

struct Item {
    state: usize,
    cut: Cut,
    start: Option<LoopStart>,
}

struct Builder<'a> {
    game: &'a PetriGame,
    net: StrategyNet,
    alias: Vec<Option<usize>>,
    producer: Vec<Option<usize>>,
    consumed: Vec<bool>,
}

impl<'a> Builder<'a> {
    fn place(&mut self, label: PlaceId) -> usize {
        let n = self.net.places.len();
        self.net.places.push(SPlace { name: format!("{}#{n}", self.game.net.place_name(label)), label });
        self.alias.push(None);
        self.producer.push(None);
        self.consumed.push(false);
        n
    }

    fn resolve(&self, mut p: usize) -> usize {
        while let Some(q) = self.alias[p] {
            p = q;
        }
        p
    }

    fn resolve_cut(&self, cut: &Cut) -> Cut {
        cut.iter().map(|(&id, &p)| (id, self.resolve(p))).collect()
    }

    fn transition(&mut self, f: &Firing, t: petrisynth_net::TransId, cut: &Cut) -> Result<(usize, Cut), ExtractError> {
        let mut pre = Vec::new();
        for id in &f.pre_ids {
            let p = cut.get(id).ok_or_else(|| ExtractError::Invariant(format!("player {id} missing from cut")))?;
            pre.push(self.resolve(*p));
        }
        let n = self.net.transitions.len();
        let mut next = cut.clone();
        for id in &f.pre_ids {
            next.remove(id);
        }
        let mut post = Vec::new();
        for &(id, place) in &f.post {
            let p = self.place(place);
            self.producer[p] = Some(n);
            post.push(p);
            next.insert(id, p);
        }
        for &p in &pre {
            self.consumed[p] = true;
        }
        self.net.transitions.push(STrans {
            name: format!("{}#{n}", self.game.net.transition(t).name),
            label: t,
            pre,
            post,
            loop_back: BTreeSet::new(),
        });
        Ok((n, next))
    }

    /// Replaces the dead place `from` by the earlier place `to` in the post
    /// of its producer.
    fn redirect(&mut self, from: usize, to: usize) -> Result<(), String> {
        if from == to {
            return Ok(());
        }
        if self.consumed[from] {
            return Err(format!("place {} already has consumers", self.net.places[from].name));
        }
        let Some(t) = self.producer[from] else {
            return Err(format!("place {} is initial", self.net.places[from].name));
        };
        let tr = &mut self.net.transitions[t];
        if tr.post.contains(&to) {
            return Err(format!("{} would produce {} twice", tr.name, self.net.places[to].name));
        }
        for p in tr.post.iter_mut() {
            if *p == from {
                *p = to;
            }
        }
        tr.loop_back.insert(to);
        self.alias[from] = Some(to);
        Ok(())
    }

    /// Folds `new` onto `old` (same players, same labels).
    fn fold(&mut self, new: &Cut, old: &Cut) -> Result<(), String> {
        let new = self.resolve_cut(new);
        let old = self.resolve_cut(old);
        // check everything first so a failure leaves the net untouched
        for (id, &a) in &new {
            let b = *old.get(id).ok_or("players differ")?;
            if a != b {
                if self.consumed[a] || self.producer[a].is_none() {
                    return Err(format!("place {} cannot be redirected", self.net.places[a].name));
                }
                if self.net.places[a].label != self.net.places[b].label {
                    return Err("labels differ".into());
                }
            }
        }
        for (id, &a) in &new {
            self.redirect(a, old[id])?;
        }
        Ok(())
    }

    /// Removes aliased places and renumbers.
    fn compact(mut self) -> StrategyNet {
        let keep: Vec<bool> = self.alias.iter().map(|a| a.is_none()).collect();
        let mut map = vec![usize::MAX; keep.len()];
        let mut places = Vec::new();
        for (i, p) in self.net.places.drain(..).enumerate() {
            if keep[i] {
                map[i] = places.len();
                places.push(p);
            }
        }
        let alias = self.alias;
        let res = |mut p: usize| {
            while let Some(q) = alias[p] {
                p = q;
            }
            map[p]
        };
        let transitions = self
            .net
            .transitions
            .into_iter()
            .map(|t| STrans {
                pre: t.pre.iter().map(|&p| res(p)).collect(),
                post: t.post.iter().map(|&p| res(p)).collect(),
                loop_back: t.loop_back.iter().map(|&p| res(p)).collect(),
                ..t
            })
            .collect();
        let initial = self.net.initial.iter().map(|&p| res(p)).collect();
        StrategyNet { places, transitions, initial }
    }
}

fn looping_by_place(state: &State, status: Nes, among: impl Fn(u8) -> bool) -> BTreeMap<PlaceId, Vec<u8>> {
    let mut out: BTreeMap<PlaceId, Vec<u8>> = BTreeMap::new();
    for d in state.dm.iter().filter(|d| d.nes == status && among(d.id)) {
        out.entry(d.place).or_default().push(d.id);
    }
    out
}

/// Builds the strategy described by `sol` from the initial arena state.
pub fn extract(game: &PetriGame, rg: &ReducedGame, sol: &Solution) -> Result<StrategyNet, ExtractError> {
    if !sol.win0[rg.initial] {
        return Err(ExtractError::NotWinning);
    }
    let mut b = Builder { game, net: StrategyNet::default(), alias: vec![], producer: vec![], consumed: vec![] };
    let init = rg.state(rg.initial).ok_or_else(|| ExtractError::Invariant("initial state is a sink".into()))?;
    let mut cut = Cut::new();
    for d in &init.dm {
        let p = b.place(d.place);
        b.net.initial.push(p);
        cut.insert(d.id, p);
    }
    let mut first: HashMap<usize, Cut> = HashMap::new();
    let mut visits: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::from([Item { state: rg.initial, cut, start: None }]);

    while let Some(Item { state: v, cut, start }) = queue.pop_front() {
        if v == GOOD || v == BAD {
            continue;
        }
        let state = rg.state(v).expect("non-sink");
        let cut = b.resolve_cut(&cut);
        let labels: petrisynth_net::Marking = cut.values().map(|&p| b.net.places[p].label).collect();
        if labels != marking_of(&state.dm) {
            return Err(ExtractError::Invariant(format!("cut of arena state {v} does not match its marking")));
        }
        if let Some(old) = first.get(&v) {
            let old = old.clone();
            match b.fold(&cut, &old) {
                Ok(()) => continue,
                Err(reason) => {
                    let n = visits.entry(v).or_insert(1);
                    *n += 1;
                    if *n > MAX_VISITS {
                        return Err(ExtractError::FoldFailed { state: v, reason });
                    }
                }
            }
        } else {
            first.insert(v, cut.clone());
            visits.insert(v, 1);
        }

        let succs: Vec<(usize, EdgeInfo)> = match rg.arena.owner[v] {
            Player::P0 => {
                let w = sol.strategy0[v]
                    .ok_or_else(|| ExtractError::Invariant(format!("no strategy choice at arena state {v}")))?;
                vec![(w, rg.edge_info(v, w).expect("edge exists").clone())]
            }
            Player::P1 => rg.arena.succ[v]
                .iter()
                .copied()
                .zip(rg.edges[v].iter().cloned())
                .chain(rg.parallel[v].iter().cloned())
                .collect(),
        };
        for (w, info) in succs {
            let target = rg.state(w);
            let was_looping = state.has_true();
            let starts_loop = |tgt: Option<&State>| tgt.is_some_and(|s| s.has_true()) && !was_looping;
            match info.kind {
                EdgeKind::Top => {
                    let start = if starts_loop(target) {
                        let t = target.expect("state");
                        Some(LoopStart { cut: cut.clone(), by_place: looping_by_place(t, Nes::True, |_| true) })
                    } else {
                        start.clone()
                    };
                    queue.push_back(Item { state: w, cut: cut.clone(), start });
                }
                EdgeKind::Sys(t) | EdgeKind::Mcut(t) | EdgeKind::NesFire(t) => {
                    let f = info.firing.as_ref().expect("firing");
                    let (_, next) = b.transition(f, t, &cut)?;
                    let start = if starts_loop(target) {
                        let t = target.expect("state");
                        Some(LoopStart { cut: next.clone(), by_place: looping_by_place(t, Nes::True, |_| true) })
                    } else if matches!(info.kind, EdgeKind::NesFire(_)) {
                        start.clone()
                    } else {
                        None
                    };
                    queue.push_back(Item { state: w, cut: next, start });
                }
                EdgeKind::NesFinish(t) => {
                    let f = info.firing.as_ref().expect("firing");
                    let st = start
                        .as_ref()
                        .ok_or_else(|| ExtractError::Invariant(format!("loop at arena state {v} has no start")))?;
                    let tgt = target.expect("state");
                    let ended = looping_by_place(tgt, Nes::End, |id| {
                        state.tuple(id).is_some_and(|d| d.nes == Nes::True) || f.post.iter().any(|&(i, _)| i == id)
                    });
                    let mut matched: BTreeMap<u8, usize> = BTreeMap::new();
                    for (place, ids) in &ended {
                        let starts = st.by_place.get(place).cloned().unwrap_or_default();
                        if starts.len() != ids.len() {
                            return Err(ExtractError::Invariant(format!("loop at arena state {v} does not close")));
                        }
                        for (&id, &sid) in ids.iter().zip(&starts) {
                            matched.insert(id, b.resolve(st.cut[&sid]));
                        }
                    }
                    let (n, mut next) = b.transition(f, t, &cut)?;
                    // participants: loop back to the start places
                    let fresh: Vec<(u8, usize)> = f.post.iter().map(|&(id, _)| (id, next[&id])).collect();
                    for (id, p) in fresh {
                        let to = matched[&id];
                        let tr = &mut b.net.transitions[n];
                        for q in tr.post.iter_mut() {
                            if *q == p {
                                *q = to;
                            }
                        }
                        tr.loop_back.insert(to);
                        b.alias[p] = Some(to);
                    }
                    // looping players that did not take part in the last step
                    for (&id, &to) in &matched {
                        if f.post.iter().any(|&(i, _)| i == id) {
                            continue;
                        }
                        let cur = b.resolve(next[&id]);
                        b.redirect(cur, to).map_err(|reason| ExtractError::FoldFailed { state: v, reason })?;
                    }
                    for (&id, &to) in &matched {
                        next.insert(id, to);
                    }
                    queue.push_back(Item { state: w, cut: next, start: None });
                }
                EdgeKind::NesBad(_) | EdgeKind::StopGood | EdgeKind::StopBad | EdgeKind::Loop => {}
            }
        }
    }
    Ok(b.compact())
}
