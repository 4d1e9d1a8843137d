//! Labelled nets describing strategies.
//!
//! A [`StrategyNet`] is a net whose places and transitions are labelled with
//! places and transitions of a game. Without loop-back arcs it is a finite
//! branching process; with them it is the finite folding of an infinite one,
//! where a loop-back arc from `t` to `p` means "after `t`, continue as from
//! the earlier place `p`".

use std::collections::{BTreeSet, HashMap, VecDeque};

use petrisynth_net::{Multiset, PetriGame, PlaceId, TransId};
use serde::{Deserialize, Serialize};

use crate::error::StrategyError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SPlace {
    pub name: String,
    pub label: PlaceId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct STrans {
    pub name: String,
    pub label: TransId,
    pub pre: Vec<usize>,
    pub post: Vec<usize>,
    /// Members of `post` reached through a loop-back arc.
    pub loop_back: BTreeSet<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StrategyNet {
    pub places: Vec<SPlace>,
    pub transitions: Vec<STrans>,
    pub initial: Vec<usize>,
}

/// A marking of a strategy net: token counts per strategy place.
pub type SMarking = Multiset<usize>;

/// Reachable markings of a strategy net in BFS order.
#[derive(Clone, Debug)]
pub struct SReach {
    pub markings: Vec<SMarking>,
    pub edges: Vec<Vec<(usize, usize)>>,
}

impl StrategyNet {
    pub fn place_postsets(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.places.len()];
        for (i, t) in self.transitions.iter().enumerate() {
            for &p in &t.pre {
                out[p].push(i);
            }
        }
        out
    }

    pub fn place_presets(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.places.len()];
        for (i, t) in self.transitions.iter().enumerate() {
            for &p in &t.post {
                out[p].push(i);
            }
        }
        out
    }

    pub fn has_loop_backs(&self) -> bool {
        self.transitions.iter().any(|t| !t.loop_back.is_empty())
    }

    pub fn loop_back_count(&self) -> usize {
        self.transitions.iter().map(|t| t.loop_back.len()).sum()
    }

    pub fn initial_marking(&self) -> SMarking {
        self.initial.iter().copied().collect()
    }

    /// The labelling λ applied to a marking.
    pub fn label(&self, m: &SMarking) -> petrisynth_net::Marking {
        m.map_keys(|&p| self.places[p].label)
    }

    pub fn enabled(&self, m: &SMarking, t: usize) -> bool {
        let pre: SMarking = self.transitions[t].pre.iter().copied().collect();
        pre.is_subset(m)
    }

    pub fn fire(&self, m: &SMarking, t: usize) -> SMarking {
        let tr = &self.transitions[t];
        let pre: SMarking = tr.pre.iter().copied().collect();
        let post: SMarking = tr.post.iter().copied().collect();
        m.sub(&pre).add(&post)
    }

    /// Explores the reachable markings; errors once `cap` is exceeded.
    pub fn reachable(&self, cap: usize) -> Result<SReach, StrategyError> {
        let mut index: HashMap<SMarking, usize> = HashMap::new();
        let mut r = SReach { markings: Vec::new(), edges: Vec::new() };
        let init = self.initial_marking();
        index.insert(init.clone(), 0);
        r.markings.push(init);
        r.edges.push(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let m = r.markings[i].clone();
            for t in 0..self.transitions.len() {
                if !self.enabled(&m, t) {
                    continue;
                }
                let next = self.fire(&m, t);
                let j = match index.get(&next) {
                    Some(&j) => j,
                    None => {
                        if r.markings.len() >= cap {
                            return Err(StrategyError::CapExceeded(cap));
                        }
                        let j = r.markings.len();
                        index.insert(next.clone(), j);
                        r.markings.push(next);
                        r.edges.push(Vec::new());
                        queue.push_back(j);
                        j
                    }
                };
                r.edges[i].push((t, j));
            }
        }
        Ok(r)
    }

    /// Serializable form with names instead of indices for labels.
    pub fn to_file(&self, game: &PetriGame) -> StrategyFile {
        StrategyFile {
            places: self
                .places
                .iter()
                .map(|p| PlaceEntry { name: p.name.clone(), label: game.net.place_name(p.label).to_string() })
                .collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| TransEntry {
                    name: t.name.clone(),
                    label: game.net.transition(t.label).name.clone(),
                    pre: t.pre.clone(),
                    post: t.post.clone(),
                    loop_back: t.loop_back.iter().copied().collect(),
                })
                .collect(),
            initial: self.initial.clone(),
        }
    }

    pub fn from_file(game: &PetriGame, f: &StrategyFile) -> Result<Self, StrategyError> {
        let place = |n: &str| game.net.place_id(n).ok_or_else(|| StrategyError::UnknownLabel(n.to_string()));
        let trans = |n: &str| game.net.trans_id(n).ok_or_else(|| StrategyError::UnknownLabel(n.to_string()));
        let places = f
            .places
            .iter()
            .map(|p| Ok(SPlace { name: p.name.clone(), label: place(&p.label)? }))
            .collect::<Result<Vec<_>, StrategyError>>()?;
        let n = places.len();
        let check = |v: &[usize]| match v.iter().find(|&&i| i >= n) {
            Some(&i) => Err(StrategyError::Malformed(format!("place index {i} out of range"))),
            None => Ok(()),
        };
        let mut transitions = Vec::new();
        for t in &f.transitions {
            check(&t.pre)?;
            check(&t.post)?;
            if let Some(lb) = t.loop_back.iter().find(|p| !t.post.contains(p)) {
                return Err(StrategyError::Malformed(format!("loop-back target {lb} not in postset of {}", t.name)));
            }
            transitions.push(STrans {
                name: t.name.clone(),
                label: trans(&t.label)?,
                pre: t.pre.clone(),
                post: t.post.clone(),
                loop_back: t.loop_back.iter().copied().collect(),
            });
        }
        check(&f.initial)?;
        Ok(Self { places, transitions, initial: f.initial.clone() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceEntry {
    pub name: String,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransEntry {
    pub name: String,
    pub label: String,
    pub pre: Vec<usize>,
    pub post: Vec<usize>,
    #[serde(default)]
    pub loop_back: Vec<usize>,
}

/// On-disk strategy (JSON): indices refer to the `places` array.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyFile {
    pub places: Vec<PlaceEntry>,
    pub transitions: Vec<TransEntry>,
    pub initial: Vec<usize>,
}
