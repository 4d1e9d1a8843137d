//! Place/transition nets with weighted arcs.
//!
//! Places and transitions are interned: a [`PetriNet`] stores them sorted by
//! name and hands out dense [`PlaceId`]/[`TransId`] indices, so iteration
//! order (and everything derived from it) is deterministic.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::NetError;
use crate::multiset::Multiset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlaceId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TransId(pub u32);

impl PlaceId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl TransId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

pub type Marking = Multiset<PlaceId>;

/// One end of an explicit token-flow pair inside a transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FlowEnd {
    Place(PlaceId),
    /// `new->p`: the token on `p` is created by the transition.
    New,
    /// `p->drop`: the token consumed from `p` disappears.
    Drop,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub name: String,
    pub pre: Multiset<PlaceId>,
    pub post: Multiset<PlaceId>,
    /// Optional explicit token flow, one `(source, target)` pair per token.
    pub flow: Option<Vec<(FlowEnd, FlowEnd)>>,
}

/// Either kind of net node, used where the operation is defined on both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Place(PlaceId),
    Trans(TransId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PetriNet {
    places: Vec<String>,
    transitions: Vec<Transition>,
    place_index: HashMap<String, PlaceId>,
    trans_index: HashMap<String, TransId>,
    /// Transitions having the place in their postset.
    place_pre: Vec<Vec<TransId>>,
    /// Transitions having the place in their preset.
    place_post: Vec<Vec<TransId>>,
    initial: Marking,
}

/// Name-based description of a transition, consumed by [`NetBuilder`].
#[derive(Clone, Debug, Default)]
pub struct TransitionSpec {
    pub name: String,
    pub pre: Vec<(String, u32)>,
    pub post: Vec<(String, u32)>,
    pub flow: Option<Vec<(Option<String>, Option<String>)>>,
}

/// Collects names first, then interns them in sorted order.
#[derive(Clone, Debug, Default)]
pub struct NetBuilder {
    places: Vec<String>,
    transitions: Vec<TransitionSpec>,
    initial: Vec<(String, u32)>,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn place(&mut self, name: impl Into<String>) -> &mut Self {
        self.places.push(name.into());
        self
    }

    pub fn transition(&mut self, spec: TransitionSpec) -> &mut Self {
        self.transitions.push(spec);
        self
    }

    /// Convenience for transitions without flow annotations.
    pub fn arc_transition(&mut self, name: &str, pre: &[(&str, u32)], post: &[(&str, u32)]) -> &mut Self {
        let own = |v: &[(&str, u32)]| v.iter().map(|&(p, c)| (p.to_string(), c)).collect();
        self.transition(TransitionSpec { name: name.to_string(), pre: own(pre), post: own(post), flow: None })
    }

    pub fn initial(&mut self, place: impl Into<String>, count: u32) -> &mut Self {
        self.initial.push((place.into(), count));
        self
    }

    pub fn build(&self) -> Result<PetriNet, NetError> {
        let mut places = self.places.clone();
        places.sort();
        for w in places.windows(2) {
            if w[0] == w[1] {
                return Err(NetError::DuplicateNode(w[0].clone()));
            }
        }
        let place_index: HashMap<String, PlaceId> = places
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), PlaceId(i as u32)))
            .collect();
        let lookup = |name: &str| place_index.get(name).copied().ok_or_else(|| NetError::UnknownPlace(name.to_string()));

        let mut specs: Vec<&TransitionSpec> = self.transitions.iter().collect();
        specs.sort_by(|a, b| a.name.cmp(&b.name));
        let mut transitions = Vec::with_capacity(specs.len());
        for (i, spec) in specs.iter().enumerate() {
            if i > 0 && specs[i - 1].name == spec.name {
                return Err(NetError::DuplicateNode(spec.name.clone()));
            }
            if place_index.contains_key(&spec.name) {
                return Err(NetError::DuplicateNode(spec.name.clone()));
            }
            let mut pre = Multiset::new();
            for (p, c) in &spec.pre {
                pre.insert_n(lookup(p)?, *c);
            }
            let mut post = Multiset::new();
            for (p, c) in &spec.post {
                post.insert_n(lookup(p)?, *c);
            }
            let flow = match &spec.flow {
                None => None,
                Some(pairs) => {
                    let mut out = Vec::with_capacity(pairs.len());
                    for (src, dst) in pairs {
                        let src = match src {
                            Some(p) => FlowEnd::Place(lookup(p)?),
                            None => FlowEnd::New,
                        };
                        let dst = match dst {
                            Some(p) => FlowEnd::Place(lookup(p)?),
                            None => FlowEnd::Drop,
                        };
                        out.push((src, dst));
                    }
                    check_flow(&spec.name, &pre, &post, &out)?;
                    Some(out)
                }
            };
            transitions.push(Transition { name: spec.name.clone(), pre, post, flow });
        }

        let mut initial = Multiset::new();
        for (p, c) in &self.initial {
            initial.insert_n(lookup(p)?, *c);
        }
        Ok(PetriNet::from_parts(places, transitions, initial))
    }
}

fn check_flow(
    name: &str,
    pre: &Multiset<PlaceId>,
    post: &Multiset<PlaceId>,
    flow: &[(FlowEnd, FlowEnd)],
) -> Result<(), NetError> {
    let mut srcs = Multiset::new();
    let mut dsts = Multiset::new();
    for (s, d) in flow {
        if matches!((s, d), (FlowEnd::New, FlowEnd::Drop)) {
            return Err(NetError::InvalidFlow { transition: name.to_string(), reason: "new->drop pair".into() });
        }
        if let FlowEnd::Place(p) = s {
            srcs.insert(*p);
        }
        if let FlowEnd::Place(p) = d {
            dsts.insert(*p);
        }
    }
    if &srcs != pre || &dsts != post {
        return Err(NetError::InvalidFlow {
            transition: name.to_string(),
            reason: "flow pairs must account for every preset and postset token exactly once".into(),
        });
    }
    Ok(())
}

impl PetriNet {
    fn from_parts(places: Vec<String>, transitions: Vec<Transition>, initial: Marking) -> Self {
        let place_index = places.iter().enumerate().map(|(i, p)| (p.clone(), PlaceId(i as u32))).collect();
        let trans_index = transitions
            .iter()
            .enumerate()
            .map(|(i, t)| (t.name.clone(), TransId(i as u32)))
            .collect();
        let mut place_pre = vec![Vec::new(); places.len()];
        let mut place_post = vec![Vec::new(); places.len()];
        for (i, t) in transitions.iter().enumerate() {
            for p in t.pre.support() {
                place_post[p.idx()].push(TransId(i as u32));
            }
            for p in t.post.support() {
                place_pre[p.idx()].push(TransId(i as u32));
            }
        }
        Self { places, transitions, place_index, trans_index, place_pre, place_post, initial }
    }

    pub fn num_places(&self) -> usize {
        self.places.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn places(&self) -> impl Iterator<Item = PlaceId> + '_ {
        (0..self.places.len() as u32).map(PlaceId)
    }

    pub fn transition_ids(&self) -> impl Iterator<Item = TransId> + '_ {
        (0..self.transitions.len() as u32).map(TransId)
    }

    pub fn place_name(&self, p: PlaceId) -> &str {
        &self.places[p.idx()]
    }

    pub fn transition(&self, t: TransId) -> &Transition {
        &self.transitions[t.idx()]
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn place_id(&self, name: &str) -> Option<PlaceId> {
        self.place_index.get(name).copied()
    }

    pub fn trans_id(&self, name: &str) -> Option<TransId> {
        self.trans_index.get(name).copied()
    }

    pub fn initial(&self) -> &Marking {
        &self.initial
    }

    pub fn pre(&self, t: TransId) -> &Multiset<PlaceId> {
        &self.transitions[t.idx()].pre
    }

    pub fn post(&self, t: TransId) -> &Multiset<PlaceId> {
        &self.transitions[t.idx()].post
    }

    /// Transitions consuming from `p`, ascending.
    pub fn place_postset(&self, p: PlaceId) -> &[TransId] {
        &self.place_post[p.idx()]
    }

    /// Transitions producing onto `p`, ascending.
    pub fn place_preset(&self, p: PlaceId) -> &[TransId] {
        &self.place_pre[p.idx()]
    }

    /// Preset of a node: the consumed multiset of a transition, or the
    /// producing transitions of a place (as a set).
    pub fn pre_set(&self, node: Node) -> Multiset<Node> {
        match node {
            Node::Trans(t) => self.pre(t).map_keys(|&p| Node::Place(p)),
            Node::Place(p) => self.place_preset(p).iter().map(|&t| Node::Trans(t)).collect(),
        }
    }

    pub fn post_set(&self, node: Node) -> Multiset<Node> {
        match node {
            Node::Trans(t) => self.post(t).map_keys(|&p| Node::Place(p)),
            Node::Place(p) => self.place_postset(p).iter().map(|&t| Node::Trans(t)).collect(),
        }
    }

    pub fn enabled(&self, m: &Marking, t: TransId) -> bool {
        self.pre(t).is_subset(m)
    }

    pub fn enabled_transitions<'a>(&'a self, m: &'a Marking) -> impl Iterator<Item = TransId> + 'a {
        self.transition_ids().filter(move |&t| self.enabled(m, t))
    }

    pub fn fire(&self, m: &Marking, t: TransId) -> Result<Marking, NetError> {
        if !self.enabled(m, t) {
            return Err(NetError::NotEnabled(self.transition(t).name.clone()));
        }
        Ok(m.sub(self.pre(t)).add(self.post(t)))
    }

    /// Fires a sequence of transition names from `m`.
    pub fn fire_sequence(&self, m: &Marking, names: &[&str]) -> Result<Marking, NetError> {
        let mut cur = m.clone();
        for n in names {
            let t = self.trans_id(n).ok_or_else(|| NetError::UnknownTransition(n.to_string()))?;
            cur = self.fire(&cur, t)?;
        }
        Ok(cur)
    }

    pub fn is_final(&self, m: &Marking) -> bool {
        self.enabled_transitions(m).next().is_none()
    }

    /// Human-readable marking such as `{p, k:2}`.
    pub fn show_marking(&self, m: &Marking) -> String {
        MarkingDisplay { net: self, marking: m }.to_string()
    }

    pub fn marking_from_names(&self, pairs: &[(&str, u32)]) -> Result<Marking, NetError> {
        let mut m = Multiset::new();
        for &(p, c) in pairs {
            m.insert_n(self.place_id(p).ok_or_else(|| NetError::UnknownPlace(p.to_string()))?, c);
        }
        Ok(m)
    }
}

struct MarkingDisplay<'a> {
    net: &'a PetriNet,
    marking: &'a Marking,
}

impl fmt::Display for MarkingDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (p, &c)) in self.marking.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.net.place_name(*p))?;
            if c != 1 {
                write!(f, ":{c}")?;
            }
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> PetriNet {
        let mut b = NetBuilder::new();
        b.place("b").place("a");
        b.arc_transition("t", &[("a", 1)], &[("b", 2)]);
        b.initial("a", 1);
        b.build().unwrap()
    }

    #[test]
    fn names_are_interned_in_sorted_order() {
        let n = tiny();
        assert_eq!(n.place_name(PlaceId(0)), "a");
        assert_eq!(n.place_id("b"), Some(PlaceId(1)));
    }

    #[test]
    fn firing_moves_tokens() {
        let n = tiny();
        let t = n.trans_id("t").unwrap();
        let m = n.fire(n.initial(), t).unwrap();
        assert_eq!(n.show_marking(&m), "{b:2}");
        assert!(matches!(n.fire(&m, t), Err(NetError::NotEnabled(_))));
    }

    #[test]
    fn pre_set_of_place_lists_producers() {
        let n = tiny();
        let t = n.trans_id("t").unwrap();
        let b = n.place_id("b").unwrap();
        assert_eq!(n.pre_set(Node::Place(b)), Multiset::singleton(Node::Trans(t)));
        assert!(n.pre_set(Node::Place(n.place_id("a").unwrap())).is_empty());
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut b = NetBuilder::new();
        b.place("x").place("x");
        assert_eq!(b.build(), Err(NetError::DuplicateNode("x".into())));
    }

    #[test]
    fn inconsistent_flow_rejected() {
        let mut b = NetBuilder::new();
        b.place("a").place("b");
        b.transition(TransitionSpec {
            name: "t".into(),
            pre: vec![("a".into(), 1)],
            post: vec![("b".into(), 1)],
            flow: Some(vec![(Some("a".into()), None)]),
        });
        assert!(matches!(b.build(), Err(NetError::InvalidFlow { .. })));
    }
}
