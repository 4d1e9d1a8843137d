//! Explicit breadth-first reachability.

use std::collections::{HashMap, VecDeque};

use crate::error::NetError;
use crate::net::{Marking, PetriNet, TransId};

/// Reachability graph in BFS discovery order. Index 0 is the initial marking.
#[derive(Clone, Debug)]
pub struct ReachGraph {
    pub markings: Vec<Marking>,
    pub index: HashMap<Marking, usize>,
    /// Outgoing `(transition, successor index)` pairs, ascending by transition.
    pub edges: Vec<Vec<(TransId, usize)>>,
}

impl ReachGraph {
    pub fn contains(&self, m: &Marking) -> bool {
        self.index.contains_key(m)
    }

    pub fn len(&self) -> usize {
        self.markings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.markings.is_empty()
    }
}

/// Explores all markings reachable from the initial marking.
///
/// Every discovered marking is checked against `bound` (tokens per place);
/// exploration aborts once more than `cap` markings have been found.
pub fn reachable_markings(net: &PetriNet, bound: u32, cap: usize) -> Result<ReachGraph, NetError> {
    reachable_from(net, net.initial(), bound, cap)
}

pub fn reachable_from(net: &PetriNet, start: &Marking, bound: u32, cap: usize) -> Result<ReachGraph, NetError> {
    let mut g = ReachGraph { markings: Vec::new(), index: HashMap::new(), edges: Vec::new() };
    let mut queue = VecDeque::new();
    let push = |g: &mut ReachGraph, m: Marking| -> Result<usize, NetError> {
        if let Some(&i) = g.index.get(&m) {
            return Ok(i);
        }
        if let Some((p, _)) = m.iter().find(|&(_, &c)| c > bound) {
            return Err(NetError::BoundViolated {
                place: net.place_name(*p).to_string(),
                bound,
                marking: net.show_marking(&m),
            });
        }
        if g.markings.len() >= cap {
            return Err(NetError::CapExceeded(cap));
        }
        let i = g.markings.len();
        g.index.insert(m.clone(), i);
        g.markings.push(m);
        g.edges.push(Vec::new());
        Ok(i)
    };
    let s = push(&mut g, start.clone())?;
    queue.push_back(s);
    while let Some(i) = queue.pop_front() {
        let m = g.markings[i].clone();
        for t in net.transition_ids() {
            if !net.enabled(&m, t) {
                continue;
            }
            let next = net.fire(&m, t)?;
            let before = g.markings.len();
            let j = push(&mut g, next)?;
            if j == before {
                queue.push_back(j);
            }
            g.edges[i].push((t, j));
        }
    }
    Ok(g)
}
