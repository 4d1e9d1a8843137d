//! Bounded unfolding of a folded strategy into a branching process.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::net::{SPlace, STrans, StrategyNet};

/// Unfolds `s` (which may contain loop-back arcs) into a finite branching
/// process with at most `max_events` transitions. Every condition records the
/// strategy place it copies, so labels carry over unchanged.
///
/// Assumes `s` is safe; each reachable cut is explored once.
pub fn unroll(s: &StrategyNet, max_events: usize) -> StrategyNet {
    let mut out = StrategyNet::default();
    // condition -> copied strategy place
    let mut origin: Vec<usize> = Vec::new();
    let mut copies = vec![0usize; s.places.len()];
    let mut new_cond = |out: &mut StrategyNet, origin: &mut Vec<usize>, p: usize| {
        copies[p] += 1;
        out.places.push(SPlace { name: format!("{}~{}", s.places[p].name, copies[p]), label: s.places[p].label });
        origin.push(p);
        out.places.len() - 1
    };
    for &p in &s.initial {
        let c = new_cond(&mut out, &mut origin, p);
        out.initial.push(c);
    }
    let mut events: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    let mut seen: HashSet<BTreeSet<usize>> = HashSet::new();
    let start: BTreeSet<usize> = out.initial.iter().copied().collect();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(cut) = queue.pop_front() {
        for (ti, t) in s.transitions.iter().enumerate() {
            let mut pre = Vec::with_capacity(t.pre.len());
            for &p in &t.pre {
                match cut.iter().copied().find(|&c| origin[c] == p && !pre.contains(&c)) {
                    Some(c) => pre.push(c),
                    None => break,
                }
            }
            if pre.len() != t.pre.len() {
                continue;
            }
            pre.sort_unstable();
            let key = (ti, pre.clone());
            let ev = match events.get(&key) {
                Some(&e) => e,
                None => {
                    if out.transitions.len() >= max_events {
                        continue;
                    }
                    let post: Vec<usize> = t.post.iter().map(|&p| new_cond(&mut out, &mut origin, p)).collect();
                    out.transitions.push(STrans {
                        name: format!("{}~{}", t.name, out.transitions.len()),
                        label: t.label,
                        pre: pre.clone(),
                        post,
                        loop_back: BTreeSet::new(),
                    });
                    events.insert(key, out.transitions.len() - 1);
                    out.transitions.len() - 1
                }
            };
            let mut next = cut.clone();
            for c in &pre {
                next.remove(c);
            }
            next.extend(out.transitions[ev].post.iter().copied());
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    out
}
