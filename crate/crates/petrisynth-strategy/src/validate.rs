//! Validators for branching processes and strategies.
//!
//! The strategy checks explore the reachable markings of the strategy net
//! itself, so they apply unchanged to finite branching processes and to
//! folded strategies with loop-back arcs.

use std::collections::{BTreeSet, HashSet};

use itertools::Itertools;
use petrisynth_net::{Marking, Multiset, PetriGame, WinningCondition};
use thiserror::Error;

use crate::net::{SMarking, SReach, StrategyNet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("not a branching process: {0}")]
    NotBranchingProcess(String),
    #[error("labelling mismatch: {0}")]
    Mislabelled(String),
    #[error("strategy place {0} can hold more than one token")]
    Unsafe(String),
    #[error("unjustified refusal: {0}")]
    UnjustifiedRefusal(String),
    #[error("nondeterministic: {0}")]
    Nondeterministic(String),
    #[error("deadlock: {0}")]
    Deadlock(String),
    #[error("bad marking reachable: {0}")]
    BadMarking(String),
    #[error("winning condition `{0}` is not a bad-marking condition")]
    UnsupportedCondition(&'static str),
    #[error("strategy exploration exceeded {0} markings")]
    CapExceeded(usize),
}

fn reach(s: &StrategyNet, cap: usize) -> Result<SReach, Violation> {
    s.reachable(cap).map_err(|_| Violation::CapExceeded(cap))
}

fn show(game: &PetriGame, s: &StrategyNet, m: &SMarking) -> String {
    let names = m.elements().map(|&p| s.places[p].name.as_str()).join(", ");
    format!("{} (strategy places {{{names}}})", game.net.show_marking(&s.label(m)))
}

/// Checks that every transition's pre- and postset carry exactly the labels
/// of the game transition, and that the initial places are labelled with the
/// initial marking.
pub fn check_labels(game: &PetriGame, s: &StrategyNet) -> Result<(), Violation> {
    let lab = |ps: &[usize]| -> Marking { ps.iter().map(|&p| s.places[p].label).collect() };
    for t in &s.transitions {
        if lab(&t.pre) != *game.net.pre(t.label) {
            return Err(Violation::Mislabelled(format!("preset of {}", t.name)));
        }
        if lab(&t.post) != *game.net.post(t.label) {
            return Err(Violation::Mislabelled(format!("postset of {}", t.name)));
        }
        if t.pre.iter().collect::<HashSet<_>>().len() != t.pre.len()
            || t.post.iter().collect::<HashSet<_>>().len() != t.post.len()
        {
            return Err(Violation::Mislabelled(format!("{} uses a place twice", t.name)));
        }
    }
    if lab(&s.initial) != *game.net.initial() {
        return Err(Violation::Mislabelled("initial places".into()));
    }
    Ok(())
}

/// Structural check of a finite branching process: labelled correctly, no
/// loop-back arcs, every place produced by at most one transition and
/// initial places by none, acyclic, free of self-conflict, and without two
/// transitions sharing both preset and label.
pub fn validate_branching_process(game: &PetriGame, bp: &StrategyNet) -> Result<(), Violation> {
    let err = |m: String| Err(Violation::NotBranchingProcess(m));
    check_labels(game, bp)?;
    if bp.has_loop_backs() {
        return err("contains loop-back arcs".into());
    }
    let presets = bp.place_presets();
    let initial: HashSet<usize> = bp.initial.iter().copied().collect();
    if initial.len() != bp.initial.len() {
        return err("initial place listed twice".into());
    }
    for (p, pre) in presets.iter().enumerate() {
        let expected = usize::from(!initial.contains(&p));
        if pre.len() != expected {
            return err(format!("place {} has {} producers", bp.places[p].name, pre.len()));
        }
    }
    for t in &bp.transitions {
        if t.pre.is_empty() {
            return err(format!("{} has an empty preset", t.name));
        }
    }
    let mut seen = HashSet::new();
    for t in &bp.transitions {
        let key = (t.label, t.pre.iter().copied().sorted().collect::<Vec<_>>());
        if !seen.insert(key) {
            return err(format!("{} duplicates another event", t.name));
        }
    }
    // causal past of every transition, computed in topological order
    let n = bp.transitions.len();
    let producer = |p: usize| presets[p].first().copied();
    let mut past: Vec<Option<BTreeSet<usize>>> = vec![None; n];
    let mut on_stack = vec![false; n];
    fn visit(
        t: usize,
        bp: &StrategyNet,
        producer: &dyn Fn(usize) -> Option<usize>,
        past: &mut Vec<Option<BTreeSet<usize>>>,
        on_stack: &mut Vec<bool>,
    ) -> Result<(), Violation> {
        if past[t].is_some() {
            return Ok(());
        }
        if on_stack[t] {
            return Err(Violation::NotBranchingProcess(format!("cycle through {}", bp.transitions[t].name)));
        }
        on_stack[t] = true;
        let mut set = BTreeSet::from([t]);
        for &p in &bp.transitions[t].pre {
            if let Some(u) = producer(p) {
                visit(u, bp, producer, past, on_stack)?;
                set.extend(past[u].as_ref().expect("visited").iter().copied());
            }
        }
        on_stack[t] = false;
        past[t] = Some(set);
        Ok(())
    }
    for t in 0..n {
        visit(t, bp, &producer, &mut past, &mut on_stack)?;
    }
    for (t, set) in past.iter().enumerate() {
        let set = set.as_ref().expect("visited");
        let mut consumed = HashSet::new();
        for &u in set {
            for &p in &bp.transitions[u].pre {
                if !consumed.insert(p) {
                    return err(format!("{} is in self-conflict", bp.transitions[t].name));
                }
            }
        }
    }
    Ok(())
}

/// Every strategy place holds at most one token in every reachable marking.
pub fn check_safe(game: &PetriGame, s: &StrategyNet, cap: usize) -> Result<(), Violation> {
    let r = reach(s, cap)?;
    for m in &r.markings {
        if let Some((&p, _)) = m.iter().find(|(_, &c)| c > 1) {
            return Err(Violation::Unsafe(format!("{} in {}", s.places[p].name, show(game, s, m))));
        }
    }
    Ok(())
}

/// Whenever a game transition `t` is enabled on the labels of a set `C` of
/// marked strategy places, either the strategy has a `t`-labelled transition
/// consuming exactly `C`, or some system place in `C` never allows `t`.
pub fn check_justified_refusal(game: &PetriGame, s: &StrategyNet, cap: usize) -> Result<(), Violation> {
    let r = reach(s, cap)?;
    let postsets = s.place_postsets();
    let allows = |p: usize, t| postsets[p].iter().any(|&u| s.transitions[u].label == t);
    let mut events: HashSet<(petrisynth_net::TransId, Vec<usize>)> = HashSet::new();
    for tr in &s.transitions {
        events.insert((tr.label, tr.pre.iter().copied().sorted().collect()));
    }
    for m in &r.markings {
        let lab = s.label(m);
        for t in game.net.enabled_transitions(&lab) {
            for c in instances(s, m, game.net.pre(t)) {
                if events.contains(&(t, c.clone())) {
                    continue;
                }
                let refused = c.iter().any(|&p| game.is_system(s.places[p].label) && !allows(p, t));
                if !refused {
                    let names = c.iter().map(|&p| s.places[p].name.as_str()).join(", ");
                    return Err(Violation::UnjustifiedRefusal(format!(
                        "{} enabled on {{{names}}} in {}",
                        game.net.transition(t).name,
                        show(game, s, m)
                    )));
                }
            }
        }
    }
    Ok(())
}

/// All sets of marked strategy places whose labels are exactly `pre`.
fn instances(s: &StrategyNet, m: &SMarking, pre: &Marking) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<Vec<usize>>> = Vec::new();
    for (&q, &w) in pre.iter() {
        let cands: Vec<usize> = m.support().copied().filter(|&p| s.places[p].label == q).collect();
        groups.push(cands.into_iter().combinations(w as usize).collect());
    }
    groups
        .into_iter()
        .multi_cartesian_product()
        .map(|parts| parts.into_iter().flatten().sorted().collect())
        .collect()
}

/// In every reachable marking, each marked system place has at most one
/// enabled transition in its postset.
pub fn check_deterministic(game: &PetriGame, s: &StrategyNet, cap: usize) -> Result<(), Violation> {
    let r = reach(s, cap)?;
    let postsets = s.place_postsets();
    for m in &r.markings {
        for &p in m.support() {
            if !game.is_system(s.places[p].label) {
                continue;
            }
            let enabled: Vec<usize> = postsets[p].iter().copied().filter(|&t| s.enabled(m, t)).collect();
            if enabled.len() > 1 {
                let names = enabled.iter().map(|&t| s.transitions[t].name.as_str()).join(", ");
                return Err(Violation::Nondeterministic(format!(
                    "{} can fire {{{names}}} in {}",
                    s.places[p].name,
                    show(game, s, m)
                )));
            }
        }
    }
    Ok(())
}

/// Every reachable marking without enabled strategy transitions is labelled
/// with a final marking of the game.
pub fn check_deadlock_avoiding(game: &PetriGame, s: &StrategyNet, cap: usize) -> Result<(), Violation> {
    let r = reach(s, cap)?;
    for (i, m) in r.markings.iter().enumerate() {
        if r.edges[i].is_empty() && !game.net.is_final(&s.label(m)) {
            return Err(Violation::Deadlock(show(game, s, m)));
        }
    }
    Ok(())
}

/// The strategy is winning for a bad-place or bad-marking condition: it is
/// labelled correctly, safe, deterministic, justified-refusing, deadlock
/// avoiding, and reaches no bad marking.
pub fn check_winning_bad_markings(game: &PetriGame, s: &StrategyNet, cap: usize) -> Result<(), Violation> {
    match &game.winning {
        WinningCondition::BadPlaces(_) | WinningCondition::BadMarkings(_) => {}
        other => return Err(Violation::UnsupportedCondition(other.kind_name())),
    }
    check_labels(game, s)?;
    check_safe(game, s, cap)?;
    check_deterministic(game, s, cap)?;
    check_justified_refusal(game, s, cap)?;
    check_deadlock_avoiding(game, s, cap)?;
    let r = reach(s, cap)?;
    for m in &r.markings {
        if game.is_bad_marking(&s.label(m)) {
            return Err(Violation::BadMarking(show(game, s, m)));
        }
    }
    Ok(())
}

/// Like [`check_winning_bad_markings`] but collects every failing check.
pub fn all_violations(game: &PetriGame, s: &StrategyNet, cap: usize) -> Vec<Violation> {
    let checks: [fn(&PetriGame, &StrategyNet, usize) -> Result<(), Violation>; 5] =
        [check_safe, check_deterministic, check_justified_refusal, check_deadlock_avoiding, check_winning_bad_markings];
    let mut out = Vec::new();
    if let Err(v) = check_labels(game, s) {
        return vec![v];
    }
    for c in checks {
        if let Err(v) = c(game, s, cap) {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out
}

/// Multiset helper used by tests and the unroller.
pub fn labels_of(s: &StrategyNet, places: &[usize]) -> Marking {
    Multiset::from_iter(places.iter().map(|&p| s.places[p].label))
}
