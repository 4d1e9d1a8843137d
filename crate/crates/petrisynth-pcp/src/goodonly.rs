//! Translation of a game with good and bad markings into one with good
//! markings only.
//!
//! After every original transition its produced tokens land on environment
//! shadow places `pi.<p>`; a return transition `tau.<t>` moves them back. For
//! every reachable bad marking `M` a transition `bad.<n>` consumes the
//! shadows of `M` into the environment place `sink`, which no good marking
//! mentions. The game starts on `pi0.<p>` copies of the initial places and
//! `init` produces the original initial marking.
//!
//! The bad markings must be explicit, so bad patterns are expanded over the
//! reachable markings first.

use std::collections::BTreeSet;

use petrisynth_net::{
    classify_marking, reachable_markings, Marking, MarkingClass, MarkingPattern, NetBuilder, PetriGame, PetriNet,
    PlaceId, PlaceKind, Range, TransId, WinningCondition,
};
use petrisynth_strategy::simulate_play;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::PcpError;

pub const SINK: &str = "sink";
pub const INIT: &str = "init";

pub fn shadow(p: &str) -> String {
    format!("pi.{p}")
}

pub fn initial_shadow(p: &str) -> String {
    format!("pi0.{p}")
}

pub fn return_transition(t: &str) -> String {
    format!("tau.{t}")
}

pub fn bad_transition(n: usize) -> String {
    format!("bad.{n}")
}

/// The reachable markings classified bad, in exploration order.
pub fn expand_bad_markings(game: &PetriGame, bound: u32, cap: usize) -> Result<Vec<Marking>, PcpError> {
    if !matches!(game.winning, WinningCondition::GoodAndBad { .. }) {
        return Err(PcpError::WrongCondition("good-and-bad"));
    }
    let graph = reachable_markings(&game.net, bound, cap).map_err(|e| match e {
        petrisynth_net::NetError::CapExceeded(n) => PcpError::CapExceeded(n),
        e => PcpError::Net(e),
    })?;
    let mut out = Vec::new();
    for m in &graph.markings {
        if classify_marking(game, m)? == MarkingClass::Bad {
            out.push(m.clone());
        }
    }
    Ok(out)
}

fn remap(pat: &MarkingPattern, from: &PetriNet, to: &PetriNet) -> MarkingPattern {
    let id = |p: &PlaceId| to.place_id(from.place_name(*p)).expect("original place kept");
    MarkingPattern {
        exact: pat.exact.iter().map(|(p, &c)| (id(p), c)).collect(),
        ranges: pat.ranges.iter().map(|(p, &r)| (id(p), r)).collect(),
        sums: pat.sums.iter().map(|(ps, r): &(BTreeSet<PlaceId>, Range)| (ps.iter().map(id).collect(), *r)).collect(),
        others_zero: pat.others_zero,
    }
}

fn own(v: &[(String, u32)]) -> Vec<(&str, u32)> {
    v.iter().map(|(p, c)| (p.as_str(), *c)).collect()
}

fn weighted<'a>(net: &'a PetriNet, m: &'a Marking, name: impl Fn(&str) -> String + 'a) -> Vec<(String, u32)> {
    m.iter().map(|(p, &c)| (name(net.place_name(*p)), c)).collect()
}

/// Builds the good-only game from `game` and its explicit bad markings.
pub fn good_bad_to_good_with(game: &PetriGame, bad: &[Marking]) -> Result<PetriGame, PcpError> {
    let WinningCondition::GoodAndBad { good, .. } = &game.winning else {
        return Err(PcpError::WrongCondition("good-and-bad"));
    };
    let net = &game.net;
    let mut b = NetBuilder::new();
    let mut kinds_by_name = Vec::new();
    let mut add_place = |b: &mut NetBuilder, name: String, kind: PlaceKind| {
        kinds_by_name.push((name.clone(), kind));
        b.place(name);
    };
    for p in net.places() {
        let name = net.place_name(p);
        add_place(&mut b, name.to_string(), game.kind(p));
        add_place(&mut b, shadow(name), PlaceKind::Env);
    }
    for (p, &c) in net.initial().iter() {
        let name = net.place_name(*p);
        add_place(&mut b, initial_shadow(name), game.kind(*p));
        b.initial(initial_shadow(name), c);
    }
    add_place(&mut b, SINK.to_string(), PlaceKind::Env);

    for t in net.transition_ids() {
        let tr = net.transition(t);
        let pre = weighted(net, &tr.pre, str::to_string);
        let post_orig = weighted(net, &tr.post, str::to_string);
        let post_shadow = weighted(net, &tr.post, shadow);
        b.arc_transition(&tr.name, &own(&pre), &own(&post_shadow));
        b.arc_transition(&return_transition(&tr.name), &own(&post_shadow), &own(&post_orig));
    }
    for (n, m) in bad.iter().enumerate() {
        let pre = weighted(net, m, shadow);
        b.arc_transition(&bad_transition(n), &own(&pre), &[(SINK, 1)]);
    }
    let init_pre = weighted(net, net.initial(), initial_shadow);
    let init_post = weighted(net, net.initial(), str::to_string);
    b.arc_transition(INIT, &own(&init_pre), &own(&init_post));

    // generated names must not collide with original ones
    let out = b.build().map_err(|e| PcpError::Invalid(format!("name clash in translated game: {e}")))?;
    let mut kinds = vec![PlaceKind::Env; out.num_places()];
    for (name, kind) in kinds_by_name {
        kinds[out.place_id(&name).expect("added").idx()] = kind;
    }
    let good = good.iter().map(|p| remap(p, net, &out)).collect();
    Ok(PetriGame::new(out, kinds, WinningCondition::GoodMarkings(good))?)
}

/// Expands the bad patterns (within `bound` and `cap`) and translates.
pub fn good_bad_to_good(game: &PetriGame, bound: u32, cap: usize) -> Result<PetriGame, PcpError> {
    let bad = expand_bad_markings(game, bound, cap)?;
    good_bad_to_good_with(game, &bad)
}

/// How the sampler picks the next transition of the translated game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Scheduler {
    /// Original transitions first, then moves into the sink, then returns.
    Lazy,
    /// Uniform among all enabled transitions.
    Uniform,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ProjectionReport {
    pub plays: usize,
    pub into_sink: usize,
    /// Plays cut off by the step limit before becoming maximal.
    pub truncated: usize,
    /// Firing sequences (original transitions only) of sink-avoiding plays
    /// that meet a bad marking of the original game.
    pub violations: Vec<Vec<String>>,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Tier {
    Original,
    Sink,
    Return,
}

/// Samples maximal plays of `translated` and projects the sink-avoiding
/// ones onto `original`.
pub fn sample_projections(
    original: &PetriGame,
    translated: &PetriGame,
    plays: usize,
    max_steps: usize,
    seed: u64,
    scheduler: Scheduler,
) -> Result<ProjectionReport, PcpError> {
    let net = &translated.net;
    let sink = net.place_id(SINK).ok_or_else(|| PcpError::Invalid("no sink place".into()))?;
    let tier = |t: TransId| {
        let name = &net.transition(t).name;
        if name.starts_with("bad.") {
            Tier::Sink
        } else if name.starts_with("tau.") {
            Tier::Return
        } else {
            // `init` counts as original so that it fires first
            Tier::Original
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ProjectionReport { plays, ..Default::default() };
    for _ in 0..plays {
        let mut m = net.initial().clone();
        let mut fired = Vec::new();
        let mut maximal = false;
        for _ in 0..max_steps {
            let enabled: Vec<TransId> = net.enabled_transitions(&m).collect();
            let Some(best) = enabled.iter().map(|&t| tier(t)).min() else {
                maximal = true;
                break;
            };
            let pool: Vec<TransId> = match scheduler {
                Scheduler::Lazy => enabled.into_iter().filter(|&t| tier(t) == best).collect(),
                Scheduler::Uniform => enabled,
            };
            let t = *pool.choose(&mut rng).expect("non-empty");
            m = net.fire(&m, t)?;
            fired.push(t);
        }
        if !maximal && net.enabled_transitions(&m).next().is_some() {
            report.truncated += 1;
        }
        if m.count(&sink) > 0 {
            report.into_sink += 1;
            continue;
        }
        let projected: Vec<String> = fired
            .iter()
            .map(|&t| net.transition(t).name.clone())
            .filter(|n| n != INIT && !n.starts_with("tau.") && !n.starts_with("bad."))
            .collect();
        let names: Vec<&str> = projected.iter().map(String::as_str).collect();
        let play = simulate_play(original, &names).map_err(|e| PcpError::NotEnabled(e.to_string()))?;
        if play.first_bad.is_some() {
            report.violations.push(projected);
        }
    }
    Ok(report)
}
