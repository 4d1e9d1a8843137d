//! Outgoing edges of arena states.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use itertools::Itertools;
use petrisynth_net::{Marking, PlaceId, TransId};

use crate::classify::{classify_state, corresponds_to_mcut};
use crate::ctx::Ctx;
use crate::error::ReduceError;
use crate::rewind::rewind;
use crate::types::{
    marking_of, BackMove, DTuple, Decision, EdgeInfo, EdgeKind, Firing, Flags, MoveKind, Nes, Node, State,
};

/// Result of expanding one state.
#[derive(Clone, Debug)]
pub struct Expansion {
    /// Flags, for states without undecided players.
    pub flags: Option<Flags>,
    pub mcut: bool,
    pub edges: Vec<(EdgeInfo, Node)>,
}

/// The initial state: one undecided player per initial system token (ids in
/// place order), the environment player, nothing to repeat, no history.
pub fn initial_state(ctx: &Ctx<'_>) -> State {
    let mut dm = Vec::new();
    let mut next = 1u8;
    for (&p, &n) in ctx.game.net.initial().iter() {
        if ctx.is_env(p) {
            for _ in 0..n {
                dm.push(ctx.env_tuple(p));
            }
        } else {
            for _ in 0..n {
                dm.push(DTuple { id: next, place: p, nes: Nes::False, dec: Decision::Top, lmc: 1 });
                next += 1;
            }
        }
    }
    dm.sort();
    State { dm, mt2: Marking::new(), bm: vec![Vec::new(); ctx.max_s as usize] }
}

pub fn expand(ctx: &mut Ctx<'_>, state: &State) -> Result<Expansion, ReduceError> {
    if state.has_top() {
        return Ok(Expansion { flags: None, mcut: false, edges: top_edges(ctx, state)? });
    }
    let mcut = corresponds_to_mcut(ctx, &state.dm);
    let (flags, _) = classify_state(ctx, state)?;
    let edges = if flags.losing() {
        vec![(EdgeInfo { kind: EdgeKind::StopBad, firing: None }, Node::Bad)]
    } else if flags.term {
        vec![(EdgeInfo { kind: EdgeKind::StopGood, firing: None }, Node::Good)]
    } else if state.has_true() {
        nes_edges(ctx, state)?
    } else if mcut {
        mcut_edges(ctx, state)?
    } else {
        sys_edges(ctx, state)?
    };
    Ok(Expansion { flags: Some(flags), mcut, edges })
}

/// Every subset of the postset of `p`, as masks.
fn masks(ctx: &Ctx<'_>, p: PlaceId) -> std::ops::RangeInclusive<u64> {
    0..=ctx.full_mask(p)
}

fn subsets(n: usize) -> impl Iterator<Item = u64> {
    0..(1u64 << n)
}

fn lowest_free(used: &BTreeSet<u8>, max_s: u8) -> Result<u8, ReduceError> {
    (1..=max_s).find(|i| !used.contains(i)).ok_or_else(|| ReduceError::Invariant("no free player id".into()))
}

/// Where the consumed tuples `c` go when `t` fires: `(id, place)` for every
/// produced token (id 0 for the environment). Participants keep their id;
/// created players get the lowest free ids not used by `rest`.
fn transit_targets(
    ctx: &Ctx<'_>,
    t: TransId,
    c: &[DTuple],
    rest: &[DTuple],
) -> Result<Vec<(u8, PlaceId)>, ReduceError> {
    let mut pool: Vec<Option<&DTuple>> = c.iter().map(Some).collect();
    let mut moved = Vec::new();
    let mut created = Vec::new();
    for &(src, dst) in ctx.transit(t) {
        match (src, dst) {
            (Some(p), dst) => {
                let slot = pool
                    .iter_mut()
                    .find(|d| d.is_some_and(|d| d.place == p))
                    .ok_or_else(|| ReduceError::Invariant(format!("transit source {} unmatched", ctx.place_name(p))))?;
                let d = slot.take().expect("matched slot");
                if let Some(q) = dst {
                    moved.push((d.id, q));
                }
            }
            (None, Some(q)) => created.push(q),
            (None, None) => {}
        }
    }
    let mut used: BTreeSet<u8> = rest.iter().map(|d| d.id).chain(moved.iter().map(|&(id, _)| id)).collect();
    used.remove(&0);
    for q in created {
        if ctx.is_env(q) {
            moved.push((0, q));
        } else {
            let id = lowest_free(&used, ctx.max_s)?;
            used.insert(id);
            moved.push((id, q));
        }
    }
    moved.sort();
    Ok(moved)
}

fn split(dm: &[DTuple], idx: &[usize]) -> (Vec<DTuple>, Vec<DTuple>) {
    let chosen = idx.iter().map(|&i| dm[i]).collect();
    let rest = (0..dm.len()).filter(|i| !idx.contains(i)).map(|i| dm[i]).collect();
    (chosen, rest)
}

fn sorted(mut v: Vec<DTuple>) -> Vec<DTuple> {
    v.sort();
    v
}

fn true_marking(dm: &[DTuple]) -> Marking {
    marking_of(dm.iter().filter(|d| d.nes == Nes::True))
}

fn append_moves(ctx: &Ctx<'_>, bm: &mut [Vec<u32>], owners: &[u8], moves: &[u32]) -> Result<(), ReduceError> {
    for &o in owners {
        let seq = &mut bm[o as usize - 1];
        seq.extend_from_slice(moves);
        if seq.len() > ctx.opts.max_bm {
            return Err(ReduceError::BmCap(ctx.opts.max_bm));
        }
    }
    Ok(())
}

fn firing(c: &[DTuple], post: &[DTuple]) -> Firing {
    Firing { pre_ids: c.iter().map(|d| d.id).collect(), post: post.iter().map(|d| (d.id, d.place)).collect() }
}

/// Resolves every undecided player and lets system players enter a loop.
fn top_edges(ctx: &mut Ctx<'_>, state: &State) -> Result<Vec<(EdgeInfo, Node)>, ReduceError> {
    let dm = &state.dm;
    let tops: Vec<usize> = (0..dm.len()).filter(|&i| dm[i].dec == Decision::Top).collect();
    let can_flip = !state.has_end();
    let flippable: Vec<usize> =
        if can_flip { (0..dm.len()).filter(|&i| dm[i].id != 0 && dm[i].nes == Nes::False).collect() } else { vec![] };
    let choices: Vec<Vec<u64>> = tops.iter().map(|&i| masks(ctx, dm[i].place).collect()).collect();
    let mut out = Vec::new();
    for decision in choices.into_iter().multi_cartesian_product() {
        let mut decided = dm.clone();
        for (&i, &mask) in tops.iter().zip(&decision) {
            decided[i].dec = Decision::Set(mask);
        }
        for flips in subsets(flippable.len()) {
            let mut next = decided.clone();
            let mut bm = state.bm.clone();
            let mut before = Vec::new();
            let mut after = Vec::new();
            for (k, &i) in flippable.iter().enumerate() {
                if flips >> k & 1 == 1 {
                    next[i].nes = Nes::True;
                    // players with a history need a move to undo the flip
                    if !state.bm[next[i].id as usize - 1].is_empty() {
                        before.push(decided[i]);
                        after.push(next[i]);
                    }
                }
            }
            if !before.is_empty() {
                let owners: Vec<u8> = before.iter().map(|d| d.id).collect();
                let m = ctx.intern(BackMove { kind: MoveKind::NesBoundary, pre: before, post: after, owners: owners.clone() });
                append_moves(ctx, &mut bm, &owners, &[m])?;
            }
            let mt2 = true_marking(&next);
            out.push((EdgeInfo { kind: EdgeKind::Top, firing: None }, Node::State(State { dm: next, mt2, bm })));
        }
    }
    Ok(out)
}

/// Fires a transition between system players outside loops.
fn sys_edges(ctx: &mut Ctx<'_>, state: &State) -> Result<Vec<(EdgeInfo, Node)>, ReduceError> {
    let dm = &state.dm;
    let mut out = Vec::new();
    let ts: Vec<TransId> = ctx.game.net.transition_ids().filter(|&t| ctx.sys_only(t)).collect();
    for t in ts {
        for idx in ctx.instances(dm, t, |_| true) {
            let (c, rest) = split(dm, &idx);
            let lmc = c.iter().map(|d| d.lmc).max().unwrap_or(1);
            let targets = transit_targets(ctx, t, &c, &rest)?;
            if targets.iter().any(|&(id, _)| id == 0) {
                return Err(ReduceError::Invariant(format!("{} creates an environment token", ctx.trans_name(t))));
            }
            let choices: Vec<Vec<u64>> = targets.iter().map(|&(_, p)| masks(ctx, p).collect()).collect();
            for decision in choices.into_iter().multi_cartesian_product() {
                let pc: Vec<DTuple> = targets
                    .iter()
                    .zip(&decision)
                    .map(|(&(id, place), &mask)| DTuple { id, place, nes: Nes::False, dec: Decision::Set(mask), lmc })
                    .collect();
                let mid = sorted(rest.iter().chain(&pc).copied().collect());
                let flippable: Vec<usize> = if mid.iter().any(|d| d.nes == Nes::End) {
                    vec![]
                } else {
                    (0..mid.len()).filter(|&i| mid[i].id != 0).collect()
                };
                for flips in subsets(flippable.len()) {
                    let mut next = mid.clone();
                    for (k, &i) in flippable.iter().enumerate() {
                        if flips >> k & 1 == 1 {
                            next[i].nes = Nes::True;
                        }
                    }
                    let pc_final: Vec<DTuple> =
                        pc.iter().map(|d| *next.iter().find(|x| x.id == d.id).expect("pc in next")).collect();
                    let pc_ids: BTreeSet<u8> = pc.iter().map(|d| d.id).collect();
                    let (was, now): (Vec<DTuple>, Vec<DTuple>) = mid
                        .iter()
                        .zip(&next)
                        .filter(|(a, b)| a != b && !pc_ids.contains(&a.id))
                        .map(|(a, b)| (*a, *b))
                        .unzip();
                    let owners: Vec<u8> = c
                        .iter()
                        .map(|d| d.id)
                        .chain(pc_ids.iter().copied())
                        .chain(was.iter().map(|d| d.id))
                        .collect::<BTreeSet<u8>>()
                        .into_iter()
                        .collect();
                    let mut ms = vec![ctx.intern(BackMove {
                        kind: MoveKind::Transition(t),
                        pre: c.clone(),
                        post: pc_final.clone(),
                        owners: owners.clone(),
                    })];
                    if !was.is_empty() {
                        ms.push(ctx.intern(BackMove {
                            kind: MoveKind::NesBoundary,
                            pre: was,
                            post: now,
                            owners: owners.clone(),
                        }));
                    }
                    let mut bm = state.bm.clone();
                    append_moves(ctx, &mut bm, &owners, &ms)?;
                    let mt2 = true_marking(&next);
                    out.push((
                        EdgeInfo { kind: EdgeKind::Sys(t), firing: Some(firing(&c, &pc_final)) },
                        Node::State(State { dm: next, mt2, bm }),
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Drops, per sequence, everything up to the most recent move that some of
/// its owners no longer hold; such moves can never be undone again.
fn prune(bm: &mut [Vec<u32>], moves: &[BackMove]) {
    loop {
        let mut changed = false;
        for i in 0..bm.len() {
            let dead = (0..bm[i].len()).rev().find(|&j| {
                let m = bm[i][j];
                moves[m as usize].owners.iter().any(|&o| !bm[o as usize - 1].contains(&m))
            });
            if let Some(j) = dead {
                bm[i].drain(..=j);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

/// Lets the environment fire from an mcut.
fn mcut_edges(ctx: &mut Ctx<'_>, state: &State) -> Result<Vec<(EdgeInfo, Node)>, ReduceError> {
    if !state.mt2.is_empty() {
        return Err(ReduceError::Invariant("marking to repeat is not empty at an mcut".into()));
    }
    let dm = &state.dm;
    let mut out = Vec::new();
    let ts: Vec<TransId> = ctx.game.net.transition_ids().filter(|&t| !ctx.sys_only(t)).collect();
    for t in ts {
        for idx in ctx.instances(dm, t, |_| true) {
            let (c, rest) = split(dm, &idx);
            let targets = transit_targets(ctx, t, &c, &rest)?;
            let mut bm = state.bm.clone();
            for id in c.iter().map(|d| d.id).chain(targets.iter().map(|&(id, _)| id)) {
                if id != 0 {
                    bm[id as usize - 1].clear();
                }
            }
            prune(&mut bm, &ctx.moves);

            // order-preserving renumbering of the last-mcut tags still in use
            let mut used: BTreeSet<u8> = rest.iter().filter(|d| d.id != 0).map(|d| d.lmc).collect();
            for seq in &bm {
                for &m in seq {
                    let mv = &ctx.moves[m as usize];
                    used.extend(mv.pre.iter().chain(&mv.post).map(|d| d.lmc));
                }
            }
            let rank: BTreeMap<u8, u8> = used.iter().enumerate().map(|(i, &k)| (k, i as u8 + 1)).collect();
            let relabel = |d: &DTuple| if d.id == 0 { *d } else { DTuple { lmc: rank[&d.lmc], ..*d } };
            let mut next: Vec<DTuple> = rest.iter().map(relabel).collect();
            if rank.iter().any(|(a, b)| a != b) {
                let mut memo = BTreeMap::new();
                for seq in bm.iter_mut() {
                    for m in seq.iter_mut() {
                        if let Some(&n) = memo.get(m) {
                            *m = n;
                            continue;
                        }
                        let mv = ctx.moves[*m as usize].clone();
                        let n = ctx.intern(BackMove {
                            pre: mv.pre.iter().map(relabel).collect(),
                            post: mv.post.iter().map(relabel).collect(),
                            ..mv
                        });
                        memo.insert(*m, n);
                        *m = n;
                    }
                }
            }
            let k = used.len() as u8 + 1;
            let mut post = Vec::new();
            for &(id, place) in &targets {
                let d = if id == 0 {
                    ctx.env_tuple(place)
                } else {
                    DTuple { id, place, nes: Nes::False, dec: Decision::Top, lmc: k }
                };
                post.push(d);
                next.push(d);
            }
            let next = sorted(next);
            out.push((
                EdgeInfo { kind: EdgeKind::Mcut(t), firing: Some(firing(&c, &post)) },
                Node::State(State { dm: next, mt2: Marking::new(), bm }),
            ));
        }
    }
    Ok(out)
}

/// Fires transitions inside a loop and decides whether it closes.
fn nes_edges(ctx: &mut Ctx<'_>, state: &State) -> Result<Vec<(EdgeInfo, Node)>, ReduceError> {
    let dm = &state.dm;
    let looping: Vec<DTuple> = dm.iter().filter(|d| d.nes == Nes::True).copied().collect();
    let nodes = rewind(ctx, &looping, &state.bm, true)?;
    let visited: Vec<Marking> = nodes.iter().map(|n| true_marking(&n.dm)).collect();
    let everyone_moved = state.mt2.support().all(|p| visited.iter().any(|m| m.count(p) == 0));
    let seen: HashSet<Marking> = visited.into_iter().collect();
    let mut out = Vec::new();
    let ts: Vec<TransId> = ctx.game.net.transition_ids().filter(|&t| ctx.sys_only(t)).collect();
    for t in ts {
        for idx in ctx.instances(dm, t, |d| d.nes == Nes::True) {
            let (c, rest) = split(dm, &idx);
            let lmc = c.iter().map(|d| d.lmc).max().unwrap_or(1);
            let targets = transit_targets(ctx, t, &c, &rest)?;
            let choices: Vec<Vec<u64>> = targets.iter().map(|&(_, p)| masks(ctx, p).collect()).collect();
            for decision in choices.into_iter().multi_cartesian_product() {
                let pc: Vec<DTuple> = targets
                    .iter()
                    .zip(&decision)
                    .map(|(&(id, place), &mask)| DTuple { id, place, nes: Nes::True, dec: Decision::Set(mask), lmc })
                    .collect();
                let next = sorted(rest.iter().chain(&pc).copied().collect());
                let reached = true_marking(&next);
                let pc_ids: BTreeSet<u8> = pc.iter().map(|d| d.id).collect();
                let base: Vec<u8> =
                    c.iter().map(|d| d.id).chain(pc_ids.iter().copied()).collect::<BTreeSet<_>>().into_iter().collect();
                if !seen.contains(&reached) {
                    let m = ctx.intern(BackMove {
                        kind: MoveKind::Transition(t),
                        pre: c.clone(),
                        post: pc.clone(),
                        owners: base.clone(),
                    });
                    let mut bm = state.bm.clone();
                    append_moves(ctx, &mut bm, &base, &[m])?;
                    out.push((
                        EdgeInfo { kind: EdgeKind::NesFire(t), firing: Some(firing(&c, &pc)) },
                        Node::State(State { dm: next, mt2: state.mt2.clone(), bm }),
                    ));
                } else if reached == state.mt2 && everyone_moved {
                    let ended: Vec<DTuple> = next
                        .iter()
                        .map(|d| if d.nes == Nes::True { DTuple { nes: Nes::End, ..*d } } else { *d })
                        .collect();
                    let pc_end: Vec<DTuple> = pc.iter().map(|d| DTuple { nes: Nes::End, ..*d }).collect();
                    let (was, now): (Vec<DTuple>, Vec<DTuple>) = next
                        .iter()
                        .zip(&ended)
                        .filter(|(a, b)| a != b && !pc_ids.contains(&a.id))
                        .map(|(a, b)| (*a, *b))
                        .unzip();
                    let owners: Vec<u8> = base
                        .iter()
                        .copied()
                        .chain(was.iter().map(|d| d.id))
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .collect();
                    let mut ms = vec![ctx.intern(BackMove {
                        kind: MoveKind::Transition(t),
                        pre: c.clone(),
                        post: pc_end.clone(),
                        owners: owners.clone(),
                    })];
                    if !was.is_empty() {
                        ms.push(ctx.intern(BackMove {
                            kind: MoveKind::NesBoundary,
                            pre: was,
                            post: now,
                            owners: owners.clone(),
                        }));
                    }
                    let mut bm = state.bm.clone();
                    append_moves(ctx, &mut bm, &owners, &ms)?;
                    out.push((
                        EdgeInfo { kind: EdgeKind::NesFinish(t), firing: Some(firing(&c, &pc_end)) },
                        Node::State(State { dm: ended, mt2: Marking::new(), bm }),
                    ));
                } else {
                    out.push((EdgeInfo { kind: EdgeKind::NesBad(t), firing: Some(firing(&c, &pc)) }, Node::Bad));
                }
            }
        }
    }
    Ok(out)
}
