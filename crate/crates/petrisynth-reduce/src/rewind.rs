//! Decision markings reachable by undoing recorded backward moves.
//!
//! A node of the rewind graph is a decision marking together with how much
//! of every player's backward-move sequence is still left. A move can be
//! undone when it is the last remaining entry of each of its owners and its
//! post-tuples are all present.

use std::collections::{BTreeMap, HashSet, VecDeque};

use crate::ctx::Ctx;
use crate::error::ReduceError;
use crate::types::{BackMove, DTuple, Nes};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RewindNode {
    pub dm: Vec<DTuple>,
    /// Remaining length of each player's sequence (index `id - 1`).
    pub lens: Vec<u32>,
}

fn contains_all(dm: &[DTuple], part: &[DTuple]) -> bool {
    part.iter().all(|d| dm.binary_search_by_key(&d.id, |x| x.id).is_ok_and(|i| dm[i] == *d))
}

/// Undo `mv` on `dm` (the caller checked applicability).
pub fn undo(dm: &[DTuple], mv: &BackMove) -> Vec<DTuple> {
    let mut out: Vec<DTuple> = dm.iter().filter(|d| !mv.post.contains(d)).copied().collect();
    out.extend(mv.pre.iter().copied());
    out.sort();
    out
}

/// Redo `mv` on `dm`: the inverse of [`undo`].
pub fn redo(dm: &[DTuple], mv: &BackMove) -> Vec<DTuple> {
    let mut out: Vec<DTuple> = dm.iter().filter(|d| !mv.pre.contains(d)).copied().collect();
    out.extend(mv.post.iter().copied());
    out.sort();
    out
}

/// Indices of the moves that can be undone from `node`.
fn applicable(moves: &[BackMove], bm: &[Vec<u32>], node: &RewindNode, only_true: bool) -> Vec<u32> {
    let mut out = Vec::new();
    for (i, seq) in bm.iter().enumerate() {
        let len = node.lens[i] as usize;
        if len == 0 {
            continue;
        }
        let m = seq[len - 1];
        if out.contains(&m) {
            continue;
        }
        let mv = &moves[m as usize];
        let last_for_all = mv.owners.iter().all(|&o| {
            let l = node.lens[o as usize - 1] as usize;
            l > 0 && bm[o as usize - 1][l - 1] == m
        });
        if !last_for_all || !contains_all(&node.dm, &mv.post) {
            continue;
        }
        if only_true && !mv.pre.iter().all(|d| d.nes == Nes::True) {
            continue;
        }
        out.push(m);
    }
    out
}

/// All rewind nodes reachable from `dm` with sequences `bm`, in BFS order
/// (the start node first). With `only_true`, only moves made entirely by
/// players inside a loop (all pre-tuples with status `True`) are undone.
pub fn rewind(
    ctx: &Ctx<'_>,
    dm: &[DTuple],
    bm: &[Vec<u32>],
    only_true: bool,
) -> Result<Vec<RewindNode>, ReduceError> {
    let start = RewindNode { dm: dm.to_vec(), lens: bm.iter().map(|s| s.len() as u32).collect() };
    let mut seen = HashSet::new();
    seen.insert(start.clone());
    let mut order = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        for m in applicable(&ctx.moves, bm, &node, only_true) {
            let mv = &ctx.moves[m as usize];
            let mut lens = node.lens.clone();
            for &o in &mv.owners {
                lens[o as usize - 1] -= 1;
            }
            let next = RewindNode { dm: undo(&node.dm, mv), lens };
            if seen.insert(next.clone()) {
                if order.len() >= ctx.opts.max_rewind {
                    return Err(ReduceError::RewindCap(ctx.opts.max_rewind));
                }
                order.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(order)
}

/// Detects a loop that was taken twice without any player learning more:
/// four rewind nodes with equal decision markings whose remaining lengths
/// are ordered `l1 <= l2 <= l3 <= l4` (componentwise, `l1 != l2`,
/// `l3 != l4`) and whose per-player segments `l1..l2` and `l3..l4` coincide.
pub fn useless_repetition(nodes: &[RewindNode], bm: &[Vec<u32>]) -> bool {
    let mut groups: BTreeMap<&[DTuple], Vec<&[u32]>> = BTreeMap::new();
    for n in nodes {
        groups.entry(&n.dm).or_default().push(&n.lens);
    }
    let le = |a: &[u32], b: &[u32]| a.iter().zip(b).all(|(x, y)| x <= y);
    let segment = |a: &[u32], b: &[u32]| -> Vec<Vec<u32>> {
        bm.iter().enumerate().map(|(i, s)| s[a[i] as usize..b[i] as usize].to_vec()).collect()
    };
    for lens in groups.values() {
        if lens.len() < 3 {
            continue;
        }
        // pairs (a, b) with a < b, keyed by their segment
        let mut pairs: Vec<(&[u32], &[u32], Vec<Vec<u32>>)> = Vec::new();
        for &a in lens {
            for &b in lens {
                if a != b && le(a, b) {
                    pairs.push((a, b, segment(a, b)));
                }
            }
        }
        for (a1, b1, s1) in &pairs {
            for (a2, b2, s2) in &pairs {
                if s1 == s2 && le(b1, a2) && (a1, b1) != (a2, b2) {
                    return true;
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repetition_needs_two_equal_segments() {
        let bm = vec![vec![0, 1, 0, 1]];
        let node = |l: u32| RewindNode { dm: vec![], lens: vec![l] };
        // lengths 0, 2, 4 share the same decision marking: [0,1] twice
        assert!(useless_repetition(&[node(4), node(2), node(0)], &bm));
        // only one loop
        assert!(!useless_repetition(&[node(2), node(0)], &bm));
        // different segments
        let bm2 = vec![vec![0, 1, 2, 3]];
        assert!(!useless_repetition(&[node(4), node(2), node(0)], &bm2));
    }
}
