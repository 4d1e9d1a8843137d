//! Explicit two-player Büchi games.
//!
//! Player 0 wins a play if it visits an accepting state infinitely often.
//! [`solve`] computes both winning regions with the classic nested attractor
//! fixpoint and a memoryless Player-0 strategy; [`verify_certificate`]
//! re-checks a [`Solution`] without trusting the solver.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod random;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    P0,
    P1,
}

impl Player {
    pub fn opponent(self) -> Self {
        match self {
            Player::P0 => Player::P1,
            Player::P1 => Player::P0,
        }
    }
}

/// A finite game graph. Every state must have at least one successor.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arena {
    pub owner: Vec<Player>,
    pub succ: Vec<Vec<usize>>,
    pub accepting: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuchiError {
    #[error("state {0} has no successor")]
    DeadEnd(usize),
    #[error("state {state} has successor {succ} out of range")]
    BadEdge { state: usize, succ: usize },
    #[error("arena vectors have inconsistent lengths")]
    Shape,
    #[error("certificate rejected: {0}")]
    Certificate(String),
}

impl Arena {
    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn add_state(&mut self, owner: Player, accepting: bool) -> usize {
        self.owner.push(owner);
        self.accepting.push(accepting);
        self.succ.push(Vec::new());
        self.owner.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        self.succ[from].push(to);
    }

    pub fn num_edges(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn validate(&self) -> Result<(), BuchiError> {
        if self.succ.len() != self.owner.len() || self.accepting.len() != self.owner.len() {
            return Err(BuchiError::Shape);
        }
        for (v, out) in self.succ.iter().enumerate() {
            if out.is_empty() {
                return Err(BuchiError::DeadEnd(v));
            }
            if let Some(&w) = out.iter().find(|&&w| w >= self.len()) {
                return Err(BuchiError::BadEdge { state: v, succ: w });
            }
        }
        Ok(())
    }

    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (v, out) in self.succ.iter().enumerate() {
            for &w in out {
                pred[w].push(v);
            }
        }
        for p in &mut pred {
            p.sort_unstable();
            p.dedup();
        }
        pred
    }
}

/// Result of [`attractor`]: membership plus the BFS rank at which each state
/// was attracted (0 for the target itself).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attractor {
    pub member: Vec<bool>,
    pub rank: Vec<Option<u32>>,
}

/// States (inside `within`) from which `player` can force a visit to `target`.
/// Edges leaving `within` are ignored; `target` is intersected with `within`.
pub fn attractor(arena: &Arena, pred: &[Vec<usize>], player: Player, target: &[bool], within: &[bool]) -> Attractor {
    let n = arena.len();
    let mut member = vec![false; n];
    let mut rank = vec![None; n];
    // remaining successors inside `within` that are not yet attracted
    let mut escape: Vec<usize> = (0..n)
        .map(|v| if within[v] { arena.succ[v].iter().filter(|&&w| within[w]).count() } else { 0 })
        .collect();
    let mut queue = VecDeque::new();
    for v in 0..n {
        if within[v] && target[v] {
            member[v] = true;
            rank[v] = Some(0);
            queue.push_back(v);
        }
    }
    while let Some(w) = queue.pop_front() {
        let r = rank[w].expect("ranked");
        for &v in &pred[w] {
            if !within[v] || member[v] {
                continue;
            }
            // parallel edges count once per occurrence in succ
            let mult = arena.succ[v].iter().filter(|&&x| x == w).count();
            let attracted = if arena.owner[v] == player {
                true
            } else {
                escape[v] -= mult;
                escape[v] == 0
            };
            if attracted {
                member[v] = true;
                rank[v] = Some(r + 1);
                queue.push_back(v);
            }
        }
    }
    Attractor { member, rank }
}

/// Winning regions and a memoryless Player-0 strategy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub win0: Vec<bool>,
    /// Chosen successor for every Player-0 state in `win0`.
    pub strategy0: Vec<Option<usize>>,
}

impl Solution {
    pub fn win1(&self) -> Vec<bool> {
        self.win0.iter().map(|w| !w).collect()
    }
}

/// Solves the Büchi game: repeatedly removes the Player-1 attractor of the
/// states outside the Player-0 attractor of the accepting set.
///
/// The strategy moves accepting states to their lowest-indexed successor in
/// the winning region and every other winning state to its lowest-indexed
/// successor of strictly smaller attractor rank.
pub fn solve(arena: &Arena) -> Result<Solution, BuchiError> {
    arena.validate()?;
    let n = arena.len();
    let pred = arena.predecessors();
    let mut current = vec![true; n];
    let final_attr = loop {
        let target: Vec<bool> = (0..n).map(|v| current[v] && arena.accepting[v]).collect();
        let a = attractor(arena, &pred, Player::P0, &target, &current);
        let rest: Vec<bool> = (0..n).map(|v| current[v] && !a.member[v]).collect();
        if !rest.iter().any(|&b| b) {
            break a;
        }
        let b = attractor(arena, &pred, Player::P1, &rest, &current);
        for v in 0..n {
            if b.member[v] {
                current[v] = false;
            }
        }
    };
    let mut strategy0 = vec![None; n];
    for v in 0..n {
        if !current[v] || arena.owner[v] != Player::P0 {
            continue;
        }
        let mut cands: Vec<usize> = arena.succ[v].iter().copied().filter(|&w| current[w]).collect();
        if !arena.accepting[v] {
            let r = final_attr.rank[v].expect("winning states are ranked");
            cands.retain(|&w| final_attr.rank[w].is_some_and(|rw| rw < r));
        }
        strategy0[v] = cands.into_iter().min();
        debug_assert!(strategy0[v].is_some());
    }
    Ok(Solution { win0: current, strategy0 })
}

/// Independently checks a solution:
/// * `strategy0` is defined exactly on the Player-0 states of `win0`, follows
///   an edge, and stays in `win0`;
/// * every successor of a Player-1 state in `win0` is in `win0`;
/// * `win1` is a trap for Player 0 (Player-0 states in it have no edge into
///   `win0`; Player-1 states in it have some successor in `win1`);
/// * in the graph restricted to `win0` under `strategy0`, every cycle passes
///   through an accepting state.
pub fn verify_certificate(arena: &Arena, sol: &Solution) -> Result<(), BuchiError> {
    arena.validate()?;
    let n = arena.len();
    let bad = |msg: String| Err(BuchiError::Certificate(msg));
    if sol.win0.len() != n || sol.strategy0.len() != n {
        return bad("solution has wrong length".into());
    }
    for v in 0..n {
        match (sol.win0[v], arena.owner[v]) {
            (true, Player::P0) => match sol.strategy0[v] {
                Some(w) if arena.succ[v].contains(&w) && sol.win0[w] => {}
                other => return bad(format!("state {v}: strategy choice {other:?} invalid")),
            },
            (true, Player::P1) => {
                if let Some(&w) = arena.succ[v].iter().find(|&&w| !sol.win0[w]) {
                    return bad(format!("Player-1 state {v} escapes to {w}"));
                }
            }
            (false, Player::P0) => {
                if let Some(&w) = arena.succ[v].iter().find(|&&w| sol.win0[w]) {
                    return bad(format!("losing Player-0 state {v} could move to winning {w}"));
                }
            }
            (false, Player::P1) => {
                if arena.succ[v].iter().all(|&w| sol.win0[w]) {
                    return bad(format!("losing Player-1 state {v} cannot stay losing"));
                }
            }
        }
        if !sol.win0[v] && sol.strategy0[v].is_some() {
            return bad(format!("strategy defined on losing state {v}"));
        }
    }
    // cycle check on non-accepting winning states (Kahn's algorithm)
    let next = |v: usize| -> Vec<usize> {
        match arena.owner[v] {
            Player::P0 => sol.strategy0[v].into_iter().collect(),
            Player::P1 => arena.succ[v].clone(),
        }
    };
    let inside = |v: usize| sol.win0[v] && !arena.accepting[v];
    let mut indeg = vec![0usize; n];
    for v in (0..n).filter(|&v| inside(v)) {
        for w in next(v) {
            if inside(w) {
                indeg[w] += 1;
            }
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| inside(v) && indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(v) = queue.pop_front() {
        removed += 1;
        for w in next(v) {
            if inside(w) {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
    }
    let total = (0..n).filter(|&v| inside(v)).count();
    if removed != total {
        return bad("a cycle avoids every accepting state".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arena(spec: &[(Player, bool, &[usize])]) -> Arena {
        Arena {
            owner: spec.iter().map(|s| s.0).collect(),
            accepting: spec.iter().map(|s| s.1).collect(),
            succ: spec.iter().map(|s| s.2.to_vec()).collect(),
        }
    }

    #[test]
    fn player1_escape_to_rejecting_loop() {
        use Player::*;
        // 0 (P1) -> 1 accepting loop, or -> 2 rejecting loop
        let a = arena(&[(P1, false, &[1, 2]), (P0, true, &[1]), (P0, false, &[2])]);
        let s = solve(&a).unwrap();
        assert_eq!(s.win0, vec![false, true, false]);
        verify_certificate(&a, &s).unwrap();
    }

    #[test]
    fn player0_picks_the_accepting_branch() {
        use Player::*;
        let a = arena(&[(P0, false, &[2, 1]), (P0, true, &[0]), (P0, false, &[2])]);
        let s = solve(&a).unwrap();
        assert_eq!(s.win0, vec![true, true, false]);
        assert_eq!(s.strategy0[0], Some(1));
        verify_certificate(&a, &s).unwrap();
    }

    #[test]
    fn certificate_rejects_non_accepting_cycle() {
        use Player::*;
        let a = arena(&[(P0, false, &[1, 0]), (P0, true, &[0])]);
        let mut s = solve(&a).unwrap();
        s.strategy0[0] = Some(0);
        assert!(verify_certificate(&a, &s).is_err());
    }

    #[test]
    fn dead_end_rejected() {
        let a = arena(&[(Player::P0, true, &[])]);
        assert_eq!(solve(&a), Err(BuchiError::DeadEnd(0)));
    }
}
