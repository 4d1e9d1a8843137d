//! Seeded random arenas and a brute-force reference solver for small ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Arena, Player};

/// An arena with `1..=max_states` states and `1..=max_out` distinct
/// successors per state, reproducible from `seed`.
pub fn random_arena(seed: u64, max_states: usize, max_out: usize) -> Arena {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_states);
    let mut a = Arena::default();
    for _ in 0..n {
        let owner = if rng.gen_bool(0.5) { Player::P0 } else { Player::P1 };
        let acc = rng.gen_bool(0.35);
        a.add_state(owner, acc);
    }
    for v in 0..n {
        let k = rng.gen_range(1..=max_out.min(n));
        let mut out: Vec<usize> = Vec::with_capacity(k);
        while out.len() < k {
            let w = rng.gen_range(0..n);
            if !out.contains(&w) {
                out.push(w);
            }
        }
        a.succ[v] = out;
    }
    a
}

/// Player-0 winning region by exhaustive search over memoryless strategy
/// pairs (Büchi games are memoryless determined, so this is exact).
/// Exponential: intended for arenas with a handful of states.
pub fn brute_force_win0(arena: &Arena) -> Vec<bool> {
    let n = arena.len();
    let p0: Vec<usize> = (0..n).filter(|&v| arena.owner[v] == Player::P0).collect();
    let p1: Vec<usize> = (0..n).filter(|&v| arena.owner[v] == Player::P1).collect();
    let mut win = vec![false; n];
    let mut choice = vec![0usize; n];
    for_each_choice(arena, &p0, &mut choice, &mut |choice0| {
        let mut beats_all = vec![true; n];
        let mut c = choice0.to_vec();
        for_each_choice(arena, &p1, &mut c, &mut |full| {
            for (s, b) in beats_all.iter_mut().enumerate() {
                if *b && !lasso_accepting(arena, full, s) {
                    *b = false;
                }
            }
        });
        for v in 0..n {
            win[v] |= beats_all[v];
        }
    });
    win
}

fn for_each_choice(arena: &Arena, states: &[usize], choice: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    fn rec(arena: &Arena, states: &[usize], i: usize, choice: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if i == states.len() {
            f(choice);
            return;
        }
        let v = states[i];
        for k in 0..arena.succ[v].len() {
            choice[v] = k;
            rec(arena, states, i + 1, choice, f);
        }
    }
    rec(arena, states, 0, choice, f);
}

/// Follows the unique play fixed by `choice` from `start` and reports whether
/// its cycle contains an accepting state.
fn lasso_accepting(arena: &Arena, choice: &[usize], start: usize) -> bool {
    let n = arena.len();
    let mut seen_at = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut v = start;
    while seen_at[v] == usize::MAX {
        seen_at[v] = path.len();
        path.push(v);
        v = arena.succ[v][choice[v]];
    }
    path[seen_at[v]..].iter().any(|&w| arena.accepting[w])
}
