//! Terminal and losing conditions of arena states.

use crate::ctx::Ctx;
use crate::error::ReduceError;
use crate::rewind::{rewind, useless_repetition, RewindNode};
use crate::types::{marking_of, DTuple, Decision, Flags, Nes, State};

/// No undecided player, nobody inside a loop, and every transition between
/// system players alone is either disabled or refused.
pub fn corresponds_to_mcut(ctx: &Ctx<'_>, dm: &[DTuple]) -> bool {
    if dm.iter().any(|d| d.dec == Decision::Top || d.nes == Nes::True) {
        return false;
    }
    ctx.game
        .net
        .transition_ids()
        .filter(|&t| ctx.sys_only(t))
        .all(|t| !ctx.enabled_allowed(dm, t, |_| true))
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul((n - i) as u64) / (i as u64 + 1))
}

/// Number of distinct enabled firings the system player `d` takes part in.
pub fn player_instances(ctx: &Ctx<'_>, dm: &[DTuple], d: &DTuple) -> u64 {
    let mut total = 0u64;
    for t in ctx.allowed(d) {
        if !ctx.enabled_allowed(dm, t, |_| true) {
            continue;
        }
        let mut ways = 1u64;
        for &(q, w) in ctx.pre(t) {
            let n = dm.iter().filter(|x| x.place == q && ctx.allows(x, t)).count();
            let (n, w) = if q == d.place { (n - 1, w as usize - 1) } else { (n, w as usize) };
            ways = ways.saturating_mul(binomial(n, w));
        }
        total = total.saturating_add(ways);
    }
    total
}

fn nondeterministic(ctx: &Ctx<'_>, dm: &[DTuple]) -> bool {
    dm.iter().any(|d| d.id != 0 && player_instances(ctx, dm, d) > 1)
}

fn sync_with_outsiders(ctx: &Ctx<'_>, dm: &[DTuple]) -> bool {
    dm.iter().filter(|d| d.nes == Nes::True).any(|d| {
        ctx.allowed(d).into_iter().any(|t| {
            !ctx.enabled_allowed(dm, t, |x| x.nes == Nes::True) && ctx.enabled_allowed(dm, t, |_| true)
        })
    })
}

/// Evaluates all flags of a decided state. Returns the rewind nodes too, as
/// the caller may reuse them.
pub fn classify_state(ctx: &Ctx<'_>, state: &State) -> Result<(Flags, Vec<RewindNode>), ReduceError> {
    debug_assert!(!state.has_top());
    let dm = &state.dm;
    let transitions: Vec<_> = ctx.game.net.transition_ids().collect();
    let live = marking_of(dm.iter().filter(|d| d.nes != Nes::End));
    let term = transitions.iter().all(|&t| !ctx.game.net.enabled(&live, t));
    let dl = transitions.iter().all(|&t| !ctx.enabled_allowed(dm, t, |_| true));
    let has_true = state.has_true();
    let dl_t2 = has_true && transitions.iter().all(|&t| !ctx.enabled_allowed(dm, t, |d| d.nes == Nes::True));
    let van_t2 = !state.mt2.is_empty() && !has_true;

    let nodes = rewind(ctx, dm, &state.bm, false)?;
    let mut flags = Flags { term, dl, dl_t2, van_t2, ..Flags::default() };
    for n in &nodes {
        flags.bad |= ctx.game.is_bad_marking(&marking_of(&n.dm));
        flags.ndet |= nondeterministic(ctx, &n.dm);
        flags.sync_t2 |= sync_with_outsiders(ctx, &n.dm);
    }
    flags.ur = useless_repetition(&nodes, &state.bm);
    Ok((flags, nodes))
}

#[cfg(test)]
mod tests {
    use super::binomial;

    #[test]
    fn binomials() {
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(1, 0), 1);
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(2, 3), 0);
    }
}
