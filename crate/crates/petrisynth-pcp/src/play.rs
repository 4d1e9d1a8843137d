//! Replaying a candidate PCP solution as a turn-taking play.
//!
//! The environment decides first. Afterwards player 1 runs up to and
//! including its next output of the kind the environment checks (index or
//! letter), then player 2 does the same, and so on; once a player has no
//! such outputs left it runs to termination.

use petrisynth_net::PetriGame;
use petrisynth_strategy::simulate_play;
use serde::Serialize;

use crate::error::PcpError;
use crate::gen::{Check, EnvChoice, Label, PcpPlace, PcpTransition, Pos};
use crate::instance::PcpInstance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PlayVerdict {
    GoodBeforeBad,
    BadFirst,
    NeitherReached,
}

impl PlayVerdict {
    /// Higher is worse for the system players.
    fn severity(self) -> u8 {
        match self {
            PlayVerdict::GoodBeforeBad => 0,
            PlayVerdict::NeitherReached => 1,
            PlayVerdict::BadFirst => 2,
        }
    }
}

/// Outcome of replaying a sequence under one environment decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlayReport {
    pub verdict: PlayVerdict,
    pub env: EnvChoice,
    pub firing: Vec<String>,
}

/// The transitions player `k` fires to output `seq` and terminate.
fn player_run(inst: &PcpInstance, k: u8, seq: &[usize]) -> Vec<PcpTransition> {
    let mut cur = PcpPlace { player: k, pos: Pos::Start, index: 0, letter: 0 };
    let mut out = Vec::new();
    let mut step = |label: Label, dst: PcpPlace, cur: &mut PcpPlace| {
        out.push(PcpTransition { label, src: *cur, dst });
        *cur = dst;
    };
    for &i in seq {
        let dst = PcpPlace { pos: Pos::Index(i), index: (cur.index + 1) % 3, ..cur };
        step(Label::Index(i), dst, &mut cur);
        for (j, &l) in inst.words(k)[i].iter().enumerate() {
            let dst = PcpPlace { pos: Pos::Letter(i, j, l), letter: (cur.letter + 1) % 3, ..cur };
            step(Label::Letter(l), dst, &mut cur);
        }
        step(Label::Tau, PcpPlace { pos: Pos::Choice, ..cur }, &mut cur);
    }
    step(Label::End, PcpPlace { pos: Pos::Term, ..cur }, &mut cur);
    out
}

fn is_checkpoint(t: &PcpTransition, check: Check) -> bool {
    matches!((t.label, check), (Label::Index(_), Check::Index) | (Label::Letter(_), Check::Letter))
}

/// The canonical firing sequence for `seq` under `env`.
pub fn canonical_firing(inst: &PcpInstance, seq: &[usize], env: EnvChoice) -> Result<Vec<String>, PcpError> {
    if seq.is_empty() {
        return Err(PcpError::EmptySequence);
    }
    if let Some(&i) = seq.iter().find(|&&i| i >= inst.len()) {
        return Err(PcpError::NoSuchIndex(i));
    }
    let runs = [player_run(inst, 1, seq), player_run(inst, 2, seq)];
    let mut pos = [0, 0];
    let mut firing = vec![env.transition()];
    while pos[0] < runs[0].len() || pos[1] < runs[1].len() {
        for k in 0..2 {
            while let Some(t) = runs[k].get(pos[k]) {
                firing.push(t.name());
                pos[k] += 1;
                if is_checkpoint(t, env.check) {
                    break;
                }
            }
        }
    }
    Ok(firing)
}

/// Replays `seq` under the environment decision `env`.
pub fn check_pcp_play_with(
    game: &PetriGame,
    inst: &PcpInstance,
    seq: &[usize],
    env: EnvChoice,
) -> Result<PlayReport, PcpError> {
    let firing = canonical_firing(inst, seq, env)?;
    let names: Vec<&str> = firing.iter().map(String::as_str).collect();
    let play = simulate_play(game, &names).map_err(|e| PcpError::NotEnabled(e.to_string()))?;
    let verdict = match (play.first_good, play.first_bad) {
        (Some(g), Some(b)) if b < g => PlayVerdict::BadFirst,
        (None, Some(_)) => PlayVerdict::BadFirst,
        (Some(_), _) => PlayVerdict::GoodBeforeBad,
        (None, None) => PlayVerdict::NeitherReached,
    };
    Ok(PlayReport { verdict, env, firing })
}

/// Replays `seq` under every environment decision and reports the worst
/// outcome for the system players (the first such decision on ties).
pub fn check_pcp_play(game: &PetriGame, inst: &PcpInstance, seq: &[usize]) -> Result<PlayReport, PcpError> {
    let mut worst: Option<PlayReport> = None;
    for env in EnvChoice::ALL {
        let r = check_pcp_play_with(game, inst, seq, env)?;
        if worst.as_ref().is_none_or(|w| r.verdict.severity() > w.verdict.severity()) {
            worst = Some(r);
        }
    }
    Ok(worst.expect("six decisions"))
}
