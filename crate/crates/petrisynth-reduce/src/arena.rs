//! On-the-fly construction of the Büchi arena and losing-play diagnosis.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use petrisynth_buchi::{solve, verify_certificate, Arena, Player, Solution};
use petrisynth_net::{check_decidable_class, ClassReport, Marking, PetriGame, PlaceId, WinningCondition};
use serde::Serialize;

use crate::classify::{classify_state, corresponds_to_mcut, player_instances};
use crate::ctx::{Ctx, ReduceOptions};
use crate::error::ReduceError;
use crate::rewind::rewind;
use crate::successors::{expand, initial_state};
use crate::types::{marking_of, BackMove, DTuple, Decision, EdgeInfo, EdgeKind, Flags, Nes, Node, State};

/// Index of the accepting sink.
pub const GOOD: usize = 0;
/// Index of the rejecting sink.
pub const BAD: usize = 1;

/// The explored arena together with what each state and edge stands for.
#[derive(Clone, Debug)]
pub struct ReducedGame {
    pub arena: Arena,
    pub nodes: Vec<Node>,
    /// Parallel to `arena.succ`.
    pub edges: Vec<Vec<EdgeInfo>>,
    /// Further environment moves of mcut states whose target already has an
    /// edge. The strategy has to answer each of them.
    pub parallel: Vec<Vec<(usize, EdgeInfo)>>,
    pub flags: Vec<Option<Flags>>,
    pub mcut: Vec<bool>,
    pub moves: Vec<BackMove>,
    pub max_s: u8,
    pub initial: usize,
    pub class: ClassReport,
}

impl ReducedGame {
    pub fn state(&self, v: usize) -> Option<&State> {
        match &self.nodes[v] {
            Node::State(s) => Some(s),
            _ => None,
        }
    }

    pub fn edge_info(&self, v: usize, w: usize) -> Option<&EdgeInfo> {
        self.arena.succ[v].iter().position(|&x| x == w).map(|i| &self.edges[v][i])
    }

    /// A context sharing this arena's move table, for re-evaluating states.
    pub fn context<'g>(&self, game: &'g PetriGame, opts: ReduceOptions) -> Result<Ctx<'g>, ReduceError> {
        let mut ctx = Ctx::new(game, self.max_s as u32, opts)?;
        for mv in &self.moves {
            ctx.intern(mv.clone());
        }
        Ok(ctx)
    }
}

fn check_supported(game: &PetriGame) -> Result<(), ReduceError> {
    match game.winning {
        WinningCondition::BadPlaces(_) | WinningCondition::BadMarkings(_) => Ok(()),
        ref w => Err(ReduceError::Unsupported(w.kind_name())),
    }
}

struct Builder {
    arena: Arena,
    nodes: Vec<Node>,
    edges: Vec<Vec<EdgeInfo>>,
    parallel: Vec<Vec<(usize, EdgeInfo)>>,
    flags: Vec<Option<Flags>>,
    mcut: Vec<bool>,
    index: HashMap<State, usize>,
    queue: VecDeque<usize>,
}

impl Builder {
    fn new() -> Self {
        let mut arena = Arena::default();
        arena.add_state(Player::P1, true);
        arena.add_state(Player::P1, false);
        arena.add_edge(GOOD, GOOD);
        arena.add_edge(BAD, BAD);
        let lp = || vec![EdgeInfo { kind: EdgeKind::Loop, firing: None }];
        Self {
            arena,
            nodes: vec![Node::Good, Node::Bad],
            edges: vec![lp(), lp()],
            parallel: vec![vec![], vec![]],
            flags: vec![None, None],
            mcut: vec![false, false],
            index: HashMap::new(),
            queue: VecDeque::new(),
        }
    }

    fn add(&mut self, s: State, ctx: &Ctx<'_>) -> Result<usize, ReduceError> {
        if let Some(&v) = self.index.get(&s) {
            return Ok(v);
        }
        if self.nodes.len() >= ctx.opts.max_states {
            return Err(ReduceError::StateCap(ctx.opts.max_states));
        }
        let is_mcut = corresponds_to_mcut(ctx, &s.dm);
        let v = self.arena.add_state(if is_mcut { Player::P1 } else { Player::P0 }, is_mcut);
        self.index.insert(s.clone(), v);
        self.nodes.push(Node::State(s));
        self.edges.push(Vec::new());
        self.parallel.push(Vec::new());
        self.mcut.push(is_mcut);
        self.flags.push(None);
        self.queue.push_back(v);
        Ok(v)
    }
}

/// Explores the arena reachable from the initial state, breadth first.
pub fn build_arena(game: &PetriGame, opts: ReduceOptions) -> Result<ReducedGame, ReduceError> {
    check_supported(game)?;
    let class = check_decidable_class(game, opts.bound, opts.max_markings)?;
    let mut ctx = Ctx::new(game, class.max_s, opts)?;
    let mut b = Builder::new();
    let initial = b.add(initial_state(&ctx), &ctx)?;
    while let Some(v) = b.queue.pop_front() {
        let Node::State(state) = b.nodes[v].clone() else { unreachable!("sinks are never queued") };
        let exp = expand(&mut ctx, &state)?;
        b.flags[v] = exp.flags;
        let mut targets = BTreeSet::new();
        for (info, node) in exp.edges {
            let w = match node {
                Node::Good => GOOD,
                Node::Bad => BAD,
                Node::State(s) => b.add(s, &ctx)?,
            };
            if targets.insert(w) {
                b.arena.add_edge(v, w);
                b.edges[v].push(info);
            } else if exp.mcut && matches!(info.kind, EdgeKind::Mcut(_)) {
                b.parallel[v].push((w, info));
            }
        }
        if targets.is_empty() {
            return Err(ReduceError::Invariant(format!("state {v} has no successor")));
        }
    }
    Ok(ReducedGame {
        arena: b.arena,
        nodes: b.nodes,
        edges: b.edges,
        parallel: b.parallel,
        flags: b.flags,
        mcut: b.mcut,
        moves: ctx.moves,
        max_s: ctx.max_s,
        initial,
        class,
    })
}

/// Arena, its solution, and whether the system players win.
#[derive(Clone, Debug)]
pub struct Solved {
    pub reduced: ReducedGame,
    pub solution: Solution,
    pub winning: bool,
}

/// Builds and solves the arena; the solution is checked before returning.
pub fn solve_game(game: &PetriGame, opts: ReduceOptions) -> Result<Solved, ReduceError> {
    let reduced = build_arena(game, opts)?;
    let solution = solve(&reduced.arena)?;
    verify_certificate(&reduced.arena, &solution)?;
    let winning = solution.win0[reduced.initial];
    Ok(Solved { reduced, solution, winning })
}

/// Why a state loses, in terms of the game.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub flags: Vec<&'static str>,
    /// Bad markings among the markings reachable by rewinding.
    pub bad_markings: Vec<String>,
    /// Nondeterministic players: place and the rewound marking where it happens.
    pub nondeterministic: Vec<(String, String)>,
}

/// Rewinds state `v` again to name the offending markings and players.
pub fn witness(game: &PetriGame, rg: &ReducedGame, v: usize) -> Result<Witness, ReduceError> {
    let Some(state) = rg.state(v) else { return Ok(Witness::default()) };
    if state.has_top() {
        return Ok(Witness::default());
    }
    let ctx = rg.context(game, ReduceOptions::default())?;
    let (flags, nodes) = classify_state(&ctx, state)?;
    let mut w = Witness { flags: flags.names(), ..Witness::default() };
    for n in &nodes {
        let m = marking_of(&n.dm);
        let shown = game.net.show_marking(&m);
        if flags.bad && game.is_bad_marking(&m) && !w.bad_markings.contains(&shown) {
            w.bad_markings.push(shown.clone());
        }
        if flags.ndet {
            for d in n.dm.iter().filter(|d| d.id != 0) {
                if player_instances(&ctx, &n.dm, d) > 1 {
                    let entry = (game.net.place_name(d.place).to_string(), shown.clone());
                    if !w.nondeterministic.contains(&entry) {
                        w.nondeterministic.push(entry);
                    }
                }
            }
        }
    }
    Ok(w)
}

/// A counterexample sketch for a state the system players lose.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Diagnosis {
    /// Shortest path (state index, edge tag) inside the losing region from the
    /// start to a state that stops in the rejecting sink; empty if the start
    /// is winning.
    pub path: Vec<(usize, String)>,
    /// Every losing stop reachable inside the losing region, by state.
    pub stops: Vec<(usize, Witness)>,
}

/// Explains why `start` is losing. Inside the losing region the system
/// players cannot avoid one of the listed stops (or an endless play without
/// mcuts).
pub fn explain(game: &PetriGame, rg: &ReducedGame, sol: &Solution, start: usize) -> Result<Diagnosis, ReduceError> {
    if sol.win0[start] {
        return Ok(Diagnosis::default());
    }
    let n = rg.nodes.len();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut stops = Vec::new();
    let mut first_stop = None;
    while let Some(v) = queue.pop_front() {
        if rg.arena.succ[v].contains(&BAD) && v != BAD {
            first_stop.get_or_insert(v);
            stops.push(v);
        }
        for &w in &rg.arena.succ[v] {
            if !sol.win0[w] && !seen[w] && w != BAD {
                seen[w] = true;
                parent[w] = Some(v);
                queue.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    if let Some(mut v) = first_stop {
        let mut chain = vec![v];
        while let Some(p) = parent[v] {
            chain.push(p);
            v = p;
        }
        chain.reverse();
        for pair in chain.windows(2) {
            let tag = rg.edge_info(pair[0], pair[1]).map(|e| edge_label(game, &e.kind)).unwrap_or_default();
            path.push((pair[0], tag));
        }
        let last = *chain.last().expect("non-empty chain");
        let tag = rg.edge_info(last, BAD).map(|e| edge_label(game, &e.kind)).unwrap_or_default();
        path.push((last, tag));
    }
    let mut out = Vec::new();
    for v in stops {
        out.push((v, witness(game, rg, v)?));
    }
    Ok(Diagnosis { path, stops: out })
}

pub fn edge_label(game: &PetriGame, kind: &EdgeKind) -> String {
    match kind.transition() {
        Some(t) => format!("{} {}", kind.tag(), game.net.transition(t).name),
        None => kind.tag().to_string(),
    }
}

/// Fig.-2-style rendering of a decision tuple, e.g. `(2, p, F, {p_l}, 1)`.
pub fn show_tuple(game: &PetriGame, d: &DTuple) -> String {
    let place = game.net.place_name(d.place);
    let nes = match d.nes {
        Nes::False => "F",
        Nes::True => "T",
        Nes::End => "E",
    };
    let dec = match d.dec {
        Decision::Top => "⊤".to_string(),
        Decision::Set(mask) => {
            let names: Vec<&str> = game
                .net
                .place_postset(d.place)
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &t)| game.net.transition(t).name.as_str())
                .collect();
            format!("{{{}}}", names.join(","))
        }
    };
    format!("({}, {place}, {nes}, {dec}, {})", d.id, d.lmc)
}

pub fn show_state(game: &PetriGame, s: &State, moves: &[BackMove], verbose: bool) -> String {
    let mut out = s.dm.iter().map(|d| show_tuple(game, d)).collect::<Vec<_>>().join(" ");
    if !s.mt2.is_empty() {
        let _ = write!(out, " | repeat {}", game.net.show_marking(&s.mt2));
    }
    if verbose {
        for (i, seq) in s.bm.iter().enumerate().filter(|(_, q)| !q.is_empty()) {
            let names: Vec<String> = seq
                .iter()
                .map(|&m| match moves[m as usize].kind {
                    crate::types::MoveKind::Transition(t) => game.net.transition(t).name.clone(),
                    crate::types::MoveKind::NesBoundary => "nes".into(),
                })
                .collect();
            let _ = write!(out, " | bm{} [{}]", i + 1, names.join(","));
        }
    }
    out
}

/// Underlying markings reachable by rewinding state `v` (the state's own
/// marking first).
pub fn rewound_markings(game: &PetriGame, rg: &ReducedGame, v: usize) -> Result<Vec<Marking>, ReduceError> {
    let Some(s) = rg.state(v) else { return Ok(Vec::new()) };
    let ctx = rg.context(game, ReduceOptions::default())?;
    let mut out: Vec<Marking> = Vec::new();
    for n in rewind(&ctx, &s.dm, &s.bm, false)? {
        let m = marking_of(&n.dm);
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Places of the state's tuples, for quick assertions.
pub fn places_of(s: &State) -> Vec<PlaceId> {
    s.dm.iter().map(|d| d.place).collect()
}
