//! DOT and JSON renderings of strategies and arenas.
//!
//! Arena drawings follow the usual Büchi-game conventions: Player-0 states
//! are filled gray, Player-1 states white, accepting states have a double
//! border.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use petrisynth_buchi::Player;
use petrisynth_net::PetriGame;
use petrisynth_reduce::{edge_label, show_state, ReducedGame, BAD, GOOD};
use petrisynth_strategy::StrategyNet;
use serde::Serialize;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn strategy_dot(game: &PetriGame, s: &StrategyNet) -> String {
    let mut out = String::from("digraph strategy {\n  rankdir=TB;\n");
    for (i, p) in s.places.iter().enumerate() {
        let fill = if game.is_system(p.label) { "gray80" } else { "white" };
        let tokens = if s.initial.contains(&i) { " •" } else { "" };
        let _ = writeln!(
            out,
            "  p{i} [shape=circle, style=filled, fillcolor={fill}, label={}];",
            quote(&format!("{}{tokens}", p.name))
        );
    }
    for (i, t) in s.transitions.iter().enumerate() {
        let _ = writeln!(out, "  t{i} [shape=box, label={}];", quote(&t.name));
        for &p in &t.pre {
            let _ = writeln!(out, "  p{p} -> t{i};");
        }
        for &p in &t.post {
            let style = if t.loop_back.contains(&p) { " [style=dashed, constraint=false]" } else { "" };
            let _ = writeln!(out, "  t{i} -> p{p}{style};");
        }
    }
    out.push_str("}\n");
    out
}

/// States of the arena within `depth` breadth-first steps of the initial
/// state (all states without a limit), in discovery order.
pub fn arena_states(rg: &ReducedGame, depth: Option<usize>) -> Vec<usize> {
    let n = rg.nodes.len();
    let mut dist = vec![usize::MAX; n];
    dist[rg.initial] = 0;
    let mut order = vec![rg.initial];
    let mut queue = VecDeque::from([rg.initial]);
    while let Some(v) = queue.pop_front() {
        if depth.is_some_and(|d| dist[v] >= d) {
            continue;
        }
        for &w in &rg.arena.succ[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    order
}

#[derive(Serialize)]
pub struct StateEntry {
    pub id: usize,
    pub owner: &'static str,
    pub accepting: bool,
    pub mcut: bool,
    pub label: String,
    pub flags: Vec<&'static str>,
}

#[derive(Serialize)]
pub struct EdgeEntry {
    pub from: usize,
    pub to: usize,
    pub label: String,
}

#[derive(Serialize)]
pub struct ArenaDump {
    pub initial: usize,
    pub total_states: usize,
    pub states: Vec<StateEntry>,
    pub edges: Vec<EdgeEntry>,
}

pub fn arena_dump(game: &PetriGame, rg: &ReducedGame, depth: Option<usize>, verbose: bool) -> ArenaDump {
    let order = arena_states(rg, depth);
    let shown: BTreeMap<usize, ()> = order.iter().map(|&v| (v, ())).collect();
    let mut states = Vec::new();
    let mut edges = Vec::new();
    for &v in &order {
        let label = match v {
            GOOD => "GOOD".to_string(),
            BAD => "BAD".to_string(),
            _ => show_state(game, rg.state(v).expect("state"), &rg.moves, verbose),
        };
        states.push(StateEntry {
            id: v,
            owner: match rg.arena.owner[v] {
                Player::P0 => "player0",
                Player::P1 => "player1",
            },
            accepting: rg.arena.accepting[v],
            mcut: rg.mcut[v],
            label,
            flags: rg.flags[v].map(|f| f.names()).unwrap_or_default(),
        });
        let succ = rg.arena.succ[v].iter().zip(&rg.edges[v]);
        let parallel = rg.parallel[v].iter().map(|(w, e)| (w, e));
        for (&w, e) in succ.chain(parallel) {
            if shown.contains_key(&w) {
                edges.push(EdgeEntry { from: v, to: w, label: edge_label(game, &e.kind) });
            }
        }
    }
    ArenaDump { initial: rg.initial, total_states: rg.nodes.len(), states, edges }
}

pub fn arena_dot(dump: &ArenaDump) -> String {
    let mut out = String::from("digraph arena {\n  node [shape=box];\n");
    for s in &dump.states {
        let fill = if s.owner == "player0" { "gray80" } else { "white" };
        let border = if s.accepting { 2 } else { 1 };
        let _ = writeln!(
            out,
            "  v{} [style=filled, fillcolor={fill}, peripheries={border}, label={}];",
            s.id,
            quote(&format!("v{}: {}", s.id, s.label))
        );
    }
    for e in &dump.edges {
        let _ = writeln!(out, "  v{} -> v{} [label={}];", e.from, e.to, quote(&e.label));
    }
    out.push_str("}\n");
    out
}
