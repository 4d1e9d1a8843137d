//! Invariants of the arena construction, checked on the example games and on
//! small random games.

use petrisynth_buchi::Player;
use petrisynth_net::{parse_game, reachable_markings, PetriGame};
use petrisynth_reduce::{
    extract, marking_of, redo, rewind, solve_game, undo, EdgeKind, ReduceError, ReduceOptions, ReducedGame,
};
use petrisynth_strategy::all_violations;
use proptest::prelude::*;

fn load(name: &str) -> PetriGame {
    let path = format!("{}/../../games/{name}.game", env!("CARGO_MANIFEST_DIR"));
    parse_game(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Every marking reached by rewinding is reachable in the net, and each
/// single undo step is reverted by redo.
fn check_replay(game: &PetriGame, rg: &ReducedGame) {
    let graph = reachable_markings(&game.net, 16, 1_000_000).unwrap();
    let ctx = rg.context(game, ReduceOptions::default()).unwrap();
    for v in 2..rg.nodes.len() {
        let st = rg.state(v).unwrap();
        let nodes = rewind(&ctx, &st.dm, &st.bm, false).unwrap();
        assert_eq!(nodes[0].dm, st.dm);
        for n in &nodes {
            assert!(graph.contains(&marking_of(&n.dm)), "state {v}: rewound marking is unreachable");
            for (i, seq) in st.bm.iter().enumerate() {
                let len = n.lens[i] as usize;
                if len == 0 {
                    continue;
                }
                let mv = &rg.moves[seq[len - 1] as usize];
                if mv.post.iter().all(|d| n.dm.contains(d)) {
                    assert_eq!(redo(&undo(&n.dm, mv), mv), n.dm);
                }
            }
        }
    }
}

/// Structural facts of the arena.
fn check_shape(rg: &ReducedGame) {
    for v in 0..rg.nodes.len() {
        assert!(!rg.arena.succ[v].is_empty());
        assert_eq!(rg.arena.succ[v].len(), rg.edges[v].len());
        if v < 2 {
            continue;
        }
        let st = rg.state(v).unwrap();
        assert_eq!(rg.arena.owner[v] == Player::P1, rg.mcut[v]);
        assert_eq!(rg.arena.accepting[v], rg.mcut[v]);
        for e in &rg.edges[v] {
            // only undecided states choose decisions, and they do nothing else
            assert_eq!(matches!(e.kind, EdgeKind::Top), st.has_top());
            if matches!(e.kind, EdgeKind::Mcut(_)) {
                assert!(rg.mcut[v]);
            }
            if matches!(e.kind, EdgeKind::NesFire(_) | EdgeKind::NesFinish(_) | EdgeKind::NesBad(_)) {
                assert!(st.has_true());
            }
        }
    }
}

#[test]
fn example_arenas_replay_and_have_the_expected_shape() {
    for name in ["fig1", "fig3a", "fig3b", "fig5a", "fig5b", "fig6"] {
        let game = load(name);
        let s = solve_game(&game, ReduceOptions::default()).unwrap();
        check_shape(&s.reduced);
        check_replay(&game, &s.reduced);
    }
}

#[derive(Clone, Debug)]
enum Step {
    Sys(u8, u8),
    Sync(u8, u8, u8, u8),
    Env(u8, u8),
    Joint(u8, u8, u8, u8),
}

fn step() -> impl Strategy<Value = Step> {
    prop_oneof![
        (0u8..4, 0u8..4).prop_map(|(a, b)| Step::Sys(a, b)),
        (0u8..3, 0u8..4, 0u8..3, 0u8..4).prop_map(|(i, a, j, b)| Step::Sync(i, a, j, b)),
        (0u8..3, 0u8..3).prop_map(|(i, j)| Step::Env(i, j)),
        (0u8..4, 0u8..4, 0u8..4, 0u8..4).prop_map(|(a, b, c, d)| Step::Joint(a, b, c, d)),
    ]
}

/// Two system tokens and one environment token that are never created or
/// destroyed; bad markings put both system tokens on given places.
fn game_text(steps: &[Step], bad: &[(u8, u8)]) -> String {
    let mut out = String::from("places {\n  system: s0 s1 s2 s3\n  env: e0 e1 e2\n}\ninit: e0 s0 s1\n");
    for (n, st) in steps.iter().enumerate() {
        let (pre, post) = match *st {
            Step::Sys(a, b) => (format!("s{a}"), format!("s{b}")),
            Step::Sync(i, a, j, b) => (format!("e{i} s{a}"), format!("e{j} s{b}")),
            Step::Env(i, j) => (format!("e{i}"), format!("e{j}")),
            Step::Joint(a, b, c, d) => (joint(a, b), joint(c, d)),
        };
        out += &format!("transition t{n} {{\n  pre: {pre}\n  post: {post}\n}}\n");
    }
    out += "winning {\n  kind: bad-markings\n";
    for &(a, b) in bad {
        out += &format!("  pattern: {}\n", if a == b { format!("exact s{a}:2") } else { format!("exact s{a}:1 s{b}:1") });
    }
    out + "}\n"
}

fn joint(a: u8, b: u8) -> String {
    if a == b {
        format!("s{a}:2")
    } else {
        format!("s{a} s{b}")
    }
}

fn small_opts() -> ReduceOptions {
    ReduceOptions { max_states: 20_000, max_bm: 200, max_rewind: 100_000, ..ReduceOptions::default() }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn random_games_yield_valid_strategies(
        steps in prop::collection::vec(step(), 3..9),
        bad in prop::collection::vec((0u8..4, 0u8..4), 0..3),
    ) {
        let game = parse_game(&game_text(&steps, &bad)).unwrap();
        let s = match solve_game(&game, small_opts()) {
            Ok(s) => s,
            // decision sequences can make arenas exponentially large
            Err(ReduceError::StateCap(_) | ReduceError::BmCap(_) | ReduceError::RewindCap(_)) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        check_shape(&s.reduced);
        check_replay(&game, &s.reduced);
        if s.winning {
            let net = extract(&game, &s.reduced, &s.solution).unwrap();
            prop_assert_eq!(all_violations(&game, &net, 100_000), vec![]);
        }
    }
}
