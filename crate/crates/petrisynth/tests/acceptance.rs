//! End-to-end acceptance checks. Prints one line per criterion:
//! `criterion N PASS|FAIL (time / limit): detail`.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use petrisynth::{commands, RunConfig};
use petrisynth_buchi::random::{brute_force_win0, random_arena};
use petrisynth_buchi::{solve, verify_certificate, Player};
use petrisynth_net::{classify_marking, parse_game, reachable_markings, Marking, PetriGame, WinningCondition};
use petrisynth_pcp::{
    census, check_pcp_play, gen_pcp_game, good_bad_to_good, sample_projections, PcpInstance, PlayVerdict, Scheduler,
};
use petrisynth_reduce::{
    explain, extract, marking_of, redo, rewind, rewound_markings, solve_game, undo, EdgeKind, ReduceOptions,
    ReducedGame, Solved, BAD, GOOD,
};
use petrisynth_strategy::{SMarking, StrategyFile, StrategyNet};

type Check = Result<String, String>;

fn games_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../games")
}

fn text(name: &str) -> String {
    std::fs::read_to_string(games_dir().join(name)).unwrap()
}

fn load(name: &str) -> PetriGame {
    parse_game(&text(&format!("{name}.game"))).unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn solved(name: &str) -> Result<(PetriGame, Solved), String> {
    let game = load(name);
    let s = solve_game(&game, ReduceOptions::default()).map_err(|e| e.to_string())?;
    Ok((game, s))
}

/// Arena states visited when Player 0 follows its strategy and Player 1
/// plays every move, with the edges taken.
fn winning_branch(rg: &ReducedGame, s: &Solved) -> Vec<(usize, usize, EdgeKind)> {
    let mut seen = vec![false; rg.nodes.len()];
    let mut stack = vec![rg.initial];
    seen[rg.initial] = true;
    let mut edges = Vec::new();
    while let Some(v) = stack.pop() {
        if v == GOOD || v == BAD {
            continue;
        }
        let succ: Vec<(usize, EdgeKind)> = match rg.arena.owner[v] {
            Player::P0 => {
                let w = s.solution.strategy0[v].expect("winning state has a choice");
                vec![(w, rg.edge_info(v, w).unwrap().kind.clone())]
            }
            Player::P1 => rg.arena.succ[v]
                .iter()
                .zip(&rg.edges[v])
                .map(|(&w, e)| (w, e.kind.clone()))
                .chain(rg.parallel[v].iter().map(|(w, e)| (*w, e.kind.clone())))
                .collect(),
        };
        for (w, k) in succ {
            edges.push((v, w, k));
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    edges
}

fn fire_label(game: &PetriGame, s: &StrategyNet, m: &SMarking, name: &str) -> Result<SMarking, String> {
    let t = game.net.trans_id(name).unwrap();
    let c: Vec<usize> = (0..s.transitions.len()).filter(|&i| s.transitions[i].label == t && s.enabled(m, i)).collect();
    ensure(c.len() == 1, format!("{name} enabled {} times in the strategy", c.len()))?;
    Ok(s.fire(m, c[0]))
}

fn criterion_1() -> Check {
    let out = commands::solve(&text("fig1.game"), "fig1", &RunConfig::default()).map_err(|e| e.to_string())?;
    ensure(out.code == 0, format!("exit {}", out.code))?;
    ensure(out.report.contains("validators: all passed"), "validators failed")?;
    let states: usize = out
        .report
        .lines()
        .find_map(|l| l.strip_prefix("arena: ")?.split(' ').next()?.parse().ok())
        .ok_or("no arena size")?;
    ensure(states < 100_000, format!("{states} arena states"))?;
    let json = &out.artifacts.iter().find(|a| a.name == "fig1.strategy.json").ok_or("no strategy file")?.content;
    let game = load("fig1");
    let file: StrategyFile = serde_json::from_str(json).map_err(|e| e.to_string())?;
    let net = StrategyNet::from_file(&game, &file).map_err(|e| e.to_string())?;
    let post = net.place_postsets();
    for (forecast, offers) in [("sunny", ["p_l", "p_l"]), ("cloudy", ["p_h", "p_l"]), ("rainy", ["p_h", "p_h"])] {
        let m = fire_label(&game, &net, &net.initial_marking(), forecast)?;
        let mut got: Vec<&str> = m
            .elements()
            .filter(|&&p| game.net.place_name(net.places[p].label) == "p")
            .map(|&p| post[p].iter().map(|&t| game.net.transition(net.transitions[t].label).name.as_str()))
            .flat_map(|ts| {
                let v: Vec<&str> = ts.collect();
                if v.len() == 1 {
                    v
                } else {
                    vec!["<several>"]
                }
            })
            .collect();
        got.sort();
        ensure(got == offers, format!("{forecast}: offers {got:?}"))?;
    }
    Ok(format!("winning, {states} arena states, offers sunny p_l/p_l, cloudy p_h/p_l, rainy p_h/p_h"))
}

fn criterion_2() -> Check {
    let (game, s) = solved("fig5a")?;
    ensure(!s.winning, "fig5a won")?;
    let d = explain(&game, &s.reduced, &s.solution, s.reduced.initial).map_err(|e| e.to_string())?;
    let wanted = [
        game.net.show_marking(&game.net.marking_from_names(&[("s1", 1), ("s5", 1), ("e2", 1), ("s9", 1)]).unwrap()),
        game.net.show_marking(&game.net.marking_from_names(&[("s2", 1), ("s4", 1), ("e2", 1), ("s10", 1)]).unwrap()),
    ];
    let named = d
        .stops
        .iter()
        .any(|(_, w)| w.flags.contains(&"BAD") && w.bad_markings.iter().any(|m| wanted.contains(m)));
    ensure(named, "no BAD stop names the expected markings")?;
    let (game, s) = solved("fig5b")?;
    ensure(!s.winning, "fig5b won")?;
    let d = explain(&game, &s.reduced, &s.solution, s.reduced.initial).map_err(|e| e.to_string())?;
    let ndet = d.stops.iter().any(|(_, w)| w.flags.contains(&"NDET") && w.nondeterministic.iter().any(|(p, _)| p == "s2"));
    ensure(ndet, "no NDET stop at s2")?;
    Ok(format!("fig5a BAD at {} or {}; fig5b NDET at s2", wanted[0], wanted[1]))
}

fn criterion_3() -> Check {
    let (game, s) = solved("fig3b")?;
    ensure(s.winning, "fig3b lost")?;
    let branch = winning_branch(&s.reduced, &s);
    let fires = branch.iter().filter(|(_, _, k)| matches!(k, EdgeKind::NesFire(_))).count();
    let finishes = branch.iter().filter(|(_, _, k)| matches!(k, EdgeKind::NesFinish(_))).count();
    ensure(fires >= 1, "no NES_fire edge on the winning branch")?;
    ensure(finishes == 1, format!("{finishes} NES_finish edges on the winning branch"))?;
    let net = extract(&game, &s.reduced, &s.solution).map_err(|e| e.to_string())?;
    let looped: BTreeSet<&str> = net
        .transitions
        .iter()
        .filter(|t| !t.loop_back.is_empty())
        .map(|t| game.net.transition(t.label).name.as_str())
        .collect();
    // the loop-back closes the cycle t5 t6 t7
    let m = fire_label(&game, &net, &net.initial_marking(), "t2")?;
    let mut cur = m.clone();
    for t in ["t5", "t6", "t7"] {
        cur = fire_label(&game, &net, &cur, t)?;
    }
    ensure(cur == m, "t5 t6 t7 does not return to the same strategy marking")?;
    ensure(looped.iter().any(|t| ["t5", "t6", "t7"].contains(t)), "no loop-back arc on t5/t6/t7")?;
    Ok(format!("{fires} NES_fire, {finishes} NES_finish on the winning branch; loop-back on {looped:?}"))
}

fn criterion_4() -> Check {
    let (game, s) = solved("fig6")?;
    ensure(!s.winning, "fig6 won")?;
    let env = game.env_places().count();
    let inert = game.env_places().filter(|&p| game.net.place_postset(p).is_empty() && game.net.place_preset(p).is_empty()).count();
    Ok(format!("losing; {env} environment place(s), {inert} inert"))
}

fn criterion_5() -> Check {
    for seed in 0..250u64 {
        let a = random_arena(seed, 8, 3);
        let sol = solve(&a).map_err(|e| e.to_string())?;
        verify_certificate(&a, &sol).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(sol.win0 == brute_force_win0(&a), format!("seed {seed}: winner differs from enumeration"))?;
    }
    Ok("250 seeded arenas agree with strategy enumeration; certificates verified".into())
}

fn criterion_6() -> Check {
    let mut total = 0;
    for name in ["fig1", "fig3b", "fig5a", "fig5b"] {
        let (game, s) = solved(name)?;
        let rg = &s.reduced;
        let graph = reachable_markings(&game.net, 16, 1_000_000).map_err(|e| e.to_string())?;
        let ctx = rg.context(&game, ReduceOptions::default()).map_err(|e| e.to_string())?;
        for v in 2..rg.nodes.len() {
            let st = rg.state(v).unwrap();
            for n in rewind(&ctx, &st.dm, &st.bm, false).map_err(|e| e.to_string())? {
                ensure(graph.contains(&marking_of(&n.dm)), format!("{name} v{v}: unreachable rewound marking"))?;
                for (i, seq) in st.bm.iter().enumerate() {
                    let len = n.lens[i] as usize;
                    if len == 0 {
                        continue;
                    }
                    let mv = &rg.moves[seq[len - 1] as usize];
                    if mv.post.iter().all(|d| n.dm.contains(d)) {
                        ensure(redo(&undo(&n.dm, mv), mv) == n.dm, format!("{name} v{v}: undo/redo differs"))?;
                        total += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{total} undo/redo round trips, all rewound markings reachable"))
}

/// The mcuts of the weather game by hand: the initial marking, each forecast
/// with both offers made, and each finished day.
fn weather_mcuts(game: &PetriGame) -> BTreeSet<Marking> {
    let m = |pairs: &[(&str, u32)]| game.net.marking_from_names(pairs).unwrap();
    let mut out = BTreeSet::from([m(&[("forecast", 1)])]);
    for (e, done, ws) in [("s", "s'", [2, 3]), ("c", "c'", [1, 2]), ("r", "r'", [0, 1])] {
        for k in 2..=4 {
            out.insert(m(&[(e, 1), ("k", k)]));
            for w in ws {
                out.insert(m(&[(done, 1), ("w", w), ("k", k)]));
            }
        }
    }
    out
}

fn criterion_7() -> Check {
    let out = commands::reduce_dump(&text("fig1.game"), "fig1", &RunConfig::default()).map_err(|e| e.to_string())?;
    let game = load("fig1");
    let rg = petrisynth_reduce::build_arena(&game, ReduceOptions::default()).map_err(|e| e.to_string())?;
    let top16 = (2..rg.nodes.len()).any(|v| rg.edges[v].iter().filter(|e| e.kind == EdgeKind::Top).count() == 16);
    ensure(top16, "no state with 16 TOP successors")?;
    let m = |pairs: &[(&str, u32)]| game.net.marking_from_names(pairs).unwrap();
    let wanted = BTreeSet::from([m(&[("s", 1), ("k", 2)]), m(&[("s", 1), ("p", 1), ("k", 1)]), m(&[("s", 1), ("p", 2)])]);
    let mut rewound = false;
    for v in 2..rg.nodes.len() {
        let got: BTreeSet<Marking> = rewound_markings(&game, &rg, v).map_err(|e| e.to_string())?.into_iter().collect();
        if got == wanted {
            rewound = true;
            break;
        }
    }
    ensure(rewound, "no state rewinds to exactly {s,k:2}, {s,p,k}, {s,p:2}")?;
    // mcut states: every listed mcut occurs, and every mcut state whose
    // marking is an mcut of the net itself is listed
    let list = weather_mcuts(&game);
    let env_only = |mk: &Marking| game.net.enabled_transitions(mk).all(|t| game.involves_env(t));
    let mut seen = BTreeSet::new();
    for v in (2..rg.nodes.len()).filter(|&v| rg.mcut[v]) {
        let mk = marking_of(&rg.state(v).unwrap().dm);
        if env_only(&mk) {
            ensure(list.contains(&mk), format!("mcut state v{v} at unlisted {}", game.net.show_marking(&mk)))?;
        }
        seen.insert(mk);
    }
    let missing: Vec<String> = list.difference(&seen).map(|mk| game.net.show_marking(mk)).collect();
    ensure(missing.is_empty(), format!("mcuts without a state: {missing:?}"))?;
    ensure(out.artifacts.iter().any(|a| a.name == "fig1.arena.dot"), "no DOT artifact")?;
    Ok(format!("16-way TOP state, rewound triple found, {} listed mcuts all present", list.len()))
}

fn criterion_8() -> Check {
    let aa = PcpInstance::parse(&text("pcp_a_a.pcp")).map_err(|e| e.to_string())?;
    let ab = PcpInstance::parse(&text("pcp_a_b.pcp")).map_err(|e| e.to_string())?;
    let game = gen_pcp_game(&aa);
    let c = census(&game);
    // per player: start plus (choice, term, one index, one letter) x 9 counters
    let per_player = 1 + 4 * 9;
    ensure(c.place_groups["p1"] == per_player && c.place_groups["p2"] == per_player, "player place counts")?;
    ensure(c.env_places == 7 && c.transition_groups["t"] == 6, "environment counts")?;
    let v = check_pcp_play(&game, &aa, &[0]).map_err(|e| e.to_string())?;
    ensure(v.verdict == PlayVerdict::GoodBeforeBad, format!("a/a: {:?}", v.verdict))?;
    let game_ab = gen_pcp_game(&ab);
    let v = check_pcp_play(&game_ab, &ab, &[0]).map_err(|e| e.to_string())?;
    ensure(v.verdict == PlayVerdict::BadFirst, format!("a/b: {:?}", v.verdict))?;
    let mut checked = 0;
    for g in [&game, &game_ab] {
        let graph = reachable_markings(&g.net, 1, 400_000).map_err(|e| e.to_string())?;
        for mk in &graph.markings {
            classify_marking(g, mk).map_err(|e| e.to_string())?;
        }
        checked += graph.len();
    }
    Ok(format!("37 places per player, 7 env places, 6 env transitions; verdicts ok; {checked} reachable markings disjoint"))
}

fn criterion_9() -> Check {
    let a = load("fig1_goodbad");
    let b = good_bad_to_good(&a, 8, 100_000).map_err(|e| e.to_string())?;
    let WinningCondition::GoodAndBad { good, bad } = &a.winning else { return Err("not good-and-bad".into()) };
    let graph = reachable_markings(&a.net, 8, 100_000).map_err(|e| e.to_string())?;
    let n_bad = graph
        .markings
        .iter()
        .filter(|mk| bad.iter().any(|p| p.matches(mk)) && !good.iter().any(|p| p.matches(mk)))
        .count();
    let (ca, cb) = (census(&a), census(&b));
    let support = a.net.initial().support().count();
    ensure(cb.places == 2 * ca.places + support + 1, format!("{} places", cb.places))?;
    ensure(cb.transitions == 2 * ca.transitions + n_bad + 1, format!("{} transitions", cb.transitions))?;
    let r = sample_projections(&a, &b, 1000, 10_000, 0, Scheduler::Lazy).map_err(|e| e.to_string())?;
    ensure(r.truncated == 0, "truncated plays")?;
    ensure(r.violations.is_empty(), format!("{} projected plays reach a bad marking", r.violations.len()))?;
    Ok(format!(
        "{} places, {} transitions ({} bad markings); {} of 1000 plays avoid the sink, all project bad-free",
        cb.places,
        cb.transitions,
        n_bad,
        1000 - r.into_sink
    ))
}

fn run_bin(args: &[&str], out: &Path) -> (i32, Vec<u8>) {
    let o = Command::new(env!("CARGO_BIN_EXE_petrisynth"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    (o.status.code().unwrap_or(-1), o.stdout)
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn criterion_10() -> Check {
    let g = |n: &str| games_dir().join(n).display().to_string();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let strategy = tmp.path().join("fig1.strategy.json");
    let seed_dir = tmp.path().join("seed");
    run_bin(&["solve", &g("fig1.game")], &seed_dir);
    std::fs::copy(seed_dir.join("fig1.strategy.json"), &strategy).map_err(|e| e.to_string())?;
    let runs: Vec<Vec<String>> = vec![
        vec!["solve".into(), g("fig1.game")],
        vec!["solve".into(), g("fig3b.game")],
        vec!["solve".into(), g("fig5a.game")],
        vec!["solve".into(), g("fig5b.game")],
        vec!["solve".into(), g("fig6.game")],
        vec!["validate".into(), g("fig1.game"), strategy.display().to_string()],
        vec!["reduce-dump".into(), g("fig1.game")],
        vec!["reduce-dump".into(), g("fig3b.game"), "--verbose-states".into()],
        vec!["gen-pcp".into(), g("pcp_a_a.pcp")],
        vec!["to-good-only".into(), g("fig1_goodbad.game")],
        vec!["simulate".into(), g("fig1.game"), "sunny".into(), "p_l".into(), "p_l".into(), "s_l".into()],
        vec!["census".into(), g("fig1.game")],
    ];
    let mut files = 0;
    for (i, args) in runs.iter().enumerate() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (d1, d2) = (tmp.path().join(format!("{i}a")), tmp.path().join(format!("{i}b")));
        let r1 = run_bin(&args, &d1);
        let r2 = run_bin(&args, &d2);
        ensure(r1 == r2, format!("{}: stdout or exit code differs", args.join(" ")))?;
        if d1.exists() {
            let (s1, s2) = (snapshot(&d1), snapshot(&d2));
            ensure(s1 == s2, format!("{}: artifacts differ", args.join(" ")))?;
            files += s1.len();
        }
    }
    Ok(format!("{} commands run twice in fresh processes; stdout, exit codes and {files} artifacts identical", runs.len()))
}

#[test]
fn acceptance() {
    let criteria: [(u32, u64, fn() -> Check); 10] = [
        (1, 60, criterion_1),
        (2, 10, criterion_2),
        (3, 30, criterion_3),
        (4, 10, criterion_4),
        (5, 60, criterion_5),
        (6, 600, criterion_6),
        (7, 600, criterion_7),
        (8, 30, criterion_8),
        (9, 30, criterion_9),
        (10, 600, criterion_10),
    ];
    let mut failed = Vec::new();
    println!();
    for (n, limit, f) in criteria {
        let start = Instant::now();
        let res = f();
        let took = start.elapsed();
        let res = match res {
            Ok(d) if took > Duration::from_secs(limit) => Err(format!("too slow: {d}")),
            r => r,
        };
        let (tag, detail) = match &res {
            Ok(d) => ("PASS", d.clone()),
            Err(e) => ("FAIL", e.clone()),
        };
        println!("criterion {n:>2} {tag} ({:.2}s / {limit}s): {detail}", took.as_secs_f64());
        if res.is_err() {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
