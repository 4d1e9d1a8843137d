use std::collections::{BTreeMap, BTreeSet, HashSet};

use petrisynth_net::*;
use proptest::prelude::*;

fn ms_strategy() -> impl Strategy<Value = Multiset<u8>> {
    prop::collection::vec((0u8..6, 0u32..4), 0..8).prop_map(Multiset::from_counts)
}

proptest! {
    #[test]
    fn union_and_intersection_are_max_and_min(a in ms_strategy(), b in ms_strategy()) {
        let u = a.union(&b);
        let i = a.intersection(&b);
        for k in 0u8..6 {
            prop_assert_eq!(u.count(&k), a.count(&k).max(b.count(&k)));
            prop_assert_eq!(i.count(&k), a.count(&k).min(b.count(&k)));
        }
        prop_assert!(i.is_subset(&a) && i.is_subset(&b));
        prop_assert!(a.is_subset(&u) && b.is_subset(&u));
    }

    #[test]
    fn difference_never_goes_negative(a in ms_strategy(), b in ms_strategy()) {
        let d = a.sub(&b);
        for k in 0u8..6 {
            prop_assert_eq!(d.count(&k), a.count(&k).saturating_sub(b.count(&k)));
        }
        prop_assert!(d.is_subset(&a));
        if b.is_subset(&a) {
            prop_assert_eq!(d.add(&b), a.clone());
        }
    }

    #[test]
    fn no_zero_entries(a in ms_strategy(), b in ms_strategy()) {
        for m in [a.sub(&b), a.intersection(&b), a.union(&b), a.add(&b)] {
            prop_assert!(m.iter().all(|(_, &c)| c > 0));
        }
    }
}

const NAMES: [&str; 8] = ["a", "b'", "c_1", "d''", "e.x", "f@0.1", "g", "h"];

#[derive(Debug, Clone)]
struct RawGame {
    n_places: usize,
    env: Vec<bool>,
    transitions: Vec<(Vec<(usize, u32)>, Vec<(usize, u32)>)>,
    init: Vec<(usize, u32)>,
    patterns: Vec<(Vec<(usize, u32)>, Vec<(usize, u32, Option<u32>)>, bool)>,
}

fn raw_game() -> impl Strategy<Value = RawGame> {
    (2usize..=8).prop_flat_map(|n| {
        let arcs = || prop::collection::vec((0..n, 1u32..3), 0..3);
        (
            Just(n),
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec((arcs(), arcs()), 0..5),
            prop::collection::vec((0..n, 1u32..3), 0..3),
            prop::collection::vec(
                (
                    prop::collection::vec((0..n, 0u32..3), 0..3),
                    prop::collection::vec((0..n, 0u32..3, prop::option::of(3u32..6)), 0..2),
                    any::<bool>(),
                ),
                0..3,
            ),
        )
            .prop_map(|(n_places, env, transitions, init, patterns)| RawGame {
                n_places,
                env,
                transitions,
                init,
                patterns,
            })
    })
}

fn build(raw: &RawGame) -> PetriGame {
    let mut b = NetBuilder::new();
    for name in &NAMES[..raw.n_places] {
        b.place(*name);
    }
    for (i, (pre, post)) in raw.transitions.iter().enumerate() {
        let w = |v: &[(usize, u32)]| v.iter().map(|&(p, c)| (NAMES[p], c)).collect::<Vec<_>>();
        b.arc_transition(&format!("t{i}"), &w(pre), &w(post));
    }
    for &(p, c) in &raw.init {
        b.initial(NAMES[p], c);
    }
    let net = b.build().unwrap();
    let kinds = (0..raw.n_places)
        .map(|i| {
            let p = net.place_id(NAMES[i]).unwrap();
            (p, if raw.env[i] { PlaceKind::Env } else { PlaceKind::System })
        })
        .collect::<BTreeMap<_, _>>()
        .into_values()
        .collect();
    let pats = raw
        .patterns
        .iter()
        .map(|(ex, rs, oz)| MarkingPattern {
            exact: ex.iter().map(|&(p, c)| (net.place_id(NAMES[p]).unwrap(), c)).collect(),
            ranges: rs.iter().map(|&(p, lo, hi)| (net.place_id(NAMES[p]).unwrap(), Range::new(lo, hi))).collect(),
            sums: vec![],
            others_zero: *oz,
        })
        .collect();
    PetriGame::new(net, kinds, WinningCondition::BadMarkings(pats)).unwrap()
}

proptest! {
    #[test]
    fn print_parse_print_is_identity(raw in raw_game()) {
        let g = build(&raw);
        let printed = print_game(&g);
        let parsed = parse_game(&printed).unwrap();
        prop_assert_eq!(&parsed, &g);
        prop_assert_eq!(print_game(&parsed), printed);
    }

    #[test]
    fn bad_places_translation_agrees_on_reachable_markings(raw in raw_game(), bad in prop::collection::btree_set(0usize..8, 0..3)) {
        let g = build(&raw);
        let bad: BTreeSet<PlaceId> = bad.into_iter().filter(|&i| i < raw.n_places).map(|i| g.net.place_id(NAMES[i]).unwrap()).collect();
        let g = PetriGame::new(g.net.clone(), g.kinds().to_vec(), WinningCondition::BadPlaces(bad)).unwrap();
        let translated = badplaces_to_badmarkings(&g).unwrap();
        if let Ok(reach) = reachable_markings(&g.net, 4, 2_000) {
            for m in &reach.markings {
                prop_assert_eq!(classify_marking(&g, m).unwrap(), classify_marking(&translated, m).unwrap());
            }
        }
    }

    #[test]
    fn firing_preserves_token_balance(raw in raw_game()) {
        let g = build(&raw);
        if let Ok(reach) = reachable_markings(&g.net, 4, 2_000) {
            for (i, out) in reach.edges.iter().enumerate() {
                for &(t, j) in out {
                    let before = reach.markings[i].total() as i64;
                    let after = reach.markings[j].total() as i64;
                    let delta = g.net.post(t).total() as i64 - g.net.pre(t).total() as i64;
                    prop_assert_eq!(after - before, delta);
                }
            }
        }
    }
}

fn load(name: &str) -> PetriGame {
    let path = format!("{}/../../games/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_game(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Independent reachability oracle: depth-first search over dense count
/// vectors, using only the raw arc weights.
fn dfs_oracle(net: &PetriNet) -> HashSet<Vec<u32>> {
    let n = net.num_places();
    let dense = |m: &Marking| {
        let mut v = vec![0u32; n];
        for (p, &c) in m.iter() {
            v[p.idx()] = c;
        }
        v
    };
    let arcs: Vec<(Vec<u32>, Vec<u32>)> = net.transitions().iter().map(|t| (dense(&t.pre), dense(&t.post))).collect();
    let mut seen = HashSet::new();
    let mut stack = vec![dense(net.initial())];
    while let Some(m) = stack.pop() {
        if !seen.insert(m.clone()) {
            continue;
        }
        for (pre, post) in &arcs {
            if (0..n).all(|i| m[i] >= pre[i]) {
                stack.push((0..n).map(|i| m[i] - pre[i] + post[i]).collect());
            }
        }
    }
    seen
}

#[test]
fn fig3a_reachability_matches_oracle() {
    let g = load("fig3a.game");
    let reach = reachable_markings(&g.net, 1, 1_000).unwrap();
    let oracle = dfs_oracle(&g.net);
    assert_eq!(reach.len(), oracle.len());
    let n = g.net.num_places();
    for m in &reach.markings {
        let mut v = vec![0u32; n];
        for (p, &c) in m.iter() {
            v[p.idx()] = c;
        }
        assert!(oracle.contains(&v));
    }
    let oracle_max_s = oracle
        .iter()
        .map(|v| (0..n).filter(|&i| g.is_system(PlaceId(i as u32))).map(|i| v[i]).sum::<u32>())
        .max()
        .unwrap();
    let report = check_decidable_class(&g, 1, 1_000).unwrap();
    assert_eq!(report.max_s, oracle_max_s);
    assert_eq!(report.reachable, oracle.len());
}

#[test]
fn golden_games_are_in_the_decidable_class() {
    for name in ["fig1.game", "fig1_goodbad.game", "fig3a.game", "fig3b.game", "fig5a.game", "fig5b.game", "fig6.game"] {
        let g = load(name);
        let report = check_decidable_class(&g, 4, 100_000).unwrap_or_else(|e| panic!("{name}: {e}"));
        let oracle = dfs_oracle(&g.net);
        assert_eq!(report.reachable, oracle.len(), "{name}");
    }
}

#[test]
fn fig1_bad_markings_are_the_wrong_totals() {
    let g = load("fig1.game");
    let m = g.net.marking_from_names(&[("s'", 1), ("w", 3), ("k", 4)]).unwrap();
    assert_eq!(classify_marking(&g, &m).unwrap(), MarkingClass::Bad);
    let m = g.net.marking_from_names(&[("s'", 1), ("w", 3), ("k", 2)]).unwrap();
    assert_eq!(classify_marking(&g, &m).unwrap(), MarkingClass::Neutral);
    let m = g.net.marking_from_names(&[("r'", 1), ("k", 3)]).unwrap();
    assert_eq!(classify_marking(&g, &m).unwrap(), MarkingClass::Bad);
    // not finished yet: p tokens still present
    let m = g.net.marking_from_names(&[("r'", 1), ("p", 1), ("k", 1)]).unwrap();
    assert_eq!(classify_marking(&g, &m).unwrap(), MarkingClass::Neutral);
}

#[test]
fn two_env_tokens_leave_the_class() {
    let mut b = NetBuilder::new();
    b.place("e").place("f").place("s");
    b.arc_transition("split", &[("e", 1)], &[("f", 2)]);
    b.initial("e", 1);
    let net = b.build().unwrap();
    let g = PetriGame::new(net, vec![PlaceKind::Env, PlaceKind::Env, PlaceKind::System], WinningCondition::BadMarkings(vec![]))
        .unwrap();
    assert!(matches!(check_decidable_class(&g, 3, 100), Err(GameError::NotOneEnvPlayer(_))));
}

#[test]
fn unbounded_net_is_reported() {
    let mut b = NetBuilder::new();
    b.place("e").place("s");
    b.arc_transition("grow", &[("e", 1)], &[("e", 1), ("s", 1)]);
    b.initial("e", 1);
    let net = b.build().unwrap();
    assert!(matches!(reachable_markings(&net, 3, 100), Err(NetError::BoundViolated { .. })));
}

#[test]
fn ambiguous_marking_is_an_error() {
    let g = load("fig1_goodbad.game");
    let mut good = match &g.winning {
        WinningCondition::GoodAndBad { good, .. } => good.clone(),
        _ => unreachable!(),
    };
    let any_finished = MarkingPattern::at_least(&g.net.marking_from_names(&[("s'", 1)]).unwrap());
    good.push(any_finished);
    let bad = match &g.winning {
        WinningCondition::GoodAndBad { bad, .. } => bad.clone(),
        _ => unreachable!(),
    };
    let g2 = PetriGame::new(g.net.clone(), g.kinds().to_vec(), WinningCondition::GoodAndBad { good, bad }).unwrap();
    let m = g.net.marking_from_names(&[("s'", 1), ("k", 1)]).unwrap();
    assert!(matches!(classify_marking(&g2, &m), Err(GameError::AmbiguousClass(_))));
    let reach = reachable_markings(&g.net, 4, 10_000).unwrap();
    assert!(check_disjoint(&g, &reach).is_ok());
    assert!(check_disjoint(&g2, &reach).is_err());
}
