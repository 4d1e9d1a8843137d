use std::collections::BTreeSet;

use petrisynth_net::{classify_marking, reachable_markings, MarkingClass, PlaceKind};
use petrisynth_pcp::gen::{player_places, player_transitions, ENV_START};
use petrisynth_pcp::{
    census, check_pcp_play, check_pcp_play_with, gen_pcp_game, pattern_families, Check, EnvChoice, Family, Label,
    PcpError, PcpInstance, PcpPlace, PlayVerdict, Pos, Suspect,
};

fn a_a() -> PcpInstance {
    PcpInstance::from_words("a", &["a"], &["a"]).unwrap()
}

fn a_b() -> PcpInstance {
    PcpInstance::from_words("ab", &["a"], &["b"]).unwrap()
}

/// Independent count: one start place plus every other automaton position
/// (choice, term, one per index, one per letter of each word) times the nine
/// counter values.
fn expected_player_places(inst: &PcpInstance, k: u8) -> usize {
    let positions = 2 + inst.len() + inst.words(k).iter().map(Vec::len).sum::<usize>();
    1 + 9 * positions
}

#[test]
fn census_of_the_smallest_instance() {
    let inst = a_a();
    let game = gen_pcp_game(&inst);
    let c = census(&game);
    assert_eq!(expected_player_places(&inst, 1), 37);
    assert_eq!(c.place_groups["p1"], 37);
    assert_eq!(c.place_groups["p2"], 37);
    assert_eq!(c.place_groups["e"], 7);
    assert_eq!(c.transition_groups["t"], 6);
    assert_eq!(c.env_places, 7);
    assert_eq!(c.system_places, 74);
    assert_eq!(c.condition, "good-and-bad");
}

#[test]
fn census_follows_the_instance_shape() {
    let inst = PcpInstance::from_words("ab", &["a", "ab", "bba"], &["baa", "aa", "bb"]).unwrap();
    let c = census(&gen_pcp_game(&inst));
    assert_eq!(c.place_groups["p1"], expected_player_places(&inst, 1));
    assert_eq!(c.place_groups["p2"], expected_player_places(&inst, 2));
    // per player: n start moves, 9 * (n choice moves + end + one per letter + n returns)
    for k in [1, 2] {
        let letters: usize = inst.words(k).iter().map(Vec::len).sum();
        let expected = 3 + 9 * (3 + 1 + letters + 3);
        assert_eq!(c.transition_groups[&format!("p{k}")], expected);
    }
}

#[test]
fn initial_marking_and_partition() {
    let game = gen_pcp_game(&a_a());
    let net = &game.net;
    let names: BTreeSet<&str> = net.initial().support().map(|&p| net.place_name(p)).collect();
    assert_eq!(names, BTreeSet::from(["e.ch", "p1.start.00", "p2.start.00"]));
    for p in net.places() {
        let env = net.place_name(p).starts_with("e.");
        assert_eq!(game.kind(p) == PlaceKind::Env, env, "{}", net.place_name(p));
    }
    assert_eq!(game.env_tokens(net.initial()), 1);
    assert!(net.place_id(ENV_START).is_some());
}

#[test]
fn every_move_changes_at_most_one_counter() {
    let inst = PcpInstance::from_words("ab", &["ab", "b"], &["a", "bab"]).unwrap();
    let game = gen_pcp_game(&inst);
    for t in game.net.transitions().iter().filter(|t| t.name.starts_with('p')) {
        let pre: Vec<PcpPlace> = t.pre.support().map(|&p| game.net.place_name(p).parse().unwrap()).collect();
        let post: Vec<PcpPlace> = t.post.support().map(|&p| game.net.place_name(p).parse().unwrap()).collect();
        let (a, b) = (pre[0], post[0]);
        assert_eq!((pre.len(), post.len()), (1, 1));
        let di = (b.index + 3 - a.index) % 3;
        let dl = (b.letter + 3 - a.letter) % 3;
        match b.pos {
            Pos::Index(_) => assert_eq!((di, dl), (1, 0), "{}", t.name),
            Pos::Letter(..) => assert_eq!((di, dl), (0, 1), "{}", t.name),
            Pos::Choice | Pos::Term => assert_eq!((di, dl), (0, 0), "{}", t.name),
            Pos::Start => panic!("{} enters the start place", t.name),
        }
    }
}

#[test]
fn choice_step_example() {
    let inst = a_a();
    let found = player_transitions(&inst, 1).into_iter().any(|t| {
        t.label == Label::Index(0)
            && t.src == PcpPlace { player: 1, pos: Pos::Choice, index: 2, letter: 1 }
            && t.dst == PcpPlace { player: 1, pos: Pos::Index(0), index: 0, letter: 1 }
    });
    assert!(found);
    assert_eq!(player_places(&inst, 2).len(), 37);
}

#[test]
fn good_and_bad_are_disjoint_on_reachable_markings() {
    for inst in [a_a(), a_b()] {
        let game = gen_pcp_game(&inst);
        let graph = reachable_markings(&game.net, 1, 200_000).unwrap();
        let mut seen = BTreeSet::new();
        for m in &graph.markings {
            let class = classify_marking(&game, m).unwrap_or_else(|e| panic!("{e}"));
            seen.insert(format!("{class:?}"));
        }
        // all three classes actually occur
        assert_eq!(seen.len(), 3, "{seen:?}");
    }
}

#[test]
fn every_family_is_present() {
    // with a single index pair no two indices differ
    let single: BTreeSet<Family> =
        pattern_families(&a_b(), &gen_pcp_game(&a_b()).net).into_iter().map(|(f, _)| f).collect();
    assert!(!single.contains(&Family::BadIndex));
    let inst = PcpInstance::from_words("ab", &["a", "ab"], &["b", "ba"]).unwrap();
    let game = gen_pcp_game(&inst);
    let families: BTreeSet<Family> = pattern_families(&inst, &game.net).into_iter().map(|(f, _)| f).collect();
    assert_eq!(families.len(), 9);
}

#[test]
fn solution_of_a_a_wins_under_every_decision() {
    let inst = a_a();
    let game = gen_pcp_game(&inst);
    for env in EnvChoice::ALL {
        let r = check_pcp_play_with(&game, &inst, &[0], env).unwrap();
        assert_eq!(r.verdict, PlayVerdict::GoodBeforeBad, "{env:?}");
    }
    assert_eq!(check_pcp_play(&game, &inst, &[0, 0]).unwrap().verdict, PlayVerdict::GoodBeforeBad);
}

#[test]
fn mismatch_is_caught_by_the_letter_check() {
    let inst = a_b();
    let game = gen_pcp_game(&inst);
    let okay = EnvChoice { check: Check::Letter, suspect: Suspect::Okay };
    assert_eq!(check_pcp_play_with(&game, &inst, &[0], okay).unwrap().verdict, PlayVerdict::BadFirst);
    let worst = check_pcp_play(&game, &inst, &[0]).unwrap();
    assert_eq!(worst.verdict, PlayVerdict::BadFirst);
    assert_eq!(worst.env.check, Check::Letter);
}

#[test]
fn verdicts_agree_with_solution_check() {
    let inst = PcpInstance::from_words("ab", &["a", "ab", "bba"], &["baa", "aa", "bb"]).unwrap();
    let game = gen_pcp_game(&inst);
    for seq in [vec![2, 1, 2, 0], vec![0], vec![1, 2], vec![2, 1], vec![2, 1, 2]] {
        let verdict = check_pcp_play(&game, &inst, &seq).unwrap().verdict;
        assert_eq!(verdict == PlayVerdict::GoodBeforeBad, inst.is_solution(&seq), "{seq:?}");
    }
}

#[test]
fn length_gaps_of_one_and_two_letters() {
    // "bba ab" against "bb aa": one letter apart, so the letter counters of
    // the terminated players differ and nothing is decided
    let inst = PcpInstance::from_words("ab", &["a", "ab", "bba"], &["baa", "aa", "bb"]).unwrap();
    let game = gen_pcp_game(&inst);
    let okay = EnvChoice { check: Check::Letter, suspect: Suspect::Okay };
    assert_eq!(check_pcp_play_with(&game, &inst, &[2, 1], okay).unwrap().verdict, PlayVerdict::NeitherReached);
    // two words apart in index count: the terminated player is caught
    let inst = PcpInstance::from_words("a", &["a", "aa"], &["aa", "a"]).unwrap();
    let game = gen_pcp_game(&inst);
    let r = check_pcp_play_with(&game, &inst, &[0], EnvChoice { check: Check::Letter, suspect: Suspect::Okay }).unwrap();
    assert_eq!(r.verdict, PlayVerdict::BadFirst);
}

#[test]
fn empty_or_unknown_sequences_are_rejected() {
    let inst = a_a();
    let game = gen_pcp_game(&inst);
    assert_eq!(check_pcp_play(&game, &inst, &[]).unwrap_err(), PcpError::EmptySequence);
    assert_eq!(check_pcp_play(&game, &inst, &[1]).unwrap_err(), PcpError::NoSuchIndex(1));
}

#[test]
fn letter_classes_stay_distinct() {
    let inst = a_a();
    let game = gen_pcp_game(&inst);
    let start = game.net.initial().clone();
    assert_eq!(classify_marking(&game, &start).unwrap(), MarkingClass::Neutral);
}
