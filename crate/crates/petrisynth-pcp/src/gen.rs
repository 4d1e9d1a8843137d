//! The Petri game of a PCP instance: two system players that each write a
//! candidate solution index by index and letter by letter, and one
//! environment player that secretly picks what to compare.
//!
//! Each system place pairs a position in the player's output automaton with
//! two counters modulo 3, one counting indices and one counting letters. The
//! good and bad markings compare the two players only when their counters
//! line up, which restricts the interesting interleavings to turn-taking
//! ones.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use petrisynth_net::{MarkingPattern, NetBuilder, PetriGame, PetriNet, PlaceId, PlaceKind, Range, WinningCondition};
use serde::Serialize;

use crate::instance::PcpInstance;

/// Position in a player's output automaton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Pos {
    Start,
    Choice,
    Term,
    /// Index `i` was just chosen.
    Index(usize),
    /// Letter `j` of word `i` (which is `l`) was just written.
    Letter(usize, usize, char),
}

/// A system place: player, position and the two counters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PcpPlace {
    pub player: u8,
    pub pos: Pos,
    pub index: u8,
    pub letter: u8,
}

impl fmt::Display for PcpPlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}.", self.player)?;
        match self.pos {
            Pos::Start => write!(f, "start")?,
            Pos::Choice => write!(f, "choice")?,
            Pos::Term => write!(f, "term")?,
            Pos::Index(i) => write!(f, "i{i}")?,
            Pos::Letter(i, j, l) => write!(f, "i{i}j{j}{l}")?,
        }
        write!(f, ".{}{}", self.index, self.letter)
    }
}

impl FromStr for PcpPlace {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let err = || format!("`{s}` is not a PCP system place");
        let mut parts = s.split('.');
        let (Some(player), Some(pos), Some(counters), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(err());
        };
        let player = match player {
            "p1" => 1,
            "p2" => 2,
            _ => return Err(err()),
        };
        let digits: Vec<u8> = counters.bytes().map(|b| b.wrapping_sub(b'0')).collect();
        if digits.len() != 2 || digits.iter().any(|&d| d > 2) {
            return Err(err());
        }
        let pos = match pos {
            "start" => Pos::Start,
            "choice" => Pos::Choice,
            "term" => Pos::Term,
            _ => {
                let rest = pos.strip_prefix('i').ok_or_else(err)?;
                match rest.split_once('j') {
                    None => Pos::Index(rest.parse().map_err(|_| err())?),
                    Some((i, jl)) => {
                        let l = jl.chars().last().ok_or_else(err)?;
                        let j = &jl[..jl.len() - l.len_utf8()];
                        Pos::Letter(i.parse().map_err(|_| err())?, j.parse().map_err(|_| err())?, l)
                    }
                }
            }
        };
        Ok(Self { player, pos, index: digits[0], letter: digits[1] })
    }
}

/// Transition labels of the system players.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Label {
    Index(usize),
    Letter(char),
    Tau,
    /// The termination transition `#k`.
    End,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Index(i) => write!(f, "{i}"),
            Label::Letter(l) => write!(f, "{l}"),
            Label::Tau => write!(f, "tau"),
            Label::End => write!(f, "end"),
        }
    }
}

/// A system-player transition `src --label--> dst`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PcpTransition {
    pub label: Label,
    pub src: PcpPlace,
    pub dst: PcpPlace,
}

impl PcpTransition {
    /// Unique name embedding label, source and target.
    pub fn name(&self) -> String {
        let strip = |p: &PcpPlace| p.to_string()[3..].to_string();
        format!("p{}.{}@{}>{}", self.src.player, self.label, strip(&self.src), strip(&self.dst))
    }
}

/// What the environment compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Check {
    Index,
    Letter,
}

/// Whom the environment suspects of terminating untruthfully.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Suspect {
    First,
    Okay,
    Second,
}

/// The environment's single decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EnvChoice {
    pub check: Check,
    pub suspect: Suspect,
}

impl EnvChoice {
    pub const ALL: [EnvChoice; 6] = [
        EnvChoice { check: Check::Index, suspect: Suspect::First },
        EnvChoice { check: Check::Index, suspect: Suspect::Okay },
        EnvChoice { check: Check::Index, suspect: Suspect::Second },
        EnvChoice { check: Check::Letter, suspect: Suspect::First },
        EnvChoice { check: Check::Letter, suspect: Suspect::Okay },
        EnvChoice { check: Check::Letter, suspect: Suspect::Second },
    ];

    fn suffix(&self) -> String {
        let c = match self.check {
            Check::Index => "index",
            Check::Letter => "letter",
        };
        let s = match self.suspect {
            Suspect::First => "first",
            Suspect::Okay => "okay",
            Suspect::Second => "second",
        };
        format!("{c}.{s}")
    }

    /// The environment place storing this decision.
    pub fn place(&self) -> String {
        format!("e.{}", self.suffix())
    }

    /// The environment transition making this decision.
    pub fn transition(&self) -> String {
        format!("t.{}", self.suffix())
    }
}

/// The environment's initial place.
pub const ENV_START: &str = "e.ch";

/// Counter pairs where the second player is exactly one step ahead.
const AHEAD: [(u8, u8); 3] = [(0, 1), (2, 0), (1, 2)];

fn positions(inst: &PcpInstance, k: u8) -> Vec<Pos> {
    let mut out = vec![Pos::Start, Pos::Choice, Pos::Term];
    for (i, w) in inst.words(k).iter().enumerate() {
        out.push(Pos::Index(i));
        out.extend(w.iter().enumerate().map(|(j, &l)| Pos::Letter(i, j, l)));
    }
    out
}

/// All places of system player `k`; the start position only with zero
/// counters.
pub fn player_places(inst: &PcpInstance, k: u8) -> Vec<PcpPlace> {
    let mut out = vec![PcpPlace { player: k, pos: Pos::Start, index: 0, letter: 0 }];
    for pos in positions(inst, k).into_iter().skip(1) {
        for index in 0..3 {
            for letter in 0..3 {
                out.push(PcpPlace { player: k, pos, index, letter });
            }
        }
    }
    out
}

/// All transitions of system player `k`.
pub fn player_transitions(inst: &PcpInstance, k: u8) -> Vec<PcpTransition> {
    let at = |pos, index, letter| PcpPlace { player: k, pos, index, letter };
    let n = inst.len();
    let mut out = Vec::new();
    for i in 0..n {
        out.push(PcpTransition { label: Label::Index(i), src: at(Pos::Start, 0, 0), dst: at(Pos::Index(i), 1, 0) });
    }
    for x in 0..3 {
        for a in 0..3 {
            for i in 0..n {
                out.push(PcpTransition {
                    label: Label::Index(i),
                    src: at(Pos::Choice, x, a),
                    dst: at(Pos::Index(i), (x + 1) % 3, a),
                });
            }
            out.push(PcpTransition { label: Label::End, src: at(Pos::Choice, x, a), dst: at(Pos::Term, x, a) });
            // word letters: the source counter is `a` for the first letter
            // and advances with each one
            for (i, w) in inst.words(k).iter().enumerate() {
                let mut prev = Pos::Index(i);
                let mut count = a;
                for (j, &l) in w.iter().enumerate() {
                    let next = Pos::Letter(i, j, l);
                    out.push(PcpTransition {
                        label: Label::Letter(l),
                        src: at(prev, x, count),
                        dst: at(next, x, (count + 1) % 3),
                    });
                    prev = next;
                    count = (count + 1) % 3;
                }
            }
        }
    }
    for x in 0..3 {
        for a in 0..3 {
            for (i, w) in inst.words(k).iter().enumerate() {
                let last = w.len() - 1;
                out.push(PcpTransition {
                    label: Label::Tau,
                    src: at(Pos::Letter(i, last, w[last]), x, a),
                    dst: at(Pos::Choice, x, a),
                });
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// A marking family of the construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    GoodFinish,
    GoodIndex,
    GoodLetter,
    GoodTerm,
    GoodEnvFirst,
    BadIndex,
    BadLetter,
    BadTermIndex,
    BadTermLetter,
}

impl Family {
    pub fn is_good(self) -> bool {
        matches!(
            self,
            Family::GoodFinish | Family::GoodIndex | Family::GoodLetter | Family::GoodTerm | Family::GoodEnvFirst
        )
    }
}

/// Helper turning "one token somewhere in this set" constraints into
/// patterns. Each player holds exactly one token, so a product of per-player
/// sets is a conjunction of sums equal to one.
struct Patterns<'a> {
    inst: &'a PcpInstance,
    net: &'a PetriNet,
}

type Part = Option<BTreeSet<PlaceId>>;

impl Patterns<'_> {
    fn id(&self, name: &str) -> PlaceId {
        self.net.place_id(name).expect("generated place")
    }

    fn sys(&self, k: u8, pred: impl Fn(&PcpPlace) -> bool) -> Part {
        Some(player_places(self.inst, k).iter().filter(|p| pred(p)).map(|p| self.id(&p.to_string())).collect())
    }

    fn env(&self, check: Option<Check>, suspects: &[Suspect]) -> Part {
        Some(
            EnvChoice::ALL
                .iter()
                .filter(|c| check.is_none_or(|x| x == c.check) && suspects.contains(&c.suspect))
                .map(|c| self.id(&c.place()))
                .collect(),
        )
    }

    /// `None` if some part is empty (the family member is vacuous).
    fn product(&self, parts: [Part; 3]) -> Option<MarkingPattern> {
        let mut pat = MarkingPattern::default();
        for set in parts.into_iter().flatten() {
            match set.len() {
                0 => return None,
                1 => {
                    pat.exact.insert(*set.iter().next().expect("one place"), 1);
                }
                _ => pat.sums.push((set, Range::new(1, Some(1)))),
            }
        }
        Some(pat)
    }
}

const ALL_SUSPECTS: [Suspect; 3] = [Suspect::First, Suspect::Okay, Suspect::Second];

fn is_index(p: &PcpPlace) -> bool {
    matches!(p.pos, Pos::Index(_))
}

fn is_letter(p: &PcpPlace) -> bool {
    matches!(p.pos, Pos::Letter(..))
}

fn letter_of(p: &PcpPlace) -> Option<char> {
    match p.pos {
        Pos::Letter(_, _, l) => Some(l),
        _ => None,
    }
}

/// Every good and bad pattern, tagged with its family.
pub fn pattern_families(inst: &PcpInstance, net: &PetriNet) -> Vec<(Family, MarkingPattern)> {
    let pt = Patterns { inst, net };
    let mut out = Vec::new();
    let mut push = |f: Family, parts: [Part; 3]| {
        if let Some(p) = pt.product(parts) {
            out.push((f, p));
        }
    };
    let term = |p: &PcpPlace| p.pos == Pos::Term;
    for x in 0..3 {
        for a in 0..3 {
            let at = |p: &PcpPlace| term(p) && p.index == x && p.letter == a;
            push(Family::GoodFinish, [pt.sys(1, at), pt.sys(2, at), pt.env(None, &[Suspect::Okay])]);
        }
    }
    for (y, z) in AHEAD {
        let index = Some(Check::Index);
        push(
            Family::GoodIndex,
            [pt.sys(1, |p| is_index(p) && p.index == y), pt.sys(2, |p| !term(p) && p.index == z), pt.env(index, &ALL_SUSPECTS)],
        );
        push(
            Family::GoodIndex,
            [pt.sys(1, |p| !term(p) && p.index == y), pt.sys(2, |p| is_index(p) && p.index == z), pt.env(index, &ALL_SUSPECTS)],
        );
    }
    for (b, c) in AHEAD {
        let letter = Some(Check::Letter);
        push(
            Family::GoodLetter,
            [pt.sys(1, |p| is_letter(p) && p.letter == b), pt.sys(2, |p| !term(p) && p.letter == c), pt.env(letter, &ALL_SUSPECTS)],
        );
        push(
            Family::GoodLetter,
            [pt.sys(1, |p| !term(p) && p.letter == b), pt.sys(2, |p| is_letter(p) && p.letter == c), pt.env(letter, &ALL_SUSPECTS)],
        );
    }
    push(Family::GoodTerm, [pt.sys(1, term), None, pt.env(None, &[Suspect::First])]);
    push(Family::GoodTerm, [None, pt.sys(2, term), pt.env(None, &[Suspect::Second])]);
    let fresh = |p: &PcpPlace| is_index(p) && p.index == 1 && p.letter == 0;
    let ch = Some(BTreeSet::from([pt.id(ENV_START)]));
    push(Family::GoodEnvFirst, [pt.sys(1, fresh), None, ch.clone()]);
    push(Family::GoodEnvFirst, [None, pt.sys(2, fresh), ch]);

    for x in 0..3 {
        for i1 in 0..inst.len() {
            push(
                Family::BadIndex,
                [
                    pt.sys(1, |p| p.pos == Pos::Index(i1) && p.index == x),
                    pt.sys(2, |p| is_index(p) && p.pos != Pos::Index(i1) && p.index == x),
                    pt.env(Some(Check::Index), &ALL_SUSPECTS),
                ],
            );
        }
    }
    for a in 0..3 {
        for &l in &inst.alphabet {
            push(
                Family::BadLetter,
                [
                    pt.sys(1, |p| letter_of(p) == Some(l) && p.letter == a),
                    pt.sys(2, |p| letter_of(p).is_some_and(|m| m != l) && p.letter == a),
                    pt.env(Some(Check::Letter), &ALL_SUSPECTS),
                ],
            );
        }
    }
    // A terminated player suspected of not terminating is already good, so
    // the bad families leave out that suspicion.
    let not_first = [Suspect::Okay, Suspect::Second];
    let not_second = [Suspect::First, Suspect::Okay];
    for (y, z) in AHEAD {
        let index = Some(Check::Index);
        push(
            Family::BadTermIndex,
            [pt.sys(1, |p| term(p) && p.index == y), pt.sys(2, |p| is_index(p) && p.index == z), pt.env(index, &not_first)],
        );
        push(
            Family::BadTermIndex,
            [pt.sys(1, |p| is_index(p) && p.index == y), pt.sys(2, |p| term(p) && p.index == z), pt.env(index, &not_second)],
        );
    }
    for (b, c) in AHEAD {
        let letter = Some(Check::Letter);
        push(
            Family::BadTermLetter,
            [pt.sys(1, |p| term(p) && p.letter == b), pt.sys(2, |p| is_letter(p) && p.letter == c), pt.env(letter, &not_first)],
        );
        push(
            Family::BadTermLetter,
            [pt.sys(1, |p| is_letter(p) && p.letter == b), pt.sys(2, |p| term(p) && p.letter == c), pt.env(letter, &not_second)],
        );
    }
    out
}

/// The net of the construction without winning condition.
pub fn pcp_net(inst: &PcpInstance) -> PetriNet {
    let mut b = NetBuilder::new();
    for k in [1, 2] {
        for p in player_places(inst, k) {
            b.place(p.to_string());
        }
        for t in player_transitions(inst, k) {
            b.arc_transition(&t.name(), &[(&t.src.to_string(), 1)], &[(&t.dst.to_string(), 1)]);
        }
        b.initial(PcpPlace { player: k, pos: Pos::Start, index: 0, letter: 0 }.to_string(), 1);
    }
    b.place(ENV_START);
    for c in EnvChoice::ALL {
        b.place(c.place());
        b.arc_transition(&c.transition(), &[(ENV_START, 1)], &[(&c.place(), 1)]);
    }
    b.initial(ENV_START, 1);
    b.build().expect("generated net is well-formed")
}

/// Builds the good-and-bad-markings game of `inst`.
pub fn gen_pcp_game(inst: &PcpInstance) -> PetriGame {
    let net = pcp_net(inst);
    let kinds = net
        .places()
        .map(|p| if net.place_name(p).starts_with("e.") { PlaceKind::Env } else { PlaceKind::System })
        .collect();
    let (good, bad): (Vec<_>, Vec<_>) = pattern_families(inst, &net).into_iter().partition(|(f, _)| f.is_good());
    let winning = WinningCondition::GoodAndBad {
        good: good.into_iter().map(|(_, p)| p).collect(),
        bad: bad.into_iter().map(|(_, p)| p).collect(),
    };
    PetriGame::new(net, kinds, winning).expect("generated game is well-formed")
}
