//! Plain-text game format.
//!
//! ```text
//! # comment lines start with '#'
//! places {
//!   system: p k w
//!   env: forecast s s'
//! }
//! init: forecast
//! transition p_h {
//!   pre: p
//!   post: k:2
//!   flow: p->k, new->k
//! }
//! winning {
//!   kind: bad-markings
//!   pattern: exact s':1; sum k+w 0 3; others-zero
//! }
//! ```
//!
//! Token lists are separated by spaces or commas; `name:n` gives a weight.
//! Winning kinds are `bad-places` (with a `places:` line), `bad-markings` and
//! `good-markings` (with `pattern:` lines) and `good-and-bad` (with `good:`
//! and `bad:` lines). Pattern items are `exact p:n ...`, `range p lo hi`,
//! `sum p+q lo hi` and `others-zero`, separated by `;`; `*` as upper bound
//! means unbounded. [`print_game`] emits the canonical form, which
//! [`parse_game`] reads back unchanged.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::error::{GameError, NetError};
use crate::game::{PetriGame, PlaceKind, WinningCondition};
use crate::net::{FlowEnd, NetBuilder, PetriNet, TransitionSpec};
use crate::pattern::{MarkingPattern, Range};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Game(#[from] GameError),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

fn items(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c.is_whitespace() || c == ',').filter(|x| !x.is_empty())
}

fn weighted(line: usize, tok: &str) -> Result<(String, u32), ParseError> {
    match tok.rsplit_once(':') {
        Some((p, n)) if !p.is_empty() => {
            let n = n.parse().map_err(|_| syntax(line, format!("bad weight in `{tok}`")))?;
            Ok((p.to_string(), n))
        }
        _ => Ok((tok.to_string(), 1)),
    }
}

fn bound(line: usize, s: &str) -> Result<Option<u32>, ParseError> {
    if s == "*" {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| syntax(line, format!("bad bound `{s}`")))
}

enum RawItem {
    Exact(Vec<(String, u32)>),
    Range(String, u32, Option<u32>),
    Sum(Vec<String>, u32, Option<u32>),
    OthersZero,
}

fn parse_pattern_items(line: usize, s: &str) -> Result<Vec<RawItem>, ParseError> {
    let mut out = Vec::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let words: Vec<&str> = part.split_whitespace().collect();
        match words[0] {
            "others-zero" if words.len() == 1 => out.push(RawItem::OthersZero),
            "exact" => {
                let ws = words[1..].iter().map(|w| weighted(line, w)).collect::<Result<_, _>>()?;
                out.push(RawItem::Exact(ws));
            }
            "range" if words.len() == 4 => {
                let lo = words[2].parse().map_err(|_| syntax(line, "bad lower bound"))?;
                out.push(RawItem::Range(words[1].to_string(), lo, bound(line, words[3])?));
            }
            "sum" if words.len() == 4 => {
                let ps = words[1].split('+').map(str::to_string).collect();
                let lo = words[2].parse().map_err(|_| syntax(line, "bad lower bound"))?;
                out.push(RawItem::Sum(ps, lo, bound(line, words[3])?));
            }
            other => return Err(syntax(line, format!("unknown pattern item `{other}`"))),
        }
    }
    Ok(out)
}

fn resolve_pattern(net: &PetriNet, raw: &[RawItem]) -> Result<MarkingPattern, NetError> {
    let id = |p: &str| net.place_id(p).ok_or_else(|| NetError::UnknownPlace(p.to_string()));
    let mut pat = MarkingPattern::default();
    for item in raw {
        match item {
            RawItem::Exact(ws) => {
                for (p, c) in ws {
                    pat.exact.insert(id(p)?, *c);
                }
            }
            RawItem::Range(p, lo, hi) => {
                pat.ranges.insert(id(p)?, Range::new(*lo, *hi));
            }
            RawItem::Sum(ps, lo, hi) => {
                let set = ps.iter().map(|p| id(p)).collect::<Result<BTreeSet<_>, _>>()?;
                pat.sums.push((set, Range::new(*lo, *hi)));
            }
            RawItem::OthersZero => pat.others_zero = true,
        }
    }
    Ok(pat)
}

#[derive(PartialEq)]
enum Block {
    None,
    Places,
    Transition,
    Winning,
}

/// Parses a game in the text format.
pub fn parse_game(text: &str) -> Result<PetriGame, ParseError> {
    let mut builder = NetBuilder::new();
    let mut system = Vec::new();
    let mut env = Vec::new();
    let mut block = Block::None;
    let mut current: Option<TransitionSpec> = None;
    let mut kind: Option<String> = None;
    let mut bad_places: Vec<String> = Vec::new();
    // (role, line, items) where role is "pattern", "good" or "bad"
    let mut patterns: Vec<(String, Vec<RawItem>)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        if l == "}" {
            if block == Block::None {
                return Err(syntax(line, "unbalanced `}`"));
            }
            if block == Block::Transition {
                builder.transition(current.take().expect("open transition"));
            }
            block = Block::None;
            continue;
        }
        match block {
            Block::None => {
                if l == "places {" {
                    block = Block::Places;
                } else if l == "winning {" {
                    block = Block::Winning;
                } else if let Some(rest) = l.strip_prefix("transition ") {
                    let name = rest.strip_suffix('{').map(str::trim).ok_or_else(|| syntax(line, "expected `{`"))?;
                    if name.is_empty() || name.contains(char::is_whitespace) {
                        return Err(syntax(line, "bad transition name"));
                    }
                    current = Some(TransitionSpec { name: name.to_string(), ..Default::default() });
                    block = Block::Transition;
                } else if let Some(rest) = l.strip_prefix("init:") {
                    for tok in items(rest) {
                        let (p, c) = weighted(line, tok)?;
                        builder.initial(p, c);
                    }
                } else {
                    return Err(syntax(line, format!("unexpected `{l}`")));
                }
            }
            Block::Places => {
                let (key, rest) = l.split_once(':').ok_or_else(|| syntax(line, "expected `system:` or `env:`"))?;
                let target = match key.trim() {
                    "system" => &mut system,
                    "env" => &mut env,
                    k => return Err(syntax(line, format!("unknown place kind `{k}`"))),
                };
                target.extend(items(rest).map(str::to_string));
            }
            Block::Transition => {
                let spec = current.as_mut().expect("open transition");
                let (key, rest) = l.split_once(':').ok_or_else(|| syntax(line, "expected `key: value`"))?;
                match key.trim() {
                    "pre" => {
                        for tok in items(rest) {
                            spec.pre.push(weighted(line, tok)?);
                        }
                    }
                    "post" => {
                        for tok in items(rest) {
                            spec.post.push(weighted(line, tok)?);
                        }
                    }
                    "flow" => {
                        let mut pairs = Vec::new();
                        for tok in items(rest) {
                            let (s, d) = tok.split_once("->").ok_or_else(|| syntax(line, format!("bad flow `{tok}`")))?;
                            let s = (s != "new").then(|| s.to_string());
                            let d = (d != "drop").then(|| d.to_string());
                            pairs.push((s, d));
                        }
                        spec.flow = Some(pairs);
                    }
                    k => return Err(syntax(line, format!("unknown transition key `{k}`"))),
                }
            }
            Block::Winning => {
                let (key, rest) = l.split_once(':').ok_or_else(|| syntax(line, "expected `key: value`"))?;
                match key.trim() {
                    "kind" => kind = Some(rest.trim().to_string()),
                    "places" => bad_places.extend(items(rest).map(str::to_string)),
                    role @ ("pattern" | "good" | "bad") => {
                        patterns.push((role.to_string(), parse_pattern_items(line, rest)?));
                    }
                    k => return Err(syntax(line, format!("unknown winning key `{k}`"))),
                }
            }
        }
    }
    if block != Block::None {
        return Err(syntax(text.lines().count(), "unterminated block"));
    }

    for p in system.iter().chain(&env) {
        builder.place(p.clone());
    }
    let net = builder.build()?;
    let mut kinds = vec![PlaceKind::System; net.num_places()];
    for p in &env {
        kinds[net.place_id(p).expect("declared").idx()] = PlaceKind::Env;
    }
    let kind = kind.ok_or_else(|| syntax(0, "missing winning kind"))?;
    let pick = |role: &str| -> Result<Vec<MarkingPattern>, ParseError> {
        patterns
            .iter()
            .filter(|(r, _)| r == role)
            .map(|(_, raw)| resolve_pattern(&net, raw).map_err(ParseError::from))
            .collect()
    };
    let winning = match kind.as_str() {
        "bad-places" => {
            let set = bad_places
                .iter()
                .map(|p| net.place_id(p).ok_or_else(|| NetError::UnknownPlace(p.clone())))
                .collect::<Result<_, _>>()?;
            WinningCondition::BadPlaces(set)
        }
        "bad-markings" => WinningCondition::BadMarkings(pick("pattern")?),
        "good-markings" => WinningCondition::GoodMarkings(pick("pattern")?),
        "good-and-bad" => WinningCondition::GoodAndBad { good: pick("good")?, bad: pick("bad")? },
        k => return Err(syntax(0, format!("unknown winning kind `{k}`"))),
    };
    Ok(PetriGame::new(net, kinds, winning)?)
}

fn fmt_weighted(net: &PetriNet, m: &crate::net::Marking) -> String {
    m.iter()
        .map(|(p, &c)| if c == 1 { net.place_name(*p).to_string() } else { format!("{}:{c}", net.place_name(*p)) })
        .collect::<Vec<_>>()
        .join(" ")
}

fn fmt_hi(hi: Option<u32>) -> String {
    hi.map_or_else(|| "*".to_string(), |h| h.to_string())
}

pub fn print_pattern(net: &PetriNet, pat: &MarkingPattern) -> String {
    let mut parts = Vec::new();
    if !pat.exact.is_empty() {
        let ws: Vec<String> = pat.exact.iter().map(|(p, c)| format!("{}:{c}", net.place_name(*p))).collect();
        parts.push(format!("exact {}", ws.join(" ")));
    }
    for (p, r) in &pat.ranges {
        parts.push(format!("range {} {} {}", net.place_name(*p), r.lo, fmt_hi(r.hi)));
    }
    for (ps, r) in &pat.sums {
        let names: Vec<&str> = ps.iter().map(|p| net.place_name(*p)).collect();
        parts.push(format!("sum {} {} {}", names.join("+"), r.lo, fmt_hi(r.hi)));
    }
    if pat.others_zero {
        parts.push("others-zero".to_string());
    }
    parts.join("; ")
}

/// Prints the canonical text form of `game`.
pub fn print_game(game: &PetriGame) -> String {
    let net = &game.net;
    let mut s = String::new();
    let names = |kind: PlaceKind| -> String {
        net.places().filter(|&p| game.kind(p) == kind).map(|p| net.place_name(p)).collect::<Vec<_>>().join(" ")
    };
    let _ = writeln!(s, "places {{");
    let _ = writeln!(s, "  system: {}", names(PlaceKind::System));
    let _ = writeln!(s, "  env: {}", names(PlaceKind::Env));
    let _ = writeln!(s, "}}");
    let _ = writeln!(s, "init: {}", fmt_weighted(net, net.initial()));
    for t in net.transitions() {
        let _ = writeln!(s, "transition {} {{", t.name);
        let _ = writeln!(s, "  pre: {}", fmt_weighted(net, &t.pre));
        let _ = writeln!(s, "  post: {}", fmt_weighted(net, &t.post));
        if let Some(flow) = &t.flow {
            let end = |e: &FlowEnd, none: &str| match e {
                FlowEnd::Place(p) => net.place_name(*p).to_string(),
                _ => none.to_string(),
            };
            let pairs: Vec<String> = flow.iter().map(|(a, b)| format!("{}->{}", end(a, "new"), end(b, "drop"))).collect();
            let _ = writeln!(s, "  flow: {}", pairs.join(", "));
        }
        let _ = writeln!(s, "}}");
    }
    let _ = writeln!(s, "winning {{");
    let _ = writeln!(s, "  kind: {}", game.winning.kind_name());
    match &game.winning {
        WinningCondition::BadPlaces(b) => {
            let names: Vec<&str> = b.iter().map(|p| net.place_name(*p)).collect();
            let _ = writeln!(s, "  places: {}", names.join(" "));
        }
        WinningCondition::BadMarkings(ps) | WinningCondition::GoodMarkings(ps) => {
            for p in ps {
                let _ = writeln!(s, "  pattern: {}", print_pattern(net, p));
            }
        }
        WinningCondition::GoodAndBad { good, bad } => {
            for p in good {
                let _ = writeln!(s, "  good: {}", print_pattern(net, p));
            }
            for p in bad {
                let _ = writeln!(s, "  bad: {}", print_pattern(net, p));
            }
        }
    }
    let _ = writeln!(s, "}}");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "
# two players
places {
  system: a b
  env: e f
}
init: a, e
transition t {
  pre: a e
  post: b:2 f
  flow: e->f, a->b, new->b
}
winning {
  kind: bad-markings
  pattern: exact f:1; sum a+b 2 *; others-zero
}
";

    #[test]
    fn parses_and_reprints_canonically() {
        let g = parse_game(SAMPLE).unwrap();
        assert_eq!(g.net.num_places(), 4);
        let printed = print_game(&g);
        let again = parse_game(&printed).unwrap();
        assert_eq!(again, g);
        assert_eq!(print_game(&again), printed);
    }

    #[test]
    fn unknown_place_is_reported() {
        let bad = SAMPLE.replace("post: b:2 f", "post: zz");
        assert!(matches!(parse_game(&bad), Err(ParseError::Net(NetError::UnknownPlace(p))) if p == "zz"));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_game("places {\n  wrong: a\n}\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }));
    }
}
