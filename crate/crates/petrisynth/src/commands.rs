//! The commands behind the `petrisynth` binary.
//!
//! Commands take file contents rather than paths and return everything they
//! produce (report text, artifacts, exit code) so that callers decide what
//! reaches the disk. Wall-clock timings are kept apart from the report; all
//! other output is a deterministic function of the inputs.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use petrisynth_net::{classify_marking, parse_game, print_game, MarkingClass, PetriGame};
use petrisynth_pcp::{census, gen_pcp_game, good_bad_to_good, sample_projections, PcpInstance, Scheduler};
use petrisynth_reduce::{build_arena, explain, extract, solve_game, EdgeKind};
use petrisynth_strategy::{all_violations, simulate_play, StrategyFile, StrategyNet};

use crate::config::{Emit, RunConfig};
use crate::emit::{arena_dot, arena_dump, strategy_dot};
use crate::error::{exit, CliError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub content: String,
}

#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
    pub artifacts: Vec<Artifact>,
    pub timings: Vec<(&'static str, Duration)>,
}

impl Outcome {
    fn line(&mut self, s: impl AsRef<str>) {
        self.report.push_str(s.as_ref());
        self.report.push('\n');
    }

    fn artifact(&mut self, name: String, content: String) {
        self.artifacts.push(Artifact { name, content });
    }

    fn timed<T>(&mut self, what: &'static str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push((what, start.elapsed()));
        out
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn load_game(text: &str) -> Result<PetriGame, CliError> {
    Ok(parse_game(text)?)
}

/// Solves a bad-place or bad-marking game and extracts a strategy when the
/// system players win.
pub fn solve(text: &str, stem: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let game = load_game(text)?;
    let mut out = Outcome::default();
    let solved = out.timed("solve", || solve_game(&game, cfg.reduce_options()))?;
    let rg = &solved.reduced;
    out.line(format!("arena: {} states, {} edges", rg.nodes.len(), rg.arena.num_edges()));
    out.line(format!("class: max {} system tokens, {} reachable markings", rg.class.max_s, rg.class.reachable));
    if solved.winning {
        out.code = exit::WIN;
        out.line("verdict: winning");
        let net = out
            .timed("extract", || extract(&game, rg, &solved.solution))
            .map_err(|e| petrisynth_reduce::ReduceError::Extract(e.to_string()))?;
        let violations = out.timed("validate", || all_violations(&game, &net, cfg.max_markings));
        out.line(format!(
            "strategy: {} places, {} transitions, {} loop-back arcs",
            net.places.len(),
            net.transitions.len(),
            net.loop_back_count()
        ));
        if violations.is_empty() {
            out.line("validators: all passed");
        } else {
            for v in &violations {
                out.line(format!("validator: {v}"));
            }
            out.code = exit::INTERNAL;
        }
        if cfg.emits(Emit::Json) {
            out.artifact(format!("{stem}.strategy.json"), to_json(&net.to_file(&game))?);
        }
        if cfg.emits(Emit::Dot) {
            out.artifact(format!("{stem}.strategy.dot"), strategy_dot(&game, &net));
        }
    } else {
        out.code = exit::LOSE;
        out.line("verdict: losing");
        let diag = explain(&game, rg, &solved.solution, rg.initial)?;
        let path: Vec<&str> = diag.path.iter().map(|(_, tag)| tag.as_str()).collect();
        out.line(format!("path to a losing stop: {}", path.join(" / ")));
        let mut flag_counts: BTreeMap<&str, usize> = BTreeMap::new();
        let mut bad = BTreeSet::new();
        let mut ndet = BTreeSet::new();
        for (_, w) in &diag.stops {
            for f in &w.flags {
                *flag_counts.entry(f).or_default() += 1;
            }
            bad.extend(w.bad_markings.iter().cloned());
            ndet.extend(w.nondeterministic.iter().map(|(p, _)| p.clone()));
        }
        let counts: Vec<String> = flag_counts.iter().map(|(f, n)| format!("{f} x{n}")).collect();
        out.line(format!("losing stops: {} ({})", diag.stops.len(), counts.join(", ")));
        for m in &bad {
            out.line(format!("bad marking: {m}"));
        }
        for p in &ndet {
            out.line(format!("nondeterministic player in {p}"));
        }
        if cfg.emits(Emit::Json) {
            out.artifact(format!("{stem}.diagnosis.json"), to_json(&diag)?);
        }
    }
    Ok(out)
}

/// Runs every validator of a strategy against its game.
pub fn validate(game_text: &str, strategy_json: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let game = load_game(game_text)?;
    let file: StrategyFile = serde_json::from_str(strategy_json)?;
    let mut out = Outcome::default();
    let net = match StrategyNet::from_file(&game, &file) {
        Ok(net) => net,
        Err(e) => {
            out.code = exit::LOSE;
            out.line(format!("invalid: labelling does not map into the game: {e}"));
            return Ok(out);
        }
    };
    let violations = out.timed("validate", || all_violations(&game, &net, cfg.max_markings));
    if violations.is_empty() {
        out.line("valid: all checks passed");
        out.code = exit::WIN;
    } else {
        for v in &violations {
            out.line(format!("invalid: {v}"));
        }
        out.code = exit::LOSE;
    }
    Ok(out)
}

/// Builds the arena (without solving) and renders it.
pub fn reduce_dump(text: &str, stem: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let game = load_game(text)?;
    let mut out = Outcome::default();
    let rg = out.timed("reduce", || build_arena(&game, cfg.reduce_options()))?;
    let dump = arena_dump(&game, &rg, cfg.depth, cfg.verbose_states);
    let top_degree = (0..rg.nodes.len())
        .map(|v| rg.edges[v].iter().filter(|e| e.kind == EdgeKind::Top).count())
        .max()
        .unwrap_or(0);
    out.line(format!("arena: {} states, {} edges", rg.nodes.len(), rg.arena.num_edges()));
    out.line(format!("dumped: {} states, {} edges", dump.states.len(), dump.edges.len()));
    out.line(format!("mcut states: {}", rg.mcut.iter().filter(|&&m| m).count()));
    out.line(format!("largest TOP out-degree: {top_degree}"));
    if cfg.emits(Emit::Json) {
        out.artifact(format!("{stem}.arena.json"), to_json(&dump)?);
    }
    if cfg.emits(Emit::Dot) {
        out.artifact(format!("{stem}.arena.dot"), arena_dot(&dump));
    }
    Ok(out)
}

/// Fires the named transitions and prints the classified marking trace.
pub fn simulate(text: &str, names: &[String]) -> Result<Outcome, CliError> {
    let game = load_game(text)?;
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let play = simulate_play(&game, &refs)?;
    let mut out = Outcome::default();
    for (i, m) in play.markings.iter().enumerate() {
        let class = match classify_marking(&game, m)? {
            MarkingClass::Good => "Good",
            MarkingClass::Bad => "Bad",
            MarkingClass::Neutral => "Neutral",
        };
        let step = if i == 0 { "start".to_string() } else { names[i - 1].clone() };
        out.line(format!("{i:>3} {step:<12} {class:<8} {}", game.net.show_marking(m)));
    }
    out.line(format!("final: {}", game.net.show_marking(play.markings.last().expect("initial marking"))));
    if play.maximal {
        out.line("the play is maximal");
    }
    Ok(out)
}

fn census_lines(out: &mut Outcome, game: &PetriGame) -> Result<String, CliError> {
    let c = census(game);
    out.line(format!(
        "places: {} ({} system, {} env); transitions: {}; arcs: {}",
        c.places, c.system_places, c.env_places, c.transitions, c.arcs
    ));
    out.line(format!("condition: {} ({} good, {} bad patterns)", c.condition, c.good_patterns, c.bad_patterns));
    for (g, n) in &c.place_groups {
        out.line(format!("  places {g}: {n}"));
    }
    for (g, n) in &c.transition_groups {
        out.line(format!("  transitions {g}: {n}"));
    }
    to_json(&c)
}

pub fn census_cmd(text: &str, stem: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let game = load_game(text)?;
    let mut out = Outcome::default();
    let json = census_lines(&mut out, &game)?;
    if cfg.emits(Emit::Json) {
        out.artifact(format!("{stem}.census.json"), json);
    }
    Ok(out)
}

/// Generates the game of a PCP instance; the game file is the first
/// artifact.
pub fn gen_pcp(pcp_text: &str, stem: &str) -> Result<Outcome, CliError> {
    let inst = PcpInstance::parse(pcp_text)?;
    let mut out = Outcome::default();
    let game = out.timed("generate", || gen_pcp_game(&inst));
    out.artifact(format!("{stem}.game"), print_game(&game));
    census_lines(&mut out, &game)?;
    Ok(out)
}

/// Translates a good-and-bad game into a good-only game (first artifact) and
/// samples projected plays.
pub fn to_good_only(text: &str, stem: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let game = load_game(text)?;
    let mut out = Outcome::default();
    let translated = out.timed("translate", || good_bad_to_good(&game, cfg.bound, cfg.max_markings))?;
    out.artifact(format!("{stem}.good.game"), print_game(&translated));
    census_lines(&mut out, &translated)?;
    if cfg.plays > 0 {
        let r = out.timed("sample", || sample_projections(&game, &translated, cfg.plays, 10_000, cfg.seed, Scheduler::Lazy))?;
        out.line(format!(
            "projection: {} plays, {} into the sink, {} truncated, {} reach a bad marking of the original",
            r.plays,
            r.into_sink,
            r.truncated,
            r.violations.len()
        ));
        if !r.violations.is_empty() {
            out.code = exit::LOSE;
        }
    }
    Ok(out)
}
