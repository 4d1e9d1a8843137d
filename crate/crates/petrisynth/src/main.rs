use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use petrisynth::{commands, exit, CliError, Emit, Outcome, RunConfig};

#[derive(Parser)]
#[command(name = "petrisynth", version, about = "Synthesis for Petri games with one environment player")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Token bound for the decidable-class check.
    #[arg(long, global = true, default_value_t = RunConfig::default().bound)]
    bound: u32,
    /// Maximal number of arena states.
    #[arg(long, global = true, default_value_t = RunConfig::default().max_states)]
    max_states: usize,
    /// Maximal length of a backward-move sequence.
    #[arg(long, global = true, default_value_t = RunConfig::default().max_bm)]
    max_bm: usize,
    /// Maximal number of markings explored by reachability checks.
    #[arg(long, global = true, default_value_t = RunConfig::default().max_markings)]
    max_markings: usize,
    /// Artifact formats, comma separated.
    #[arg(long, global = true, default_value = "dot,json")]
    emit: String,
    /// Directory for artifacts (games are printed to stdout without it).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include backward-move sequences in arena labels.
    #[arg(long, global = true)]
    verbose_states: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the game and extract a strategy when it is won.
    Solve { game: PathBuf },
    /// Check a strategy file against a game.
    Validate { game: PathBuf, strategy: PathBuf },
    /// Render the Büchi arena of a game.
    ReduceDump {
        game: PathBuf,
        /// Only states within this many steps of the initial state.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Generate the game of a PCP instance (.pcp).
    GenPcp { instance: PathBuf },
    /// Translate a good-and-bad game into a good-only game.
    ToGoodOnly {
        game: PathBuf,
        /// Random plays used to check the translation (0 to skip).
        #[arg(long, default_value_t = 1000)]
        plays: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fire transitions by name and print the classified markings.
    Simulate { game: PathBuf, transitions: Vec<String> },
    /// Structural counts of a game.
    Census { game: PathBuf },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), msg: e.to_string() })
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "out".to_string(), |s| s.to_string_lossy().into_owned())
}

fn run(cli: &Cli, cfg: &mut RunConfig) -> Result<(Outcome, bool), CliError> {
    // `true`: the first artifact is a game that goes to stdout without --out
    Ok(match &cli.command {
        Command::Solve { game } => (commands::solve(&read(game)?, &stem(game), cfg)?, false),
        Command::Validate { game, strategy } => (commands::validate(&read(game)?, &read(strategy)?, cfg)?, false),
        Command::ReduceDump { game, depth } => {
            cfg.depth = *depth;
            (commands::reduce_dump(&read(game)?, &stem(game), cfg)?, false)
        }
        Command::GenPcp { instance } => (commands::gen_pcp(&read(instance)?, &stem(instance))?, true),
        Command::ToGoodOnly { game, plays, seed } => {
            cfg.plays = *plays;
            cfg.seed = *seed;
            (commands::to_good_only(&read(game)?, &stem(game), cfg)?, true)
        }
        Command::Simulate { game, transitions } => (commands::simulate(&read(game)?, transitions)?, false),
        Command::Census { game } => (commands::census_cmd(&read(game)?, &stem(game), cfg)?, false),
    })
}

fn main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    let o = &cli.opts;
    let mut cfg = RunConfig {
        bound: o.bound,
        max_states: o.max_states,
        max_bm: o.max_bm,
        max_markings: o.max_markings,
        emit: Emit::parse_list(&o.emit)?,
        verbose_states: o.verbose_states,
        ..RunConfig::default()
    };
    let (outcome, game_to_stdout) = match run(&cli, &mut cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(e.exit_code() as u8));
        }
    };
    match &o.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for a in &outcome.artifacts {
                let path = dir.join(&a.name);
                fs::write(&path, &a.content).with_context(|| format!("writing {}", path.display()))?;
                eprintln!("wrote {}", path.display());
            }
            print!("{}", outcome.report);
        }
        None if game_to_stdout => {
            print!("{}", outcome.artifacts[0].content);
            eprint!("{}", outcome.report);
        }
        None => {
            print!("{}", outcome.report);
            if !outcome.artifacts.is_empty() {
                eprintln!("{} artifact(s) not written; pass --out DIR", outcome.artifacts.len());
            }
        }
    }
    for (what, d) in &outcome.timings {
        eprintln!("time {what}: {:.3}s", d.as_secs_f64());
    }
    let code = if outcome.code == exit::WIN { 0 } else { outcome.code as u8 };
    Ok(ExitCode::from(code))
}
