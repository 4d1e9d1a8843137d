use std::collections::BTreeSet;

use petrisynth_reduce::ReduceOptions;

use crate::error::CliError;

/// Artifact formats a command may emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Emit {
    Dot,
    Json,
}

impl Emit {
    /// Parses a comma-separated list such as `dot,json`.
    pub fn parse_list(s: &str) -> Result<BTreeSet<Emit>, CliError> {
        s.split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| match x {
                "dot" => Ok(Emit::Dot),
                "json" => Ok(Emit::Json),
                _ => Err(CliError::Usage(format!("unknown emit target `{x}` (expected dot or json)"))),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub bound: u32,
    pub max_states: usize,
    pub max_bm: usize,
    pub max_markings: usize,
    pub max_rewind: usize,
    pub emit: BTreeSet<Emit>,
    pub verbose_states: bool,
    /// Breadth-first depth limit for arena dumps.
    pub depth: Option<usize>,
    pub seed: u64,
    pub plays: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let d = ReduceOptions::default();
        Self {
            bound: d.bound,
            max_states: d.max_states,
            max_bm: d.max_bm,
            max_markings: d.max_markings,
            max_rewind: d.max_rewind,
            emit: BTreeSet::from([Emit::Dot, Emit::Json]),
            verbose_states: false,
            depth: None,
            seed: 0,
            plays: 1000,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let caps = [
            ("bound", self.bound as usize),
            ("max-states", self.max_states),
            ("max-bm", self.max_bm),
            ("max-markings", self.max_markings),
            ("max-rewind", self.max_rewind),
        ];
        match caps.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => Err(CliError::Usage(format!("--{name} must be at least 1"))),
            None => Ok(()),
        }
    }

    pub fn reduce_options(&self) -> ReduceOptions {
        ReduceOptions {
            bound: self.bound,
            max_markings: self.max_markings,
            max_states: self.max_states,
            max_bm: self.max_bm,
            max_rewind: self.max_rewind,
        }
    }

    pub fn emits(&self, e: Emit) -> bool {
        self.emit.contains(&e)
    }
}
