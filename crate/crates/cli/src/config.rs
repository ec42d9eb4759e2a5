//! Experiment configuration.
//!
//! A run is described by a TOML file whose keys mirror the command-line
//! flags. Every key is optional:
//!
//! ```toml
//! game = "kuhn"          # kuhn | leduc | goofspiel | battleship | figure1 | figure3
//! players = 3            # family default when omitted
//! ranks = 3
//! grid = [2, 2]          # battleship only
//! rounds = 3             # battleship shots per player
//! sorted_deck = false    # goofspiel
//! limited_info = true    # goofspiel
//! T = 10000
//! seeds = "1..50"        # count, "a..b" (inclusive), "1,4,9" or a list of either
//! checkpoints = [100, 1000, 10000]   # default: 100, 200, 400, ... and T
//! gaps = ["efce", "efcce", "nfcce"]
//! out = "results/k33"
//! workers = 0            # 0 = one per core
//! checks = true          # verify the regret identities at every checkpoint
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use icfr::games::{GameFamily, GameSpec};
use serde::{Deserialize, Serialize};

/// Environment variable naming the output directory when neither the flag
/// nor the config file does.
pub const OUT_DIR_ENV: &str = "ICFR_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "icfr-out";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: toml::de::Error },
    #[error("invalid seed list {0:?}: expected a count, \"a..b\", or comma-separated seeds")]
    Seeds(String),
    #[error("unknown gap kind {0:?} (expected efce, efcce or nfcce)")]
    Gap(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gap {
    Efce,
    Efcce,
    Nfcce,
}

impl Gap {
    pub const ALL: [Gap; 3] = [Gap::Efce, Gap::Efcce, Gap::Nfcce];

    pub fn name(self) -> &'static str {
        match self {
            Gap::Efce => "efce",
            Gap::Efcce => "efcce",
            Gap::Nfcce => "nfcce",
        }
    }
}

impl FromStr for Gap {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "efce" => Ok(Gap::Efce),
            "efcce" => Ok(Gap::Efcce),
            "nfcce" => Ok(Gap::Nfcce),
            _ => Err(ConfigError::Gap(s.to_string())),
        }
    }
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a comma-separated gap list such as `efce,nfcce`.
pub fn parse_gaps(s: &str) -> Result<Vec<Gap>, ConfigError> {
    let mut gaps = s.split(',').filter(|p| !p.trim().is_empty()).map(Gap::from_str).collect::<Result<Vec<_>, _>>()?;
    gaps.sort();
    gaps.dedup();
    Ok(gaps)
}

/// Seeds as written in a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    /// `n` means seeds 1 through n.
    Count(u64),
    Text(String),
    List(Vec<SeedItem>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedItem {
    Seed(u64),
    Text(String),
}

impl SeedSpec {
    pub fn expand(&self) -> Result<Vec<u64>, ConfigError> {
        let mut seeds = Vec::new();
        match self {
            SeedSpec::Count(n) => seeds.extend(1..=*n),
            SeedSpec::Text(s) => seeds.extend(parse_seeds(s)?),
            SeedSpec::List(items) => {
                for item in items {
                    match item {
                        SeedItem::Seed(s) => seeds.push(*s),
                        SeedItem::Text(s) => seeds.extend(parse_seed_text(s)?),
                    }
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        seeds.retain(|s| seen.insert(*s));
        Ok(seeds)
    }
}

/// Seed list from the command line: a bare count, an inclusive range
/// `a..b`, or a comma-separated mix of seeds and ranges.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, ConfigError> {
    let s = s.trim();
    if !s.contains(',') && !s.contains("..") {
        let n: u64 = s.parse().map_err(|_| ConfigError::Seeds(s.to_string()))?;
        return Ok((1..=n).collect());
    }
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        out.extend(parse_seed_text(part)?);
    }
    Ok(out)
}

fn parse_seed_text(s: &str) -> Result<Vec<u64>, ConfigError> {
    let bad = || ConfigError::Seeds(s.to_string());
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b = b.trim();
        let b: u64 = b.strip_prefix('=').unwrap_or(b).trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        Ok((a..=b).collect())
    } else {
        Ok(vec![s.parse().map_err(|_| bad())?])
    }
}

/// Raw config file contents; every field is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub game: Option<GameFamily>,
    pub players: Option<usize>,
    pub ranks: Option<usize>,
    pub grid: Option<(usize, usize)>,
    pub rounds: Option<usize>,
    pub sorted_deck: Option<bool>,
    pub limited_info: Option<bool>,
    #[serde(rename = "T", alias = "iterations")]
    pub iterations: Option<u64>,
    pub seeds: Option<SeedSpec>,
    pub checkpoints: Option<Vec<u64>>,
    pub gaps: Option<Vec<Gap>>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub checks: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|source| ConfigError::Parse { path: path.into(), source })
    }

    /// Fields set in `other` replace those set here.
    pub fn overlay(self, other: ConfigFile) -> ConfigFile {
        ConfigFile {
            game: other.game.or(self.game),
            players: other.players.or(self.players),
            ranks: other.ranks.or(self.ranks),
            grid: other.grid.or(self.grid),
            rounds: other.rounds.or(self.rounds),
            sorted_deck: other.sorted_deck.or(self.sorted_deck),
            limited_info: other.limited_info.or(self.limited_info),
            iterations: other.iterations.or(self.iterations),
            seeds: other.seeds.or(self.seeds),
            checkpoints: other.checkpoints.or(self.checkpoints),
            gaps: other.gaps.or(self.gaps),
            out: other.out.or(self.out),
            workers: other.workers.or(self.workers),
            checks: other.checks.or(self.checks),
        }
    }

    /// The game part of the config on top of the family defaults.
    pub fn game_spec(&self) -> GameSpec {
        let mut spec = GameSpec::new(self.game.unwrap_or(GameFamily::Figure3));
        if let Some(p) = self.players {
            spec.players = p;
        }
        if let Some(r) = self.ranks {
            spec.ranks = r;
        }
        if let Some(g) = self.grid {
            spec.grid = g;
        }
        if let Some(r) = self.rounds {
            spec.rounds = r;
        }
        if let Some(s) = self.sorted_deck {
            spec.sorted_deck = s;
        }
        if let Some(l) = self.limited_info {
            spec.limited_info = l;
        }
        spec
    }

    /// Fills defaults and validates. `env_out` is the output directory from
    /// the environment, used when the file sets none.
    pub fn resolve(&self, env_out: Option<PathBuf>) -> Result<ExperimentConfig, ConfigError> {
        let game = self.game_spec();
        game.check().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let iterations = self.iterations.unwrap_or(1000);
        if iterations == 0 {
            return Err(ConfigError::Invalid("T must be positive".into()));
        }
        let seeds = self.seeds.clone().unwrap_or(SeedSpec::Count(5)).expand()?;
        if seeds.is_empty() {
            return Err(ConfigError::Invalid("empty seed list".into()));
        }
        let checkpoints = match &self.checkpoints {
            Some(c) => {
                let mut c: Vec<u64> = c.iter().copied().filter(|&t| t >= 1 && t <= iterations).collect();
                c.push(iterations);
                c.sort_unstable();
                c.dedup();
                c
            }
            None => default_checkpoints(iterations),
        };
        let gaps = match &self.gaps {
            Some(g) if g.is_empty() => return Err(ConfigError::Invalid("no gap kinds selected".into())),
            Some(g) => {
                let mut g = g.clone();
                g.sort();
                g.dedup();
                g
            }
            None => Gap::ALL.to_vec(),
        };
        let out = self.out.clone().or(env_out).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
        Ok(ExperimentConfig {
            game,
            iterations,
            seeds,
            checkpoints,
            gaps,
            out,
            workers: self.workers.unwrap_or(0),
            checks: self.checks.unwrap_or(true),
        })
    }
}

/// 100, 200, 400, ... below `t`, then `t` itself.
pub fn default_checkpoints(t: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut c = 100;
    while c < t {
        out.push(c);
        c *= 2;
    }
    out.push(t);
    out
}

/// Fully resolved experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub game: GameSpec,
    pub iterations: u64,
    pub seeds: Vec<u64>,
    pub checkpoints: Vec<u64>,
    pub gaps: Vec<Gap>,
    pub out: PathBuf,
    pub workers: usize,
    pub checks: bool,
}
