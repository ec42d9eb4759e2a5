//! Benchmark game generators.
//!
//! Every generator is deterministic: chance nodes enumerate deals exhaustively
//! and node creation order is fixed, so regenerating a spec yields an
//! identical tree.

mod battleship;
mod figures;
mod goofspiel;
mod kuhn;
mod leduc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::efg::GameTree;

pub use battleship::battleship;
pub use figures::{figure1, figure1_with_payoffs, figure3, figure3_with_payoffs, matrix_game, FigureGames};
pub use goofspiel::goofspiel;
pub use kuhn::kuhn;
pub use leduc::leduc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameFamily {
    Kuhn,
    Goofspiel,
    Leduc,
    Battleship,
    Figure1,
    Figure3,
}

impl std::str::FromStr for GameFamily {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "kuhn" => GameFamily::Kuhn,
            "goofspiel" => GameFamily::Goofspiel,
            "leduc" => GameFamily::Leduc,
            "battleship" => GameFamily::Battleship,
            "figure1" => GameFamily::Figure1,
            "figure3" => GameFamily::Figure3,
            _ => return Err(SpecError::UnknownFamily(s.to_string())),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ship {
    pub length: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GameSpec {
    pub family: GameFamily,
    pub players: usize,
    pub ranks: usize,
    /// Battleship grid as (rows, cols).
    pub grid: (usize, usize),
    /// Battleship shots per player.
    pub rounds: usize,
    pub ships: Vec<Ship>,
    pub loss_multiplier: f64,
    /// Goofspiel: players observe only who won each prize, not the bids.
    pub limited_info: bool,
    /// Goofspiel: prizes come in ascending order with no chance.
    pub sorted_deck: bool,
    /// Figure games: terminal payoffs in preorder, player-major within a leaf.
    pub payoffs: Option<Vec<f64>>,
}

impl Default for GameSpec {
    fn default() -> Self {
        GameSpec {
            family: GameFamily::Kuhn,
            players: 2,
            ranks: 3,
            grid: (2, 2),
            rounds: 3,
            ships: vec![Ship { length: 2, value: 1.0 }],
            loss_multiplier: 2.0,
            limited_info: true,
            sorted_deck: false,
            payoffs: None,
        }
    }
}

impl GameSpec {
    pub fn new(family: GameFamily) -> Self {
        let players = match family {
            GameFamily::Figure3 => 1,
            _ => 2,
        };
        GameSpec { family, players, ..GameSpec::default() }
    }

    pub fn kuhn(players: usize, ranks: usize) -> Self {
        GameSpec { players, ranks, ..GameSpec::new(GameFamily::Kuhn) }
    }

    pub fn goofspiel(players: usize, ranks: usize) -> Self {
        GameSpec { players, ranks, ..GameSpec::new(GameFamily::Goofspiel) }
    }

    pub fn leduc(players: usize, ranks: usize) -> Self {
        GameSpec { players, ranks, ..GameSpec::new(GameFamily::Leduc) }
    }

    pub fn battleship() -> Self {
        GameSpec::new(GameFamily::Battleship)
    }

    /// Short instance name such as `K3.3`, `G2.4` or `BS`.
    pub fn label(&self) -> String {
        match self.family {
            GameFamily::Kuhn => format!("K{}.{}", self.players, self.ranks),
            GameFamily::Goofspiel => format!("G{}.{}", self.players, self.ranks),
            GameFamily::Leduc => format!("L{}.{}", self.players, self.ranks),
            GameFamily::Battleship => "BS".to_string(),
            GameFamily::Figure1 => "figure1".to_string(),
            GameFamily::Figure3 => "figure3".to_string(),
        }
    }

    /// Checks the family-specific parameter ranges.
    pub fn check(&self) -> Result<(), SpecError> {
        let fail = |msg: String| Err(SpecError::Invalid(msg));
        match self.family {
            GameFamily::Kuhn => {
                if self.players < 2 {
                    return fail(format!("kuhn requires players >= 2, got {}", self.players));
                }
                if self.ranks < self.players {
                    return fail(format!(
                        "kuhn requires ranks >= players, got ranks={} players={}",
                        self.ranks, self.players
                    ));
                }
            }
            GameFamily::Goofspiel => {
                if self.players < 2 {
                    return fail(format!("goofspiel requires players >= 2, got {}", self.players));
                }
                if self.ranks < 1 {
                    return fail("goofspiel requires ranks >= 1".to_string());
                }
            }
            GameFamily::Leduc => {
                if self.players < 2 {
                    return fail(format!("leduc requires players >= 2, got {}", self.players));
                }
                if self.ranks < 1 {
                    return fail("leduc requires ranks >= 1".to_string());
                }
                if 3 * self.ranks < self.players + 1 {
                    return fail(format!(
                        "leduc requires 3*ranks >= players+1 cards, got ranks={} players={}",
                        self.ranks, self.players
                    ));
                }
            }
            GameFamily::Battleship => {
                if self.players != 2 {
                    return fail(format!("battleship requires players = 2, got {}", self.players));
                }
                let (rows, cols) = self.grid;
                if rows == 0 || cols == 0 {
                    return fail("battleship requires a non-empty grid".to_string());
                }
                if self.rounds == 0 {
                    return fail("battleship requires rounds >= 1".to_string());
                }
                if self.ships.is_empty() {
                    return fail("battleship requires at least one ship".to_string());
                }
                for s in &self.ships {
                    if s.length == 0 || s.length > rows.max(cols) {
                        return fail(format!("ship of length {} does not fit a {rows}x{cols} grid", s.length));
                    }
                    if !s.value.is_finite() {
                        return fail("ship values must be finite".to_string());
                    }
                }
                if self.ships.iter().map(|s| s.length).sum::<usize>() > rows * cols {
                    return fail("ships do not fit on the grid".to_string());
                }
                if self.rounds > rows * cols {
                    return fail(format!("battleship requires rounds <= {} cells", rows * cols));
                }
                if !self.loss_multiplier.is_finite() {
                    return fail("loss multiplier must be finite".to_string());
                }
            }
            GameFamily::Figure1 | GameFamily::Figure3 => {
                let (players, leaves) = match self.family {
                    GameFamily::Figure1 => (2, 8),
                    _ => (1, 3),
                };
                if let Some(p) = &self.payoffs {
                    if p.len() != players * leaves {
                        return fail(format!(
                            "{} expects {} payoffs ({leaves} leaves x {players} players), got {}",
                            self.label(),
                            players * leaves,
                            p.len()
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SpecError {
    #[error("unknown game family {0:?}")]
    UnknownFamily(String),
    #[error("invalid game parameters: {0}")]
    Invalid(String),
}

/// Builds the game described by `spec`.
pub fn generate(spec: &GameSpec) -> Result<GameTree, SpecError> {
    spec.check()?;
    let tree = match spec.family {
        GameFamily::Kuhn => kuhn(spec.players, spec.ranks),
        GameFamily::Goofspiel => goofspiel(spec.players, spec.ranks, spec.limited_info, spec.sorted_deck),
        GameFamily::Leduc => leduc(spec.players, spec.ranks),
        GameFamily::Battleship => battleship(spec.grid, spec.rounds, &spec.ships, spec.loss_multiplier),
        GameFamily::Figure1 => match &spec.payoffs {
            Some(p) => figure1_with_payoffs(&chunks(p, 2)),
            None => figure1(),
        },
        GameFamily::Figure3 => match &spec.payoffs {
            Some(p) => figure3_with_payoffs([p[0], p[1], p[2]]),
            None => figure3(),
        },
    };
    Ok(tree)
}

fn chunks(values: &[f64], size: usize) -> Vec<Vec<f64>> {
    values.chunks(size).map(<[f64]>::to_vec).collect()
}

/// Unwraps a generator's build result; the generators only emit valid games.
pub(crate) fn built(result: Result<GameTree, crate::error::GameError>) -> GameTree {
    match result {
        Ok(tree) => tree,
        Err(e) => panic!("generator produced an invalid game: {e}"),
    }
}
