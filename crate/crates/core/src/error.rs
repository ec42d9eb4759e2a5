use thiserror::Error;

use crate::efg::{StructureError, ValidationReport};

/// Failure to freeze a raw description into a [`GameTree`](crate::efg::GameTree).
#[derive(Clone, Debug, Error, PartialEq)]
pub enum GameError {
    #[error("malformed game tree: {0}")]
    Structure(#[from] StructureError),
    #[error("game violates its invariants:\n{0}")]
    Invalid(ValidationReport),
}

/// Bad arguments to a structural query.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("unknown player {0}")]
    UnknownPlayer(usize),
    #[error("player {player} has no infoset {infoset}")]
    UnknownInfoset { player: usize, infoset: usize },
    #[error("infoset {infoset} of player {player} has no action {action}")]
    UnknownAction { player: usize, infoset: usize, action: usize },
    #[error("player {player} has no sequence {sequence}")]
    UnknownSequence { player: usize, sequence: usize },
    #[error("terminal {0} does not exist")]
    UnknownTerminal(usize),
    #[error("infoset {infoset} does not follow the trigger infoset {trigger}")]
    NotInSubtree { trigger: usize, infoset: usize },
    #[error("infoset {infoset} is still reachable under the partial plan")]
    StillReachable { infoset: usize },
}
