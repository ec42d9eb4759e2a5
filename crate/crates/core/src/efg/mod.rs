//! Extensive-form games with perfect recall.

mod plan;
mod raw;
pub mod text;
mod tree;

pub use plan::{PartialPlan, Plan, PlanProfile, PlanView, Sequence};
pub use raw::{
    validate, validate_structure, GameBuilder, RawGame, RawKind, RawNode, StructureError,
    ValidationIssue, ValidationReport, CHANCE_SUM_TOLERANCE, MAX_ACTIONS,
};
pub use tree::{
    ChanceOutcome, GameTree, Infoset, InfosetId, Node, NodeId, NodeKind, PlayerTree, SeqId,
    StructureQuery, TerminalId, EMPTY_SEQUENCE,
};

