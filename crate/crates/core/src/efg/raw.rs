//! Mutable game description used by generators and the text parser.
//!
//! A [`RawGame`] is checked in two stages: [`validate_structure`] rejects
//! anything that is not a rooted tree, and [`validate`] reports violations of
//! the game-level invariants (consistent infoset actions, well-formed chance
//! distributions, perfect recall). Only a raw game with an empty report can be
//! frozen into a [`GameTree`](super::GameTree).

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::tree::GameTree;
use crate::error::GameError;

/// Tolerance for chance distributions summing to one.
pub const CHANCE_SUM_TOLERANCE: f64 = 1e-12;

/// Upper bound on the number of actions at one infoset (plans store `u16`).
pub const MAX_ACTIONS: usize = u16::MAX as usize;

#[derive(Clone, Debug, PartialEq)]
pub enum RawKind {
    Chance { outcomes: Vec<(String, f64)> },
    Decision { player: usize, infoset: String, actions: Vec<String> },
    Terminal { payoffs: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawNode {
    pub kind: RawKind,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawGame {
    pub num_players: usize,
    pub nodes: Vec<RawNode>,
    pub root: usize,
}

/// Errors that make a raw game uninterpretable as a tree.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum StructureError {
    #[error("game has no nodes")]
    Empty,
    #[error("node {node} references missing child {child}")]
    MissingChild { node: usize, child: usize },
    #[error("node {node} has {found} children but declares {expected} branches")]
    Arity { node: usize, expected: usize, found: usize },
    #[error("node {node} has more than one parent")]
    MultipleParents { node: usize },
    #[error("root node {node} has a parent")]
    RootHasParent { node: usize },
    #[error("node {node} lies on a cycle")]
    Cycle { node: usize },
    #[error("node {node} is not reachable from the root")]
    Orphan { node: usize },
}

/// One violated game invariant.
#[derive(Clone, Debug, PartialEq)]
pub enum ValidationIssue {
    UnknownPlayer { node: usize, player: usize },
    NoActions { node: usize },
    TooManyActions { node: usize, count: usize },
    DuplicateLabel { node: usize, label: String },
    InconsistentActions { player: usize, infoset: String, node: usize },
    NonPositiveChance { node: usize, label: String, prob: f64 },
    ChanceSum { node: usize, sum: f64 },
    PayoffArity { node: usize, expected: usize, found: usize },
    NonFinitePayoff { node: usize },
    ImperfectRecall { player: usize, infoset: String, node: usize },
}

impl ValidationIssue {
    /// Infoset named by the issue, if any.
    pub fn infoset(&self) -> Option<(usize, &str)> {
        match self {
            ValidationIssue::InconsistentActions { player, infoset, .. }
            | ValidationIssue::ImperfectRecall { player, infoset, .. } => {
                Some((*player, infoset.as_str()))
            }
            _ => None,
        }
    }
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ValidationIssue::*;
        match self {
            UnknownPlayer { node, player } => write!(f, "node {node}: unknown player {player}"),
            NoActions { node } => write!(f, "node {node}: decision node without actions"),
            TooManyActions { node, count } => {
                write!(f, "node {node}: {count} actions exceed the limit of {MAX_ACTIONS}")
            }
            DuplicateLabel { node, label } => write!(f, "node {node}: duplicate label {label:?}"),
            InconsistentActions { player, infoset, node } => write!(
                f,
                "infoset {infoset:?} of player {player}: node {node} has a different action set"
            ),
            NonPositiveChance { node, label, prob } => {
                write!(f, "node {node}: chance outcome {label:?} has probability {prob}")
            }
            ChanceSum { node, sum } => write!(f, "node {node}: chance probabilities sum to {sum}"),
            PayoffArity { node, expected, found } => {
                write!(f, "node {node}: {found} payoffs for {expected} players")
            }
            NonFinitePayoff { node } => write!(f, "node {node}: non-finite payoff"),
            ImperfectRecall { player, infoset, node } => write!(
                f,
                "infoset {infoset:?} of player {player}: node {node} is reached by a different own-action sequence"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    /// True if some issue names the given infoset.
    pub fn flags_infoset(&self, player: usize, name: &str) -> bool {
        self.issues.iter().any(|i| i.infoset() == Some((player, name)))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "no violations");
        }
        for (k, issue) in self.issues.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl RawGame {
    fn expected_arity(node: &RawNode) -> usize {
        match &node.kind {
            RawKind::Chance { outcomes } => outcomes.len(),
            RawKind::Decision { actions, .. } => actions.len(),
            RawKind::Terminal { .. } => 0,
        }
    }
}

/// Checks that `raw` is a finite tree rooted at `raw.root`; returns parent links.
pub fn validate_structure(raw: &RawGame) -> Result<Vec<Option<usize>>, StructureError> {
    let n = raw.nodes.len();
    if n == 0 {
        return Err(StructureError::Empty);
    }
    if raw.root >= n {
        return Err(StructureError::MissingChild { node: raw.root, child: raw.root });
    }
    let mut parent: Vec<Option<usize>> = vec![None; n];
    for (id, node) in raw.nodes.iter().enumerate() {
        let expected = RawGame::expected_arity(node);
        if node.children.len() != expected {
            return Err(StructureError::Arity { node: id, expected, found: node.children.len() });
        }
        for &child in &node.children {
            if child >= n {
                return Err(StructureError::MissingChild { node: id, child });
            }
            if child == raw.root {
                return Err(StructureError::RootHasParent { node: child });
            }
            if parent[child].is_some() {
                return Err(StructureError::MultipleParents { node: child });
            }
            parent[child] = Some(id);
        }
    }
    // Every non-root node has exactly one parent, so any node that cannot be
    // reached from the root is either on a cycle or hangs below one / below
    // a second root.
    let mut seen = vec![false; n];
    let mut stack = vec![raw.root];
    while let Some(id) = stack.pop() {
        seen[id] = true;
        stack.extend(raw.nodes[id].children.iter().copied());
    }
    if let Some(first) = seen.iter().position(|&s| !s) {
        let mut cur = first;
        for _ in 0..=n {
            match parent[cur] {
                Some(p) if p == first => return Err(StructureError::Cycle { node: first }),
                Some(p) => cur = p,
                None => break,
            }
        }
        return Err(StructureError::Orphan { node: first });
    }
    Ok(parent)
}

/// Lists every violated game invariant of a structurally sound raw game.
pub fn validate(raw: &RawGame) -> Result<ValidationReport, StructureError> {
    validate_structure(raw)?;
    let mut report = ValidationReport::default();
    let mut first_actions: HashMap<(usize, &str), &Vec<String>> = HashMap::new();
    // Own-action sequence (infoset name, action) per infoset, per player.
    type OwnSeq<'a> = Option<(&'a str, usize)>;
    let mut recall: HashMap<(usize, &str), OwnSeq> = HashMap::new();
    let mut flagged_recall: Vec<(usize, &str)> = Vec::new();

    let mut stack: Vec<(usize, Vec<OwnSeq>)> = vec![(raw.root, vec![None; raw.num_players])];
    while let Some((id, seqs)) = stack.pop() {
        let node = &raw.nodes[id];
        match &node.kind {
            RawKind::Chance { outcomes } => {
                check_labels(id, outcomes.iter().map(|(l, _)| l), &mut report);
                let mut sum = 0.0;
                for (label, prob) in outcomes {
                    if !(*prob > 0.0) || !prob.is_finite() {
                        report.issues.push(ValidationIssue::NonPositiveChance {
                            node: id,
                            label: label.clone(),
                            prob: *prob,
                        });
                    }
                    sum += prob;
                }
                if (sum - 1.0).abs() > CHANCE_SUM_TOLERANCE {
                    report.issues.push(ValidationIssue::ChanceSum { node: id, sum });
                }
                for &c in &node.children {
                    stack.push((c, seqs.clone()));
                }
            }
            RawKind::Decision { player, infoset, actions } => {
                if *player >= raw.num_players {
                    report.issues.push(ValidationIssue::UnknownPlayer { node: id, player: *player });
                    for &c in &node.children {
                        stack.push((c, seqs.clone()));
                    }
                    continue;
                }
                if actions.is_empty() {
                    report.issues.push(ValidationIssue::NoActions { node: id });
                }
                if actions.len() > MAX_ACTIONS {
                    report
                        .issues
                        .push(ValidationIssue::TooManyActions { node: id, count: actions.len() });
                }
                check_labels(id, actions.iter(), &mut report);
                let key = (*player, infoset.as_str());
                match first_actions.get(&key) {
                    Some(prev) if *prev != actions => {
                        report.issues.push(ValidationIssue::InconsistentActions {
                            player: *player,
                            infoset: infoset.clone(),
                            node: id,
                        });
                    }
                    Some(_) => {}
                    None => {
                        first_actions.insert(key, actions);
                    }
                }
                let own = seqs[*player];
                match recall.get(&key) {
                    Some(prev) if *prev != own => {
                        if !flagged_recall.contains(&key) {
                            flagged_recall.push(key);
                            report.issues.push(ValidationIssue::ImperfectRecall {
                                player: *player,
                                infoset: infoset.clone(),
                                node: id,
                            });
                        }
                    }
                    Some(_) => {}
                    None => {
                        recall.insert(key, own);
                    }
                }
                for (a, &c) in node.children.iter().enumerate() {
                    let mut next = seqs.clone();
                    next[*player] = Some((infoset.as_str(), a));
                    stack.push((c, next));
                }
            }
            RawKind::Terminal { payoffs } => {
                if payoffs.len() != raw.num_players {
                    report.issues.push(ValidationIssue::PayoffArity {
                        node: id,
                        expected: raw.num_players,
                        found: payoffs.len(),
                    });
                }
                if payoffs.iter().any(|v| !v.is_finite()) {
                    report.issues.push(ValidationIssue::NonFinitePayoff { node: id });
                }
            }
        }
    }
    Ok(report)
}

fn check_labels<'a>(
    node: usize,
    labels: impl Iterator<Item = &'a String>,
    report: &mut ValidationReport,
) {
    let mut seen: Vec<&String> = Vec::new();
    for l in labels {
        if seen.contains(&l) {
            report.issues.push(ValidationIssue::DuplicateLabel { node, label: l.clone() });
        } else {
            seen.push(l);
        }
    }
}

/// Incremental construction of a [`RawGame`].
///
/// Nodes are created first and attached to their parent afterwards; the order
/// of `attach` calls is the branch order.
#[derive(Clone, Debug)]
pub struct GameBuilder {
    raw: RawGame,
}

impl GameBuilder {
    pub fn new(num_players: usize) -> Self {
        GameBuilder { raw: RawGame { num_players, nodes: Vec::new(), root: 0 } }
    }

    fn push(&mut self, kind: RawKind) -> usize {
        self.raw.nodes.push(RawNode { kind, children: Vec::new() });
        self.raw.nodes.len() - 1
    }

    pub fn chance<L: Into<String>>(&mut self, outcomes: impl IntoIterator<Item = (L, f64)>) -> usize {
        let outcomes = outcomes.into_iter().map(|(l, p)| (l.into(), p)).collect();
        self.push(RawKind::Chance { outcomes })
    }

    pub fn decision<L: Into<String>>(
        &mut self,
        player: usize,
        infoset: impl Into<String>,
        actions: impl IntoIterator<Item = L>,
    ) -> usize {
        let actions = actions.into_iter().map(Into::into).collect();
        self.push(RawKind::Decision { player, infoset: infoset.into(), actions })
    }

    pub fn terminal(&mut self, payoffs: Vec<f64>) -> usize {
        self.push(RawKind::Terminal { payoffs })
    }

    pub fn attach(&mut self, parent: usize, child: usize) {
        self.raw.nodes[parent].children.push(child);
    }

    pub fn into_raw(mut self, root: usize) -> RawGame {
        self.raw.root = root;
        self.raw
    }

    pub fn build(self, root: usize) -> Result<GameTree, GameError> {
        GameTree::from_raw(&self.into_raw(root))
    }
}
