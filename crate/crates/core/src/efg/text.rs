//! Line-based textual game format.
//!
//! ```text
//! players 1
//! node 0 player 0 infoset I actions {a,b}
//! node 1 terminal payoffs {1}
//! node 2 terminal payoffs {5}
//! edge 0 a 1
//! edge 0 b 2
//! ```
//!
//! Node lines come first, in preorder; the first node is the root. Players
//! are numbered from 0. Floats are written in their shortest round-trip form,
//! so `parse(export(g))` rebuilds `g` exactly.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::raw::{RawGame, RawKind, RawNode};
use super::tree::{GameTree, NodeKind};
use crate::error::GameError;

const RESERVED: &[char] = &[',', ':', '{', '}'];

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ParseErrorKind {
    #[error("expected `players <n>` header")]
    Header,
    #[error("{0}")]
    Syntax(String),
    #[error("duplicate node id {0}")]
    DuplicateId(u64),
    #[error("dangling edge `{parent} {label} {child}`: node {missing} is not declared")]
    DanglingEdge { parent: u64, label: String, child: u64, missing: u64 },
    #[error("edge `{parent} {label} {child}`: node {parent} has no branch labelled {label:?}")]
    UnknownBranch { parent: u64, label: String, child: u64 },
    #[error("edge `{parent} {label} {child}`: branch already connected")]
    DuplicateEdge { parent: u64, label: String, child: u64 },
    #[error("node {node}: branch {label:?} has no edge")]
    MissingEdge { node: u64, label: String },
    #[error("no nodes declared")]
    NoNodes,
}

#[derive(Clone, Debug, Error, PartialEq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based line number; 0 for errors about the file as a whole.
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ImportError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("label {0:?} cannot be written in the text format")]
pub struct ExportError(pub String);

fn check_label(label: &str) -> Result<(), ExportError> {
    if label.is_empty() || label.chars().any(|c| c.is_whitespace() || RESERVED.contains(&c)) {
        Err(ExportError(label.to_string()))
    } else {
        Ok(())
    }
}

/// Serializes a game; node ids are the canonical preorder ids.
pub fn export(tree: &GameTree) -> Result<String, ExportError> {
    let mut out = String::new();
    let _ = writeln!(out, "players {}", tree.num_players());
    for id in 0..tree.num_nodes() {
        match tree.node(id).kind {
            NodeKind::Chance { .. } => {
                let mut parts = Vec::new();
                for o in tree.chance_outcomes(id) {
                    check_label(&o.label)?;
                    parts.push(format!("{}:{}", o.label, o.prob));
                }
                let _ = writeln!(out, "node {id} chance {{{}}}", parts.join(","));
            }
            NodeKind::Decision { player, infoset } => {
                let info = tree.player(player).infoset(infoset);
                check_label(&info.name)?;
                for a in &info.actions {
                    check_label(a)?;
                }
                let _ = writeln!(
                    out,
                    "node {id} player {player} infoset {} actions {{{}}}",
                    info.name,
                    info.actions.join(",")
                );
            }
            NodeKind::Terminal { index } => {
                let values: Vec<String> = tree.payoffs(index).iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "node {id} terminal payoffs {{{}}}", values.join(","));
            }
        }
    }
    for id in 0..tree.num_nodes() {
        let labels: Vec<&str> = match tree.node(id).kind {
            NodeKind::Chance { .. } => tree.chance_outcomes(id).iter().map(|o| o.label.as_str()).collect(),
            NodeKind::Decision { player, infoset } => {
                tree.player(player).infoset(infoset).actions.iter().map(String::as_str).collect()
            }
            NodeKind::Terminal { .. } => Vec::new(),
        };
        for (label, &child) in labels.iter().zip(tree.children(id)) {
            let _ = writeln!(out, "edge {id} {label} {child}");
        }
    }
    Ok(out)
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, kind: ParseErrorKind::Syntax(msg.into()) }
}

fn braced(line: usize, s: &str) -> Result<Vec<&str>, ParseError> {
    let inner = s
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| syntax(line, format!("expected `{{...}}`, found {s:?}")))?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    Ok(inner.split(',').map(str::trim).collect())
}

fn parse_num<T: std::str::FromStr>(line: usize, s: &str, what: &str) -> Result<T, ParseError> {
    s.parse().map_err(|_| syntax(line, format!("invalid {what} {s:?}")))
}

/// Parses the text format into a raw game (not yet validated).
pub fn parse(text: &str) -> Result<RawGame, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(ParseError { line: 0, kind: ParseErrorKind::Header })?;
    let num_players = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["players", n] => parse_num::<usize>(hline, n, "player count")?,
        _ => return Err(ParseError { line: hline, kind: ParseErrorKind::Header }),
    };

    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut ids: Vec<(u64, usize)> = Vec::new();
    let mut nodes: Vec<RawNode> = Vec::new();
    let mut slots: Vec<Vec<Option<usize>>> = Vec::new();
    let mut pending: Vec<(usize, u64, String, u64)> = Vec::new();

    for (ln, line) in lines {
        let mut words = line.splitn(2, char::is_whitespace);
        match words.next() {
            Some("node") => {
                let rest = words.next().unwrap_or("").trim();
                let (id, rest) = rest.split_once(char::is_whitespace).ok_or_else(|| syntax(ln, "truncated node line"))?;
                let id: u64 = parse_num(ln, id, "node id")?;
                let rest = rest.trim();
                let kind = if let Some(body) = rest.strip_prefix("chance") {
                    let mut outcomes = Vec::new();
                    for item in braced(ln, body.trim())? {
                        let (label, p) = item
                            .split_once(':')
                            .ok_or_else(|| syntax(ln, format!("expected `label:prob`, found {item:?}")))?;
                        outcomes.push((label.trim().to_string(), parse_num::<f64>(ln, p.trim(), "probability")?));
                    }
                    RawKind::Chance { outcomes }
                } else if let Some(body) = rest.strip_prefix("player") {
                    let parts: Vec<&str> = body.trim().splitn(5, char::is_whitespace).collect();
                    match parts.as_slice() {
                        [p, "infoset", name, "actions", acts] => RawKind::Decision {
                            player: parse_num(ln, p, "player")?,
                            infoset: name.to_string(),
                            actions: braced(ln, acts.trim())?.into_iter().map(String::from).collect(),
                        },
                        _ => return Err(syntax(ln, "expected `player <p> infoset <name> actions {...}`")),
                    }
                } else if let Some(body) = rest.strip_prefix("terminal") {
                    let body = body
                        .trim()
                        .strip_prefix("payoffs")
                        .ok_or_else(|| syntax(ln, "expected `terminal payoffs {...}`"))?;
                    let payoffs = braced(ln, body.trim())?
                        .into_iter()
                        .map(|v| parse_num::<f64>(ln, v, "payoff"))
                        .collect::<Result<_, _>>()?;
                    RawKind::Terminal { payoffs }
                } else {
                    return Err(syntax(ln, format!("unknown node kind in {rest:?}")));
                };
                if index.insert(id, nodes.len()).is_some() {
                    return Err(ParseError { line: ln, kind: ParseErrorKind::DuplicateId(id) });
                }
                let arity = match &kind {
                    RawKind::Chance { outcomes } => outcomes.len(),
                    RawKind::Decision { actions, .. } => actions.len(),
                    RawKind::Terminal { .. } => 0,
                };
                ids.push((id, ln));
                slots.push(vec![None; arity]);
                nodes.push(RawNode { kind, children: Vec::new() });
            }
            Some("edge") => {
                let parts: Vec<&str> = words.next().unwrap_or("").split_whitespace().collect();
                match parts.as_slice() {
                    [p, label, c] => pending.push((
                        ln,
                        parse_num(ln, p, "node id")?,
                        label.to_string(),
                        parse_num(ln, c, "node id")?,
                    )),
                    _ => return Err(syntax(ln, "expected `edge <parent> <label> <child>`")),
                }
            }
            _ => return Err(syntax(ln, format!("unrecognized line {line:?}"))),
        }
    }
    if nodes.is_empty() {
        return Err(ParseError { line: 0, kind: ParseErrorKind::NoNodes });
    }

    for (ln, parent, label, child) in pending {
        let (Some(&p), Some(&c)) = (index.get(&parent), index.get(&child)) else {
            let missing = if index.contains_key(&parent) { child } else { parent };
            return Err(ParseError {
                line: ln,
                kind: ParseErrorKind::DanglingEdge { parent, label, child, missing },
            });
        };
        let labels: Vec<&str> = match &nodes[p].kind {
            RawKind::Chance { outcomes } => outcomes.iter().map(|(l, _)| l.as_str()).collect(),
            RawKind::Decision { actions, .. } => actions.iter().map(String::as_str).collect(),
            RawKind::Terminal { .. } => Vec::new(),
        };
        let Some(slot) = labels.iter().position(|l| *l == label) else {
            return Err(ParseError { line: ln, kind: ParseErrorKind::UnknownBranch { parent, label, child } });
        };
        if slots[p][slot].is_some() {
            return Err(ParseError { line: ln, kind: ParseErrorKind::DuplicateEdge { parent, label, child } });
        }
        slots[p][slot] = Some(c);
    }

    for (k, node) in nodes.iter_mut().enumerate() {
        let mut children = Vec::with_capacity(slots[k].len());
        for (b, slot) in slots[k].iter().enumerate() {
            match slot {
                Some(c) => children.push(*c),
                None => {
                    let label = match &node.kind {
                        RawKind::Chance { outcomes } => outcomes[b].0.clone(),
                        RawKind::Decision { actions, .. } => actions[b].clone(),
                        RawKind::Terminal { .. } => unreachable!(),
                    };
                    return Err(ParseError {
                        line: ids[k].1,
                        kind: ParseErrorKind::MissingEdge { node: ids[k].0, label },
                    });
                }
            }
        }
        node.children = children;
    }

    Ok(RawGame { num_players, nodes, root: 0 })
}

/// Parses and validates a game.
pub fn import(text: &str) -> Result<GameTree, ImportError> {
    let raw = parse(text)?;
    Ok(GameTree::from_raw(&raw)?)
}
