use std::collections::HashMap;
use std::ops::Range;

use super::raw::{validate, RawGame, RawKind, RawNode};
use crate::error::{GameError, QueryError};

pub type NodeId = usize;
/// Index of an infoset among the infosets of its player.
pub type InfosetId = usize;
/// Index of a terminal among all terminals, in preorder.
pub type TerminalId = usize;
/// Index of a sequence of one player; `EMPTY_SEQUENCE` is the empty sequence.
pub type SeqId = usize;

pub const EMPTY_SEQUENCE: SeqId = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Chance { first_outcome: usize },
    Decision { player: usize, infoset: InfosetId },
    Terminal { index: TerminalId },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub parent: Option<NodeId>,
    first_child: usize,
    num_children: usize,
    subtree_end: NodeId,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChanceOutcome {
    pub label: String,
    pub prob: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Infoset {
    pub name: String,
    pub actions: Vec<String>,
    /// Decision nodes grouped in this infoset, in preorder.
    pub nodes: Vec<NodeId>,
    /// Last own (infoset, action) before reaching this infoset, i.e. σ(I).
    pub parent: Option<(InfosetId, usize)>,
    /// `children[a]` is C(I, a).
    pub children: Vec<Vec<InfosetId>>,
    pub depth: usize,
    /// Σ^c(I): sequences at strict predecessors that leave the path to I.
    pub blocking: Vec<SeqId>,
}

impl Infoset {
    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }
}

/// Per-player view: infosets, sequences and the infoset forest.
#[derive(Clone, Debug, PartialEq)]
pub struct PlayerTree {
    infosets: Vec<Infoset>,
    seq_base: Vec<SeqId>,
    seq_owner: Vec<Option<(InfosetId, usize)>>,
    roots: Vec<InfosetId>,
    forest: Vec<InfosetId>,
    forest_pos: Vec<usize>,
    forest_end: Vec<usize>,
    forest_seq_offset: Vec<usize>,
    immediate_offsets: Vec<usize>,
    immediate_terminals: Vec<TerminalId>,
}

impl PlayerTree {
    pub fn num_infosets(&self) -> usize {
        self.infosets.len()
    }

    pub fn infosets(&self) -> &[Infoset] {
        &self.infosets
    }

    pub fn infoset(&self, id: InfosetId) -> &Infoset {
        &self.infosets[id]
    }

    pub fn num_actions(&self, id: InfosetId) -> usize {
        self.infosets[id].actions.len()
    }

    /// |Σ_i|, including the empty sequence.
    pub fn num_sequences(&self) -> usize {
        self.seq_owner.len()
    }

    pub fn seq(&self, infoset: InfosetId, action: usize) -> SeqId {
        debug_assert!(action < self.num_actions(infoset));
        self.seq_base[infoset] + action
    }

    /// The (infoset, action) pair ending a sequence; `None` for the empty one.
    pub fn seq_owner(&self, seq: SeqId) -> Option<(InfosetId, usize)> {
        self.seq_owner[seq]
    }

    /// σ(I) as a sequence id.
    pub fn parent_seq(&self, infoset: InfosetId) -> SeqId {
        match self.infosets[infoset].parent {
            Some((j, a)) => self.seq(j, a),
            None => EMPTY_SEQUENCE,
        }
    }

    pub fn children(&self, infoset: InfosetId, action: usize) -> &[InfosetId] {
        &self.infosets[infoset].children[action]
    }

    pub fn roots(&self) -> &[InfosetId] {
        &self.roots
    }

    /// C*(I) in depth-first order of the infoset forest, starting with I.
    pub fn descendants(&self, infoset: InfosetId) -> &[InfosetId] {
        &self.forest[self.forest_pos[infoset]..self.forest_end[infoset]]
    }

    pub fn blocking_sequences(&self, infoset: InfosetId) -> &[SeqId] {
        &self.infosets[infoset].blocking
    }

    /// J ⪯ I.
    pub fn precedes(&self, j: InfosetId, i: InfosetId) -> bool {
        self.forest_pos[j] <= self.forest_pos[i] && self.forest_pos[i] < self.forest_end[j]
    }

    /// Terminals whose last own sequence is `seq` (for `(I,a)`: Z(I,a) minus
    /// everything below C(I,a)).
    pub fn immediate_terminals(&self, seq: SeqId) -> &[TerminalId] {
        &self.immediate_terminals[self.immediate_offsets[seq]..self.immediate_offsets[seq + 1]]
    }

    /// All infosets in depth-first forest order; C*(I) is a contiguous block.
    pub fn forest(&self) -> &[InfosetId] {
        &self.forest
    }

    pub fn forest_pos(&self, infoset: InfosetId) -> usize {
        self.forest_pos[infoset]
    }

    /// Range of C*(I) sequences in the forest layout (sequences of all
    /// infosets, ordered by forest position then action).
    pub fn forest_block(&self, infoset: InfosetId) -> Range<usize> {
        self.forest_seq_offset[self.forest_pos[infoset]]..self.forest_seq_offset[self.forest_end[infoset]]
    }

    /// Number of non-empty sequences, i.e. the length of the forest layout.
    pub fn forest_width(&self) -> usize {
        *self.forest_seq_offset.last().unwrap()
    }

    /// Reorders a per-sequence vector into the forest layout.
    pub fn to_forest_layout(&self, by_seq: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for &j in &self.forest {
            let s = self.seq_base[j];
            out.extend_from_slice(&by_seq[s..s + self.infosets[j].actions.len()]);
        }
    }

    /// Number of (J, b) sequences with J ∈ C*(I).
    pub fn subtree_width(&self, infoset: InfosetId) -> usize {
        self.forest_seq_offset[self.forest_end[infoset]] - self.forest_seq_offset[self.forest_pos[infoset]]
    }

    /// Position of `(j, b)` in the local layout of C*(`root`) used by
    /// [`subtree_best_value`](Self::subtree_best_value).
    pub fn local_index(&self, root: InfosetId, j: InfosetId, b: usize) -> usize {
        debug_assert!(self.precedes(root, j));
        self.forest_seq_offset[self.forest_pos[j]] - self.forest_seq_offset[self.forest_pos[root]] + b
    }

    /// Range of the C*(`inner`) block inside the local layout of C*(`outer`).
    pub fn local_block(&self, outer: InfosetId, inner: InfosetId) -> Range<usize> {
        let start = self.local_index(outer, inner, 0);
        start..start + self.subtree_width(inner)
    }

    /// Best-response value over plans reaching `root`:
    /// `value(J) = max_b (w[J,b] + Σ_{J' ∈ C(J,b)} value(J'))`,
    /// where `weights` is in the local layout of C*(`root`).
    pub fn subtree_best_value(&self, root: InfosetId, weights: &[f64]) -> f64 {
        let start = self.forest_pos[root];
        let end = self.forest_end[root];
        let base = self.forest_seq_offset[start];
        debug_assert_eq!(weights.len(), self.forest_seq_offset[end] - base);
        let mut value = vec![0.0; end - start];
        for pos in (start..end).rev() {
            let j = self.forest[pos];
            let off = self.forest_seq_offset[pos] - base;
            let info = &self.infosets[j];
            let mut best = f64::NEG_INFINITY;
            for b in 0..info.actions.len() {
                let mut v = weights[off + b];
                for &child in &info.children[b] {
                    v += value[self.forest_pos[child] - start];
                }
                if v > best {
                    best = v;
                }
            }
            value[pos - start] = best;
        }
        value[0]
    }

    /// Same recursion as [`subtree_best_value`](Self::subtree_best_value) but
    /// from every root infoset, with weights indexed by sequence id.
    pub fn best_plan_value(&self, weights_by_seq: &[f64]) -> f64 {
        let mut value = vec![0.0; self.infosets.len()];
        for &j in self.forest.iter().rev() {
            let info = &self.infosets[j];
            let mut best = f64::NEG_INFINITY;
            for b in 0..info.actions.len() {
                let mut v = weights_by_seq[self.seq(j, b)];
                for &child in &info.children[b] {
                    v += value[child];
                }
                best = best.max(v);
            }
            value[j] = best;
        }
        self.roots.iter().map(|&r| value[r]).sum()
    }

    fn check_infoset(&self, player: usize, infoset: InfosetId) -> Result<(), QueryError> {
        if infoset < self.infosets.len() {
            Ok(())
        } else {
            Err(QueryError::UnknownInfoset { player, infoset })
        }
    }
}

/// Answer of [`GameTree::structure_queries`].
#[derive(Clone, Debug, PartialEq)]
pub struct StructureQuery {
    pub children: Vec<InfosetId>,
    pub descendants: Vec<InfosetId>,
    pub parent_sequence: SeqId,
    pub blocking_sequences: Vec<SeqId>,
    pub terminals: Vec<TerminalId>,
    pub terminals_action: Vec<TerminalId>,
    pub terminals_other: Vec<TerminalId>,
}

/// Immutable extensive-form game with perfect recall.
///
/// Nodes are stored in preorder, so every subtree is a contiguous id range.
/// Infosets of each player are numbered by first appearance in that preorder,
/// which is a linear extension of the precedence order ⪯.
#[derive(Clone, Debug, PartialEq)]
pub struct GameTree {
    num_players: usize,
    nodes: Vec<Node>,
    children: Vec<NodeId>,
    chance_outcomes: Vec<ChanceOutcome>,
    terminals: Vec<NodeId>,
    payoffs: Vec<f64>,
    chance_reach: Vec<f64>,
    terminal_seqs: Vec<SeqId>,
    players: Vec<PlayerTree>,
}

impl GameTree {
    /// Validates `raw` and freezes it in canonical (preorder) form.
    pub fn from_raw(raw: &RawGame) -> Result<GameTree, GameError> {
        let report = validate(raw)?;
        if !report.is_empty() {
            return Err(GameError::Invalid(report));
        }
        Ok(Self::freeze(raw))
    }

    fn freeze(raw: &RawGame) -> GameTree {
        let np = raw.num_players;
        // Preorder renumbering.
        let mut order: Vec<usize> = Vec::with_capacity(raw.nodes.len());
        let mut stack = vec![raw.root];
        while let Some(id) = stack.pop() {
            order.push(id);
            stack.extend(raw.nodes[id].children.iter().rev().copied());
        }
        let mut new_id = vec![usize::MAX; raw.nodes.len()];
        for (k, &old) in order.iter().enumerate() {
            new_id[old] = k;
        }

        // Infoset ids by first appearance.
        let mut infoset_ids: Vec<HashMap<&str, InfosetId>> = vec![HashMap::new(); np];
        let mut infosets: Vec<Vec<Infoset>> = vec![Vec::new(); np];
        for &old in &order {
            if let RawKind::Decision { player, infoset, actions } = &raw.nodes[old].kind {
                let ids = &mut infoset_ids[*player];
                let next = ids.len();
                let id = *ids.entry(infoset.as_str()).or_insert(next);
                if id == infosets[*player].len() {
                    infosets[*player].push(Infoset {
                        name: infoset.clone(),
                        actions: actions.clone(),
                        nodes: Vec::new(),
                        parent: None,
                        children: vec![Vec::new(); actions.len()],
                        depth: 0,
                        blocking: Vec::new(),
                    });
                }
                infosets[*player][id].nodes.push(new_id[old]);
            }
        }
        let seq_bases: Vec<Vec<SeqId>> = infosets
            .iter()
            .map(|list| {
                let mut base = Vec::with_capacity(list.len());
                let mut next = 1;
                for info in list {
                    base.push(next);
                    next += info.actions.len();
                }
                base
            })
            .collect();

        // Nodes, chance outcomes, terminals, per-node own sequences.
        let n = order.len();
        let mut nodes = Vec::with_capacity(n);
        let mut children = Vec::with_capacity(n.saturating_sub(1));
        let mut chance_outcomes = Vec::new();
        let mut terminals = Vec::new();
        let mut payoffs = Vec::new();
        let mut chance_reach = Vec::new();
        let mut terminal_seqs = Vec::new();
        let mut node_seq: Vec<SeqId> = vec![EMPTY_SEQUENCE; n * np];
        let mut node_reach: Vec<f64> = vec![1.0; n];
        let mut parent_of = vec![None; n];

        for (k, &old) in order.iter().enumerate() {
            let RawNode { kind, children: raw_children } = &raw.nodes[old];
            let first_child = children.len();
            children.extend(raw_children.iter().map(|&c| new_id[c]));
            for &c in &children[first_child..] {
                parent_of[c] = Some(k);
            }
            let kind = match kind {
                RawKind::Chance { outcomes } => {
                    let first = chance_outcomes.len();
                    for ((label, prob), &c) in outcomes.iter().zip(raw_children) {
                        chance_outcomes.push(ChanceOutcome { label: label.clone(), prob: *prob });
                        let c = new_id[c];
                        node_reach[c] = node_reach[k] * prob;
                        node_seq.copy_within(k * np..(k + 1) * np, c * np);
                    }
                    NodeKind::Chance { first_outcome: first }
                }
                RawKind::Decision { player, infoset, .. } => {
                    let id = infoset_ids[*player][infoset.as_str()];
                    for (a, &c) in raw_children.iter().enumerate() {
                        let c = new_id[c];
                        node_reach[c] = node_reach[k];
                        node_seq.copy_within(k * np..(k + 1) * np, c * np);
                        node_seq[c * np + player] = seq_bases[*player][id] + a;
                    }
                    let own = node_seq[k * np + player];
                    let info = &mut infosets[*player][id];
                    if info.nodes[0] == k && own != EMPTY_SEQUENCE {
                        info.parent = Some(Self::seq_pair(&seq_bases[*player], own));
                    }
                    NodeKind::Decision { player: *player, infoset: id }
                }
                RawKind::Terminal { payoffs: values } => {
                    let index = terminals.len();
                    terminals.push(k);
                    payoffs.extend_from_slice(values);
                    chance_reach.push(node_reach[k]);
                    terminal_seqs.extend_from_slice(&node_seq[k * np..(k + 1) * np]);
                    NodeKind::Terminal { index }
                }
            };
            nodes.push(Node {
                kind,
                parent: None,
                first_child,
                num_children: raw_children.len(),
                subtree_end: k + 1,
            });
        }
        for k in (0..n).rev() {
            nodes[k].parent = parent_of[k];
            let end = nodes[k].subtree_end;
            if let Some(p) = parent_of[k] {
                if nodes[p].subtree_end < end {
                    nodes[p].subtree_end = end;
                }
            }
        }

        let players = infosets
            .into_iter()
            .zip(seq_bases)
            .enumerate()
            .map(|(p, (list, base))| Self::player_tree(p, np, list, base, &terminal_seqs))
            .collect();

        GameTree {
            num_players: np,
            nodes,
            children,
            chance_outcomes,
            terminals,
            payoffs,
            chance_reach,
            terminal_seqs,
            players,
        }
    }

    fn seq_pair(base: &[SeqId], seq: SeqId) -> (InfosetId, usize) {
        // base is increasing; the owner is the last infoset whose base ≤ seq.
        let id = base.partition_point(|&b| b <= seq) - 1;
        (id, seq - base[id])
    }

    fn player_tree(
        player: usize,
        np: usize,
        mut infosets: Vec<Infoset>,
        seq_base: Vec<SeqId>,
        terminal_seqs: &[SeqId],
    ) -> PlayerTree {
        let num_seq = 1 + infosets.iter().map(|i| i.actions.len()).sum::<usize>();
        let mut seq_owner = vec![None; num_seq];
        for (id, info) in infosets.iter().enumerate() {
            for a in 0..info.actions.len() {
                seq_owner[seq_base[id] + a] = Some((id, a));
            }
        }
        let mut roots = Vec::new();
        for id in 0..infosets.len() {
            match infosets[id].parent {
                Some((j, a)) => {
                    infosets[j].children[a].push(id);
                    let depth = infosets[j].depth + 1;
                    let mut blocking = infosets[j].blocking.clone();
                    for b in 0..infosets[j].actions.len() {
                        if b != a {
                            blocking.push(seq_base[j] + b);
                        }
                    }
                    infosets[id].depth = depth;
                    infosets[id].blocking = blocking;
                }
                None => roots.push(id),
            }
        }

        let mut forest = Vec::with_capacity(infosets.len());
        let mut forest_pos = vec![0; infosets.len()];
        let mut forest_end = vec![0; infosets.len()];
        let mut stack: Vec<(InfosetId, bool)> = roots.iter().rev().map(|&r| (r, false)).collect();
        while let Some((id, done)) = stack.pop() {
            if done {
                forest_end[id] = forest.len();
                continue;
            }
            forest_pos[id] = forest.len();
            forest.push(id);
            stack.push((id, true));
            for list in infosets[id].children.iter().rev() {
                stack.extend(list.iter().rev().map(|&c| (c, false)));
            }
        }
        let mut forest_seq_offset = Vec::with_capacity(forest.len() + 1);
        let mut acc = 0;
        for &id in &forest {
            forest_seq_offset.push(acc);
            acc += infosets[id].actions.len();
        }
        forest_seq_offset.push(acc);

        let mut counts = vec![0usize; num_seq + 1];
        let num_terminals = terminal_seqs.len() / np.max(1);
        for z in 0..num_terminals {
            counts[terminal_seqs[z * np + player] + 1] += 1;
        }
        for s in 0..num_seq {
            counts[s + 1] += counts[s];
        }
        let immediate_offsets = counts.clone();
        let mut fill = counts;
        let mut immediate_terminals = vec![0; num_terminals];
        for z in 0..num_terminals {
            let s = terminal_seqs[z * np + player];
            immediate_terminals[fill[s]] = z;
            fill[s] += 1;
        }

        PlayerTree {
            infosets,
            seq_base,
            seq_owner,
            roots,
            forest,
            forest_pos,
            forest_end,
            forest_seq_offset,
            immediate_offsets,
            immediate_terminals,
        }
    }

    /// Inverse of [`from_raw`](Self::from_raw) up to node numbering.
    pub fn to_raw(&self) -> RawGame {
        let nodes = (0..self.nodes.len())
            .map(|id| {
                let kind = match self.nodes[id].kind {
                    NodeKind::Chance { .. } => RawKind::Chance {
                        outcomes: self
                            .chance_outcomes(id)
                            .iter()
                            .map(|o| (o.label.clone(), o.prob))
                            .collect(),
                    },
                    NodeKind::Decision { player, infoset } => {
                        let info = self.players[player].infoset(infoset);
                        RawKind::Decision {
                            player,
                            infoset: info.name.clone(),
                            actions: info.actions.clone(),
                        }
                    }
                    NodeKind::Terminal { index } => {
                        RawKind::Terminal { payoffs: self.payoffs(index).to_vec() }
                    }
                };
                RawNode { kind, children: self.children(id).to_vec() }
            })
            .collect();
        RawGame { num_players: self.num_players, nodes, root: 0 }
    }

    pub fn num_players(&self) -> usize {
        self.num_players
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        let node = &self.nodes[id];
        &self.children[node.first_child..node.first_child + node.num_children]
    }

    /// Outcomes of a chance node (empty for other nodes).
    pub fn chance_outcomes(&self, id: NodeId) -> &[ChanceOutcome] {
        match self.nodes[id].kind {
            NodeKind::Chance { first_outcome } => {
                &self.chance_outcomes[first_outcome..first_outcome + self.nodes[id].num_children]
            }
            _ => &[],
        }
    }

    /// Node ids in the subtree rooted at `id` (including `id`).
    pub fn subtree(&self, id: NodeId) -> Range<NodeId> {
        id..self.nodes[id].subtree_end
    }

    pub fn num_terminals(&self) -> usize {
        self.terminals.len()
    }

    pub fn terminal_node(&self, z: TerminalId) -> NodeId {
        self.terminals[z]
    }

    pub fn payoffs(&self, z: TerminalId) -> &[f64] {
        &self.payoffs[z * self.num_players..(z + 1) * self.num_players]
    }

    pub fn payoff(&self, z: TerminalId, player: usize) -> f64 {
        self.payoffs[z * self.num_players + player]
    }

    /// p_c(z): product of chance probabilities on the path to `z`.
    pub fn chance_reach(&self, z: TerminalId) -> f64 {
        self.chance_reach[z]
    }

    /// Last sequence of `player` on the path to `z`.
    pub fn terminal_seq(&self, z: TerminalId, player: usize) -> SeqId {
        self.terminal_seqs[z * self.num_players + player]
    }

    pub fn player(&self, player: usize) -> &PlayerTree {
        &self.players[player]
    }

    pub fn players(&self) -> &[PlayerTree] {
        &self.players
    }

    /// Top-down order of a player's infosets (a linear extension of ⪯,
    /// ties broken by first appearance in the tree).
    pub fn infoset_order(&self, player: usize) -> Vec<InfosetId> {
        (0..self.players[player].num_infosets()).collect()
    }

    /// Terminals inside a node range, i.e. below the subtree root.
    fn terminals_in(&self, range: Range<NodeId>) -> Range<TerminalId> {
        let lo = self.terminals.partition_point(|&t| t < range.start);
        let hi = self.terminals.partition_point(|&t| t < range.end);
        lo..hi
    }

    /// Z(I), sorted.
    pub fn terminals_below(&self, player: usize, infoset: InfosetId) -> Vec<TerminalId> {
        let info = self.players[player].infoset(infoset);
        let mut out: Vec<TerminalId> =
            info.nodes.iter().flat_map(|&h| self.terminals_in(self.subtree(h))).collect();
        out.sort_unstable();
        out
    }

    /// Z(I, a), sorted.
    pub fn terminals_below_action(&self, player: usize, infoset: InfosetId, action: usize) -> Vec<TerminalId> {
        let info = self.players[player].infoset(infoset);
        let mut out: Vec<TerminalId> = info
            .nodes
            .iter()
            .flat_map(|&h| self.terminals_in(self.subtree(self.children(h)[action])))
            .collect();
        out.sort_unstable();
        out
    }

    /// Children, descendants, σ(I), Σ^c(I), Z(I), Z(I,a) and Z^c(I,a).
    pub fn structure_queries(
        &self,
        player: usize,
        infoset: InfosetId,
        action: usize,
    ) -> Result<StructureQuery, QueryError> {
        let pt = self.check_infoset(player, infoset)?;
        if action >= pt.num_actions(infoset) {
            return Err(QueryError::UnknownAction { player, infoset, action });
        }
        let terminals = self.terminals_below(player, infoset);
        let terminals_action = self.terminals_below_action(player, infoset, action);
        let terminals_other =
            terminals.iter().copied().filter(|z| terminals_action.binary_search(z).is_err()).collect();
        Ok(StructureQuery {
            children: pt.children(infoset, action).to_vec(),
            descendants: pt.descendants(infoset).to_vec(),
            parent_sequence: pt.parent_seq(infoset),
            blocking_sequences: pt.blocking_sequences(infoset).to_vec(),
            terminals,
            terminals_action,
            terminals_other,
        })
    }

    /// Looks up an infoset id by name.
    pub fn infoset_by_name(&self, player: usize, name: &str) -> Option<InfosetId> {
        self.players.get(player)?.infosets.iter().position(|i| i.name == name)
    }

    /// Looks up an action index by label.
    pub fn action_by_label(&self, player: usize, infoset: InfosetId, label: &str) -> Option<usize> {
        self.players[player].infosets[infoset].actions.iter().position(|a| a == label)
    }

    pub(crate) fn check_player(&self, player: usize) -> Result<&PlayerTree, QueryError> {
        self.players.get(player).ok_or(QueryError::UnknownPlayer(player))
    }

    pub(crate) fn check_infoset(&self, player: usize, infoset: InfosetId) -> Result<&PlayerTree, QueryError> {
        let pt = self.check_player(player)?;
        pt.check_infoset(player, infoset)?;
        Ok(pt)
    }
}
