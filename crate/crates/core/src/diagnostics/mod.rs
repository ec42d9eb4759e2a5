//! Trigger, subtree and laminar subtree regrets.
//!
//! For a trigger σ = (J, a) the accumulators keep, over the iterations whose
//! plan lies in Π(σ):
//!
//! - `S[K, b] = Σ_t u_t[K, b]` for every sequence (K, b) with K ∈ C*(J);
//! - `L[K, b] = Σ_t û_K^t(b)`;
//! - `F[K]    = Σ_t V_K^t(π_t)` for every K ∈ C*(J).
//!
//! Every regret is then a function of these sums. The subtree regret at
//! I ∈ C*(J) is a best-response recursion over C*(I) on `S` minus `F[I]`; the
//! laminar regret of action b at I is `L[I, b] − F[I]`. The empty sequence is
//! tracked as a trigger covering the whole forest, which the going-up check
//! needs for root infosets.

mod replay;

use serde::{Deserialize, Serialize};

use crate::efg::{InfosetId, Plan, PlayerTree, SeqId, EMPTY_SEQUENCE};
use crate::error::QueryError;
use crate::icfr::{CounterfactualValues, ImmediateUtilityTable, IterationFeedback};

pub use replay::{
    check_rho_identity, random_plan, replay_accumulators, replay_discrepancy, replay_trigger_regrets,
    rho_identity_residual,
};

/// Tolerance of the equality and inequality checks.
pub const DECOMPOSITION_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
struct Slot {
    count: u64,
    s: Vec<f64>,
    l: Vec<f64>,
    f: Vec<f64>,
}

/// Accumulators of every trigger of one player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriggerAccumulators {
    player: usize,
    iterations: u64,
    /// Indexed by sequence id; entry 0 is the empty sequence.
    slots: Vec<Slot>,
    #[serde(skip)]
    scratch: (Vec<f64>, Vec<f64>, Vec<f64>),
}

/// Root infoset of the trigger's subtree; `None` for the empty sequence.
fn trigger_root(tree: &PlayerTree, seq: SeqId) -> Option<InfosetId> {
    tree.seq_owner(seq).map(|(j, _)| j)
}

impl TriggerAccumulators {
    pub fn new(tree: &PlayerTree, player: usize) -> Self {
        let slots = (0..tree.num_sequences())
            .map(|seq| {
                let (width, infosets) = match trigger_root(tree, seq) {
                    Some(j) => (tree.subtree_width(j), tree.descendants(j).len()),
                    None => (tree.forest_width(), tree.num_infosets()),
                };
                Slot { count: 0, s: vec![0.0; width], l: vec![0.0; width], f: vec![0.0; infosets] }
            })
            .collect();
        TriggerAccumulators { player, iterations: 0, slots, scratch: Default::default() }
    }

    pub fn player(&self) -> usize {
        self.player
    }

    /// Number of observed iterations.
    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    /// N_σ: iterations whose plan lay in Π(σ).
    pub fn count(&self, seq: SeqId) -> u64 {
        self.slots[seq].count
    }

    /// F_σ at the trigger infoset: Σ_t 1[π_t ∈ Π(σ)] V_J^t(π_t).
    pub fn followed_value(&self, seq: SeqId) -> f64 {
        self.slots[seq].f.first().copied().unwrap_or(0.0)
    }

    /// Adds one iteration.
    pub fn observe(
        &mut self,
        tree: &PlayerTree,
        plan: &Plan,
        utilities: &ImmediateUtilityTable,
        values: &CounterfactualValues,
    ) {
        self.iterations += 1;
        let live = tree.sequence_reach(plan);
        let (u, uhat, v) = &mut self.scratch;
        tree.to_forest_layout(&utilities.values, u);
        tree.to_forest_layout(&values.action, uhat);
        v.clear();
        v.extend(tree.forest().iter().map(|&k| values.infoset[k]));
        for seq in 0..tree.num_sequences() {
            if !live[seq] {
                continue;
            }
            let (block, first) = match trigger_root(tree, seq) {
                Some(j) => (tree.forest_block(j), tree.forest_pos(j)),
                None => (0..tree.forest_width(), 0),
            };
            let slot = &mut self.slots[seq];
            slot.count += 1;
            for (acc, x) in slot.s.iter_mut().zip(&u[block.clone()]) {
                *acc += x;
            }
            for (acc, x) in slot.l.iter_mut().zip(&uhat[block]) {
                *acc += x;
            }
            let n = slot.f.len();
            for (acc, x) in slot.f.iter_mut().zip(&v[first..first + n]) {
                *acc += x;
            }
        }
    }

    /// Adds the accumulators of a disjoint iteration range.
    pub fn merge(&mut self, other: &TriggerAccumulators) {
        assert_eq!(self.slots.len(), other.slots.len());
        self.iterations += other.iterations;
        for (a, b) in self.slots.iter_mut().zip(&other.slots) {
            a.count += b.count;
            for (x, y) in a.s.iter_mut().zip(&b.s) {
                *x += y;
            }
            for (x, y) in a.l.iter_mut().zip(&b.l) {
                *x += y;
            }
            for (x, y) in a.f.iter_mut().zip(&b.f) {
                *x += y;
            }
        }
    }

    fn check_seq(&self, tree: &PlayerTree, seq: SeqId) -> Result<(), QueryError> {
        if seq < tree.num_sequences() {
            Ok(())
        } else {
            Err(QueryError::UnknownSequence { player: self.player, sequence: seq })
        }
    }

    /// Offsets of C*(I) inside σ's layout: (sequence offset, infoset offset).
    fn locate(&self, tree: &PlayerTree, seq: SeqId, infoset: InfosetId) -> Result<(usize, usize), QueryError> {
        self.check_seq(tree, seq)?;
        if infoset >= tree.num_infosets() {
            return Err(QueryError::UnknownInfoset { player: self.player, infoset });
        }
        match trigger_root(tree, seq) {
            Some(j) => {
                if !tree.precedes(j, infoset) {
                    return Err(QueryError::NotInSubtree { trigger: j, infoset });
                }
                let base = tree.forest_block(j).start;
                Ok((tree.forest_block(infoset).start - base, tree.forest_pos(infoset) - tree.forest_pos(j)))
            }
            None => Ok((tree.forest_block(infoset).start, tree.forest_pos(infoset))),
        }
    }

    /// Subtree regret R_{σ,I} for I ∈ C*(J), where σ = (J, a).
    pub fn subtree_regret(&self, tree: &PlayerTree, seq: SeqId, infoset: InfosetId) -> Result<f64, QueryError> {
        let (off, k) = self.locate(tree, seq, infoset)?;
        let slot = &self.slots[seq];
        let width = tree.subtree_width(infoset);
        Ok(tree.subtree_best_value(infoset, &slot.s[off..off + width]) - slot.f[k])
    }

    /// Trigger regret R_σ; zero for a trigger that never fired.
    pub fn trigger_regret(&self, tree: &PlayerTree, seq: SeqId) -> Result<f64, QueryError> {
        self.check_seq(tree, seq)?;
        let Some(j) = trigger_root(tree, seq) else {
            return Err(QueryError::UnknownSequence { player: self.player, sequence: seq });
        };
        if self.slots[seq].count == 0 {
            return Ok(0.0);
        }
        self.subtree_regret(tree, seq, j)
    }

    /// All trigger regrets, indexed by sequence id (entry 0 unused and zero).
    pub fn trigger_regrets(&self, tree: &PlayerTree) -> Vec<f64> {
        let mut out = vec![0.0; tree.num_sequences()];
        for (seq, r) in out.iter_mut().enumerate().skip(1) {
            *r = self.trigger_regret(tree, seq).expect("valid sequence");
        }
        out
    }

    /// max_σ R_σ with its argmax, or `None` when the player never acts.
    pub fn max_trigger_regret(&self, tree: &PlayerTree) -> Option<(f64, SeqId)> {
        let regrets = self.trigger_regrets(tree);
        (1..regrets.len()).map(|s| (regrets[s], s)).max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)))
    }

    /// R̂_{σ,I,a} = Σ_t 1[π_t ∈ Π(σ)] (û_I^t(a) − û_I^t(π_t(I))).
    pub fn laminar_regret_action(
        &self,
        tree: &PlayerTree,
        seq: SeqId,
        infoset: InfosetId,
        action: usize,
    ) -> Result<f64, QueryError> {
        let (off, k) = self.locate(tree, seq, infoset)?;
        if action >= tree.num_actions(infoset) {
            return Err(QueryError::UnknownAction { player: self.player, infoset, action });
        }
        let slot = &self.slots[seq];
        Ok(slot.l[off + action] - slot.f[k])
    }

    /// R̂_{σ,I} = max_a R̂_{σ,I,a}.
    pub fn laminar_regret(&self, tree: &PlayerTree, seq: SeqId, infoset: InfosetId) -> Result<f64, QueryError> {
        let mut best = f64::NEG_INFINITY;
        for a in 0..tree.num_actions(infoset) {
            best = best.max(self.laminar_regret_action(tree, seq, infoset, a)?);
        }
        Ok(best)
    }
}

/// Accumulators of all players.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub players: Vec<TriggerAccumulators>,
}

impl Diagnostics {
    pub fn new(tree: &crate::efg::GameTree) -> Self {
        Diagnostics {
            players: (0..tree.num_players()).map(|p| TriggerAccumulators::new(tree.player(p), p)).collect(),
        }
    }

    pub fn observe(&mut self, tree: &crate::efg::GameTree, fb: &IterationFeedback) {
        for (p, acc) in self.players.iter_mut().enumerate() {
            acc.observe(tree.player(p), fb.profile.plan(p), &fb.utilities[p], &fb.values[p]);
        }
    }

    pub fn iterations(&self) -> u64 {
        self.players.first().map_or(0, |a| a.iterations())
    }

    /// max_i max_σ R_σ / T; `None` if no player has a trigger or T = 0.
    pub fn max_average_trigger_regret(&self, tree: &crate::efg::GameTree) -> Option<f64> {
        let t = self.iterations();
        if t == 0 {
            return None;
        }
        self.players
            .iter()
            .enumerate()
            .filter_map(|(p, acc)| acc.max_trigger_regret(tree.player(p)))
            .map(|(r, _)| r / t as f64)
            .max_by(f64::total_cmp)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelationCheck {
    /// R_{σ,I} = max_a { R̂_{σ,I,a} + Σ_{I' ∈ C(I,a)} R_{σ,I'} }.
    Decomposition,
    /// R_{σ,I} ≤ max_{π̂ ∈ Π(I)} Σ_{I' ∈ C*(I) reached by π̂} R̂_{σ,I'}.
    LaminarBound,
    /// R̂_{σ(I),J} ≤ Σ_a R̂_{(I,a),J} for J ∈ C*(I).
    GoingUp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub check: RelationCheck,
    pub player: usize,
    pub trigger: SeqId,
    pub infoset: InfosetId,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub checked: usize,
    /// Largest |lhs − rhs| of the equality check.
    pub max_equality_residual: f64,
    /// Largest lhs − rhs of the inequality checks (≤ 0 when they hold).
    pub max_inequality_excess: f64,
    pub violations: Vec<Violation>,
}

impl DecompositionReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn merge(&mut self, other: DecompositionReport) {
        self.checked += other.checked;
        self.max_equality_residual = self.max_equality_residual.max(other.max_equality_residual);
        self.max_inequality_excess = self.max_inequality_excess.max(other.max_inequality_excess);
        self.violations.extend(other.violations);
    }
}

/// Checks the decomposition identity, the laminar bound and the going-up
/// inequality for every trigger σ (including ∅) and every infoset below it.
pub fn check_decomposition(tree: &PlayerTree, acc: &TriggerAccumulators) -> DecompositionReport {
    let mut report = DecompositionReport { max_inequality_excess: f64::NEG_INFINITY, ..Default::default() };
    let player = acc.player();
    for seq in 0..tree.num_sequences() {
        let below: &[InfosetId] = match trigger_root(tree, seq) {
            Some(j) => tree.descendants(j),
            None => tree.forest(),
        };
        if below.is_empty() {
            continue;
        }
        // Subtree and laminar regrets for every I below the trigger, then the
        // two recursions bottom-up over the forest block.
        let mut subtree = vec![0.0; tree.num_infosets()];
        let mut laminar = vec![0.0; tree.num_infosets()];
        let mut bound = vec![0.0; tree.num_infosets()];
        for &i in below {
            subtree[i] = acc.subtree_regret(tree, seq, i).expect("infoset below trigger");
            laminar[i] = acc.laminar_regret(tree, seq, i).expect("infoset below trigger");
        }
        for &i in below.iter().rev() {
            let mut best_decomp = f64::NEG_INFINITY;
            let mut best_children = f64::NEG_INFINITY;
            for a in 0..tree.num_actions(i) {
                let children = tree.children(i, a);
                let lam = acc.laminar_regret_action(tree, seq, i, a).unwrap();
                best_decomp = best_decomp.max(lam + children.iter().map(|&c| subtree[c]).sum::<f64>());
                best_children = best_children.max(children.iter().map(|&c| bound[c]).sum::<f64>());
            }
            bound[i] = laminar[i] + best_children;

            report.checked += 2;
            let residual = (subtree[i] - best_decomp).abs();
            report.max_equality_residual = report.max_equality_residual.max(residual);
            if residual > DECOMPOSITION_TOLERANCE {
                report.violations.push(Violation {
                    check: RelationCheck::Decomposition,
                    player,
                    trigger: seq,
                    infoset: i,
                    lhs: subtree[i],
                    rhs: best_decomp,
                });
            }
            let excess = subtree[i] - bound[i];
            report.max_inequality_excess = report.max_inequality_excess.max(excess);
            if excess > DECOMPOSITION_TOLERANCE {
                report.violations.push(Violation {
                    check: RelationCheck::LaminarBound,
                    player,
                    trigger: seq,
                    infoset: i,
                    lhs: subtree[i],
                    rhs: bound[i],
                });
            }
        }
    }
    report.merge(check_going_up(tree, acc));
    if report.checked == 0 {
        report.max_inequality_excess = 0.0;
    }
    report
}

fn check_going_up(tree: &PlayerTree, acc: &TriggerAccumulators) -> DecompositionReport {
    let mut report = DecompositionReport { max_inequality_excess: f64::NEG_INFINITY, ..Default::default() };
    for i in 0..tree.num_infosets() {
        let parent = tree.parent_seq(i);
        for &j in tree.descendants(i) {
            let lhs = acc.laminar_regret(tree, parent, j).expect("C*(I) lies below σ(I)");
            let rhs: f64 = (0..tree.num_actions(i))
                .map(|a| acc.laminar_regret(tree, tree.seq(i, a), j).expect("J below I"))
                .sum();
            report.checked += 1;
            report.max_inequality_excess = report.max_inequality_excess.max(lhs - rhs);
            if lhs - rhs > DECOMPOSITION_TOLERANCE {
                report.violations.push(Violation {
                    check: RelationCheck::GoingUp,
                    player: acc.player(),
                    trigger: parent,
                    infoset: j,
                    lhs,
                    rhs,
                });
            }
        }
    }
    debug_assert!(tree.num_infosets() == 0 || parent_is_valid(tree));
    report
}

fn parent_is_valid(tree: &PlayerTree) -> bool {
    tree.roots().iter().all(|&r| tree.parent_seq(r) == EMPTY_SEQUENCE)
}
