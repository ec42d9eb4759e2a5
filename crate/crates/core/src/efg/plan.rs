use serde::{Deserialize, Serialize};

use super::tree::{GameTree, InfosetId, PlayerTree, SeqId, TerminalId, EMPTY_SEQUENCE};

/// A normal-form plan: one action index per infoset of its player.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Plan(Vec<u16>);

impl Plan {
    pub fn new(actions: Vec<u16>) -> Self {
        Plan(actions)
    }

    pub fn from_indices(actions: &[usize]) -> Self {
        Plan(actions.iter().map(|&a| a as u16).collect())
    }

    pub fn action(&self, infoset: InfosetId) -> usize {
        self.0[infoset] as usize
    }

    pub fn actions(&self) -> &[u16] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True if the plan assigns a legal action to every infoset of `tree`.
    pub fn is_valid_for(&self, tree: &PlayerTree) -> bool {
        self.0.len() == tree.num_infosets()
            && self.0.iter().enumerate().all(|(i, &a)| (a as usize) < tree.num_actions(i))
    }
}

/// A plan under construction; unassigned infosets are `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialPlan(Vec<Option<u16>>);

impl PartialPlan {
    pub fn new(num_infosets: usize) -> Self {
        PartialPlan(vec![None; num_infosets])
    }

    pub fn set(&mut self, infoset: InfosetId, action: usize) {
        self.0[infoset] = Some(action as u16);
    }

    pub fn get(&self, infoset: InfosetId) -> Option<usize> {
        self.0[infoset].map(usize::from)
    }

    /// The completed plan, or `None` if some infoset is unassigned.
    pub fn into_plan(self) -> Option<Plan> {
        self.0.into_iter().collect::<Option<Vec<u16>>>().map(Plan)
    }
}

/// Read access shared by total and partial plans.
pub trait PlanView {
    fn choice(&self, infoset: InfosetId) -> Option<usize>;
}

impl PlanView for Plan {
    fn choice(&self, infoset: InfosetId) -> Option<usize> {
        Some(self.action(infoset))
    }
}

impl PlanView for PartialPlan {
    fn choice(&self, infoset: InfosetId) -> Option<usize> {
        self.get(infoset)
    }
}

/// One total plan per player.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlanProfile(Vec<Plan>);

impl PlanProfile {
    pub fn new(plans: Vec<Plan>) -> Self {
        PlanProfile(plans)
    }

    pub fn plan(&self, player: usize) -> &Plan {
        &self.0[player]
    }

    pub fn plans(&self) -> &[Plan] {
        &self.0
    }

    pub fn num_players(&self) -> usize {
        self.0.len()
    }
}

/// A sequence of some player: ∅ or the pair (I, a).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sequence {
    Empty,
    Pair { infoset: InfosetId, action: usize },
}

impl PlayerTree {
    pub fn sequence(&self, seq: SeqId) -> Sequence {
        match self.seq_owner(seq) {
            None => Sequence::Empty,
            Some((infoset, action)) => Sequence::Pair { infoset, action },
        }
    }

    pub fn seq_id(&self, seq: Sequence) -> SeqId {
        match seq {
            Sequence::Empty => EMPTY_SEQUENCE,
            Sequence::Pair { infoset, action } => self.seq(infoset, action),
        }
    }

    /// π ∈ Π(I). For partial plans: whether reaching I is still possible,
    /// i.e. no assigned ancestor deviates from σ(I).
    pub fn reaches_infoset(&self, plan: &impl PlanView, infoset: InfosetId) -> bool {
        let mut cur = self.infoset(infoset).parent;
        while let Some((j, a)) = cur {
            if let Some(b) = plan.choice(j) {
                if b != a {
                    return false;
                }
            }
            cur = self.infoset(j).parent;
        }
        true
    }

    /// π ∈ Π(σ). Unassigned infosets of a partial plan count as compatible.
    pub fn reaches_sequence(&self, plan: &impl PlanView, seq: SeqId) -> bool {
        match self.seq_owner(seq) {
            None => true,
            Some((i, a)) => {
                plan.choice(i).map_or(true, |b| b == a) && self.reaches_infoset(plan, i)
            }
        }
    }

    /// `out[σ] = 1[π ∈ Π(σ)]` for every sequence.
    pub fn sequence_reach(&self, plan: &Plan) -> Vec<bool> {
        let mut out = vec![false; self.num_sequences()];
        out[EMPTY_SEQUENCE] = true;
        // Infoset ids are a top-down order, so parents are filled first.
        for i in 0..self.num_infosets() {
            let live = out[self.parent_seq(i)];
            if live {
                out[self.seq(i, plan.action(i))] = true;
            }
        }
        out
    }

    /// Number of plans, saturating at `u128::MAX`.
    pub fn num_plans(&self) -> u128 {
        self.infosets()
            .iter()
            .fold(1u128, |acc, info| acc.saturating_mul(info.num_actions() as u128))
    }
}

impl GameTree {
    /// z ∈ Z(I).
    pub fn infoset_contains_terminal(&self, player: usize, infoset: InfosetId, z: TerminalId) -> bool {
        let node = self.terminal_node(z);
        self.player(player).infoset(infoset).nodes.iter().any(|&h| self.subtree(h).contains(&node))
    }

    /// π_i ∈ Π_i(z).
    pub fn plan_reaches_terminal(&self, player: usize, plan: &impl PlanView, z: TerminalId) -> bool {
        self.player(player).reaches_sequence(plan, self.terminal_seq(z, player))
    }

    /// π_{-i} ∈ Π_{-i}(z).
    pub fn opponents_reach_terminal(&self, profile: &PlanProfile, player: usize, z: TerminalId) -> bool {
        (0..self.num_players())
            .filter(|&j| j != player)
            .all(|j| self.plan_reaches_terminal(j, profile.plan(j), z))
    }

    /// ρ^{π_i}_{I→z}: z ∈ Z(I) and π_i takes every own action between I and z.
    pub fn reach_from(&self, player: usize, plan: &Plan, infoset: InfosetId, z: TerminalId) -> bool {
        if !self.infoset_contains_terminal(player, infoset, z) {
            return false;
        }
        let pt = self.player(player);
        let mut seq = self.terminal_seq(z, player);
        while let Some((j, b)) = pt.seq_owner(seq) {
            if plan.action(j) != b {
                return false;
            }
            if j == infoset {
                return true;
            }
            seq = pt.parent_seq(j);
        }
        unreachable!("terminal below an infoset must pass through it")
    }

    /// ρ^{(π_i, π_{-i})}_{I→z}, with π_i taken from `own` and π_{-i} from `profile`.
    pub fn joint_reach_from(
        &self,
        player: usize,
        own: &Plan,
        profile: &PlanProfile,
        infoset: InfosetId,
        z: TerminalId,
    ) -> bool {
        self.reach_from(player, own, infoset, z) && self.opponents_reach_terminal(profile, player, z)
    }
}
