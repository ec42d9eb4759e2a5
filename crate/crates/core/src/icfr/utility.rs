use serde::{Deserialize, Serialize};

use crate::efg::{GameTree, InfosetId, Plan, PlanProfile, PlayerTree};

/// u_i[I, a] for one player, indexed by sequence id. The entry of the empty
/// sequence collects terminals reached before the player ever acts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImmediateUtilityTable {
    pub values: Vec<f64>,
}

impl ImmediateUtilityTable {
    pub fn get(&self, tree: &PlayerTree, infoset: InfosetId, action: usize) -> f64 {
        self.values[tree.seq(infoset, action)]
    }
}

/// Counterfactual values of one player under one plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterfactualValues {
    /// V_I(π) per infoset.
    pub infoset: Vec<f64>,
    /// û_I(a) per sequence (I, a); entry 0 is unused.
    pub action: Vec<f64>,
}

impl CounterfactualValues {
    /// û_I as a slice over A(I).
    pub fn actions_at<'a>(&'a self, tree: &PlayerTree, infoset: InfosetId) -> &'a [f64] {
        let s = tree.seq(infoset, 0);
        &self.action[s..s + tree.num_actions(infoset)]
    }
}

/// Immediate utilities of every player given the realized profile.
///
/// A terminal contributes p_c(z)·u_i(z) to the last sequence of player i on
/// its path whenever all opponents' plans reach it.
pub fn observe_all_utilities(tree: &GameTree, profile: &PlanProfile) -> Vec<ImmediateUtilityTable> {
    let np = tree.num_players();
    let reach: Vec<Vec<bool>> =
        (0..np).map(|p| tree.player(p).sequence_reach(profile.plan(p))).collect();
    let mut tables: Vec<Vec<f64>> = (0..np).map(|p| vec![0.0; tree.player(p).num_sequences()]).collect();
    for z in 0..tree.num_terminals() {
        let mut missing = 0;
        let mut who = 0;
        for p in 0..np {
            if !reach[p][tree.terminal_seq(z, p)] {
                missing += 1;
                who = p;
                if missing > 1 {
                    break;
                }
            }
        }
        let pc = tree.chance_reach(z);
        match missing {
            0 => {
                for (p, table) in tables.iter_mut().enumerate() {
                    table[tree.terminal_seq(z, p)] += pc * tree.payoff(z, p);
                }
            }
            1 => tables[who][tree.terminal_seq(z, who)] += pc * tree.payoff(z, who),
            _ => {}
        }
    }
    tables.into_iter().map(|values| ImmediateUtilityTable { values }).collect()
}

/// Immediate utilities of `player` given the opponents' plans in `profile`
/// (the player's own plan in it is ignored).
pub fn observe_utilities(tree: &GameTree, profile: &PlanProfile, player: usize) -> ImmediateUtilityTable {
    let np = tree.num_players();
    let reach: Vec<Option<Vec<bool>>> = (0..np)
        .map(|p| (p != player).then(|| tree.player(p).sequence_reach(profile.plan(p))))
        .collect();
    let mut values = vec![0.0; tree.player(player).num_sequences()];
    for z in 0..tree.num_terminals() {
        let ok = reach
            .iter()
            .enumerate()
            .all(|(p, r)| r.as_ref().map_or(true, |r| r[tree.terminal_seq(z, p)]));
        if ok {
            values[tree.terminal_seq(z, player)] += tree.chance_reach(z) * tree.payoff(z, player);
        }
    }
    ImmediateUtilityTable { values }
}

/// V_I(π) = u[I, π(I)] + Σ_{J ∈ C(I, π(I))} V_J(π), and
/// û_I(a) = u[I, a] + Σ_{J ∈ C(I, a)} V_J(π), bottom-up.
pub fn counterfactual_values(tree: &PlayerTree, plan: &Plan, table: &ImmediateUtilityTable) -> CounterfactualValues {
    let mut infoset = vec![0.0; tree.num_infosets()];
    let mut action = vec![0.0; tree.num_sequences()];
    // Children always have larger ids than their parent.
    for i in (0..tree.num_infosets()).rev() {
        for a in 0..tree.num_actions(i) {
            let s = tree.seq(i, a);
            let mut v = table.values[s];
            for &j in tree.children(i, a) {
                v += infoset[j];
            }
            action[s] = v;
        }
        infoset[i] = action[tree.seq(i, plan.action(i))];
    }
    CounterfactualValues { infoset, action }
}
