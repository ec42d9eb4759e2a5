use rand::Rng;

use super::Diagnostics;
use crate::efg::{GameTree, InfosetId, Plan, PlanProfile, PlayerTree};
use crate::icfr::{counterfactual_values, feedback, observe_utilities, RunRecord};

/// Rebuilds the accumulators of every player from a run record.
pub fn replay_accumulators(tree: &GameTree, record: &RunRecord) -> Diagnostics {
    let mut diag = Diagnostics::new(tree);
    for profile in &record.profiles {
        diag.observe(tree, &feedback(tree, profile.clone()));
    }
    diag
}

/// Best response over Π(root) on sequence-indexed weights; descendants
/// always carry larger ids than their ancestors.
fn best_value_by_seq(tree: &PlayerTree, root: InfosetId, weights: &[f64]) -> f64 {
    let mut below: Vec<InfosetId> = tree.descendants(root).to_vec();
    below.sort_unstable();
    let mut value = vec![0.0; tree.num_infosets()];
    for &j in below.iter().rev() {
        value[j] = (0..tree.num_actions(j))
            .map(|b| weights[tree.seq(j, b)] + tree.children(j, b).iter().map(|&c| value[c]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
    }
    value[root]
}

/// Trigger regrets of `player` recomputed by rescanning the record once per
/// trigger, without accumulators. Indexed by sequence id; entry 0 is zero.
pub fn replay_trigger_regrets(tree: &GameTree, record: &RunRecord, player: usize) -> Vec<f64> {
    let pt = tree.player(player);
    let mut out = vec![0.0; pt.num_sequences()];
    let tables: Vec<_> = record.profiles.iter().map(|p| observe_utilities(tree, p, player)).collect();
    for (seq, slot) in out.iter_mut().enumerate().skip(1) {
        let (j, a) = pt.seq_owner(seq).expect("non-empty sequence");
        let mut weights = vec![0.0; pt.num_sequences()];
        let mut followed = 0.0;
        let mut fired = false;
        for (profile, table) in record.profiles.iter().zip(&tables) {
            let plan = profile.plan(player);
            if plan.action(j) != a || !pt.reaches_infoset(plan, j) {
                continue;
            }
            fired = true;
            for &k in pt.descendants(j) {
                for b in 0..pt.num_actions(k) {
                    let s = pt.seq(k, b);
                    weights[s] += table.values[s];
                }
            }
            followed += counterfactual_values(pt, plan, table).infoset[j];
        }
        if fired {
            *slot = best_value_by_seq(pt, j, &weights) - followed;
        }
    }
    out
}

/// Residual of V_I(π̂) − V_I(π) = Σ_{z ∈ Z(I)} (ρ^{(π̂,π_{-i})}_{I→z} − ρ^{(π_i,π_{-i})}_{I→z})·p_c(z)·u_i(z)
/// for one infoset; the left side comes from the counterfactual recursion, the
/// right side from a terminal walk.
pub fn rho_identity_residual(
    tree: &GameTree,
    player: usize,
    deviation: &Plan,
    profile: &PlanProfile,
    infoset: InfosetId,
) -> f64 {
    let pt = tree.player(player);
    let table = observe_utilities(tree, profile, player);
    let lhs = counterfactual_values(pt, deviation, &table).infoset[infoset]
        - counterfactual_values(pt, profile.plan(player), &table).infoset[infoset];
    let rhs: f64 = tree
        .terminals_below(player, infoset)
        .into_iter()
        .map(|z| {
            let hat = tree.joint_reach_from(player, deviation, profile, infoset, z) as u8 as f64;
            let cur = tree.joint_reach_from(player, profile.plan(player), profile, infoset, z) as u8 as f64;
            (hat - cur) * tree.chance_reach(z) * tree.payoff(z, player)
        })
        .sum();
    (lhs - rhs).abs()
}

/// Uniformly random pure plan.
pub fn random_plan(tree: &PlayerTree, rng: &mut impl Rng) -> Plan {
    Plan::from_indices(&(0..tree.num_infosets()).map(|i| rng.gen_range(0..tree.num_actions(i))).collect::<Vec<_>>())
}

/// Largest ρ-identity residual over `samples` random (π̂, profile) pairs,
/// every player and every infoset.
pub fn check_rho_identity(tree: &GameTree, samples: usize, rng: &mut impl Rng) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let profile = PlanProfile::new(tree.players().iter().map(|p| random_plan(p, rng)).collect());
        for p in 0..tree.num_players() {
            let deviation = random_plan(tree.player(p), rng);
            for i in 0..tree.player(p).num_infosets() {
                worst = worst.max(rho_identity_residual(tree, p, &deviation, &profile, i));
            }
        }
    }
    worst
}

/// Largest |incremental − replayed| trigger regret over all players and triggers.
pub fn replay_discrepancy(tree: &GameTree, record: &RunRecord, diag: &Diagnostics) -> f64 {
    let mut worst: f64 = 0.0;
    for (p, acc) in diag.players.iter().enumerate() {
        let incremental: Vec<f64> = acc.trigger_regrets(tree.player(p));
        let replayed = replay_trigger_regrets(tree, record, p);
        for (a, b) in incremental.iter().zip(&replayed) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}
