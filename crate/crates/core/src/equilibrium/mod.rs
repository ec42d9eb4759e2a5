//! Empirical frequency of play and the EFCE, EFCCE and NFCCE deviation gaps.
//!
//! All gaps are computed from the profile histogram alone. For each player the
//! histogram is folded into one opponent-reach vector per distinct own plan,
//! and every terminal is then walked up the player's infoset chain to credit
//! the triggers it lies under. The resulting per-trigger weights feed the same
//! best-response recursion as the regret diagnostics, but none of the
//! per-iteration counterfactual values are used.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::efg::{GameTree, InfosetId, Plan, PlanProfile, PlayerTree, SeqId};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("empirical frequency is empty")]
    Empty,
    #[error("profile does not fit the game: {0}")]
    Mismatch(String),
}

/// μ̄^T: counts of realized profiles.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalFrequency {
    counts: IndexMap<PlanProfile, u64>,
    total: u64,
}

impl EmpiricalFrequency {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_profiles<'a>(profiles: impl IntoIterator<Item = &'a PlanProfile>) -> Self {
        let mut freq = Self::new();
        for p in profiles {
            freq.record(p.clone());
        }
        freq
    }

    pub fn record(&mut self, profile: PlanProfile) {
        *self.counts.entry(profile).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, profile: &PlanProfile) -> u64 {
        self.counts.get(profile).copied().unwrap_or(0)
    }

    /// μ̄(π) = count(π) / T.
    pub fn probability(&self, profile: &PlanProfile) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(profile) as f64 / self.total as f64
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PlanProfile, u64)> {
        self.counts.iter().map(|(p, &c)| (p, c))
    }

    fn check(&self, tree: &GameTree) -> Result<(), EvalError> {
        if self.total == 0 {
            return Err(EvalError::Empty);
        }
        for profile in self.counts.keys() {
            if profile.num_players() != tree.num_players() {
                return Err(EvalError::Mismatch(format!(
                    "{} plans for {} players",
                    profile.num_players(),
                    tree.num_players()
                )));
            }
            for (p, plan) in profile.plans().iter().enumerate() {
                if !plan.is_valid_for(tree.player(p)) {
                    return Err(EvalError::Mismatch(format!("invalid plan for player {}", p + 1)));
                }
            }
        }
        Ok(())
    }
}

/// Gaps of one player, in expected-utility units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlayerDeviation {
    /// max_σ gain(σ); 0 for a player without infosets.
    pub efce: f64,
    pub efce_trigger: Option<SeqId>,
    /// max_I gain(I).
    pub efcce: f64,
    pub efcce_infoset: Option<InfosetId>,
    pub nfcce: f64,
    /// gain(σ) per sequence id; entry 0 is unused.
    pub trigger_gains: Vec<f64>,
    /// gain(I) per infoset.
    pub infoset_gains: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub players: Vec<PlayerDeviation>,
    pub efce: f64,
    pub efcce: f64,
    pub nfcce: f64,
}

/// Per-trigger aggregates of one player.
struct TriggerWeights {
    /// W_σ in the local layout of C*(J), for σ = (J, a).
    weights: Vec<Vec<f64>>,
    /// Σ_π μ(π) 1[π_i ∈ Π(σ)] Σ_{z ∈ Z(σ)} 1[π reaches z] p_c(z) u_i(z).
    followed: Vec<f64>,
    /// Same over all terminals: the player's expected utility.
    expected: f64,
    /// Σ_π μ(π) 1[π_{-i} ∈ Π_{-i}(z)] p_c(z) u_i(z), by the player's last sequence at z.
    marginal: Vec<f64>,
}

/// Own plans with opponent-reach weights per terminal, scaled by 1/T.
fn fold_by_own_plan<'a>(tree: &GameTree, freq: &'a EmpiricalFrequency, player: usize) -> IndexMap<&'a Plan, Vec<f64>> {
    let scale = 1.0 / freq.total() as f64;
    let mut out: IndexMap<&Plan, Vec<f64>> = IndexMap::new();
    for (profile, count) in freq.iter() {
        let reach: Vec<Option<Vec<bool>>> = (0..tree.num_players())
            .map(|p| (p != player).then(|| tree.player(p).sequence_reach(profile.plan(p))))
            .collect();
        let x = out.entry(profile.plan(player)).or_insert_with(|| vec![0.0; tree.num_terminals()]);
        for (z, xz) in x.iter_mut().enumerate() {
            let opponents = reach.iter().enumerate().all(|(p, r)| r.as_ref().map_or(true, |r| r[tree.terminal_seq(z, p)]));
            if opponents {
                *xz += count as f64 * scale;
            }
        }
    }
    out
}

fn aggregate(tree: &GameTree, freq: &EmpiricalFrequency, player: usize) -> TriggerWeights {
    let pt = tree.player(player);
    let mut weights: Vec<Vec<f64>> = (0..pt.num_sequences())
        .map(|s| pt.seq_owner(s).map_or(Vec::new(), |(j, _)| vec![0.0; pt.subtree_width(j)]))
        .collect();
    let mut followed = vec![0.0; pt.num_sequences()];
    let mut expected = 0.0;
    let mut marginal = vec![0.0; pt.num_sequences()];
    let mut chain: Vec<(InfosetId, usize)> = Vec::new();
    for (plan, x) in fold_by_own_plan(tree, freq, player) {
        for z in 0..tree.num_terminals() {
            if x[z] == 0.0 {
                continue;
            }
            let c = x[z] * tree.chance_reach(z) * tree.payoff(z, player);
            let last = tree.terminal_seq(z, player);
            marginal[last] += c;
            // Path from the root infoset down to z's last sequence.
            chain.clear();
            let mut seq = last;
            while let Some((j, b)) = pt.seq_owner(seq) {
                chain.push((j, b));
                seq = pt.parent_seq(j);
            }
            chain.reverse();
            let follows = chain.iter().all(|&(j, b)| plan.action(j) == b);
            if follows {
                expected += c;
            }
            let Some(&(k, bz)) = chain.last() else { continue };
            for &(j, b) in &chain {
                // The plan reaches j: every choice above matches the path.
                let sigma = pt.seq(j, plan.action(j));
                weights[sigma][pt.local_index(j, k, bz)] += c;
                if follows {
                    followed[sigma] += c;
                }
                if plan.action(j) != b {
                    break;
                }
            }
        }
    }
    TriggerWeights { weights, followed, expected, marginal }
}

fn argmax<T: Copy>(items: impl Iterator<Item = (f64, T)>) -> Option<(f64, T)> {
    items.fold(None, |best, (v, t)| match best {
        Some((bv, _)) if bv >= v => best,
        _ => Some((v, t)),
    })
}

fn player_deviation(tree: &GameTree, freq: &EmpiricalFrequency, player: usize) -> PlayerDeviation {
    let pt = tree.player(player);
    let agg = aggregate(tree, freq, player);

    let mut trigger_gains = vec![0.0; pt.num_sequences()];
    for (s, gain) in trigger_gains.iter_mut().enumerate().skip(1) {
        let (j, _) = pt.seq_owner(s).unwrap();
        *gain = pt.subtree_best_value(j, &agg.weights[s]) - agg.followed[s];
    }

    let mut infoset_gains = vec![0.0; pt.num_infosets()];
    let mut pooled = Vec::new();
    for (i, gain) in infoset_gains.iter_mut().enumerate() {
        pooled.clear();
        pooled.resize(pt.subtree_width(i), 0.0);
        let mut follow = 0.0;
        for a in 0..pt.num_actions(i) {
            let s = pt.seq(i, a);
            for (p, w) in pooled.iter_mut().zip(&agg.weights[s]) {
                *p += w;
            }
            follow += agg.followed[s];
        }
        *gain = pt.subtree_best_value(i, &pooled) - follow;
    }

    let nfcce = if pt.num_infosets() == 0 {
        0.0
    } else {
        pt.best_plan_value(&agg.marginal) + agg.marginal[0] - agg.expected
    };
    let (efce, efce_trigger) = argmax((1..pt.num_sequences()).map(|s| (trigger_gains[s], s)))
        .map_or((0.0, None), |(v, s)| (v, Some(s)));
    let (efcce, efcce_infoset) = argmax((0..pt.num_infosets()).map(|i| (infoset_gains[i], i)))
        .map_or((0.0, None), |(v, i)| (v, Some(i)));
    PlayerDeviation { efce, efce_trigger, efcce, efcce_infoset, nfcce, trigger_gains, infoset_gains }
}

/// All three gaps for every player.
pub fn deviation_report(freq: &EmpiricalFrequency, tree: &GameTree) -> Result<DeviationReport, EvalError> {
    freq.check(tree)?;
    let players: Vec<PlayerDeviation> = (0..tree.num_players()).map(|p| player_deviation(tree, freq, p)).collect();
    let max = |f: fn(&PlayerDeviation) -> f64| players.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    Ok(DeviationReport { efce: max(|d| d.efce), efcce: max(|d| d.efcce), nfcce: max(|d| d.nfcce), players })
}

/// δ_EFCE(μ̄) per player.
pub fn efce_gap(freq: &EmpiricalFrequency, tree: &GameTree) -> Result<Vec<f64>, EvalError> {
    Ok(deviation_report(freq, tree)?.players.iter().map(|d| d.efce).collect())
}

pub fn efcce_gap(freq: &EmpiricalFrequency, tree: &GameTree) -> Result<Vec<f64>, EvalError> {
    Ok(deviation_report(freq, tree)?.players.iter().map(|d| d.efcce).collect())
}

pub fn nfcce_gap(freq: &EmpiricalFrequency, tree: &GameTree) -> Result<Vec<f64>, EvalError> {
    Ok(deviation_report(freq, tree)?.players.iter().map(|d| d.nfcce).collect())
}

/// Largest violation of gain(I) ≤ Σ_a max(0, gain((I, a))) in a report; ≤ 0
/// when the coarse gaps decompose.
pub fn coarse_decomposition_excess(tree: &GameTree, report: &DeviationReport) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for (p, d) in report.players.iter().enumerate() {
        let pt: &PlayerTree = tree.player(p);
        for i in 0..pt.num_infosets() {
            let bound: f64 = (0..pt.num_actions(i)).map(|a| d.trigger_gains[pt.seq(i, a)].max(0.0)).sum();
            worst = worst.max(d.infoset_gains[i] - bound);
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Welfare {
    pub utilities: Vec<f64>,
    pub sum: f64,
}

/// Expected utilities under μ̄, chance marginalized exactly.
pub fn social_welfare(freq: &EmpiricalFrequency, tree: &GameTree) -> Result<Welfare, EvalError> {
    freq.check(tree)?;
    let np = tree.num_players();
    let mut utilities = vec![0.0; np];
    let scale = 1.0 / freq.total() as f64;
    for (profile, count) in freq.iter() {
        let reach: Vec<Vec<bool>> = (0..np).map(|p| tree.player(p).sequence_reach(profile.plan(p))).collect();
        for z in 0..tree.num_terminals() {
            if (0..np).all(|p| reach[p][tree.terminal_seq(z, p)]) {
                let w = count as f64 * scale * tree.chance_reach(z);
                for (p, u) in utilities.iter_mut().enumerate() {
                    *u += w * tree.payoff(z, p);
                }
            }
        }
    }
    Ok(Welfare { sum: utilities.iter().sum(), utilities })
}
