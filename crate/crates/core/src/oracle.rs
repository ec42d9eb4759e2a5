//! Brute-force ground truth for tiny games.
//!
//! Everything here enumerates normal-form plans and evaluates the trigger-agent
//! definition term by term. It is meant for tests and certificates, never for
//! the learning loop.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{check_rho_identity, replay_accumulators};
use crate::efg::{GameTree, Plan, SeqId};
use crate::equilibrium::{deviation_report, EmpiricalFrequency, EvalError};
use crate::icfr::RunRecord;

/// Largest plan space the oracle agrees to enumerate.
pub const PLAN_LIMIT: u128 = 1_000_000;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("player {} has {count} plans, more than the limit of {PLAN_LIMIT}", player + 1)]
    TooManyPlans { player: usize, count: u128 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// All plans of `player`, lexicographic with infoset 0 most significant.
pub fn enumerate_plans(tree: &GameTree, player: usize) -> Result<Vec<Plan>, OracleError> {
    let pt = tree.player(player);
    let count = pt.num_plans();
    if count > PLAN_LIMIT {
        return Err(OracleError::TooManyPlans { player, count });
    }
    let n = pt.num_infosets();
    let mut out = Vec::with_capacity(count as usize);
    let mut digits = vec![0usize; n];
    loop {
        out.push(Plan::from_indices(&digits));
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < pt.num_actions(k) {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// Enumeration-based evaluation of the deviation gap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleGap {
    /// δ(μ̄) = max over players.
    pub delta: f64,
    /// max_σ max_{π̂ ∈ Π(I)} gain per player; 0 for a player without infosets.
    pub players: Vec<f64>,
    /// Gain per player and sequence id (entry 0 unused).
    pub trigger_gains: Vec<Vec<f64>>,
    /// Largest gap between the simulated trigger agent's terminal
    /// distribution and the closed forms: p(z) on Z(I, a), y(z) = p(z) + q(z)
    /// on Z^c(I, a).
    pub max_y_residual: f64,
    /// max |slack of the simulated agent − slack of the reduced inequality|.
    pub max_reduction_residual: f64,
}

/// δ(μ̄) from the trigger-agent definition by enumerating every pure deviation.
pub fn gap_by_enumeration(freq: &EmpiricalFrequency, tree: &GameTree) -> Result<OracleGap, OracleError> {
    if freq.is_empty() {
        return Err(EvalError::Empty.into());
    }
    let total = freq.total() as f64;
    let support: Vec<(&crate::efg::PlanProfile, f64)> = freq.iter().map(|(p, c)| (p, c as f64 / total)).collect();
    let nz = tree.num_terminals();

    // (Σ_{π ∈ Π(z)} μ(π)) p_c(z).
    let q: Vec<f64> = (0..nz)
        .map(|z| {
            let mass: f64 = support
                .iter()
                .filter(|(pr, _)| (0..tree.num_players()).all(|p| tree.plan_reaches_terminal(p, pr.plan(p), z)))
                .map(|(_, m)| m)
                .sum();
            mass * tree.chance_reach(z)
        })
        .collect();

    let mut players = Vec::new();
    let mut trigger_gains = Vec::new();
    let mut max_y: f64 = 0.0;
    let mut max_red: f64 = 0.0;
    for i in 0..tree.num_players() {
        let pt = tree.player(i);
        let plans = enumerate_plans(tree, i)?;
        let u = |z: usize| tree.payoff(z, i);
        let baseline: f64 = (0..nz).map(|z| q[z] * u(z)).sum();
        let mut gains = vec![0.0; pt.num_sequences()];
        for (sigma, gain) in gains.iter_mut().enumerate().skip(1) {
            let (j, a) = pt.seq_owner(sigma).unwrap();
            let below = tree.terminals_below(i, j);
            let below_a = tree.terminals_below_action(i, j, a);
            // Σ_{π_i ∈ Π_i(σ), π_{-i} ∈ Π_{-i}(z)} μ(π) for each z ∈ Z(I).
            let mass: Vec<f64> = below
                .iter()
                .map(|&z| {
                    support
                        .iter()
                        .filter(|(pr, _)| {
                            pt.reaches_sequence(pr.plan(i), sigma) && tree.opponents_reach_terminal(pr, i, z)
                        })
                        .map(|(_, m)| m)
                        .sum()
                })
                .collect();
            let follow: f64 = below_a.iter().map(|&z| q[z] * u(z)).sum();
            let outside: f64 = (0..nz).filter(|z| below.binary_search(z).is_err()).map(|z| q[z] * u(z)).sum();
            let subtree = pt.descendants(j);
            let mut best = f64::NEG_INFINITY;
            for hat in plans.iter().filter(|p| pt.reaches_infoset(*p, j)) {
                // Play the trigger agent directly: follow π_i unless σ is
                // recommended, in which case switch to π̂ from I downward.
                let mut simulated = vec![0.0; below.len()];
                for (pr, m) in &support {
                    let own = pr.plan(i);
                    let played = if pt.reaches_sequence(own, sigma) {
                        let mut acts = own.actions().to_vec();
                        for &k in subtree {
                            acts[k] = hat.actions()[k];
                        }
                        Plan::new(acts)
                    } else {
                        own.clone()
                    };
                    for (k, &z) in below.iter().enumerate() {
                        if tree.plan_reaches_terminal(i, &played, z) && tree.opponents_reach_terminal(pr, i, z) {
                            simulated[k] += m * tree.chance_reach(z);
                        }
                    }
                }
                let mut deviate = 0.0;
                let mut agent = outside;
                for (k, &z) in below.iter().enumerate() {
                    let reach_hat = tree.plan_reaches_terminal(i, hat, z) as u8 as f64;
                    let p = mass[k] * reach_hat * tree.chance_reach(z);
                    deviate += p * u(z);
                    let formula = if below_a.binary_search(&z).is_ok() { p } else { p + q[z] };
                    max_y = max_y.max((simulated[k] - formula).abs());
                    agent += simulated[k] * u(z);
                }
                let full_slack = baseline - agent;
                let reduced_slack = follow - deviate;
                max_red = max_red.max((full_slack - reduced_slack).abs());
                best = best.max(deviate - follow);
            }
            *gain = best;
        }
        players.push(if pt.num_infosets() == 0 {
            0.0
        } else {
            gains[1..].iter().copied().fold(f64::NEG_INFINITY, f64::max)
        });
        trigger_gains.push(gains);
    }
    let delta = players.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(OracleGap { delta, players, trigger_gains, max_y_residual: max_y, max_reduction_residual: max_red })
}

/// Numerical certificate for one run record on a tiny game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub iterations: u64,
    /// |δ_oracle(μ̄^T) − max_{i,σ} R^T_σ / T|.
    pub identity_residual: f64,
    /// |δ_oracle − δ_main|.
    pub oracle_vs_main: f64,
    /// Largest ρ-identity residual over the sampled plan pairs.
    pub rho_residual: f64,
    pub y_residual: f64,
    pub reduction_residual: f64,
    pub failures: Vec<String>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub const CERTIFICATE_TOLERANCE: f64 = 1e-9;

/// Checks the regret/deviation identity, the ρ identity on `samples` random
/// plan pairs and the three-case reduction for one record.
pub fn certify(
    record: &RunRecord,
    tree: &GameTree,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<Certificate, OracleError> {
    let freq = EmpiricalFrequency::from_profiles(&record.profiles);
    let oracle = gap_by_enumeration(&freq, tree)?;
    let main = deviation_report(&freq, tree)?;
    let diag = replay_accumulators(tree, record);
    let regret = diag.max_average_trigger_regret(tree).unwrap_or(0.0);
    let mut cert = Certificate {
        iterations: freq.total(),
        identity_residual: (oracle.delta - regret).abs(),
        oracle_vs_main: (oracle.delta - main.efce).abs(),
        rho_residual: check_rho_identity(tree, samples, rng),
        y_residual: oracle.max_y_residual,
        reduction_residual: oracle.max_reduction_residual,
        failures: Vec::new(),
    };
    let checks = [
        ("regret identity", cert.identity_residual),
        ("oracle vs main path", cert.oracle_vs_main),
        ("rho identity", cert.rho_residual),
        ("y = p + q", cert.y_residual),
        ("three-case reduction", cert.reduction_residual),
    ];
    for (name, r) in checks {
        if !(r <= CERTIFICATE_TOLERANCE) {
            cert.failures.push(format!("{name}: residual {r:e}"));
        }
    }
    Ok(cert)
}

/// Π_i(σ) as indices into [`enumerate_plans`].
pub fn plans_in_sequence(tree: &GameTree, player: usize, seq: SeqId) -> Result<Vec<usize>, OracleError> {
    let pt = tree.player(player);
    Ok(enumerate_plans(tree, player)?
        .iter()
        .enumerate()
        .filter(|(_, p)| pt.reaches_sequence(*p, seq))
        .map(|(k, _)| k)
        .collect())
}
