use serde::{Deserialize, Serialize};

use super::external::ExternalRM;
use super::stationary::{stationary_distribution, StationaryError};

/// No-internal-regret minimizer built from one regret-matching expert per
/// action (swap-regret reduction).
///
/// The recommendation q is the fixed point of the matrix whose column x is
/// expert x's recommendation p_x. On feedback u with weight w, expert x
/// observes the utility scaled by q[x] against its own expected play:
/// R_x[a] += w·q[x]·(u[a] − ⟨p_x, u⟩).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InternalRM {
    experts: Vec<ExternalRM>,
    #[serde(skip)]
    cache: Option<Vec<f64>>,
}

impl PartialEq for InternalRM {
    fn eq(&self, other: &Self) -> bool {
        self.experts == other.experts
    }
}

impl InternalRM {
    pub fn new(num_actions: usize) -> Self {
        InternalRM { experts: (0..num_actions).map(|_| ExternalRM::new(num_actions)).collect(), cache: None }
    }

    pub fn num_actions(&self) -> usize {
        self.experts.len()
    }

    pub fn experts(&self) -> &[ExternalRM] {
        &self.experts
    }

    /// Column x is expert x's recommendation.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.experts.iter().map(ExternalRM::recommend).collect()
    }

    /// The stationary distribution of [`matrix`](Self::matrix).
    ///
    /// If the solver cannot certify a fixed point the closest iterate is used;
    /// [`try_recommend`](Self::try_recommend) exposes the failure instead.
    pub fn recommend(&mut self) -> &[f64] {
        if self.cache.is_none() {
            let q = match self.try_recommend() {
                Ok(q) => q,
                Err(StationaryError::NoConvergence { approximate, .. }) => approximate,
                Err(e) => unreachable!("expert recommendations are distributions: {e}"),
            };
            self.cache = Some(q);
        }
        self.cache.as_deref().unwrap()
    }

    pub fn try_recommend(&self) -> Result<Vec<f64>, StationaryError> {
        if self.experts.len() == 1 {
            return Ok(vec![1.0]);
        }
        stationary_distribution(&self.matrix())
    }

    /// Forwards weighted feedback to every expert. `chosen` is the action
    /// actually played; the update only depends on it through q.
    pub fn observe(&mut self, u: &[f64], _chosen: usize, weight: f64) {
        if weight == 0.0 || self.experts.len() == 1 {
            return;
        }
        let q = self.recommend().to_vec();
        for (x, expert) in self.experts.iter_mut().enumerate() {
            if q[x] == 0.0 {
                continue;
            }
            let p = expert.recommend();
            let baseline: f64 = p.iter().zip(u).map(|(a, b)| a * b).sum();
            expert.observe_against(u, baseline, weight * q[x]);
        }
        self.cache = None;
    }
}
