use serde::{Deserialize, Serialize};

/// Regret matching over `n` actions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExternalRM {
    regrets: Vec<f64>,
}

impl ExternalRM {
    pub fn new(num_actions: usize) -> Self {
        assert!(num_actions >= 1, "a regret minimizer needs at least one action");
        ExternalRM { regrets: vec![0.0; num_actions] }
    }

    pub fn num_actions(&self) -> usize {
        self.regrets.len()
    }

    /// Cumulative regret R[a].
    pub fn regrets(&self) -> &[f64] {
        &self.regrets
    }

    /// Positive parts of R, normalized; uniform if no entry is positive.
    pub fn recommend(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.regrets.len()];
        self.recommend_into(&mut out);
        out
    }

    pub fn recommend_into(&self, out: &mut [f64]) {
        let total: f64 = self.regrets.iter().map(|r| r.max(0.0)).sum();
        if total > 0.0 {
            for (o, r) in out.iter_mut().zip(&self.regrets) {
                *o = r.max(0.0) / total;
            }
        } else {
            out.fill(1.0 / self.regrets.len() as f64);
        }
    }

    /// R[a] += weight · (u[a] − u[chosen]). A zero weight leaves the state untouched.
    pub fn observe(&mut self, u: &[f64], chosen: usize, weight: f64) {
        debug_assert_eq!(u.len(), self.regrets.len());
        if weight == 0.0 {
            return;
        }
        let base = u[chosen];
        for (r, &v) in self.regrets.iter_mut().zip(u) {
            *r += weight * (v - base);
        }
    }

    /// R[a] += weight · (u[a] − baseline), for feedback against a mixed play.
    pub fn observe_against(&mut self, u: &[f64], baseline: f64, weight: f64) {
        debug_assert_eq!(u.len(), self.regrets.len());
        if weight == 0.0 {
            return;
        }
        for (r, &v) in self.regrets.iter_mut().zip(u) {
            *r += weight * (v - baseline);
        }
    }
}
