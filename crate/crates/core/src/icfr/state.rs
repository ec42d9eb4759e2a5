use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::utility::CounterfactualValues;
use crate::efg::{InfosetId, PartialPlan, Plan, PlanView, PlayerTree, SeqId};
use crate::error::QueryError;
use crate::regret::{sample_index, ExternalRM, InternalRM};

/// Which minimizer produced the action at an infoset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    Internal,
    /// Index into Σ^c(I).
    External(usize),
}

/// σ_I for a partial plan that can no longer reach I: the choice at the
/// deepest ancestor that the plan still reaches. It belongs to Σ^c(I).
pub fn blocking_sequence_at(tree: &PlayerTree, infoset: InfosetId, plan: &impl PlanView) -> Result<SeqId, QueryError> {
    if tree.reaches_infoset(plan, infoset) {
        return Err(QueryError::StillReachable { infoset });
    }
    let mut cur = infoset;
    while let Some((j, _)) = tree.infoset(cur).parent {
        if tree.reaches_infoset(plan, j) {
            // `cur` is unreachable while `j` is not, so the plan is assigned
            // at `j` and leaves the path there.
            let b = plan.choice(j).expect("a blocking ancestor is assigned");
            return Ok(tree.seq(j, b));
        }
        cur = j;
    }
    unreachable!("root infosets are always reachable")
}

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// RNG for one player at one iteration; streams never depend on earlier
/// draws, so a resumed run continues exactly where it stopped.
pub fn iteration_rng(seed: u64, player: usize, iteration: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(mix(mix(seed) ^ player as u64) ^ iteration))
}

/// Minimizers of one player: R^int_I per infoset and R^ext_{σ,I} per
/// σ ∈ Σ^c(I). External minimizers are allocated on their first update;
/// until then they recommend the uniform distribution, as fresh ones do.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IcfrPlayerState {
    pub player: usize,
    pub iteration: u64,
    internal: Vec<InternalRM>,
    external: Vec<Vec<Option<ExternalRM>>>,
}

impl IcfrPlayerState {
    pub fn new(tree: &PlayerTree, player: usize) -> Self {
        let internal = tree.infosets().iter().map(|i| InternalRM::new(i.num_actions())).collect();
        let external = tree.infosets().iter().map(|i| vec![None; i.blocking.len()]).collect();
        IcfrPlayerState { player, iteration: 0, internal, external }
    }

    pub fn internal(&self, infoset: InfosetId) -> &InternalRM {
        &self.internal[infoset]
    }

    /// R^ext_{σ,I} for the k-th σ of Σ^c(I), if it has been touched.
    pub fn external(&self, infoset: InfosetId, k: usize) -> Option<&ExternalRM> {
        self.external[infoset][k].as_ref()
    }

    /// Number of external minimizers allocated so far.
    pub fn allocated_external(&self) -> usize {
        self.external.iter().flatten().filter(|e| e.is_some()).count()
    }

    /// Registry size: |I| internal plus Σ_I |Σ^c(I)| external minimizers.
    pub fn registry_len(&self) -> usize {
        self.internal.len() + self.external.iter().map(Vec::len).sum::<usize>()
    }

    /// Top-down sampling: the internal minimizer where the plan can still
    /// reach I, otherwise the external minimizer of σ_I.
    pub fn sample_internal(&mut self, tree: &PlayerTree, rng: &mut impl Rng) -> (Plan, Vec<Source>) {
        let n = tree.num_infosets();
        let mut partial = PartialPlan::new(n);
        let mut live = vec![false; tree.num_sequences()];
        live[0] = true;
        let mut sources = Vec::with_capacity(n);
        let mut uniform = Vec::new();
        for i in 0..n {
            let u: f64 = rng.gen();
            let (a, source) = if live[tree.parent_seq(i)] {
                (sample_index(self.internal[i].recommend(), u), Source::Internal)
            } else {
                let sigma = blocking_sequence_at(tree, i, &partial).expect("infoset is unreachable");
                let k = tree.blocking_sequences(i).binary_search(&sigma).expect("σ_I lies in Σ^c(I)");
                let a = match &self.external[i][k] {
                    Some(rm) => sample_index(&rm.recommend(), u),
                    None => {
                        uniform.clear();
                        uniform.resize(tree.num_actions(i), 1.0 / tree.num_actions(i) as f64);
                        sample_index(&uniform, u)
                    }
                };
                (a, Source::External(k))
            };
            partial.set(i, a);
            if live[tree.parent_seq(i)] {
                live[tree.seq(i, a)] = true;
            }
            sources.push(source);
        }
        (partial.into_plan().expect("every infoset sampled"), sources)
    }

    /// Feeds every minimizer its indicator-weighted counterfactual utility:
    /// R^int_I gets weight 1[π ∈ Π(σ(I))], R^ext_{σ,I} gets 1[π ∈ Π(σ)].
    /// Returns, per infoset, the minimizer that received the feedback.
    pub fn update_internal(&mut self, tree: &PlayerTree, plan: &Plan, values: &CounterfactualValues) -> Vec<Source> {
        let live = tree.sequence_reach(plan);
        let mut updated = Vec::with_capacity(tree.num_infosets());
        for i in 0..tree.num_infosets() {
            let u = values.actions_at(tree, i);
            let chosen = plan.action(i);
            let mut hit = None;
            if live[tree.parent_seq(i)] {
                self.internal[i].observe(u, chosen, 1.0);
                hit = Some(Source::Internal);
            }
            for (k, &sigma) in tree.blocking_sequences(i).iter().enumerate() {
                if live[sigma] {
                    debug_assert!(hit.is_none(), "two minimizers active at infoset {i}");
                    let rm = self.external[i][k].get_or_insert_with(|| ExternalRM::new(tree.num_actions(i)));
                    rm.observe(u, chosen, 1.0);
                    hit = Some(Source::External(k));
                }
            }
            updated.push(hit.expect("exactly one minimizer is active at every infoset"));
        }
        self.iteration += 1;
        updated
    }
}
