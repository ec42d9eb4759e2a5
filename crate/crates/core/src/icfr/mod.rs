//! ICFR: every player runs one internal-regret minimizer per infoset and one
//! external-regret minimizer per blocking sequence, samples a pure plan top
//! down, and feeds back counterfactual utilities computed from the realized
//! profile.

mod state;
mod utility;

use serde::{Deserialize, Serialize};

use crate::efg::{GameTree, PlanProfile};

pub use state::{blocking_sequence_at, iteration_rng, IcfrPlayerState, Source};
pub use utility::{
    counterfactual_values, observe_all_utilities, observe_utilities, CounterfactualValues, ImmediateUtilityTable,
};

/// Everything a player learns at one iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationFeedback {
    pub profile: PlanProfile,
    pub utilities: Vec<ImmediateUtilityTable>,
    pub values: Vec<CounterfactualValues>,
}

/// Immediate utilities and counterfactual values of every player under `profile`.
pub fn feedback(tree: &GameTree, profile: PlanProfile) -> IterationFeedback {
    let utilities = observe_all_utilities(tree, &profile);
    let values = (0..tree.num_players())
        .map(|p| counterfactual_values(tree.player(p), profile.plan(p), &utilities[p]))
        .collect();
    IterationFeedback { profile, utilities, values }
}

/// Joint state of the dynamics; serializable for resumption.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Icfr {
    pub seed: u64,
    pub iteration: u64,
    pub players: Vec<IcfrPlayerState>,
}

impl Icfr {
    pub fn new(tree: &GameTree, seed: u64) -> Self {
        let players = (0..tree.num_players()).map(|p| IcfrPlayerState::new(tree.player(p), p)).collect();
        Icfr { seed, iteration: 0, players }
    }

    /// One iteration: all players sample from their time-t state, then all
    /// players update. Returns the feedback of the iteration.
    pub fn step(&mut self, tree: &GameTree) -> IterationFeedback {
        let t = self.iteration;
        let plans = self
            .players
            .iter_mut()
            .enumerate()
            .map(|(p, state)| {
                let mut rng = iteration_rng(self.seed, p, t);
                state.sample_internal(tree.player(p), &mut rng).0
            })
            .collect();
        let fb = feedback(tree, PlanProfile::new(plans));
        for (p, state) in self.players.iter_mut().enumerate() {
            state.update_internal(tree.player(p), fb.profile.plan(p), &fb.values[p]);
        }
        self.iteration += 1;
        fb
    }
}

/// Sequence of realized profiles.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub profiles: Vec<PlanProfile>,
}

/// Runs `iterations` steps from a fresh state; `hook(t, feedback)` is called
/// after iteration t (1-based).
pub fn run(
    tree: &GameTree,
    iterations: u64,
    seed: u64,
    mut hook: impl FnMut(u64, &IterationFeedback),
) -> RunRecord {
    let mut icfr = Icfr::new(tree, seed);
    let mut record = RunRecord { seed, profiles: Vec::with_capacity(iterations as usize) };
    for t in 1..=iterations {
        let fb = icfr.step(tree);
        hook(t, &fb);
        record.profiles.push(fb.profile);
    }
    record
}
