use icfr::efg::{GameTree, PartialPlan, Plan, PlanProfile};
use icfr::error::QueryError;
use icfr::games::{figure1, figure3, figure3_with_payoffs, generate, matrix_game, GameSpec};
use icfr::icfr::{
    blocking_sequence_at, counterfactual_values, feedback, iteration_rng, observe_utilities, run, Icfr,
    IcfrPlayerState, Source,
};
use proptest::prelude::*;

fn plan(tree: &GameTree, player: usize, choices: &[(&str, &str)]) -> Plan {
    let pt = tree.player(player);
    let mut actions = vec![0usize; pt.num_infosets()];
    for (name, label) in choices {
        let i = tree.infoset_by_name(player, name).unwrap();
        actions[i] = tree.action_by_label(player, i, label).unwrap();
    }
    Plan::from_indices(&actions)
}

#[test]
fn figure3_counterfactual_values() {
    let g = figure3();
    let pt = g.player(0);
    let pi = plan(&g, 0, &[("I", "a"), ("J", "c")]);
    let profile = PlanProfile::new(vec![pi.clone()]);
    let table = observe_utilities(&g, &profile, 0);
    let v = counterfactual_values(pt, &pi, &table);
    let [i, j] = ["I", "J"].map(|n| g.infoset_by_name(0, n).unwrap());
    assert_eq!(v.infoset[j], 1.0);
    assert_eq!(v.infoset[i], 1.0);
    assert_eq!(v.actions_at(pt, i), &[1.0, 5.0]);
    assert_eq!(v.actions_at(pt, j), &[1.0, 3.0]);
    for k in 0..pt.num_infosets() {
        assert_eq!(v.actions_at(pt, k)[pi.action(k)], v.infoset[k]);
    }
}

#[test]
fn figure3_immediate_utilities() {
    let g = figure3_with_payoffs([0.0, 1.0, 0.0]);
    let pt = g.player(0);
    let table = observe_utilities(&g, &PlanProfile::new(vec![Plan::from_indices(&[0, 0])]), 0);
    let [i, j] = ["I", "J"].map(|n| g.infoset_by_name(0, n).unwrap());
    assert_eq!(table.get(pt, j, 0), 1.0);
    assert_eq!(table.get(pt, j, 1), 0.0);
    assert_eq!(table.get(pt, i, 1), 0.0);
}

#[test]
fn utilities_vanish_when_opponent_avoids_the_branch() {
    // Player 1 moves first and can end the game before player 0 acts.
    let mut b = icfr::efg::GameBuilder::new(2);
    let root = b.decision(1, "P", ["stop", "go"]);
    let stop = b.terminal(vec![7.0, 0.0]);
    let x = b.decision(0, "X", ["l", "r"]);
    b.attach(root, stop);
    b.attach(root, x);
    for v in [1.0, 2.0] {
        let z = b.terminal(vec![v, 0.0]);
        b.attach(x, z);
    }
    let g = b.build(root).unwrap();
    let profile = PlanProfile::new(vec![Plan::from_indices(&[0]), Plan::from_indices(&[0])]);
    let table = observe_utilities(&g, &profile, 0);
    assert_eq!(table.get(g.player(0), 0, 0), 0.0);
    assert_eq!(table.get(g.player(0), 0, 1), 0.0);
    assert_eq!(table.values[0], 7.0);
}

#[test]
fn blocking_sequences_follow_the_deviation_point() {
    let g = figure3();
    let pt = g.player(0);
    let [i, j] = ["I", "J"].map(|n| g.infoset_by_name(0, n).unwrap());
    let mut partial = PartialPlan::new(2);
    partial.set(i, 1);
    assert_eq!(blocking_sequence_at(pt, j, &partial), Ok(pt.seq(i, 1)));
    partial.set(i, 0);
    assert_eq!(blocking_sequence_at(pt, j, &partial), Err(QueryError::StillReachable { infoset: j }));

    let g = figure1();
    let pt = g.player(0);
    let [a, b] = ["A", "B"].map(|n| g.infoset_by_name(0, n).unwrap());
    let pi = plan(&g, 0, &[("A", "b")]);
    assert_eq!(blocking_sequence_at(pt, b, &pi), Ok(pt.seq(a, 1)));
}

#[test]
fn blocking_sequence_is_the_deepest_deviation() {
    // Chain A -a-> B -c-> C; with A↦a and B↦d, C is blocked at (B, d).
    let mut bld = icfr::efg::GameBuilder::new(1);
    let a = bld.decision(0, "A", ["a", "b"]);
    let b = bld.decision(0, "B", ["c", "d"]);
    let c = bld.decision(0, "C", ["e", "f"]);
    bld.attach(a, b);
    let z = bld.terminal(vec![0.0]);
    bld.attach(a, z);
    bld.attach(b, c);
    let z = bld.terminal(vec![0.0]);
    bld.attach(b, z);
    for _ in 0..2 {
        let z = bld.terminal(vec![0.0]);
        bld.attach(c, z);
    }
    let g = bld.build(a).unwrap();
    let pt = g.player(0);
    let [ia, ib, ic] = ["A", "B", "C"].map(|n| g.infoset_by_name(0, n).unwrap());
    let pi = plan(&g, 0, &[("A", "a"), ("B", "d")]);
    assert_eq!(blocking_sequence_at(pt, ic, &pi), Ok(pt.seq(ib, 1)));
    assert!(pt.blocking_sequences(ic).contains(&pt.seq(ib, 1)));
    assert!(pt.blocking_sequences(ic).contains(&pt.seq(ia, 1)));
}

#[test]
fn figure3_update_routing() {
    let g = figure3();
    let pt = g.player(0);
    let [i, j] = ["I", "J"].map(|n| g.infoset_by_name(0, n).unwrap());
    for (choice, expect_j) in [("a", Source::Internal), ("b", Source::External(0))] {
        let mut state = IcfrPlayerState::new(pt, 0);
        let pi = plan(&g, 0, &[("I", choice), ("J", "c")]);
        let fb = feedback(&g, PlanProfile::new(vec![pi.clone()]));
        let sources = state.update_internal(pt, &pi, &fb.values[0]);
        assert_eq!(sources[i], Source::Internal);
        assert_eq!(sources[j], expect_j);
        if choice == "a" {
            assert!(state.external(j, 0).is_none());
        } else {
            assert!(state.external(j, 0).is_some());
            assert_eq!(state.internal(j), IcfrPlayerState::new(pt, 0).internal(j));
        }
    }
}

#[test]
fn sampling_routes_to_the_matching_minimizer() {
    let g = figure3();
    let pt = g.player(0);
    let j = g.infoset_by_name(0, "J").unwrap();
    let mut state = IcfrPlayerState::new(pt, 0);
    for t in 0..50 {
        let (pi, sources) = state.sample_internal(pt, &mut iteration_rng(9, 0, t));
        let expect = if pi.action(0) == 0 { Source::Internal } else { Source::External(0) };
        assert_eq!(sources[j], expect);
        let fb = feedback(&g, PlanProfile::new(vec![pi.clone()]));
        assert_eq!(state.update_internal(pt, &pi, &fb.values[0]), sources);
    }
    assert_eq!(state.registry_len(), 3);
}

#[test]
fn single_infoset_game_samples_one_action() {
    let g = matrix_game(&[vec![vec![1.0, 0.0]], vec![vec![0.0, 1.0]]]);
    let record = run(&g, 20, 4, |_, _| {});
    assert_eq!(record.profiles.len(), 20);
    assert!(record.profiles.iter().all(|p| p.plan(0).len() == 1 && p.plan(1).len() == 1));
}

#[test]
fn runs_are_deterministic() {
    let g = generate(&GameSpec::kuhn(3, 3)).unwrap();
    let a = run(&g, 100, 42, |_, _| {});
    let b = run(&g, 100, 42, |_, _| {});
    assert_eq!(a, b);
    assert_eq!(run(&g, 1, 42, |_, _| {}).profiles.len(), 1);
    assert_ne!(a, run(&g, 100, 43, |_, _| {}));
}

#[test]
fn resumed_state_continues_the_run() {
    let g = generate(&GameSpec::kuhn(3, 3)).unwrap();
    let full = run(&g, 60, 5, |_, _| {});
    let mut icfr = Icfr::new(&g, 5);
    for _ in 0..25 {
        icfr.step(&g);
    }
    let snapshot = serde_json::to_string(&icfr).unwrap();
    let mut resumed: Icfr = serde_json::from_str(&snapshot).unwrap();
    let tail: Vec<PlanProfile> = (0..35).map(|_| resumed.step(&g).profile).collect();
    assert_eq!(&full.profiles[25..], &tail[..]);
}

#[test]
fn every_infoset_has_one_active_minimizer() {
    let g = generate(&GameSpec::kuhn(3, 3)).unwrap();
    let mut icfr = Icfr::new(&g, 11);
    for _ in 0..200 {
        let fb = icfr.step(&g);
        for p in 0..3 {
            let pt = g.player(p);
            let pi = fb.profile.plan(p);
            let live = pt.sequence_reach(pi);
            for i in 0..pt.num_infosets() {
                let blocking = pt.blocking_sequences(i).iter().filter(|&&s| live[s]).count();
                assert_eq!(blocking + live[pt.parent_seq(i)] as usize, 1);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// û_I(a) equals the terminal sum over Z(I, a) of the plan's reach below (I, a).
    #[test]
    fn counterfactual_values_match_terminal_sums(seed in any::<u64>()) {
        let g = generate(&GameSpec::kuhn(3, 3)).unwrap();
        let mut rng = iteration_rng(seed, 0, 0);
        let profile = PlanProfile::new(g.players().iter().map(|p| icfr::diagnostics::random_plan(p, &mut rng)).collect());
        for player in 0..3 {
            let pt = g.player(player);
            let pi = profile.plan(player);
            let v = counterfactual_values(pt, pi, &observe_utilities(&g, &profile, player));
            for i in 0..pt.num_infosets() {
                for a in 0..pt.num_actions(i) {
                    let mut forced = pi.actions().to_vec();
                    forced[i] = a as u16;
                    let forced = Plan::new(forced);
                    let direct: f64 = g.terminals_below_action(player, i, a).into_iter()
                        .filter(|&z| g.reach_from(player, &forced, i, z) && g.opponents_reach_terminal(&profile, player, z))
                        .map(|z| g.chance_reach(z) * g.payoff(z, player))
                        .sum();
                    prop_assert!((v.action[pt.seq(i, a)] - direct).abs() <= 1e-12);
                }
            }
        }
    }
}
