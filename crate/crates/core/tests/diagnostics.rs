use icfr::diagnostics::{
    check_decomposition, replay_accumulators, replay_discrepancy, replay_trigger_regrets, Diagnostics,
    TriggerAccumulators,
};
use icfr::efg::{GameTree, Plan, PlanProfile};
use icfr::error::QueryError;
use icfr::games::{figure1_with_payoffs, figure3, generate, GameSpec};
use icfr::icfr::{feedback, run, RunRecord};
use icfr::oracle::enumerate_plans;
use proptest::prelude::*;

fn figure3_single() -> (GameTree, Diagnostics, RunRecord) {
    let g = figure3();
    let profile = PlanProfile::new(vec![Plan::from_indices(&[0, 0])]);
    let mut diag = Diagnostics::new(&g);
    diag.observe(&g, &feedback(&g, profile.clone()));
    (g, diag, RunRecord { seed: 0, profiles: vec![profile] })
}

#[test]
fn figure3_single_iteration_regrets() {
    let (g, diag, record) = figure3_single();
    let pt = g.player(0);
    let acc = &diag.players[0];
    let [i, j] = ["I", "J"].map(|n| g.infoset_by_name(0, n).unwrap());
    let (ia, ib, jc, jd) = (pt.seq(i, 0), pt.seq(i, 1), pt.seq(j, 0), pt.seq(j, 1));
    assert_eq!(acc.trigger_regret(pt, ia), Ok(4.0));
    assert_eq!(acc.trigger_regret(pt, jc), Ok(2.0));
    assert_eq!(acc.trigger_regret(pt, ib), Ok(0.0));
    assert_eq!(acc.trigger_regret(pt, jd), Ok(0.0));
    assert_eq!(acc.laminar_regret_action(pt, ia, i, 1), Ok(4.0));
    assert_eq!(acc.laminar_regret(pt, ia, i), Ok(4.0));
    assert_eq!(acc.subtree_regret(pt, ia, i), acc.trigger_regret(pt, ia));
    assert_eq!(replay_trigger_regrets(&g, &record, 0), vec![0.0, 4.0, 0.0, 2.0, 0.0]);
    assert_eq!(diag.max_average_trigger_regret(&g), Some(4.0));
}

#[test]
fn figure3_defined_regrets() {
    let (g, diag, _) = figure3_single();
    let pt = g.player(0);
    let acc = &diag.players[0];
    let [i, j] = ["I", "J"].map(|n| g.infoset_by_name(0, n).unwrap());
    // Both triggers at I reach I and J; triggers at J only reach J.
    for s in [pt.seq(i, 0), pt.seq(i, 1)] {
        assert!(acc.subtree_regret(pt, s, i).is_ok());
        assert!(acc.subtree_regret(pt, s, j).is_ok());
    }
    for s in [pt.seq(j, 0), pt.seq(j, 1)] {
        assert!(acc.subtree_regret(pt, s, j).is_ok());
        assert_eq!(acc.subtree_regret(pt, s, i), Err(QueryError::NotInSubtree { trigger: j, infoset: i }));
        assert!(acc.laminar_regret(pt, s, i).is_err());
    }
    assert!(matches!(acc.trigger_regret(pt, 99), Err(QueryError::UnknownSequence { .. })));
}

#[test]
fn empty_record_is_all_zero() {
    let g = generate(&GameSpec::kuhn(3, 3)).unwrap();
    let diag = Diagnostics::new(&g);
    assert_eq!(diag.max_average_trigger_regret(&g), None);
    for (p, acc) in diag.players.iter().enumerate() {
        assert!(acc.trigger_regrets(g.player(p)).iter().all(|&r| r == 0.0));
        assert!(check_decomposition(g.player(p), acc).is_clean());
    }
}

#[test]
fn decomposition_holds_on_figure3() {
    let g = figure3();
    for seed in 0..50 {
        let mut diag = Diagnostics::new(&g);
        let record = run(&g, 50, seed, |_, fb| diag.observe(&g, fb));
        let report = check_decomposition(g.player(0), &diag.players[0]);
        assert!(report.is_clean(), "seed {seed}: {:?}", report.violations);
        assert!(report.max_equality_residual <= 1e-9);
        assert!(replay_discrepancy(&g, &record, &diag) <= 1e-9);
    }
}

#[test]
fn decomposition_holds_on_kuhn_at_scale() {
    let g = generate(&GameSpec::kuhn(3, 3)).unwrap();
    let mut diag = Diagnostics::new(&g);
    run(&g, 1000, 21, |_, fb| diag.observe(&g, fb));
    for (p, acc) in diag.players.iter().enumerate() {
        assert!(check_decomposition(g.player(p), acc).is_clean());
    }
}

/// The recursion over pure plans attains the best deviation found by
/// enumerating every plan that reaches the trigger infoset.
#[test]
fn best_response_matches_enumeration() {
    let payoffs: Vec<Vec<f64>> = (0..8).map(|k| vec![(k * 7 % 5) as f64 - 2.0, (k * 3 % 4) as f64]).collect();
    let g = figure1_with_payoffs(&payoffs);
    let mut diag = Diagnostics::new(&g);
    let record = run(&g, 40, 3, |_, fb| diag.observe(&g, fb));
    for p in 0..2 {
        let pt = g.player(p);
        let plans = enumerate_plans(&g, p).unwrap();
        let fbs: Vec<_> = record.profiles.iter().map(|pr| feedback(&g, pr.clone())).collect();
        for s in 1..pt.num_sequences() {
            let (j, a) = pt.seq_owner(s).unwrap();
            let triggered: Vec<_> = record
                .profiles
                .iter()
                .zip(&fbs)
                .filter(|(pr, _)| pt.reaches_sequence(pr.plan(p), s))
                .collect();
            if triggered.is_empty() {
                continue;
            }
            let followed: f64 = triggered.iter().map(|(_, fb)| fb.values[p].infoset[j]).sum();
            let best = plans
                .iter()
                .filter(|hat| pt.reaches_infoset(*hat, j))
                .map(|hat| {
                    triggered
                        .iter()
                        .map(|(_, fb)| icfr::icfr::counterfactual_values(pt, hat, &fb.utilities[p]).infoset[j])
                        .sum::<f64>()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let r = diag.players[p].trigger_regret(pt, s).unwrap();
            assert!((r - (best - followed)).abs() <= 1e-9, "player {p} seq ({j},{a})");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn accumulators_are_additive(seed in any::<u64>(), split in 1u64..59) {
        let g = generate(&GameSpec::kuhn(2, 3)).unwrap();
        let record = run(&g, 60, seed, |_, _| {});
        let whole = replay_accumulators(&g, &record);
        let head = RunRecord { seed, profiles: record.profiles[..split as usize].to_vec() };
        let tail = RunRecord { seed, profiles: record.profiles[split as usize..].to_vec() };
        let mut merged = replay_accumulators(&g, &head);
        let rest = replay_accumulators(&g, &tail);
        for (a, b) in merged.players.iter_mut().zip(&rest.players) {
            a.merge(b);
        }
        for p in 0..2 {
            let pt = g.player(p);
            let x: &TriggerAccumulators = &whole.players[p];
            let y = &merged.players[p];
            prop_assert_eq!(x.iterations(), y.iterations());
            for s in 0..pt.num_sequences() {
                prop_assert_eq!(x.count(s), y.count(s));
                prop_assert!(x.count(s) <= x.iterations());
            }
            for (r1, r2) in x.trigger_regrets(pt).iter().zip(y.trigger_regrets(pt)) {
                prop_assert!((r1 - r2).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn decomposition_holds_on_random_records(seed in any::<u64>(), t in 1u64..80) {
        let g = generate(&GameSpec::kuhn(2, 3)).unwrap();
        let mut diag = Diagnostics::new(&g);
        let record = run(&g, t, seed, |_, fb| diag.observe(&g, fb));
        for p in 0..2 {
            let report = check_decomposition(g.player(p), &diag.players[p]);
            prop_assert!(report.is_clean(), "{:?}", report.violations);
        }
        prop_assert!(replay_discrepancy(&g, &record, &diag) <= 1e-9);
    }
}
