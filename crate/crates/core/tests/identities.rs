//! Cross-path identities: accumulated regrets, replayed regrets, the
//! distribution-based gaps and the enumeration oracle must agree.

use icfr::diagnostics::{check_decomposition, replay_accumulators, replay_discrepancy, Diagnostics};
use icfr::efg::GameTree;
use icfr::equilibrium::{coarse_decomposition_excess, deviation_report, EmpiricalFrequency};
use icfr::games::{figure3, generate, GameSpec};
use icfr::icfr::run;
use icfr::oracle::{certify, gap_by_enumeration};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn k33() -> GameTree {
    generate(&GameSpec::kuhn(3, 3)).unwrap()
}

fn run_with_diagnostics(tree: &GameTree, t: u64, seed: u64) -> (icfr::icfr::RunRecord, Diagnostics) {
    let mut diag = Diagnostics::new(tree);
    let record = run(tree, t, seed, |_, fb| diag.observe(tree, fb));
    (record, diag)
}

#[test]
fn regret_equals_gap_on_kuhn() {
    let tree = k33();
    for seed in [1, 2] {
        let (record, diag) = run_with_diagnostics(&tree, 300, seed);
        let freq = EmpiricalFrequency::from_profiles(&record.profiles);
        let report = deviation_report(&freq, &tree).unwrap();
        let regret = diag.max_average_trigger_regret(&tree).unwrap();
        assert!((report.efce - regret).abs() <= 1e-9, "{} vs {}", report.efce, regret);
        for (p, acc) in diag.players.iter().enumerate() {
            let per_trigger = acc.trigger_regrets(tree.player(p));
            for (s, r) in per_trigger.iter().enumerate().skip(1) {
                let g = report.players[p].trigger_gains[s];
                assert!((r / 300.0 - g).abs() <= 1e-9, "player {p} seq {s}: {r} vs {g}");
            }
        }
        assert!(replay_discrepancy(&tree, &record, &diag) <= 1e-9);
        assert_eq!(replay_accumulators(&tree, &record), diag);
        assert!(coarse_decomposition_excess(&tree, &report) <= 1e-12);
    }
}

#[test]
fn decomposition_holds_on_kuhn() {
    let tree = k33();
    let (_, diag) = run_with_diagnostics(&tree, 300, 7);
    for (p, acc) in diag.players.iter().enumerate() {
        let report = check_decomposition(tree.player(p), acc);
        assert!(report.is_clean(), "{:?}", &report.violations[..report.violations.len().min(5)]);
        assert!(report.checked > 0);
    }
}

#[test]
fn oracle_matches_main_path_on_figure3() {
    let tree = figure3();
    for seed in 0..5 {
        let (record, _) = run_with_diagnostics(&tree, 200, seed);
        let freq = EmpiricalFrequency::from_profiles(&record.profiles);
        let oracle = gap_by_enumeration(&freq, &tree).unwrap();
        let main = deviation_report(&freq, &tree).unwrap();
        assert!((oracle.delta - main.efce).abs() <= 1e-12);
        assert!(oracle.max_y_residual <= 1e-12 && oracle.max_reduction_residual <= 1e-12);
        let cert = certify(&record, &tree, 100, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        assert!(cert.passed(), "{:?}", cert.failures);
    }
}

#[test]
fn certificate_on_kuhn() {
    let tree = k33();
    let (record, _) = run_with_diagnostics(&tree, 500, 3);
    let cert = certify(&record, &tree, 100, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    assert!(cert.passed(), "{:?}", cert);
}
