use icfr::efg::{text, GameTree, NodeKind};
use icfr::games::{generate, GameFamily, GameSpec, SpecError};

fn sizes(tree: &GameTree) -> Vec<(usize, usize)> {
    tree.players().iter().map(|p| (p.num_infosets(), p.num_sequences())).collect()
}

#[test]
fn kuhn_sizes() {
    assert_eq!(sizes(&generate(&GameSpec::kuhn(3, 3)).unwrap()), vec![(12, 25); 3]);
    assert_eq!(sizes(&generate(&GameSpec::kuhn(3, 4)).unwrap()), vec![(16, 33); 3]);
    assert_eq!(sizes(&generate(&GameSpec::kuhn(2, 3)).unwrap()), vec![(6, 13); 2]);
}

#[test]
fn goofspiel_sizes() {
    assert_eq!(sizes(&generate(&GameSpec::goofspiel(2, 3)).unwrap()), vec![(213, 262); 2]);
    assert_eq!(sizes(&generate(&GameSpec::goofspiel(3, 3)).unwrap()), vec![(837, 934); 3]);
}

#[test]
fn leduc_and_battleship_sizes() {
    assert_eq!(sizes(&generate(&GameSpec::leduc(3, 3)).unwrap()), vec![(3294, 7687); 3]);
    assert_eq!(sizes(&generate(&GameSpec::battleship()).unwrap()), vec![(1413, 2965), (1873, 4101)]);
}

#[test]
fn generation_is_deterministic() {
    for spec in [GameSpec::kuhn(3, 3), GameSpec::goofspiel(2, 3), GameSpec::battleship()] {
        let a = text::export(&generate(&spec).unwrap()).unwrap();
        let b = text::export(&generate(&spec).unwrap()).unwrap();
        assert_eq!(a, b, "{}", spec.label());
    }
}

#[test]
fn poker_is_constant_sum() {
    for spec in [GameSpec::kuhn(3, 3), GameSpec::kuhn(2, 4), GameSpec::leduc(2, 2)] {
        let g = generate(&spec).unwrap();
        for z in 0..g.num_terminals() {
            let total: f64 = g.payoffs(z).iter().sum();
            assert!(total.abs() <= 1e-12, "{} terminal {z}", spec.label());
        }
    }
}

#[test]
fn goofspiel_scores_are_won_prizes() {
    let g = generate(&GameSpec::goofspiel(3, 3)).unwrap();
    for z in 0..g.num_terminals() {
        let total: f64 = g.payoffs(z).iter().sum();
        assert!(g.payoffs(z).iter().all(|&v| v >= 0.0));
        assert!(total <= 6.0);
    }
    let sorted = generate(&GameSpec { sorted_deck: true, ..GameSpec::goofspiel(2, 3) }).unwrap();
    let chance = (0..sorted.num_nodes()).any(|n| matches!(sorted.node(n).kind, NodeKind::Chance { .. }));
    assert!(!chance);
}

#[test]
fn figure_games() {
    let f1 = generate(&GameSpec::new(GameFamily::Figure1)).unwrap();
    assert_eq!(f1.player(0).num_plans(), 16);
    assert!((0..f1.num_terminals()).all(|z| f1.payoffs(z).iter().all(|&v| v == 0.0)));
    let f3 = generate(&GameSpec::new(GameFamily::Figure3)).unwrap();
    assert_eq!(sizes(&f3), vec![(2, 5)]);
    let custom = GameSpec { payoffs: Some(vec![1.0, 2.0, 3.0]), ..GameSpec::new(GameFamily::Figure3) };
    assert_eq!(generate(&custom).unwrap().payoff(0, 0), 2.0);
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(matches!(generate(&GameSpec::kuhn(3, 2)), Err(SpecError::Invalid(m)) if m.contains("ranks >= players")));
    assert!(matches!(generate(&GameSpec::kuhn(1, 3)), Err(SpecError::Invalid(_))));
    let bs = GameSpec { players: 3, ..GameSpec::battleship() };
    assert!(generate(&bs).is_err());
    let bad_payoffs = GameSpec { payoffs: Some(vec![1.0]), ..GameSpec::new(GameFamily::Figure1) };
    assert!(generate(&bad_payoffs).is_err());
    assert_eq!("Kuhn".parse::<GameFamily>(), Ok(GameFamily::Kuhn));
    assert!(matches!("poker".parse::<GameFamily>(), Err(SpecError::UnknownFamily(_))));
}
