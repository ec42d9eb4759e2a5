//! n-player Kuhn poker with `r` distinct cards.
//!
//! Every player antes one chip and receives one card. Players act in seat
//! order and may check or bet one chip while nobody has bet. After a bet,
//! every other player, continuing around the table from the bettor, folds or
//! calls exactly once. The highest card still in the hand takes the pot.

use crate::efg::{GameBuilder, GameTree};

use super::built;

pub fn kuhn(players: usize, ranks: usize) -> GameTree {
    assert!(players >= 2 && ranks >= players);
    let mut g = GameBuilder::new(players);
    let root = deal(&mut g, players, ranks, &mut Vec::new());
    built(g.build(root))
}

fn deal(g: &mut GameBuilder, players: usize, ranks: usize, cards: &mut Vec<usize>) -> usize {
    if cards.len() == players {
        return betting(g, cards, &mut String::new(), None, &mut Vec::new());
    }
    let left: Vec<usize> = (0..ranks).filter(|c| !cards.contains(c)).collect();
    let p = 1.0 / left.len() as f64;
    let node = g.chance(left.iter().map(|c| (c.to_string(), p)));
    for &c in &left {
        cards.push(c);
        let child = deal(g, players, ranks, cards);
        cards.pop();
        g.attach(node, child);
    }
    node
}

/// `bettor` is set once somebody bet; `responses` holds the fold (false) /
/// call (true) answers to it, in acting order.
fn betting(
    g: &mut GameBuilder,
    cards: &[usize],
    history: &mut String,
    bettor: Option<usize>,
    responses: &mut Vec<bool>,
) -> usize {
    let n = cards.len();
    match bettor {
        None => {
            let p = history.len();
            if p == n {
                return showdown(g, cards, None, &[]);
            }
            let node = g.decision(p, format!("{}|{history}", cards[p]), ["check", "bet"]);
            history.push('k');
            let check = betting(g, cards, history, None, responses);
            history.pop();
            history.push('b');
            let bet = betting(g, cards, history, Some(p), responses);
            history.pop();
            g.attach(node, check);
            g.attach(node, bet);
            node
        }
        Some(b) => {
            if responses.len() == n - 1 {
                return showdown(g, cards, Some(b), responses);
            }
            let p = (b + 1 + responses.len()) % n;
            let node = g.decision(p, format!("{}|{history}", cards[p]), ["fold", "call"]);
            for (answer, ch) in [(false, 'f'), (true, 'c')] {
                history.push(ch);
                responses.push(answer);
                let child = betting(g, cards, history, bettor, responses);
                responses.pop();
                history.pop();
                g.attach(node, child);
            }
            node
        }
    }
}

fn showdown(g: &mut GameBuilder, cards: &[usize], bettor: Option<usize>, responses: &[bool]) -> usize {
    let n = cards.len();
    let mut paid = vec![1.0; n];
    let mut live = vec![true; n];
    if let Some(b) = bettor {
        paid[b] += 1.0;
        for (k, &called) in responses.iter().enumerate() {
            let p = (b + 1 + k) % n;
            if called {
                paid[p] += 1.0;
            } else {
                live[p] = false;
            }
        }
    }
    let pot: f64 = paid.iter().sum();
    let winner = (0..n).filter(|&p| live[p]).max_by_key(|&p| cards[p]).unwrap();
    let payoffs = (0..n).map(|p| if p == winner { pot - paid[p] } else { -paid[p] }).collect();
    g.terminal(payoffs)
}
