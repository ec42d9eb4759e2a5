//! n-player Leduc hold'em with three suits of `r` ranks.
//!
//! Every player antes one chip and gets one private card; a betting round
//! follows, then one board card is revealed and a second betting round is
//! played. Raises are 2 chips in the first round and 4 in the second. Within
//! a round each player may raise at most once. Betting opens with the lowest
//! seat still in the hand. At showdown a pair with the board beats any
//! unpaired card, otherwise the higher rank wins; ties split the pot.
//!
//! Suits never matter, so cards are dealt by rank with probability
//! proportional to the copies left in the deck.

use crate::efg::{GameBuilder, GameTree};

use super::built;

const SUITS: usize = 3;
const RAISE: [f64; 2] = [2.0, 4.0];

struct Hand {
    cards: Vec<usize>,
    deck: Vec<usize>,
    active: Vec<bool>,
    paid: Vec<f64>,
    board: Option<usize>,
    history: String,
}

#[derive(Clone)]
struct Round {
    number: usize,
    level: usize,
    contrib: Vec<usize>,
    acted: Vec<bool>,
    raised: Vec<bool>,
    next: usize,
}

impl Round {
    fn new(number: usize, players: usize) -> Self {
        Round {
            number,
            level: 0,
            contrib: vec![0; players],
            acted: vec![false; players],
            raised: vec![false; players],
            next: 0,
        }
    }
}

pub fn leduc(players: usize, ranks: usize) -> GameTree {
    assert!(players >= 2 && SUITS * ranks > players);
    let mut hand = Hand {
        cards: Vec::new(),
        deck: vec![SUITS; ranks],
        active: vec![true; players],
        paid: vec![1.0; players],
        board: None,
        history: String::new(),
    };
    let mut g = GameBuilder::new(players);
    let root = deal(&mut g, &mut hand);
    built(g.build(root))
}

/// Chance node over the ranks left in the deck; `then` builds each child.
fn chance_card(
    g: &mut GameBuilder,
    hand: &mut Hand,
    then: fn(&mut GameBuilder, &mut Hand, usize) -> usize,
) -> usize {
    let total: usize = hand.deck.iter().sum();
    let ranks: Vec<usize> = (0..hand.deck.len()).filter(|&r| hand.deck[r] > 0).collect();
    let node = g.chance(ranks.iter().map(|&r| (r.to_string(), hand.deck[r] as f64 / total as f64)));
    for r in ranks {
        hand.deck[r] -= 1;
        let child = then(g, hand, r);
        hand.deck[r] += 1;
        g.attach(node, child);
    }
    node
}

fn deal(g: &mut GameBuilder, hand: &mut Hand) -> usize {
    if hand.cards.len() == hand.active.len() {
        let round = Round::new(0, hand.active.len());
        return act(g, hand, &round);
    }
    chance_card(g, hand, |g, hand, r| {
        hand.cards.push(r);
        let node = deal(g, hand);
        hand.cards.pop();
        node
    })
}

fn reveal_board(g: &mut GameBuilder, hand: &mut Hand) -> usize {
    chance_card(g, hand, |g, hand, r| {
        hand.board = Some(r);
        hand.history.push('/');
        let round = Round::new(1, hand.active.len());
        let node = act(g, hand, &round);
        hand.history.pop();
        hand.board = None;
        node
    })
}

fn act(g: &mut GameBuilder, hand: &mut Hand, round: &Round) -> usize {
    let n = hand.active.len();
    let live: Vec<usize> = (0..n).filter(|&p| hand.active[p]).collect();
    if live.len() == 1 {
        return settle(g, hand, &live);
    }
    if live.iter().all(|&p| round.acted[p] && round.contrib[p] == round.level) {
        return if round.number == 0 { reveal_board(g, hand) } else { showdown(g, hand, &live) };
    }
    let mut seat = round.next;
    while !hand.active[seat % n] {
        seat += 1;
    }
    let p = seat % n;
    let facing = round.contrib[p] < round.level;
    let mut actions: Vec<(char, &str)> = Vec::new();
    if facing {
        actions.push(('f', "fold"));
        actions.push(('c', "call"));
    } else {
        actions.push(('c', "check"));
    }
    if !round.raised[p] {
        actions.push(('r', "raise"));
    }
    let name = match hand.board {
        None => format!("{}|{}", hand.cards[p], hand.history),
        Some(b) => format!("{}.{b}|{}", hand.cards[p], hand.history),
    };
    let node = g.decision(p, name, actions.iter().map(|(_, l)| *l));
    let size = RAISE[round.number];
    for &(ch, _) in &actions {
        let mut next = round.clone();
        next.acted[p] = true;
        next.next = p + 1;
        let old_paid = hand.paid[p];
        match ch {
            'f' => hand.active[p] = false,
            'c' => {
                hand.paid[p] += size * (round.level - round.contrib[p]) as f64;
                next.contrib[p] = round.level;
            }
            _ => {
                next.level = round.level + 1;
                next.raised[p] = true;
                hand.paid[p] += size * (next.level - round.contrib[p]) as f64;
                next.contrib[p] = next.level;
            }
        }
        hand.history.push(ch);
        let child = act(g, hand, &next);
        hand.history.pop();
        hand.paid[p] = old_paid;
        hand.active[p] = true;
        g.attach(node, child);
    }
    node
}

fn showdown(g: &mut GameBuilder, hand: &Hand, live: &[usize]) -> usize {
    let board = hand.board.expect("showdown happens after the board card");
    let strength = |p: usize| (hand.cards[p] == board, hand.cards[p]);
    let best = live.iter().map(|&p| strength(p)).max().unwrap();
    let winners: Vec<usize> = live.iter().copied().filter(|&p| strength(p) == best).collect();
    settle(g, hand, &winners)
}

fn settle(g: &mut GameBuilder, hand: &Hand, winners: &[usize]) -> usize {
    let pot: f64 = hand.paid.iter().sum();
    let share = pot / winners.len() as f64;
    let payoffs = (0..hand.paid.len())
        .map(|p| if winners.contains(&p) { share - hand.paid[p] } else { -hand.paid[p] })
        .collect();
    g.terminal(payoffs)
}
