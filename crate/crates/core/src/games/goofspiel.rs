//! Goofspiel with `r` cards per hand and `r` prize cards.
//!
//! Each turn a prize is revealed and every player bids one card from their
//! hand. Bids are simultaneous: they are encoded one player at a time, and no
//! player sees the bids of the current turn. The unique highest bid wins the
//! prize; on a tie the prize is discarded. A player's score is the sum of the
//! prizes they won.
//!
//! With limited information a player learns, after each turn, only the set of
//! players that made the highest bid. Otherwise all bids are revealed.

use crate::efg::{GameBuilder, GameTree};

use super::built;

struct Goofspiel {
    players: usize,
    limited_info: bool,
    sorted_deck: bool,
}

struct State {
    hands: Vec<Vec<usize>>,
    prizes: Vec<usize>,
    scores: Vec<f64>,
    obs: Vec<String>,
}

pub fn goofspiel(players: usize, ranks: usize, limited_info: bool, sorted_deck: bool) -> GameTree {
    assert!(players >= 2 && ranks >= 1);
    let game = Goofspiel { players, limited_info, sorted_deck };
    let mut state = State {
        hands: vec![(1..=ranks).collect(); players],
        prizes: (1..=ranks).collect(),
        scores: vec![0.0; players],
        obs: vec![String::new(); players],
    };
    let mut g = GameBuilder::new(players);
    let root = game.turn(&mut g, &mut state);
    built(g.build(root))
}

impl Goofspiel {
    fn turn(&self, g: &mut GameBuilder, s: &mut State) -> usize {
        if s.prizes.is_empty() {
            return g.terminal(s.scores.clone());
        }
        if self.sorted_deck || s.prizes.len() == 1 {
            return self.reveal(g, s, 0);
        }
        let p = 1.0 / s.prizes.len() as f64;
        let node = g.chance(s.prizes.iter().map(|v| (v.to_string(), p)));
        for k in 0..s.prizes.len() {
            let child = self.reveal(g, s, k);
            g.attach(node, child);
        }
        node
    }

    fn reveal(&self, g: &mut GameBuilder, s: &mut State, k: usize) -> usize {
        let prize = s.prizes.remove(k);
        let saved: Vec<usize> = s.obs.iter().map(String::len).collect();
        for o in &mut s.obs {
            if !o.is_empty() {
                o.push('/');
            }
            o.push_str(&format!("p{prize}"));
        }
        let node = self.bid(g, s, prize, &mut Vec::new());
        for (o, len) in s.obs.iter_mut().zip(saved) {
            o.truncate(len);
        }
        s.prizes.insert(k, prize);
        node
    }

    fn bid(&self, g: &mut GameBuilder, s: &mut State, prize: usize, bids: &mut Vec<usize>) -> usize {
        let p = bids.len();
        if p == self.players {
            return self.resolve(g, s, prize, bids);
        }
        let hand = s.hands[p].clone();
        let node = g.decision(p, s.obs[p].clone(), hand.iter().map(|c| c.to_string()));
        for (k, &card) in hand.iter().enumerate() {
            s.hands[p].remove(k);
            bids.push(card);
            let child = self.bid(g, s, prize, bids);
            bids.pop();
            s.hands[p].insert(k, card);
            g.attach(node, child);
        }
        node
    }

    fn resolve(&self, g: &mut GameBuilder, s: &mut State, prize: usize, bids: &[usize]) -> usize {
        let top = *bids.iter().max().unwrap();
        let winners: Vec<usize> = (0..self.players).filter(|&q| bids[q] == top).collect();
        let saved: Vec<usize> = s.obs.iter().map(String::len).collect();
        let public = if self.limited_info {
            winners.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(".")
        } else {
            bids.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(".")
        };
        for (q, o) in s.obs.iter_mut().enumerate() {
            o.push_str(&format!("b{}w{public}", bids[q]));
        }
        let winner = if winners.len() == 1 { Some(winners[0]) } else { None };
        if let Some(w) = winner {
            s.scores[w] += prize as f64;
        }
        let node = self.turn(g, s);
        if let Some(w) = winner {
            s.scores[w] -= prize as f64;
        }
        for (o, len) in s.obs.iter_mut().zip(saved) {
            o.truncate(len);
        }
        node
    }
}
