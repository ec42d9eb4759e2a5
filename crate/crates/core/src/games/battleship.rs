//! Two-player Battleship.
//!
//! Player 1 secretly places their ships, then player 2 does. Players then
//! alternate shots, player 1 first, each firing at most `rounds` times and
//! never at the same cell twice. The shooter learns whether the shot missed,
//! hit, or sank a ship; the opponent learns which cell was targeted. The game
//! ends as soon as a fleet is destroyed or both players ran out of shots.
//!
//! Sinking an opponent ship earns its value; losing one costs its value times
//! the loss multiplier.

use crate::efg::{GameBuilder, GameTree};

use super::{built, Ship};

type Cell = (usize, usize);

struct Battleship<'a> {
    rows: usize,
    cols: usize,
    rounds: usize,
    ships: &'a [Ship],
    loss: f64,
}

#[derive(Clone, Copy, PartialEq)]
enum Outcome {
    Miss,
    Hit,
    Sunk,
}

struct State {
    fleets: [Vec<Vec<Cell>>; 2],
    /// Shots in firing order: (shooter, cell, outcome).
    shots: Vec<(usize, Cell, Outcome)>,
    names: [String; 2],
}

pub fn battleship(grid: (usize, usize), rounds: usize, ships: &[Ship], loss_multiplier: f64) -> GameTree {
    let game = Battleship { rows: grid.0, cols: grid.1, rounds, ships, loss: loss_multiplier };
    let mut state = State {
        fleets: [Vec::new(), Vec::new()],
        shots: Vec::new(),
        names: [String::new(), String::new()],
    };
    let mut g = GameBuilder::new(2);
    let root = game.place(&mut g, &mut state);
    built(g.build(root))
}

fn cell_label((r, c): Cell) -> String {
    format!("r{r}c{c}")
}

impl Battleship<'_> {
    fn placements(&self, length: usize, taken: &[Vec<Cell>]) -> Vec<(String, Vec<Cell>)> {
        let mut out = Vec::new();
        let occupied = |cell: &Cell| taken.iter().any(|s| s.contains(cell));
        for (dir, dr, dc) in [('h', 0, 1), ('v', 1, 0)] {
            if dir == 'v' && length == 1 {
                break;
            }
            for r in 0..self.rows {
                for c in 0..self.cols {
                    let cells: Vec<Cell> = (0..length).map(|k| (r + k * dr, c + k * dc)).collect();
                    if cells.iter().all(|&(r, c)| r < self.rows && c < self.cols) && !cells.iter().any(occupied) {
                        out.push((format!("{}{dir}", cell_label((r, c))), cells));
                    }
                }
            }
        }
        out
    }

    fn place(&self, g: &mut GameBuilder, s: &mut State) -> usize {
        let p = if s.fleets[0].len() < self.ships.len() { 0 } else { 1 };
        if s.fleets[1].len() == self.ships.len() {
            return self.shoot(g, s);
        }
        let k = s.fleets[p].len();
        let options = self.placements(self.ships[k].length, &s.fleets[p]);
        let name = if s.names[p].is_empty() { format!("place{k}") } else { format!("place{k}|{}", s.names[p]) };
        let node = g.decision(p, name, options.iter().map(|(l, _)| l.clone()));
        for (label, cells) in options {
            let saved = s.names[p].len();
            if !s.names[p].is_empty() {
                s.names[p].push('.');
            }
            s.names[p].push_str(&label);
            s.fleets[p].push(cells);
            let child = self.place(g, s);
            s.fleets[p].pop();
            s.names[p].truncate(saved);
            g.attach(node, child);
        }
        node
    }

    fn sunk(&self, s: &State, owner: usize, ship: usize) -> bool {
        s.fleets[owner][ship]
            .iter()
            .all(|cell| s.shots.iter().any(|&(q, c, _)| q != owner && c == *cell))
    }

    fn shoot(&self, g: &mut GameBuilder, s: &mut State) -> usize {
        let fired = |p: usize| s.shots.iter().filter(|&&(q, _, _)| q == p).count();
        let destroyed = |owner: usize| (0..self.ships.len()).all(|k| self.sunk(s, owner, k));
        if destroyed(0) || destroyed(1) || (fired(0) >= self.rounds && fired(1) >= self.rounds) {
            return g.terminal(self.payoffs(s));
        }
        let p = s.shots.len() % 2;
        let opp = 1 - p;
        let targets: Vec<Cell> = (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| (r, c)))
            .filter(|cell| !s.shots.iter().any(|&(q, c, _)| q == p && c == *cell))
            .collect();
        let node = g.decision(p, s.names[p].clone(), targets.iter().map(|&c| cell_label(c)));
        for cell in targets {
            let before: Vec<bool> = (0..self.ships.len()).map(|k| self.sunk(s, opp, k)).collect();
            s.shots.push((p, cell, Outcome::Miss));
            let hit = s.fleets[opp].iter().any(|ship| ship.contains(&cell));
            let sank = (0..self.ships.len()).any(|k| !before[k] && self.sunk(s, opp, k));
            let outcome = match (hit, sank) {
                (_, true) => Outcome::Sunk,
                (true, false) => Outcome::Hit,
                _ => Outcome::Miss,
            };
            s.shots.last_mut().unwrap().2 = outcome;
            let saved = [s.names[0].len(), s.names[1].len()];
            let mark = match outcome {
                Outcome::Miss => 'm',
                Outcome::Hit => 'h',
                Outcome::Sunk => 's',
            };
            s.names[p].push_str(&format!("/{}{mark}", cell_label(cell)));
            s.names[opp].push_str(&format!("/x{}", cell_label(cell)));
            let child = self.shoot(g, s);
            s.names[0].truncate(saved[0]);
            s.names[1].truncate(saved[1]);
            s.shots.pop();
            g.attach(node, child);
        }
        node
    }

    fn payoffs(&self, s: &State) -> Vec<f64> {
        let mut out = vec![0.0; 2];
        for owner in 0..2 {
            for (k, ship) in self.ships.iter().enumerate() {
                if self.sunk(s, owner, k) {
                    out[1 - owner] += ship.value;
                    out[owner] -= self.loss * ship.value;
                }
            }
        }
        out
    }
}
