//! Small hand-drawn games used as ground truth.

use crate::efg::{GameBuilder, GameTree};

use super::built;

/// Player 0 (the first player) acts at A, B, C and D; player 1 at X and Y.
///
/// ```text
///            A
///        a /   \ b
///        X       Y
///     l / \ r  m / \ n
///      B   C    D1   D2        D1, D2 ∈ D
///     c d e f   g h  g h
/// ```
///
/// Leaves in preorder: (B,c) (B,d) (C,e) (C,f) (D1,g) (D1,h) (D2,g) (D2,h).
/// Payoffs default to zero.
pub fn figure1() -> GameTree {
    figure1_with_payoffs(&vec![vec![0.0, 0.0]; 8])
}

/// [`figure1`] with `payoffs[k]` on the k-th leaf in preorder.
pub fn figure1_with_payoffs(payoffs: &[Vec<f64>]) -> GameTree {
    assert_eq!(payoffs.len(), 8, "figure1 has 8 leaves");
    let mut g = GameBuilder::new(2);
    let mut leaves = payoffs.iter();
    let mut leaf = |g: &mut GameBuilder| g.terminal(leaves.next().unwrap().clone());

    let a = g.decision(0, "A", ["a", "b"]);
    let x = g.decision(1, "X", ["l", "r"]);
    let b = g.decision(0, "B", ["c", "d"]);
    let c = g.decision(0, "C", ["e", "f"]);
    let y = g.decision(1, "Y", ["m", "n"]);
    let d1 = g.decision(0, "D", ["g", "h"]);
    let d2 = g.decision(0, "D", ["g", "h"]);
    g.attach(a, x);
    g.attach(a, y);
    g.attach(x, b);
    g.attach(x, c);
    g.attach(y, d1);
    g.attach(y, d2);
    for node in [b, c, d1, d2] {
        for _ in 0..2 {
            let z = leaf(&mut g);
            g.attach(node, z);
        }
    }
    built(g.build(a))
}

/// One player with infosets I {a, b} and J {c, d}; `a` leads to J.
/// Default payoffs: 5 after b, 1 after c, 3 after d.
pub fn figure3() -> GameTree {
    figure3_with_payoffs([5.0, 1.0, 3.0])
}

/// [`figure3`] with payoffs `[after b, after (J,c), after (J,d)]`.
pub fn figure3_with_payoffs(payoffs: [f64; 3]) -> GameTree {
    let mut g = GameBuilder::new(1);
    let i = g.decision(0, "I", ["a", "b"]);
    let j = g.decision(0, "J", ["c", "d"]);
    let zb = g.terminal(vec![payoffs[0]]);
    let zc = g.terminal(vec![payoffs[1]]);
    let zd = g.terminal(vec![payoffs[2]]);
    g.attach(i, j);
    g.attach(i, zb);
    g.attach(j, zc);
    g.attach(j, zd);
    built(g.build(i))
}

pub struct FigureGames {
    pub figure1: GameTree,
    pub figure3: GameTree,
}

impl FigureGames {
    pub fn new() -> Self {
        FigureGames { figure1: figure1(), figure3: figure3() }
    }
}

impl Default for FigureGames {
    fn default() -> Self {
        Self::new()
    }
}

/// Simultaneous one-shot game: the column player does not observe the row.
/// `payoffs[r][c]` holds the payoff of every player for the outcome (r, c).
pub fn matrix_game(payoffs: &[Vec<Vec<f64>>]) -> GameTree {
    let rows = payoffs.len();
    let cols = payoffs[0].len();
    let np = payoffs[0][0].len();
    assert!(np == 2, "matrix games have two players");
    let mut g = GameBuilder::new(2);
    let row = g.decision(0, "R", (0..rows).map(|r| format!("r{r}")));
    for r in 0..rows {
        let col = g.decision(1, "C", (0..cols).map(|c| format!("c{c}")));
        g.attach(row, col);
        for c in 0..cols {
            let z = g.terminal(payoffs[r][c].clone());
            g.attach(col, z);
        }
    }
    built(g.build(row))
}
