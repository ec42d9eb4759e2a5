//! Uncoupled no-regret dynamics for extensive-form correlated equilibria.
//!
//! The crate is organised bottom-up:
//!
//! - [`efg`]: game trees, infosets, sequences and plan predicates;
//! - [`games`]: benchmark generators (Kuhn, Leduc, Goofspiel, Battleship);
//! - [`regret`]: regret matching and the internal-regret reduction;
//! - [`icfr`]: the ICFR learning dynamics;
//! - [`diagnostics`]: trigger, subtree and laminar regrets;
//! - [`equilibrium`]: empirical frequency of play and deviation gaps;
//! - [`oracle`]: brute-force checks for tiny games.

pub mod diagnostics;
pub mod efg;
pub mod equilibrium;
pub mod error;
pub mod games;
pub mod icfr;
pub mod oracle;
pub mod regret;
