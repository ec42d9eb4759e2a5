use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use icfr::efg::{text, GameTree};
use icfr::games::{generate, GameSpec};

/// Generates `spec` and writes it in the text format.
pub fn export_game(spec: &GameSpec, path: &Path) -> Result<GameTree> {
    let tree = generate(spec)?;
    let body = text::export(&tree)?;
    fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    Ok(tree)
}

pub fn import_game(path: &Path) -> Result<GameTree> {
    let body = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text::import(&body).with_context(|| format!("importing {}", path.display()))
}

/// One line per player: infosets and sequences, sequences counting ∅.
pub fn describe(tree: &GameTree) -> String {
    let mut s = format!("{} players, {} nodes, {} terminals\n", tree.num_players(), tree.num_nodes(), tree.num_terminals());
    for p in 0..tree.num_players() {
        let pt = tree.player(p);
        s.push_str(&format!("player {}: {} infosets, {} sequences\n", p + 1, pt.num_infosets(), pt.num_sequences()));
    }
    s
}
