//! CSV files written by an experiment.
//!
//! Per seed, `seed_<s>.csv` has one row per checkpoint and player:
//! `t,player,delta_efce,delta_efcce,delta_nfcce` (only the selected gaps).
//! Players are numbered from 1; in games with several players the extra
//! player `all` holds the maximum over players, which is the gap of the
//! joint distribution.
//! `aggregate.csv` replaces each gap column by `mean_*,std_*` over seeds and
//! `welfare.csv` has `seed,u_player1,...,welfare_sum` at the final iteration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};

use crate::config::Gap;

pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const WELFARE_FILE: &str = "welfare.csv";
pub const ALL_PLAYERS: &str = "all";

pub fn seed_file(seed: u64) -> String {
    format!("seed_{seed}.csv")
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// Gaps of one player (or of all players) at one checkpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct GapRow {
    pub t: u64,
    /// 1-based player number, or [`ALL_PLAYERS`].
    pub player: String,
    /// One value per selected gap, in [`Gap`] order.
    pub values: Vec<f64>,
}

fn header(gaps: &[Gap], prefixes: &[&str]) -> String {
    let mut h = String::from("t,player");
    for g in gaps {
        for p in prefixes {
            write!(h, ",{p}delta_{g}").unwrap();
        }
    }
    h
}

pub fn seed_csv(gaps: &[Gap], rows: &[GapRow]) -> String {
    let mut s = header(gaps, &[""]);
    s.push('\n');
    for r in rows {
        write!(s, "{},{}", r.t, r.player).unwrap();
        for v in &r.values {
            write!(s, ",{}", fmt_float(*v)).unwrap();
        }
        s.push('\n');
    }
    s
}

/// Sample mean and standard deviation (n − 1 denominator; 0 for one seed).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Aggregate over seeds; `per_seed` must be in seed order with identical
/// (t, player) layouts.
pub fn aggregate_csv(gaps: &[Gap], per_seed: &[Vec<GapRow>]) -> Result<String> {
    let mut s = header(gaps, &["mean_", "std_"]);
    s.push('\n');
    let Some(first) = per_seed.first() else { bail!("no seeds to aggregate") };
    for (k, row) in first.iter().enumerate() {
        write!(s, "{},{}", row.t, row.player).unwrap();
        for g in 0..gaps.len() {
            let mut xs = Vec::with_capacity(per_seed.len());
            for rows in per_seed {
                let r = rows.get(k).filter(|r| r.t == row.t && r.player == row.player);
                let Some(r) = r else { bail!("seed files disagree on row {k}") };
                xs.push(r.values[g]);
            }
            let (mean, std) = mean_std(&xs);
            write!(s, ",{},{}", fmt_float(mean), fmt_float(std)).unwrap();
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn welfare_csv(num_players: usize, rows: &[(u64, Vec<f64>, f64)]) -> String {
    let mut s = String::from("seed");
    for p in 1..=num_players {
        write!(s, ",u_player{p}").unwrap();
    }
    s.push_str(",welfare_sum\n");
    for (seed, utilities, sum) in rows {
        write!(s, "{seed}").unwrap();
        for u in utilities {
            write!(s, ",{}", fmt_float(*u)).unwrap();
        }
        writeln!(s, ",{}", fmt_float(*sum)).unwrap();
    }
    s
}

/// Reads a CSV written by this module into (header, rows of fields).
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().context("empty csv")?.split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    Ok((header, rows))
}

/// Recomputes `aggregate.csv` from the per-seed files in `dir` and returns
/// the largest absolute difference.
pub fn verify_aggregate(dir: &Path, seeds: &[u64]) -> Result<f64> {
    let mut series: BTreeMap<(usize, String), Vec<Vec<f64>>> = BTreeMap::new();
    let mut width = 0;
    for &seed in seeds {
        let (header, rows) = read_csv(&dir.join(seed_file(seed)))?;
        width = header.len() - 2;
        for (k, row) in rows.iter().enumerate() {
            let values = row[2..].iter().map(|v| v.parse::<f64>()).collect::<Result<Vec<_>, _>>()?;
            series.entry((k, format!("{},{}", row[0], row[1]))).or_default().push(values);
        }
    }
    let (header, rows) = read_csv(&dir.join(AGGREGATE_FILE))?;
    if header.len() != 2 + 2 * width || rows.len() != series.len() {
        bail!("aggregate layout does not match the seed files");
    }
    let mut worst: f64 = 0.0;
    for (((_, key), values), row) in series.iter().zip(&rows) {
        if *key != format!("{},{}", row[0], row[1]) {
            bail!("aggregate row {key} is out of order");
        }
        for g in 0..width {
            let xs: Vec<f64> = values.iter().map(|v| v[g]).collect();
            let (mean, std) = mean_std(&xs);
            let m: f64 = row[2 + 2 * g].parse()?;
            let s: f64 = row[3 + 2 * g].parse()?;
            worst = worst.max((m - mean).abs()).max((s - std).abs());
        }
    }
    Ok(worst)
}
