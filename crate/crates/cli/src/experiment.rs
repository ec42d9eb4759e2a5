use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use icfr::diagnostics::{check_decomposition, Diagnostics, DECOMPOSITION_TOLERANCE};
use icfr::efg::GameTree;
use icfr::equilibrium::{coarse_decomposition_excess, deviation_report, social_welfare, DeviationReport, EmpiricalFrequency};
use icfr::games::generate;
use icfr::icfr::{feedback, Icfr, IterationFeedback, RunRecord};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Gap};
use crate::output::{self, GapRow, ALL_PLAYERS};

/// Tolerance of the checkpoint invariants.
pub const CHECK_TOLERANCE: f64 = DECOMPOSITION_TOLERANCE;

/// Dynamics state plus the profiles played so far; enough to resume a run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Snapshot {
    pub icfr: Icfr,
    pub record: RunRecord,
}

pub fn snapshot_file(seed: u64) -> String {
    format!("snapshot_{seed}.json")
}

pub fn record_file(seed: u64) -> String {
    format!("record_{seed}.json")
}

/// Invariant residuals at one checkpoint.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckResiduals {
    /// |δ_EFCE − max trigger regret / t|.
    pub regret_identity: f64,
    /// Largest decomposition equality residual over players.
    pub decomposition_equality: f64,
    /// Largest excess in the decomposition inequalities over players.
    pub decomposition_excess: f64,
    /// max_I gain(I) − Σ_a max(0, gain(I, a)).
    pub coarse_excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub t: u64,
    pub report: DeviationReport,
    pub checks: Option<CheckResiduals>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub checkpoints: Vec<Checkpoint>,
    pub utilities: Vec<f64>,
    pub welfare: f64,
    pub failures: Vec<String>,
}

impl SeedOutcome {
    /// Gap rows for the selected kinds, players first then `all` when there
    /// is more than one player.
    pub fn rows(&self, gaps: &[Gap]) -> Vec<GapRow> {
        let pick = |efce: f64, efcce: f64, nfcce: f64| -> Vec<f64> {
            gaps.iter()
                .map(|g| match g {
                    Gap::Efce => efce,
                    Gap::Efcce => efcce,
                    Gap::Nfcce => nfcce,
                })
                .collect()
        };
        let mut rows = Vec::new();
        for c in &self.checkpoints {
            for (p, d) in c.report.players.iter().enumerate() {
                rows.push(GapRow { t: c.t, player: (p + 1).to_string(), values: pick(d.efce, d.efcce, d.nfcce) });
            }
            if c.report.players.len() > 1 {
                let r = &c.report;
                rows.push(GapRow { t: c.t, player: ALL_PLAYERS.into(), values: pick(r.efce, r.efcce, r.nfcce) });
            }
        }
        rows
    }

    pub fn final_report(&self) -> &DeviationReport {
        &self.checkpoints.last().expect("at least one checkpoint").report
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub game: String,
    pub seeds: Vec<SeedOutcome>,
}

impl Summary {
    pub fn failures(&self) -> impl Iterator<Item = (u64, &str)> {
        self.seeds.iter().flat_map(|s| s.failures.iter().map(move |f| (s.seed, f.as_str())))
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }
}

struct SeedRun<'a> {
    tree: &'a GameTree,
    config: &'a ExperimentConfig,
    dir: &'a Path,
    seed: u64,
    freq: EmpiricalFrequency,
    diag: Option<Diagnostics>,
    outcome: SeedOutcome,
}

impl SeedRun<'_> {
    fn absorb(&mut self, fb: &IterationFeedback) {
        self.freq.record(fb.profile.clone());
        if let Some(diag) = &mut self.diag {
            diag.observe(self.tree, fb);
        }
    }

    fn evaluate(&mut self, t: u64) -> Result<()> {
        let report = deviation_report(&self.freq, self.tree)?;
        let checks = self.diag.as_ref().map(|diag| {
            let mut c = CheckResiduals {
                regret_identity: (report.efce - diag.max_average_trigger_regret(self.tree).unwrap_or(0.0)).abs(),
                coarse_excess: coarse_decomposition_excess(self.tree, &report),
                ..Default::default()
            };
            for (p, acc) in diag.players.iter().enumerate() {
                let d = check_decomposition(self.tree.player(p), acc);
                c.decomposition_equality = c.decomposition_equality.max(d.max_equality_residual);
                c.decomposition_excess = c.decomposition_excess.max(d.max_inequality_excess);
                if let Some(v) = d.violations.first() {
                    self.outcome.failures.push(format!("t={t}: {v:?}"));
                }
            }
            for (name, r) in [("regret identity", c.regret_identity), ("coarse decomposition", c.coarse_excess)] {
                if !(r <= CHECK_TOLERANCE) {
                    self.outcome.failures.push(format!("t={t}: {name} residual {r:e}"));
                }
            }
            c
        });
        self.outcome.checkpoints.push(Checkpoint { t, report, checks });
        Ok(())
    }

    fn run(mut self, resume: bool) -> Result<SeedOutcome> {
        let (tree, config) = (self.tree, self.config);
        let snapshot_path = self.dir.join(snapshot_file(self.seed));
        let mut checkpoints = config.checkpoints.iter().copied().peekable();
        let (mut icfr, mut record) = match resume.then(|| load_snapshot(&snapshot_path)).transpose()?.flatten() {
            Some(s) => {
                if s.icfr.seed != self.seed || s.record.profiles.len() as u64 != s.icfr.iteration {
                    bail!("{} does not belong to seed {}", snapshot_path.display(), self.seed);
                }
                if s.icfr.iteration > config.iterations {
                    bail!("{} is past T = {}", snapshot_path.display(), config.iterations);
                }
                for (k, profile) in s.record.profiles.iter().enumerate() {
                    let fb = feedback(tree, profile.clone());
                    self.absorb(&fb);
                    if checkpoints.next_if_eq(&(k as u64 + 1)).is_some() {
                        self.evaluate(k as u64 + 1)?;
                    }
                }
                (s.icfr, s.record)
            }
            None => (Icfr::new(tree, self.seed), RunRecord { seed: self.seed, profiles: Vec::new() }),
        };
        while icfr.iteration < config.iterations {
            let fb = icfr.step(tree);
            self.absorb(&fb);
            record.profiles.push(fb.profile);
            let t = icfr.iteration;
            if checkpoints.next_if_eq(&t).is_some() {
                self.evaluate(t)?;
                write_json(&snapshot_path, &Snapshot { icfr: icfr.clone(), record: record.clone() })?;
            }
        }
        let welfare = social_welfare(&self.freq, tree)?;
        self.outcome.utilities = welfare.utilities;
        self.outcome.welfare = welfare.sum;
        write_json(&self.dir.join(record_file(self.seed)), &record)?;
        let csv = output::seed_csv(&config.gaps, &self.outcome.rows(&config.gaps));
        write_text(&self.dir.join(output::seed_file(self.seed)), &csv)?;
        Ok(self.outcome)
    }
}

fn load_snapshot(path: &Path) -> Result<Option<Snapshot>> {
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Some(serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &serde_json::to_string(value)?)
}

/// Runs one seed and writes its record, snapshot and CSV into `dir`.
pub fn run_seed(tree: &GameTree, config: &ExperimentConfig, dir: &Path, seed: u64, resume: bool) -> Result<SeedOutcome> {
    let run = SeedRun {
        tree,
        config,
        dir,
        seed,
        freq: EmpiricalFrequency::new(),
        diag: config.checks.then(|| Diagnostics::new(tree)),
        outcome: SeedOutcome { seed, checkpoints: Vec::new(), utilities: Vec::new(), welfare: 0.0, failures: Vec::new() },
    };
    run.run(resume).with_context(|| format!("seed {seed}"))
}

/// Runs every seed on a worker pool and writes the aggregate files.
pub fn run_experiment(config: &ExperimentConfig, resume: bool) -> Result<Summary> {
    let tree = generate(&config.game)?;
    let dir: PathBuf = config.out.clone();
    fs::create_dir_all(&dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    write_text(&dir.join("config.json"), &serde_json::to_string_pretty(config)?)?;

    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.workers).build()?;
    let seeds: Vec<SeedOutcome> = pool.install(|| {
        config.seeds.par_iter().map(|&seed| run_seed(&tree, config, &dir, seed, resume)).collect::<Result<_>>()
    })?;

    let rows: Vec<Vec<GapRow>> = seeds.iter().map(|s| s.rows(&config.gaps)).collect();
    write_text(&dir.join(output::AGGREGATE_FILE), &output::aggregate_csv(&config.gaps, &rows)?)?;
    let welfare: Vec<_> = seeds.iter().map(|s| (s.seed, s.utilities.clone(), s.welfare)).collect();
    write_text(&dir.join(output::WELFARE_FILE), &output::welfare_csv(tree.num_players(), &welfare))?;

    let summary = Summary { game: config.game.label(), seeds };
    let failures: Vec<String> = summary.failures().map(|(s, f)| format!("seed {s}: {f}")).collect();
    write_json(&dir.join("checks.json"), &failures)?;
    Ok(summary)
}
