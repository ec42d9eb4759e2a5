//! End-to-end acceptance run. Prints one line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use icfr::diagnostics::{check_decomposition, random_plan, rho_identity_residual, Diagnostics};
use icfr::efg::{GameTree, PlanProfile};
use icfr::equilibrium::{coarse_decomposition_excess, deviation_report, EmpiricalFrequency};
use icfr::games::{figure3, generate, matrix_game, GameSpec};
use icfr::icfr::{iteration_rng, run, RunRecord};
use icfr::oracle::gap_by_enumeration;
use icfr::regret::{residual, stationary_distribution, ExternalRM, InternalRM};
use icfr_cli::config::{default_checkpoints, ExperimentConfig, Gap};
use icfr_cli::experiment::{run_experiment, Summary};
use icfr_cli::output::{seed_file, AGGREGATE_FILE, WELFARE_FILE};
use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn one_shot() -> GameTree {
    matrix_game(&[vec![vec![0.0, 0.0], vec![7.0, 2.0]], vec![vec![2.0, 7.0], vec![6.0, 6.0]]])
}

fn run_with_diagnostics(tree: &GameTree, t: u64, seed: u64) -> (RunRecord, Diagnostics) {
    let mut diag = Diagnostics::new(tree);
    let record = run(tree, t, seed, |_, fb| diag.observe(tree, fb));
    (record, diag)
}

/// δ_EFCE from the distribution equals max trigger regret / T.
fn regret_gap_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for tree in [figure3(), generate(&GameSpec::kuhn(3, 3)).unwrap()] {
        for t in [100, 1000] {
            for seed in 1..=5 {
                let (record, diag) = run_with_diagnostics(&tree, t, seed);
                let delta = deviation_report(&EmpiricalFrequency::from_profiles(&record.profiles), &tree).unwrap().efce;
                let regret = diag.max_average_trigger_regret(&tree).unwrap();
                worst = worst.max((delta - regret).abs());
                runs += 1;
            }
        }
    }
    outcome(worst <= 1e-9, format!("{runs} runs, max |delta - R/T| = {worst:.2e} (tol 1e-9)"))
}

/// Enumeration-based δ against the main path, and the simulated trigger
/// agent against the closed-form terminal distribution.
fn oracle_equivalence() -> Outcome {
    let mut gap_residual: f64 = 0.0;
    let mut y_residual: f64 = 0.0;
    let mut cases = 0;
    for tree in [figure3(), one_shot()] {
        let mut freqs: Vec<EmpiricalFrequency> = Vec::new();
        for t in [1, 10, 100, 1000] {
            for seed in 1..=5 {
                freqs.push(EmpiricalFrequency::from_profiles(&run(&tree, t, seed, |_, _| {}).profiles));
            }
        }
        for _ in 0..20 {
            let mut rng = iteration_rng(freqs.len() as u64, 7, 0);
            let profiles: Vec<PlanProfile> = (0..rng.gen_range(1..6))
                .map(|_| PlanProfile::new(tree.players().iter().map(|p| random_plan(p, &mut rng)).collect()))
                .collect();
            freqs.push(EmpiricalFrequency::from_profiles(&profiles));
        }
        for f in &freqs {
            let main = deviation_report(f, &tree).unwrap();
            let oracle = gap_by_enumeration(f, &tree).unwrap();
            gap_residual = gap_residual.max((main.efce - oracle.delta).abs());
            for (p, d) in main.players.iter().enumerate() {
                for (a, b) in d.trigger_gains.iter().zip(&oracle.trigger_gains[p]).skip(1) {
                    gap_residual = gap_residual.max((a - b).abs());
                }
            }
            y_residual = y_residual.max(oracle.max_y_residual);
            cases += 1;
        }
    }
    outcome(
        gap_residual <= 1e-12 && y_residual <= 1e-12,
        format!("{cases} distributions, max |delta_main - delta_oracle| = {gap_residual:.2e}, max |y - (p + q)| = {y_residual:.2e} (tol 1e-12)"),
    )
}

/// Decomposition equality and inequalities plus the ρ identity at every
/// checkpoint.
fn decomposition_suite() -> Outcome {
    let checkpoints = default_checkpoints(1000);
    let mut equality: f64 = 0.0;
    let mut rho: f64 = 0.0;
    let mut violations = 0;
    let mut checked = 0;
    for tree in [figure3(), generate(&GameSpec::kuhn(3, 3)).unwrap()] {
        for seed in 1..=10 {
            let mut diag = Diagnostics::new(&tree);
            let mut rng = iteration_rng(seed, 99, 0);
            run(&tree, 1000, seed, |t, fb| {
                diag.observe(&tree, fb);
                if !checkpoints.contains(&t) {
                    return;
                }
                for (p, acc) in diag.players.iter().enumerate() {
                    let report = check_decomposition(tree.player(p), acc);
                    equality = equality.max(report.max_equality_residual);
                    violations += report.violations.len();
                    checked += report.checked;
                    for _ in 0..4 {
                        let deviation = random_plan(tree.player(p), &mut rng);
                        for i in 0..tree.player(p).num_infosets() {
                            rho = rho.max(rho_identity_residual(&tree, p, &deviation, &fb.profile, i));
                        }
                    }
                }
            });
        }
    }
    outcome(
        violations == 0 && equality <= 1e-9 && rho <= 1e-9,
        format!(
            "{checked} relations checked, {violations} violations, max equality residual {equality:.2e}, max rho residual {rho:.2e}"
        ),
    )
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn k33_config(out: &std::path::Path) -> ExperimentConfig {
    ExperimentConfig {
        game: GameSpec::kuhn(3, 3),
        iterations: 10_000,
        seeds: (1..=10).collect(),
        checkpoints: default_checkpoints(10_000),
        gaps: Gap::ALL.to_vec(),
        out: out.to_path_buf(),
        workers: 0,
        checks: true,
    }
}

fn delta_at(summary: &Summary, t: u64) -> Vec<f64> {
    summary
        .seeds
        .iter()
        .map(|s| s.checkpoints.iter().find(|c| c.t == t).expect("checkpoint").report.efce)
        .collect()
}

fn convergence(summary: &Summary) -> Outcome {
    let early = median(delta_at(summary, 100));
    let late = median(delta_at(summary, 10_000));
    let ratio = late / early;
    outcome(
        ratio <= 0.25,
        format!("median delta {early:.4e} at T=100, {late:.4e} at T=10^4, ratio {ratio:.4} (limit 0.25)"),
    )
}

fn coarse_decomposition(summary: &Summary, tree: &GameTree) -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut checked = 0;
    for s in &summary.seeds {
        for c in &s.checkpoints {
            worst = worst.max(coarse_decomposition_excess(tree, &c.report));
            checked += 1;
        }
    }
    outcome(
        worst <= 1e-12,
        format!("{checked} checkpoints, max gain(I) - sum_a max(0, gain(I,a)) = {worst:.2e} (tol 1e-12)"),
    )
}

fn game_sizes() -> Outcome {
    let expected: [(GameSpec, Vec<(usize, usize)>); 8] = [
        (GameSpec::kuhn(3, 3), vec![(12, 25); 3]),
        (GameSpec::kuhn(3, 4), vec![(16, 33); 3]),
        (GameSpec::goofspiel(2, 3), vec![(213, 262); 2]),
        (GameSpec::goofspiel(2, 4), vec![(8716, 10649); 2]),
        (GameSpec::goofspiel(3, 3), vec![(837, 934); 3]),
        (GameSpec::leduc(3, 3), vec![(3294, 7687); 3]),
        (GameSpec::battleship(), vec![(1413, 2965), (1873, 4101)]),
        (GameSpec::kuhn(2, 3), vec![(6, 13); 2]),
    ];
    let mut wrong = Vec::new();
    for (spec, sizes) in &expected {
        let tree = generate(spec).unwrap();
        let got: Vec<_> = tree.players().iter().map(|p| (p.num_infosets(), p.num_sequences())).collect();
        if &got != sizes {
            wrong.push(format!("{}: {got:?} != {sizes:?}", spec.label()));
        }
    }
    let detail = if wrong.is_empty() {
        format!("{} instances match, including G2.4 and L3.3", expected.len())
    } else {
        wrong.join("; ")
    };
    outcome(wrong.is_empty(), detail)
}

/// Largest regret-matching external regret against its bound over several
/// stream kinds, sizes and horizons.
fn external_regret_ratio() -> (f64, usize) {
    let mut worst: f64 = 0.0;
    let mut streams = 0;
    for n in [2, 3, 5, 10] {
        for t in [100u64, 1000, 10_000] {
            for kind in 0..3 {
                let mut rng = iteration_rng(n as u64 * 31 + kind, 17, t);
                let mut rm = ExternalRM::new(n);
                let mut totals = vec![0.0; n];
                let mut earned = 0.0;
                let range = if kind == 1 { 2.0 } else { 1.0 };
                for step in 0..t {
                    let p = rm.recommend();
                    let u: Vec<f64> = match kind {
                        // Reward the action the learner currently likes least.
                        0 => {
                            let worst_a = (0..n).min_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
                            (0..n).map(|a| (a == worst_a) as u8 as f64).collect()
                        }
                        1 => (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                        _ => (0..n).map(|a| (a as u64 == step % n as u64) as u8 as f64).collect(),
                    };
                    let value: f64 = p.iter().zip(&u).map(|(x, y)| x * y).sum();
                    earned += value;
                    for (s, v) in totals.iter_mut().zip(&u) {
                        *s += v;
                    }
                    rm.observe_against(&u, value, 1.0);
                }
                let regret = totals.iter().copied().fold(f64::NEG_INFINITY, f64::max) - earned;
                let bound = 2.0 * range * ((n as u64 * t) as f64).sqrt();
                worst = worst.max(regret / bound);
                streams += 1;
            }
        }
    }
    (worst, streams)
}

/// Max pairwise internal regret / t of the swap-regret minimizer at each
/// horizon on one stream.
fn internal_regret_per_round(seed: u64, horizons: &[u64]) -> (Vec<f64>, f64) {
    let n = 4;
    let mut rng = iteration_rng(seed, 23, 0);
    let mut rm = InternalRM::new(n);
    let mut swap = vec![vec![0.0; n]; n];
    let mut out = Vec::new();
    let mut stationary: f64 = 0.0;
    let last = *horizons.last().unwrap();
    // Mean payoffs shift every 50 rounds, so no single action dominates.
    let mut means: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    for t in 1..=last {
        if t % 50 == 1 {
            means = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        }
        let q = rm.recommend().to_vec();
        stationary = stationary.max(residual(&rm.matrix(), &q));
        let u: Vec<f64> = means.iter().map(|m| (m + rng.gen_range(-0.5..0.5)).clamp(0.0, 1.0)).collect();
        for a in 0..n {
            for b in 0..n {
                swap[a][b] += q[a] * (u[b] - u[a]);
            }
        }
        let chosen = icfr::regret::sample_index(&q, rng.gen_range(0.0..1.0));
        rm.observe(&u, chosen, 1.0);
        if horizons.contains(&t) {
            let max = swap.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
            out.push(max / t as f64);
        }
    }
    (out, stationary)
}

fn regret_minimizers() -> Outcome {
    let (external, streams) = external_regret_ratio();

    // Seed medians of max regret / t at each horizon, as in the convergence
    // criterion; single-seed ratios are dominated by seeds whose regret at
    // t = 250 happens to be close to zero.
    let mut early = Vec::new();
    let mut late = Vec::new();
    let mut stationary: f64 = 0.0;
    for seed in 1..=10 {
        let (r, s) = internal_regret_per_round(seed, &[250, 4000]);
        early.push(r[0]);
        late.push(r[1]);
        stationary = stationary.max(s);
    }
    let per_seed = early.iter().zip(&late).filter(|(e, l)| **l <= 0.5 * **e).count();
    let internal = median(late) / median(early);
    let mut rng = iteration_rng(5, 5, 5);
    for _ in 0..2000 {
        let n = rng.gen_range(2..9);
        let sparse = rng.gen_bool(0.3);
        let columns: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let mut c: Vec<f64> =
                    (0..n).map(|_| if sparse && rng.gen_bool(0.6) { 0.0 } else { rng.gen_range(0.0..1.0) }).collect();
                let k = rng.gen_range(0..n);
                c[k] += 1e-3;
                let s: f64 = c.iter().sum();
                c.iter().map(|x| x / s).collect()
            })
            .collect();
        let q = stationary_distribution(&columns).unwrap();
        stationary = stationary.max(residual(&columns, &q));
    }
    outcome(
        external <= 1.0 && internal <= 0.5 && stationary <= 1e-9,
        format!(
            "external regret <= {external:.3} x bound over {streams} streams; internal seed-median ratio {internal:.3} (limit 0.5, {per_seed}/10 seeds individually); stationary residual {stationary:.2e}"
        ),
    )
}

fn determinism() -> Outcome {
    let dirs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    let mut config = ExperimentConfig {
        game: GameSpec::kuhn(3, 3),
        iterations: 2000,
        seeds: (1..=6).collect(),
        checkpoints: default_checkpoints(2000),
        gaps: Gap::ALL.to_vec(),
        out: dirs[0].path().to_path_buf(),
        workers: 4,
        checks: true,
    };
    run_experiment(&config, false).unwrap();
    config.out = dirs[1].path().to_path_buf();
    config.workers = 1;
    run_experiment(&config, false).unwrap();
    let mut files: Vec<String> = config.seeds.iter().map(|&s| seed_file(s)).collect();
    files.push(AGGREGATE_FILE.into());
    files.push(WELFARE_FILE.into());
    let differing: Vec<&String> = files
        .iter()
        .filter(|f| std::fs::read(dirs[0].path().join(f)).unwrap() != std::fs::read(dirs[1].path().join(f)).unwrap())
        .collect();
    outcome(
        differing.is_empty(),
        format!("{} CSV files compared across 4-worker and 1-worker runs, {} differ", files.len(), differing.len()),
    )
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome, Duration, Duration)> = Vec::new();
    let mut timed = |k: usize, name: &'static str, limit_s: u64, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        results.push((k, name, o, start.elapsed(), Duration::from_secs(limit_s)));
    };

    timed(1, "regret/deviation identity", 60, &mut regret_gap_identity);
    timed(2, "oracle equivalence", 60, &mut oracle_equivalence);
    timed(3, "regret decompositions and rho identity", 300, &mut decomposition_suite);

    let dir = tempfile::tempdir().unwrap();
    let k33 = generate(&GameSpec::kuhn(3, 3)).unwrap();
    let start = Instant::now();
    let summary = run_experiment(&k33_config(dir.path()), false).unwrap();
    let shared = start.elapsed();
    timed(4, "convergence trend on K3.3", 600, &mut || {
        let mut o = convergence(&summary);
        o.detail.push_str(&format!("; run {:.1}s", shared.as_secs_f64()));
        o
    });
    timed(5, "game sizes", 300, &mut game_sizes);
    timed(6, "regret minimizers", 120, &mut regret_minimizers);
    timed(7, "coarse gap decomposition", 600, &mut || coarse_decomposition(&summary, &k33));
    timed(8, "determinism", 120, &mut determinism);

    let mut failed = 0;
    for (k, name, o, elapsed, limit) in &results {
        let extra = if *k == 4 { shared } else { Duration::ZERO };
        let in_time = *elapsed + extra <= *limit;
        let ok = o.passed && in_time;
        failed += !ok as usize;
        println!(
            "criterion {k} [{name}]: {}  {} ({:.2}s{})",
            if ok { "PASS" } else { "FAIL" },
            o.detail,
            (*elapsed + extra).as_secs_f64(),
            if in_time { String::new() } else { format!(", over the {}s limit", limit.as_secs()) }
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
