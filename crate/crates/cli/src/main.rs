use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use icfr::games::{GameFamily, GameSpec};
use icfr_cli::config::{parse_gaps, parse_seeds, ConfigFile, Gap, SeedItem, SeedSpec, OUT_DIR_ENV};
use icfr_cli::experiment::run_experiment;
use icfr_cli::games_io::{describe, export_game, import_game};

#[derive(Parser)]
#[command(name = "icfr", version, about = "Run ICFR dynamics and measure equilibrium gaps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the dynamics over a set of seeds and write CSV/JSON results.
    Run(RunArgs),
    /// Generate a game and write it in the text format.
    Export {
        #[command(flatten)]
        game: GameArgs,
        /// Destination file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Parse and validate a game file, then print its size.
    Import {
        path: PathBuf,
        /// Also write the parsed game back out in canonical form.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Default)]
struct GameArgs {
    /// kuhn, leduc, goofspiel, battleship, figure1 or figure3.
    #[arg(long)]
    game: Option<GameFamily>,
    #[arg(long)]
    players: Option<usize>,
    #[arg(long)]
    ranks: Option<usize>,
    /// Battleship grid as ROWSxCOLS.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Battleship shots per player.
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    sorted_deck: bool,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    limited_info: Option<bool>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    game: GameArgs,
    /// Iterations per seed.
    #[arg(short = 'T', long = "iterations")]
    iterations: Option<u64>,
    /// A count n (seeds 1..=n), a range a..b, or a comma-separated list.
    #[arg(long)]
    seeds: Option<String>,
    /// Comma-separated iteration counts; T is always included.
    #[arg(long, value_delimiter = ',')]
    checkpoints: Option<Vec<u64>>,
    /// Comma-separated subset of efce,efcce,nfcce.
    #[arg(long)]
    gaps: Option<String>,
    /// Output directory (default: $ICFR_OUT_DIR, then ./icfr-out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
    /// TOML config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Skip the per-checkpoint invariant checks.
    #[arg(long)]
    no_checks: bool,
    /// Continue from snapshots left in the output directory.
    #[arg(long)]
    resume: bool,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (r, c) = s.split_once(['x', 'X', ',']).ok_or_else(|| format!("expected ROWSxCOLS, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(r)?, parse(c)?))
}

impl GameArgs {
    fn overrides(&self) -> ConfigFile {
        ConfigFile {
            game: self.game,
            players: self.players,
            ranks: self.ranks,
            grid: self.grid,
            rounds: self.rounds,
            sorted_deck: self.sorted_deck.then_some(true),
            limited_info: self.limited_info,
            ..ConfigFile::default()
        }
    }

    fn spec(&self) -> Result<GameSpec> {
        let spec = self.overrides().game_spec();
        spec.check()?;
        Ok(spec)
    }
}

fn run(args: RunArgs) -> Result<bool> {
    let base = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let seeds = args
        .seeds
        .as_deref()
        .map(|s| parse_seeds(s).map(|v| SeedSpec::List(v.into_iter().map(SeedItem::Seed).collect())))
        .transpose()?;
    let gaps: Option<Vec<Gap>> = args.gaps.as_deref().map(parse_gaps).transpose()?;
    let flags = ConfigFile {
        iterations: args.iterations,
        seeds,
        checkpoints: args.checkpoints,
        gaps,
        out: args.out,
        workers: args.workers,
        checks: args.no_checks.then_some(false),
        ..args.game.overrides()
    };
    let env_out = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let config = base.overlay(flags).resolve(env_out)?;
    eprintln!(
        "{}: T = {}, {} seeds, writing to {}",
        config.game.label(),
        config.iterations,
        config.seeds.len(),
        config.out.display()
    );
    let summary = run_experiment(&config, args.resume)?;
    for s in &summary.seeds {
        let r = s.final_report();
        eprintln!("seed {}: efce {:.6e}  efcce {:.6e}  nfcce {:.6e}", s.seed, r.efce, r.efcce, r.nfcce);
    }
    for (seed, failure) in summary.failures() {
        eprintln!("check failed, seed {seed}: {failure}");
    }
    Ok(summary.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Export { game, out } => game.spec().and_then(|spec| {
            let tree = export_game(&spec, &out)?;
            eprint!("{}", describe(&tree));
            Ok(true)
        }),
        Command::Import { path, out } => import_game(&path).and_then(|tree| {
            print!("{}", describe(&tree));
            if let Some(out) = out {
                std::fs::write(&out, icfr::efg::text::export(&tree)?)?;
            }
            Ok(true)
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
