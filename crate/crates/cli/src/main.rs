mod report;

use clap::{Parser, Subcommand};
use levelk::complete::{cognitive_hierarchy, level_k, rationalizability};
use levelk::io::{
    grid_document, parse_anchor, parse_game_named, parse_levels_spec, parse_model_name,
    parse_scenario_named, Format, ResultDocument,
};
use levelk::lifted::{consistent_types, delta_grid, limit_sets};
use levelk::lp::{ebrs_enumerate, EbrsOptions};
use levelk::oracle::{oracle_check_grid, OracleOptions};
use levelk::robust::{
    genericity_check, restricted_ebrs, robust_ch_generic, robust_downward_check, robust_level_k,
    verify_family, Probe, Status,
};
use levelk::{Anchor, Error, Game, LevelDistribution, Player, RestrictionModel, SolutionGrid};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "levelk",
    version,
    about = "Exact level-k, CH and Δ-rationalizability solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Game file (TOML).
    #[arg(long, global = true)]
    game: Option<PathBuf>,

    /// Scenario file with model, anchor, levels and horizons.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Restriction model: downward, levelk or ch.
    #[arg(long, global = true)]
    model: Option<String>,

    /// Anchor file with `player1`/`player2` tables.
    #[arg(long, global = true)]
    anchor: Option<PathBuf>,

    /// Level distribution, e.g. `geometric:1/2`, `lexicographic:1/5`, `weights:1,1/2`.
    #[arg(long, global = true)]
    levels: Option<String>,

    #[arg(long, global = true)]
    k_max: Option<usize>,

    #[arg(long, global = true)]
    n_max: Option<usize>,

    /// Output format: md, csv or json.
    #[arg(long, global = true, default_value = "md")]
    format: Format,

    #[arg(long, global = true, default_value_t = 60)]
    oracle_bound: u32,

    /// Largest action count for exact best-reply set enumeration.
    #[arg(long, global = true, default_value_t = 12)]
    max_actions: usize,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Iterated strict dominance rounds.
    Rationalizability,
    /// Classic level-k behavior.
    LevelK,
    /// Cognitive hierarchy behavior.
    Ch,
    /// Δ-rationalizability grid.
    DeltaGrid,
    /// Limits of each grid row.
    Limits,
    /// Types whose grid cells lie inside the rationalizable rounds.
    ConsistentTypes,
    /// Exact best-reply sets of both players.
    Ebrs,
    /// Level-k behavior across all anchors.
    RobustLevelK,
    /// Downward robustness of rationalizability.
    RobustDownward,
    /// Strict best-reply witnesses for every action.
    Genericity,
    /// Robustness of CH-rationalizability in generic games.
    RobustCh,
    /// Re-derives the grid with an independent sampling oracle.
    OracleCheck,
}

/// Resolved inputs after merging the scenario with flags.
struct Setup {
    game: Game,
    model: Option<RestrictionModel>,
    anchor: Option<Anchor>,
    levels: Option<LevelDistribution>,
    k_max: usize,
    n_max: usize,
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn setup(cli: &Cli) -> Result<Setup, Error> {
    let game_path = cli
        .game
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("--game is required".into()))?;
    let game: Game = parse_game_named(&game_path.display().to_string(), &read(game_path)?)?;
    let scenario = match &cli.scenario {
        Some(p) => Some(parse_scenario_named(
            &p.display().to_string(),
            &read(p)?,
            &game,
        )?),
        None => None,
    };
    let mut levels = scenario.as_ref().and_then(|s| s.levels.clone());
    if let Some(spec) = &cli.levels {
        levels = Some(parse_levels_spec(spec)?);
    }
    let mut model = scenario.as_ref().map(|s| s.model.clone());
    if let Some(name) = &cli.model {
        model = Some(parse_model_name(name, levels.clone())?);
    } else if let (Some(RestrictionModel::CognitiveHierarchy(_)), Some(l)) = (&model, &levels) {
        model = Some(RestrictionModel::CognitiveHierarchy(l.clone()));
    }
    let mut anchor = scenario.as_ref().map(|s| s.anchor.clone());
    if let Some(p) = &cli.anchor {
        anchor = Some(parse_anchor(&p.display().to_string(), &read(p)?, &game)?);
    }
    let k_max = cli
        .k_max
        .or(scenario.as_ref().map(|s| s.k_max))
        .unwrap_or(4);
    let n_max = cli
        .n_max
        .or(scenario.as_ref().map(|s| s.n_max))
        .unwrap_or(k_max);
    Ok(Setup {
        game,
        model,
        anchor,
        levels,
        k_max,
        n_max,
    })
}

fn need<T: Clone>(value: &Option<T>, what: &str) -> Result<T, Error> {
    value
        .clone()
        .ok_or_else(|| Error::InvalidInput(format!("{what} is required (flag or scenario)")))
}

fn grid(s: &Setup) -> Result<SolutionGrid, Error> {
    let model = need(&s.model, "a model")?;
    let anchor = need(&s.anchor, "an anchor")?;
    delta_grid(&s.game, &model, &anchor, s.k_max, s.n_max)
}

enum Outcome {
    Ok(ResultDocument),
    /// Rendered, but the command found a failed check.
    Failed(ResultDocument),
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let s = setup(cli)?;
    let game = &s.game;
    let ebrs_opts = EbrsOptions {
        max_actions: cli.max_actions,
        ..EbrsOptions::default()
    };
    let doc = match cli.command {
        Command::Rationalizability => report::elimination(game, &rationalizability(game)?),
        Command::LevelK => {
            let anchor = need(&s.anchor, "an anchor")?;
            report::level_k(game, &level_k(game, &anchor, s.k_max)?)
        }
        Command::Ch => {
            let anchor = need(&s.anchor, "an anchor")?;
            let levels = need(&s.levels, "a level distribution")?;
            report::ch(game, &cognitive_hierarchy(game, &anchor, &levels, s.k_max)?)
        }
        Command::DeltaGrid => grid_document(game, &grid(&s)?),
        Command::Limits => {
            let g = grid(&s)?;
            report::limits(game, &g, &limit_sets(&g)?)
        }
        Command::ConsistentTypes => {
            let g = grid(&s)?;
            let trace = rationalizability(game)?;
            let per_n = (1..=g.n_max)
                .map(|n| consistent_types(&g, &trace, n).map(|t| (n, t)))
                .collect::<Result<Vec<_>, _>>()?;
            report::consistent(game, &g, &per_n)
        }
        Command::Ebrs => {
            let sets = Player::BOTH
                .into_iter()
                .map(|p| ebrs_enumerate(game, p, &ebrs_opts).map(|e| (p, e)))
                .collect::<Result<Vec<_>, _>>()?;
            report::ebrs(game, &sets)
        }
        Command::RobustLevelK => {
            let r = robust_level_k(game, s.k_max, &ebrs_opts)?;
            verify_family(game, &r)?;
            let regions = restricted_ebrs(game, Player::Two, &ebrs_opts)?;
            report::robust_level_k(game, &r, Player::Two, &regions)
        }
        Command::RobustDownward => {
            let r = robust_downward_check(game, s.k_max)?;
            let doc = report::robustness(game, "robust-downward", &r);
            if r.status == Status::Counterexample {
                return Ok(Outcome::Failed(doc));
            }
            doc
        }
        Command::Genericity => report::genericity(game, &genericity_check(game)?),
        Command::RobustCh => {
            let probes: Vec<Probe<_>> = match (&s.anchor, &s.levels) {
                (Some(anchor), Some(distribution)) => {
                    vec![Probe {
                        anchor: anchor.clone(),
                        distribution: distribution.clone(),
                    }]
                }
                _ => Vec::new(),
            };
            let r = robust_ch_generic(game, s.k_max, s.n_max, &probes)?;
            let doc = report::robustness(game, "robust-ch", &r);
            if r.status == Status::Counterexample {
                return Ok(Outcome::Failed(doc));
            }
            doc
        }
        Command::OracleCheck => {
            let g = grid(&s)?;
            let opts = OracleOptions {
                bound: cli.oracle_bound,
                ..OracleOptions::default()
            };
            let report = oracle_check_grid(game, &g, &opts)?;
            let doc = report::oracle(game, &g, &report, cli.oracle_bound);
            if !report.consistent() {
                return Ok(Outcome::Failed(doc));
            }
            doc
        }
    };
    Ok(Outcome::Ok(doc))
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidInput(_) | Error::Parse { .. } => 2,
        Error::Capacity(_) => 3,
        Error::Verification(_) => 4,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Ok(doc)) => {
            print!("{}", doc.render(cli.format));
            ExitCode::SUCCESS
        }
        Ok(Outcome::Failed(doc)) => {
            print!("{}", doc.render(cli.format));
            log::error!("check failed");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
