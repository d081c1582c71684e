//! `gt`: validate games, measure equilibrium gaps, convert and solve.
//!
//! Exit codes: 0 ok, 1 semantic or validation failure, 2 resource refusal,
//! 3 unreadable or malformed input (including bad command lines).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use gt_core::checks::{self, SuiteOptions};
use gt_core::convert::{cbr_to_json, counterfactual_best_response, efce_to_bce};
use gt_core::equilibrium::{self, parse_objective, utility_objective, EquilibriumOptions, Objective};
use gt_core::gap::{gap, GapOptions, Notion, DEFAULT_STATE_CAP};
use gt_core::metrics::{outcome_distribution, outcome_equivalent};
use gt_core::oracles::{brute_force_gap, OracleOptions};
use gt_core::profile_io::{profile_to_json, read_profile, serialize_profile, ProfileDoc};
use gt_core::{parse_game, Error, Game, MixtureOfProducts, Rational};

/// Behavior profiles are expanded into product supports up to this size.
const EXPANSION_CAP: u128 = 1 << 16;

#[derive(Parser)]
#[command(name = "gt", version, about = "Exact EFCE/BCE verification, conversion and computation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a game document; prints the validation report.
    Validate { game: PathBuf },
    /// Summarize a game: players, infosets, sequences, strategy counts.
    Info { game: PathBuf },
    /// Outcome distribution of a profile.
    Outcome { game: PathBuf, profile: PathBuf },
    /// Exact gap of a profile for an equilibrium notion.
    Gap {
        game: PathBuf,
        profile: PathBuf,
        #[arg(long, default_value = "efce")]
        notion: String,
        /// Exhaustive search over the deviation class instead of the DP.
        #[arg(long)]
        oracle: bool,
    },
    /// Convert an EFCE into an outcome-equivalent BCE.
    Convert {
        game: PathBuf,
        profile: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Rewrite a profile as a mixture of small-support products.
    Decompose { game: PathBuf, profile: PathBuf },
    /// Counterfactual best response at a sequence, e.g. `root:¬U`.
    Cbr {
        game: PathBuf,
        profile: PathBuf,
        /// 1-based player number.
        #[arg(long)]
        player: usize,
        #[arg(long)]
        sequence: String,
    },
    /// Compute an (optimal) EFCE or BCE.
    Solve {
        game: PathBuf,
        #[arg(long, default_value = "efce")]
        notion: String,
        /// Objective file, or `u<k>` for player k's utility, or `welfare`.
        #[arg(long)]
        objective: Option<String>,
        #[arg(long, default_value = "0")]
        epsilon: String,
        /// Also write a run report (inputs, hashes, outputs, wall time).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the reproduction suite; nonzero exit on any mismatch.
    #[command(name = "paper-check")]
    Reproduce {
        /// Smaller random samples.
        #[arg(long)]
        quick: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => 3,
            Error::CapExceeded { .. } => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

type CmdResult = Result<Value, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure { code: 3, message: format!("{}: {e}", path.display()) })
}

fn load_game(path: &Path) -> Result<Game, Failure> {
    Ok(Game::new(parse_game(&read(path)?)?)?)
}

fn load_doc(game: &Game, path: &Path) -> Result<ProfileDoc, Failure> {
    Ok(read_profile(game, &read(path)?)?)
}

/// Joint law of recommendations: behavior documents are expanded.
fn load_law(game: &Game, path: &Path) -> Result<MixtureOfProducts, Failure> {
    Ok(load_doc(game, path)?.expanded(game, EXPANSION_CAP)?)
}

fn gap_options() -> Result<GapOptions, Failure> {
    let state_cap = match std::env::var("GT_STATE_CAP") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure { code: 3, message: format!("GT_STATE_CAP: not a nonnegative integer: {v:?}") })?,
        Err(_) => DEFAULT_STATE_CAP,
    };
    Ok(GapOptions { state_cap })
}

fn notion(s: &str) -> Result<Notion, Failure> {
    Ok(s.parse::<Notion>()?)
}

fn rational(what: &str, s: &str) -> Result<Rational, Failure> {
    s.parse().map_err(|_| Failure { code: 3, message: format!("{what}: invalid rational {s:?}") })
}

fn cmd_validate(path: &Path) -> CmdResult {
    let tree = parse_game(&read(path)?)?;
    let report = tree.validate();
    let out = serde_json::to_value(&report).expect("reports serialize");
    if report.ok {
        Ok(out)
    } else {
        print_json(&out);
        Err(Failure { code: 1, message: format!("{} violation(s)", report.violations.len()) })
    }
}

fn cmd_info(path: &Path) -> CmdResult {
    let g = load_game(path)?;
    let players: Vec<Value> = (0..g.num_players())
        .map(|i| {
            let count: Option<u128> = g
                .player_infosets(i)
                .iter()
                .try_fold(1u128, |acc, &k| acc.checked_mul(g.infoset(k).actions.len() as u128));
            json!({
                "name": g.player_name(i),
                "infosets": g.player_infosets(i).len(),
                "sequences": (0..g.num_sequences(i)).map(|s| g.seq_name(i, s)).collect::<Vec<_>>(),
                "pure_strategies": count.map_or("overflow".to_string(), |c| c.to_string()),
            })
        })
        .collect();
    let infosets: Vec<Value> = g
        .infosets()
        .iter()
        .map(|info| {
            json!({
                "name": info.name,
                "player": g.player_name(info.player),
                "actions": info.actions,
                "nodes": info.nodes.len(),
            })
        })
        .collect();
    Ok(json!({
        "nodes": g.num_nodes(),
        "terminals": g.num_terminals(),
        "players": players,
        "infosets": infosets,
    }))
}

fn cmd_outcome(game: &Path, profile: &Path) -> CmdResult {
    let g = load_game(game)?;
    let pi = load_law(&g, profile)?;
    Ok(outcome_distribution(&g, &pi).to_json(&g))
}

fn cmd_gap(game: &Path, profile: &Path, notion_name: &str, oracle: bool) -> CmdResult {
    let g = load_game(game)?;
    let n = notion(notion_name)?;
    let pi = load_law(&g, profile)?;
    let report = if oracle { brute_force_gap(&g, &pi, n, &OracleOptions::default())? } else { gap(&g, &pi, n, &gap_options()?)? };
    Ok(report.to_json(&g))
}

fn cmd_convert(game: &Path, profile: &Path, output: Option<&Path>) -> CmdResult {
    let g = load_game(game)?;
    let doc = load_doc(&g, profile)?;
    let pi = doc.decomposed(&g)?;
    let opts = gap_options()?;
    let conv = efce_to_bce(&g, &pi);
    let gap_in = gap(&g, &pi, Notion::Efce, &opts)?.gap;
    let gap_out = gap(&g, &conv, Notion::Bce, &opts)?.gap;
    let mut out = Map::new();
    out.insert("efce_gap_in".into(), json!(gap_in.to_string()));
    out.insert("bce_gap_out".into(), json!(gap_out.to_string()));
    out.insert("outcome_equivalent".into(), json!(outcome_equivalent(&g, &pi, &conv)));
    match output {
        Some(path) => {
            std::fs::write(path, serialize_profile(&g, &conv))
                .map_err(|e| Failure { code: 2, message: format!("{}: {e}", path.display()) })?;
            out.insert("output".into(), json!(path.display().to_string()));
        }
        None => {
            out.insert("profile".into(), profile_to_json(&g, &conv));
        }
    }
    Ok(Value::Object(out))
}

fn cmd_decompose(game: &Path, profile: &Path) -> CmdResult {
    let g = load_game(game)?;
    let mix = load_doc(&g, profile)?.decomposed(&g)?;
    let k: Vec<Value> = (0..g.num_players())
        .map(|i| json!(mix.components.iter().map(|c| c.strategies[i].len()).max().unwrap_or(0)))
        .collect();
    Ok(json!({"max_support_per_player": k, "profile": profile_to_json(&g, &mix)}))
}

fn cmd_cbr(game: &Path, profile: &Path, player: usize, sequence: &str) -> CmdResult {
    let g = load_game(game)?;
    if player == 0 || player > g.num_players() {
        return Err(Error::UnknownPlayer(player).into());
    }
    let i = player - 1;
    let seq = g.parse_seq(i, sequence)?;
    let pi = load_law(&g, profile)?;
    let cbr = counterfactual_best_response(&g, &pi, i, seq);
    Ok(cbr_to_json(&g, seq, i, &cbr))
}

fn objective(g: &Game, spec: &str) -> Result<Objective, Failure> {
    if spec == "welfare" {
        return Ok(utility_objective(g, &(0..g.num_players()).collect::<Vec<_>>()));
    }
    if let Some(k) = spec.strip_prefix('u').and_then(|k| k.parse::<usize>().ok()) {
        if k == 0 || k > g.num_players() {
            return Err(Error::UnknownPlayer(k).into());
        }
        return Ok(utility_objective(g, &[k - 1]));
    }
    Ok(parse_objective(g, &read(Path::new(spec))?)?)
}

fn cmd_solve(game: &Path, notion_name: &str, obj: Option<&str>, epsilon: &str) -> CmdResult {
    let g = load_game(game)?;
    let n = notion(notion_name)?;
    let eps = rational("--epsilon", epsilon)?;
    let c = obj.map(|s| objective(&g, s)).transpose()?;
    let opts = EquilibriumOptions { gap: gap_options()?, ..EquilibriumOptions::default() };
    let solved = equilibrium::solve(&g, n, &eps, c.as_ref(), &opts)?;
    Ok(solved.to_json(&g))
}

fn cmd_reproduce(quick: bool) -> CmdResult {
    let opts = if quick {
        SuiteOptions { random_games: 40, tiny_games: 10, behaviors_per_fixture: 20, objective_pairs: 5, ..SuiteOptions::default() }
    } else {
        SuiteOptions::default()
    };
    let results = checks::run_all(&opts);
    let mut failed = 0;
    for r in &results {
        eprintln!("{}", r.line());
        for n in &r.notes {
            eprintln!("      note: {n}");
        }
        for f in r.failures.iter().take(10) {
            eprintln!("      fail: {f}");
        }
        failed += usize::from(!r.passed());
    }
    let summary: Vec<Value> = results
        .iter()
        .map(|r| json!({"criterion": r.id, "title": r.title, "passed": r.passed(), "checks": r.checks}))
        .collect();
    let out = json!({"passed": failed == 0, "criteria": summary});
    if failed > 0 {
        print_json(&out);
        return Err(Failure { code: 1, message: format!("{failed} criterion(s) failed") });
    }
    Ok(out)
}

/// A closed pipe (`gt ... | head`) is not an error worth a panic.
fn print_json(v: &Value) {
    let text = serde_json::to_string_pretty(v).expect("values serialize");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn sha256(path: &Path) -> String {
    match std::fs::read(path) {
        Ok(bytes) => format!("{:x}", Sha256::digest(bytes)),
        Err(_) => "unreadable".into(),
    }
}

fn write_report(path: &Path, inputs: &[&Path], output: &Value, started: Instant) -> Result<(), Failure> {
    let report = json!({
        "command": std::env::args().collect::<Vec<_>>(),
        "inputs": inputs.iter().map(|p| json!({"path": p.display().to_string(), "sha256": sha256(p)})).collect::<Vec<_>>(),
        "outputs": output,
        "wall_time_ms": started.elapsed().as_millis() as u64,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let text = serde_json::to_string_pretty(&report).expect("values serialize") + "\n";
    std::fs::write(path, text).map_err(|e| Failure { code: 2, message: format!("{}: {e}", path.display()) })
}

fn run(cli: Cli) -> CmdResult {
    match &cli.command {
        Command::Validate { game } => cmd_validate(game),
        Command::Info { game } => cmd_info(game),
        Command::Outcome { game, profile } => cmd_outcome(game, profile),
        Command::Gap { game, profile, notion, oracle } => cmd_gap(game, profile, notion, *oracle),
        Command::Convert { game, profile, output } => cmd_convert(game, profile, output.as_deref()),
        Command::Decompose { game, profile } => cmd_decompose(game, profile),
        Command::Cbr { game, profile, player, sequence } => cmd_cbr(game, profile, *player, sequence),
        Command::Solve { game, notion, objective, epsilon, report } => {
            let started = Instant::now();
            let out = cmd_solve(game, notion, objective.as_deref(), epsilon)?;
            if let Some(path) = report {
                let mut inputs = vec![game.as_path()];
                if let Some(o) = objective.as_deref().filter(|o| Path::new(o).is_file()) {
                    inputs.push(Path::new(o));
                }
                write_report(path, &inputs, &out, started)?;
            }
            Ok(out)
        }
        Command::Reproduce { quick } => cmd_reproduce(*quick),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli) {
        Ok(v) => {
            print_json(&v);
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("gt: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
