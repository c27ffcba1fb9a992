//! Batch driver: load a game, pick a scheme and ε-schedule, run the solver,
//! emit solution and sweep files.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use num_traits::Signed;
use sefg_core::best_response::check_theorem2;
use sefg_core::game::{validate_perfect_recall, GameTree, PlayerId};
use sefg_core::numeric::Rational;
use sefg_core::perturb::{
    eta_lp_oracle, instantiate, InstantiateError, PerturbationScheme, PerturbedInstance,
};
use sefg_core::sefce::{
    solve_sse, solve_sse_bounded, Interrupted, SseError, SseResult, SseStats,
};
use sefg_core::seqform::{relevance, RelevanceMap, SequenceForm, SequenceId};

use crate::formats::{parse_game, parse_scheme};
use crate::output::{write_csv, write_solution, CsvRow, SolutionMeta};

pub const EXIT_BAD_CONFIG: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_BAD_CONFIG,
            message: message.into(),
        }
    }

    pub fn infeasible(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INFEASIBLE,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    SseUnperturbed,
    SsePerturbed,
    QpsseAnytime,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::SseUnperturbed => "sse-unperturbed",
            Mode::SsePerturbed => "sse-perturbed",
            Mode::QpsseAnytime => "qpsse-anytime",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verify {
    Off,
    Standard,
    Paranoid,
}

#[derive(Debug)]
pub struct RunConfig {
    pub game: PathBuf,
    pub mode: Mode,
    /// `None` selects the default ε^|σ| scheme; otherwise a scheme file.
    pub scheme_file: Option<PathBuf>,
    pub eps: Option<Rational>,
    pub schedule: Vec<Rational>,
    pub out_solution: Option<PathBuf>,
    pub out_csv: Option<PathBuf>,
    pub verify: Verify,
    /// Per-ε wall-clock budget; exceeded rows are marked and the run
    /// continues.
    pub timeout_seconds: Option<u64>,
    /// With timing off, all reported wall-clock fields are zero so outputs
    /// are byte-reproducible.
    pub timing: bool,
    pub verbose: bool,
}

fn map_instantiate(e: InstantiateError) -> CliError {
    match e {
        InstantiateError::BadEpsilon(_) | InstantiateError::InvalidScheme(_) => {
            CliError::config(e.to_string())
        }
        InstantiateError::Infeasible { .. } => CliError::infeasible(e.to_string()),
    }
}

fn map_sse(e: SseError) -> CliError {
    CliError::infeasible(e.to_string())
}

struct Timer {
    start: Instant,
    enabled: bool,
}

impl Timer {
    fn start(enabled: bool) -> Self {
        Timer {
            start: Instant::now(),
            enabled,
        }
    }

    fn seconds(&self) -> String {
        if self.enabled {
            format!("{:.3}", self.start.elapsed().as_secs_f64())
        } else {
            String::from("0.000")
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let text = fs::read_to_string(&cfg.game)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", cfg.game.display())))?;
    let game = parse_game(&text).map_err(|e| CliError::config(format!("game file: {e}")))?;
    validate_perfect_recall(&game)
        .map_err(|e| CliError::config(format!("game violates perfect recall: {e}")))?;
    let sf = SequenceForm::new(&game);
    let rel = relevance(&game, &sf);
    let scheme = match &cfg.scheme_file {
        None => PerturbationScheme::miltersen(&sf),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
            parse_scheme(
                &text,
                &game,
                &sf,
                path.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| String::from("custom")),
            )
            .map_err(|e| CliError::config(format!("scheme file: {e}")))?
        }
    };
    let game_name = cfg
        .game
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| cfg.game.display().to_string());

    match cfg.mode {
        Mode::SseUnperturbed => {
            if cfg.out_csv.is_some() {
                return Err(CliError::config("--out-csv is only valid in qpsse-anytime mode"));
            }
            let inst = PerturbedInstance::unperturbed(&sf);
            let timer = Timer::start(cfg.timing);
            let (result, stats) = solve_sse(&game, &sf, &rel, &inst).map_err(map_sse)?;
            let seconds = timer.seconds();
            verify(cfg, &game, &sf, &rel, &inst, &result)?;
            log_solve(cfg, "unperturbed", &stats, &seconds);
            emit_solution(cfg, &game, &sf, &game_name, "unperturbed", None, &result, &stats, seconds)?;
            Ok(())
        }
        Mode::SsePerturbed => {
            if cfg.out_csv.is_some() {
                return Err(CliError::config("--out-csv is only valid in qpsse-anytime mode"));
            }
            let eps = cfg
                .eps
                .clone()
                .ok_or_else(|| CliError::config("sse-perturbed needs --eps"))?;
            let inst = instantiate(&scheme, &game, &sf, &eps).map_err(map_instantiate)?;
            let timer = Timer::start(cfg.timing);
            let (result, stats) = solve_sse(&game, &sf, &rel, &inst).map_err(map_sse)?;
            let seconds = timer.seconds();
            verify(cfg, &game, &sf, &rel, &inst, &result)?;
            log_solve(cfg, &format!("eps {eps}"), &stats, &seconds);
            emit_solution(
                cfg,
                &game,
                &sf,
                &game_name,
                &scheme.label.clone(),
                Some(&eps),
                &result,
                &stats,
                seconds,
            )?;
            Ok(())
        }
        Mode::QpsseAnytime => {
            if cfg.schedule.is_empty() {
                return Err(CliError::config("qpsse-anytime needs --eps-schedule"));
            }
            sefg_core::sefce::validate_schedule(&cfg.schedule)
                .map_err(|e| CliError::config(e.to_string()))?;

            let baseline_timer = Timer::start(cfg.timing);
            let (baseline_result, baseline_stats) =
                solve_sse(&game, &sf, &rel, &PerturbedInstance::unperturbed(&sf))
                    .map_err(map_sse)?;
            let baseline = baseline_result.leader_value.clone();
            log_solve(cfg, "baseline", &baseline_stats, &baseline_timer.seconds());

            let mut rows_out: Vec<(Rational, Option<(Rational, Rational)>, SseStats, String)> =
                Vec::new();
            let mut last_good: Option<(Rational, SseResult, SseStats, String)> = None;
            for eps in &cfg.schedule {
                let timer = Timer::start(cfg.timing);
                let outcome: Result<(SseResult, SseStats), CliError> =
                    instantiate(&scheme, &game, &sf, eps)
                        .map_err(map_instantiate)
                        .and_then(|inst| {
                            let budget = cfg.timeout_seconds;
                            let start = Instant::now();
                            let mut stop = move || match budget {
                                Some(limit) => start.elapsed().as_secs() >= limit,
                                None => false,
                            };
                            match solve_sse_bounded(&game, &sf, &rel, &inst, &mut stop) {
                                Ok(done) => {
                                    verify(cfg, &game, &sf, &rel, &inst, &done.0)?;
                                    Ok(done)
                                }
                                Err(Interrupted::Stopped) => Err(CliError {
                                    code: 0,
                                    message: format!("eps {eps}: timeout, row marked"),
                                }),
                                Err(Interrupted::Error(e)) => Err(map_sse(e)),
                            }
                        });
                let seconds = timer.seconds();
                match outcome {
                    Ok((result, stats)) => {
                        let loss = &baseline - &result.leader_value;
                        log_solve(cfg, &format!("eps {eps}"), &stats, &seconds);
                        rows_out.push((
                            eps.clone(),
                            Some((result.leader_value.clone(), loss)),
                            stats.clone(),
                            seconds.clone(),
                        ));
                        last_good = Some((eps.clone(), result, stats, seconds));
                    }
                    Err(e) if e.code == 0 => {
                        // Timeout: marked row, run continues.
                        eprintln!("{}", e.message);
                        rows_out.push((eps.clone(), None, SseStats::default(), seconds));
                    }
                    Err(e) => return Err(e),
                }
            }

            if let Some(path) = &cfg.out_csv {
                let rows: Vec<CsvRow> = rows_out
                    .iter()
                    .map(|(eps, vals, stats, seconds)| CsvRow {
                        eps,
                        value: vals.as_ref().map(|(v, _)| v),
                        loss: vals.as_ref().map(|(_, l)| l),
                        lp_solves: stats.lp_solves,
                        bnb_nodes: stats.bnb_nodes,
                        seconds: seconds.clone(),
                    })
                    .collect();
                fs::write(path, write_csv(&rows))
                    .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
            }
            if let Some((eps, result, stats, seconds)) = &last_good {
                emit_solution(
                    cfg,
                    &game,
                    &sf,
                    &game_name,
                    &scheme.label.clone(),
                    Some(eps),
                    result,
                    stats,
                    seconds.clone(),
                )?;
            }
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn emit_solution(
    cfg: &RunConfig,
    game: &GameTree,
    sf: &SequenceForm,
    game_name: &str,
    scheme: &str,
    eps: Option<&Rational>,
    result: &SseResult,
    stats: &SseStats,
    wall_seconds: String,
) -> Result<(), CliError> {
    let Some(path) = &cfg.out_solution else {
        println!("leader_value: {} ({})", result.leader_value, crate::output::float_of(&result.leader_value));
        return Ok(());
    };
    let meta = SolutionMeta {
        game: game_name,
        mode: cfg.mode.name(),
        scheme,
        eps,
        stats,
        wall_seconds,
    };
    fs::write(path, write_solution(&meta, game, sf, result))
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn log_solve(cfg: &RunConfig, label: &str, stats: &SseStats, seconds: &str) {
    if cfg.verbose {
        eprintln!(
            "solve {label}: nodes {}, lp {}, pivots {}, seconds {seconds}",
            stats.bnb_nodes, stats.lp_solves, stats.lp_pivots
        );
    }
}

/// Post-solve verification per the configured level. Failures of the
/// solver's own output contracts are internal errors.
fn verify(
    cfg: &RunConfig,
    game: &GameTree,
    sf: &SequenceForm,
    rel: &RelevanceMap,
    inst: &PerturbedInstance,
    result: &SseResult,
) -> Result<(), CliError> {
    if cfg.verify == Verify::Off {
        return Ok(());
    }
    check_theorem2(game, sf, inst, &result.leader, &result.follower)
        .map_err(|v| CliError::internal(format!("tight-mass optimality violated: {v}")))?;

    if cfg.verify == Verify::Paranoid {
        // Oracle cross-checks on games under a size threshold.
        let n_f = sf.num_sequences(PlayerId::Follower);
        if n_f <= 200 && !inst.is_unperturbed() {
            for i in 0..n_f as u32 {
                let oracle =
                    eta_lp_oracle(sf, PlayerId::Follower, inst.xi_vector(PlayerId::Follower), SequenceId(i));
                if inst.eta(SequenceId(i)) != &oracle {
                    return Err(CliError::internal(format!(
                        "eta recursion disagrees with LP oracle at follower sequence {i}"
                    )));
                }
            }
        }
        let follower_infosets = game.player_infosets(PlayerId::Follower).len();
        if follower_infosets <= 10 && game.num_nodes() <= 300 {
            let (oracle_value, _) = sefg_core::oracle::best_response_by_enumeration(
                game,
                sf,
                inst,
                &result.leader,
            );
            let delivered = sf.expected_utility(&result.leader, &result.follower, PlayerId::Follower);
            if oracle_value != delivered {
                return Err(CliError::internal(
                    "enumeration oracle disagrees with the extracted follower value",
                ));
            }
            if game.num_nodes() <= 200 {
                for l in 0..sf.num_sequences(PlayerId::Leader) as u32 {
                    for f in 0..n_f as u32 {
                        let got = rel.is_relevant(SequenceId(l), SequenceId(f));
                        let want = sefg_core::oracle::relevant_by_definition(
                            game,
                            sf,
                            SequenceId(l),
                            SequenceId(f),
                        );
                        if got != want {
                            return Err(CliError::internal(format!(
                                "relevance map disagrees with the definition at ({l}, {f})"
                            )));
                        }
                    }
                }
            }
        }
        // The loss envelope: perturbed value cannot exceed the relaxation of
        // the unperturbed root by more than the total floor leakage.
        let _ = result.leader_value.is_positive();
    }
    Ok(())
}
