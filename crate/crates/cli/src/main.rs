//! Command-line driver for the Stackelberg solvers.

mod formats;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sefg_core::game::PlayerId;
use sefg_core::games::{
    gen_fig1a_shape, gen_goofspiel3, gen_observation1_game, gen_search_game, SearchGameConfig,
};
use sefg_core::numeric::{parse_rational, rat_i, Rational};
use sefg_core::seqform::{SequenceForm, SequenceId};

use run::{CliError, Mode, RunConfig, Verify, EXIT_INTERNAL};

#[derive(Parser)]
#[command(
    name = "sefg",
    about = "Exact solvers for Stackelberg extensive-form games with trembling-hand perturbations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a game: one equilibrium or an anytime ε-schedule.
    Solve(SolveArgs),
    /// Generate a benchmark game file.
    Gen(GenArgs),
    /// Dump internal representations for golden-file checks.
    Dump(DumpArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Game file.
    #[arg(long)]
    game: PathBuf,
    /// Solve mode.
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Perturbation scheme: the built-in default or a scheme file path.
    #[arg(long, default_value = "miltersen")]
    scheme: String,
    /// Perturbation magnitude for sse-perturbed, e.g. 1/100.
    #[arg(long)]
    eps: Option<String>,
    /// Strictly decreasing ε list for qpsse-anytime, e.g. 1/10,1/100.
    #[arg(long)]
    eps_schedule: Option<String>,
    /// Solution file path.
    #[arg(long)]
    out_solution: Option<PathBuf>,
    /// Sweep CSV path (qpsse-anytime only).
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Verification level.
    #[arg(long, value_enum, default_value = "standard")]
    verify: VerifyArg,
    /// Per-ε wall-clock budget in seconds; exceeded rows are marked and the
    /// run continues.
    #[arg(long)]
    timeout_seconds: Option<u64>,
    /// Report wall-clock times; turn off for byte-reproducible outputs.
    #[arg(long, value_enum, default_value = "on")]
    timing: OnOff,
    /// Log solver statistics (branch nodes, LP pivot counts) to stderr.
    #[arg(long)]
    verbose: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    SseUnperturbed,
    SsePerturbed,
    QpsseAnytime,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyArg {
    Off,
    Standard,
    Paranoid,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum OnOff {
    On,
    Off,
}

#[derive(Args)]
struct GenArgs {
    /// Which benchmark to generate.
    #[arg(value_enum)]
    which: Benchmark,
    /// Horizon for the search game.
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Output path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Benchmark {
    Goofspiel3,
    SearchGame,
    Obs1,
    Fig1a,
}

#[derive(Args)]
struct DumpArgs {
    /// Game file.
    #[arg(long)]
    game: PathBuf,
    /// What to dump.
    #[arg(value_enum)]
    what: DumpWhat,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DumpWhat {
    /// Sequence sets, flow matrices and payoff matrices, exact.
    Matrices,
    /// The unperturbed root recommendation LP in the exact plain-text form.
    RootLp,
}

fn parse_rational_arg(s: &str, what: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|e| CliError::config(format!("{what}: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = std::panic::catch_unwind(|| dispatch(&cli));
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("{{\"code\":{},\"error\":{:?}}}", e.code, e.message);
            ExitCode::from(e.code as u8)
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| String::from("panic"));
            eprintln!("{{\"code\":{EXIT_INTERNAL},\"error\":{message:?}}}");
            ExitCode::from(EXIT_INTERNAL as u8)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve(args) => {
            let eps = match &args.eps {
                Some(s) => Some(parse_rational_arg(s, "--eps")?),
                None => None,
            };
            let schedule = match &args.eps_schedule {
                None => Vec::new(),
                Some(s) => s
                    .split(',')
                    .map(|part| parse_rational_arg(part.trim(), "--eps-schedule"))
                    .collect::<Result<Vec<_>, _>>()?,
            };
            let scheme_file = match args.scheme.as_str() {
                "miltersen" => None,
                path => Some(PathBuf::from(path)),
            };
            let cfg = RunConfig {
                game: args.game.clone(),
                mode: match args.mode {
                    ModeArg::SseUnperturbed => Mode::SseUnperturbed,
                    ModeArg::SsePerturbed => Mode::SsePerturbed,
                    ModeArg::QpsseAnytime => Mode::QpsseAnytime,
                },
                scheme_file,
                eps,
                schedule,
                out_solution: args.out_solution.clone(),
                out_csv: args.out_csv.clone(),
                verify: match args.verify {
                    VerifyArg::Off => Verify::Off,
                    VerifyArg::Standard => Verify::Standard,
                    VerifyArg::Paranoid => Verify::Paranoid,
                },
                timeout_seconds: args.timeout_seconds,
                timing: args.timing == OnOff::On,
                verbose: args.verbose,
            };
            run::run(&cfg)
        }
        Command::Gen(args) => {
            let game = match args.which {
                Benchmark::Goofspiel3 => gen_goofspiel3(),
                Benchmark::SearchGame => gen_search_game(&SearchGameConfig {
                    horizon: args.k,
                    ..SearchGameConfig::default()
                }),
                Benchmark::Obs1 => gen_observation1_game(&[
                    (rat_i(1), rat_i(0)),
                    (rat_i(0), rat_i(0)),
                    (rat_i(2), rat_i(0)),
                ])
                .expect("fixed payoff arity"),
                Benchmark::Fig1a => gen_fig1a_shape(&[
                    (rat_i(3), rat_i(1)),
                    (rat_i(0), rat_i(0)),
                    (rat_i(2), rat_i(2)),
                    (rat_i(1), rat_i(0)),
                    (rat_i(0), rat_i(1)),
                    (rat_i(4), rat_i(3)),
                ])
                .expect("fixed payoff arity"),
            };
            std::fs::write(&args.out, formats::write_game(&game))
                .map_err(|e| CliError::config(format!("cannot write {}: {e}", args.out.display())))
        }
        Command::Dump(args) => {
            let text = std::fs::read_to_string(&args.game)
                .map_err(|e| CliError::config(format!("cannot read {}: {e}", args.game.display())))?;
            let game = formats::parse_game(&text)
                .map_err(|e| CliError::config(format!("game file: {e}")))?;
            sefg_core::game::validate_perfect_recall(&game)
                .map_err(|e| CliError::config(format!("game violates perfect recall: {e}")))?;
            let sf = SequenceForm::new(&game);
            let dump = match args.what {
                DumpWhat::Matrices => dump_matrices(&game, &sf),
                DumpWhat::RootLp => {
                    let rel = sefg_core::seqform::relevance(&game, &sf);
                    let inst = sefg_core::perturb::PerturbedInstance::unperturbed(&sf);
                    let lp = sefg_core::sefce::build_sefce_lp(
                        &game,
                        &sf,
                        &rel,
                        &inst,
                        &sefg_core::sefce::BnbNode::root(),
                    )
                    .map_err(|e| CliError::infeasible(e.to_string()))?;
                    lp.lp.dump()
                }
            };
            match &args.out {
                None => {
                    print!("{dump}");
                    Ok(())
                }
                Some(path) => std::fs::write(path, dump)
                    .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display()))),
            }
        }
    }
}

/// Plain-text exact dump of Σ, F, f and the payoff matrices.
fn dump_matrices(game: &sefg_core::game::GameTree, sf: &SequenceForm) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    for player in [PlayerId::Leader, PlayerId::Follower] {
        let n = sf.num_sequences(player);
        let labels: Vec<String> = (0..n)
            .map(|i| sf.seq_label(game, player, SequenceId(i as u32)))
            .collect();
        let _ = writeln!(out, "sigma {player}: {}", labels.join(" "));
    }
    for player in [PlayerId::Leader, PlayerId::Follower] {
        let (rows, rhs) = sf.flow_constraints(player);
        let n = sf.num_sequences(player);
        let _ = writeln!(out, "F {player}:");
        for row in rows {
            let mut dense = vec![rat_i(0); n];
            for (c, v) in row {
                dense[*c as usize] = v.clone();
            }
            let cells: Vec<String> = dense.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", cells.join(" "));
        }
        let cells: Vec<String> = rhs.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "f {player}: {}", cells.join(" "));
    }
    let n_l = sf.num_sequences(PlayerId::Leader);
    let n_f = sf.num_sequences(PlayerId::Follower);
    for player in [PlayerId::Leader, PlayerId::Follower] {
        let _ = writeln!(out, "U {player}:");
        for l in 0..n_l as u32 {
            let cells: Vec<String> = (0..n_f as u32)
                .map(|f| {
                    sf.payoff_entry(SequenceId(l), SequenceId(f), player)
                        .to_string()
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(" "));
        }
    }
    out
}
