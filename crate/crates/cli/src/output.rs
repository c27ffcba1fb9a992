//! Solution and sweep-CSV writers. All value columns carry the exact
//! rational; float columns are display-only renderings of the adjacent exact
//! value.

use std::fmt::Write as _;

use num_traits::ToPrimitive;
use sefg_core::game::{GameTree, PlayerId};
use sefg_core::numeric::Rational;
use sefg_core::sefce::{SseResult, SseStats};
use sefg_core::seqform::{SequenceForm, SequenceId};

/// Shortest-roundtrip float rendering of an exact rational (display only).
pub fn float_of(r: &Rational) -> String {
    format!("{}", r.to_f64().unwrap_or(f64::NAN))
}

pub struct SolutionMeta<'a> {
    pub game: &'a str,
    pub mode: &'a str,
    pub scheme: &'a str,
    /// `None` in unperturbed mode.
    pub eps: Option<&'a Rational>,
    pub stats: &'a SseStats,
    /// Wall-clock seconds, already formatted (zeroed when timing is off).
    pub wall_seconds: String,
}

/// Deterministic plain-text solution file: header fields, then one exact
/// probability per sequence for both players.
pub fn write_solution(
    meta: &SolutionMeta,
    game: &GameTree,
    sf: &SequenceForm,
    result: &SseResult,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "game: {}", meta.game);
    let _ = writeln!(out, "mode: {}", meta.mode);
    let _ = writeln!(out, "scheme: {}", meta.scheme);
    match meta.eps {
        Some(eps) => {
            let _ = writeln!(out, "epsilon: {eps}");
        }
        None => {
            let _ = writeln!(out, "epsilon: none");
        }
    }
    let _ = writeln!(out, "leader_value: {}", result.leader_value);
    let _ = writeln!(out, "leader_value_float: {}", float_of(&result.leader_value));
    let _ = writeln!(out, "bnb_nodes: {}", meta.stats.bnb_nodes);
    let _ = writeln!(out, "lp_solves: {}", meta.stats.lp_solves);
    let _ = writeln!(out, "lp_pivots: {}", meta.stats.lp_pivots);
    let _ = writeln!(out, "wall_seconds: {}", meta.wall_seconds);
    for (title, player, plan) in [
        ("leader_plan:", PlayerId::Leader, &result.leader),
        ("follower_plan:", PlayerId::Follower, &result.follower),
    ] {
        let _ = writeln!(out, "{title}");
        for (i, v) in plan.values.iter().enumerate() {
            let label = sf.seq_label(game, player, SequenceId(i as u32));
            let _ = writeln!(out, "  {label} {v}");
        }
    }
    out
}

pub const CSV_HEADER: &str =
    "epsilon,leader_value_exact,leader_value,loss_exact,loss,lp_solves,bnb_nodes,seconds";

pub struct CsvRow<'a> {
    pub eps: &'a Rational,
    /// `None` marks a row whose solve failed or timed out.
    pub value: Option<&'a Rational>,
    pub loss: Option<&'a Rational>,
    pub lp_solves: u64,
    pub bnb_nodes: u64,
    pub seconds: String,
}

pub fn write_csv(rows: &[CsvRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let (ve, vf) = match row.value {
            Some(v) => (v.to_string(), float_of(v)),
            None => (String::new(), String::new()),
        };
        let (le, lf) = match row.loss {
            Some(l) => (l.to_string(), float_of(l)),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.eps, ve, vf, le, lf, row.lp_solves, row.bnb_nodes, row.seconds
        );
    }
    out
}
