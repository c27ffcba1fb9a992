//! Text file formats: games and perturbation schemes.
//!
//! Game files are line-based with `players`, `nodes`, `terminals` and
//! `chance` sections. Rationals are written exactly (`p/q` or integer) and
//! parsed without any floating point. Grammar:
//!
//! ```text
//! # comment                         blank lines and #-comments ignored
//! players                           fixed section: the two roles
//! leader
//! follower
//! nodes                             one line per decision/chance node
//! <id> <owner> <infoset> | <action> ... | <child-id> ...
//! terminals                         one line per terminal
//! <id> <leader-payoff> <follower-payoff>
//! chance                            per-edge probabilities of chance nodes
//! <node-id> <prob> ...
//! ```
//!
//! Owners are `leader`, `follower` or `chance`; chance nodes write `-` for
//! the infoset. Labels must be free of whitespace and `|`.
//!
//! Scheme files hold one perturbation override per line,
//! `<player> <sequence> <polynomial>`, where the sequence is a dot-joined
//! action list (as printed in solution files) and the polynomial uses the
//! syntax `1/3*e^2 + e^4`. Sequences not listed keep the default ε^|σ|
//! bound.

use std::fmt::Write as _;

use sefg_core::game::{
    build_game, GameDescription, GameError, GameTree, NodeDecl, NodeKind, PlayerId, TerminalDecl,
};
use sefg_core::numeric::{parse_rational, EpsPoly, Rational};
use sefg_core::perturb::PerturbationScheme;
use sefg_core::seqform::{SequenceForm, SequenceId};

#[derive(Debug)]
pub enum FormatError {
    Syntax { line: usize, message: String },
    Game(GameError),
}

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormatError::Syntax { line, message } => write!(f, "line {line}: {message}"),
            FormatError::Game(e) => write!(f, "invalid game: {e}"),
        }
    }
}

impl std::error::Error for FormatError {}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Parses the game file format.
pub fn parse_game(text: &str) -> Result<GameTree, FormatError> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Players,
        Nodes,
        Terminals,
        Chance,
    }
    let mut section = Section::None;
    let mut description = GameDescription::default();
    let mut chance_probs: Vec<(usize, u32, Vec<Rational>)> = Vec::new();
    let mut players_seen = 0;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "players" => {
                section = Section::Players;
                continue;
            }
            "nodes" => {
                section = Section::Nodes;
                continue;
            }
            "terminals" => {
                section = Section::Terminals;
                continue;
            }
            "chance" => {
                section = Section::Chance;
                continue;
            }
            _ => {}
        }
        match section {
            Section::None => return Err(syntax(lineno, "content before any section header")),
            Section::Players => {
                let expected = ["leader", "follower"];
                if players_seen >= 2 || line != expected[players_seen] {
                    return Err(syntax(lineno, "players section must list leader, follower"));
                }
                players_seen += 1;
            }
            Section::Nodes => {
                let mut parts = line.splitn(2, char::is_whitespace);
                let id: u32 = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| syntax(lineno, "bad node id"))?;
                let rest = parts.next().ok_or_else(|| syntax(lineno, "truncated node"))?;
                let mut fields = rest.split('|');
                let head: Vec<&str> = fields
                    .next()
                    .ok_or_else(|| syntax(lineno, "missing node header"))?
                    .split_whitespace()
                    .collect();
                let [owner, infoset] = head[..] else {
                    return Err(syntax(lineno, "node header needs owner and infoset"));
                };
                let owner = match owner {
                    "leader" => PlayerId::Leader,
                    "follower" => PlayerId::Follower,
                    "chance" => PlayerId::Chance,
                    other => return Err(syntax(lineno, format!("unknown owner {other:?}"))),
                };
                let actions: Vec<String> = fields
                    .next()
                    .ok_or_else(|| syntax(lineno, "missing actions"))?
                    .split_whitespace()
                    .map(String::from)
                    .collect();
                let children: Vec<u32> = fields
                    .next()
                    .ok_or_else(|| syntax(lineno, "missing children"))?
                    .split_whitespace()
                    .map(|s| s.parse().map_err(|_| syntax(lineno, "bad child id")))
                    .collect::<Result<_, _>>()?;
                if fields.next().is_some() {
                    return Err(syntax(lineno, "too many | fields"));
                }
                description.nodes.push(NodeDecl {
                    id,
                    owner,
                    infoset: if infoset == "-" { String::new() } else { infoset.into() },
                    actions,
                    children,
                    chance_probs: None,
                });
            }
            Section::Terminals => {
                let parts: Vec<&str> = line.split_whitespace().collect();
                let [id, leader, follower] = parts[..] else {
                    return Err(syntax(lineno, "terminal needs id and two payoffs"));
                };
                let id: u32 = id.parse().map_err(|_| syntax(lineno, "bad terminal id"))?;
                let leader_payoff = parse_rational(leader)
                    .map_err(|e| syntax(lineno, format!("leader payoff: {e}")))?;
                let follower_payoff = parse_rational(follower)
                    .map_err(|e| syntax(lineno, format!("follower payoff: {e}")))?;
                description.terminals.push(TerminalDecl {
                    id,
                    leader_payoff,
                    follower_payoff,
                });
            }
            Section::Chance => {
                let mut parts = line.split_whitespace();
                let id: u32 = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| syntax(lineno, "bad chance node id"))?;
                let probs: Vec<Rational> = parts
                    .map(|s| parse_rational(s).map_err(|e| syntax(lineno, format!("{e}"))))
                    .collect::<Result<_, _>>()?;
                chance_probs.push((lineno, id, probs));
            }
        }
    }
    if players_seen != 2 {
        return Err(syntax(0, "missing players section"));
    }
    for (lineno, id, probs) in chance_probs {
        let node = description
            .nodes
            .iter_mut()
            .find(|n| n.id == id)
            .ok_or_else(|| syntax(lineno, format!("chance line references unknown node {id}")))?;
        if node.owner != PlayerId::Chance {
            return Err(syntax(lineno, format!("node {id} is not a chance node")));
        }
        node.chance_probs = Some(probs);
    }
    build_game(&description).map_err(FormatError::Game)
}

/// Writes a game in the file format; output is deterministic and parses back
/// to an identical tree.
pub fn write_game(game: &GameTree) -> String {
    let mut out = String::new();
    out.push_str("players\nleader\nfollower\n\nnodes\n");
    let mut chance_lines: Vec<String> = Vec::new();
    let mut terminal_lines: Vec<String> = Vec::new();
    for id in game.node_ids() {
        match &game.node(id).kind {
            NodeKind::Terminal {
                leader_payoff,
                follower_payoff,
            } => {
                terminal_lines.push(format!("{} {} {}", id.0, leader_payoff, follower_payoff));
            }
            NodeKind::Chance { children, probs } => {
                let kids: Vec<String> = children.iter().map(|c| c.0.to_string()).collect();
                let acts: Vec<String> = (0..children.len()).map(|i| format!("c{i}")).collect();
                let _ = writeln!(
                    out,
                    "{} chance - | {} | {}",
                    id.0,
                    acts.join(" "),
                    kids.join(" ")
                );
                let ps: Vec<String> = probs.iter().map(|p| p.to_string()).collect();
                chance_lines.push(format!("{} {}", id.0, ps.join(" ")));
            }
            NodeKind::Decision {
                owner,
                infoset,
                children,
            } => {
                let info = game.infoset(*infoset);
                debug_assert!(
                    !info.label.contains(['|', ' ', '\t']) && !info.label.is_empty(),
                    "infoset label unsuitable for the game file format"
                );
                let kids: Vec<String> = children.iter().map(|c| c.0.to_string()).collect();
                let _ = writeln!(
                    out,
                    "{} {} {} | {} | {}",
                    id.0,
                    owner,
                    info.label,
                    info.actions.join(" "),
                    kids.join(" ")
                );
            }
        }
    }
    out.push_str("\nterminals\n");
    for line in terminal_lines {
        out.push_str(&line);
        out.push('\n');
    }
    if !chance_lines.is_empty() {
        out.push_str("\nchance\n");
        for line in chance_lines {
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}

/// Parses the ε-polynomial syntax, e.g. `1/3*e^2 + e^4` or `e` or `2/5`.
pub fn parse_polynomial(text: &str) -> Result<EpsPoly, String> {
    let mut poly = EpsPoly::zero();
    for term in text.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return Err("empty polynomial term".into());
        }
        let (coeff_str, power_str) = match term.split_once('e') {
            None => (term, None),
            Some((c, p)) => (c.trim(), Some(p.trim())),
        };
        let coeff = match coeff_str.trim_end_matches('*').trim() {
            "" => Rational::from_integer(1.into()),
            s => parse_rational(s).map_err(|e| format!("bad coefficient {s:?}: {e}"))?,
        };
        let degree: u32 = match power_str {
            None => 0,
            Some("") => 1,
            Some(p) => {
                let p = p
                    .strip_prefix('^')
                    .ok_or_else(|| format!("expected ^ after e in {term:?}"))?;
                p.parse().map_err(|_| format!("bad exponent {p:?}"))?
            }
        };
        poly = &poly + &EpsPoly::monomial(coeff, degree);
    }
    Ok(poly)
}

/// Parses a scheme file into per-sequence overrides over the default ε^|σ|
/// bounds. Sequences are matched by their dot-joined action labels.
pub fn parse_scheme(
    text: &str,
    game: &GameTree,
    sf: &SequenceForm,
    label: String,
) -> Result<PerturbationScheme, String> {
    let mut overrides: Vec<(PlayerId, SequenceId, EpsPoly)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(3, char::is_whitespace);
        let (Some(player), Some(seq_text), Some(poly_text)) =
            (parts.next(), parts.next(), parts.next())
        else {
            return Err(format!("line {}: expected player, sequence, polynomial", idx + 1));
        };
        let player = match player {
            "leader" => PlayerId::Leader,
            "follower" => PlayerId::Follower,
            other => return Err(format!("line {}: unknown player {other:?}", idx + 1)),
        };
        let seq = (0..sf.num_sequences(player) as u32)
            .map(SequenceId)
            .find(|s| sf.seq_label(game, player, *s) == seq_text)
            .ok_or_else(|| format!("line {}: unknown {player} sequence {seq_text:?}", idx + 1))?;
        let poly = parse_polynomial(poly_text).map_err(|e| format!("line {}: {e}", idx + 1))?;
        overrides.push((player, seq, poly));
    }
    Ok(PerturbationScheme::with_overrides(sf, label, &overrides))
}

#[cfg(test)]
mod tests {
    use super::*;
    use sefg_core::games::gen_goofspiel3;
    use sefg_core::numeric::{rat, rat_i};

    #[test]
    fn game_round_trip() {
        let game = gen_goofspiel3();
        let text = write_game(&game);
        let back = parse_game(&text).unwrap();
        assert_eq!(write_game(&back), text);
        assert_eq!(back.num_nodes(), game.num_nodes());
    }

    #[test]
    fn chance_round_trip_and_rationals() {
        let text = "\
players
leader
follower

nodes
0 chance - | c0 c1 | 1 2
1 leader root | a b | 3 4

terminals
2 3/4 -1000000
3 1 0
4 0 1

chance
0 1/3 2/3
";
        let game = parse_game(text).unwrap();
        assert!(game.has_chance_nodes());
        let (_, pl, pf) = game.terminals().next().unwrap();
        assert_eq!(pl, &rat(3, 4));
        assert_eq!(pf, &rat_i(-1_000_000));
        let redump = write_game(&game);
        let reparsed = parse_game(&redump).unwrap();
        assert_eq!(write_game(&reparsed), redump);
    }

    #[test]
    fn polynomial_syntax() {
        let p = parse_polynomial("1/3*e^2 + e^4").unwrap();
        assert_eq!(format!("{p}"), "1/3*e^2 + e^4");
        assert_eq!(parse_polynomial("e").unwrap(), EpsPoly::monomial(rat_i(1), 1));
        assert_eq!(parse_polynomial("2/5").unwrap(), EpsPoly::constant(rat(2, 5)));
        assert_eq!(
            parse_polynomial("3*e").unwrap(),
            EpsPoly::monomial(rat_i(3), 1)
        );
        assert!(parse_polynomial("e^").is_err());
        assert!(parse_polynomial("").is_err());
    }

    #[test]
    fn syntax_errors_have_line_numbers() {
        let bad = "players\nleader\nfollower\nnodes\n0 nobody x | a | 1\n";
        match parse_game(bad) {
            Err(FormatError::Syntax { line, .. }) => assert_eq!(line, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }
}
