//! Benchmark game generators.
//!
//! Both benchmark games are simultaneous-move games encoded as turn-taking
//! trees: the leader moves first each step and the follower's infosets pool
//! all leader choices it has not observed. Generators are pure and
//! deterministic: identical configuration yields an identical tree, node ids
//! assigned in construction order.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::game::{
    build_game, validate_perfect_recall, GameDescription, GameTree, NodeDecl, PlayerId,
    TerminalDecl,
};
use crate::numeric::{rat_i, Rational};

/// Payoff list length does not match the tree shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayoffArityError {
    pub expected: usize,
    pub got: usize,
}

impl fmt::Display for PayoffArityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "expected {} terminal payoffs, got {}", self.expected, self.got)
    }
}

impl core::error::Error for PayoffArityError {}

struct TreeBuilder {
    nodes: Vec<NodeDecl>,
    terminals: Vec<TerminalDecl>,
    next_id: u32,
}

impl TreeBuilder {
    fn new() -> Self {
        TreeBuilder {
            nodes: Vec::new(),
            terminals: Vec::new(),
            next_id: 0,
        }
    }

    fn fresh(&mut self) -> u32 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    fn decision(&mut self, id: u32, owner: PlayerId, infoset: String, actions: Vec<String>, children: Vec<u32>) {
        self.nodes.push(NodeDecl {
            id,
            owner,
            infoset,
            actions,
            children,
            chance_probs: None,
        });
    }

    fn terminal(&mut self, id: u32, leader: Rational, follower: Rational) {
        self.terminals.push(TerminalDecl {
            id,
            leader_payoff: leader,
            follower_payoff: follower,
        });
    }

    fn finish(self) -> GameTree {
        let g = build_game(&GameDescription {
            nodes: self.nodes,
            terminals: self.terminals,
        })
        .expect("generator produced an invalid tree");
        validate_perfect_recall(&g).expect("generator violated perfect recall");
        g
    }
}

/// Two-infoset leader tree: actions a1/a2 at the root, a3/a4 at the second
/// infoset reached by a2. Terminal payoffs in order: after a1, after a2.a3,
/// after a2.a4.
pub fn gen_observation1_game(payoffs: &[(Rational, Rational)]) -> Result<GameTree, PayoffArityError> {
    if payoffs.len() != 3 {
        return Err(PayoffArityError {
            expected: 3,
            got: payoffs.len(),
        });
    }
    let mut b = TreeBuilder::new();
    let root = b.fresh();
    let t1 = b.fresh();
    let l2 = b.fresh();
    let t2 = b.fresh();
    let t3 = b.fresh();
    b.decision(
        root,
        PlayerId::Leader,
        String::from("l.1"),
        alloc::vec![String::from("a1"), String::from("a2")],
        alloc::vec![t1, l2],
    );
    b.decision(
        l2,
        PlayerId::Leader,
        String::from("l.2"),
        alloc::vec![String::from("a3"), String::from("a4")],
        alloc::vec![t2, t3],
    );
    b.terminal(t1, payoffs[0].0.clone(), payoffs[0].1.clone());
    b.terminal(t2, payoffs[1].0.clone(), payoffs[1].1.clone());
    b.terminal(t3, payoffs[2].0.clone(), payoffs[2].1.clone());
    Ok(b.finish())
}

/// Leader commits at the root (a1/a2), a pooled follower infoset responds
/// (f1/f2), and after a2 the leader moves again (a3/a4) without observing the
/// follower. Terminal payoffs in order:
/// (a1,f1), (a1,f2), (a2,f1,a3), (a2,f1,a4), (a2,f2,a3), (a2,f2,a4).
pub fn gen_fig1a_shape(payoffs: &[(Rational, Rational)]) -> Result<GameTree, PayoffArityError> {
    if payoffs.len() != 6 {
        return Err(PayoffArityError {
            expected: 6,
            got: payoffs.len(),
        });
    }
    let mut b = TreeBuilder::new();
    let ids: Vec<u32> = (0..11).map(|_| b.fresh()).collect();
    let [root, f_a1, f_a2, t11, t12, l2_f1, l2_f2, t21, t22, t23, t24] =
        <[u32; 11]>::try_from(ids).unwrap();
    let f_actions = alloc::vec![String::from("f1"), String::from("f2")];
    b.decision(
        root,
        PlayerId::Leader,
        String::from("l.1"),
        alloc::vec![String::from("a1"), String::from("a2")],
        alloc::vec![f_a1, f_a2],
    );
    b.decision(f_a1, PlayerId::Follower, String::from("f.1"), f_actions.clone(), alloc::vec![t11, t12]);
    b.decision(f_a2, PlayerId::Follower, String::from("f.1"), f_actions, alloc::vec![l2_f1, l2_f2]);
    let l2_actions = alloc::vec![String::from("a3"), String::from("a4")];
    b.decision(l2_f1, PlayerId::Leader, String::from("l.2"), l2_actions.clone(), alloc::vec![t21, t22]);
    b.decision(l2_f2, PlayerId::Leader, String::from("l.2"), l2_actions, alloc::vec![t23, t24]);
    for (t, p) in [t11, t12, t21, t22, t23, t24].into_iter().zip(payoffs) {
        b.terminal(t, p.0.clone(), p.1.clone());
    }
    Ok(b.finish())
}

/// Three-round bidding game. Both players hold cards 1–3; each round's prize
/// is the smallest remaining one (1, then 2, then 3), the higher card wins it
/// and ties discard it. Bids are simultaneous within a round and revealed
/// afterwards. No chance nodes; not constant-sum.
pub fn gen_goofspiel3() -> GameTree {
    let mut b = TreeBuilder::new();
    let root = b.fresh();
    goof_rec(
        &mut b,
        root,
        &mut alloc::vec![1u8, 2, 3],
        &mut alloc::vec![1u8, 2, 3],
        String::new(),
        Rational::from_integer(0.into()),
        Rational::from_integer(0.into()),
    );
    b.finish()
}

/// Expands the leader-then-follower pair of moves for one round.
fn goof_rec(
    b: &mut TreeBuilder,
    id: u32,
    leader_hand: &mut Vec<u8>,
    follower_hand: &mut Vec<u8>,
    history: String,
    leader_score: Rational,
    follower_score: Rational,
) {
    if leader_hand.is_empty() {
        b.terminal(id, leader_score, follower_score);
        return;
    }
    let round = 4 - leader_hand.len(); // 1-based; prize equals the round number
    let prize = round as i64;

    let leader_cards = leader_hand.clone();
    let follower_cards = follower_hand.clone();

    // Follower nodes for every leader bid, all pooled into one infoset keyed
    // by the public history.
    let mut follower_ids = Vec::new();
    for _ in &leader_cards {
        follower_ids.push(b.fresh());
    }
    b.decision(
        id,
        PlayerId::Leader,
        format!("L:{history}"),
        leader_cards.iter().map(|c| format!("{c}")).collect(),
        follower_ids.clone(),
    );
    for (lc, f_id) in leader_cards.iter().zip(&follower_ids) {
        let mut children = Vec::new();
        for _ in &follower_cards {
            children.push(b.fresh());
        }
        b.decision(
            *f_id,
            PlayerId::Follower,
            format!("F:{history}"),
            follower_cards.iter().map(|c| format!("{c}")).collect(),
            children.clone(),
        );
        for (fc, child) in follower_cards.iter().zip(&children) {
            let mut ls = leader_score.clone();
            let mut fs = follower_score.clone();
            if lc > fc {
                ls += rat_i(prize);
            } else if fc > lc {
                fs += rat_i(prize);
            }
            leader_hand.retain(|c| c != lc);
            follower_hand.retain(|c| c != fc);
            goof_rec(
                b,
                *child,
                leader_hand,
                follower_hand,
                format!("{history}{lc}v{fc};"),
                ls,
                fs,
            );
            leader_hand.push(*lc);
            follower_hand.push(*fc);
            leader_hand.sort_unstable();
            follower_hand.sort_unstable();
        }
    }
}

/// Search-game configuration: patrol/evasion on the fixed ten-node graph.
#[derive(Debug, Clone)]
pub struct SearchGameConfig {
    /// Number of simultaneous moves before the game times out.
    pub horizon: u32,
    /// Follower payoffs at the two goal nodes.
    pub goal_payoffs: (Rational, Rational),
    /// Leader payoff when the follower reaches a goal (the follower escaped).
    pub goal_leader_payoff: Rational,
    /// Payoffs on capture: (leader, follower).
    pub capture_payoffs: (Rational, Rational),
    /// Payoffs on timeout: (leader, follower). The follower value stands in
    /// for "minus infinity" and must lie below every reachable payoff.
    pub timeout_payoffs: (Rational, Rational),
}

impl Default for SearchGameConfig {
    fn default() -> Self {
        SearchGameConfig {
            horizon: 2,
            goal_payoffs: (rat_i(5), rat_i(10)),
            goal_leader_payoff: rat_i(0),
            capture_payoffs: (rat_i(1), rat_i(0)),
            timeout_payoffs: (rat_i(0), rat_i(-1_000_000)),
        }
    }
}

// Fixed graph: start S; patrol-one zone {B, C}; middle {E, F}; patrol-two
// zone {H, I}; goals {K, L}. The follower travels the forward edges below or
// waits in place; the dashed zone-internal edges (B–C, H–I) are patrol-only,
// so the follower never moves between two patrolled-area nodes.
const SEARCH_NODES: [&str; 9] = ["S", "B", "C", "E", "F", "H", "I", "K", "L"];
const SEARCH_EDGES: [(&str, &str); 9] = [
    ("S", "B"),
    ("S", "C"),
    ("B", "E"),
    ("C", "F"),
    ("E", "F"),
    ("E", "H"),
    ("F", "I"),
    ("H", "K"),
    ("I", "L"),
];

/// The follower's move options from a node (forward edges, in listing order).
pub fn search_graph_moves(from: &str) -> Vec<&'static str> {
    SEARCH_EDGES
        .iter()
        .filter(|(a, _)| *a == from)
        .map(|(_, b)| *b)
        .collect()
}

#[derive(Clone)]
struct SearchState {
    time: u32,
    p1: &'static str,
    p2: &'static str,
    fpos: &'static str,
    /// Nodes the follower departed without first waiting to clean up.
    traces: BTreeSet<&'static str>,
    /// Whether the follower has waited during its current stay at `fpos`.
    waited_here: bool,
    leader_history: String,
    follower_history: String,
}

fn canonical(name: &str) -> &'static str {
    SEARCH_NODES
        .iter()
        .chain(["K", "L"].iter())
        .find(|n| **n == name)
        .copied()
        .expect("unknown search-graph node")
}

fn patrol_move(pos: &'static str, stay: bool) -> &'static str {
    if stay {
        pos
    } else {
        match pos {
            "B" => "C",
            "C" => "B",
            "H" => "I",
            "I" => "H",
            _ => unreachable!("patrol outside its zone"),
        }
    }
}

/// Generates the pursuit/evasion benchmark.
///
/// Each step the leader first picks a joint patrol move (each patrol stays or
/// switches within its two-node zone), then the follower — who observes
/// nothing about the patrols — moves along a forward edge or waits to clean
/// its trace. After both moved: capture if the follower shares a node with a
/// patrol, goal payoff if it reached a goal node, timeout after the final
/// step. The leader observes only its own patrol positions plus any trace a
/// patrol uncovers.
pub fn gen_search_game(cfg: &SearchGameConfig) -> GameTree {
    assert!(cfg.horizon >= 1, "horizon must be at least 1");
    let mut b = TreeBuilder::new();
    let root = b.fresh();
    let state = SearchState {
        time: 0,
        p1: "B",
        p2: "H",
        fpos: "S",
        traces: BTreeSet::new(),
        waited_here: false,
        leader_history: String::new(),
        follower_history: String::new(),
    };
    search_rec(&mut b, root, cfg, state);
    b.finish()
}

fn search_rec(b: &mut TreeBuilder, id: u32, cfg: &SearchGameConfig, state: SearchState) {
    // Leader's joint patrol move, in fixed action order.
    let leader_actions = ["s-s", "s-m", "m-s", "m-m"];
    let mut follower_node_ids = Vec::new();
    for _ in leader_actions {
        follower_node_ids.push(b.fresh());
    }
    b.decision(
        id,
        PlayerId::Leader,
        format!("L:{}", state.leader_history),
        leader_actions.iter().map(|a| String::from(*a)).collect(),
        follower_node_ids.clone(),
    );

    let follower_moves: Vec<String> = {
        let mut m: Vec<String> = search_graph_moves(state.fpos)
            .into_iter()
            .map(String::from)
            .collect();
        m.push(String::from("wait"));
        m
    };

    for (la, f_id) in leader_actions.iter().zip(&follower_node_ids) {
        let p1 = patrol_move(state.p1, la.as_bytes()[0] == b's');
        let p2 = patrol_move(state.p2, la.as_bytes()[2] == b's');

        let mut children = Vec::new();
        for _ in &follower_moves {
            children.push(b.fresh());
        }
        b.decision(
            *f_id,
            PlayerId::Follower,
            format!("F:{}", state.follower_history),
            follower_moves.clone(),
            children.clone(),
        );

        for (fa, child) in follower_moves.iter().zip(&children) {
            let mut next = state.clone();
            next.time += 1;
            next.p1 = p1;
            next.p2 = p2;
            if fa == "wait" {
                next.waited_here = true;
                next.traces.remove(state.fpos);
            } else {
                if !state.waited_here {
                    next.traces.insert(state.fpos);
                }
                next.waited_here = false;
                next.fpos = canonical(fa);
            }

            let captured = next.fpos == p1 || next.fpos == p2;
            let at_goal = next.fpos == "K" || next.fpos == "L";
            if captured {
                b.terminal(*child, cfg.capture_payoffs.0.clone(), cfg.capture_payoffs.1.clone());
                continue;
            }
            if at_goal {
                let fp = if next.fpos == "K" {
                    cfg.goal_payoffs.0.clone()
                } else {
                    cfg.goal_payoffs.1.clone()
                };
                b.terminal(*child, cfg.goal_leader_payoff.clone(), fp);
                continue;
            }
            if next.time == cfg.horizon {
                b.terminal(*child, cfg.timeout_payoffs.0.clone(), cfg.timeout_payoffs.1.clone());
                continue;
            }

            // Patrol trace observations become part of the leader's infoset key.
            let mut seen: Vec<&str> = Vec::new();
            for patrol in [p1, p2] {
                if next.traces.contains(patrol) && !seen.contains(&patrol) {
                    seen.push(patrol);
                }
            }
            seen.sort_unstable();
            next.leader_history = format!("{}{la};{};", state.leader_history, seen.join(","));
            next.follower_history = format!("{}{fa};", state.follower_history);
            search_rec(b, *child, cfg, next);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::NodeKind;
    use crate::numeric::rat_i;

    #[test]
    fn goofspiel_rules() {
        let g = gen_goofspiel3();
        assert!(!g.has_chance_nodes());
        // 3!·3! full play orders.
        assert_eq!(g.terminals().count(), 36);

        // Leader 3,2,1 versus follower 1,2,3: prize 1 to the leader, prize 2
        // discarded on the tie, prize 3 to the follower.
        let mut node = g.root();
        for card in ["3", "1", "2", "2", "1", "3"] {
            let (children, infoset) = match &g.node(node).kind {
                NodeKind::Decision { children, infoset, .. } => (children, *infoset),
                _ => panic!("expected decision node"),
            };
            let a = g
                .infoset(infoset)
                .actions
                .iter()
                .position(|x| x == card)
                .unwrap();
            node = children[a];
        }
        match &g.node(node).kind {
            NodeKind::Terminal {
                leader_payoff,
                follower_payoff,
            } => {
                assert_eq!(leader_payoff, &rat_i(1));
                assert_eq!(follower_payoff, &rat_i(3));
            }
            _ => panic!("expected terminal after six cards"),
        }
    }

    #[test]
    fn goofspiel_deterministic() {
        let a = gen_goofspiel3();
        let b = gen_goofspiel3();
        assert_eq!(a.num_nodes(), b.num_nodes());
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn search_game_horizon_one_has_no_goal_payoffs() {
        let cfg = SearchGameConfig {
            horizon: 1,
            ..SearchGameConfig::default()
        };
        let g = gen_search_game(&cfg);
        assert!(!g.has_chance_nodes());
        for (_, _, follower_payoff) in g.terminals() {
            // Goals are at distance four; every payoff is capture-0 or the
            // timeout penalty.
            assert!(follower_payoff == &rat_i(0) || follower_payoff == &rat_i(-1_000_000));
        }
    }

    #[test]
    fn search_game_goal_payoffs_are_5_and_10() {
        let cfg = SearchGameConfig::default();
        assert_eq!(cfg.goal_payoffs, (rat_i(5), rat_i(10)));
        // Horizon 4 reaches the goals; both configured values must appear.
        let g = gen_search_game(&SearchGameConfig {
            horizon: 4,
            ..cfg
        });
        let mut seen5 = false;
        let mut seen10 = false;
        for (_, _, fp) in g.terminals() {
            seen5 |= fp == &rat_i(5);
            seen10 |= fp == &rat_i(10);
        }
        assert!(seen5 && seen10);
    }

    #[test]
    fn observation1_shape() {
        let g = gen_observation1_game(&[
            (rat_i(1), rat_i(0)),
            (rat_i(0), rat_i(0)),
            (rat_i(2), rat_i(0)),
        ])
        .unwrap();
        assert_eq!(g.player_infosets(PlayerId::Leader).len(), 2);
        assert_eq!(g.num_nodes(), 5);
        let err = gen_observation1_game(&[(rat_i(1), rat_i(0))]).unwrap_err();
        assert_eq!(err, PayoffArityError { expected: 3, got: 1 });
    }
}
