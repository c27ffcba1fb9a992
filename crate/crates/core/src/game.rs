//! Two-player extensive-form game trees with imperfect information.
//!
//! A game is described declaratively ([`GameDescription`]) and validated into
//! an immutable [`GameTree`]: decision nodes owned by the leader, the follower
//! or chance, terminal nodes carrying exact rational payoffs, and information
//! sets grouping indistinguishable decision nodes. Perfect recall is checked
//! separately by [`validate_perfect_recall`] since some constructions want to
//! inspect trees that fail it.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::numeric::Rational;

/// Who acts at a decision node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PlayerId {
    Leader,
    Follower,
    Chance,
}

impl PlayerId {
    /// Index for per-strategic-player tables. Chance has no strategy.
    pub fn strategic_index(self) -> Option<usize> {
        match self {
            PlayerId::Leader => Some(0),
            PlayerId::Follower => Some(1),
            PlayerId::Chance => None,
        }
    }

    pub fn opponent(self) -> PlayerId {
        match self {
            PlayerId::Leader => PlayerId::Follower,
            PlayerId::Follower => PlayerId::Leader,
            PlayerId::Chance => PlayerId::Chance,
        }
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlayerId::Leader => write!(f, "leader"),
            PlayerId::Follower => write!(f, "follower"),
            PlayerId::Chance => write!(f, "chance"),
        }
    }
}

/// Dense node index assigned in input order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index into [`GameTree::infosets`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InfosetId(pub u32);

impl InfosetId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Declarative form of a decision node (chance nodes use `owner: Chance` and
/// carry per-edge probabilities).
#[derive(Debug, Clone)]
pub struct NodeDecl {
    pub id: u32,
    pub owner: PlayerId,
    /// Infoset label, scoped per player. Ignored for chance nodes.
    pub infoset: String,
    /// Ordered action labels; `children[i]` is reached by `actions[i]`.
    pub actions: Vec<String>,
    pub children: Vec<u32>,
    /// For chance nodes only: probability of each edge, parallel to `children`.
    pub chance_probs: Option<Vec<Rational>>,
}

/// Declarative form of a terminal node.
#[derive(Debug, Clone)]
pub struct TerminalDecl {
    pub id: u32,
    pub leader_payoff: Rational,
    pub follower_payoff: Rational,
}

/// Node/edge/infoset/payoff lists consumed by [`build_game`].
#[derive(Debug, Clone, Default)]
pub struct GameDescription {
    pub nodes: Vec<NodeDecl>,
    pub terminals: Vec<TerminalDecl>,
}

/// Structured validation failure from [`build_game`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameError {
    DuplicateNodeId(u32),
    UndeclaredChild { parent: u32, child: u32 },
    /// A node is referenced as a child more than once, which would make the
    /// successor map not a tree.
    CycleDetected { node: u32 },
    UnreachableNode(u32),
    NoRoot,
    EmptyActions { node: u32 },
    ActionChildMismatch { node: u32 },
    /// Two nodes in one infoset disagree on owner or ordered action list.
    HeterogeneousActions { infoset: String },
    ChanceProbsMissing { node: u32 },
    ChanceProbOutOfRange { node: u32 },
    ChanceProbsNotOne { node: u32 },
    DuplicateAction { node: u32, action: String },
}

impl fmt::Display for GameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameError::DuplicateNodeId(id) => write!(f, "duplicate node id {id}"),
            GameError::UndeclaredChild { parent, child } => {
                write!(f, "node {parent} references undeclared child {child}")
            }
            GameError::CycleDetected { node } => {
                write!(f, "cycle detected: node {node} has more than one parent")
            }
            GameError::UnreachableNode(id) => write!(f, "unreachable node {id}"),
            GameError::NoRoot => write!(f, "no root node"),
            GameError::EmptyActions { node } => write!(f, "decision node {node} has no actions"),
            GameError::ActionChildMismatch { node } => {
                write!(f, "node {node}: action and child counts differ")
            }
            GameError::HeterogeneousActions { infoset } => {
                write!(f, "heterogeneous actions in infoset {infoset:?}")
            }
            GameError::ChanceProbsMissing { node } => {
                write!(f, "chance node {node} lacks edge probabilities")
            }
            GameError::ChanceProbOutOfRange { node } => {
                write!(f, "chance node {node} has a probability outside [0,1]")
            }
            GameError::ChanceProbsNotOne { node } => {
                write!(f, "chance node {node}: probabilities do not sum to 1")
            }
            GameError::DuplicateAction { node, action } => {
                write!(f, "node {node} repeats action {action:?}")
            }
        }
    }
}

impl core::error::Error for GameError {}

/// A validated decision/chance/terminal node.
#[derive(Debug, Clone)]
pub enum NodeKind {
    Decision {
        owner: PlayerId,
        infoset: InfosetId,
        children: Vec<NodeId>,
    },
    Chance {
        children: Vec<NodeId>,
        probs: Vec<Rational>,
    },
    Terminal {
        leader_payoff: Rational,
        follower_payoff: Rational,
    },
}

#[derive(Debug, Clone)]
pub struct Node {
    pub kind: NodeKind,
    /// Parent node and the action index taken to reach this node.
    pub parent: Option<(NodeId, usize)>,
}

/// A group of decision nodes indistinguishable to their owner.
#[derive(Debug, Clone)]
pub struct Infoset {
    pub owner: PlayerId,
    pub label: String,
    pub actions: Vec<String>,
    pub nodes: Vec<NodeId>,
    /// Position within the owner's infoset list.
    pub ordinal: u32,
}

/// Immutable validated game tree. Construction is single-threaded; the result
/// is freely shareable.
#[derive(Debug, Clone)]
pub struct GameTree {
    nodes: Vec<Node>,
    root: NodeId,
    infosets: Vec<Infoset>,
    player_infosets: [Vec<InfosetId>; 2],
    /// Chance reach probability of each node: the product of chance-edge
    /// probabilities on its root path.
    chance_reach: Vec<Rational>,
}

impl GameTree {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn infoset(&self, id: InfosetId) -> &Infoset {
        &self.infosets[id.index()]
    }

    pub fn infosets(&self) -> &[Infoset] {
        &self.infosets
    }

    /// Infosets of one strategic player, in deterministic (input) order.
    pub fn player_infosets(&self, player: PlayerId) -> &[InfosetId] {
        &self.player_infosets[player.strategic_index().expect("strategic player")]
    }

    pub fn chance_reach(&self, id: NodeId) -> &Rational {
        &self.chance_reach[id.index()]
    }

    pub fn has_chance_nodes(&self) -> bool {
        self.nodes
            .iter()
            .any(|n| matches!(n.kind, NodeKind::Chance { .. }))
    }

    pub fn terminals(&self) -> impl Iterator<Item = (NodeId, &Rational, &Rational)> {
        self.nodes.iter().enumerate().filter_map(|(i, n)| match &n.kind {
            NodeKind::Terminal {
                leader_payoff,
                follower_payoff,
            } => Some((NodeId(i as u32), leader_payoff, follower_payoff)),
            _ => None,
        })
    }

    /// Ordered `(player, action index)` pairs on the root path of `id`,
    /// restricted to `player`'s own moves.
    pub fn own_action_path(&self, id: NodeId, player: PlayerId) -> Vec<(InfosetId, usize)> {
        let mut path = Vec::new();
        let mut cur = id;
        while let Some((parent, action)) = self.node(cur).parent {
            if let NodeKind::Decision { owner, infoset, .. } = &self.node(parent).kind {
                if *owner == player {
                    path.push((*infoset, action));
                }
            }
            cur = parent;
        }
        path.reverse();
        path
    }

    /// Human-readable action labels for an own-action path.
    pub fn action_labels(&self, path: &[(InfosetId, usize)]) -> Vec<String> {
        path.iter()
            .map(|(iset, a)| self.infoset(*iset).actions[*a].clone())
            .collect()
    }

    /// Exact expected payoffs of a behavioral profile by direct tree walk.
    pub fn expected_utilities(
        &self,
        leader: &BehavioralStrategy,
        follower: &BehavioralStrategy,
    ) -> (Rational, Rational) {
        let reach = self.terminal_reach(leader, follower);
        let mut u_l = Rational::zero();
        let mut u_f = Rational::zero();
        for (id, pl, pf) in self.terminals() {
            let p = &reach[id.index()];
            u_l += p * pl;
            u_f += p * pf;
        }
        (u_l, u_f)
    }

    /// Reach probability of every node under a behavioral profile
    /// (chance probabilities included).
    pub fn terminal_reach(
        &self,
        leader: &BehavioralStrategy,
        follower: &BehavioralStrategy,
    ) -> Vec<Rational> {
        assert_eq!(leader.player, PlayerId::Leader);
        assert_eq!(follower.player, PlayerId::Follower);
        let mut reach = alloc::vec![Rational::zero(); self.nodes.len()];
        reach[self.root.index()] = Rational::one();
        // Parents precede children in a stack-driven walk from the root.
        let mut stack = alloc::vec![self.root];
        while let Some(id) = stack.pop() {
            let here = reach[id.index()].clone();
            match &self.node(id).kind {
                NodeKind::Terminal { .. } => {}
                NodeKind::Chance { children, probs } => {
                    for (child, p) in children.iter().zip(probs) {
                        reach[child.index()] = &here * p;
                        stack.push(*child);
                    }
                }
                NodeKind::Decision {
                    owner,
                    infoset,
                    children,
                } => {
                    let strat = match owner {
                        PlayerId::Leader => leader,
                        PlayerId::Follower => follower,
                        PlayerId::Chance => unreachable!(),
                    };
                    let ordinal = self.infoset(*infoset).ordinal as usize;
                    for (a, child) in children.iter().enumerate() {
                        reach[child.index()] = &here * &strat.probs[ordinal][a];
                        stack.push(*child);
                    }
                }
            }
        }
        reach
    }
}

/// Validates a description into a [`GameTree`].
pub fn build_game(description: &GameDescription) -> Result<GameTree, GameError> {
    let mut kinds: BTreeMap<u32, usize> = BTreeMap::new(); // id -> index in combined list

    #[derive(Clone)]
    enum Raw<'a> {
        Decl(&'a NodeDecl),
        Term(&'a TerminalDecl),
    }
    let mut raw: Vec<Raw> = Vec::new();
    for d in &description.nodes {
        if kinds.insert(d.id, raw.len()).is_some() {
            return Err(GameError::DuplicateNodeId(d.id));
        }
        raw.push(Raw::Decl(d));
    }
    for t in &description.terminals {
        if kinds.insert(t.id, raw.len()).is_some() {
            return Err(GameError::DuplicateNodeId(t.id));
        }
        raw.push(Raw::Term(t));
    }
    if raw.is_empty() {
        return Err(GameError::NoRoot);
    }

    // Parent uniqueness: the successor map must form a tree.
    let mut parent: BTreeMap<u32, (u32, usize)> = BTreeMap::new();
    for d in &description.nodes {
        if d.actions.len() != d.children.len() {
            return Err(GameError::ActionChildMismatch { node: d.id });
        }
        if d.actions.is_empty() {
            return Err(GameError::EmptyActions { node: d.id });
        }
        for (i, a) in d.actions.iter().enumerate() {
            if d.actions[..i].contains(a) {
                return Err(GameError::DuplicateAction {
                    node: d.id,
                    action: a.clone(),
                });
            }
        }
        for (i, c) in d.children.iter().enumerate() {
            if !kinds.contains_key(c) {
                return Err(GameError::UndeclaredChild {
                    parent: d.id,
                    child: *c,
                });
            }
            if parent.insert(*c, (d.id, i)).is_some() {
                return Err(GameError::CycleDetected { node: *c });
            }
        }
        match (&d.owner, &d.chance_probs) {
            (PlayerId::Chance, None) => return Err(GameError::ChanceProbsMissing { node: d.id }),
            (PlayerId::Chance, Some(probs)) => {
                if probs.len() != d.children.len() {
                    return Err(GameError::ActionChildMismatch { node: d.id });
                }
                let mut sum = Rational::zero();
                for p in probs {
                    if p.is_negative() || p > &Rational::one() {
                        return Err(GameError::ChanceProbOutOfRange { node: d.id });
                    }
                    sum += p;
                }
                if !sum.is_one() {
                    return Err(GameError::ChanceProbsNotOne { node: d.id });
                }
            }
            _ => {}
        }
    }

    // Unique root = the unique declared node without a parent.
    let mut roots = kinds.keys().filter(|id| !parent.contains_key(id));
    let root_ext = *roots.next().ok_or(GameError::CycleDetected {
        node: *kinds.keys().next().unwrap(),
    })?;
    if let Some(extra) = roots.next() {
        // Two parentless nodes: the later one (input order) is unreachable.
        let unreachable = if root_ext <= *extra { *extra } else { root_ext };
        return Err(GameError::UnreachableNode(unreachable));
    }

    // Dense ids in input order.
    let ext_ids: Vec<u32> = {
        let mut v: Vec<u32> = Vec::new();
        for d in &description.nodes {
            v.push(d.id);
        }
        for t in &description.terminals {
            v.push(t.id);
        }
        v
    };
    let dense: BTreeMap<u32, NodeId> = ext_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (*id, NodeId(i as u32)))
        .collect();

    // Infosets keyed by (owner, label), in first-declaration order.
    let mut infosets: Vec<Infoset> = Vec::new();
    let mut infoset_index: BTreeMap<(PlayerId, String), InfosetId> = BTreeMap::new();
    let mut player_infosets: [Vec<InfosetId>; 2] = [Vec::new(), Vec::new()];

    let mut nodes: Vec<Node> = Vec::with_capacity(raw.len());
    for r in &raw {
        match r {
            Raw::Decl(d) => {
                let children: Vec<NodeId> = d.children.iter().map(|c| dense[c]).collect();
                let kind = match d.owner {
                    PlayerId::Chance => NodeKind::Chance {
                        children,
                        probs: d.chance_probs.clone().unwrap(),
                    },
                    owner => {
                        let key = (owner, d.infoset.clone());
                        let iset = match infoset_index.get(&key) {
                            Some(existing) => {
                                let info = &mut infosets[existing.index()];
                                if info.actions != d.actions {
                                    return Err(GameError::HeterogeneousActions {
                                        infoset: d.infoset.clone(),
                                    });
                                }
                                info.nodes.push(dense[&d.id]);
                                *existing
                            }
                            None => {
                                let id = InfosetId(infosets.len() as u32);
                                let slot = owner.strategic_index().unwrap();
                                let ordinal = player_infosets[slot].len() as u32;
                                player_infosets[slot].push(id);
                                infosets.push(Infoset {
                                    owner,
                                    label: d.infoset.clone(),
                                    actions: d.actions.clone(),
                                    nodes: alloc::vec![dense[&d.id]],
                                    ordinal,
                                });
                                infoset_index.insert(key, id);
                                id
                            }
                        };
                        NodeKind::Decision {
                            owner,
                            infoset: iset,
                            children,
                        }
                    }
                };
                nodes.push(Node { kind, parent: None });
            }
            Raw::Term(t) => {
                nodes.push(Node {
                    kind: NodeKind::Terminal {
                        leader_payoff: t.leader_payoff.clone(),
                        follower_payoff: t.follower_payoff.clone(),
                    },
                    parent: None,
                });
            }
        }
    }
    for (child, (p, action)) in &parent {
        nodes[dense[child].index()].parent = Some((dense[p], *action));
    }

    // Reachability from the root (cycle-free by parent uniqueness + unique root).
    let root = dense[&root_ext];
    let mut seen = alloc::vec![false; nodes.len()];
    let mut stack = alloc::vec![root];
    while let Some(id) = stack.pop() {
        seen[id.index()] = true;
        match &nodes[id.index()].kind {
            NodeKind::Decision { children, .. } | NodeKind::Chance { children, .. } => {
                stack.extend(children.iter().copied());
            }
            NodeKind::Terminal { .. } => {}
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(GameError::UnreachableNode(ext_ids[i]));
    }

    // Chance reach per node.
    let mut chance_reach = alloc::vec![Rational::one(); nodes.len()];
    let mut stack = alloc::vec![root];
    while let Some(id) = stack.pop() {
        let here = chance_reach[id.index()].clone();
        match &nodes[id.index()].kind {
            NodeKind::Terminal { .. } => {}
            NodeKind::Chance { children, probs } => {
                for (child, p) in children.iter().zip(probs) {
                    chance_reach[child.index()] = &here * p;
                    stack.push(*child);
                }
            }
            NodeKind::Decision { children, .. } => {
                for child in children {
                    chance_reach[child.index()] = here.clone();
                    stack.push(*child);
                }
            }
        }
    }

    Ok(GameTree {
        nodes,
        root,
        infosets,
        player_infosets,
        chance_reach,
    })
}

/// Perfect-recall violation: an infoset whose nodes disagree on the owner's
/// own past moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerfectRecallViolation {
    pub infoset: String,
    pub player: PlayerId,
    pub sequence_a: Vec<String>,
    pub sequence_b: Vec<String>,
}

impl fmt::Display for PerfectRecallViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "imperfect recall at {} infoset {:?}: histories {:?} vs {:?}",
            self.player, self.infoset, self.sequence_a, self.sequence_b
        )
    }
}

impl core::error::Error for PerfectRecallViolation {}

/// Checks that within every infoset all nodes share the owner's own action
/// sequence on their root paths. Returns the first offending infoset with the
/// two divergent sequences.
pub fn validate_perfect_recall(game: &GameTree) -> Result<(), PerfectRecallViolation> {
    for info in game.infosets() {
        let mut first: Option<Vec<(InfosetId, usize)>> = None;
        for &node in &info.nodes {
            let path = game.own_action_path(node, info.owner);
            match &first {
                None => first = Some(path),
                Some(reference) => {
                    if *reference != path {
                        return Err(PerfectRecallViolation {
                            infoset: info.label.clone(),
                            player: info.owner,
                            sequence_a: game.action_labels(reference),
                            sequence_b: game.action_labels(&path),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Per-infoset probability distributions over actions, exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehavioralStrategy {
    pub player: PlayerId,
    /// Indexed by the owner's infoset ordinal, then by action index.
    pub probs: Vec<Vec<Rational>>,
}

/// Invalid behavioral strategy: some infoset's entries are negative or do not
/// sum to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadDistribution {
    pub infoset: String,
}

impl fmt::Display for BadDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid distribution at infoset {:?}", self.infoset)
    }
}

impl core::error::Error for BadDistribution {}

impl BehavioralStrategy {
    /// Validates per-infoset distributions: entries ≥ 0 summing to exactly 1.
    pub fn new(
        game: &GameTree,
        player: PlayerId,
        probs: Vec<Vec<Rational>>,
    ) -> Result<Self, BadDistribution> {
        let infosets = game.player_infosets(player);
        assert_eq!(probs.len(), infosets.len(), "one distribution per infoset");
        for (iset, dist) in infosets.iter().zip(&probs) {
            let info = game.infoset(*iset);
            let bad = dist.len() != info.actions.len()
                || dist.iter().any(|p| p.is_negative())
                || dist.iter().sum::<Rational>() != Rational::one();
            if bad {
                return Err(BadDistribution {
                    infoset: info.label.clone(),
                });
            }
        }
        Ok(BehavioralStrategy { player, probs })
    }

    /// Uniform distribution at every infoset.
    pub fn uniform(game: &GameTree, player: PlayerId) -> Self {
        let probs = game
            .player_infosets(player)
            .iter()
            .map(|iset| {
                let n = game.infoset(*iset).actions.len();
                alloc::vec![Rational::new(1.into(), (n as i64).into()); n]
            })
            .collect();
        BehavioralStrategy { player, probs }
    }

    /// True iff every action at every infoset has strictly positive
    /// probability.
    pub fn completely_mixed(&self) -> bool {
        self.probs
            .iter()
            .all(|dist| dist.iter().all(|p| p.is_positive()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rat, rat_i};

    fn decl(
        id: u32,
        owner: PlayerId,
        infoset: &str,
        actions: &[&str],
        children: &[u32],
    ) -> NodeDecl {
        NodeDecl {
            id,
            owner,
            infoset: String::from(infoset),
            actions: actions.iter().map(|s| String::from(*s)).collect(),
            children: children.to_vec(),
            chance_probs: None,
        }
    }

    fn term(id: u32, l: i64, f: i64) -> TerminalDecl {
        TerminalDecl {
            id,
            leader_payoff: rat_i(l),
            follower_payoff: rat_i(f),
        }
    }

    /// Single leader decision {a, b} over two terminals.
    fn tiny() -> GameDescription {
        GameDescription {
            nodes: alloc::vec![decl(0, PlayerId::Leader, "root", &["a", "b"], &[1, 2])],
            terminals: alloc::vec![term(1, 3, -3), term(2, 0, 0)],
        }
    }

    #[test]
    fn smallest_nontrivial_tree() {
        let g = build_game(&tiny()).unwrap();
        assert_eq!(g.num_nodes(), 3);
        assert_eq!(g.player_infosets(PlayerId::Leader).len(), 1);
        assert_eq!(g.player_infosets(PlayerId::Follower).len(), 0);
        assert!(validate_perfect_recall(&g).is_ok());
    }

    #[test]
    fn heterogeneous_actions_rejected() {
        let d = GameDescription {
            nodes: alloc::vec![
                decl(0, PlayerId::Leader, "root", &["x", "y"], &[1, 2]),
                decl(1, PlayerId::Follower, "f", &["a", "b"], &[3, 4]),
                decl(2, PlayerId::Follower, "f", &["a", "b", "c"], &[5, 6, 7]),
            ],
            terminals: alloc::vec![
                term(3, 0, 0),
                term(4, 0, 0),
                term(5, 0, 0),
                term(6, 0, 0),
                term(7, 0, 0)
            ],
        };
        assert_eq!(
            build_game(&d).unwrap_err(),
            GameError::HeterogeneousActions {
                infoset: String::from("f")
            }
        );
    }

    #[test]
    fn chance_probabilities_must_sum_to_one() {
        let mut chance = decl(0, PlayerId::Chance, "", &["h", "t"], &[1, 2]);
        chance.chance_probs = Some(alloc::vec![rat(1, 2), rat(1, 3)]);
        let d = GameDescription {
            nodes: alloc::vec![chance],
            terminals: alloc::vec![term(1, 1, 0), term(2, 0, 1)],
        };
        assert_eq!(
            build_game(&d).unwrap_err(),
            GameError::ChanceProbsNotOne { node: 0 }
        );
    }

    #[test]
    fn diverging_infoset_histories_fail_recall() {
        // Follower infoset "f2" merges nodes reached after different follower
        // actions.
        let d = GameDescription {
            nodes: alloc::vec![
                decl(0, PlayerId::Follower, "f1", &["a", "b"], &[1, 2]),
                decl(1, PlayerId::Follower, "f2", &["c", "d"], &[3, 4]),
                decl(2, PlayerId::Follower, "f2", &["c", "d"], &[5, 6]),
            ],
            terminals: alloc::vec![term(3, 0, 0), term(4, 0, 0), term(5, 0, 0), term(6, 0, 0)],
        };
        let g = build_game(&d).unwrap();
        let violation = validate_perfect_recall(&g).unwrap_err();
        assert_eq!(violation.infoset, "f2");
        assert_eq!(violation.sequence_a, alloc::vec![String::from("a")]);
        assert_eq!(violation.sequence_b, alloc::vec![String::from("b")]);
    }

    #[test]
    fn unreachable_node_reported() {
        let mut d = tiny();
        d.terminals.push(term(9, 5, 5));
        assert_eq!(build_game(&d).unwrap_err(), GameError::UnreachableNode(9));
    }

    #[test]
    fn reparented_node_is_a_cycle() {
        let d = GameDescription {
            nodes: alloc::vec![
                decl(0, PlayerId::Leader, "root", &["a", "b"], &[1, 1]),
            ],
            terminals: alloc::vec![term(1, 0, 0)],
        };
        assert_eq!(build_game(&d).unwrap_err(), GameError::CycleDetected { node: 1 });
    }

    #[test]
    fn full_profile_reach_sums_to_one() {
        let g = build_game(&tiny()).unwrap();
        let leader = BehavioralStrategy::new(
            &g,
            PlayerId::Leader,
            alloc::vec![alloc::vec![rat(2, 7), rat(5, 7)]],
        )
        .unwrap();
        let follower = BehavioralStrategy::uniform(&g, PlayerId::Follower);
        let reach = g.terminal_reach(&leader, &follower);
        let total: Rational = g.terminals().map(|(id, _, _)| reach[id.index()].clone()).sum();
        assert_eq!(total, rat_i(1));
        let (ul, uf) = g.expected_utilities(&leader, &follower);
        assert_eq!(ul, rat(6, 7));
        assert_eq!(uf, rat(-6, 7));
    }

    #[test]
    fn distributions_validated() {
        let g = build_game(&tiny()).unwrap();
        let bad = BehavioralStrategy::new(
            &g,
            PlayerId::Leader,
            alloc::vec![alloc::vec![rat(1, 2), rat(1, 3)]],
        );
        assert!(bad.is_err());
        let mixed = BehavioralStrategy::uniform(&g, PlayerId::Leader);
        assert!(mixed.completely_mixed());
    }
}
