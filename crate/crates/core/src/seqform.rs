//! Sequence-form compilation of a game tree.
//!
//! Each strategic player gets an ordered sequence set Σ (empty sequence
//! first, parents before children), flow-constraint matrices `F r = f`,
//! sparse bilinear payoff matrices, and the relevance/precedence structure
//! that the correlated-equilibrium LP is built from.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::game::{BehavioralStrategy, GameTree, InfosetId, NodeId, NodeKind, PlayerId};
use crate::numeric::Rational;

/// Index into a player's ordered sequence list; 0 is the empty sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SequenceId(pub u32);

impl SequenceId {
    pub const EMPTY: SequenceId = SequenceId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One sequence: the chain of a player's own actions identified by the last
/// (infoset, action) pair.
#[derive(Debug, Clone)]
pub struct SequenceInfo {
    /// σ of the infoset this sequence extends; `None` for the empty sequence.
    pub parent: Option<SequenceId>,
    /// The (infoset, action index) appended last; `None` for the empty
    /// sequence.
    pub via: Option<(InfosetId, usize)>,
    /// Number of actions in the sequence.
    pub depth: u32,
}

/// Sparse matrix row as sorted `(column, coefficient)` pairs.
pub type SparseRow = Vec<(u32, Rational)>;

/// Sequence sets, flow constraints, payoff matrices and per-node sequence
/// lookup for one game. Pure function of an immutable [`GameTree`];
/// shareable.
#[derive(Debug, Clone)]
pub struct SequenceForm {
    seqs: [Vec<SequenceInfo>; 2],
    /// σ_p(I) per infoset ordinal.
    seq_of_infoset: [Vec<SequenceId>; 2],
    /// Extension lookup: (infoset ordinal, action) → sequence.
    extension: [Vec<Vec<SequenceId>>; 2],
    /// Infosets whose σ_p(I) equals the given sequence, in discovery order.
    continuations: [Vec<Vec<InfosetId>>; 2],
    /// σ_p(h) per node.
    node_seq: [Vec<SequenceId>; 2],
    /// Flow constraints: row 0 pins the empty sequence to 1, one row per
    /// infoset thereafter.
    f_rows: [Vec<SparseRow>; 2],
    f_rhs: [Vec<Rational>; 2],
    /// Chance-weighted terminal payoffs summed per sequence pair:
    /// (σ_ℓ, σ_f) → (Σ u_ℓ·C, Σ u_f·C).
    payoff: BTreeMap<(u32, u32), (Rational, Rational)>,
}

impl SequenceForm {
    /// Compiles the sequence form. The game must satisfy perfect recall.
    pub fn new(game: &GameTree) -> Self {
        let mut seqs: [Vec<SequenceInfo>; 2] = [Vec::new(), Vec::new()];
        let mut seq_of_infoset: [Vec<SequenceId>; 2] = [
            alloc::vec![SequenceId::EMPTY; game.player_infosets(PlayerId::Leader).len()],
            alloc::vec![SequenceId::EMPTY; game.player_infosets(PlayerId::Follower).len()],
        ];
        let mut extension: [Vec<Vec<SequenceId>>; 2] = [
            alloc::vec![Vec::new(); game.player_infosets(PlayerId::Leader).len()],
            alloc::vec![Vec::new(); game.player_infosets(PlayerId::Follower).len()],
        ];
        let mut seen_infoset = [
            alloc::vec![false; game.player_infosets(PlayerId::Leader).len()],
            alloc::vec![false; game.player_infosets(PlayerId::Follower).len()],
        ];
        let mut continuations: [Vec<Vec<InfosetId>>; 2] = [Vec::new(), Vec::new()];
        let mut node_seq: [Vec<SequenceId>; 2] = [
            alloc::vec![SequenceId::EMPTY; game.num_nodes()],
            alloc::vec![SequenceId::EMPTY; game.num_nodes()],
        ];

        for p in 0..2 {
            seqs[p].push(SequenceInfo {
                parent: None,
                via: None,
                depth: 0,
            });
            continuations[p].push(Vec::new());
        }

        // Depth-first walk carrying the current own-sequence of both players;
        // children are visited in action order, so parents precede children
        // and the order is deterministic.
        let mut stack = alloc::vec![(game.root(), SequenceId::EMPTY, SequenceId::EMPTY)];
        while let Some((id, cur_l, cur_f)) = stack.pop() {
            node_seq[0][id.index()] = cur_l;
            node_seq[1][id.index()] = cur_f;
            match &game.node(id).kind {
                NodeKind::Terminal { .. } => {}
                NodeKind::Chance { children, .. } => {
                    for child in children.iter().rev() {
                        stack.push((*child, cur_l, cur_f));
                    }
                }
                NodeKind::Decision {
                    owner,
                    infoset,
                    children,
                } => {
                    let p = owner.strategic_index().unwrap();
                    let ordinal = game.infoset(*infoset).ordinal as usize;
                    let cur_own = if p == 0 { cur_l } else { cur_f };
                    if !seen_infoset[p][ordinal] {
                        seen_infoset[p][ordinal] = true;
                        seq_of_infoset[p][ordinal] = cur_own;
                        continuations[p][cur_own.index()].push(*infoset);
                        let depth = seqs[p][cur_own.index()].depth + 1;
                        for a in 0..children.len() {
                            let sid = SequenceId(seqs[p].len() as u32);
                            seqs[p].push(SequenceInfo {
                                parent: Some(cur_own),
                                via: Some((*infoset, a)),
                                depth,
                            });
                            continuations[p].push(Vec::new());
                            extension[p][ordinal].push(sid);
                        }
                    } else {
                        // Perfect recall: every node of the infoset carries
                        // the same own-sequence.
                        debug_assert_eq!(seq_of_infoset[p][ordinal], cur_own);
                    }
                    for (a, child) in children.iter().enumerate().rev() {
                        let ext = extension[p][ordinal][a];
                        if p == 0 {
                            stack.push((*child, ext, cur_f));
                        } else {
                            stack.push((*child, cur_l, ext));
                        }
                    }
                }
            }
        }

        // Flow constraints.
        let mut f_rows: [Vec<SparseRow>; 2] = [Vec::new(), Vec::new()];
        let mut f_rhs: [Vec<Rational>; 2] = [Vec::new(), Vec::new()];
        for p in 0..2 {
            let player = if p == 0 {
                PlayerId::Leader
            } else {
                PlayerId::Follower
            };
            f_rows[p].push(alloc::vec![(0u32, Rational::one())]);
            f_rhs[p].push(Rational::one());
            for (ordinal, iset) in game.player_infosets(player).iter().enumerate() {
                let mut row: SparseRow = Vec::new();
                row.push((seq_of_infoset[p][ordinal].0, -Rational::one()));
                for sid in &extension[p][ordinal] {
                    row.push((sid.0, Rational::one()));
                }
                row.sort_by_key(|(c, _)| *c);
                // A sequence extended by its own infoset would collapse the
                // -1/+1 pair; flow rows never do that.
                debug_assert!(row.iter().all(|(_, v)| !v.is_zero()));
                let _ = iset;
                f_rows[p].push(row);
                f_rhs[p].push(Rational::zero());
            }
        }

        // Chance-weighted payoff matrix entries.
        let mut payoff: BTreeMap<(u32, u32), (Rational, Rational)> = BTreeMap::new();
        for (id, u_l, u_f) in game.terminals() {
            let key = (node_seq[0][id.index()].0, node_seq[1][id.index()].0);
            let reach = game.chance_reach(id);
            let entry = payoff
                .entry(key)
                .or_insert_with(|| (Rational::zero(), Rational::zero()));
            entry.0 += u_l * reach;
            entry.1 += u_f * reach;
        }

        SequenceForm {
            seqs,
            seq_of_infoset,
            extension,
            continuations,
            node_seq,
            f_rows,
            f_rhs,
            payoff,
        }
    }

    fn slot(player: PlayerId) -> usize {
        player.strategic_index().expect("strategic player")
    }

    pub fn num_sequences(&self, player: PlayerId) -> usize {
        self.seqs[Self::slot(player)].len()
    }

    pub fn sequence(&self, player: PlayerId, seq: SequenceId) -> &SequenceInfo {
        &self.seqs[Self::slot(player)][seq.index()]
    }

    pub fn sequences(&self, player: PlayerId) -> &[SequenceInfo] {
        &self.seqs[Self::slot(player)]
    }

    /// σ_p(I): the owner's sequence leading to the infoset.
    pub fn seq_of_infoset(&self, game: &GameTree, infoset: InfosetId) -> SequenceId {
        let info = game.infoset(infoset);
        self.seq_of_infoset[Self::slot(info.owner)][info.ordinal as usize]
    }

    /// σ_p(I)a for an action index at the infoset.
    pub fn extension(&self, game: &GameTree, infoset: InfosetId, action: usize) -> SequenceId {
        let info = game.infoset(infoset);
        self.extension[Self::slot(info.owner)][info.ordinal as usize][action]
    }

    /// Infosets I of the sequence's owner with σ(I) equal to this sequence.
    pub fn continuations(&self, player: PlayerId, seq: SequenceId) -> &[InfosetId] {
        &self.continuations[Self::slot(player)][seq.index()]
    }

    /// σ_p(h) for a node.
    pub fn node_sequence(&self, player: PlayerId, node: NodeId) -> SequenceId {
        self.node_seq[Self::slot(player)][node.index()]
    }

    /// Flow constraint rows and right-hand side (1, 0, …, 0).
    pub fn flow_constraints(&self, player: PlayerId) -> (&[SparseRow], &[Rational]) {
        let p = Self::slot(player);
        (&self.f_rows[p], &self.f_rhs[p])
    }

    /// Nonzero chance-weighted payoff entries (σ_ℓ, σ_f, u_ℓ·C, u_f·C).
    pub fn payoff_pairs(&self) -> impl Iterator<Item = (SequenceId, SequenceId, &Rational, &Rational)> {
        self.payoff
            .iter()
            .map(|((l, f), (ul, uf))| (SequenceId(*l), SequenceId(*f), ul, uf))
    }

    /// Single payoff-matrix entry for one player.
    pub fn payoff_entry(&self, leader_seq: SequenceId, follower_seq: SequenceId, player: PlayerId) -> Rational {
        match self.payoff.get(&(leader_seq.0, follower_seq.0)) {
            None => Rational::zero(),
            Some((ul, uf)) => match player {
                PlayerId::Leader => ul.clone(),
                PlayerId::Follower => uf.clone(),
                PlayerId::Chance => panic!("chance has no payoff"),
            },
        }
    }

    /// Bilinear expected utility r_ℓᵀ U_i r_f.
    pub fn expected_utility(
        &self,
        leader: &RealizationPlan,
        follower: &RealizationPlan,
        player: PlayerId,
    ) -> Rational {
        assert_eq!(leader.player, PlayerId::Leader);
        assert_eq!(follower.player, PlayerId::Follower);
        let mut total = Rational::zero();
        for ((l, f), (ul, uf)) in &self.payoff {
            let w = &leader.values[*l as usize] * &follower.values[*f as usize];
            let u = match player {
                PlayerId::Leader => ul,
                PlayerId::Follower => uf,
                PlayerId::Chance => panic!("chance has no payoff"),
            };
            total += w * u;
        }
        total
    }

    /// Whether `a ⊑ b` (prefix order on one player's sequences).
    pub fn is_prefix(&self, player: PlayerId, a: SequenceId, b: SequenceId) -> bool {
        let seqs = &self.seqs[Self::slot(player)];
        let mut cur = b;
        loop {
            if cur == a {
                return true;
            }
            match seqs[cur.index()].parent {
                Some(p) => cur = p,
                None => return false,
            }
        }
    }

    /// Dotted action-label rendering, `*` for the empty sequence.
    pub fn seq_label(&self, game: &GameTree, player: PlayerId, seq: SequenceId) -> String {
        let mut labels: Vec<String> = Vec::new();
        let seqs = &self.seqs[Self::slot(player)];
        let mut cur = seq;
        while let Some((iset, a)) = seqs[cur.index()].via {
            labels.push(game.infoset(iset).actions[a].clone());
            cur = seqs[cur.index()].parent.unwrap();
        }
        if labels.is_empty() {
            return String::from("*");
        }
        labels.reverse();
        labels.join(".")
    }
}

/// Realization-plan violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanError {
    WrongLength,
    EmptySequenceNotOne,
    NegativeEntry(SequenceId),
    FlowViolated { infoset_row: usize },
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanError::WrongLength => write!(f, "plan length mismatch"),
            PlanError::EmptySequenceNotOne => write!(f, "empty sequence probability is not 1"),
            PlanError::NegativeEntry(s) => write!(f, "negative probability at sequence {}", s.0),
            PlanError::FlowViolated { infoset_row } => {
                write!(f, "flow conservation violated at infoset row {infoset_row}")
            }
        }
    }
}

impl core::error::Error for PlanError {}

/// Probability per sequence, satisfying the flow constraints exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizationPlan {
    pub player: PlayerId,
    pub values: Vec<Rational>,
}

impl RealizationPlan {
    pub fn value(&self, seq: SequenceId) -> &Rational {
        &self.values[seq.index()]
    }

    /// Exact check of r(σ_∅) = 1, flow conservation, nonnegativity.
    pub fn validate(&self, sf: &SequenceForm) -> Result<(), PlanError> {
        if self.values.len() != sf.num_sequences(self.player) {
            return Err(PlanError::WrongLength);
        }
        if !self.values[0].is_one() {
            return Err(PlanError::EmptySequenceNotOne);
        }
        for (i, v) in self.values.iter().enumerate() {
            if v.is_negative() {
                return Err(PlanError::NegativeEntry(SequenceId(i as u32)));
            }
        }
        let (rows, rhs) = sf.flow_constraints(self.player);
        for (i, (row, b)) in rows.iter().zip(rhs).enumerate().skip(1) {
            let lhs: Rational = row
                .iter()
                .map(|(c, coef)| coef * &self.values[*c as usize])
                .sum();
            if &lhs != b {
                return Err(PlanError::FlowViolated { infoset_row: i });
            }
        }
        Ok(())
    }
}

/// r(σ) = Π of the behavioral probabilities of σ's actions.
pub fn behavioral_to_realization(
    game: &GameTree,
    sf: &SequenceForm,
    strategy: &BehavioralStrategy,
) -> RealizationPlan {
    let player = strategy.player;
    let n = sf.num_sequences(player);
    let mut values = alloc::vec![Rational::zero(); n];
    values[0] = Rational::one();
    // Parents precede children in the sequence order.
    for i in 1..n {
        let info = sf.sequence(player, SequenceId(i as u32));
        let (iset, a) = info.via.unwrap();
        let parent = info.parent.unwrap();
        let ordinal = game.infoset(iset).ordinal as usize;
        values[i] = &values[parent.index()] * &strategy.probs[ordinal][a];
    }
    RealizationPlan { player, values }
}

/// π_{Ia} = r(σ(I)a)/r(σ(I)) where the denominator is positive, uniform at
/// unreachable infosets.
pub fn realization_to_behavioral(
    game: &GameTree,
    sf: &SequenceForm,
    plan: &RealizationPlan,
) -> BehavioralStrategy {
    let player = plan.player;
    let mut probs: Vec<Vec<Rational>> = Vec::new();
    for iset in game.player_infosets(player) {
        let info = game.infoset(*iset);
        let ordinal = info.ordinal as usize;
        let parent_seq = sf.seq_of_infoset[SequenceForm::slot(player)][ordinal];
        let denom = plan.value(parent_seq);
        let n = info.actions.len();
        let dist = if denom.is_positive() {
            (0..n)
                .map(|a| {
                    let ext = sf.extension[SequenceForm::slot(player)][ordinal][a];
                    plan.value(ext) / denom
                })
                .collect()
        } else {
            alloc::vec![Rational::new(1.into(), (n as i64).into()); n]
        };
        probs.push(dist);
    }
    BehavioralStrategy { player, probs }
}

/// Relevance and precedence structure for sequence pairs.
///
/// A pair (σ_ℓ, σ_f) is relevant when either side is the empty sequence or
/// when the infosets that spawn them are connected: some node of one precedes
/// a node of the other.
#[derive(Debug, Clone)]
pub struct RelevanceMap {
    pairs: BTreeSet<(u32, u32)>,
    rel_of_leader: Vec<Vec<SequenceId>>,
    rel_of_follower: Vec<Vec<SequenceId>>,
    /// rel(I) per leader infoset ordinal: follower sequences relevant to the
    /// infoset's child sequences.
    rel_of_leader_infoset: Vec<Vec<SequenceId>>,
    /// rel(I) per follower infoset ordinal: leader sequences.
    rel_of_follower_infoset: Vec<Vec<SequenceId>>,
    /// prec(I) per follower infoset ordinal: follower sequences σ_f(Î)a with
    /// σ_f(Î) ⊑ σ_f(I).
    prec: Vec<Vec<SequenceId>>,
}

impl RelevanceMap {
    pub fn is_relevant(&self, leader_seq: SequenceId, follower_seq: SequenceId) -> bool {
        self.pairs.contains(&(leader_seq.0, follower_seq.0))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (SequenceId, SequenceId)> + '_ {
        self.pairs.iter().map(|(l, f)| (SequenceId(*l), SequenceId(*f)))
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// Follower sequences relevant to a leader sequence.
    pub fn rel_of_leader(&self, seq: SequenceId) -> &[SequenceId] {
        &self.rel_of_leader[seq.index()]
    }

    /// Leader sequences relevant to a follower sequence.
    pub fn rel_of_follower(&self, seq: SequenceId) -> &[SequenceId] {
        &self.rel_of_follower[seq.index()]
    }

    /// rel(I): opponent sequences relevant to the infoset's child sequences.
    pub fn rel_of_infoset(&self, game: &GameTree, infoset: InfosetId) -> &[SequenceId] {
        let info = game.infoset(infoset);
        match info.owner {
            PlayerId::Leader => &self.rel_of_leader_infoset[info.ordinal as usize],
            PlayerId::Follower => &self.rel_of_follower_infoset[info.ordinal as usize],
            PlayerId::Chance => panic!("chance has no infosets"),
        }
    }

    /// prec(I) for a follower infoset.
    pub fn prec(&self, game: &GameTree, infoset: InfosetId) -> &[SequenceId] {
        let info = game.infoset(infoset);
        assert_eq!(info.owner, PlayerId::Follower);
        &self.prec[info.ordinal as usize]
    }
}

/// Computes the relevance map from infoset connectivity.
pub fn relevance(game: &GameTree, sf: &SequenceForm) -> RelevanceMap {
    let n_l = sf.num_sequences(PlayerId::Leader);
    let n_f = sf.num_sequences(PlayerId::Follower);
    let leader_infosets = game.player_infosets(PlayerId::Leader).len();
    let follower_infosets = game.player_infosets(PlayerId::Follower).len();

    // connected[leader ordinal][follower ordinal]: a node of one infoset
    // precedes (or equals-path-wise) a node of the other, in either role
    // order. Walk every node's ancestor chain once.
    let mut connected = alloc::vec![alloc::vec![false; follower_infosets]; leader_infosets];
    for id in game.node_ids() {
        let here = match &game.node(id).kind {
            NodeKind::Decision { owner, infoset, .. } => Some((*owner, *infoset)),
            _ => None,
        };
        let Some((owner, infoset)) = here else {
            continue;
        };
        let ordinal = game.infoset(infoset).ordinal as usize;
        let mut cur = id;
        while let Some((parent, _)) = game.node(cur).parent {
            if let NodeKind::Decision {
                owner: up_owner,
                infoset: up_iset,
                ..
            } = &game.node(parent).kind
            {
                let up_ord = game.infoset(*up_iset).ordinal as usize;
                match (up_owner, owner) {
                    (PlayerId::Leader, PlayerId::Follower) => {
                        connected[up_ord][ordinal] = true;
                    }
                    (PlayerId::Follower, PlayerId::Leader) => {
                        connected[ordinal][up_ord] = true;
                    }
                    _ => {}
                }
            }
            cur = parent;
        }
    }

    let via_ordinal = |player: PlayerId, seq: SequenceId| -> Option<usize> {
        sf.sequence(player, seq)
            .via
            .map(|(iset, _)| game.infoset(iset).ordinal as usize)
    };

    let mut pairs: BTreeSet<(u32, u32)> = BTreeSet::new();
    for l in 0..n_l as u32 {
        for f in 0..n_f as u32 {
            let relevant = if l == 0 || f == 0 {
                true
            } else {
                let lo = via_ordinal(PlayerId::Leader, SequenceId(l)).unwrap();
                let fo = via_ordinal(PlayerId::Follower, SequenceId(f)).unwrap();
                connected[lo][fo]
            };
            if relevant {
                pairs.insert((l, f));
            }
        }
    }

    let mut rel_of_leader = alloc::vec![Vec::new(); n_l];
    let mut rel_of_follower = alloc::vec![Vec::new(); n_f];
    for (l, f) in &pairs {
        rel_of_leader[*l as usize].push(SequenceId(*f));
        rel_of_follower[*f as usize].push(SequenceId(*l));
    }

    // rel(I): all child sequences of I share the same relevance set.
    let mut rel_of_leader_infoset = Vec::with_capacity(leader_infosets);
    for iset in game.player_infosets(PlayerId::Leader) {
        let child = sf.extension(game, *iset, 0);
        rel_of_leader_infoset.push(rel_of_leader[child.index()].clone());
    }
    let mut rel_of_follower_infoset = Vec::with_capacity(follower_infosets);
    for iset in game.player_infosets(PlayerId::Follower) {
        let child = sf.extension(game, *iset, 0);
        rel_of_follower_infoset.push(rel_of_follower[child.index()].clone());
    }

    // prec(I): child sequences of every follower infoset Î whose own sequence
    // prefixes σ_f(I).
    let mut prec = Vec::with_capacity(follower_infosets);
    for iset in game.player_infosets(PlayerId::Follower) {
        let seq_i = sf.seq_of_infoset(game, *iset);
        let mut set: Vec<SequenceId> = Vec::new();
        for other in game.player_infosets(PlayerId::Follower) {
            let seq_other = sf.seq_of_infoset(game, *other);
            if sf.is_prefix(PlayerId::Follower, seq_other, seq_i) {
                let info = game.infoset(*other);
                for a in 0..info.actions.len() {
                    set.push(sf.extension(game, *other, a));
                }
            }
        }
        set.sort();
        set.dedup();
        prec.push(set);
    }

    RelevanceMap {
        pairs,
        rel_of_leader,
        rel_of_follower,
        rel_of_leader_infoset,
        rel_of_follower_infoset,
        prec,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_game, validate_perfect_recall, GameDescription, NodeDecl, TerminalDecl};
    use crate::games::gen_observation1_game;
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

    #[test]
    fn one_infoset_sequences() {
        let d = GameDescription {
            nodes: alloc::vec![decl(0, PlayerId::Leader, "root", &["a", "b"], &[1, 2])],
            terminals: alloc::vec![term(1, 1, 0), term(2, 0, 1)],
        };
        let g = build_game(&d).unwrap();
        let sf = SequenceForm::new(&g);
        assert_eq!(sf.num_sequences(PlayerId::Leader), 3);
        assert_eq!(sf.num_sequences(PlayerId::Follower), 1);
    }

    #[test]
    fn two_level_leader_tree_sequences_and_flow() {
        let g = gen_observation1_game(&[
            (rat_i(1), rat_i(0)),
            (rat_i(0), rat_i(0)),
            (rat_i(2), rat_i(0)),
        ])
        .unwrap();
        validate_perfect_recall(&g).unwrap();
        let sf = SequenceForm::new(&g);
        // Σ_ℓ = [∅, a1, a2, a2.a3, a2.a4]
        assert_eq!(sf.num_sequences(PlayerId::Leader), 5);
        let labels: Vec<String> = (0..5)
            .map(|i| sf.seq_label(&g, PlayerId::Leader, SequenceId(i)))
            .collect();
        assert_eq!(labels, ["*", "a1", "a2", "a2.a3", "a2.a4"]);

        // F_ℓ rows: (1,0,0,0,0), (-1,1,1,0,0), (0,0,-1,1,1); f = (1,0,0).
        let (rows, rhs) = sf.flow_constraints(PlayerId::Leader);
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0], alloc::vec![(0, rat_i(1))]);
        assert_eq!(rows[1], alloc::vec![(0, rat_i(-1)), (1, rat_i(1)), (2, rat_i(1))]);
        assert_eq!(rows[2], alloc::vec![(2, rat_i(-1)), (3, rat_i(1)), (4, rat_i(1))]);
        assert_eq!(rhs, &[rat_i(1), rat_i(0), rat_i(0)]);
    }

    #[test]
    fn single_terminal_payoff_at_empty_pair() {
        let d = GameDescription {
            nodes: alloc::vec![],
            terminals: alloc::vec![term(0, 3, -3)],
        };
        let g = build_game(&d).unwrap();
        let sf = SequenceForm::new(&g);
        assert_eq!(
            sf.payoff_entry(SequenceId::EMPTY, SequenceId::EMPTY, PlayerId::Leader),
            rat_i(3)
        );
        assert_eq!(
            sf.payoff_entry(SequenceId::EMPTY, SequenceId::EMPTY, PlayerId::Follower),
            rat_i(-3)
        );
    }

    #[test]
    fn behavioral_round_trip_uniform() {
        let d = GameDescription {
            nodes: alloc::vec![decl(0, PlayerId::Leader, "root", &["a", "b"], &[1, 2])],
            terminals: alloc::vec![term(1, 1, 0), term(2, 0, 1)],
        };
        let g = build_game(&d).unwrap();
        let sf = SequenceForm::new(&g);
        let uniform = BehavioralStrategy::uniform(&g, PlayerId::Leader);
        let plan = behavioral_to_realization(&g, &sf, &uniform);
        assert_eq!(plan.values, alloc::vec![rat_i(1), rat(1, 2), rat(1, 2)]);
        plan.validate(&sf).unwrap();
        let back = realization_to_behavioral(&g, &sf, &plan);
        assert_eq!(back, uniform);
    }

    #[test]
    fn zero_mass_infoset_becomes_uniform() {
        let g = gen_observation1_game(&[
            (rat_i(1), rat_i(0)),
            (rat_i(0), rat_i(0)),
            (rat_i(2), rat_i(0)),
        ])
        .unwrap();
        let sf = SequenceForm::new(&g);
        // All mass on a1 leaves the second infoset unreached.
        let plan = RealizationPlan {
            player: PlayerId::Leader,
            values: alloc::vec![rat_i(1), rat_i(1), rat_i(0), rat_i(0), rat_i(0)],
        };
        plan.validate(&sf).unwrap();
        let strat = realization_to_behavioral(&g, &sf, &plan);
        assert_eq!(strat.probs[1], alloc::vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn empty_sequence_pairs_always_relevant() {
        let g = gen_observation1_game(&[
            (rat_i(1), rat_i(0)),
            (rat_i(0), rat_i(0)),
            (rat_i(2), rat_i(0)),
        ])
        .unwrap();
        let sf = SequenceForm::new(&g);
        let rel = relevance(&g, &sf);
        for f in 0..sf.num_sequences(PlayerId::Follower) as u32 {
            assert!(rel.is_relevant(SequenceId::EMPTY, SequenceId(f)));
        }
        for l in 0..sf.num_sequences(PlayerId::Leader) as u32 {
            assert!(rel.is_relevant(SequenceId(l), SequenceId::EMPTY));
        }
    }
}
