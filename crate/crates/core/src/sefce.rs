//! Correlated-recommendation LP over perturbed games and the
//! branch-and-bound search for strong Stackelberg equilibria.
//!
//! The correlation device draws a leader realization plan jointly with a
//! pure routing of the follower's residual mass — the mass above the
//! perturbation floors, which every plan must carry. Floors make the
//! residual flow non-conservative: each follower infoset injects its local
//! floor slack ξ(σ(I)) − Σ_a ξ(σ(I)a), which the routing then steers.
//!
//! Variables:
//!
//! * `m(σ_ℓ)` — the leader's realization plan (the σ_∅ recommendation
//!   column), with the perturbation floors as lower bounds;
//! * `q(σ_ℓ, σ_f)` — expected residual mass the routing places on σ_f
//!   jointly with the leader playing σ_ℓ: conservative flow in the leader
//!   coordinate, slack injections weighted by `m` in the follower
//!   coordinate;
//! * `w(I)` — the follower's best-response value below infoset I per unit of
//!   arriving mass, against the leader marginal `m`.
//!
//! The objective prices the leader's payoff exactly: floor leakage through
//! `m` plus residual value through `q`. The follower is kept best-responding
//! by a single delivered-value inequality — the residual value the routing
//! delivers to the follower must be at least the value of re-routing every
//! mass packet optimally, i.e. the `w`-weighted sum of all injections. Since
//! the `w` recursion bounds the true best-response value from above and
//! enters that inequality positively, any optimum pins it to the exact
//! best-response value, so the inequality says precisely "the implied
//! follower plan attains the best-response value". Forced recommendations
//! additionally pin the forced action to attain `w` at its infoset.
//!
//! Branch-and-bound forces one recommended action per follower infoset
//! (forcing zeroes the siblings' columns) until the relaxation is
//! residual-pure. At a residual-pure solution the flow constraints pin `q`
//! to the product of the leader marginal and the routed residual, the
//! objective equals the extracted profile's leader value exactly, and the
//! delivered-value inequality makes the extracted routing a follower best
//! response — all of which extraction asserts. With all floors zero the
//! whole construction is the classic unperturbed commitment LP.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::best_response::{best_response, check_theorem2};
use crate::game::{GameTree, InfosetId, PlayerId};
use crate::lp::{ExactLp, LpSolution, LpStatus, RowOp, Sense};
use crate::numeric::Rational;
use crate::perturb::PerturbedInstance;
use crate::seqform::{RealizationPlan, RelevanceMap, SequenceForm, SequenceId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SseError {
    /// The correlated-equilibrium LP does not support chance nodes.
    ChanceNodesUnsupported,
    /// A follower infoset's child floors exceed the mass guaranteed to
    /// arrive there; the slack-injection routing requires nonnegative local
    /// slack.
    NegativeFloorSlack { infoset: String },
}

impl fmt::Display for SseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SseError::ChanceNodesUnsupported => {
                write!(f, "chance nodes unsupported by SEFCE LP")
            }
            SseError::NegativeFloorSlack { infoset } => {
                write!(f, "negative floor slack at follower infoset {infoset:?}")
            }
        }
    }
}

impl core::error::Error for SseError {}

/// One branch-and-bound node: recommendations forced so far.
#[derive(Debug, Clone, Default)]
pub struct BnbNode {
    /// Follower infoset ordinal → forced action index.
    pub forced: BTreeMap<u32, usize>,
    /// Zeroed (infoset ordinal, action) recommendations.
    pub excluded: BTreeSet<(u32, usize)>,
    pub depth: u32,
}

impl BnbNode {
    pub fn root() -> Self {
        BnbNode::default()
    }

    /// Child node forcing `action` at the infoset: all sibling actions are
    /// excluded.
    pub fn force(&self, game: &GameTree, infoset: InfosetId, action: usize) -> Self {
        let info = game.infoset(infoset);
        assert_eq!(info.owner, PlayerId::Follower);
        let ordinal = info.ordinal;
        let mut child = self.clone();
        child.depth += 1;
        child.forced.insert(ordinal, action);
        for a in 0..info.actions.len() {
            if a != action {
                child.excluded.insert((ordinal, a));
            }
        }
        debug_assert!(!child.excluded.contains(&(ordinal, action)));
        child
    }
}

/// Index layout of one constructed LP.
#[derive(Debug, Clone)]
pub struct SefceLp {
    pub lp: ExactLp,
    /// m(σ_ℓ) occupies variables 0..|Σ_ℓ|.
    n_leader: usize,
    /// (σ_ℓ, σ_f≠∅) → q variable.
    q_vars: BTreeMap<(u32, u32), u32>,
    /// Follower infoset ordinal → best-response value variable.
    w_vars: Vec<u32>,
}

/// Follower-side local floor slack of an infoset:
/// ξ(σ(I)) − Σ_a ξ(σ(I)a).
fn local_slack(
    game: &GameTree,
    sf: &SequenceForm,
    inst: &PerturbedInstance,
    infoset: InfosetId,
) -> Rational {
    let parent = sf.seq_of_infoset(game, infoset);
    let mut slack = inst.xi(PlayerId::Follower, parent).clone();
    for a in 0..game.infoset(infoset).actions.len() {
        slack -= inst.xi(PlayerId::Follower, sf.extension(game, infoset, a));
    }
    slack
}

/// Builds the recommendation LP for a branch node.
pub fn build_sefce_lp(
    game: &GameTree,
    sf: &SequenceForm,
    rel: &RelevanceMap,
    inst: &PerturbedInstance,
    node: &BnbNode,
) -> Result<SefceLp, SseError> {
    if game.has_chance_nodes() {
        return Err(SseError::ChanceNodesUnsupported);
    }
    let n_leader = sf.num_sequences(PlayerId::Leader);
    let n_follower = sf.num_sequences(PlayerId::Follower);
    let follower_infosets = game.player_infosets(PlayerId::Follower);

    // Residual mass on the empty sequence: 0 perturbed (the ∅ floor is 1),
    // 1 unperturbed.
    let root_residual = Rational::one() - inst.xi(PlayerId::Follower, SequenceId::EMPTY);

    // Local slack per follower infoset; injected routing mass at an infoset
    // is the slack plus, at root infosets, the ∅ residual.
    let mut slack: Vec<Rational> = Vec::with_capacity(follower_infosets.len());
    for iset in follower_infosets {
        let s = local_slack(game, sf, inst, *iset);
        let parent = sf.seq_of_infoset(game, *iset);
        let injected = if parent == SequenceId::EMPTY {
            &s + &root_residual
        } else {
            s.clone()
        };
        if injected.is_negative() {
            return Err(SseError::NegativeFloorSlack {
                infoset: game.infoset(*iset).label.clone(),
            });
        }
        slack.push(s);
    }

    let excluded_pair = |f_seq: SequenceId| -> bool {
        match sf.sequence(PlayerId::Follower, f_seq).via {
            None => false,
            Some((iset, a)) => node.excluded.contains(&(game.infoset(iset).ordinal, a)),
        }
    };

    // Variable layout: m, then q over non-excluded relevant pairs, then w.
    let mut next: u32 = n_leader as u32;
    let mut q_vars = BTreeMap::new();
    for (l, f) in rel.pairs() {
        if f == SequenceId::EMPTY || excluded_pair(f) {
            continue;
        }
        q_vars.insert((l.0, f.0), next);
        next += 1;
    }
    let mut w_vars = Vec::with_capacity(follower_infosets.len());
    for _ in follower_infosets {
        w_vars.push(next);
        next += 1;
    }

    let mut lp = ExactLp::new(Sense::Maximize, next as usize);
    for var in &w_vars {
        lp.set_free(*var);
    }

    // Leader marginal m: floors as lower bounds, normalization, flow.
    for l in 0..n_leader {
        let floor = inst.xi(PlayerId::Leader, SequenceId(l as u32)).clone();
        lp.set_lower_bound(l as u32, floor);
    }
    lp.add_row(alloc::vec![(0, Rational::one())], RowOp::Eq, Rational::one());
    for iset in game.player_infosets(PlayerId::Leader) {
        let parent = sf.seq_of_infoset(game, *iset);
        let mut row = alloc::vec![(parent.0, Rational::one())];
        for a in 0..game.infoset(*iset).actions.len() {
            row.push((sf.extension(game, *iset, a).0, -Rational::one()));
        }
        lp.add_row(row, RowOp::Eq, Rational::zero());
    }

    let q_of = |l: u32, f: u32| q_vars.get(&(l, f)).copied();

    // Leader-coordinate flow of q.
    for iset in game.player_infosets(PlayerId::Leader) {
        let parent = sf.seq_of_infoset(game, *iset);
        let actions = game.infoset(*iset).actions.len();
        for f_seq in rel.rel_of_infoset(game, *iset) {
            if *f_seq == SequenceId::EMPTY || excluded_pair(*f_seq) {
                continue;
            }
            let Some(parent_var) = q_of(parent.0, f_seq.0) else {
                continue;
            };
            let mut row = alloc::vec![(parent_var, Rational::one())];
            for a in 0..actions {
                let child = sf.extension(game, *iset, a);
                if let Some(var) = q_of(child.0, f_seq.0) {
                    row.push((var, -Rational::one()));
                }
            }
            lp.add_row(row, RowOp::Eq, Rational::zero());
        }
    }

    // Follower-coordinate flow of q with slack injections:
    // Σ_a q(l, σ(I)a) = q(l, σ(I)) + slack_I·m(l), the ∅-column of q (the
    // ∅ residual times the leader marginal) folded into the m coefficient.
    for (idx, iset) in follower_infosets.iter().enumerate() {
        let parent = sf.seq_of_infoset(game, *iset);
        let actions = game.infoset(*iset).actions.len();
        for l_seq in rel.rel_of_infoset(game, *iset) {
            let mut m_coeff = -slack[idx].clone();
            let mut row: Vec<(u32, Rational)> = Vec::new();
            for a in 0..actions {
                let child = sf.extension(game, *iset, a);
                if let Some(var) = q_of(l_seq.0, child.0) {
                    row.push((var, Rational::one()));
                }
            }
            if parent == SequenceId::EMPTY {
                m_coeff -= &root_residual;
            } else if let Some(var) = q_of(l_seq.0, parent.0) {
                row.push((var, -Rational::one()));
            }
            if !m_coeff.is_zero() {
                row.push((l_seq.0, m_coeff));
            }
            lp.add_row(row, RowOp::Eq, Rational::zero());
        }
    }

    // Best-response value recursion against m: for every infoset and action,
    // w(I) ≥ Σ_l m(l)·u_f(l, σ(I)a) + Σ continuation w. Minimal w values are
    // the exact per-unit best-response values.
    let w_of = |iset: InfosetId| w_vars[game.infoset(iset).ordinal as usize];
    for iset in follower_infosets {
        let info = game.infoset(*iset);
        for a in 0..info.actions.len() {
            let child = sf.extension(game, *iset, a);
            let mut row = alloc::vec![(w_of(*iset), Rational::one())];
            for l_seq in rel.rel_of_follower(child) {
                let u = sf.payoff_entry(*l_seq, child, PlayerId::Follower);
                if !u.is_zero() {
                    row.push((l_seq.0, -u));
                }
            }
            for deeper in sf.continuations(PlayerId::Follower, child) {
                row.push((w_of(*deeper), -Rational::one()));
            }
            lp.add_row(row, RowOp::Ge, Rational::zero());

            // Forced recommendations must attain the best-response value.
            if node.forced.get(&info.ordinal) == Some(&a) {
                let mut tie = alloc::vec![(w_of(*iset), -Rational::one())];
                for l_seq in rel.rel_of_follower(child) {
                    let u = sf.payoff_entry(*l_seq, child, PlayerId::Follower);
                    if !u.is_zero() {
                        tie.push((l_seq.0, u));
                    }
                }
                for deeper in sf.continuations(PlayerId::Follower, child) {
                    tie.push((w_of(*deeper), Rational::one()));
                }
                lp.add_row(tie, RowOp::Ge, Rational::zero());
            }
        }
    }

    // Delivered-value inequality: the residual value the routing delivers to
    // the follower is at least the w-weighted worth of every injected packet
    // (∅ residual at root infosets, slack everywhere). Floor-leakage terms
    // coincide on both sides and cancel.
    {
        let mut row: Vec<(u32, Rational)> = Vec::new();
        for ((l, f), var) in &q_vars {
            let u = sf.payoff_entry(SequenceId(*l), SequenceId(*f), PlayerId::Follower);
            if !u.is_zero() {
                row.push((*var, u));
            }
        }
        for (idx, iset) in follower_infosets.iter().enumerate() {
            let parent = sf.seq_of_infoset(game, *iset);
            let mut weight = slack[idx].clone();
            if parent == SequenceId::EMPTY {
                weight += &root_residual;
            }
            if !weight.is_zero() {
                row.push((w_of(*iset), -weight));
            }
        }
        lp.add_row(row, RowOp::Ge, Rational::zero());
    }

    // Objective: floor leakage plus ∅ residual weight through m, residual
    // value through q.
    for l in 0..n_leader as u32 {
        let l_seq = SequenceId(l);
        let mut coeff = Rational::zero();
        for f in 0..n_follower as u32 {
            let u = sf.payoff_entry(l_seq, SequenceId(f), PlayerId::Leader);
            if !u.is_zero() {
                coeff += inst.xi(PlayerId::Follower, SequenceId(f)) * &u;
            }
        }
        let u_empty = sf.payoff_entry(l_seq, SequenceId::EMPTY, PlayerId::Leader);
        if !u_empty.is_zero() {
            coeff += &root_residual * &u_empty;
        }
        if !coeff.is_zero() {
            lp.set_objective(l, coeff);
        }
    }
    for ((l, f), var) in &q_vars {
        let u = sf.payoff_entry(SequenceId(*l), SequenceId(*f), PlayerId::Leader);
        if !u.is_zero() {
            lp.set_objective(*var, u);
        }
    }

    Ok(SefceLp {
        lp,
        n_leader,
        q_vars,
        w_vars,
    })
}

/// A solved recommendation LP, decoded.
#[derive(Debug, Clone)]
pub struct RecommendationPlan {
    pub objective: Rational,
    /// Leader marginal m(σ_ℓ), the σ_∅ recommendation column.
    pub leader_marginal: Vec<Rational>,
    /// Residual-mass family q over relevant pairs (σ_f ≠ ∅).
    pub mass: BTreeMap<(u32, u32), Rational>,
    /// Follower best-response value below each infoset (by ordinal), per
    /// unit of arriving mass, against the leader marginal.
    pub follower_values: Vec<Rational>,
}

impl SefceLp {
    pub fn decode(&self, sol: &LpSolution) -> RecommendationPlan {
        assert_eq!(sol.status, LpStatus::Optimal);
        let x = &sol.primal;
        RecommendationPlan {
            objective: sol.objective.clone(),
            leader_marginal: (0..self.n_leader).map(|l| x[l].clone()).collect(),
            mass: self
                .q_vars
                .iter()
                .map(|(k, v)| (*k, x[*v as usize].clone()))
                .collect(),
            follower_values: self
                .w_vars
                .iter()
                .map(|v| x[*v as usize].clone())
                .collect(),
        }
    }
}

impl RecommendationPlan {
    /// Residual mass of a pair.
    pub fn residual_mass(&self, l: SequenceId, f: SequenceId) -> Rational {
        self.mass
            .get(&(l.0, f.0))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Total recommendation mass on the action's sequence, summed over the
    /// leader sequences relevant to it.
    pub fn recommended_mass(
        &self,
        game: &GameTree,
        sf: &SequenceForm,
        rel: &RelevanceMap,
        infoset: InfosetId,
        action: usize,
    ) -> Rational {
        let seq = sf.extension(game, infoset, action);
        rel.rel_of_follower(seq)
            .iter()
            .map(|l| self.residual_mass(*l, seq))
            .sum()
    }
}

/// True iff at every follower infoset at most one action carries positive
/// recommendation mass.
pub fn is_residual_pure(
    plan: &RecommendationPlan,
    game: &GameTree,
    sf: &SequenceForm,
    rel: &RelevanceMap,
) -> bool {
    for iset in game.player_infosets(PlayerId::Follower) {
        let n = game.infoset(*iset).actions.len();
        let positive = (0..n)
            .filter(|a| plan.recommended_mass(game, sf, rel, *iset, *a).is_positive())
            .count();
        if positive > 1 {
            return false;
        }
    }
    true
}

/// Branch choice: the shallowest follower infoset with at least two
/// positively recommended actions, its actions ordered by descending mass
/// with index tie-breaks. `None` when residual-pure.
pub fn branch_select(
    plan: &RecommendationPlan,
    game: &GameTree,
    sf: &SequenceForm,
    rel: &RelevanceMap,
) -> Option<(InfosetId, Vec<usize>)> {
    let mut best: Option<(u32, u32, InfosetId)> = None; // (depth, ordinal, id)
    for iset in game.player_infosets(PlayerId::Follower) {
        let info = game.infoset(*iset);
        let n = info.actions.len();
        let positive = (0..n)
            .filter(|a| plan.recommended_mass(game, sf, rel, *iset, *a).is_positive())
            .count();
        if positive < 2 {
            continue;
        }
        let depth = sf
            .sequence(PlayerId::Follower, sf.seq_of_infoset(game, *iset))
            .depth;
        match &best {
            None => best = Some((depth, info.ordinal, *iset)),
            Some((d, o, _)) => {
                if (depth, info.ordinal) < (*d, *o) {
                    best = Some((depth, info.ordinal, *iset));
                }
            }
        }
    }
    let (_, _, iset) = best?;
    let n = game.infoset(iset).actions.len();
    let mut actions: Vec<usize> = (0..n).collect();
    let masses: Vec<Rational> = (0..n)
        .map(|a| plan.recommended_mass(game, sf, rel, iset, a))
        .collect();
    actions.sort_by(|a, b| masses[*b].cmp(&masses[*a]).then(a.cmp(b)));
    Some((iset, actions))
}

/// An extracted strong Stackelberg equilibrium of the instance.
#[derive(Debug, Clone)]
pub struct SseResult {
    pub leader: RealizationPlan,
    pub follower: RealizationPlan,
    pub leader_value: Rational,
    /// The residual-pure LP solution the profile was read off.
    pub certificate: RecommendationPlan,
}

/// Reads the equilibrium profile off a residual-pure solution.
///
/// The leader plan is the recommendation's leader marginal. The follower
/// routes all free mass along the recommended action at every infoset,
/// floors elsewhere. Extraction asserts the exactness contract: the mass
/// family factors as leader-marginal × routed residual, the extracted value
/// reproduces the LP objective, the routing passes the tight-mass optimality
/// check, and it attains the follower's best-response value.
pub fn extract_profile(
    plan: &RecommendationPlan,
    game: &GameTree,
    sf: &SequenceForm,
    rel: &RelevanceMap,
    inst: &PerturbedInstance,
    node: &BnbNode,
) -> SseResult {
    assert!(is_residual_pure(plan, game, sf, rel));
    let n_f = sf.num_sequences(PlayerId::Follower);

    let leader = RealizationPlan {
        player: PlayerId::Leader,
        values: plan.leader_marginal.clone(),
    };
    leader
        .validate(sf)
        .expect("extracted leader plan violates flow");
    assert!(
        inst.contains(sf, &leader),
        "extracted leader plan violates a perturbation floor"
    );

    // Recommended action per infoset: forced if present, else the unique
    // positive-mass action, else the follower's own preference (best
    // response value, leader-favoring ties are immaterial at zero mass).
    let mut chosen: Vec<usize> = Vec::new();
    for iset in game.player_infosets(PlayerId::Follower) {
        let info = game.infoset(*iset);
        let pick = node.forced.get(&info.ordinal).copied().or_else(|| {
            (0..info.actions.len())
                .find(|a| plan.recommended_mass(game, sf, rel, *iset, *a).is_positive())
        });
        chosen.push(pick.unwrap_or(0));
    }

    // Follower plan: floors everywhere, free mass (inherited residual plus
    // local slack) routed along the chosen actions.
    let xi = inst.xi_vector(PlayerId::Follower);
    let mut values: Vec<Rational> = xi.to_vec();
    values[0] = Rational::one();
    let mut residual = alloc::vec![Rational::zero(); n_f];
    residual[0] = Rational::one() - &xi[0];
    for (idx, iset) in game.player_infosets(PlayerId::Follower).iter().enumerate() {
        let parent = sf.seq_of_infoset(game, *iset);
        let slack = local_slack(game, sf, inst, *iset);
        let free = &residual[parent.index()] + &slack;
        let target = sf.extension(game, *iset, chosen[idx]);
        residual[target.index()] = free.clone();
        values[target.index()] = &xi[target.index()] + &free;
    }
    let follower = RealizationPlan {
        player: PlayerId::Follower,
        values,
    };
    follower
        .validate(sf)
        .expect("extracted follower plan violates flow");
    assert!(inst.contains(sf, &follower));

    // The mass family must equal the product of the leader marginal and the
    // extracted residual routing: recommendations are reference-independent.
    for ((l, f), mass) in &plan.mass {
        assert_eq!(
            *mass,
            &plan.leader_marginal[*l as usize] * &residual[*f as usize],
            "mass family disagrees with the extracted routing"
        );
    }

    // Exact value accounting.
    let leader_value = sf.expected_utility(&leader, &follower, PlayerId::Leader);
    assert_eq!(
        leader_value, plan.objective,
        "extracted leader value disagrees with the LP objective"
    );

    // The recommended routing is a follower best response.
    check_theorem2(game, sf, inst, &leader, &follower)
        .expect("extracted profile fails the tight-mass optimality check");
    let br = best_response(game, sf, inst, &leader).expect("best response on extracted leader");
    assert_eq!(
        br.value,
        sf.expected_utility(&leader, &follower, PlayerId::Follower),
        "extracted follower plan does not attain the best-response value"
    );

    SseResult {
        leader,
        follower,
        leader_value,
        certificate: plan.clone(),
    }
}

/// Search counters.
#[derive(Debug, Clone, Default)]
pub struct SseStats {
    pub lp_solves: u64,
    pub bnb_nodes: u64,
    pub lp_pivots: u64,
}

/// Branch-and-bound over follower recommendations: depth-first in descending
/// recommended-mass order, pruning nodes whose relaxation cannot beat the
/// incumbent strictly.
pub fn solve_sse(
    game: &GameTree,
    sf: &SequenceForm,
    rel: &RelevanceMap,
    inst: &PerturbedInstance,
) -> Result<(SseResult, SseStats), SseError> {
    match solve_sse_bounded(game, sf, rel, inst, &mut || false) {
        Ok(done) => Ok(done),
        Err(Interrupted::Error(e)) => Err(e),
        Err(Interrupted::Stopped) => unreachable!("never stops without a stop signal"),
    }
}

/// Search outcome when a stop signal can interrupt the search.
#[derive(Debug)]
pub enum Interrupted {
    Error(SseError),
    /// The stop callback fired before the search finished.
    Stopped,
}

impl From<SseError> for Interrupted {
    fn from(e: SseError) -> Self {
        Interrupted::Error(e)
    }
}

/// [`solve_sse`] with a cooperative stop signal, polled once per
/// branch-and-bound node (a node in flight runs to completion).
pub fn solve_sse_bounded(
    game: &GameTree,
    sf: &SequenceForm,
    rel: &RelevanceMap,
    inst: &PerturbedInstance,
    should_stop: &mut dyn FnMut() -> bool,
) -> Result<(SseResult, SseStats), Interrupted> {
    let mut stats = SseStats::default();
    let mut incumbent: Option<SseResult> = None;
    let mut stack = alloc::vec![BnbNode::root()];

    while let Some(node) = stack.pop() {
        if should_stop() {
            return Err(Interrupted::Stopped);
        }
        stats.bnb_nodes += 1;
        let sefce = build_sefce_lp(game, sf, rel, inst, &node)?;
        let sol = sefce.lp.solve().expect("recommendation LP solve");
        stats.lp_solves += 1;
        stats.lp_pivots += sol.pivots;
        match sol.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => unreachable!("recommendation LP is bounded"),
            LpStatus::Optimal => {}
        }
        if let Some(best) = &incumbent {
            // Equal-value branches are pruned; one optimum suffices.
            if sol.objective <= best.leader_value {
                continue;
            }
        }
        let plan = sefce.decode(&sol);
        match branch_select(&plan, game, sf, rel) {
            None => {
                let result = extract_profile(&plan, game, sf, rel, inst, &node);
                let better = incumbent
                    .as_ref()
                    .map(|best| result.leader_value > best.leader_value)
                    .unwrap_or(true);
                if better {
                    incumbent = Some(result);
                }
            }
            Some((iset, order)) => {
                // Depth-first along descending mass: push in reverse.
                for a in order.into_iter().rev() {
                    stack.push(node.force(game, iset, a));
                }
            }
        }
    }

    let result = incumbent.expect("feasible instance admits an equilibrium");
    Ok((result, stats))
}

/// One row of an anytime schedule run.
#[derive(Debug, Clone)]
pub struct AnytimeRow {
    pub eps: Rational,
    pub outcome: Result<(SseResult, SseStats), String>,
    /// Baseline minus perturbed leader value, when solved.
    pub loss: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleError {
    Empty,
    NotDecreasing,
    OutOfRange(Rational),
}

impl fmt::Display for ScheduleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleError::Empty => write!(f, "empty epsilon schedule"),
            ScheduleError::NotDecreasing => write!(f, "epsilon schedule must strictly decrease"),
            ScheduleError::OutOfRange(e) => write!(f, "epsilon {e} outside (0, 1]"),
        }
    }
}

impl core::error::Error for ScheduleError {}

pub fn validate_schedule(schedule: &[Rational]) -> Result<(), ScheduleError> {
    if schedule.is_empty() {
        return Err(ScheduleError::Empty);
    }
    for eps in schedule {
        if !eps.is_positive() || eps > &Rational::one() {
            return Err(ScheduleError::OutOfRange(eps.clone()));
        }
    }
    for pair in schedule.windows(2) {
        if pair[1] >= pair[0] {
            return Err(ScheduleError::NotDecreasing);
        }
    }
    Ok(())
}

/// Runs the solver along a strictly decreasing ε-schedule, reporting each
/// perturbed equilibrium and its leader-value loss against the unperturbed
/// baseline. Per-ε failures are reported and the remaining schedule
/// continues.
pub fn anytime_qpsse(
    game: &GameTree,
    sf: &SequenceForm,
    rel: &RelevanceMap,
    scheme: &crate::perturb::PerturbationScheme,
    schedule: &[Rational],
) -> Result<(Rational, Vec<AnytimeRow>), ScheduleError> {
    validate_schedule(schedule)?;
    let baseline = solve_sse(game, sf, rel, &PerturbedInstance::unperturbed(sf))
        .expect("baseline solve")
        .0
        .leader_value;
    let mut rows = Vec::new();
    for eps in schedule {
        let outcome = crate::perturb::instantiate(scheme, game, sf, eps)
            .map_err(|e| alloc::format!("{e}"))
            .and_then(|inst| solve_sse(game, sf, rel, &inst).map_err(|e| alloc::format!("{e}")));
        let loss = outcome
            .as_ref()
            .ok()
            .map(|(result, _)| &baseline - &result.leader_value);
        rows.push(AnytimeRow {
            eps: eps.clone(),
            outcome,
            loss,
        });
    }
    Ok((baseline, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_game, GameDescription, NodeDecl, TerminalDecl};
    use crate::numeric::{rat, rat_i};
    use crate::perturb::{instantiate, PerturbationScheme};
    use crate::seqform::relevance;

    fn setup(d: &GameDescription) -> (GameTree, SequenceForm, RelevanceMap) {
        let g = build_game(d).unwrap();
        let sf = SequenceForm::new(&g);
        let rel = relevance(&g, &sf);
        (g, sf, rel)
    }

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

    /// Leader commits between up/down; the follower observes nothing and
    /// picks x/y. Committing to a mix keeps the follower on the leader's
    /// preferred response.
    fn commitment_game() -> GameDescription {
        GameDescription {
            nodes: alloc::vec![
                decl(0, PlayerId::Leader, "l", &["up", "down"], &[1, 2]),
                decl(1, PlayerId::Follower, "f", &["x", "y"], &[3, 4]),
                decl(2, PlayerId::Follower, "f", &["x", "y"], &[5, 6]),
            ],
            terminals: alloc::vec![
                term(3, 1, 1),
                term(4, 3, 0),
                term(5, 0, 0),
                term(6, 2, 1),
            ],
        }
    }

    #[test]
    fn unperturbed_commitment_value() {
        let (g, sf, rel) = setup(&commitment_game());
        let inst = PerturbedInstance::unperturbed(&sf);
        let (result, stats) = solve_sse(&g, &sf, &rel, &inst).unwrap();
        // The leader mixes to the follower's indifference point, keeping the
        // follower on x wherever it pays: value 5/2.
        assert_eq!(result.leader_value, rat(5, 2));
        assert!(stats.lp_solves >= 1);
    }

    #[test]
    fn chance_nodes_rejected() {
        let mut chance = decl(0, PlayerId::Chance, "", &["h", "t"], &[1, 2]);
        chance.chance_probs = Some(alloc::vec![rat(1, 2), rat(1, 2)]);
        let d = GameDescription {
            nodes: alloc::vec![chance],
            terminals: alloc::vec![term(1, 1, 0), term(2, 0, 1)],
        };
        let (g, sf, rel) = setup(&d);
        let inst = PerturbedInstance::unperturbed(&sf);
        assert_eq!(
            solve_sse(&g, &sf, &rel, &inst).unwrap_err(),
            SseError::ChanceNodesUnsupported
        );
    }

    #[test]
    fn constant_game_has_zero_loss() {
        let d = GameDescription {
            nodes: alloc::vec![
                decl(0, PlayerId::Leader, "l", &["a", "b"], &[1, 2]),
                decl(1, PlayerId::Follower, "f", &["x", "y"], &[3, 4]),
                decl(2, PlayerId::Follower, "f", &["x", "y"], &[5, 6]),
            ],
            terminals: alloc::vec![
                term(3, 7, 7),
                term(4, 7, 7),
                term(5, 7, 7),
                term(6, 7, 7),
            ],
        };
        let (g, sf, rel) = setup(&d);
        let scheme = PerturbationScheme::miltersen(&sf);
        let (baseline, rows) =
            anytime_qpsse(&g, &sf, &rel, &scheme, &[rat(1, 10), rat(1, 100)]).unwrap();
        assert_eq!(baseline, rat_i(7));
        for row in rows {
            assert_eq!(row.loss.unwrap(), rat_i(0));
        }
    }

    #[test]
    fn perturbed_value_approaches_baseline() {
        let (g, sf, rel) = setup(&commitment_game());
        let scheme = PerturbationScheme::miltersen(&sf);
        let mut last_loss: Option<Rational> = None;
        for eps in [rat(1, 10), rat(1, 100), rat(1, 1000)] {
            let inst = instantiate(&scheme, &g, &sf, &eps).unwrap();
            let (result, _) = solve_sse(&g, &sf, &rel, &inst).unwrap();
            let loss = rat(5, 2) - result.leader_value;
            if let Some(prev) = &last_loss {
                assert!(loss <= *prev, "loss must not grow as ε shrinks");
            }
            last_loss = Some(loss);
        }
        assert!(last_loss.unwrap() < rat(1, 50));
    }

    #[test]
    fn schedule_validation() {
        assert_eq!(validate_schedule(&[]).unwrap_err(), ScheduleError::Empty);
        assert_eq!(
            validate_schedule(&[rat(1, 10), rat(1, 10)]).unwrap_err(),
            ScheduleError::NotDecreasing
        );
        assert!(matches!(
            validate_schedule(&[rat_i(2)]).unwrap_err(),
            ScheduleError::OutOfRange(_)
        ));
        validate_schedule(&[rat(1, 10), rat(1, 100)]).unwrap();
    }

    #[test]
    fn root_relaxation_bounds_the_result() {
        let (g, sf, rel) = setup(&commitment_game());
        let scheme = PerturbationScheme::miltersen(&sf);
        let inst = instantiate(&scheme, &g, &sf, &rat(1, 10)).unwrap();
        let root = build_sefce_lp(&g, &sf, &rel, &inst, &BnbNode::root()).unwrap();
        let root_value = root.lp.solve().unwrap().objective;
        let (result, _) = solve_sse(&g, &sf, &rel, &inst).unwrap();
        assert!(root_value >= result.leader_value);
    }

    #[test]
    fn deeper_interleaving_stays_solvable() {
        // Leader, pooled follower, leader again, then a second follower
        // infoset below one branch, with a large penalty off the main path.
        let d = GameDescription {
            nodes: alloc::vec![
                decl(0, PlayerId::Leader, "l1", &["u", "d"], &[1, 2]),
                decl(1, PlayerId::Follower, "f1", &["x", "y"], &[3, 4]),
                decl(2, PlayerId::Follower, "f1", &["x", "y"], &[5, 6]),
                decl(3, PlayerId::Leader, "l2", &["p", "q"], &[7, 8]),
                decl(4, PlayerId::Follower, "f2", &["c", "e"], &[9, 10]),
            ],
            terminals: alloc::vec![
                term(5, 1, 0),
                term(6, 0, 2),
                term(7, 4, 1),
                term(8, 0, 3),
                term(9, 2, 2),
                term(10, 1, -1_000_000),
            ],
        };
        let (g, sf, rel) = setup(&d);
        let scheme = PerturbationScheme::miltersen(&sf);
        for eps in [rat(1, 10), rat(1, 100)] {
            let inst = instantiate(&scheme, &g, &sf, &eps).unwrap();
            let (result, _) = solve_sse(&g, &sf, &rel, &inst).unwrap();
            let _ = result;
        }
    }
}
