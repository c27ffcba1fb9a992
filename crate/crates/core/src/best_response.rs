//! Follower best responses in perturbed game instances.
//!
//! The follower's best-response problem against a fixed leader plan is a
//! linear program over the residual part of the follower's plan (the mass
//! above the perturbation floors). This module builds that primal, its
//! explicit dual over per-infoset value variables, per-infoset subgame value
//! programs, and the two structural checks used to certify sequential
//! rationality of solver output: the tight-mass optimality check on
//! perturbed best responses and the per-infoset best-response test against
//! completely mixed leader strategies.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::game::{BehavioralStrategy, GameTree, InfosetId, PlayerId};
use crate::lp::{ExactLp, LpStatus, RowOp, Sense};
use crate::numeric::Rational;
use crate::perturb::PerturbedInstance;
use crate::seqform::{behavioral_to_realization, RealizationPlan, SequenceForm, SequenceId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BrError {
    /// The leader plan is not a valid realization plan.
    LeaderPlanInvalid,
    /// The leader plan violates a perturbation floor.
    LeaderPlanBelowFloor {
        sequence: SequenceId,
        value: Rational,
        floor: Rational,
    },
}

impl fmt::Display for BrError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BrError::LeaderPlanInvalid => write!(f, "leader plan violates flow constraints"),
            BrError::LeaderPlanBelowFloor { sequence, value, floor } => write!(
                f,
                "leader plan below floor at sequence {}: {value} < {floor}",
                sequence.0
            ),
        }
    }
}

impl core::error::Error for BrError {}

fn check_leader_plan(
    sf: &SequenceForm,
    inst: &PerturbedInstance,
    leader: &RealizationPlan,
) -> Result<(), BrError> {
    assert_eq!(leader.player, PlayerId::Leader);
    if leader.validate(sf).is_err() {
        return Err(BrError::LeaderPlanInvalid);
    }
    for (i, (v, floor)) in leader
        .values
        .iter()
        .zip(inst.xi_vector(PlayerId::Leader))
        .enumerate()
    {
        if v < floor {
            return Err(BrError::LeaderPlanBelowFloor {
                sequence: SequenceId(i as u32),
                value: v.clone(),
                floor: floor.clone(),
            });
        }
    }
    Ok(())
}

/// U_fᵀ r_ℓ: the follower's expected payoff per own sequence under the
/// leader plan.
pub fn follower_payoff_weights(sf: &SequenceForm, leader_values: &[Rational]) -> Vec<Rational> {
    let mut weights = alloc::vec![Rational::zero(); sf.num_sequences(PlayerId::Follower)];
    for (l, f, _, uf) in sf.payoff_pairs() {
        let w = &leader_values[l.index()];
        if !w.is_zero() && !uf.is_zero() {
            weights[f.index()] += w * uf;
        }
    }
    weights
}

/// Right-hand side f_f − F_f ξ_f(ε) of the residual flow system.
fn residual_rhs(game: &GameTree, sf: &SequenceForm, xi_f: &[Rational]) -> Vec<Rational> {
    let mut rhs = Vec::with_capacity(1 + game.player_infosets(PlayerId::Follower).len());
    rhs.push(Rational::one() - &xi_f[0]);
    for iset in game.player_infosets(PlayerId::Follower) {
        let parent = sf.seq_of_infoset(game, *iset);
        let mut v = xi_f[parent.index()].clone();
        for a in 0..game.infoset(*iset).actions.len() {
            v -= &xi_f[sf.extension(game, *iset, a).index()];
        }
        rhs.push(v);
    }
    rhs
}

/// Residual best-response primal: maximize the leader-weighted follower
/// payoff of the residual subject to F_f r̃ = f_f − F_f ξ_f(ε), r̃ ≥ 0. The
/// full best response is r̃* + ξ_f(ε).
pub fn build_primal(
    game: &GameTree,
    sf: &SequenceForm,
    inst: &PerturbedInstance,
    leader: &RealizationPlan,
) -> Result<ExactLp, BrError> {
    check_leader_plan(sf, inst, leader)?;
    let weights = follower_payoff_weights(sf, &leader.values);
    let n = sf.num_sequences(PlayerId::Follower);
    let mut lp = ExactLp::new(Sense::Maximize, n);
    for (j, w) in weights.iter().enumerate() {
        lp.set_objective(j as u32, w.clone());
    }
    let (rows, _) = sf.flow_constraints(PlayerId::Follower);
    let rhs = residual_rhs(game, sf, inst.xi_vector(PlayerId::Follower));
    for (row, b) in rows.iter().zip(rhs) {
        lp.add_row(row.clone(), RowOp::Eq, b);
    }
    Ok(lp)
}

/// Explicit dual of the residual best-response primal: one free value
/// variable per follower infoset plus the fictitious root entry, minimizing
/// (f_f − F_f ξ_f(ε))ᵀ v subject to F_fᵀ v ≥ U_fᵀ r_ℓ(ε).
pub fn build_dual(
    game: &GameTree,
    sf: &SequenceForm,
    inst: &PerturbedInstance,
    leader: &RealizationPlan,
) -> Result<ExactLp, BrError> {
    check_leader_plan(sf, inst, leader)?;
    let weights = follower_payoff_weights(sf, &leader.values);
    let m = 1 + game.player_infosets(PlayerId::Follower).len();
    let mut lp = ExactLp::new(Sense::Minimize, m);
    let rhs = residual_rhs(game, sf, inst.xi_vector(PlayerId::Follower));
    for (row_idx, coeff) in rhs.into_iter().enumerate() {
        lp.set_free(row_idx as u32);
        lp.set_objective(row_idx as u32, coeff);
    }
    // One constraint per follower sequence: the column of F_f transposed.
    let (rows, _) = sf.flow_constraints(PlayerId::Follower);
    let n = sf.num_sequences(PlayerId::Follower);
    let mut cols: Vec<Vec<(u32, Rational)>> = alloc::vec![Vec::new(); n];
    for (row_idx, row) in rows.iter().enumerate() {
        for (c, v) in row {
            cols[*c as usize].push((row_idx as u32, v.clone()));
        }
    }
    for (seq, col) in cols.into_iter().enumerate() {
        lp.add_row(col, RowOp::Ge, weights[seq].clone());
    }
    Ok(lp)
}

/// Per-infoset dual values, index 0 the fictitious root entry and then one
/// per infoset ordinal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualValues {
    pub v: Vec<Rational>,
}

impl DualValues {
    pub fn at(&self, game: &GameTree, infoset: InfosetId) -> &Rational {
        let info = game.infoset(infoset);
        assert_eq!(info.owner, PlayerId::Follower);
        &self.v[1 + info.ordinal as usize]
    }
}

/// A solved follower best response in the perturbed instance.
#[derive(Debug, Clone)]
pub struct BrSolution {
    /// Full best-response plan (residual plus floors).
    pub plan: RealizationPlan,
    /// Optimal residual objective r_ℓᵀ U_f r̃*.
    pub residual_objective: Rational,
    /// Follower value in the instance: residual objective plus the constant
    /// floor part r_ℓᵀ U_f ξ_f(ε).
    pub value: Rational,
}

/// Solves the residual primal and assembles the follower's best response.
pub fn best_response(
    game: &GameTree,
    sf: &SequenceForm,
    inst: &PerturbedInstance,
    leader: &RealizationPlan,
) -> Result<BrSolution, BrError> {
    let lp = build_primal(game, sf, inst, leader)?;
    let sol = lp.solve().expect("best-response primal solve");
    assert_eq!(
        sol.status,
        LpStatus::Optimal,
        "best-response primal must be solvable in a feasible instance"
    );
    let xi = inst.xi_vector(PlayerId::Follower);
    let values: Vec<Rational> = sol
        .primal
        .iter()
        .zip(xi)
        .map(|(residual, floor)| residual + floor)
        .collect();
    let plan = RealizationPlan {
        player: PlayerId::Follower,
        values,
    };
    debug_assert!(inst.contains(sf, &plan));
    let weights = follower_payoff_weights(sf, &leader.values);
    let floor_part: Rational = weights.iter().zip(xi).map(|(w, x)| w * x).sum();
    Ok(BrSolution {
        plan,
        value: &sol.objective + &floor_part,
        residual_objective: sol.objective,
    })
}

/// Solves the explicit dual, returning the per-infoset values and the dual
/// objective.
pub fn dual_values(
    game: &GameTree,
    sf: &SequenceForm,
    inst: &PerturbedInstance,
    leader: &RealizationPlan,
) -> Result<(DualValues, Rational), BrError> {
    let lp = build_dual(game, sf, inst, leader)?;
    let sol = lp.solve().expect("best-response dual solve");
    assert_eq!(sol.status, LpStatus::Optimal, "dual must be solvable");
    Ok((DualValues { v: sol.primal }, sol.objective))
}

/// Scope of a follower subgame optimization at an infoset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubgameScope {
    /// All plans that reach the infoset with probability one.
    Infoset,
    /// Plans that additionally play the given action there.
    Action(usize),
}

/// Exact maximum of the follower's payoff contribution from terminals below
/// the infoset, over unperturbed plans pinned to reach it (and optionally to
/// play one action there). The leader weighting is an arbitrary nonnegative
/// sequence vector, typically a perturbed leader plan.
pub fn subgame_value(
    game: &GameTree,
    sf: &SequenceForm,
    leader_values: &[Rational],
    infoset: InfosetId,
    scope: SubgameScope,
) -> Rational {
    let info = game.infoset(infoset);
    assert_eq!(info.owner, PlayerId::Follower);
    let weights = follower_payoff_weights(sf, leader_values);
    let n = sf.num_sequences(PlayerId::Follower);

    // Sequences through the infoset: descendants of its child sequences.
    let children: Vec<SequenceId> = (0..info.actions.len())
        .map(|a| sf.extension(game, infoset, a))
        .collect();
    let through: Vec<bool> = (0..n)
        .map(|i| {
            children
                .iter()
                .any(|c| sf.is_prefix(PlayerId::Follower, *c, SequenceId(i as u32)))
        })
        .collect();

    let mut lp = ExactLp::new(Sense::Maximize, n);
    for j in 0..n {
        if through[j] {
            lp.set_objective(j as u32, weights[j].clone());
        }
    }
    let (rows, rhs) = sf.flow_constraints(PlayerId::Follower);
    for (row, b) in rows.iter().zip(rhs) {
        lp.add_row(row.clone(), RowOp::Eq, b.clone());
    }
    let pinned = match scope {
        SubgameScope::Infoset => sf.seq_of_infoset(game, infoset),
        SubgameScope::Action(a) => children[a],
    };
    lp.add_row(alloc::vec![(pinned.0, Rational::one())], RowOp::Eq, Rational::one());
    let sol = lp.solve().expect("subgame LP solve");
    assert_eq!(sol.status, LpStatus::Optimal, "subgame LP must be feasible");
    sol.objective
}

/// Failure of the tight-mass optimality property: an action carries more
/// than its floor while being subgame-suboptimal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TightMassViolation {
    pub infoset: String,
    pub action: String,
    pub constrained_value: Rational,
    pub unconstrained_value: Rational,
}

impl fmt::Display for TightMassViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mass above floor on suboptimal action {:?} at infoset {:?}: {} < {}",
            self.action, self.infoset, self.constrained_value, self.unconstrained_value
        )
    }
}

impl core::error::Error for TightMassViolation {}

/// Checks that a follower best response only exceeds a floor on actions that
/// are optimal in the subgame rooted at their infoset: whenever
/// r_f(σ(I)a) > ξ_f(ε, σ(I)a), pinning action a must not lower the subgame
/// optimum.
pub fn check_theorem2(
    game: &GameTree,
    sf: &SequenceForm,
    inst: &PerturbedInstance,
    leader: &RealizationPlan,
    follower: &RealizationPlan,
) -> Result<(), TightMassViolation> {
    assert_eq!(follower.player, PlayerId::Follower);
    for iset in game.player_infosets(PlayerId::Follower) {
        let info = game.infoset(*iset);
        let mut unconstrained: Option<Rational> = None;
        for a in 0..info.actions.len() {
            let seq = sf.extension(game, *iset, a);
            if follower.value(seq) <= inst.xi(PlayerId::Follower, seq) {
                continue;
            }
            let whole = unconstrained
                .get_or_insert_with(|| {
                    subgame_value(game, sf, &leader.values, *iset, SubgameScope::Infoset)
                })
                .clone();
            let pinned = subgame_value(game, sf, &leader.values, *iset, SubgameScope::Action(a));
            if pinned != whole {
                return Err(TightMassViolation {
                    infoset: info.label.clone(),
                    action: info.actions[a].clone(),
                    constrained_value: pinned,
                    unconstrained_value: whole,
                });
            }
        }
    }
    Ok(())
}

/// Failure of the per-infoset best-response condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfosetBrViolation {
    pub infoset: String,
    pub action: String,
    pub constrained_value: Rational,
    pub unconstrained_value: Rational,
}

impl fmt::Display for InfosetBrViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "positive probability on action {:?} at infoset {:?} that is not part of a best response below it: {} < {}",
            self.action, self.infoset, self.constrained_value, self.unconstrained_value
        )
    }
}

impl core::error::Error for InfosetBrViolation {}

/// Sufficient condition for the follower strategy to be a best response at
/// the given infoset against a completely mixed leader strategy: every
/// action played with positive probability must attain the subgame optimum.
/// Passing the check certifies the property; failing it does not refute it.
pub fn check_infoset_best_response(
    game: &GameTree,
    sf: &SequenceForm,
    leader: &BehavioralStrategy,
    follower: &BehavioralStrategy,
    infoset: InfosetId,
) -> Result<(), InfosetBrViolation> {
    assert!(
        leader.completely_mixed(),
        "the per-infoset best-response test needs a completely mixed leader strategy"
    );
    let info = game.infoset(infoset);
    assert_eq!(info.owner, PlayerId::Follower);
    let r_l = behavioral_to_realization(game, sf, leader);
    let ordinal = info.ordinal as usize;
    let mut whole: Option<Rational> = None;
    for (a, prob) in follower.probs[ordinal].iter().enumerate() {
        if !prob.is_positive() {
            continue;
        }
        let unconstrained = whole
            .get_or_insert_with(|| {
                subgame_value(game, sf, &r_l.values, infoset, SubgameScope::Infoset)
            })
            .clone();
        let pinned = subgame_value(game, sf, &r_l.values, infoset, SubgameScope::Action(a));
        if pinned != unconstrained {
            return Err(InfosetBrViolation {
                infoset: info.label.clone(),
                action: info.actions[a].clone(),
                constrained_value: pinned,
                unconstrained_value: unconstrained,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_game, GameDescription, NodeDecl, TerminalDecl};
    use crate::numeric::{rat, rat_i};
    use crate::perturb::{instantiate, PerturbationScheme};

    /// Leader root (single action) into a follower infoset with payoffs 1/0.
    fn one_infoset_game() -> (GameTree, SequenceForm) {
        let d = GameDescription {
            nodes: alloc::vec![
                NodeDecl {
                    id: 0,
                    owner: PlayerId::Leader,
                    infoset: String::from("l"),
                    actions: alloc::vec![String::from("go")],
                    children: alloc::vec![1],
                    chance_probs: None,
                },
                NodeDecl {
                    id: 1,
                    owner: PlayerId::Follower,
                    infoset: String::from("f"),
                    actions: alloc::vec![String::from("good"), String::from("bad")],
                    children: alloc::vec![2, 3],
                    chance_probs: None,
                },
            ],
            terminals: alloc::vec![
                TerminalDecl { id: 2, leader_payoff: rat_i(4), follower_payoff: rat_i(1) },
                TerminalDecl { id: 3, leader_payoff: rat_i(7), follower_payoff: rat_i(0) },
            ],
        };
        let g = build_game(&d).unwrap();
        let sf = SequenceForm::new(&g);
        (g, sf)
    }

    fn leader_plan(sf: &SequenceForm) -> RealizationPlan {
        RealizationPlan {
            player: PlayerId::Leader,
            values: alloc::vec![rat_i(1); sf.num_sequences(PlayerId::Leader)],
        }
    }

    #[test]
    fn residual_lands_on_better_action() {
        let (g, sf) = one_infoset_game();
        let scheme = PerturbationScheme::miltersen(&sf);
        let inst = instantiate(&scheme, &g, &sf, &rat(1, 10)).unwrap();
        let r_l = leader_plan(&sf);
        let br = best_response(&g, &sf, &inst, &r_l).unwrap();
        // All residual mass on the better action: r_f = (1, 9/10, 1/10).
        assert_eq!(br.plan.values, alloc::vec![rat_i(1), rat(9, 10), rat(1, 10)]);
        assert_eq!(br.value, rat(9, 10));
        // Primal and separately solved dual agree exactly.
        let (v, dual_obj) = dual_values(&g, &sf, &inst, &r_l).unwrap();
        assert_eq!(dual_obj, br.residual_objective);
        // The infoset value equals the best follower payoff below it.
        let iset = g.player_infosets(PlayerId::Follower)[0];
        assert_eq!(*v.at(&g, iset), rat_i(1));
    }

    #[test]
    fn unperturbed_mode_reduces_to_classic_best_response() {
        let (g, sf) = one_infoset_game();
        let inst = PerturbedInstance::unperturbed(&sf);
        let r_l = leader_plan(&sf);
        let br = best_response(&g, &sf, &inst, &r_l).unwrap();
        assert_eq!(br.plan.values, alloc::vec![rat_i(1), rat_i(1), rat_i(0)]);
        assert_eq!(br.value, rat_i(1));
    }

    #[test]
    fn infeasible_leader_plan_rejected() {
        // Two leader actions so a flow-valid plan can still sit below a floor.
        let d = GameDescription {
            nodes: alloc::vec![
                NodeDecl {
                    id: 0,
                    owner: PlayerId::Leader,
                    infoset: String::from("l"),
                    actions: alloc::vec![String::from("go"), String::from("out")],
                    children: alloc::vec![1, 4],
                    chance_probs: None,
                },
                NodeDecl {
                    id: 1,
                    owner: PlayerId::Follower,
                    infoset: String::from("f"),
                    actions: alloc::vec![String::from("x"), String::from("y")],
                    children: alloc::vec![2, 3],
                    chance_probs: None,
                },
            ],
            terminals: alloc::vec![
                TerminalDecl { id: 2, leader_payoff: rat_i(1), follower_payoff: rat_i(1) },
                TerminalDecl { id: 3, leader_payoff: rat_i(0), follower_payoff: rat_i(0) },
                TerminalDecl { id: 4, leader_payoff: rat_i(2), follower_payoff: rat_i(0) },
            ],
        };
        let g = build_game(&d).unwrap();
        let sf = SequenceForm::new(&g);
        let scheme = PerturbationScheme::miltersen(&sf);
        let inst = instantiate(&scheme, &g, &sf, &rat(1, 10)).unwrap();
        let bad = RealizationPlan {
            player: PlayerId::Leader,
            values: alloc::vec![rat_i(1), rat_i(1), rat_i(0)],
        };
        let err = build_primal(&g, &sf, &inst, &bad).unwrap_err();
        assert_eq!(
            err,
            BrError::LeaderPlanBelowFloor {
                sequence: SequenceId(2),
                value: rat_i(0),
                floor: rat(1, 10),
            }
        );
        let invalid = RealizationPlan {
            player: PlayerId::Leader,
            values: alloc::vec![rat_i(1), rat_i(1), rat_i(1)],
        };
        assert_eq!(
            build_primal(&g, &sf, &inst, &invalid).unwrap_err(),
            BrError::LeaderPlanInvalid
        );
    }

    #[test]
    fn subgame_scopes_agree_on_the_best_action() {
        let (g, sf) = one_infoset_game();
        let r_l = leader_plan(&sf);
        let iset = g.player_infosets(PlayerId::Follower)[0];
        let all = subgame_value(&g, &sf, &r_l.values, iset, SubgameScope::Infoset);
        let good = subgame_value(&g, &sf, &r_l.values, iset, SubgameScope::Action(0));
        let bad = subgame_value(&g, &sf, &r_l.values, iset, SubgameScope::Action(1));
        assert_eq!(all, rat_i(1));
        assert_eq!(good, rat_i(1));
        assert_eq!(bad, rat_i(0));
    }

    #[test]
    fn tight_mass_check_flags_dominated_mass() {
        let (g, sf) = one_infoset_game();
        let scheme = PerturbationScheme::miltersen(&sf);
        let inst = instantiate(&scheme, &g, &sf, &rat(1, 10)).unwrap();
        let r_l = leader_plan(&sf);
        let br = best_response(&g, &sf, &inst, &r_l).unwrap();
        check_theorem2(&g, &sf, &inst, &r_l, &br.plan).unwrap();

        // Excess mass on the dominated action must be flagged.
        let distorted = RealizationPlan {
            player: PlayerId::Follower,
            values: alloc::vec![rat_i(1), rat(1, 10), rat(9, 10)],
        };
        let violation = check_theorem2(&g, &sf, &inst, &r_l, &distorted).unwrap_err();
        assert_eq!(violation.action, "bad");
        assert_eq!(violation.constrained_value, rat_i(0));
        assert_eq!(violation.unconstrained_value, rat_i(1));
    }

    #[test]
    fn infoset_best_response_sufficient_condition() {
        let (g, sf) = one_infoset_game();
        let leader = BehavioralStrategy::uniform(&g, PlayerId::Leader);
        let iset = g.player_infosets(PlayerId::Follower)[0];
        let pure_good = BehavioralStrategy::new(
            &g,
            PlayerId::Follower,
            alloc::vec![alloc::vec![rat_i(1), rat_i(0)]],
        )
        .unwrap();
        check_infoset_best_response(&g, &sf, &leader, &pure_good, iset).unwrap();

        let mixing = BehavioralStrategy::uniform(&g, PlayerId::Follower);
        let violation = check_infoset_best_response(&g, &sf, &leader, &mixing, iset).unwrap_err();
        assert_eq!(violation.action, "bad");
    }
}
