//! Trembling-hand perturbation schemes over the sequence form.
//!
//! A scheme assigns every sequence a polynomial lower bound in the
//! perturbation magnitude ε. Valid schemes keep all bounds positive on
//! (0,1], vanishing as ε → 0⁺, with each child sequence's bound vanishing
//! strictly faster than its parent's. Instantiating a scheme at a concrete
//! rational ε produces exact lower-bound vectors, the per-sequence maximum
//! realization probabilities η, and a feasibility certificate.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::game::{GameTree, PlayerId};
use crate::lp::{ExactLp, LpStatus, RowOp, Sense};
use crate::numeric::{ratio_limit_at_zero_is_zero, EpsPoly, Rational};
use crate::seqform::{RealizationPlan, SequenceForm, SequenceId};

/// Per-sequence polynomial lower bounds for both players. The empty sequence
/// maps to the constant 1 (it is always played).
#[derive(Debug, Clone)]
pub struct PerturbationScheme {
    pub label: String,
    xi: [Vec<EpsPoly>; 2],
}

impl PerturbationScheme {
    /// The ε^|σ| scheme: every non-empty sequence is bounded below by ε
    /// raised to its action count.
    pub fn miltersen(sf: &SequenceForm) -> Self {
        let mut xi: [Vec<EpsPoly>; 2] = [Vec::new(), Vec::new()];
        for (slot, player) in [(0, PlayerId::Leader), (1, PlayerId::Follower)] {
            xi[slot] = sf
                .sequences(player)
                .iter()
                .map(|info| EpsPoly::monomial(Rational::one(), info.depth))
                .collect();
        }
        PerturbationScheme {
            label: String::from("miltersen"),
            xi,
        }
    }

    /// Miltersen base with explicit per-sequence overrides.
    pub fn with_overrides(
        sf: &SequenceForm,
        label: String,
        overrides: &[(PlayerId, SequenceId, EpsPoly)],
    ) -> Self {
        let mut scheme = PerturbationScheme::miltersen(sf);
        scheme.label = label;
        for (player, seq, poly) in overrides {
            let slot = player.strategic_index().expect("strategic player");
            scheme.xi[slot][seq.index()] = poly.clone();
        }
        scheme
    }

    pub fn poly(&self, player: PlayerId, seq: SequenceId) -> &EpsPoly {
        &self.xi[player.strategic_index().expect("strategic player")][seq.index()]
    }
}

/// Scheme condition that failed; numbering follows the definition of a valid
/// perturbation scheme: (ii) bounds vanish at 0 and stay positive on (0,1],
/// (iii) child bounds vanish strictly faster than parents'.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeCondition {
    /// The empty sequence must be the constant 1.
    EmptySequenceNotOne,
    /// A bound polynomial is identically zero.
    ZeroPolynomial,
    /// (ii): nonzero constant term.
    NonzeroConstantTerm,
    /// (ii): not positive at a probe ε (probe 0 marks a nonpositive
    /// lowest-order coefficient).
    NotPositiveAtProbe(Rational),
    /// (iii): the bound does not vanish faster than its parent's.
    RatioLimitNotZero { parent: SequenceId },
}

/// Scheme validation failure, naming the sequence and the failed condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeViolation {
    pub player: PlayerId,
    pub sequence: SequenceId,
    pub condition: SchemeCondition,
}

impl fmt::Display for SchemeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match &self.condition {
            SchemeCondition::EmptySequenceNotOne => String::from("empty sequence bound is not 1"),
            SchemeCondition::ZeroPolynomial => String::from("zero polynomial bound"),
            SchemeCondition::NonzeroConstantTerm => {
                String::from("condition (ii): nonzero constant term")
            }
            SchemeCondition::NotPositiveAtProbe(eps) => {
                format!("condition (ii): not positive at probe {eps}")
            }
            SchemeCondition::RatioLimitNotZero { parent } => format!(
                "condition (iii): bound does not vanish faster than parent sequence {}",
                parent.0
            ),
        };
        write!(
            f,
            "perturbation scheme violation at {} sequence {}: {what}",
            self.player, self.sequence.0
        )
    }
}

impl core::error::Error for SchemeViolation {}

/// Checks a scheme: the empty sequence is constant 1; every other bound is a
/// nonzero polynomial with zero constant term, positive lowest coefficient
/// and positive value at each probe; and every parent/child pair passes the
/// vanishing-ratio test.
pub fn validate_scheme(
    scheme: &PerturbationScheme,
    game: &GameTree,
    sf: &SequenceForm,
    probes: &[Rational],
) -> Result<(), SchemeViolation> {
    for player in [PlayerId::Leader, PlayerId::Follower] {
        let empty = scheme.poly(player, SequenceId::EMPTY);
        if *empty != EpsPoly::one() {
            return Err(SchemeViolation {
                player,
                sequence: SequenceId::EMPTY,
                condition: SchemeCondition::EmptySequenceNotOne,
            });
        }
        for idx in 1..sf.num_sequences(player) {
            let seq = SequenceId(idx as u32);
            let poly = scheme.poly(player, seq);
            let bad = |condition| {
                Err(SchemeViolation {
                    player,
                    sequence: seq,
                    condition,
                })
            };
            if poly.is_zero() {
                return bad(SchemeCondition::ZeroPolynomial);
            }
            if !poly.constant_term().is_zero() {
                return bad(SchemeCondition::NonzeroConstantTerm);
            }
            if !poly.lowest_coeff().unwrap().is_positive() {
                return bad(SchemeCondition::NotPositiveAtProbe(Rational::zero()));
            }
            for eps in probes {
                if !poly.eval(eps).is_positive() {
                    return bad(SchemeCondition::NotPositiveAtProbe(eps.clone()));
                }
            }
        }
        // (iii) per infoset and action.
        for iset in game.player_infosets(player) {
            let parent = sf.seq_of_infoset(game, *iset);
            let parent_poly = scheme.poly(player, parent);
            for a in 0..game.infoset(*iset).actions.len() {
                let child = sf.extension(game, *iset, a);
                let child_poly = scheme.poly(player, child);
                match ratio_limit_at_zero_is_zero(child_poly, parent_poly) {
                    Ok(true) => {}
                    Ok(false) => {
                        return Err(SchemeViolation {
                            player,
                            sequence: child,
                            condition: SchemeCondition::RatioLimitNotZero { parent },
                        })
                    }
                    Err(_) => {
                        return Err(SchemeViolation {
                            player,
                            sequence: child,
                            condition: SchemeCondition::ZeroPolynomial,
                        })
                    }
                }
            }
        }
    }
    Ok(())
}

/// A scheme evaluated at a concrete ε: exact lower-bound vectors and the
/// per-sequence maximum realization probabilities η for both players.
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct PerturbedInstance {
    pub eps: Rational,
    pub scheme_label: String,
    xi: [Vec<Rational>; 2],
    eta: [Vec<Rational>; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstantiateError {
    /// ε outside (0, 1].
    BadEpsilon(Rational),
    InvalidScheme(SchemeViolation),
    /// The floors alone exceed the probability available at an infoset; the
    /// perturbed realization-plan set is empty.
    Infeasible { player: PlayerId, infoset: String },
}

impl fmt::Display for InstantiateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstantiateError::BadEpsilon(eps) => write!(f, "epsilon {eps} outside (0, 1]"),
            InstantiateError::InvalidScheme(v) => write!(f, "{v}"),
            InstantiateError::Infeasible { player, infoset } => write!(
                f,
                "infeasible instance: {player} infoset {infoset:?} budget exceeded"
            ),
        }
    }
}

impl core::error::Error for InstantiateError {}

/// Evaluates the scheme at ε, computes η by forward recursion and verifies
/// feasibility of both perturbed plan sets with an exact LP.
pub fn instantiate(
    scheme: &PerturbationScheme,
    game: &GameTree,
    sf: &SequenceForm,
    eps: &Rational,
) -> Result<PerturbedInstance, InstantiateError> {
    if !eps.is_positive() || eps > &Rational::one() {
        return Err(InstantiateError::BadEpsilon(eps.clone()));
    }
    validate_scheme(scheme, game, sf, core::slice::from_ref(eps))
        .map_err(InstantiateError::InvalidScheme)?;

    let mut xi: [Vec<Rational>; 2] = [Vec::new(), Vec::new()];
    let mut eta: [Vec<Rational>; 2] = [Vec::new(), Vec::new()];
    for (slot, player) in [(0usize, PlayerId::Leader), (1usize, PlayerId::Follower)] {
        let n = sf.num_sequences(player);
        xi[slot] = (0..n)
            .map(|i| scheme.poly(player, SequenceId(i as u32)).eval(eps))
            .collect();

        // Feasibility. A sequence's true requirement can exceed its own
        // floor when its descendants' floors stack up, so the budget check
        // runs in two passes: a bottom-up requirement
        //   need(σ) = max(ξ(σ), max over continuation infosets Σ_a need(σa))
        // and a top-down capacity
        //   cap(σ_∅) = 1, cap(σ(I)a) = cap(σ(I)) − Σ_{a'≠a} need(σ(I)a').
        // The instance is feasible iff every infoset's children needs fit
        // its capacity; the first violation (in infoset order) is reported.
        let mut need: Vec<Rational> = xi[slot].clone();
        for iset in game.player_infosets(player).iter().rev() {
            let parent = sf.seq_of_infoset(game, *iset);
            let actions = game.infoset(*iset).actions.len();
            let sum: Rational = (0..actions)
                .map(|a| need[sf.extension(game, *iset, a).index()].clone())
                .sum();
            if sum > need[parent.index()] {
                need[parent.index()] = sum;
            }
        }
        let mut cap = alloc::vec![Rational::one(); n];
        for iset in game.player_infosets(player) {
            let parent = sf.seq_of_infoset(game, *iset);
            let actions = game.infoset(*iset).actions.len();
            let children: Vec<SequenceId> =
                (0..actions).map(|a| sf.extension(game, *iset, a)).collect();
            let need_sum: Rational = children.iter().map(|c| need[c.index()].clone()).sum();
            if need_sum > cap[parent.index()] {
                return Err(InstantiateError::Infeasible {
                    player,
                    infoset: game.infoset(*iset).label.clone(),
                });
            }
            for child in &children {
                cap[child.index()] =
                    &cap[parent.index()] - &(&need_sum - &need[child.index()]);
            }
        }

        // η(σ_∅) = 1; η(σ(I)a) = η(σ(I)) − Σ_{a'≠a} ξ(σ(I)a'). Sequences are
        // ordered parent-before-child, so one forward pass suffices.
        let mut eta_p = alloc::vec![Rational::one(); n];
        for iset in game.player_infosets(player) {
            let parent = sf.seq_of_infoset(game, *iset);
            let actions = game.infoset(*iset).actions.len();
            let children: Vec<SequenceId> =
                (0..actions).map(|a| sf.extension(game, *iset, a)).collect();
            let floor_sum: Rational = children.iter().map(|c| xi[slot][c.index()].clone()).sum();
            for child in &children {
                eta_p[child.index()] =
                    &eta_p[parent.index()] - &(&floor_sum - &xi[slot][child.index()]);
            }
        }
        // Authoritative feasibility check: the exact LP min 0 over
        // { F r = f, r ≥ ξ(ε) } must be solvable.
        let feasible = feasibility_lp(sf, player, &xi[slot])
            .solve()
            .expect("feasibility LP is well-formed")
            .status
            == LpStatus::Optimal;
        assert!(feasible, "need recursion and feasibility LP disagree");

        // The η recursion assumes descendant floors never cap an ancestor's
        // maximum; the LP oracle is authoritative where they could.
        #[cfg(debug_assertions)]
        if n <= 48 {
            for i in 0..n as u32 {
                let oracle = eta_lp_oracle(sf, player, &xi[slot], SequenceId(i));
                assert_eq!(eta_p[i as usize], oracle, "eta recursion vs LP oracle");
            }
        }

        eta[slot] = eta_p;
    }

    Ok(PerturbedInstance {
        eps: eps.clone(),
        scheme_label: scheme.label.clone(),
        xi,
        eta,
    })
}

fn feasibility_lp(sf: &SequenceForm, player: PlayerId, xi: &[Rational]) -> ExactLp {
    let n = sf.num_sequences(player);
    let mut lp = ExactLp::new(Sense::Minimize, n);
    for (j, bound) in xi.iter().enumerate() {
        lp.set_lower_bound(j as u32, bound.clone());
    }
    let (rows, rhs) = sf.flow_constraints(player);
    for (row, b) in rows.iter().zip(rhs) {
        lp.add_row(row.clone(), RowOp::Eq, b.clone());
    }
    lp
}

impl PerturbedInstance {
    /// The explicit unperturbed baseline: all floors zero (including the
    /// empty sequence, so residuals coincide with plans) and η ≡ 1. Used for
    /// the loss metric against perturbed solves.
    pub fn unperturbed(sf: &SequenceForm) -> Self {
        let n_l = sf.num_sequences(PlayerId::Leader);
        let n_f = sf.num_sequences(PlayerId::Follower);
        PerturbedInstance {
            eps: Rational::zero(),
            scheme_label: String::from("unperturbed"),
            xi: [
                alloc::vec![Rational::zero(); n_l],
                alloc::vec![Rational::zero(); n_f],
            ],
            eta: [
                alloc::vec![Rational::one(); n_l],
                alloc::vec![Rational::one(); n_f],
            ],
        }
    }

    /// Whether this is the unperturbed baseline rather than an instantiated
    /// scheme.
    pub fn is_unperturbed(&self) -> bool {
        self.eps.is_zero()
    }

    pub fn xi(&self, player: PlayerId, seq: SequenceId) -> &Rational {
        &self.xi[player.strategic_index().expect("strategic player")][seq.index()]
    }

    pub fn xi_vector(&self, player: PlayerId) -> &[Rational] {
        &self.xi[player.strategic_index().expect("strategic player")]
    }

    /// Maximum probability the player can put on the sequence inside the
    /// perturbed plan set, from the forward recursion.
    pub fn eta_player(&self, player: PlayerId, seq: SequenceId) -> &Rational {
        &self.eta[player.strategic_index().expect("strategic player")][seq.index()]
    }

    /// η(σ_f): the follower-side cap used throughout the equilibrium LP.
    pub fn eta(&self, seq: SequenceId) -> &Rational {
        self.eta_player(PlayerId::Follower, seq)
    }

    /// Whether a plan lies in the perturbed set: valid flow and every entry
    /// at or above its floor.
    pub fn contains(&self, sf: &SequenceForm, plan: &RealizationPlan) -> bool {
        plan.validate(sf).is_ok()
            && plan
                .values
                .iter()
                .zip(self.xi_vector(plan.player))
                .all(|(v, floor)| v >= floor)
    }

    /// The part of a feasible plan above the floors.
    pub fn residual(&self, plan: &RealizationPlan) -> Vec<Rational> {
        plan.values
            .iter()
            .zip(self.xi_vector(plan.player))
            .map(|(v, floor)| v - floor)
            .collect()
    }
}

/// Exact LP oracle for η: maximize one sequence probability over the
/// perturbed plan set. The recursion must match this value exactly; if they
/// ever disagreed the LP value would be the authoritative one.
pub fn eta_lp_oracle(
    sf: &SequenceForm,
    player: PlayerId,
    xi: &[Rational],
    seq: SequenceId,
) -> Rational {
    let mut lp = feasibility_lp(sf, player, xi);
    lp.sense = Sense::Maximize;
    lp.set_objective(seq.0, Rational::one());
    let sol = lp.solve().expect("eta oracle LP solve");
    assert_eq!(sol.status, LpStatus::Optimal, "eta oracle on infeasible set");
    sol.objective
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_game, GameDescription, NodeDecl, TerminalDecl};
    use crate::games::gen_observation1_game;
    use crate::numeric::{rat, rat_i};

    fn follower_chain() -> (GameTree, SequenceForm) {
        // Follower decides twice in a chain: root {a,b}; after a, {c,d}.
        let d = GameDescription {
            nodes: alloc::vec![
                NodeDecl {
                    id: 0,
                    owner: PlayerId::Follower,
                    infoset: String::from("f1"),
                    actions: alloc::vec![String::from("a"), String::from("b")],
                    children: alloc::vec![1, 2],
                    chance_probs: None,
                },
                NodeDecl {
                    id: 1,
                    owner: PlayerId::Follower,
                    infoset: String::from("f2"),
                    actions: alloc::vec![String::from("c"), String::from("d")],
                    children: alloc::vec![3, 4],
                    chance_probs: None,
                },
            ],
            terminals: alloc::vec![
                TerminalDecl { id: 2, leader_payoff: rat_i(0), follower_payoff: rat_i(0) },
                TerminalDecl { id: 3, leader_payoff: rat_i(0), follower_payoff: rat_i(1) },
                TerminalDecl { id: 4, leader_payoff: rat_i(0), follower_payoff: rat_i(0) },
            ],
        };
        let g = build_game(&d).unwrap();
        let sf = SequenceForm::new(&g);
        (g, sf)
    }

    #[test]
    fn miltersen_monomials() {
        let (g, sf) = follower_chain();
        let s = PerturbationScheme::miltersen(&sf);
        assert_eq!(*s.poly(PlayerId::Follower, SequenceId(0)), EpsPoly::one());
        assert_eq!(
            *s.poly(PlayerId::Follower, SequenceId(1)),
            EpsPoly::monomial(rat_i(1), 1)
        );
        let deep = sf
            .sequences(PlayerId::Follower)
            .iter()
            .position(|i| i.depth == 2)
            .unwrap();
        assert_eq!(
            *s.poly(PlayerId::Follower, SequenceId(deep as u32)),
            EpsPoly::monomial(rat_i(1), 2)
        );
        validate_scheme(&s, &g, &sf, &[rat(1, 10), rat(1, 2)]).unwrap();
    }

    #[test]
    fn observation1_bad_schemes_rejected() {
        let g = gen_observation1_game(&[
            (rat_i(1), rat_i(0)),
            (rat_i(0), rat_i(0)),
            (rat_i(2), rat_i(0)),
        ])
        .unwrap();
        let sf = SequenceForm::new(&g);
        // Σ_ℓ = [∅, a1, a2, a2.a3, a2.a4]; ε on depth-1, ε/3 on depth-2
        // breaks the vanishing-ratio requirement at (a2.a3, a2).
        let e = EpsPoly::monomial(rat_i(1), 1);
        let e_third = EpsPoly::monomial(rat(1, 3), 1);
        let bad = PerturbationScheme::with_overrides(
            &sf,
            String::from("obs1-iii"),
            &[
                (PlayerId::Leader, SequenceId(1), e.clone()),
                (PlayerId::Leader, SequenceId(2), e.clone()),
                (PlayerId::Leader, SequenceId(3), e_third.clone()),
                (PlayerId::Leader, SequenceId(4), e_third),
            ],
        );
        let violation = validate_scheme(&bad, &g, &sf, &[rat(1, 10)]).unwrap_err();
        assert_eq!(violation.sequence, SequenceId(3));
        assert_eq!(
            violation.condition,
            SchemeCondition::RatioLimitNotZero { parent: SequenceId(2) }
        );

        // Constant 1/3 on a2 breaks the zero-constant-term requirement.
        let bad2 = PerturbationScheme::with_overrides(
            &sf,
            String::from("obs1-ii"),
            &[(PlayerId::Leader, SequenceId(2), EpsPoly::constant(rat(1, 3)))],
        );
        let violation2 = validate_scheme(&bad2, &g, &sf, &[rat(1, 10)]).unwrap_err();
        assert_eq!(violation2.sequence, SequenceId(2));
        assert_eq!(violation2.condition, SchemeCondition::NonzeroConstantTerm);
    }

    #[test]
    fn instantiate_budgets() {
        let (g, sf) = follower_chain();
        let s = PerturbationScheme::miltersen(&sf);
        // ε = 1/10: ξ_f = (1, 1/10, 1/10, 1/100, 1/100); feasible.
        let inst = instantiate(&s, &g, &sf, &rat(1, 10)).unwrap();
        assert_eq!(*inst.xi(PlayerId::Follower, SequenceId(1)), rat(1, 10));
        assert_eq!(*inst.eta(SequenceId(0)), rat_i(1));
        assert_eq!(*inst.eta(SequenceId(1)), rat(9, 10));
        assert!(instantiate(&s, &g, &sf, &rat(1, 2)).is_ok());
        assert!(matches!(
            instantiate(&s, &g, &sf, &rat_i(2)),
            Err(InstantiateError::BadEpsilon(_))
        ));
    }

    #[test]
    fn three_action_budget_violation() {
        let d = GameDescription {
            nodes: alloc::vec![NodeDecl {
                id: 0,
                owner: PlayerId::Follower,
                infoset: String::from("f"),
                actions: alloc::vec![String::from("a"), String::from("b"), String::from("c")],
                children: alloc::vec![1, 2, 3],
                chance_probs: None,
            }],
            terminals: alloc::vec![
                TerminalDecl { id: 1, leader_payoff: rat_i(0), follower_payoff: rat_i(0) },
                TerminalDecl { id: 2, leader_payoff: rat_i(0), follower_payoff: rat_i(0) },
                TerminalDecl { id: 3, leader_payoff: rat_i(0), follower_payoff: rat_i(0) },
            ],
        };
        let g = build_game(&d).unwrap();
        let sf = SequenceForm::new(&g);
        let s = PerturbationScheme::miltersen(&sf);
        // Three floors of 1/2 cannot fit under probability 1.
        let err = instantiate(&s, &g, &sf, &rat(1, 2)).unwrap_err();
        assert_eq!(
            err,
            InstantiateError::Infeasible {
                player: PlayerId::Follower,
                infoset: String::from("f"),
            }
        );
    }

    #[test]
    fn eta_chain_example() {
        let (g, sf) = follower_chain();
        let s = PerturbationScheme::miltersen(&sf);
        let inst = instantiate(&s, &g, &sf, &rat(1, 10)).unwrap();
        // Depth-2 chain: η(a.c) = 9/10 − 1/100 = 89/100.
        let deep = sf
            .sequences(PlayerId::Follower)
            .iter()
            .position(|i| i.depth == 2)
            .unwrap() as u32;
        assert_eq!(*inst.eta(SequenceId(deep)), rat(89, 100));
        // Recursion equals the LP oracle on every sequence.
        for i in 0..sf.num_sequences(PlayerId::Follower) as u32 {
            let oracle = eta_lp_oracle(
                &sf,
                PlayerId::Follower,
                inst.xi_vector(PlayerId::Follower),
                SequenceId(i),
            );
            assert_eq!(*inst.eta(SequenceId(i)), oracle);
        }
    }

    #[test]
    fn residual_nonnegative_iff_feasible() {
        let (g, sf) = follower_chain();
        let s = PerturbationScheme::miltersen(&sf);
        let inst = instantiate(&s, &g, &sf, &rat(1, 10)).unwrap();
        let feasible = RealizationPlan {
            player: PlayerId::Follower,
            values: alloc::vec![rat_i(1), rat(9, 10), rat(1, 10), rat(89, 100), rat(1, 100)],
        };
        assert!(inst.contains(&sf, &feasible));
        assert!(inst.residual(&feasible).iter().all(|r| !r.is_negative()));
        let infeasible = RealizationPlan {
            player: PlayerId::Follower,
            values: alloc::vec![rat_i(1), rat_i(1), rat_i(0), rat(99, 100), rat(1, 100)],
        };
        assert!(!inst.contains(&sf, &infeasible));
        assert!(inst.residual(&infeasible).iter().any(|r| r.is_negative()));
    }
}
