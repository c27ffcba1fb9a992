//! Cross-checks of the solver pipeline against the brute-force oracles on a
//! deterministic random-game corpus.

use num_traits::Signed;
use sefg_core::best_response::{best_response, dual_values};
use sefg_core::game::PlayerId;
use sefg_core::numeric::{rat, Rational};
use sefg_core::oracle::{
    best_response_by_enumeration, random_game, relevant_by_definition, sse_by_enumeration,
    RandomGameCfg, Rng,
};
use sefg_core::perturb::{instantiate, PerturbationScheme, PerturbedInstance};
use sefg_core::sefce::solve_sse;
use sefg_core::seqform::{relevance, RealizationPlan, SequenceForm, SequenceId};

fn leader_floor_plan(sf: &SequenceForm, inst: &PerturbedInstance) -> RealizationPlan {
    // A deterministic leader plan inside the perturbed set: route the free
    // mass to the first action everywhere (mirrors the follower routing).
    let xi = inst.xi_vector(PlayerId::Leader);
    let n = sf.num_sequences(PlayerId::Leader);
    use sefg_core::lp::{ExactLp, RowOp, Sense};
    let mut lp = ExactLp::new(Sense::Maximize, n);
    for j in 0..n {
        lp.set_lower_bound(j as u32, xi[j].clone());
    }
    let (rows, rhs) = sf.flow_constraints(PlayerId::Leader);
    for (row, b) in rows.iter().zip(rhs) {
        lp.add_row(row.clone(), RowOp::Eq, b.clone());
    }
    let sol = lp.solve().unwrap();
    RealizationPlan {
        player: PlayerId::Leader,
        values: sol.primal,
    }
}

#[test]
fn best_response_matches_enumeration_oracle() {
    let mut rng = Rng::new(0xBEEF);
    let cfg = RandomGameCfg::default();
    let scheme_probe = [rat(1, 10), rat(1, 50), rat(1, 100)];
    for case in 0..25 {
        let game = random_game(&mut rng, &cfg);
        let sf = SequenceForm::new(&game);
        let scheme = PerturbationScheme::miltersen(&sf);
        for eps in &scheme_probe {
            let inst = instantiate(&scheme, &game, &sf, eps).unwrap();
            let leader = leader_floor_plan(&sf, &inst);
            let br = best_response(&game, &sf, &inst, &leader).unwrap();
            let (oracle_value, _) = best_response_by_enumeration(&game, &sf, &inst, &leader);
            assert_eq!(br.value, oracle_value, "case {case} eps {eps}");
            // Dual optimum equals primal optimum exactly.
            let (_, dual_obj) = dual_values(&game, &sf, &inst, &leader).unwrap();
            assert_eq!(dual_obj, br.residual_objective, "case {case} eps {eps}");
        }
    }
}

#[test]
fn relevance_matches_definition() {
    let mut rng = Rng::new(0xCAFE);
    let cfg = RandomGameCfg::default();
    for _ in 0..10 {
        let game = random_game(&mut rng, &cfg);
        let sf = SequenceForm::new(&game);
        let rel = relevance(&game, &sf);
        for l in 0..sf.num_sequences(PlayerId::Leader) as u32 {
            for f in 0..sf.num_sequences(PlayerId::Follower) as u32 {
                assert_eq!(
                    rel.is_relevant(SequenceId(l), SequenceId(f)),
                    relevant_by_definition(&game, &sf, SequenceId(l), SequenceId(f)),
                );
            }
        }
    }
}

#[test]
fn unperturbed_sse_matches_enumeration() {
    let mut rng = Rng::new(0x5EED);
    let cfg = RandomGameCfg {
        max_follower_infosets: 5,
        max_nodes: 40,
        ..RandomGameCfg::default()
    };
    for case in 0..8 {
        let game = random_game(&mut rng, &cfg);
        let sf = SequenceForm::new(&game);
        let rel = relevance(&game, &sf);
        let inst = PerturbedInstance::unperturbed(&sf);
        let oracle = sse_by_enumeration(&game, &sf, &inst);
        let (result, _) = solve_sse(&game, &sf, &rel, &inst).unwrap();
        assert_eq!(result.leader_value, oracle, "case {case}");
    }
}

#[test]
fn perturbed_sse_matches_enumeration() {
    let mut rng = Rng::new(0xF0CACC1A);
    let cfg = RandomGameCfg {
        max_follower_infosets: 4,
        max_nodes: 40,
        ..RandomGameCfg::default()
    };
    for case in 0..6 {
        let game = random_game(&mut rng, &cfg);
        let sf = SequenceForm::new(&game);
        let rel = relevance(&game, &sf);
        let scheme = PerturbationScheme::miltersen(&sf);
        for eps in [rat(1, 10), rat(1, 50)] {
            let inst = instantiate(&scheme, &game, &sf, &eps).unwrap();
            let oracle = sse_by_enumeration(&game, &sf, &inst);
            let (result, _) = solve_sse(&game, &sf, &rel, &inst).unwrap();
            assert_eq!(result.leader_value, oracle, "case {case} eps {eps}");
            assert!(!(&oracle - &result.leader_value).is_positive());
        }
    }
}
