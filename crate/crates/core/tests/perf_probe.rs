use std::time::Instant;

use sefg_core::game::PlayerId;
use sefg_core::games::{gen_goofspiel3, gen_search_game, SearchGameConfig};
use sefg_core::numeric::rat;
use sefg_core::perturb::{instantiate, PerturbationScheme, PerturbedInstance};
use sefg_core::sefce::{build_sefce_lp, solve_sse, BnbNode};
use sefg_core::seqform::{relevance, SequenceForm};

#[test]
#[ignore]
fn goofspiel_perf() {
    let g = gen_goofspiel3();
    let sf = SequenceForm::new(&g);
    println!(
        "goofspiel3: {} nodes, |Σl|={}, |Σf|={}",
        g.num_nodes(),
        sf.num_sequences(PlayerId::Leader),
        sf.num_sequences(PlayerId::Follower)
    );
    let t = Instant::now();
    let rel = relevance(&g, &sf);
    println!("relevance: {} pairs in {:?}", rel.num_pairs(), t.elapsed());

    // Unperturbed root LP.
    let inst = PerturbedInstance::unperturbed(&sf);
    let t = Instant::now();
    let lp = build_sefce_lp(&g, &sf, &rel, &inst, &BnbNode::root()).unwrap();
    println!(
        "unperturbed LP built in {:?}: {} vars, {} rows",
        t.elapsed(),
        lp.lp.num_vars(),
        lp.lp.rows.len()
    );
    let t = Instant::now();
    let sol = lp.lp.solve().unwrap();
    println!(
        "unperturbed root solve: {:?}, pivots {}, obj {}",
        t.elapsed(),
        sol.pivots,
        sol.objective
    );

    let t = Instant::now();
    let (res, stats) = solve_sse(&g, &sf, &rel, &inst).unwrap();
    println!(
        "unperturbed B&B: {:?}, value {}, nodes {}, lp {}, pivots {}",
        t.elapsed(),
        res.leader_value,
        stats.bnb_nodes,
        stats.lp_solves,
        stats.lp_pivots
    );

    // Perturbed at 1/10.
    let scheme = PerturbationScheme::miltersen(&sf);
    let inst = instantiate(&scheme, &g, &sf, &rat(1, 10)).unwrap();
    let t = Instant::now();
    let lp = build_sefce_lp(&g, &sf, &rel, &inst, &BnbNode::root()).unwrap();
    println!(
        "perturbed LP built in {:?}: {} vars, {} rows",
        t.elapsed(),
        lp.lp.num_vars(),
        lp.lp.rows.len()
    );
    let t = Instant::now();
    let sol = lp.lp.solve().unwrap();
    println!(
        "perturbed root solve: {:?}, pivots {}, obj {}",
        t.elapsed(),
        sol.pivots,
        sol.objective
    );
    let t = Instant::now();
    let (res, stats) = solve_sse(&g, &sf, &rel, &inst).unwrap();
    println!(
        "perturbed B&B: {:?}, value {}, nodes {}, lp {}, pivots {}",
        t.elapsed(),
        res.leader_value,
        stats.bnb_nodes,
        stats.lp_solves,
        stats.lp_pivots
    );
}

#[test]
#[ignore]
fn search_game_perf() {
    let g = gen_search_game(&SearchGameConfig::default());
    let sf = SequenceForm::new(&g);
    println!(
        "search k=2: {} nodes, |Σl|={}, |Σf|={}",
        g.num_nodes(),
        sf.num_sequences(PlayerId::Leader),
        sf.num_sequences(PlayerId::Follower)
    );
    let rel = relevance(&g, &sf);
    println!("relevance: {} pairs", rel.num_pairs());
    let scheme = PerturbationScheme::miltersen(&sf);
    for (label, inst) in [
        ("unperturbed", PerturbedInstance::unperturbed(&sf)),
        ("eps=1/10", instantiate(&scheme, &g, &sf, &rat(1, 10)).unwrap()),
        ("eps=1/10000", instantiate(&scheme, &g, &sf, &rat(1, 10000)).unwrap()),
    ] {
        let t = Instant::now();
        let (res, stats) = solve_sse(&g, &sf, &rel, &inst).unwrap();
        println!(
            "{label}: {:?}, value {}, nodes {}, pivots {}",
            t.elapsed(),
            res.leader_value,
            stats.bnb_nodes,
            stats.lp_pivots
        );
    }
}
