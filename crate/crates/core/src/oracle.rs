//! Independent cross-check oracles.
//!
//! Everything in this module recomputes a quantity from its definition by
//! brute force — vertex enumeration, exhaustive tree walks, definitional
//! scans — sharing no code path with the solvers it checks. Compiled in only
//! under the `oracle` feature; used by the test suites and the CLI's paranoid
//! verification mode.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::lp::{ExactLp, RowOp, Sense};
use crate::numeric::Rational;

/// Deterministic 64-bit PRNG (splitmix64). Good enough statistical quality
/// for test-corpus generation, fully reproducible across platforms.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        self.next_u64() % bound
    }

    pub fn range_i64(&mut self, lo: i64, hi_inclusive: i64) -> i64 {
        lo + self.below((hi_inclusive - lo + 1) as u64) as i64
    }

    /// Rational with numerator in `[-max_num, max_num]` and denominator in
    /// `[1, max_den]`.
    pub fn rational(&mut self, max_num: i64, max_den: i64) -> Rational {
        crate::numeric::rat(self.range_i64(-max_num, max_num), self.range_i64(1, max_den))
    }
}

/// Exact solve of a square rational system by Gaussian elimination.
/// Returns `None` when singular.
fn gaussian_solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|r| !a[*r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &p;
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
            let delta = &factor * &b[col];
            b[r] -= delta;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// What brute-force enumeration concluded about an LP whose variables all
/// have lower bounds (a pointed feasible region).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpVerdict {
    Infeasible,
    Unbounded,
    Optimal(Rational),
}

/// One constraint in dense normal form `a·x (op) rhs`.
struct DenseCon {
    a: Vec<Rational>,
    op: RowOp,
    rhs: Rational,
}

fn dense_constraints(lp: &ExactLp) -> Vec<DenseCon> {
    let n = lp.num_vars();
    let mut cons = Vec::new();
    for row in &lp.rows {
        let mut a = alloc::vec![Rational::zero(); n];
        for (c, v) in &row.coeffs {
            a[*c as usize] = v.clone();
        }
        cons.push(DenseCon {
            a,
            op: row.op,
            rhs: row.rhs.clone(),
        });
    }
    for (j, bound) in lp.lower_bounds.iter().enumerate() {
        let l = bound
            .as_ref()
            .expect("vertex enumeration needs every variable bounded below");
        let mut a = alloc::vec![Rational::zero(); n];
        a[j] = Rational::one();
        cons.push(DenseCon {
            a,
            op: RowOp::Ge,
            rhs: l.clone(),
        });
    }
    cons
}

fn satisfies(cons: &[DenseCon], x: &[Rational]) -> bool {
    cons.iter().all(|c| {
        let lhs: Rational = c.a.iter().zip(x).map(|(a, v)| a * v).sum();
        match c.op {
            RowOp::Eq => lhs == c.rhs,
            RowOp::Le => lhs <= c.rhs,
            RowOp::Ge => lhs >= c.rhs,
        }
    })
}

/// Iterates size-k index subsets of 0..n in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            if idx[i] != i + n - k {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            return;
        }
    }
}

/// Best vertex of the region by exhaustive enumeration of tight constraint
/// sets. Returns `None` when no feasible vertex exists.
fn best_vertex(cons: &[DenseCon], objective: &[Rational], maximize: bool) -> Option<Rational> {
    let n = objective.len();
    if n == 0 {
        return satisfies(cons, &[]).then(Rational::zero);
    }
    let mut best: Option<Rational> = None;
    for_each_subset(cons.len(), n, |tight| {
        let a: Vec<Vec<Rational>> = tight.iter().map(|i| cons[*i].a.clone()).collect();
        let b: Vec<Rational> = tight.iter().map(|i| cons[*i].rhs.clone()).collect();
        if let Some(x) = gaussian_solve(a, b) {
            if satisfies(cons, &x) {
                let z: Rational = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                let better = match &best {
                    None => true,
                    Some(cur) => {
                        if maximize {
                            z > *cur
                        } else {
                            z < *cur
                        }
                    }
                };
                if better {
                    best = Some(z);
                }
            }
        }
    });
    best
}

/// Brute-force resolution of an LP by vertex enumeration, with an
/// unboundedness check over the (normalized) recession cone. Every variable
/// must carry a lower bound so the region is pointed: feasibility is then
/// equivalent to having a feasible vertex.
pub fn solve_by_vertex_enumeration(lp: &ExactLp) -> LpVerdict {
    let n = lp.num_vars();
    let cons = dense_constraints(lp);
    let maximize = lp.sense == Sense::Maximize;
    let Some(best) = best_vertex(&cons, &lp.objective, maximize) else {
        return LpVerdict::Infeasible;
    };

    // Recession cone normalized onto the simplex Σ d = 1: directions keep Eq
    // rows at zero and respect inequality senses; d ≥ 0 because every
    // variable is bounded below. The normalized cone is a polytope, so its
    // own vertex enumeration decides improvement exactly.
    let mut cone_cons: Vec<DenseCon> = Vec::new();
    for c in &cons {
        cone_cons.push(DenseCon {
            a: c.a.clone(),
            op: c.op,
            rhs: Rational::zero(),
        });
    }
    cone_cons.push(DenseCon {
        a: alloc::vec![Rational::one(); n],
        op: RowOp::Eq,
        rhs: Rational::one(),
    });
    if let Some(ray_best) = best_vertex(&cone_cons, &lp.objective, maximize) {
        let improving = if maximize {
            ray_best.is_positive()
        } else {
            ray_best.is_negative()
        };
        if improving {
            return LpVerdict::Unbounded;
        }
    }
    LpVerdict::Optimal(best)
}

/// Random LP in the shape the exactness criteria call for: up to `max_vars`
/// variables with nonnegativity bounds, up to `max_rows` mixed-sense rows,
/// rational coefficients with numerators and denominators up to 50.
pub fn random_lp(rng: &mut Rng, max_vars: usize, max_rows: usize) -> ExactLp {
    let n = 1 + rng.below(max_vars as u64) as usize;
    let m = 1 + rng.below(max_rows as u64) as usize;
    let sense = if rng.below(2) == 0 {
        Sense::Maximize
    } else {
        Sense::Minimize
    };
    let mut lp = ExactLp::new(sense, n);
    for j in 0..n {
        lp.set_objective(j as u32, rng.rational(50, 50));
    }
    for _ in 0..m {
        let mut coeffs = Vec::new();
        for j in 0..n {
            if rng.below(4) < 3 {
                coeffs.push((j as u32, rng.rational(50, 50)));
            }
        }
        let op = match rng.below(3) {
            0 => RowOp::Le,
            1 => RowOp::Ge,
            _ => RowOp::Eq,
        };
        lp.add_row(coeffs, op, rng.rational(50, 50));
    }
    // Half the instances get a box row, making them bounded by construction.
    if rng.below(2) == 0 {
        let coeffs = (0..n).map(|j| (j as u32, Rational::one())).collect();
        lp.add_row(coeffs, RowOp::Le, crate::numeric::rat_i(rng.range_i64(1, 40)));
    }
    lp
}

// ---------------------------------------------------------------------------
// Game-side oracles.

use crate::game::{
    build_game, GameDescription, GameTree, NodeDecl, PlayerId, TerminalDecl,
};
use crate::perturb::PerturbedInstance;
use crate::seqform::{RealizationPlan, SequenceForm, SequenceId};

/// Deterministic random two-player game without chance nodes: alternating
/// leader/follower stages, imperfect information from random pooling of the
/// opponent's history, perfect recall by construction.
pub struct RandomGameCfg {
    pub max_stages: u32,
    pub max_actions: usize,
    /// Probability (out of 8) that a follower node ends in terminals early.
    pub early_stop_in_8: u64,
    /// Regenerate until the follower has at most this many infosets.
    pub max_follower_infosets: usize,
    pub max_nodes: usize,
}

impl Default for RandomGameCfg {
    fn default() -> Self {
        RandomGameCfg {
            max_stages: 2,
            max_actions: 3,
            early_stop_in_8: 3,
            max_follower_infosets: 8,
            max_nodes: 60,
        }
    }
}

/// Generates a random game; retries deterministically (advancing the rng)
/// until the size budgets hold.
pub fn random_game(rng: &mut Rng, cfg: &RandomGameCfg) -> GameTree {
    loop {
        if let Some(game) = try_random_game(rng, cfg) {
            return game;
        }
    }
}

fn try_random_game(rng: &mut Rng, cfg: &RandomGameCfg) -> Option<GameTree> {
    let stages = 1 + rng.below(cfg.max_stages as u64) as u32;
    let mut nodes: Vec<NodeDecl> = Vec::new();
    let mut terminals: Vec<TerminalDecl> = Vec::new();
    let mut next_id = 0u32;
    let fresh = |next_id: &mut u32| {
        let id = *next_id;
        *next_id += 1;
        id
    };

    // Frontier of nodes awaiting the next stage, keyed by the public
    // leader/follower action history.
    struct Pending {
        id: u32,
        history: alloc::string::String,
    }
    let root = fresh(&mut next_id);
    let mut frontier = alloc::vec![Pending {
        id: root,
        history: alloc::string::String::new(),
    }];

    for stage in 0..stages {
        let k_l = 1 + rng.below(cfg.max_actions as u64) as usize;
        let k_f = 1 + rng.below(cfg.max_actions as u64) as usize;
        // Random pooling: leader infosets pool by a hash bucket of the
        // public history; follower likewise (coarser or finer at random).
        let l_buckets = 1 + rng.below(2) as u32;
        let f_buckets = 1 + rng.below(2) as u32;
        let mut next_frontier = Vec::new();
        let last = stage + 1 == stages;
        // Stable bucket assignment per distinct history.
        let mut l_seen: alloc::collections::BTreeMap<alloc::string::String, u32> =
            alloc::collections::BTreeMap::new();
        let mut f_seen: alloc::collections::BTreeMap<alloc::string::String, u32> =
            alloc::collections::BTreeMap::new();

        for pending in frontier {
            let l_bucket = {
                let n = l_seen.len() as u32;
                *l_seen.entry(pending.history.clone()).or_insert(n % l_buckets)
            };
            let l_actions: Vec<alloc::string::String> =
                (0..k_l).map(|a| format_action("L", stage, a)).collect();
            let mut f_ids = Vec::new();
            for _ in 0..k_l {
                f_ids.push(fresh(&mut next_id));
            }
            nodes.push(NodeDecl {
                id: pending.id,
                owner: PlayerId::Leader,
                infoset: alloc::format!("L{stage}:{l_bucket}:{}", pending.history),
                actions: l_actions,
                children: f_ids.clone(),
                chance_probs: None,
            });
            for (la, f_id) in f_ids.into_iter().enumerate() {
                // The follower does not see the leader's current move; pool
                // across it by keying on the pre-stage history bucket.
                let f_bucket = {
                    let n = f_seen.len() as u32;
                    *f_seen.entry(pending.history.clone()).or_insert(n % f_buckets)
                };
                let f_actions: Vec<alloc::string::String> =
                    (0..k_f).map(|a| format_action("F", stage, a)).collect();
                let mut children = Vec::new();
                for _ in 0..k_f {
                    children.push(fresh(&mut next_id));
                }
                nodes.push(NodeDecl {
                    id: f_id,
                    owner: PlayerId::Follower,
                    infoset: alloc::format!("F{stage}:{f_bucket}:{}", pending.history),
                    actions: f_actions,
                    children: children.clone(),
                    chance_probs: None,
                });
                for (fa, child) in children.into_iter().enumerate() {
                    let stop = last || rng.below(8) < cfg.early_stop_in_8;
                    if stop {
                        terminals.push(TerminalDecl {
                            id: child,
                            leader_payoff: rng.rational(5, 3),
                            follower_payoff: rng.rational(5, 3),
                        });
                    } else {
                        next_frontier.push(Pending {
                            id: child,
                            history: alloc::format!("{}{stage}:{la}.{fa};", pending.history),
                        });
                    }
                }
            }
        }
        frontier = next_frontier;
        if frontier.is_empty() {
            break;
        }
    }
    for pending in frontier {
        terminals.push(TerminalDecl {
            id: pending.id,
            leader_payoff: rng.rational(5, 3),
            follower_payoff: rng.rational(5, 3),
        });
    }

    if nodes.len() + terminals.len() > cfg.max_nodes {
        return None;
    }
    let game = build_game(&GameDescription { nodes, terminals }).expect("random game is valid");
    crate::game::validate_perfect_recall(&game).expect("random game has perfect recall");
    if game.player_infosets(PlayerId::Follower).len() > cfg.max_follower_infosets
        || game.player_infosets(PlayerId::Follower).is_empty()
    {
        return None;
    }
    Some(game)
}

fn format_action(side: &str, stage: u32, a: usize) -> alloc::string::String {
    alloc::format!("{side}{stage}{}", (b'a' + a as u8) as char)
}

/// All pure residual routings: one action per follower infoset, in ordinal
/// order.
pub fn pure_routings(game: &GameTree) -> Vec<Vec<usize>> {
    let sizes: Vec<usize> = game
        .player_infosets(PlayerId::Follower)
        .iter()
        .map(|i| game.infoset(*i).actions.len())
        .collect();
    let mut out = alloc::vec![Vec::new()];
    for n in sizes {
        let mut grown = Vec::with_capacity(out.len() * n);
        for prefix in &out {
            for a in 0..n {
                let mut next = prefix.clone();
                next.push(a);
                grown.push(next);
            }
        }
        out = grown;
    }
    out
}

/// The follower plan of a pure routing: floors everywhere, free mass routed
/// along the chosen action at every infoset (independent reimplementation of
/// the solver-side extraction).
pub fn routing_plan(
    game: &GameTree,
    sf: &SequenceForm,
    inst: &PerturbedInstance,
    routing: &[usize],
) -> RealizationPlan {
    let xi = inst.xi_vector(PlayerId::Follower);
    let n = sf.num_sequences(PlayerId::Follower);
    let mut values: Vec<Rational> = xi.to_vec();
    values[0] = Rational::one();
    let mut free = alloc::vec![Rational::zero(); n];
    free[0] = Rational::one() - &xi[0];
    for (idx, iset) in game.player_infosets(PlayerId::Follower).iter().enumerate() {
        let parent = sf.seq_of_infoset(game, *iset);
        let actions = game.infoset(*iset).actions.len();
        let mut pool = free[parent.index()].clone() + &xi[parent.index()];
        if parent == SequenceId::EMPTY {
            pool = Rational::one();
        }
        for a in 0..actions {
            pool -= &xi[sf.extension(game, *iset, a).index()];
        }
        let target = sf.extension(game, *iset, routing[idx]);
        free[target.index()] = pool.clone();
        values[target.index()] = &xi[target.index()] + &pool;
    }
    let plan = RealizationPlan {
        player: PlayerId::Follower,
        values,
    };
    debug_assert!(plan.validate(sf).is_ok());
    plan
}

/// Brute-force follower best-response value: the exact maximum of
/// u_f(leader, ·) over all pure residual routings.
pub fn best_response_by_enumeration(
    game: &GameTree,
    sf: &SequenceForm,
    inst: &PerturbedInstance,
    leader: &RealizationPlan,
) -> (Rational, RealizationPlan) {
    let mut best: Option<(Rational, RealizationPlan)> = None;
    for routing in pure_routings(game) {
        let plan = routing_plan(game, sf, inst, &routing);
        let value = sf.expected_utility(leader, &plan, PlayerId::Follower);
        let better = match &best {
            None => true,
            Some((v, _)) => value > *v,
        };
        if better {
            best = Some((value, plan));
        }
    }
    best.expect("games have at least one routing")
}

/// Brute-force strong Stackelberg equilibrium value: for every pure follower
/// routing, the exact leader optimization subject to that routing being a
/// best response, maximized over routings.
pub fn sse_by_enumeration(
    game: &GameTree,
    sf: &SequenceForm,
    inst: &PerturbedInstance,
) -> Rational {
    use crate::lp::{ExactLp, LpStatus, RowOp, Sense};
    let routings = pure_routings(game);
    let plans: Vec<RealizationPlan> = routings
        .iter()
        .map(|r| routing_plan(game, sf, inst, r))
        .collect();

    // Leader payoff and follower payoff of each routing, as linear
    // coefficient vectors over the leader's sequences.
    let n_l = sf.num_sequences(PlayerId::Leader);
    let coeffs = |plan: &RealizationPlan, who: PlayerId| -> Vec<Rational> {
        let mut v = alloc::vec![Rational::zero(); n_l];
        for (l, f, ul, uf) in sf.payoff_pairs() {
            let u = match who {
                PlayerId::Leader => ul,
                PlayerId::Follower => uf,
                PlayerId::Chance => unreachable!(),
            };
            v[l.index()] += u * &plan.values[f.index()];
        }
        v
    };

    let mut best: Option<Rational> = None;
    for (i, plan) in plans.iter().enumerate() {
        let leader_obj = coeffs(plan, PlayerId::Leader);
        let follower_here = coeffs(plan, PlayerId::Follower);
        let mut lp = ExactLp::new(Sense::Maximize, n_l);
        for (j, c) in leader_obj.into_iter().enumerate() {
            lp.set_objective(j as u32, c);
        }
        for j in 0..n_l {
            lp.set_lower_bound(
                j as u32,
                inst.xi(PlayerId::Leader, SequenceId(j as u32)).clone(),
            );
        }
        let (rows, rhs) = sf.flow_constraints(PlayerId::Leader);
        for (row, b) in rows.iter().zip(rhs) {
            lp.add_row(row.clone(), RowOp::Eq, b.clone());
        }
        // Incentives: this routing must be weakly better for the follower
        // than every alternative routing.
        for (j, other) in plans.iter().enumerate() {
            if j == i {
                continue;
            }
            let follower_other = coeffs(other, PlayerId::Follower);
            let row: Vec<(u32, Rational)> = follower_here
                .iter()
                .zip(&follower_other)
                .enumerate()
                .map(|(k, (a, b))| (k as u32, a - b))
                .filter(|(_, v)| !v.is_zero())
                .collect();
            lp.add_row(row, RowOp::Ge, Rational::zero());
        }
        let sol = lp.solve().expect("oracle leader LP");
        if sol.status != LpStatus::Optimal {
            continue;
        }
        let better = match &best {
            None => true,
            Some(v) => sol.objective > *v,
        };
        if better {
            best = Some(sol.objective);
        }
    }
    best.expect("some routing is enforceable")
}

/// Definitional relevance check: a nonempty pair is relevant iff some node
/// of one spawning infoset strictly precedes a node of the other, in either
/// role order. Quadratic node-pair scan.
pub fn relevant_by_definition(
    game: &GameTree,
    sf: &SequenceForm,
    l_seq: SequenceId,
    f_seq: SequenceId,
) -> bool {
    if l_seq == SequenceId::EMPTY || f_seq == SequenceId::EMPTY {
        return true;
    }
    let l_iset = sf.sequence(PlayerId::Leader, l_seq).via.unwrap().0;
    let f_iset = sf.sequence(PlayerId::Follower, f_seq).via.unwrap().0;
    let l_nodes = &game.infoset(l_iset).nodes;
    let f_nodes = &game.infoset(f_iset).nodes;
    let precedes = |a: crate::game::NodeId, b: crate::game::NodeId| -> bool {
        let mut cur = b;
        while let Some((parent, _)) = game.node(cur).parent {
            if parent == a {
                return true;
            }
            cur = parent;
        }
        false
    };
    for &h in f_nodes {
        for &g in l_nodes {
            if precedes(g, h) || precedes(h, g) {
                return true;
            }
        }
    }
    false
}

/// Exhaustive subgame value: maximum of the follower's payoff contribution
/// from terminals below the infoset over pure routings that reach it (and
/// optionally play a fixed action there), with no perturbation floors.
pub fn subgame_value_by_enumeration(
    game: &GameTree,
    sf: &SequenceForm,
    leader_values: &[Rational],
    infoset: crate::game::InfosetId,
    action: Option<usize>,
) -> Rational {
    let follower_infosets = game.player_infosets(PlayerId::Follower);
    let info = game.infoset(infoset);
    // Own-path actions needed to reach the infoset.
    let mut forced: BTreeMap<u32, usize> = BTreeMap::new();
    let mut cur = sf.seq_of_infoset(game, infoset);
    while let Some((iset, a)) = sf.sequence(PlayerId::Follower, cur).via {
        forced.insert(game.infoset(iset).ordinal, a);
        cur = sf.seq_of_infoset(game, iset);
    }
    if let Some(a) = action {
        forced.insert(info.ordinal, a);
    }

    // Sequences through the infoset.
    let children: Vec<SequenceId> = (0..info.actions.len())
        .map(|a| sf.extension(game, infoset, a))
        .collect();
    let through = |seq: SequenceId| {
        children
            .iter()
            .any(|c| sf.is_prefix(PlayerId::Follower, *c, seq))
    };

    let unperturbed = PerturbedInstance::unperturbed(sf);
    let mut best: Option<Rational> = None;
    'outer: for routing in pure_routings(game) {
        for (idx, iset) in follower_infosets.iter().enumerate() {
            if let Some(a) = forced.get(&game.infoset(*iset).ordinal) {
                if routing[idx] != *a {
                    continue 'outer;
                }
            }
        }
        let plan = routing_plan(game, sf, &unperturbed, &routing);
        let mut value = Rational::zero();
        for (l, f, _, uf) in sf.payoff_pairs() {
            if through(f) {
                value += uf * &leader_values[l.index()] * &plan.values[f.index()];
            }
        }
        let better = match &best {
            None => true,
            Some(v) => value > *v,
        };
        if better {
            best = Some(value);
        }
    }
    best.expect("the infoset is reachable by own play")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{LpStatus, PivotRule};
    use crate::numeric::rat_i;

    #[test]
    fn oracle_agrees_on_trivial_box() {
        let mut lp = ExactLp::new(Sense::Maximize, 2);
        lp.set_objective(0, rat_i(1));
        lp.set_objective(1, rat_i(2));
        lp.add_row(alloc::vec![(0, rat_i(1)), (1, rat_i(1))], RowOp::Le, rat_i(1));
        assert_eq!(solve_by_vertex_enumeration(&lp), LpVerdict::Optimal(rat_i(2)));
    }

    #[test]
    fn oracle_detects_unbounded_and_infeasible() {
        let mut lp = ExactLp::new(Sense::Maximize, 1);
        lp.set_objective(0, rat_i(1));
        assert_eq!(solve_by_vertex_enumeration(&lp), LpVerdict::Unbounded);

        let mut lp2 = ExactLp::new(Sense::Maximize, 1);
        lp2.add_row(alloc::vec![(0, rat_i(1))], RowOp::Le, rat_i(-3));
        assert_eq!(solve_by_vertex_enumeration(&lp2), LpVerdict::Infeasible);
    }

    #[test]
    fn simplex_matches_oracle_on_random_lps() {
        let mut rng = Rng::new(0xA11CE);
        for case in 0..120u64 {
            let lp = random_lp(&mut rng, 5, 6);
            let verdict = solve_by_vertex_enumeration(&lp);
            for rule in [PivotRule::Bland, PivotRule::DantzigThenBland] {
                let sol = lp
                    .solve_with(rule)
                    .unwrap_or_else(|e| panic!("case {case}: {e}\n{}", lp.dump()));
                match (&verdict, sol.status) {
                    (LpVerdict::Optimal(z), LpStatus::Optimal) => {
                        assert_eq!(*z, sol.objective, "case {case}\n{}", lp.dump())
                    }
                    (LpVerdict::Infeasible, LpStatus::Infeasible) => {}
                    (LpVerdict::Unbounded, LpStatus::Unbounded) => {}
                    (v, s) => panic!("case {case}: oracle {v:?} vs simplex {s:?}\n{}", lp.dump()),
                }
            }
        }
    }
}
