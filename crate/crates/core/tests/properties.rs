//! Cross-module properties: the invariants the execution engine, the
//! verification oracles, and the model checker all lean on, exercised over
//! randomized graphs, corrupted configurations, and complete runs.

use maxmatch_core::daemon::{
    check_move_bounds, run, theoretical_bounds, AdversarialHeuristic, CentralPick, Daemon,
    DaemonStrategy, RunOutcome,
};
use maxmatch_core::graph::{generate, greedy_maximal_matching, GraphKind};
use maxmatch_core::oracle::{verify_approximation, verify_stable_structure};
use maxmatch_core::protocol::{apply_rule, enabled_rule, eligible_nodes, extract_m_plus, is_stable};
use maxmatch_core::{Configuration, Graph, Instance, NodeId};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_instance(n: u32, p: f64, seed: u64) -> Instance {
    let g = generate(GraphKind::Random { n, p, seed }).unwrap();
    let m = greedy_maximal_matching(&g);
    Instance::new(g, m).unwrap()
}

fn random_config(inst: &Instance, seed: u64) -> Configuration {
    inst.random_configuration(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn strategy(ix: u8) -> DaemonStrategy {
    match ix % 5 {
        0 => DaemonStrategy::Synchronous,
        1 => DaemonStrategy::Central(CentralPick::LowestId),
        2 => DaemonStrategy::Central(CentralPick::SeededRandom),
        3 => DaemonStrategy::DistributedRandom,
        _ => DaemonStrategy::Adversarial(AdversarialHeuristic::RematchChurn),
    }
}

/// Hop distances from `from`, `u32::MAX` when unreachable.
fn bfs_distances(g: &Graph, from: NodeId) -> Vec<u32> {
    let mut dist = vec![u32::MAX; g.node_count()];
    dist[from.index()] = 0;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if dist[w.index()] == u32::MAX {
                dist[w.index()] = dist[u.index()] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

proptest! {
    /// The generated random family yields simple graphs with symmetric,
    /// sorted adjacency and consistent degree bookkeeping.
    #[test]
    fn random_graphs_are_simple_and_symmetric(
        n in 1u32..=12,
        p in 0.0f64..=1.0,
        seed in 0u64..1024,
    ) {
        let g = generate(GraphKind::Random { n, p, seed }).unwrap();
        let mut degree_sum = 0;
        let mut max_seen = 0;
        for u in g.nodes() {
            let nbrs = g.neighbors(u);
            prop_assert!(nbrs.windows(2).all(|w| w[0] < w[1]), "unsorted or duplicated");
            prop_assert!(!nbrs.contains(&u), "self-loop");
            for &w in nbrs {
                prop_assert!(g.has_edge(u, w) && g.has_edge(w, u));
                prop_assert!(g.neighbors(w).contains(&u), "asymmetric adjacency");
            }
            prop_assert_eq!(g.degree(u), nbrs.len());
            degree_sum += nbrs.len();
            max_seen = max_seen.max(nbrs.len());
        }
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
        prop_assert_eq!(g.max_degree(), max_seen);
    }

    /// The greedy matching is maximal and made of graph edges, so every
    /// generated instance satisfies the protocol's standing assumption.
    #[test]
    fn greedy_matchings_are_maximal(
        n in 1u32..=12,
        p in 0.0f64..=1.0,
        seed in 0u64..1024,
    ) {
        let g = generate(GraphKind::Random { n, p, seed }).unwrap();
        let m = greedy_maximal_matching(&g);
        for &(a, b) in m.edges() {
            prop_assert!(g.has_edge(a, b));
        }
        prop_assert!(maxmatch_core::graph::is_maximal(&g, &m));
    }

    /// Rule dispatch: whatever the corruption, an enabled rule belongs to
    /// the node's role and its application strictly changes the node's
    /// state (the progress argument and the model checker's
    /// distinct-successor argument both stand on this).
    #[test]
    fn enabled_rules_match_roles_and_strictly_change_state(
        n in 1u32..=10,
        p in 0.0f64..=1.0,
        gseed in 0u64..512,
        cseed in 0u64..512,
    ) {
        let inst = random_instance(n, p, gseed);
        let c = random_config(&inst, cseed);
        for u in inst.graph().nodes() {
            if let Some(rule) = enabled_rule(&inst, &c, u) {
                prop_assert_eq!(rule.is_single_rule(), !inst.roles().is_matched(u));
                prop_assert_ne!(&apply_rule(&inst, &c, u, rule), c.state(u));
            }
        }
    }

    /// Eligibility of a node is a function of its closed neighborhood:
    /// rewriting the state of a node two or more hops away never changes
    /// which rule is enabled. The engine's incremental dirty-set
    /// re-evaluation is sound exactly because of this.
    #[test]
    fn eligibility_is_local_to_the_closed_neighborhood(
        n in 3u32..=12,
        p in 0.0f64..=0.6,
        gseed in 0u64..512,
        cseed in 0u64..256,
        alt_seed in 256u64..512,
        u_pick in 0usize..12,
        w_pick in 0usize..12,
    ) {
        let inst = random_instance(n, p, gseed);
        let g = inst.graph();
        let u = NodeId::new(1 + (u_pick % g.node_count()) as u32);
        let dist = bfs_distances(g, u);
        let far: Vec<NodeId> = g.nodes().filter(|w| dist[w.index()] >= 2).collect();
        prop_assume!(!far.is_empty());
        let w = far[w_pick % far.len()];

        let c = random_config(&inst, cseed);
        let alt = random_config(&inst, alt_seed);
        let mut states = c.states().to_vec();
        states[w.index()] = alt.states()[w.index()].clone();
        let mutated = inst.configuration_from_states(states).unwrap();

        prop_assert_eq!(enabled_rule(&inst, &c, u), enabled_rule(&inst, &mutated, u));
    }

    /// The output matching read off *any* configuration — stable or mid
    /// chaos — is a well-formed matching over graph edges: mutual pointers
    /// cannot collide on an endpoint.
    #[test]
    fn extracted_output_is_always_a_matching(
        n in 1u32..=12,
        p in 0.0f64..=1.0,
        gseed in 0u64..512,
        cseed in 0u64..512,
    ) {
        let inst = random_instance(n, p, gseed);
        let c = random_config(&inst, cseed);
        let m_plus = extract_m_plus(&inst, &c);
        let mut covered = vec![false; inst.graph().node_count()];
        for &(a, b) in &m_plus {
            prop_assert!(inst.graph().has_edge(a, b));
            prop_assert!(!covered[a.index()] && !covered[b.index()], "shared endpoint");
            covered[a.index()] = true;
            covered[b.index()] = true;
        }
    }

    /// A run is a pure function of (instance, initial configuration,
    /// strategy, seed): repeating it reproduces the trace and the move
    /// accounting, the trace replays cleanly, and a stabilized outcome
    /// really has no enabled rule left.
    #[test]
    fn runs_replay_deterministically_and_account_every_move(
        n in 2u32..=10,
        p in 0.0f64..=1.0,
        gseed in 0u64..256,
        cseed in 0u64..256,
        strat in 0u8..5,
        seed in 0u64..256,
    ) {
        let inst = random_instance(n, p, gseed);
        let c0 = random_config(&inst, cseed);
        let limit = theoretical_bounds(inst.graph(), inst.matching()).total_moves + 1;

        let mut d1 = Daemon::new(strategy(strat), seed);
        let (trace, stats) = run(&inst, c0.clone(), &mut d1, limit).unwrap();
        let mut d2 = Daemon::new(strategy(strat), seed);
        let (again, stats_again) = run(&inst, c0, &mut d2, limit).unwrap();
        prop_assert_eq!(&trace, &again);
        prop_assert_eq!(&stats, &stats_again);

        let configs = trace.validate(&inst).unwrap();
        prop_assert_eq!(configs.last().unwrap(), trace.final_config());
        let activated: u64 =
            trace.steps().iter().map(|a| a.nodes.len() as u64).sum();
        prop_assert_eq!(trace.move_count(), activated);
        prop_assert_eq!(stats.total_moves(), activated);

        if trace.outcome() == RunOutcome::Stabilized {
            prop_assert!(is_stable(&inst, trace.final_config()));
            prop_assert!(eligible_nodes(&inst, trace.final_config()).is_empty());
        }
    }

    /// End to end on small random instances from corrupted starts: every
    /// strategy stabilizes within the theoretical move bound, and the
    /// stable configuration passes the structural, bound, and
    /// approximation oracles.
    #[test]
    fn stabilized_runs_pass_every_oracle(
        n in 2u32..=10,
        p in 0.0f64..=1.0,
        gseed in 0u64..256,
        cseed in 0u64..256,
        strat in 0u8..5,
        seed in 0u64..256,
    ) {
        let inst = random_instance(n, p, gseed);
        let c0 = random_config(&inst, cseed);
        let bounds = theoretical_bounds(inst.graph(), inst.matching());
        let mut daemon = Daemon::new(strategy(strat), seed);
        let (trace, stats) = run(&inst, c0, &mut daemon, bounds.total_moves + 1).unwrap();
        prop_assert_eq!(trace.outcome(), RunOutcome::Stabilized);

        let structure = verify_stable_structure(&inst, trace.final_config());
        prop_assert!(structure.passed(), "{}", structure);
        let moves = check_move_bounds(&inst, &stats, &bounds);
        prop_assert!(moves.passed(), "{}", moves);
        let approx = verify_approximation(&inst, trace.final_config());
        prop_assert!(approx.passed(), "{}", approx);
    }
}
