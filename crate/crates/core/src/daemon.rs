//! Adversarial daemon execution: strategies that pick which enabled nodes
//! fire each transition, bounded runs with full traces and move accounting,
//! and the proven worst-case move bounds those runs are checked against.
//!
//! The daemon model is fully adversarial: any nonempty subset of enabled
//! nodes may be activated simultaneously. All randomized strategies draw
//! from a seeded ChaCha stream, so a run is reproducible from
//! `(instance, initial configuration, strategy, seed, move limit)` alone.
//!
//! Move bounds (for μ matched nodes, σ single nodes, max degree Δ):
//!
//! * matched `Update` executions ≤ Δ(σ + 6μ) + μ,
//! * all matched-node moves ≤ 12μ(Δ(σ + 6μ) + μ),
//! * single `end` flips ≤ σ + 6μ in total (one `ResetEnd` per node),
//! * `UpdateEnd` executions ≤ σ + 6μ,
//! * `UpdateP` executions ≤ σ · (matched-move bound) + σ — a safe bound:
//!   each single recomputes its pointer at most once per matched-node move
//!   in its neighborhood, plus one initial cleanup. The checker enforces
//!   this total and additionally reports the observed per-node maximum,
//!   which in practice stays far below it.
//!
//! The total bound is the sum of the matched bound and the three
//! single-rule bounds.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, Matching, NodeId, RolePartition};
use crate::protocol::{
    enabled_rule, step, Configuration, Instance, RuleId, StepError,
};
use crate::report::VerificationReport;

/// How a central daemon picks its one node per transition.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum CentralPick {
    /// Always the lowest-identifier enabled node.
    LowestId,
    /// A seeded-uniform enabled node.
    SeededRandom,
}

/// Scoring heuristics for the adversarial strategy. The strategy activates
/// exactly the highest-scoring enabled nodes each transition.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum AdversarialHeuristic {
    /// Prefer the moves that restart work: matched `Update` recomputations
    /// first, then single `end` flips, then everything else. This chases
    /// the cascades behind the worst-case bounds.
    RematchChurn,
}

fn churn_score(rule: RuleId) -> u8 {
    match rule {
        RuleId::Update => 3,
        RuleId::ResetEnd | RuleId::UpdateEnd => 2,
        RuleId::UpdateP | RuleId::MatchFirst | RuleId::MatchSecond | RuleId::ResetMatch => 1,
    }
}

/// Daemon strategies. All honor the adversarial daemon contract: every
/// transition activates a nonempty subset of the enabled nodes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DaemonStrategy {
    /// Every enabled node fires, every transition.
    Synchronous,
    /// Exactly one node fires per transition.
    Central(CentralPick),
    /// Each enabled node joins by an independent fair coin; redrawn until
    /// the subset is nonempty.
    DistributedRandom,
    /// Highest-scoring enabled nodes fire (see [`AdversarialHeuristic`]).
    Adversarial(AdversarialHeuristic),
    /// A fixed activation schedule, one set per transition. Used to re-run
    /// recorded traces; listing a non-enabled node is an error.
    Replay(Vec<Vec<NodeId>>),
}

impl DaemonStrategy {
    /// Stable strategy name used in trace headers and CLI arguments.
    pub fn name(&self) -> &'static str {
        match self {
            DaemonStrategy::Synchronous => "sync",
            DaemonStrategy::Central(CentralPick::LowestId) => "central-lowest",
            DaemonStrategy::Central(CentralPick::SeededRandom) => "central-random",
            DaemonStrategy::DistributedRandom => "distributed-random",
            DaemonStrategy::Adversarial(AdversarialHeuristic::RematchChurn) => "adversarial",
            DaemonStrategy::Replay(_) => "replay",
        }
    }
}

impl fmt::Display for DaemonStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Errors from daemon selection.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DaemonError {
    /// `select` was called on a stable configuration.
    NothingEligible,
    /// A replay schedule ran out of activation sets before stabilizing.
    ReplayExhausted { at_step: usize },
}

impl fmt::Display for DaemonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DaemonError::NothingEligible => f.write_str("no enabled node to select from"),
            DaemonError::ReplayExhausted { at_step } => {
                write!(f, "replay schedule exhausted at step {at_step} before stabilization")
            }
        }
    }
}

impl core::error::Error for DaemonError {}

/// A strategy plus its seeded randomness and replay position.
#[derive(Clone, Debug)]
pub struct Daemon {
    strategy: DaemonStrategy,
    rng: ChaCha8Rng,
    replay_cursor: usize,
}

impl Daemon {
    pub fn new(strategy: DaemonStrategy, seed: u64) -> Daemon {
        Daemon::with_rng(strategy, ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uses an already-advanced stream, e.g. the one that generated the
    /// random initial configuration, keeping one seed per experiment.
    pub fn with_rng(strategy: DaemonStrategy, rng: ChaCha8Rng) -> Daemon {
        Daemon { strategy, rng, replay_cursor: 0 }
    }

    pub fn strategy(&self) -> &DaemonStrategy {
        &self.strategy
    }

    /// Picks the next activation set from `eligible` (ascending, nonempty).
    pub fn select(
        &mut self,
        inst: &Instance,
        c: &Configuration,
        eligible: &[NodeId],
    ) -> Result<Vec<NodeId>, DaemonError> {
        if eligible.is_empty() {
            return Err(DaemonError::NothingEligible);
        }
        let picked = match &self.strategy {
            DaemonStrategy::Synchronous => eligible.to_vec(),
            DaemonStrategy::Central(CentralPick::LowestId) => vec![eligible[0]],
            DaemonStrategy::Central(CentralPick::SeededRandom) => {
                vec![*eligible.choose(&mut self.rng).expect("eligible is nonempty")]
            }
            DaemonStrategy::DistributedRandom => loop {
                let subset: Vec<NodeId> =
                    eligible.iter().copied().filter(|_| self.rng.gen_bool(0.5)).collect();
                if !subset.is_empty() {
                    break subset;
                }
            },
            DaemonStrategy::Adversarial(AdversarialHeuristic::RematchChurn) => {
                let scores: Vec<u8> = eligible
                    .iter()
                    .map(|&u| {
                        let rule = enabled_rule(inst, c, u)
                            .expect("eligible nodes have an enabled rule");
                        churn_score(rule)
                    })
                    .collect();
                let best = *scores.iter().max().expect("eligible is nonempty");
                eligible
                    .iter()
                    .zip(&scores)
                    .filter(|&(_, &s)| s == best)
                    .map(|(&u, _)| u)
                    .collect()
            }
            DaemonStrategy::Replay(schedule) => {
                let set = schedule
                    .get(self.replay_cursor)
                    .ok_or(DaemonError::ReplayExhausted { at_step: self.replay_cursor })?;
                self.replay_cursor += 1;
                set.clone()
            }
        };
        Ok(picked)
    }
}

/// How a bounded run ended.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum RunOutcome {
    /// Reached a configuration with no enabled node.
    Stabilized,
    /// The move limit was crossed first.
    LimitExceeded,
}

impl fmt::Display for RunOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunOutcome::Stabilized => "stabilized",
            RunOutcome::LimitExceeded => "limit-exceeded",
        })
    }
}

/// One daemon transition as recorded in a trace: the activated nodes with
/// the rule each fired, ascending by identifier.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Activation {
    pub nodes: Vec<(NodeId, RuleId)>,
}

/// A complete run record: initial configuration, every transition, final
/// configuration, and the outcome. Intermediate configurations are not
/// stored — they are recomputed by replaying, which [`Trace::validate`]
/// also uses to prove the record is internally consistent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Trace {
    initial: Configuration,
    steps: Vec<Activation>,
    final_config: Configuration,
    outcome: RunOutcome,
}

/// Ways a recorded trace can contradict the protocol when replayed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TraceError {
    Step { index: usize, error: StepError },
    RuleMismatch { index: usize, id: u32, recorded: RuleId, actual: RuleId },
    FinalMismatch,
    /// Outcome says stabilized but the final configuration has enabled
    /// nodes, or vice versa.
    OutcomeMismatch,
}

impl fmt::Display for TraceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceError::Step { index, error } => write!(f, "step {index}: {error}"),
            TraceError::RuleMismatch { index, id, recorded, actual } => write!(
                f,
                "step {index}: node {id} recorded as {recorded} but {actual} is enabled"
            ),
            TraceError::FinalMismatch => f.write_str("replayed final configuration differs"),
            TraceError::OutcomeMismatch => {
                f.write_str("outcome label contradicts final configuration stability")
            }
        }
    }
}

impl core::error::Error for TraceError {}

impl Trace {
    pub fn initial(&self) -> &Configuration {
        &self.initial
    }

    pub fn final_config(&self) -> &Configuration {
        &self.final_config
    }

    pub fn steps(&self) -> &[Activation] {
        &self.steps
    }

    pub fn outcome(&self) -> RunOutcome {
        self.outcome
    }

    /// Total moves = sum of activation set sizes.
    pub fn move_count(&self) -> u64 {
        self.steps.iter().map(|a| a.nodes.len() as u64).sum()
    }

    /// Assembles a trace from parts (for file import); [`Trace::validate`]
    /// decides whether it is consistent with the protocol.
    pub fn from_parts(
        initial: Configuration,
        steps: Vec<Activation>,
        final_config: Configuration,
        outcome: RunOutcome,
    ) -> Trace {
        Trace { initial, steps, final_config, outcome }
    }

    /// Replays the trace against the protocol and returns the full
    /// configuration sequence `c_0 .. c_k` on success. Checks that every
    /// recorded rule is the enabled rule, that the final configuration
    /// matches, and that the outcome label agrees with stability.
    pub fn validate(&self, inst: &Instance) -> Result<Vec<Configuration>, TraceError> {
        let mut configs = Vec::with_capacity(self.steps.len() + 1);
        configs.push(self.initial.clone());
        for (index, act) in self.steps.iter().enumerate() {
            let current = configs.last().expect("configs starts nonempty");
            let ids: Vec<NodeId> = act.nodes.iter().map(|&(u, _)| u).collect();
            let (next, fired) =
                step(inst, current, &ids).map_err(|error| TraceError::Step { index, error })?;
            for (&(u, recorded), &actual) in act.nodes.iter().zip(&fired) {
                if recorded != actual {
                    return Err(TraceError::RuleMismatch {
                        index,
                        id: u.get(),
                        recorded,
                        actual,
                    });
                }
            }
            configs.push(next);
        }
        if configs.last() != Some(&self.final_config) {
            return Err(TraceError::FinalMismatch);
        }
        let stable = crate::protocol::is_stable(inst, &self.final_config);
        if stable != (self.outcome == RunOutcome::Stabilized) {
            return Err(TraceError::OutcomeMismatch);
        }
        Ok(configs)
    }

    /// The recorded activation sets without rules, ready for
    /// [`DaemonStrategy::Replay`].
    pub fn activation_sets(&self) -> Vec<Vec<NodeId>> {
        self.steps.iter().map(|a| a.nodes.iter().map(|&(u, _)| u).collect()).collect()
    }
}

/// Per-node, per-rule move counters plus the two flag-write counters the
/// bounds are stated over.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MoveStats {
    /// `[node index][rule index]` execution counts.
    per_node_rule: Vec<[u64; RuleId::COUNT]>,
    /// Per matched node: writes of the value `true` into `end`.
    end_true_writes: Vec<u64>,
    /// Per single node: changes of the `end` value.
    end_flips: Vec<u64>,
    total_moves: u64,
}

impl MoveStats {
    fn new(n: usize) -> MoveStats {
        MoveStats {
            per_node_rule: vec![[0; RuleId::COUNT]; n],
            end_true_writes: vec![0; n],
            end_flips: vec![0; n],
            total_moves: 0,
        }
    }

    pub fn total_moves(&self) -> u64 {
        self.total_moves
    }

    /// Executions of `rule` by node `u`.
    pub fn node_rule(&self, u: NodeId, rule: RuleId) -> u64 {
        self.per_node_rule[u.index()][rule.index()]
    }

    /// Executions of `rule` across all nodes.
    pub fn rule_total(&self, rule: RuleId) -> u64 {
        self.per_node_rule.iter().map(|row| row[rule.index()]).sum()
    }

    /// Moves by matched nodes (all four matched rules).
    pub fn matched_move_total(&self) -> u64 {
        [RuleId::Update, RuleId::MatchFirst, RuleId::MatchSecond, RuleId::ResetMatch]
            .into_iter()
            .map(|r| self.rule_total(r))
            .sum()
    }

    pub fn end_true_writes(&self, u: NodeId) -> u64 {
        self.end_true_writes[u.index()]
    }

    pub fn end_flips(&self, u: NodeId) -> u64 {
        self.end_flips[u.index()]
    }

    /// Total `end` flips across single nodes.
    pub fn single_end_flip_total(&self) -> u64 {
        self.end_flips.iter().sum()
    }
}

/// The proven worst-case move bounds for one instance, plus the parameters
/// they are computed from.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MoveBounds {
    pub mu: u64,
    pub sigma: u64,
    pub delta: u64,
    /// Matched `Update` executions.
    pub updates: u64,
    /// All matched-node moves.
    pub matched_moves: u64,
    /// Total single `end` flips (and also total `UpdateEnd` executions).
    pub single_end_flips: u64,
    /// Total `ResetEnd` executions (one per single node).
    pub reset_end: u64,
    /// Total `UpdateEnd` executions.
    pub update_end: u64,
    /// Safe total for `UpdateP` executions (see module docs).
    pub update_p: u64,
    /// Sum of the matched bound and the three single-rule bounds: no
    /// maximal execution is longer than this.
    pub total_moves: u64,
}

/// Computes the move bounds of an instance from μ, σ, and Δ.
pub fn theoretical_bounds(g: &Graph, m: &Matching) -> MoveBounds {
    let roles = RolePartition::new(g, m);
    let mu = roles.mu() as u64;
    let sigma = roles.sigma() as u64;
    let delta = g.max_degree() as u64;
    let updates = delta * (sigma + 6 * mu) + mu;
    let matched_moves = 12 * mu * updates;
    let single_end_flips = sigma + 6 * mu;
    let reset_end = sigma;
    let update_end = sigma + 6 * mu;
    let update_p = sigma * matched_moves + sigma;
    let total_moves = matched_moves + reset_end + update_end + update_p;
    MoveBounds {
        mu,
        sigma,
        delta,
        updates,
        matched_moves,
        single_end_flips,
        reset_end,
        update_end,
        update_p,
        total_moves,
    }
}

/// Errors from a bounded run.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EngineError {
    Daemon(DaemonError),
    Step(StepError),
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::Daemon(e) => write!(f, "daemon: {e}"),
            EngineError::Step(e) => write!(f, "step: {e}"),
        }
    }
}

impl core::error::Error for EngineError {}

impl From<DaemonError> for EngineError {
    fn from(e: DaemonError) -> EngineError {
        EngineError::Daemon(e)
    }
}

impl From<StepError> for EngineError {
    fn from(e: StepError) -> EngineError {
        EngineError::Step(e)
    }
}

/// Runs the protocol from `c0` under `daemon` until it stabilizes or the
/// cumulative move count exceeds `move_limit`.
///
/// Eligibility is maintained incrementally: a transition activating the set
/// `S` only re-evaluates guards of `S` and its neighbors, which is sound
/// because every guard reads at most distance-one state.
pub fn run(
    inst: &Instance,
    c0: Configuration,
    daemon: &mut Daemon,
    move_limit: u64,
) -> Result<(Trace, MoveStats), EngineError> {
    let n = inst.graph().node_count();
    let mut stats = MoveStats::new(n);
    let mut steps: Vec<Activation> = Vec::new();
    let mut current = c0.clone();
    let mut enabled: Vec<Option<RuleId>> =
        inst.graph().nodes().map(|u| enabled_rule(inst, &current, u)).collect();

    let outcome = loop {
        let eligible: Vec<NodeId> = (0..n)
            .filter(|&ix| enabled[ix].is_some())
            .map(NodeId::from_index)
            .collect();
        if eligible.is_empty() {
            break RunOutcome::Stabilized;
        }
        let mut selected = daemon.select(inst, &current, &eligible)?;
        selected.sort_unstable();
        let (next, fired) = step(inst, &current, &selected)?;
        let mut nodes = Vec::with_capacity(selected.len());
        for (&u, &rule) in selected.iter().zip(&fired) {
            nodes.push((u, rule));
            stats.per_node_rule[u.index()][rule.index()] += 1;
            stats.total_moves += 1;
            if rule.is_single_rule() {
                if current.end(u) != next.end(u) {
                    stats.end_flips[u.index()] += 1;
                }
            } else if next.end(u) {
                // A matched rule that leaves true in `end` wrote the value
                // true: Update/ResetMatch always write false, so this only
                // triggers for the two match rules.
                stats.end_true_writes[u.index()] += 1;
            }
        }
        steps.push(Activation { nodes });
        // Guards read distance-one state only: refresh the activated nodes
        // and their neighborhoods.
        for &u in &selected {
            enabled[u.index()] = enabled_rule(inst, &next, u);
            for &w in inst.graph().neighbors(u) {
                enabled[w.index()] = enabled_rule(inst, &next, w);
            }
        }
        current = next;
        if stats.total_moves > move_limit {
            break RunOutcome::LimitExceeded;
        }
    };

    let trace = Trace { initial: c0, steps, final_config: current, outcome };
    Ok((trace, stats))
}

/// Checks recorded move statistics against the theoretical bounds. All
/// nine checks always run; failures carry the offending nodes or totals.
pub fn check_move_bounds(
    inst: &Instance,
    stats: &MoveStats,
    bounds: &MoveBounds,
) -> VerificationReport {
    use alloc::format;
    let mut report = VerificationReport::new();
    let roles = inst.roles();

    // Per matched node: at most two writes of true into end.
    let mut worst_true_writes = 0u64;
    let mut true_write_offender: Option<(u32, u64)> = None;
    for u in inst.graph().nodes().filter(|&u| roles.is_matched(u)) {
        let w = stats.end_true_writes(u);
        worst_true_writes = worst_true_writes.max(w);
        if w > 2 && true_write_offender.is_none() {
            true_write_offender = Some((u.get(), w));
        }
    }
    match true_write_offender {
        None => report.pass(
            "matched-end-true-writes-per-node",
            format!("max {worst_true_writes} of allowed 2"),
        ),
        Some((id, w)) => report.fail(
            "matched-end-true-writes-per-node",
            format!("node {id} wrote end := true {w} times (allowed 2)"),
        ),
    }

    // Per single node: at most one ResetEnd.
    let mut reset_offender: Option<(u32, u64)> = None;
    let mut worst_reset = 0u64;
    for u in inst.graph().nodes().filter(|&u| !roles.is_matched(u)) {
        let r = stats.node_rule(u, RuleId::ResetEnd);
        worst_reset = worst_reset.max(r);
        if r > 1 && reset_offender.is_none() {
            reset_offender = Some((u.get(), r));
        }
    }
    match reset_offender {
        None => {
            report.pass("single-reset-end-per-node", format!("max {worst_reset} of allowed 1"))
        }
        Some((id, r)) => report.fail(
            "single-reset-end-per-node",
            format!("node {id} executed ResetEnd {r} times (allowed 1)"),
        ),
    }

    let mut total_check = |name: &'static str, observed: u64, bound: u64| {
        if observed <= bound {
            report.pass(name, format!("{observed} of {bound}"));
        } else {
            report.fail(name, format!("{observed} exceeds bound {bound}"));
        }
    };

    total_check("single-end-flips-total", stats.single_end_flip_total(), bounds.single_end_flips);
    total_check("reset-end-total", stats.rule_total(RuleId::ResetEnd), bounds.reset_end);
    total_check("update-end-total", stats.rule_total(RuleId::UpdateEnd), bounds.update_end);
    total_check("updates-total", stats.rule_total(RuleId::Update), bounds.updates);
    total_check("matched-moves-total", stats.matched_move_total(), bounds.matched_moves);
    total_check("total-moves", stats.total_moves(), bounds.total_moves);

    // UpdateP: enforce the safe total and surface the per-node maximum for
    // comparison against future sharper bounds.
    let max_update_p = inst
        .graph()
        .nodes()
        .filter(|&u| !roles.is_matched(u))
        .map(|u| stats.node_rule(u, RuleId::UpdateP))
        .max()
        .unwrap_or(0);
    let total_update_p = stats.rule_total(RuleId::UpdateP);
    if total_update_p <= bounds.update_p {
        report.pass(
            "update-p-total",
            format!("{total_update_p} of {} (per-node max {max_update_p})", bounds.update_p),
        );
    } else {
        report.fail(
            "update-p-total",
            format!("{total_update_p} exceeds bound {} (per-node max {max_update_p})", bounds.update_p),
        );
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, generate_augmenting_chain, GraphKind, IdOrder, Matching};
    use crate::protocol::{extract_m_plus, is_stable, NodeState};

    fn id(v: u32) -> NodeId {
        NodeId::new(v)
    }

    fn chain(k: u32) -> Instance {
        let (g, m) = generate_augmenting_chain(k, IdOrder::Ascending);
        Instance::new(g, m).unwrap()
    }

    fn isolated_edge() -> Instance {
        let g = crate::graph::Graph::from_edges(&[(1, 2)]).unwrap();
        let m = Matching::new(&g, &[(id(1), id(2))]).unwrap();
        Instance::new(g, m).unwrap()
    }

    #[test]
    fn bounds_for_chain1_match_hand_arithmetic() {
        let (g, m) = generate_augmenting_chain(1, IdOrder::Ascending);
        let b = theoretical_bounds(&g, &m);
        assert_eq!((b.mu, b.sigma, b.delta), (2, 2, 2));
        assert_eq!(b.updates, 30); // 2 * (2 + 12) + 2
        assert_eq!(b.matched_moves, 720); // 12 * 2 * 30
        assert_eq!(b.single_end_flips, 14);
        assert_eq!(b.reset_end, 2);
        assert_eq!(b.update_end, 14);
        assert_eq!(b.update_p, 1442); // 2 * 720 + 2
        assert_eq!(b.total_moves, 720 + 2 + 14 + 1442);
    }

    #[test]
    fn bounds_for_chain2_match_hand_arithmetic() {
        let (g, m) = generate_augmenting_chain(2, IdOrder::Ascending);
        let b = theoretical_bounds(&g, &m);
        assert_eq!((b.mu, b.sigma, b.delta), (4, 3, 2));
        assert_eq!(b.updates, 58); // 2 * (3 + 24) + 4
        assert_eq!(b.matched_moves, 2784); // 12 * 4 * 58
        assert_eq!(b.update_p, 8355); // 3 * 2784 + 3
        assert_eq!(b.total_moves, 2784 + 3 + 27 + 8355);
    }

    #[test]
    fn bounds_for_edgeless_graph() {
        let g = crate::graph::Graph::with_nodes(3, &[]).unwrap();
        let m = Matching::empty(&g);
        let b = theoretical_bounds(&g, &m);
        assert_eq!((b.mu, b.sigma, b.delta), (0, 3, 0));
        assert_eq!(b.matched_moves, 0);
        assert_eq!(b.total_moves, 0 + 3 + 3 + 3);
    }

    #[test]
    fn select_synchronous_takes_all() {
        let inst = chain(1);
        let c = inst.clean_configuration();
        let mut d = Daemon::new(DaemonStrategy::Synchronous, 0);
        let eligible = crate::protocol::eligible_nodes(&inst, &c);
        assert_eq!(d.select(&inst, &c, &eligible).unwrap(), alloc::vec![id(2), id(3)]);
    }

    #[test]
    fn select_central_lowest_takes_minimum() {
        let inst = chain(1);
        let c = inst.clean_configuration();
        let mut d = Daemon::new(DaemonStrategy::Central(CentralPick::LowestId), 0);
        // Eligible sets are always passed ascending.
        assert_eq!(d.select(&inst, &c, &[id(3), id(7)]).unwrap(), alloc::vec![id(3)]);
    }

    #[test]
    fn select_central_random_is_seeded() {
        let inst = chain(1);
        let c = inst.clean_configuration();
        let eligible = [id(2), id(3)];
        let mut a = Daemon::new(DaemonStrategy::Central(CentralPick::SeededRandom), 5);
        let mut b = Daemon::new(DaemonStrategy::Central(CentralPick::SeededRandom), 5);
        for _ in 0..10 {
            assert_eq!(
                a.select(&inst, &c, &eligible).unwrap(),
                b.select(&inst, &c, &eligible).unwrap()
            );
        }
    }

    #[test]
    fn select_distributed_random_is_nonempty_subset() {
        let inst = chain(1);
        let c = inst.clean_configuration();
        let eligible = [id(2), id(3)];
        let mut d = Daemon::new(DaemonStrategy::DistributedRandom, 9);
        for _ in 0..50 {
            let s = d.select(&inst, &c, &eligible).unwrap();
            assert!(!s.is_empty());
            assert!(s.iter().all(|u| eligible.contains(u)));
        }
    }

    #[test]
    fn select_adversarial_prefers_update_moves() {
        // Matched edge (1, 3) with singles 2, 4, 9 around node 1.
        let g = crate::graph::Graph::with_nodes(9, &[(1, 3), (1, 2), (1, 4), (1, 9)]).unwrap();
        let m = Matching::new(&g, &[(id(1), id(3))]).unwrap();
        let inst = Instance::new(g, m).unwrap();
        let c0 = inst.clean_configuration();
        // Single 9 is ready to ResetEnd; node 1 still sees singles 2 and 4,
        // so its Update stays enabled alongside.
        let mut states = c0.states().to_vec();
        states[id(9).index()] = NodeState::single(None, true);
        let c = inst.configuration_from_states(states).unwrap();
        let eligible = crate::protocol::eligible_nodes(&inst, &c);
        assert_eq!(eligible, alloc::vec![id(1), id(9)]);
        let mut d = Daemon::new(DaemonStrategy::Adversarial(AdversarialHeuristic::RematchChurn), 0);
        // Updates score above end flips: only node 1 fires.
        assert_eq!(d.select(&inst, &c, &eligible).unwrap(), alloc::vec![id(1)]);
    }

    #[test]
    fn select_rejects_empty_eligible() {
        let inst = chain(1);
        let c = inst.clean_configuration();
        let mut d = Daemon::new(DaemonStrategy::Synchronous, 0);
        assert_eq!(d.select(&inst, &c, &[]).err(), Some(DaemonError::NothingEligible));
    }

    #[test]
    fn run_on_stable_start_is_zero_moves() {
        let inst = isolated_edge();
        let c = inst.clean_configuration();
        let mut d = Daemon::new(DaemonStrategy::Synchronous, 0);
        let (trace, stats) = run(&inst, c.clone(), &mut d, 100).unwrap();
        assert_eq!(trace.outcome(), RunOutcome::Stabilized);
        assert_eq!(stats.total_moves(), 0);
        assert!(trace.steps().is_empty());
        assert_eq!(trace.final_config(), &c);
        assert!(trace.validate(&inst).is_ok());
    }

    #[test]
    fn run_chain1_stabilizes_to_full_rematch() {
        for (strategy, seed) in [
            (DaemonStrategy::Synchronous, 0),
            (DaemonStrategy::Central(CentralPick::LowestId), 0),
            (DaemonStrategy::Central(CentralPick::SeededRandom), 3),
            (DaemonStrategy::DistributedRandom, 4),
            (DaemonStrategy::Adversarial(AdversarialHeuristic::RematchChurn), 0),
        ] {
            let inst = chain(1);
            let bounds = theoretical_bounds(inst.graph(), inst.matching());
            let mut d = Daemon::new(strategy.clone(), seed);
            let (trace, stats) =
                run(&inst, inst.clean_configuration(), &mut d, bounds.total_moves + 1).unwrap();
            assert_eq!(trace.outcome(), RunOutcome::Stabilized, "strategy {strategy}");
            assert!(is_stable(&inst, trace.final_config()));
            assert_eq!(
                extract_m_plus(&inst, trace.final_config()),
                alloc::vec![(id(1), id(2)), (id(3), id(4))],
                "strategy {strategy}"
            );
            let report = check_move_bounds(&inst, &stats, &bounds);
            assert!(report.passed(), "bounds report:\n{report}");
            trace.validate(&inst).unwrap();
        }
    }

    #[test]
    fn run_respects_move_limit() {
        let inst = chain(1);
        let mut d = Daemon::new(DaemonStrategy::Synchronous, 0);
        let (trace, stats) = run(&inst, inst.clean_configuration(), &mut d, 1).unwrap();
        assert_eq!(trace.outcome(), RunOutcome::LimitExceeded);
        assert!(stats.total_moves() > 1);
        assert!(!is_stable(&inst, trace.final_config()));
        trace.validate(&inst).unwrap();
    }

    #[test]
    fn runs_are_reproducible_per_seed() {
        let inst = chain(2);
        let bounds = theoretical_bounds(inst.graph(), inst.matching());
        let go = |seed: u64| {
            let mut d = Daemon::new(DaemonStrategy::DistributedRandom, seed);
            run(&inst, inst.clean_configuration(), &mut d, bounds.total_moves + 1).unwrap()
        };
        let (t1, s1) = go(42);
        let (t2, s2) = go(42);
        assert_eq!(t1, t2);
        assert_eq!(s1, s2);
        let (t3, _) = go(43);
        assert!(t1 != t3 || t1.move_count() == t3.move_count());
    }

    #[test]
    fn replay_reproduces_recorded_run() {
        let inst = chain(2);
        let bounds = theoretical_bounds(inst.graph(), inst.matching());
        let mut d = Daemon::new(DaemonStrategy::DistributedRandom, 7);
        let (orig, _) =
            run(&inst, inst.clean_configuration(), &mut d, bounds.total_moves + 1).unwrap();
        let mut replay = Daemon::new(DaemonStrategy::Replay(orig.activation_sets()), 0);
        let (again, _) =
            run(&inst, inst.clean_configuration(), &mut replay, bounds.total_moves + 1).unwrap();
        assert_eq!(orig, again);
    }

    #[test]
    fn replay_rejects_non_eligible_node() {
        let inst = chain(1);
        // Single 1 is not enabled in the clean configuration.
        let mut d = Daemon::new(DaemonStrategy::Replay(alloc::vec![alloc::vec![id(1)]]), 0);
        let err = run(&inst, inst.clean_configuration(), &mut d, 100).unwrap_err();
        assert_eq!(err, EngineError::Step(StepError::NotEligible { id: 1 }));
    }

    #[test]
    fn replay_exhaustion_is_an_error() {
        let inst = chain(1);
        // One step is not enough to stabilize the clean chain.
        let mut d = Daemon::new(DaemonStrategy::Replay(alloc::vec![alloc::vec![id(2)]]), 0);
        let err = run(&inst, inst.clean_configuration(), &mut d, 100).unwrap_err();
        assert_eq!(err, EngineError::Daemon(DaemonError::ReplayExhausted { at_step: 1 }));
    }

    #[test]
    fn stats_count_rules_and_flag_writes() {
        let inst = chain(1);
        let bounds = theoretical_bounds(inst.graph(), inst.matching());
        let mut d = Daemon::new(DaemonStrategy::Central(CentralPick::LowestId), 0);
        let (trace, stats) =
            run(&inst, inst.clean_configuration(), &mut d, bounds.total_moves + 1).unwrap();
        assert_eq!(trace.move_count(), stats.total_moves());
        // Every matched node updated its proposals exactly once here.
        assert_eq!(stats.node_rule(id(2), RuleId::Update), 1);
        assert_eq!(stats.node_rule(id(3), RuleId::Update), 1);
        // The final handshake writes end := true once per matched node.
        assert_eq!(stats.end_true_writes(id(2)), 1);
        assert_eq!(stats.end_true_writes(id(3)), 1);
        // Each single flipped end exactly once (false -> true at the end).
        assert_eq!(stats.end_flips(id(1)), 1);
        assert_eq!(stats.end_flips(id(4)), 1);
    }

    #[test]
    fn check_move_bounds_flags_synthetic_violations() {
        let inst = chain(1);
        let bounds = theoretical_bounds(inst.graph(), inst.matching());
        let mut stats = MoveStats::new(inst.graph().node_count());
        // Three true-writes at matched node 2: violates the per-node cap.
        stats.end_true_writes[id(2).index()] = 3;
        stats.per_node_rule[id(2).index()][RuleId::MatchFirst.index()] = 3;
        stats.total_moves = 3;
        let report = check_move_bounds(&inst, &stats, &bounds);
        assert!(!report.passed());
        let failing: alloc::vec::Vec<&str> = report.failures().map(|c| c.name).collect();
        assert_eq!(failing, alloc::vec!["matched-end-true-writes-per-node"]);

        // A second ResetEnd at a single node is also a violation.
        let mut stats = MoveStats::new(inst.graph().node_count());
        stats.per_node_rule[id(1).index()][RuleId::ResetEnd.index()] = 2;
        stats.total_moves = 2;
        let report = check_move_bounds(&inst, &stats, &bounds);
        assert!(!report.passed());
        assert!(report.failures().any(|c| c.name == "single-reset-end-per-node"));
        // reset-end-total (bound 2) still passes with 2 executions.
        assert!(report
            .checks
            .iter()
            .any(|c| c.name == "reset-end-total" && c.status == crate::report::CheckStatus::Pass));
    }

    #[test]
    fn zero_move_stats_pass_all_bounds() {
        let inst = chain(3);
        let bounds = theoretical_bounds(inst.graph(), inst.matching());
        let stats = MoveStats::new(inst.graph().node_count());
        assert!(check_move_bounds(&inst, &stats, &bounds).passed());
    }

    #[test]
    fn strategies_have_stable_names() {
        assert_eq!(DaemonStrategy::Synchronous.name(), "sync");
        assert_eq!(DaemonStrategy::Central(CentralPick::LowestId).name(), "central-lowest");
        assert_eq!(DaemonStrategy::Central(CentralPick::SeededRandom).name(), "central-random");
        assert_eq!(DaemonStrategy::DistributedRandom.name(), "distributed-random");
        assert_eq!(
            DaemonStrategy::Adversarial(AdversarialHeuristic::RematchChurn).name(),
            "adversarial"
        );
        assert_eq!(DaemonStrategy::Replay(alloc::vec::Vec::new()).name(), "replay");
    }

    #[test]
    fn trace_validation_catches_tampering() {
        let inst = chain(1);
        let bounds = theoretical_bounds(inst.graph(), inst.matching());
        let mut d = Daemon::new(DaemonStrategy::Synchronous, 0);
        let (trace, _) =
            run(&inst, inst.clean_configuration(), &mut d, bounds.total_moves + 1).unwrap();
        // Rewrite the first recorded rule: replay must notice.
        let mut steps = trace.steps().to_vec();
        let (u, _) = steps[0].nodes[0];
        steps[0].nodes[0] = (u, RuleId::ResetMatch);
        let tampered = Trace::from_parts(
            trace.initial().clone(),
            steps,
            trace.final_config().clone(),
            trace.outcome(),
        );
        assert!(matches!(
            tampered.validate(&inst),
            Err(TraceError::RuleMismatch { index: 0, .. })
        ));
        // Mislabeled outcome is also caught.
        let mislabeled = Trace::from_parts(
            trace.initial().clone(),
            trace.steps().to_vec(),
            trace.final_config().clone(),
            RunOutcome::LimitExceeded,
        );
        assert_eq!(mislabeled.validate(&inst).err(), Some(TraceError::OutcomeMismatch));
    }

    #[test]
    fn long_chain_converges_under_every_strategy() {
        for strategy in [
            DaemonStrategy::Synchronous,
            DaemonStrategy::Central(CentralPick::LowestId),
            DaemonStrategy::Central(CentralPick::SeededRandom),
            DaemonStrategy::DistributedRandom,
            DaemonStrategy::Adversarial(AdversarialHeuristic::RematchChurn),
        ] {
            let inst = chain(3);
            let bounds = theoretical_bounds(inst.graph(), inst.matching());
            let mut d = Daemon::new(strategy, 11);
            let (trace, stats) =
                run(&inst, inst.clean_configuration(), &mut d, bounds.total_moves + 1).unwrap();
            assert_eq!(trace.outcome(), RunOutcome::Stabilized);
            assert!(check_move_bounds(&inst, &stats, &bounds).passed());
            // Chain k=3 has maximum matching 5; the 2/3 guarantee admits
            // |M+| of 4 or 5 depending on how singles get contested.
            assert!(extract_m_plus(&inst, trace.final_config()).len() >= 4);
        }
    }

    #[test]
    fn descending_chain_also_converges() {
        let (g, m) = generate_augmenting_chain(3, IdOrder::Descending);
        let inst = Instance::new(g, m).unwrap();
        let bounds = theoretical_bounds(inst.graph(), inst.matching());
        let mut d = Daemon::new(DaemonStrategy::Adversarial(AdversarialHeuristic::RematchChurn), 2);
        let (trace, stats) =
            run(&inst, inst.clean_configuration(), &mut d, bounds.total_moves + 1).unwrap();
        assert_eq!(trace.outcome(), RunOutcome::Stabilized);
        assert!(check_move_bounds(&inst, &stats, &bounds).passed());
        assert!(extract_m_plus(&inst, trace.final_config()).len() >= 4);
    }

    #[test]
    fn random_graph_random_init_converges() {
        use rand::SeedableRng;
        let g = generate(GraphKind::Random { n: 15, p: 0.3, seed: 5 }).unwrap();
        let m = crate::graph::greedy_maximal_matching(&g);
        let inst = Instance::new(g, m).unwrap();
        let bounds = theoretical_bounds(inst.graph(), inst.matching());
        for seed in 0..20 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let c0 = inst.random_configuration(&mut rng);
            let mut d = Daemon::with_rng(DaemonStrategy::DistributedRandom, rng);
            let (trace, stats) = run(&inst, c0, &mut d, bounds.total_moves + 1).unwrap();
            assert_eq!(trace.outcome(), RunOutcome::Stabilized, "seed {seed}");
            let report = check_move_bounds(&inst, &stats, &bounds);
            assert!(report.passed(), "seed {seed}:\n{report}");
        }
    }
}
