//! Exhaustive model checking on tiny instances: every initial
//! configuration, every daemon choice.
//!
//! The engine samples executions; this module enumerates them. For a small
//! instance the full configuration space is the product of per-node domains
//! (pointers over `N(u) ∪ {null}`, optionally plus one fixed non-neighbor
//! id to exercise the corruption-cleanup guards, and all boolean flag
//! combinations). Every configuration is a legal starting point, and from
//! each one the daemon may activate *any* nonempty subset of the eligible
//! nodes — the checker walks all of it and proves, at desk scale, what the
//! move-bound argument promises in general:
//!
//! * the transition relation is acyclic, so every maximal execution is
//!   finite and the algorithm is silent;
//! * every sink (no enabled rule) is stable and passes the structural and
//!   approximation oracles;
//! * the longest moves-weighted execution stays within the theoretical
//!   total-move bound.
//!
//! Configurations are ranked densely by mixed-radix encoding over the
//! per-node domains, so the space lives in flat arrays instead of hash
//! tables, and a transition is a handful of integer operations (each
//! activated node's rule strictly changes that node's local state, so
//! distinct activation subsets always produce distinct successors — no
//! deduplication is needed).
//!
//! Two caps guard against runaway instances, both against the same
//! configured transition budget: enumeration refuses upfront when the
//! conservative estimate `#configs × (2^n − 1)` exceeds it, and
//! exploration refuses upfront on the configuration count, then aborts
//! mid-run if the *actual* transition count overruns the budget.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::daemon::theoretical_bounds;
use crate::graph::NodeId;
use crate::oracle::{verify_approximation, verify_stable_structure};
use crate::protocol::{
    apply_rule, enabled_rule, is_stable, Configuration, Instance, NodeState,
};
use crate::report::VerificationReport;

/// Default budget for one model-checking run, in daemon transitions.
pub const DEFAULT_TRANSITION_CAP: u64 = 50_000_000;

/// Pointer domains for enumeration.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum PointerDomain {
    /// `N(u) ∪ {null}` — every value a run of the protocol itself can
    /// write.
    Neighbors,
    /// Additionally one fixed non-neighbor id per node (the lowest node id
    /// outside `N(u) ∪ {u}`, when the graph has one): an arbitrarily
    /// corrupted pointer that the cleanup rules must recover from. Nodes
    /// adjacent to everything else keep the plain neighbor domain.
    NeighborsPlusForeign,
}

impl PointerDomain {
    pub fn name(self) -> &'static str {
        match self {
            PointerDomain::Neighbors => "neighbors",
            PointerDomain::NeighborsPlusForeign => "neighbors-plus-foreign",
        }
    }
}

/// Refusals and failures of the model checker.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum McError {
    /// More nodes than the dense bitmask representation supports.
    TooManyNodes { nodes: usize, limit: usize },
    /// The upfront size estimate exceeds the transition budget.
    EstimateExceedsCap { configs: u128, estimated_transitions: u128, cap: u64 },
    /// The actual transition count overran the budget mid-exploration;
    /// partial results are refused, not returned.
    TransitionCapHit { configs_reached: u64, transitions: u64, cap: u64 },
    /// An initial configuration holds a pointer outside the enumeration
    /// domain (for example a non-neighbor id under the plain neighbor
    /// domain).
    OutsideDomain { id: u32 },
}

impl fmt::Display for McError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            McError::TooManyNodes { nodes, limit } => {
                write!(f, "instance has {nodes} nodes, model checker handles at most {limit}")
            }
            McError::EstimateExceedsCap { configs, estimated_transitions, cap } => write!(
                f,
                "estimated {estimated_transitions} transitions over {configs} configurations \
                 exceed the cap of {cap}"
            ),
            McError::TransitionCapHit { configs_reached, transitions, cap } => write!(
                f,
                "exploration hit the transition cap of {cap} ({transitions} transitions, \
                 {configs_reached} configurations reached); partial results refused"
            ),
            McError::OutsideDomain { id } => {
                write!(f, "initial configuration holds pointer {id} outside the enumeration domain")
            }
        }
    }
}

/// Most nodes an instance may have: eligibility sets are `u32` bitmasks.
pub const MAX_MC_NODES: usize = 32;

/// Dense bijection between configurations and ranks `0..config_count()`.
///
/// Per node the pointer domain is listed null-first then ascending, and a
/// node's local state becomes one digit of a mixed-radix number (node 1 is
/// the least significant digit, so rank 0 is the clean configuration).
pub struct StateIndex {
    /// Per-node pointer domain (shared by `p`, `alpha`, `beta`).
    domains: Vec<Vec<Option<NodeId>>>,
    matched: Vec<bool>,
    /// Per-node local-state count.
    radix: Vec<u64>,
    /// Stride of each node's digit; empty when the product overflows u64
    /// (such an index can still report its size but never rank anything —
    /// all explorers refuse it upfront).
    stride: Vec<u64>,
    total: u128,
}

impl fmt::Debug for StateIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateIndex")
            .field("nodes", &self.domains.len())
            .field("configs", &self.total)
            .finish_non_exhaustive()
    }
}

impl StateIndex {
    pub fn new(inst: &Instance, domain: PointerDomain) -> Result<StateIndex, McError> {
        let g = inst.graph();
        let n = g.node_count();
        if n > MAX_MC_NODES {
            return Err(McError::TooManyNodes { nodes: n, limit: MAX_MC_NODES });
        }
        let mut domains = Vec::with_capacity(n);
        let mut matched = Vec::with_capacity(n);
        let mut radix = Vec::with_capacity(n);
        let mut total: u128 = 1;
        for u in g.nodes() {
            let mut values: Vec<Option<NodeId>> = Vec::with_capacity(g.degree(u) + 2);
            values.push(None);
            values.extend(g.neighbors(u).iter().map(|&w| Some(w)));
            if domain == PointerDomain::NeighborsPlusForeign {
                let foreign = g
                    .nodes()
                    .find(|&w| w != u && !g.has_edge(u, w));
                if let Some(w) = foreign {
                    values.push(Some(w));
                }
            }
            let d = values.len() as u64;
            let is_matched = inst.roles().is_matched(u);
            let states = if is_matched { d * d * d * 4 } else { d * 2 };
            total = total.saturating_mul(states as u128);
            domains.push(values);
            matched.push(is_matched);
            radix.push(states);
        }
        let stride = if total <= u64::MAX as u128 {
            let mut s = Vec::with_capacity(n);
            let mut acc: u64 = 1;
            for &r in &radix {
                s.push(acc);
                acc = acc.saturating_mul(r);
            }
            s
        } else {
            Vec::new()
        };
        Ok(StateIndex { domains, matched, radix, stride, total })
    }

    /// Size of the full product space.
    pub fn config_count(&self) -> u128 {
        self.total
    }

    /// The pointer domain enumerated for node `u`, null first.
    pub fn pointer_domain(&self, u: NodeId) -> &[Option<NodeId>] {
        &self.domains[u.index()]
    }

    fn node_count(&self) -> usize {
        self.domains.len()
    }

    fn pointer_index(&self, u: usize, value: Option<NodeId>) -> Option<u64> {
        self.domains[u].iter().position(|&v| v == value).map(|i| i as u64)
    }

    /// The mixed-radix digit of one node's local state, if it lies inside
    /// the node's domain.
    fn state_digit(&self, u: usize, st: &NodeState) -> Option<u64> {
        let d = self.domains[u].len() as u64;
        match st {
            NodeState::Single(s) => {
                let p = self.pointer_index(u, s.p)?;
                Some(p * 2 + s.end as u64)
            }
            NodeState::Matched(m) => {
                let p = self.pointer_index(u, m.p)?;
                let a = self.pointer_index(u, m.alpha)?;
                let b = self.pointer_index(u, m.beta)?;
                Some(((p * d + a) * d + b) * 4 + (m.s as u64) * 2 + m.end as u64)
            }
        }
    }

    fn digit_state(&self, u: usize, digit: u64) -> NodeState {
        let d = self.domains[u].len() as u64;
        if self.matched[u] {
            let flags = digit % 4;
            let rest = digit / 4;
            let b = self.domains[u][(rest % d) as usize];
            let rest = rest / d;
            let a = self.domains[u][(rest % d) as usize];
            let p = self.domains[u][(rest / d) as usize];
            NodeState::matched(p, a, b, flags & 2 != 0, flags & 1 != 0)
        } else {
            NodeState::single(self.domains[u][(digit / 2) as usize], digit % 2 != 0)
        }
    }

    /// Rank of a configuration, when every field lies inside its domain.
    pub fn encode(&self, c: &Configuration) -> Option<u64> {
        debug_assert!(!self.stride.is_empty(), "index too large to rank");
        let mut rank: u64 = 0;
        for (u, st) in c.states().iter().enumerate() {
            rank += self.state_digit(u, st)? * self.stride[u];
        }
        Some(rank)
    }

    /// The configuration at `rank`.
    pub fn decode(&self, rank: u64) -> Configuration {
        debug_assert!(!self.stride.is_empty(), "index too large to rank");
        let states = (0..self.node_count())
            .map(|u| self.digit_state(u, (rank / self.stride[u]) % self.radix[u]))
            .collect();
        Configuration::from_raw_states(states)
    }

    fn digit_at(&self, rank: u64, u: usize) -> u64 {
        (rank / self.stride[u]) % self.radix[u]
    }
}

/// The eligibility mask of `c` plus, per eligible node, the signed rank
/// offset its rule application contributes.
fn node_deltas(
    inst: &Instance,
    index: &StateIndex,
    rank: u64,
    c: &Configuration,
) -> (u32, Vec<(u32, i128)>) {
    let mut mask = 0u32;
    let mut deltas = Vec::new();
    for u in inst.graph().nodes() {
        let Some(rule) = enabled_rule(inst, c, u) else { continue };
        let ix = u.index();
        mask |= 1 << ix;
        let next = apply_rule(inst, c, u, rule);
        let digit = index
            .state_digit(ix, &next)
            .expect("rules only write null or neighbor ids, which every domain contains");
        let old = index.digit_at(rank, ix);
        debug_assert_ne!(digit, old, "a rule application must change the node's state");
        let stride = index.stride[ix] as i128;
        deltas.push((1 << ix, (digit as i128 - old as i128) * stride));
    }
    (mask, deltas)
}

/// Successor rank for one activation subset, by digit arithmetic.
fn subset_successor(rank: u64, subset: u32, deltas: &[(u32, i128)]) -> u64 {
    let mut r = rank as i128;
    for &(bit, delta) in deltas {
        if subset & bit != 0 {
            r += delta;
        }
    }
    r as u64
}

/// All initial configurations of an instance under a pointer domain,
/// refused upfront when the conservative transition estimate
/// `#configs × (2^n − 1)` exceeds `cap`.
#[derive(Debug)]
pub struct ConfigEnumeration {
    index: StateIndex,
}

impl ConfigEnumeration {
    pub fn count(&self) -> u128 {
        self.index.config_count()
    }

    pub fn iter(&self) -> impl Iterator<Item = Configuration> + '_ {
        (0..self.count() as u64).map(|r| self.index.decode(r))
    }

    pub fn index(&self) -> &StateIndex {
        &self.index
    }
}

/// Builds the full initial-configuration enumeration, or refuses with the
/// size estimate.
pub fn enumerate_initial_configurations(
    inst: &Instance,
    domain: PointerDomain,
    cap: u64,
) -> Result<ConfigEnumeration, McError> {
    let index = StateIndex::new(inst, domain)?;
    let configs = index.config_count();
    let subsets = (1u128 << inst.graph().node_count()) - 1;
    let estimated = configs.saturating_mul(subsets);
    if estimated > cap as u128 {
        return Err(McError::EstimateExceedsCap { configs, estimated_transitions: estimated, cap });
    }
    Ok(ConfigEnumeration { index })
}

enum InitialRanks {
    All(u64),
    Listed(Vec<u64>),
}

/// The reachable portion of the configuration space under every daemon
/// choice, with the transition relation kept intensionally: successor sets
/// are recomputed from the protocol on demand (they are a few integer
/// operations each), only reachability, eligibility masks, and sinks are
/// stored.
pub struct StateSpace {
    index: StateIndex,
    reached: Vec<bool>,
    masks: Vec<u32>,
    initial: InitialRanks,
    reached_count: u64,
    transitions: u64,
    sinks: Vec<u64>,
}

impl fmt::Debug for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateSpace")
            .field("reached", &self.reached_count)
            .field("transitions", &self.transitions)
            .field("sinks", &self.sinks.len())
            .finish_non_exhaustive()
    }
}

impl StateSpace {
    pub fn index(&self) -> &StateIndex {
        &self.index
    }

    /// Full product-space size (reachable or not).
    pub fn config_count(&self) -> u128 {
        self.index.config_count()
    }

    /// Configurations actually reached from the initial set.
    pub fn reached_count(&self) -> u64 {
        self.reached_count
    }

    /// Exact number of daemon transitions (one per nonempty eligible
    /// subset of every reached configuration).
    pub fn transition_count(&self) -> u64 {
        self.transitions
    }

    /// Ranks of the reached stable configurations, ascending.
    pub fn sink_ranks(&self) -> &[u64] {
        &self.sinks
    }

    pub fn initial_count(&self) -> u64 {
        match &self.initial {
            InitialRanks::All(total) => *total,
            InitialRanks::Listed(v) => v.len() as u64,
        }
    }

    fn initial_iter(&self) -> impl Iterator<Item = u64> + '_ {
        let (all, listed) = match &self.initial {
            InitialRanks::All(total) => (Some(0..*total), None),
            InitialRanks::Listed(v) => (None, Some(v.iter().copied())),
        };
        all.into_iter().flatten().chain(listed.into_iter().flatten())
    }

    pub fn is_reached(&self, rank: u64) -> bool {
        self.reached[rank as usize]
    }

    pub fn eligible_mask(&self, rank: u64) -> u32 {
        self.masks[rank as usize]
    }

    /// The outgoing transitions of a reached configuration: every nonempty
    /// subset of its eligibility mask with the successor's rank.
    pub fn successors(&self, inst: &Instance, rank: u64) -> Vec<(u32, u64)> {
        let c = self.index.decode(rank);
        let (mask, deltas) = node_deltas(inst, &self.index, rank, &c);
        debug_assert_eq!(mask, self.masks[rank as usize]);
        let mut out = Vec::new();
        if mask == 0 {
            return out;
        }
        let mut subset = mask;
        loop {
            out.push((subset, subset_successor(rank, subset, &deltas)));
            subset = (subset - 1) & mask;
            if subset == 0 {
                break;
            }
        }
        out
    }
}

/// Explores from every configuration of the product space.
pub fn explore_all(
    inst: &Instance,
    domain: PointerDomain,
    cap: u64,
) -> Result<StateSpace, McError> {
    let index = StateIndex::new(inst, domain)?;
    explore(inst, index, cap, None)
}

/// Explores from an explicit initial set (still bounded by the same cap).
pub fn explore_from(
    inst: &Instance,
    domain: PointerDomain,
    cap: u64,
    initials: &[Configuration],
) -> Result<StateSpace, McError> {
    let index = StateIndex::new(inst, domain)?;
    let mut ranks = Vec::with_capacity(initials.len());
    for c in initials {
        match index.encode(c) {
            Some(r) => ranks.push(r),
            None => {
                let id = c
                    .states()
                    .iter()
                    .enumerate()
                    .find(|(u, st)| index.state_digit(*u, st).is_none())
                    .and_then(|(_, st)| match st {
                        NodeState::Single(s) => s.p,
                        NodeState::Matched(m) => m.p.or(m.alpha).or(m.beta),
                    })
                    .map_or(0, |w| w.get());
                return Err(McError::OutsideDomain { id });
            }
        }
    }
    explore(inst, index, cap, Some(ranks))
}

fn explore(
    inst: &Instance,
    index: StateIndex,
    cap: u64,
    initials: Option<Vec<u64>>,
) -> Result<StateSpace, McError> {
    let configs = index.config_count();
    if configs > cap as u128 {
        let subsets = (1u128 << inst.graph().node_count()) - 1;
        return Err(McError::EstimateExceedsCap {
            configs,
            estimated_transitions: configs.saturating_mul(subsets),
            cap,
        });
    }
    let total = configs as u64;
    let mut reached = vec![false; total as usize];
    let mut masks = vec![0u32; total as usize];
    let mut stack: Vec<u64> = Vec::new();
    let initial = match initials {
        None => {
            stack.extend(0..total);
            for r in reached.iter_mut() {
                *r = true;
            }
            InitialRanks::All(total)
        }
        Some(ranks) => {
            for &r in &ranks {
                if !reached[r as usize] {
                    reached[r as usize] = true;
                    stack.push(r);
                }
            }
            InitialRanks::Listed(ranks)
        }
    };
    let mut reached_count = stack.len() as u64;
    let mut transitions: u64 = 0;

    while let Some(rank) = stack.pop() {
        let c = index.decode(rank);
        let (mask, deltas) = node_deltas(inst, &index, rank, &c);
        masks[rank as usize] = mask;
        if mask == 0 {
            continue;
        }
        let k = mask.count_ones();
        transitions += (1u64 << k) - 1;
        if transitions > cap {
            return Err(McError::TransitionCapHit {
                configs_reached: reached_count,
                transitions,
                cap,
            });
        }
        let mut subset = mask;
        loop {
            let succ = subset_successor(rank, subset, &deltas);
            if !reached[succ as usize] {
                reached[succ as usize] = true;
                reached_count += 1;
                stack.push(succ);
            }
            subset = (subset - 1) & mask;
            if subset == 0 {
                break;
            }
        }
    }

    let sinks: Vec<u64> =
        (0..total).filter(|&r| reached[r as usize] && masks[r as usize] == 0).collect();
    Ok(StateSpace { index, reached, masks, initial, reached_count, transitions, sinks })
}

/// Everything one model-checking run proves, plus the raw numbers for
/// summary tables.
pub struct ModelCheckSummary {
    /// Configurations reached.
    pub configs: u64,
    /// Exact daemon transitions explored.
    pub transitions: u64,
    /// Stable sinks found.
    pub sinks: u64,
    /// Moves along the longest maximal execution.
    pub longest_moves: u64,
    /// Theoretical total-move bound for this instance.
    pub bound: u64,
    pub report: VerificationReport,
}

impl ModelCheckSummary {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

/// Proves silence and closure over an explored state space:
///
/// * `mc-acyclic` — no cycle among reached configurations, so every
///   maximal execution terminates;
/// * `mc-subset-complete` — every reached configuration with `k` eligible
///   nodes has exactly `2^k − 1` distinct successors;
/// * `mc-sinks-stable` — every sink has no enabled rule (recomputed);
/// * `mc-sink-structure` — every sink passes the structural oracle;
/// * `mc-sink-approximation` — every sink passes the approximation oracle;
/// * `mc-longest-path` — the moves-weighted longest execution (edge
///   weight = activation-set size, matching the move-count definition) is
///   within the theoretical total-move bound.
pub fn verify_silence_and_closure(inst: &Instance, space: &StateSpace) -> ModelCheckSummary {
    let total = space.config_count() as usize;
    let bound = theoretical_bounds(inst.graph(), inst.matching()).total_moves;
    let mut report = VerificationReport::new();

    // Tri-color depth-first search from every initial configuration,
    // computing the moves-weighted longest path on the way. A gray-to-gray
    // edge is a cycle: an infinite execution, which falsifies silence.
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    let mut color = vec![WHITE; total];
    let mut longest = vec![0u64; total];
    let mut cycle: Option<String> = None;
    let mut subset_bad: Option<String> = None;
    let mut max_longest: u64 = 0;

    struct Frame {
        rank: u64,
        succ: Vec<(u32, u64)>,
        next: usize,
        entry_weight: u64,
        acc: u64,
    }

    let mut stack: Vec<Frame> = Vec::new();
    'roots: for root in space.initial_iter() {
        if color[root as usize] != WHITE {
            continue;
        }
        color[root as usize] = GRAY;
        let succ = space.successors(inst, root);
        if let Some(w) = check_subsets(space, root, &succ) {
            subset_bad.get_or_insert(w);
        }
        stack.push(Frame { rank: root, succ, next: 0, entry_weight: 0, acc: 0 });
        while let Some(top) = stack.last_mut() {
            if top.next < top.succ.len() {
                let (subset, succ_rank) = top.succ[top.next];
                top.next += 1;
                let weight = u64::from(subset.count_ones());
                match color[succ_rank as usize] {
                    WHITE => {
                        color[succ_rank as usize] = GRAY;
                        let succ = space.successors(inst, succ_rank);
                        if let Some(w) = check_subsets(space, succ_rank, &succ) {
                            subset_bad.get_or_insert(w);
                        }
                        stack.push(Frame {
                            rank: succ_rank,
                            succ,
                            next: 0,
                            entry_weight: weight,
                            acc: 0,
                        });
                    }
                    GRAY => {
                        let mut ranks: Vec<u64> =
                            stack.iter().map(|f| f.rank).collect();
                        let from = ranks
                            .iter()
                            .position(|&r| r == succ_rank)
                            .unwrap_or(0);
                        ranks.drain(..from);
                        ranks.truncate(6);
                        cycle = Some(format!(
                            "cycle through configurations {ranks:?} (an infinite execution)"
                        ));
                        stack.clear();
                        break 'roots;
                    }
                    _ => {
                        let candidate = weight + longest[succ_rank as usize];
                        top.acc = top.acc.max(candidate);
                    }
                }
            } else {
                let done = stack.pop().expect("frame present");
                color[done.rank as usize] = BLACK;
                longest[done.rank as usize] = done.acc;
                max_longest = max_longest.max(done.acc);
                if let Some(parent) = stack.last_mut() {
                    parent.acc = parent.acc.max(done.entry_weight + done.acc);
                }
            }
        }
    }

    match &cycle {
        None => report.pass(
            "mc-acyclic",
            format!(
                "{} configurations, {} transitions, no cycle",
                space.reached_count(),
                space.transition_count()
            ),
        ),
        Some(w) => report.fail("mc-acyclic", w.clone()),
    }
    match &subset_bad {
        None => report.pass(
            "mc-subset-complete",
            String::from("2^k - 1 distinct successors at every configuration"),
        ),
        Some(w) => report.fail("mc-subset-complete", w.clone()),
    }

    let mut unstable_sink = None;
    for &s in space.sink_ranks() {
        let c = space.index().decode(s);
        if !is_stable(inst, &c) {
            unstable_sink = Some(s);
            break;
        }
    }
    match unstable_sink {
        None => report.pass(
            "mc-sinks-stable",
            format!("{} sinks, all stable (stability recomputed)", space.sink_ranks().len()),
        ),
        Some(s) => report.fail("mc-sinks-stable", format!("sink {s} has an enabled rule")),
    }

    if unstable_sink.is_none() {
        let mut structure_bad = None;
        let mut approx_bad = None;
        for &s in space.sink_ranks() {
            let c = space.index().decode(s);
            let structure = verify_stable_structure(inst, &c);
            if !structure.passed() && structure_bad.is_none() {
                let first = structure.failures().next().expect("failing report has a failure");
                structure_bad = Some(format!("sink {s}: {} — {}", first.name, first.witness));
            }
            let approx = verify_approximation(inst, &c);
            if !approx.passed() && approx_bad.is_none() {
                let first = approx.failures().next().expect("failing report has a failure");
                approx_bad = Some(format!("sink {s}: {} — {}", first.name, first.witness));
            }
        }
        match structure_bad {
            None => report.pass(
                "mc-sink-structure",
                format!("{} sinks pass the structural oracle", space.sink_ranks().len()),
            ),
            Some(w) => report.fail("mc-sink-structure", w),
        }
        match approx_bad {
            None => report.pass(
                "mc-sink-approximation",
                format!("{} sinks pass the approximation oracle", space.sink_ranks().len()),
            ),
            Some(w) => report.fail("mc-sink-approximation", w),
        }
    } else {
        let w = String::from("not evaluated: an unstable sink was found");
        report.fail("mc-sink-structure", w.clone());
        report.fail("mc-sink-approximation", w);
    }

    if cycle.is_none() {
        if max_longest <= bound {
            report.pass(
                "mc-longest-path",
                format!("longest maximal execution = {max_longest} moves <= bound {bound}"),
            );
        } else {
            report.fail(
                "mc-longest-path",
                format!("longest maximal execution = {max_longest} moves > bound {bound}"),
            );
        }
    } else {
        report.skip("mc-longest-path", String::from("not evaluated: cycle present"));
    }

    ModelCheckSummary {
        configs: space.reached_count(),
        transitions: space.transition_count(),
        sinks: space.sink_ranks().len() as u64,
        longest_moves: max_longest,
        bound,
        report,
    }
}

/// `None` when `succ` holds exactly `2^k − 1` pairwise distinct successor
/// ranks, a failure witness otherwise.
fn check_subsets(space: &StateSpace, rank: u64, succ: &[(u32, u64)]) -> Option<String> {
    let k = space.eligible_mask(rank).count_ones();
    let expected = (1usize << k) - 1;
    if succ.len() != expected {
        return Some(format!(
            "configuration {rank}: {} successors, expected {expected}",
            succ.len()
        ));
    }
    let mut ranks: Vec<u64> = succ.iter().map(|&(_, r)| r).collect();
    ranks.sort_unstable();
    ranks.dedup();
    if ranks.len() != expected {
        return Some(format!("configuration {rank}: duplicate successors"));
    }
    None
}
