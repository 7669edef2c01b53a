//! The self-stabilizing matching protocol: per-node state, guards,
//! commands, and daemon transitions.
//!
//! Every node runs one of two programs depending on its fixed role:
//!
//! * **single** nodes (unmatched) hold a pointer `p` and a flag `end`; their
//!   three rules (`ResetEnd` > `UpdateP` > `UpdateEnd`) accept or clean up
//!   rematch proposals from matched neighbors.
//! * **matched** nodes hold `p`, two proposal slots `alpha`/`beta`, and
//!   flags `s`/`end`; their four rules (`Update` > `MatchFirst` >
//!   `MatchSecond` > `ResetMatch`) negotiate with the partner which two
//!   single neighbors to drag into the improved matching `M+`.
//!
//! Rules are prioritized per role: a node's enabled rule is the first of
//! its program whose guard holds. A daemon transition activates a nonempty
//! set of enabled nodes simultaneously; every command reads the pre-step
//! configuration (the one exception is `MatchSecond`, whose `s := end`
//! assignment reads the `end` value written one line earlier, making
//! `s` equal to the freshly computed `end`).
//!
//! Identifier comparisons treat `null` as greater than every identifier, so
//! "lowest" always prefers a real node and a lone proposal lives in `alpha`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::graph::{Graph, Matching, NodeId, RolePartition};

/// A fixed problem instance: the graph plus the underlying maximal matching
/// and the role partition it induces. Protocol state lives outside, in
/// [`Configuration`].
#[derive(Clone, Debug)]
pub struct Instance {
    graph: Graph,
    matching: Matching,
    roles: RolePartition,
}

/// Errors raised when assembling instances or configurations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ProtocolError {
    /// The protocol is only defined on maximal matchings.
    MatchingNotMaximal,
    /// A state vector had the wrong length for the instance.
    WrongStateCount { expected: usize, got: usize },
    /// A state's single/matched shape contradicts the node's role.
    RoleMismatch { id: u32 },
    /// A pointer mentions an identifier outside `1..=n`.
    PointerOutOfRange { id: u32, value: u32 },
}

impl fmt::Display for ProtocolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ProtocolError::MatchingNotMaximal => {
                f.write_str("underlying matching must be maximal")
            }
            ProtocolError::WrongStateCount { expected, got } => {
                write!(f, "expected {expected} node states, got {got}")
            }
            ProtocolError::RoleMismatch { id } => {
                write!(f, "state shape of node {id} contradicts its matched/single role")
            }
            ProtocolError::PointerOutOfRange { id, value } => {
                write!(f, "node {id} points at {value}, which is not a node")
            }
        }
    }
}

impl core::error::Error for ProtocolError {}

impl Instance {
    /// Bundles a graph with a maximal matching.
    pub fn new(graph: Graph, matching: Matching) -> Result<Instance, ProtocolError> {
        if !matching.is_maximal() {
            return Err(ProtocolError::MatchingNotMaximal);
        }
        let roles = RolePartition::new(&graph, &matching);
        Ok(Instance { graph, matching, roles })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn matching(&self) -> &Matching {
        &self.matching
    }

    pub fn roles(&self) -> &RolePartition {
        &self.roles
    }

    /// Matched partner of `u`; panics when `u` is single (role contract).
    pub fn partner(&self, u: NodeId) -> NodeId {
        self.matching.partner(u).expect("partner() requires a matched node")
    }

    /// Stable 64-bit digest of the topology plus matching, used to tie
    /// exported traces to the instance they were recorded on.
    pub fn fingerprint(&self) -> u64 {
        let mut d = crate::digest::Fnv1a::new();
        d.write_u32(self.graph.node_count() as u32);
        for &(a, b) in self.graph.edges() {
            d.write_u32(a.get());
            d.write_u32(b.get());
        }
        d.write_u32(u32::MAX); // separator
        for &(a, b) in self.matching.edges() {
            d.write_u32(a.get());
            d.write_u32(b.get());
        }
        d.finish()
    }

    /// The configuration with every pointer `null` and every flag `false`.
    pub fn clean_configuration(&self) -> Configuration {
        let states = self
            .graph
            .nodes()
            .map(|u| {
                if self.roles.is_matched(u) {
                    NodeState::matched(None, None, None, false, false)
                } else {
                    NodeState::single(None, false)
                }
            })
            .collect();
        Configuration { states }
    }

    /// A uniformly random configuration: every pointer ranges over all `n`
    /// identifiers plus `null` (self-stabilization starts from arbitrary
    /// corruption, so pointers are not restricted to neighbors), and every
    /// flag is a fair coin. Field order per node is fixed (`p`, `alpha`,
    /// `beta`, `s`, `end`) so a given seed always produces the same
    /// configuration.
    pub fn random_configuration<R: Rng>(&self, rng: &mut R) -> Configuration {
        let n = self.graph.node_count() as u32;
        let pick = |rng: &mut R| -> Option<NodeId> {
            let v = rng.gen_range(0..=n);
            (v != 0).then(|| NodeId::new(v))
        };
        let states = self
            .graph
            .nodes()
            .map(|u| {
                if self.roles.is_matched(u) {
                    let p = pick(rng);
                    let alpha = pick(rng);
                    let beta = pick(rng);
                    let s = rng.gen_bool(0.5);
                    let end = rng.gen_bool(0.5);
                    NodeState::matched(p, alpha, beta, s, end)
                } else {
                    let p = pick(rng);
                    let end = rng.gen_bool(0.5);
                    NodeState::single(p, end)
                }
            })
            .collect();
        Configuration { states }
    }

    /// Wraps explicit per-node states (index = id - 1) after checking them
    /// against the instance: right count, right role shapes, pointers inside
    /// `1..=n`.
    pub fn configuration_from_states(
        &self,
        states: Vec<NodeState>,
    ) -> Result<Configuration, ProtocolError> {
        let n = self.graph.node_count();
        if states.len() != n {
            return Err(ProtocolError::WrongStateCount { expected: n, got: states.len() });
        }
        for (ix, st) in states.iter().enumerate() {
            let u = NodeId::from_index(ix);
            let (is_matched_shape, pointers) = match st {
                NodeState::Single(s) => (false, [s.p, None, None]),
                NodeState::Matched(m) => (true, [m.p, m.alpha, m.beta]),
            };
            if is_matched_shape != self.roles.is_matched(u) {
                return Err(ProtocolError::RoleMismatch { id: u.get() });
            }
            for ptr in pointers.into_iter().flatten() {
                if !self.graph.contains(ptr) {
                    return Err(ProtocolError::PointerOutOfRange { id: u.get(), value: ptr.get() });
                }
            }
        }
        Ok(Configuration { states })
    }
}

/// State of a single (unmatched) node.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct SingleState {
    /// The matched neighbor this node has accepted, if any.
    pub p: Option<NodeId>,
    /// Termination echo: set when the accepted partner reported `end`.
    pub end: bool,
}

/// State of a matched node.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct MatchedState {
    /// The single neighbor this node currently asks or holds, if any.
    pub p: Option<NodeId>,
    /// Best rematch candidate (lowest eligible single neighbor).
    pub alpha: Option<NodeId>,
    /// Second-best rematch candidate.
    pub beta: Option<NodeId>,
    /// Set once the first of the pair's two rematches is locked in.
    pub s: bool,
    /// Set once the pair's negotiation has fully terminated.
    pub end: bool,
}

/// Per-node protocol state; the variant must match the node's role.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub enum NodeState {
    Single(SingleState),
    Matched(MatchedState),
}

impl NodeState {
    pub fn single(p: Option<NodeId>, end: bool) -> NodeState {
        NodeState::Single(SingleState { p, end })
    }

    pub fn matched(
        p: Option<NodeId>,
        alpha: Option<NodeId>,
        beta: Option<NodeId>,
        s: bool,
        end: bool,
    ) -> NodeState {
        NodeState::Matched(MatchedState { p, alpha, beta, s, end })
    }
}

/// A full assignment of states to nodes (index = id - 1). Plain data:
/// all protocol logic lives in the free functions of this module, which
/// take the [`Instance`] alongside.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Configuration {
    states: Vec<NodeState>,
}

impl Configuration {
    pub fn state(&self, u: NodeId) -> &NodeState {
        &self.states[u.index()]
    }

    pub fn states(&self) -> &[NodeState] {
        &self.states
    }

    /// Pointer field, defined for both roles.
    pub fn p(&self, u: NodeId) -> Option<NodeId> {
        match self.states[u.index()] {
            NodeState::Single(s) => s.p,
            NodeState::Matched(m) => m.p,
        }
    }

    /// Termination flag, defined for both roles.
    pub fn end(&self, u: NodeId) -> bool {
        match self.states[u.index()] {
            NodeState::Single(s) => s.end,
            NodeState::Matched(m) => m.end,
        }
    }

    /// Matched-only accessor (role contract).
    pub fn matched_state(&self, u: NodeId) -> &MatchedState {
        match &self.states[u.index()] {
            NodeState::Matched(m) => m,
            NodeState::Single(_) => panic!("node {} is single, not matched", u.get()),
        }
    }

    /// Single-only accessor (role contract).
    pub fn single_state(&self, u: NodeId) -> &SingleState {
        match &self.states[u.index()] {
            NodeState::Single(s) => s,
            NodeState::Matched(_) => panic!("node {} is matched, not single", u.get()),
        }
    }

    pub(crate) fn set(&mut self, u: NodeId, st: NodeState) {
        self.states[u.index()] = st;
    }

    /// Crate-internal assembly from raw states; the public, validating
    /// path is [`Instance::configuration_from_states`].
    pub(crate) fn from_raw_states(states: Vec<NodeState>) -> Configuration {
        Configuration { states }
    }
}

/// The seven protocol rules. `Display` and [`RuleId::parse`] use the rule
/// names as the stable external vocabulary of trace files.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub enum RuleId {
    // Single-node program, highest priority first.
    ResetEnd,
    UpdateP,
    UpdateEnd,
    // Matched-node program, highest priority first.
    Update,
    MatchFirst,
    MatchSecond,
    ResetMatch,
}

impl RuleId {
    pub const COUNT: usize = 7;

    /// All rules, single program first, each in priority order.
    pub const ALL: [RuleId; RuleId::COUNT] = [
        RuleId::ResetEnd,
        RuleId::UpdateP,
        RuleId::UpdateEnd,
        RuleId::Update,
        RuleId::MatchFirst,
        RuleId::MatchSecond,
        RuleId::ResetMatch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::ResetEnd => "ResetEnd",
            RuleId::UpdateP => "UpdateP",
            RuleId::UpdateEnd => "UpdateEnd",
            RuleId::Update => "Update",
            RuleId::MatchFirst => "MatchFirst",
            RuleId::MatchSecond => "MatchSecond",
            RuleId::ResetMatch => "ResetMatch",
        }
    }

    pub fn parse(name: &str) -> Option<RuleId> {
        RuleId::ALL.into_iter().find(|r| r.name() == name)
    }

    /// True for the three rules of the single-node program.
    pub fn is_single_rule(self) -> bool {
        matches!(self, RuleId::ResetEnd | RuleId::UpdateP | RuleId::UpdateEnd)
    }

    /// Priority inside the node's own program (1 = highest).
    pub fn priority(self) -> u8 {
        match self {
            RuleId::ResetEnd | RuleId::Update => 1,
            RuleId::UpdateP | RuleId::MatchFirst => 2,
            RuleId::UpdateEnd | RuleId::MatchSecond => 3,
            RuleId::ResetMatch => 4,
        }
    }

    /// Dense index for per-rule counters.
    pub fn index(self) -> usize {
        match self {
            RuleId::ResetEnd => 0,
            RuleId::UpdateP => 1,
            RuleId::UpdateEnd => 2,
            RuleId::Update => 3,
            RuleId::MatchFirst => 4,
            RuleId::MatchSecond => 5,
            RuleId::ResetMatch => 6,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Lowest identifier of a collection, `None` when empty. "Lowest" is the
/// protocol's universal tie-break.
pub fn lowest<I: IntoIterator<Item = NodeId>>(ids: I) -> Option<NodeId> {
    ids.into_iter().min()
}

/// Number of distinct non-null values among the given optional identifiers.
/// Nulls never count as a value, matching the proposal-counting use in
/// [`ask_first`].
pub fn unique_count(values: &[Option<NodeId>]) -> usize {
    let mut count = 0;
    for (i, v) in values.iter().enumerate() {
        if let Some(id) = v {
            if values[..i].iter().flatten().all(|prev| prev != id) {
                count += 1;
            }
        }
    }
    count
}

/// Rank for identifier comparison with `null` greater than every node, so a
/// sorted proposal pair always packs real nodes before `null`.
fn rank(x: Option<NodeId>) -> u64 {
    match x {
        Some(id) => id.get() as u64,
        None => u64::MAX,
    }
}

/// Whether `x` is a *single neighbor or null* — the domain `S0(u)` every
/// healthy proposal and pointer of a matched node must live in.
fn in_single_neighbors_or_null(inst: &Instance, u: NodeId, x: Option<NodeId>) -> bool {
    match x {
        None => true,
        Some(z) => inst.graph().has_edge(u, z) && !inst.roles().is_matched(z),
    }
}

/// Whether the value `z` of a single node's pointer names a matched
/// neighbor (the only healthy non-null shape for singles).
fn is_matched_neighbor(inst: &Instance, u: NodeId, z: NodeId) -> bool {
    inst.graph().has_edge(u, z) && inst.roles().is_matched(z)
}

/// The two lowest single neighbors of matched `u` that are still available:
/// a single counts when it already points at `u` or has not terminated
/// (`end = false`). Returns `(lowest, second_lowest)`, padding with `None`.
pub fn best_rematch(inst: &Instance, c: &Configuration, u: NodeId) -> (Option<NodeId>, Option<NodeId>) {
    debug_assert!(inst.roles().is_matched(u), "best_rematch() requires a matched node");
    let mut first: Option<NodeId> = None;
    let mut second: Option<NodeId> = None;
    // Neighbors are sorted ascending, so the first two survivors win.
    for &x in inst.graph().neighbors(u) {
        if inst.roles().is_matched(x) {
            continue;
        }
        let st = c.single_state(x);
        if st.p == Some(u) || !st.end {
            if first.is_none() {
                first = Some(x);
            } else {
                second = Some(x);
                break;
            }
        }
    }
    (first, second)
}

/// Which of its proposals matched node `u` may claim *first*, or `None`.
///
/// The matched pair must hold at least two distinct proposals overall, and
/// exactly one endpoint wins the right to go first: the one with the
/// lower best proposal, with ties broken towards the endpoint that has no
/// second proposal, then towards the lower identifier when the partner
/// still has a second proposal to fall back on.
pub fn ask_first(inst: &Instance, c: &Configuration, u: NodeId) -> Option<NodeId> {
    debug_assert!(inst.roles().is_matched(u), "ask_first() requires a matched node");
    let v = inst.partner(u);
    let mine = c.matched_state(u);
    let theirs = c.matched_state(v);
    let (a_u, b_u) = (mine.alpha, mine.beta);
    let (a_v, b_v) = (theirs.alpha, theirs.beta);
    if a_u.is_none() || a_v.is_none() {
        return None;
    }
    if unique_count(&[a_u, b_u, a_v, b_v]) < 2 {
        return None;
    }
    let wins = rank(a_u) < rank(a_v)
        || (a_u == a_v && b_u.is_none())
        || (a_u == a_v && b_v.is_some() && u < v);
    if wins {
        a_u
    } else {
        None
    }
}

/// Which proposal matched node `u` claims *second*: defined only while the
/// partner goes first, and avoids the partner's first pick.
pub fn ask_second(inst: &Instance, c: &Configuration, u: NodeId) -> Option<NodeId> {
    debug_assert!(inst.roles().is_matched(u), "ask_second() requires a matched node");
    let v = inst.partner(u);
    if ask_first(inst, c, v).is_none() {
        return None;
    }
    let mine = c.matched_state(u);
    let partner_first = c.matched_state(v).alpha;
    lowest([mine.alpha, mine.beta].into_iter().flatten().filter(|x| Some(*x) != partner_first))
}

/// The single neighbor matched `u` currently asks, first or second.
pub fn ask(inst: &Instance, c: &Configuration, u: NodeId) -> Option<NodeId> {
    ask_first(inst, c, u).or_else(|| ask_second(inst, c, u))
}

// ---------------------------------------------------------------------------
// Guards. Each returns whether the rule fires in `c`; evaluation order
// inside a guard is significant because later conjuncts dereference
// pointers that earlier conjuncts have confirmed to be neighbors.
// ---------------------------------------------------------------------------

fn reset_end_guard(c: &Configuration, u: NodeId) -> bool {
    let st = c.single_state(u);
    st.p.is_none() && st.end
}

fn update_p_guard(inst: &Instance, c: &Configuration, u: NodeId) -> bool {
    let st = c.single_state(u);
    match st.p {
        // No pointer yet, but some matched neighbor asks for u.
        None => inst
            .graph()
            .neighbors(u)
            .iter()
            .any(|&w| inst.roles().is_matched(w) && c.p(w) == Some(u)),
        // Pointer present but corrupt (not a matched neighbor) or stale
        // (the pointed-at node does not ask back).
        Some(z) => !is_matched_neighbor(inst, u, z) || c.p(z) != Some(u),
    }
}

fn update_end_guard(inst: &Instance, c: &Configuration, u: NodeId) -> bool {
    let st = c.single_state(u);
    match st.p {
        Some(z) if is_matched_neighbor(inst, u, z) && c.p(z) == Some(u) => st.end != c.end(z),
        _ => false,
    }
}

fn update_guard(inst: &Instance, c: &Configuration, u: NodeId) -> bool {
    let st = c.matched_state(u);
    // First layer: locally visible corruption of the proposal slots or the
    // pointer — unsorted proposals, values outside single neighbors + null,
    // or a duplicated non-null proposal.
    let l1 = rank(st.alpha) > rank(st.beta)
        || !in_single_neighbors_or_null(inst, u, st.alpha)
        || !in_single_neighbors_or_null(inst, u, st.beta)
        || (st.alpha == st.beta && st.alpha.is_some())
        || !in_single_neighbors_or_null(inst, u, st.p);
    if l1 {
        return true;
    }
    // Second layer: the proposals are stale, and u is free to recompute —
    // it holds nobody, or the single it holds has moved on (points
    // elsewhere and has terminated). `st.p` is a single neighbor here.
    ((st.alpha, st.beta) != best_rematch(inst, c, u))
        && match st.p {
            None => true,
            Some(z) => c.p(z) != Some(u) && c.end(z),
        }
}

/// The `s`/`end` targets MatchFirst steers towards, computed from the
/// pre-step configuration: `s` when the handshake with the asked single is
/// complete and the partner is clear to go second; `end` when additionally
/// the partner has locked its second rematch and terminated.
fn match_first_targets(
    inst: &Instance,
    c: &Configuration,
    u: NodeId,
    asked: Option<NodeId>,
) -> (bool, bool) {
    let v = inst.partner(u);
    let st = c.matched_state(u);
    let held = st.p == asked
        && match st.p {
            Some(z) => c.p(z) == Some(u),
            None => false,
        };
    let partner_second = ask_second(inst, c, v);
    let s_target = held && (c.p(v) == partner_second || c.p(v).is_none());
    let end_target = held && st.s && c.p(v) == partner_second && c.end(v);
    (s_target, end_target)
}

fn match_first_guard(inst: &Instance, c: &Configuration, u: NodeId) -> bool {
    let asked = ask_first(inst, c, u);
    if asked.is_none() {
        return false;
    }
    let st = c.matched_state(u);
    let (s_target, end_target) = match_first_targets(inst, c, u, asked);
    st.p != asked || st.s != s_target || st.end != end_target
}

/// The `end` target MatchSecond steers towards: the handshake with the
/// asked single is complete and the partner has claimed its first rematch.
fn match_second_end_target(
    inst: &Instance,
    c: &Configuration,
    u: NodeId,
    asked: Option<NodeId>,
) -> bool {
    let v = inst.partner(u);
    let st = c.matched_state(u);
    st.p == asked
        && match st.p {
            Some(z) => c.p(z) == Some(u),
            None => false,
        }
        && c.p(v) == ask_first(inst, c, v)
}

fn match_second_guard(inst: &Instance, c: &Configuration, u: NodeId) -> bool {
    let asked = ask_second(inst, c, u);
    if asked.is_none() {
        return false;
    }
    let v = inst.partner(u);
    if !c.matched_state(v).s {
        return false;
    }
    let st = c.matched_state(u);
    let end_target = match_second_end_target(inst, c, u, asked);
    st.p != asked || st.end != end_target || st.s != st.end
}

fn reset_match_guard(inst: &Instance, c: &Configuration, u: NodeId) -> bool {
    let st = c.matched_state(u);
    let first = ask_first(inst, c, u);
    let second = ask_second(inst, c, u);
    let idle_but_dirty =
        first.is_none() && second.is_none() && (st.p.is_some() || st.s || st.end);
    let second_without_lead = second.is_some() && st.p.is_some() && {
        let v = inst.partner(u);
        !c.matched_state(v).s
    };
    idle_but_dirty || second_without_lead
}

/// The highest-priority enabled rule of `u` in `c`, or `None` when `u` has
/// nothing to do. With guards evaluated in priority order, every read stays
/// within distance one of `u` — the locality the daemon model assumes.
pub fn enabled_rule(inst: &Instance, c: &Configuration, u: NodeId) -> Option<RuleId> {
    if inst.roles().is_matched(u) {
        if update_guard(inst, c, u) {
            Some(RuleId::Update)
        } else if match_first_guard(inst, c, u) {
            Some(RuleId::MatchFirst)
        } else if match_second_guard(inst, c, u) {
            Some(RuleId::MatchSecond)
        } else if reset_match_guard(inst, c, u) {
            Some(RuleId::ResetMatch)
        } else {
            None
        }
    } else if reset_end_guard(c, u) {
        Some(RuleId::ResetEnd)
    } else if update_p_guard(inst, c, u) {
        Some(RuleId::UpdateP)
    } else if update_end_guard(inst, c, u) {
        Some(RuleId::UpdateEnd)
    } else {
        None
    }
}

/// Executes `rule`'s command for `u` against the pre-step configuration `c`
/// and returns `u`'s next state. The caller guarantees enabledness (checked
/// in debug builds); commands never read their own partial writes except
/// for `MatchSecond`'s documented `s := end` echo.
pub fn apply_rule(inst: &Instance, c: &Configuration, u: NodeId, rule: RuleId) -> NodeState {
    debug_assert_eq!(
        enabled_rule(inst, c, u),
        Some(rule),
        "apply_rule() contract: rule must be the enabled rule of node {u}",
    );
    match rule {
        RuleId::ResetEnd => {
            let st = *c.single_state(u);
            NodeState::single(st.p, false)
        }
        RuleId::UpdateP => {
            // Adopt the lowest neighbor that asks for u — taken over all
            // neighbors; with a maximal matching no single neighbor can ask,
            // so this never adopts a single node.
            let p = lowest(
                inst.graph()
                    .neighbors(u)
                    .iter()
                    .copied()
                    .filter(|&w| c.p(w) == Some(u)),
            );
            NodeState::single(p, false)
        }
        RuleId::UpdateEnd => {
            let st = *c.single_state(u);
            let z = st.p.expect("UpdateEnd requires a pointer");
            NodeState::single(st.p, c.end(z))
        }
        RuleId::Update => {
            // Recompute both proposals and reset everything else.
            let (alpha, beta) = best_rematch(inst, c, u);
            NodeState::matched(None, alpha, beta, false, false)
        }
        RuleId::MatchFirst => {
            let st = *c.matched_state(u);
            let asked = ask_first(inst, c, u);
            let (s_target, end_target) = match_first_targets(inst, c, u, asked);
            NodeState::matched(asked, st.alpha, st.beta, s_target, end_target)
        }
        RuleId::MatchSecond => {
            let st = *c.matched_state(u);
            let asked = ask_second(inst, c, u);
            let end_target = match_second_end_target(inst, c, u, asked);
            // s := end reads the freshly written end, so both become the
            // same target value.
            NodeState::matched(asked, st.alpha, st.beta, end_target, end_target)
        }
        RuleId::ResetMatch => {
            let st = *c.matched_state(u);
            NodeState::matched(None, st.alpha, st.beta, false, false)
        }
    }
}

/// Errors for invalid daemon activations handed to [`step`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StepError {
    /// The daemon must activate at least one node.
    EmptyActivation,
    /// The same node was listed twice in one activation.
    DuplicateNode { id: u32 },
    /// An identifier outside the graph.
    UnknownNode { id: u32 },
    /// A listed node has no enabled rule in the current configuration.
    NotEligible { id: u32 },
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            StepError::EmptyActivation => f.write_str("daemon activation set is empty"),
            StepError::DuplicateNode { id } => write!(f, "node {id} listed twice in activation"),
            StepError::UnknownNode { id } => write!(f, "node {id} is not in the graph"),
            StepError::NotEligible { id } => write!(f, "node {id} has no enabled rule"),
        }
    }
}

impl core::error::Error for StepError {}

/// One daemon transition: fire the enabled rule of every listed node
/// simultaneously against the pre-step configuration. Returns the successor
/// configuration and the rule each node executed (in the order listed).
pub fn step(
    inst: &Instance,
    c: &Configuration,
    nodes: &[NodeId],
) -> Result<(Configuration, Vec<RuleId>), StepError> {
    if nodes.is_empty() {
        return Err(StepError::EmptyActivation);
    }
    let mut seen = vec![false; inst.graph().node_count()];
    let mut fired = Vec::with_capacity(nodes.len());
    for &u in nodes {
        if !inst.graph().contains(u) {
            return Err(StepError::UnknownNode { id: u.get() });
        }
        if seen[u.index()] {
            return Err(StepError::DuplicateNode { id: u.get() });
        }
        seen[u.index()] = true;
        match enabled_rule(inst, c, u) {
            Some(rule) => fired.push(rule),
            None => return Err(StepError::NotEligible { id: u.get() }),
        }
    }
    let mut next = c.clone();
    for (&u, &rule) in nodes.iter().zip(&fired) {
        next.set(u, apply_rule(inst, c, u, rule));
    }
    Ok((next, fired))
}

/// The output matching `M+` read off a configuration: matched edges whose
/// endpoints both released their pointers, plus rematch edges between a
/// matched node and a single node that point at each other.
pub fn extract_m_plus(inst: &Instance, c: &Configuration) -> Vec<(NodeId, NodeId)> {
    let mut out = Vec::new();
    for &(a, b) in inst.graph().edges() {
        let in_matching = inst.matching().partner(a) == Some(b);
        let include = if in_matching {
            c.p(a).is_none() && c.p(b).is_none()
        } else {
            c.p(a) == Some(b) && c.p(b) == Some(a)
        };
        if include {
            out.push((a, b));
        }
    }
    out
}

/// A configuration is stable exactly when no node has an enabled rule; the
/// protocol is silent, so stable means terminal.
pub fn is_stable(inst: &Instance, c: &Configuration) -> bool {
    inst.graph().nodes().all(|u| enabled_rule(inst, c, u).is_none())
}

/// All nodes with an enabled rule, ascending. The daemon picks its
/// activation sets from this.
pub fn eligible_nodes(inst: &Instance, c: &Configuration) -> Vec<NodeId> {
    inst.graph().nodes().filter(|&u| enabled_rule(inst, c, u).is_some()).collect()
}
