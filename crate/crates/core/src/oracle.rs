//! Ground-truth checkers: exact maximum matching, 3-augmenting-path
//! detection, and structural validation of stable configurations.
//!
//! The protocol and engine modules compute what the algorithm *does*; this
//! module recomputes what the result *must look like* from first
//! principles, so a transcription bug cannot vouch for itself:
//!
//! * [`max_matching_exact`] and [`find_3_augmenting_paths`] read only the
//!   graph and a plain edge list — never a protocol variable.
//! * [`verify_stable_structure`] re-derives, from a stable configuration
//!   alone, the pointer shape every matched edge and every pointing single
//!   must exhibit.
//! * [`verify_approximation`] ties it together: the rematched edge set M+
//!   admits no 3-augmenting path, and its cardinality is at least two
//!   thirds of the exact optimum.
//!
//! The exact solver is deliberately capped: it refuses oversized graphs
//! instead of silently approximating, and callers degrade to the checks
//! that remain exact (path emptiness) on large instances.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Graph, NodeId};
use crate::protocol::{
    ask, ask_first, ask_second, extract_m_plus, is_stable, Configuration, Instance,
};
use crate::report::VerificationReport;

/// Largest node count the exact maximum-matching solver accepts unless the
/// caller raises the cap explicitly.
pub const DEFAULT_EXACT_CAP: usize = 20;

/// Refusals from the exact solver — it never silently approximates.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum OracleError {
    /// The graph has more nodes than the configured cap allows.
    TooLarge { nodes: usize, cap: usize },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooLarge { nodes, cap } => {
                write!(f, "graph has {nodes} nodes, above the exact-solver cap of {cap}")
            }
        }
    }
}

/// Size of a maximum matching, computed by exhaustive branch-and-bound.
///
/// Refuses graphs above [`DEFAULT_EXACT_CAP`] nodes; use
/// [`max_matching_exact_capped`] to raise the cap knowingly.
pub fn max_matching_exact(g: &Graph) -> Result<usize, OracleError> {
    max_matching_exact_capped(g, DEFAULT_EXACT_CAP)
}

/// [`max_matching_exact`] with a caller-chosen node cap.
pub fn max_matching_exact_capped(g: &Graph, cap: usize) -> Result<usize, OracleError> {
    if g.node_count() > cap {
        return Err(OracleError::TooLarge { nodes: g.node_count(), cap });
    }
    let mut free = vec![true; g.node_count()];
    let mut best = 0;
    branch_matching(g, &mut free, 0, &mut best);
    Ok(best)
}

/// Branches on the lowest-id node that is free and still has a free
/// neighbor: a maximum matching either pairs it with one of those
/// neighbors or leaves it unmatched for good. A branch is cut when even a
/// perfect pairing of the remaining free nodes cannot beat the best
/// matching found so far.
fn branch_matching(g: &Graph, free: &mut [bool], current: usize, best: &mut usize) {
    let pick = g
        .nodes()
        .find(|&u| free[u.index()] && g.neighbors(u).iter().any(|&w| free[w.index()]));
    let Some(u) = pick else {
        // No edge can be added any more: `current` edges form a maximal
        // matching of this branch.
        *best = (*best).max(current);
        return;
    };
    let free_count = free.iter().filter(|&&f| f).count();
    if current + free_count / 2 <= *best {
        return;
    }
    free[u.index()] = false;
    for &w in g.neighbors(u) {
        if free[w.index()] {
            free[w.index()] = false;
            branch_matching(g, free, current + 1, best);
            free[w.index()] = true;
        }
    }
    // Or `u` stays unmatched in the rest of this branch.
    branch_matching(g, free, current, best);
    free[u.index()] = true;
}

/// A 3-augmenting path `(x, u, v, y)`: the middle edge `(u, v)` is
/// matched, the endpoints `x` and `y` are unmatched, all four nodes are
/// distinct, and the outer edges are not in the matching. Exchanging its
/// matched and unmatched edges grows the matching by one, so a matching
/// reaches the 2/3-approximation threshold exactly when no such path
/// remains.
///
/// Canonical orientation is `x < y`, so each undirected path appears once.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct AugmentingPath3 {
    pub x: NodeId,
    pub u: NodeId,
    pub v: NodeId,
    pub y: NodeId,
}

impl AugmentingPath3 {
    pub fn nodes(self) -> [NodeId; 4] {
        [self.x, self.u, self.v, self.y]
    }
}

impl fmt::Display for AugmentingPath3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.x, self.u, self.v, self.y)
    }
}

/// All 3-augmenting paths of `g` relative to `matching`, sorted.
///
/// `matching` must be a matching on `g` (edges of `g`, pairwise disjoint);
/// violations panic, because every caller hands in either a validated
/// [`Matching`](crate::graph::Matching) or an M+ whose matching property
/// is checked separately first.
///
/// Endpoints must be unmatched: a path only counts as augmenting when
/// flipping it actually enlarges the matching. Admitting covered
/// endpoints would manufacture spurious "paths" even against a maximum
/// matching — on the 5-path 1–2–3–4–5 with matching {(2,3), (4,5)}
/// (already maximum), the walk (1, 2, 3, 4) alternates correctly but
/// augments nothing because node 4 is covered by (4,5).
pub fn find_3_augmenting_paths(
    g: &Graph,
    matching: &[(NodeId, NodeId)],
) -> Vec<AugmentingPath3> {
    let mut partner: Vec<Option<NodeId>> = vec![None; g.node_count()];
    for &(a, b) in matching {
        assert!(g.has_edge(a, b), "matching edge ({a}, {b}) is not an edge of the graph");
        assert!(
            partner[a.index()].is_none() && partner[b.index()].is_none(),
            "edge list is not a matching: ({a}, {b}) shares an endpoint with another edge",
        );
        partner[a.index()] = Some(b);
        partner[b.index()] = Some(a);
    }
    let free = |w: NodeId| partner[w.index()].is_none();

    let mut paths = Vec::new();
    for &(a, b) in matching {
        for (u, v) in [(a, b), (b, a)] {
            for &x in g.neighbors(u) {
                if !free(x) {
                    continue;
                }
                for &y in g.neighbors(v) {
                    // A free endpoint is never `u` or `v` (both are
                    // covered) and its edge into the path is never
                    // matched, so beyond freeness only endpoint
                    // distinctness needs checking; `x < y` keeps one
                    // orientation per undirected path.
                    if free(y) && x < y {
                        paths.push(AugmentingPath3 { x, u, v, y });
                    }
                }
            }
        }
    }
    paths.sort_unstable();
    paths
}

fn fmt_id(v: Option<NodeId>) -> String {
    v.map_or_else(|| String::from("null"), |w| w.to_string())
}

/// First node covered by two edges of `edges`, if any.
fn first_shared_endpoint(n: usize, edges: &[(NodeId, NodeId)]) -> Option<NodeId> {
    let mut seen = vec![false; n];
    for &(a, b) in edges {
        for w in [a, b] {
            if seen[w.index()] {
                return Some(w);
            }
            seen[w.index()] = true;
        }
    }
    None
}

fn push_outcome(
    report: &mut VerificationReport,
    name: &'static str,
    result: Result<String, String>,
) {
    match result {
        Ok(witness) => report.pass(name, witness),
        Err(witness) => report.fail(name, witness),
    }
}

/// Structural validation of a stable configuration.
///
/// Re-derives, from the configuration alone, every shape a stable
/// configuration must have, one report row each:
///
/// * `stable-matched-ask` — every matched node's pointer equals the ask
///   value it would compute right now.
/// * `stable-single-pointer` — a single pointing at `u` points at a
///   matched neighbor that points back, with agreeing `end` flags.
/// * `stable-medge-shape` — every matched edge is either untouched (both
///   pointers null) or rematched to two *distinct* single neighbors with
///   mutual pointers on both sides.
/// * `stable-single-augpath` — every pointing single sits on a completed
///   3-augmenting path (x, u, v, y) whose four pointer links are all in
///   place.
/// * `mplus-valid-matching` — the rematched edge set M+ is a matching.
/// * `mplus-cardinality` — |M+| ≥ |M|: rematching never loses edges.
///
/// Panics when the configuration is not stable — stability is the
/// precondition these shapes are consequences of.
pub fn verify_stable_structure(inst: &Instance, c: &Configuration) -> VerificationReport {
    assert!(is_stable(inst, c), "verify_stable_structure requires a stable configuration");
    let g = inst.graph();
    let roles = inst.roles();
    let mut report = VerificationReport::new();

    let mut matched_checked = 0usize;
    let mut ask_witness = Ok(String::new());
    for u in g.nodes() {
        if !roles.is_matched(u) {
            continue;
        }
        matched_checked += 1;
        let want = ask(inst, c, u);
        if c.p(u) != want {
            ask_witness =
                Err(format!("node {u}: p={}, Ask={}", fmt_id(c.p(u)), fmt_id(want)));
            break;
        }
    }
    if ask_witness.is_ok() {
        ask_witness = Ok(format!("{matched_checked} matched nodes agree with Ask"));
    }
    push_outcome(&mut report, "stable-matched-ask", ask_witness);

    let mut pointing = 0usize;
    let mut single_witness = Ok(String::new());
    for x in g.nodes() {
        if roles.is_matched(x) {
            continue;
        }
        let Some(u) = c.p(x) else { continue };
        pointing += 1;
        if !g.contains(u) || !g.has_edge(x, u) {
            single_witness = Err(format!("single {x} points at non-neighbor {u}"));
            break;
        }
        if !roles.is_matched(u) {
            single_witness = Err(format!("single {x} points at single {u}"));
            break;
        }
        if c.p(u) != Some(x) {
            single_witness =
                Err(format!("single {x} points at {u}, but p_{u}={}", fmt_id(c.p(u))));
            break;
        }
        if c.end(u) != c.end(x) {
            single_witness = Err(format!(
                "single {x} and partner {u} disagree on end: {} vs {}",
                c.end(x),
                c.end(u)
            ));
            break;
        }
    }
    if single_witness.is_ok() {
        single_witness = Ok(format!("{pointing} pointing singles have mutual links"));
    }
    push_outcome(&mut report, "stable-single-pointer", single_witness);

    let mut untouched = 0usize;
    let mut rematched = 0usize;
    let mut shape_witness = Ok(String::new());
    for &(u, v) in inst.matching().edges() {
        let shape = medge_shape_violation(inst, c, u, v);
        match shape {
            Ok(true) => rematched += 1,
            Ok(false) => untouched += 1,
            Err(w) => {
                shape_witness = Err(w);
                break;
            }
        }
    }
    if shape_witness.is_ok() {
        shape_witness = Ok(format!("{untouched} untouched, {rematched} rematched"));
    }
    push_outcome(&mut report, "stable-medge-shape", shape_witness);

    let mut on_paths = 0usize;
    let mut augpath_witness = Ok(String::new());
    for x in g.nodes() {
        if roles.is_matched(x) {
            continue;
        }
        let Some(u) = c.p(x) else { continue };
        match single_augpath_violation(inst, c, x, u) {
            Ok(()) => on_paths += 1,
            Err(w) => {
                augpath_witness = Err(w);
                break;
            }
        }
    }
    if augpath_witness.is_ok() {
        augpath_witness = Ok(format!("{on_paths} pointing singles sit on complete paths"));
    }
    push_outcome(&mut report, "stable-single-augpath", augpath_witness);

    // M+ edges are graph edges by construction (extraction scans the edge
    // list), so only disjointness needs a check here.
    let m_plus = extract_m_plus(inst, c);
    let matching_witness = match first_shared_endpoint(g.node_count(), &m_plus) {
        None => Ok(format!("{} edges, pairwise disjoint", m_plus.len())),
        Some(w) => Err(format!("node {w} is covered by two M+ edges")),
    };
    push_outcome(&mut report, "mplus-valid-matching", matching_witness);

    let m_size = inst.matching().size();
    let card_witness = if m_plus.len() >= m_size {
        Ok(format!("|M+|={} >= |M|={}", m_plus.len(), m_size))
    } else {
        Err(format!("|M+|={} < |M|={}", m_plus.len(), m_size))
    };
    push_outcome(&mut report, "mplus-cardinality", card_witness);

    report
}

/// Checks one matched edge against the stable dichotomy. `Ok(false)` means
/// untouched (both pointers null), `Ok(true)` means fully rematched.
fn medge_shape_violation(
    inst: &Instance,
    c: &Configuration,
    u: NodeId,
    v: NodeId,
) -> Result<bool, String> {
    let g = inst.graph();
    let roles = inst.roles();
    match (c.p(u), c.p(v)) {
        (None, None) => Ok(false),
        (Some(x), Some(y)) => {
            if x == y {
                return Err(format!("matched edge ({u}, {v}): both sides hold {x}"));
            }
            for (m, s) in [(u, x), (v, y)] {
                if !g.contains(s) || !g.has_edge(m, s) {
                    return Err(format!("matched edge ({u}, {v}): {m} holds non-neighbor {s}"));
                }
                if roles.is_matched(s) {
                    return Err(format!("matched edge ({u}, {v}): {m} holds matched node {s}"));
                }
                if c.p(s) != Some(m) {
                    return Err(format!(
                        "matched edge ({u}, {v}): {m} holds {s}, but p_{s}={}",
                        fmt_id(c.p(s))
                    ));
                }
            }
            Ok(true)
        }
        (p_u, p_v) => Err(format!(
            "matched edge ({u}, {v}): p_{u}={}, p_{v}={} (one-sided)",
            fmt_id(p_u),
            fmt_id(p_v)
        )),
    }
}

/// Checks that pointing single `x` (with `p_x = u`) sits on a completed
/// 3-augmenting path `(x, u, v, y)` with all four pointer links in place.
fn single_augpath_violation(
    inst: &Instance,
    c: &Configuration,
    x: NodeId,
    u: NodeId,
) -> Result<(), String> {
    let g = inst.graph();
    let roles = inst.roles();
    if !g.contains(u) || !roles.is_matched(u) {
        return Err(format!("single {x} points at {u}, which is not a matched node"));
    }
    if !g.has_edge(x, u) {
        return Err(format!("single {x} points at non-neighbor {u}"));
    }
    if c.p(u) != Some(x) {
        return Err(format!("single {x} points at {u}, but p_{u}={}", fmt_id(c.p(u))));
    }
    let v = inst.partner(u);
    let Some(y) = c.p(v) else {
        return Err(format!("single {x} holds {u}, but partner {v} holds null"));
    };
    if y == x {
        return Err(format!("single {x} is held by both {u} and {v}"));
    }
    if !g.contains(y) || roles.is_matched(y) || !g.has_edge(v, y) {
        return Err(format!("partner {v} of {u} holds {y}, not a single neighbor"));
    }
    if c.p(y) != Some(v) {
        return Err(format!("partner {v} holds {y}, but p_{y}={}", fmt_id(c.p(y))));
    }
    Ok(())
}

/// The two-thirds–approximation guarantee for a stable configuration, one
/// report row per claim:
///
/// * `approx-no-3-augmenting-path` — M+ admits no 3-augmenting path.
/// * `approx-ratio` — 3·|M+| ≥ 2·(exact maximum). Skipped with a notice
///   when the graph is above the exact-solver cap; the emptiness check
///   above still runs at every size.
///
/// Panics when the configuration is not stable.
pub fn verify_approximation(inst: &Instance, c: &Configuration) -> VerificationReport {
    verify_approximation_capped(inst, c, DEFAULT_EXACT_CAP)
}

/// [`verify_approximation`] with a caller-chosen exact-solver cap.
pub fn verify_approximation_capped(
    inst: &Instance,
    c: &Configuration,
    cap: usize,
) -> VerificationReport {
    assert!(is_stable(inst, c), "verify_approximation requires a stable configuration");
    let g = inst.graph();
    let m_plus = extract_m_plus(inst, c);
    let mut report = VerificationReport::new();

    // The path scan requires a matching; report the violation instead of
    // letting it panic.
    match first_shared_endpoint(g.node_count(), &m_plus) {
        Some(w) => report.fail(
            "approx-no-3-augmenting-path",
            format!("M+ is not a matching (node {w} covered twice); cannot scan"),
        ),
        None => {
            let paths = find_3_augmenting_paths(g, &m_plus);
            if paths.is_empty() {
                report.pass(
                    "approx-no-3-augmenting-path",
                    format!("|M+|={}, no path left", m_plus.len()),
                );
            } else {
                report.fail(
                    "approx-no-3-augmenting-path",
                    format!("{} paths left, first {}", paths.len(), paths[0]),
                );
            }
        }
    }

    match max_matching_exact_capped(g, cap) {
        Ok(optimum) => {
            let lhs = 3 * m_plus.len();
            let rhs = 2 * optimum;
            if lhs >= rhs {
                report.pass("approx-ratio", format!("3*|M+|={lhs} >= 2*max={rhs}"));
            } else {
                report.fail("approx-ratio", format!("3*|M+|={lhs} < 2*max={rhs}"));
            }
        }
        Err(e) => report.skip("approx-ratio", e.to_string()),
    }

    report
}

/// The single neighbors a matched node's best-rematch scan considers:
/// those already pointing at `u`, plus those not yet finished
/// (`end = False`). Ascending order.
pub fn cand(inst: &Instance, c: &Configuration, u: NodeId) -> Vec<NodeId> {
    assert!(inst.roles().is_matched(u), "cand is defined for matched nodes");
    inst.graph()
        .neighbors(u)
        .iter()
        .copied()
        .filter(|&x| !inst.roles().is_matched(x) && (c.p(x) == Some(u) || !c.end(x)))
        .collect()
}

/// True when the matched pair `(u, m_u)` has fully exploited a
/// 3-augmenting path and locked in: one side holds its first-ask single,
/// the other its second-ask single, both singles point back, and `s` and
/// `end` are set on both matched nodes. From such a configuration the
/// pair never moves again, regardless of what the rest of the graph does.
pub fn is_stop_configuration(inst: &Instance, c: &Configuration, u: NodeId) -> bool {
    assert!(inst.roles().is_matched(u), "stop configurations are defined for matched nodes");
    let v = inst.partner(u);
    stop_shape(inst, c, u, v) || stop_shape(inst, c, v, u)
}

/// The three stop conditions, with `first` on the first-ask side.
fn stop_shape(inst: &Instance, c: &Configuration, first: NodeId, second: NodeId) -> bool {
    let g = inst.graph();
    let (Some(x), Some(y)) = (c.p(first), c.p(second)) else {
        return false;
    };
    let single_neighbor_of =
        |w: NodeId, of: NodeId| g.contains(w) && !inst.roles().is_matched(w) && g.has_edge(of, w);
    single_neighbor_of(x, first)
        && ask_first(inst, c, first) == Some(x)
        && c.p(x) == Some(first)
        && single_neighbor_of(y, second)
        && ask_second(inst, c, second) == Some(y)
        && c.p(y) == Some(second)
        && c.matched_state(first).s
        && c.matched_state(first).end
        && c.matched_state(second).s
        && c.matched_state(second).end
}
