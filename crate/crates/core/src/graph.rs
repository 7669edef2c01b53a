//! Static problem instances: simple undirected graphs, graph generators,
//! matchings, and the matched/single role partition.
//!
//! Node identifiers are dense naturals `1..=n` assigned at construction, so
//! identifier order and storage order coincide and "lowest identifier"
//! tie-breaks are plain index comparisons. Adjacency lists are kept sorted
//! ascending for the same reason.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifier of a node: a natural number in `1..=n`, unique per graph.
///
/// Identifiers double as priorities: every tie in the protocol is broken
/// towards the lowest identifier.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(u32);

impl NodeId {
    /// Wraps a raw identifier. Identifiers are 1-based; 0 is reserved for
    /// "no node" in the text formats and the model-checker encoding.
    pub fn new(id: u32) -> NodeId {
        assert!(id >= 1, "node identifiers are 1-based");
        NodeId(id)
    }

    /// The raw numeric identifier.
    pub fn get(self) -> u32 {
        self.0
    }

    /// Dense storage index of this node (`id - 1`).
    pub fn index(self) -> usize {
        (self.0 - 1) as usize
    }

    /// Inverse of [`NodeId::index`].
    pub fn from_index(ix: usize) -> NodeId {
        NodeId(ix as u32 + 1)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Errors rejected by graph construction and the generators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GraphError {
    /// An endpoint was 0 or exceeded the declared node count.
    IdOutOfRange { id: u32, n: u32 },
    /// Both endpoints of an edge are the same node.
    SelfLoop { id: u32 },
    /// The same unordered pair appeared twice in the edge list.
    DuplicateEdge { a: u32, b: u32 },
    /// A generator parameter was outside its documented domain.
    BadParameter { what: &'static str },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GraphError::IdOutOfRange { id, n } => {
                write!(f, "node id {id} out of range (graph has nodes 1..={n})")
            }
            GraphError::SelfLoop { id } => write!(f, "self-loop at node {id}"),
            GraphError::DuplicateEdge { a, b } => write!(f, "duplicate edge ({a}, {b})"),
            GraphError::BadParameter { what } => write!(f, "bad generator parameter: {what}"),
        }
    }
}

impl core::error::Error for GraphError {}

/// A finite simple undirected graph over nodes `1..=n`.
///
/// Immutable once built: the protocol never changes the topology, only the
/// per-node state on top of it.
#[derive(Clone, Debug)]
pub struct Graph {
    n: u32,
    /// Adjacency lists indexed by `NodeId::index`, each sorted ascending.
    adj: Vec<Vec<NodeId>>,
    /// Edge list with canonical `(low, high)` endpoint order, sorted.
    edges: Vec<(NodeId, NodeId)>,
    max_degree: usize,
}

impl Graph {
    /// Builds the graph on nodes `1..=n` with the given undirected edges.
    /// Nodes mentioned in no edge are isolated. Rejects out-of-range ids,
    /// self-loops, and duplicate edges.
    pub fn with_nodes(n: u32, edge_list: &[(u32, u32)]) -> Result<Graph, GraphError> {
        let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(edge_list.len());
        for &(a, b) in edge_list {
            for id in [a, b] {
                if id < 1 || id > n {
                    return Err(GraphError::IdOutOfRange { id, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop { id: a });
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            edges.push((NodeId::new(lo), NodeId::new(hi)));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge { a: w[0].0.get(), b: w[0].1.get() });
        }
        let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n as usize];
        for &(u, v) in &edges {
            adj[u.index()].push(v);
            adj[v.index()].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let max_degree = adj.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Graph { n, adj, edges, max_degree })
    }

    /// Builds a graph whose node set is `1..=max id mentioned`. Convenience
    /// for tests and literals; isolated trailing nodes need
    /// [`Graph::with_nodes`].
    pub fn from_edges(edge_list: &[(u32, u32)]) -> Result<Graph, GraphError> {
        let n = edge_list.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0);
        Graph::with_nodes(n, edge_list)
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.n as usize
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Maximum degree Δ.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// All nodes in ascending identifier order.
    pub fn nodes(&self) -> impl DoubleEndedIterator<Item = NodeId> + '_ {
        (1..=self.n).map(NodeId::new)
    }

    /// Neighbors of `u`, sorted ascending by identifier.
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[u.index()]
    }

    /// Degree of `u`.
    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u.index()].len()
    }

    /// Whether `{u, v}` is an edge.
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u.index()].binary_search(&v).is_ok()
    }

    /// Edge list in canonical `(low, high)` order, sorted ascending.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    /// True when `v` is a valid node of this graph.
    pub fn contains(&self, v: NodeId) -> bool {
        v.get() >= 1 && v.get() <= self.n
    }
}

/// Families handled by [`generate`]. Sizes are node counts; `Random` edges
/// are drawn independently with probability `p` from a seeded stream, so the
/// same parameters always yield the same graph.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphKind {
    /// Path on `n >= 1` nodes, ids 1..=n along the path.
    Path { n: u32 },
    /// Cycle on `n >= 3` nodes.
    Cycle { n: u32 },
    /// Erdős–Rényi style G(n, p) with a deterministic seed.
    Random { n: u32, p: f64, seed: u64 },
    /// Complete bipartite graph on sides of `a` and `b` nodes; the left side
    /// takes ids `1..=a`.
    CompleteBipartite { a: u32, b: u32 },
}

/// Generates a graph of the requested family.
pub fn generate(kind: GraphKind) -> Result<Graph, GraphError> {
    match kind {
        GraphKind::Path { n } => {
            if n < 1 {
                return Err(GraphError::BadParameter { what: "path needs n >= 1" });
            }
            let edges: Vec<(u32, u32)> = (1..n).map(|i| (i, i + 1)).collect();
            Graph::with_nodes(n, &edges)
        }
        GraphKind::Cycle { n } => {
            if n < 3 {
                return Err(GraphError::BadParameter { what: "cycle needs n >= 3" });
            }
            let mut edges: Vec<(u32, u32)> = (1..n).map(|i| (i, i + 1)).collect();
            edges.push((n, 1));
            Graph::with_nodes(n, &edges)
        }
        GraphKind::Random { n, p, seed } => {
            if n < 1 {
                return Err(GraphError::BadParameter { what: "random graph needs n >= 1" });
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(GraphError::BadParameter { what: "edge probability outside [0, 1]" });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for a in 1..=n {
                for b in (a + 1)..=n {
                    if rng.gen_bool(p) {
                        edges.push((a, b));
                    }
                }
            }
            Graph::with_nodes(n, &edges)
        }
        GraphKind::CompleteBipartite { a, b } => {
            if a < 1 || b < 1 {
                return Err(GraphError::BadParameter { what: "bipartite sides need a, b >= 1" });
            }
            let mut edges = Vec::with_capacity((a * b) as usize);
            for l in 1..=a {
                for r in (a + 1)..=(a + b) {
                    edges.push((l, r));
                }
            }
            Graph::with_nodes(a + b, &edges)
        }
    }
}

/// Direction in which [`generate_augmenting_chain`] assigns identifiers
/// along the chain. Both orders produce the same topology; they exercise the
/// lowest-identifier tie-breaks from opposite ends.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum IdOrder {
    Ascending,
    Descending,
}

/// Worst-case chain instance: `k` matched edges `(u_i, v_i)` interleaved
/// with `k + 1` single nodes `x_1..x_{k+1}` and connecting edges
/// `(x_i, u_i)` and `(v_i, x_{i+1})`. The result is a path on `3k + 1`
/// nodes whose fixed matching `{(u_i, v_i)}` is maximal but one edge short
/// of maximum, forcing the longest rematch cascades.
pub fn generate_augmenting_chain(k: u32, order: IdOrder) -> (Graph, Matching) {
    assert!(k >= 1, "chain needs at least one matched edge");
    let n = 3 * k + 1;
    // Identifier of the j-th node along the path (1-based position).
    let label = |pos: u32| -> u32 {
        match order {
            IdOrder::Ascending => pos,
            IdOrder::Descending => n + 1 - pos,
        }
    };
    let mut edges = Vec::with_capacity(n as usize - 1);
    for pos in 1..n {
        edges.push((label(pos), label(pos + 1)));
    }
    let graph = Graph::with_nodes(n, &edges).expect("chain edges are simple by construction");
    // Along the path the pattern is x_1 u_1 v_1 x_2 u_2 v_2 ... x_{k+1}:
    // positions 3i-1 and 3i carry the i-th matched edge.
    let matched: Vec<(NodeId, NodeId)> = (1..=k)
        .map(|i| (NodeId::new(label(3 * i - 1)), NodeId::new(label(3 * i))))
        .collect();
    let matching = Matching::new(&graph, &matched).expect("chain matching is valid by construction");
    (graph, matching)
}

/// Errors rejected by [`Matching::new`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MatchingError {
    /// A listed pair is not an edge of the graph.
    NotAnEdge { a: u32, b: u32 },
    /// A node appears in two matched edges.
    SharedEndpoint { id: u32 },
}

impl fmt::Display for MatchingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MatchingError::NotAnEdge { a, b } => write!(f, "matched pair ({a}, {b}) is not an edge"),
            MatchingError::SharedEndpoint { id } => {
                write!(f, "node {id} appears in two matched edges")
            }
        }
    }
}

impl core::error::Error for MatchingError {}

/// A matching of a fixed graph: a set of pairwise node-disjoint edges.
///
/// The protocol treats the matching as part of the instance ("matched" and
/// "single" are roles, not state), so a `Matching` is immutable and carries
/// its maximality status.
#[derive(Clone, Debug)]
pub struct Matching {
    partner: Vec<Option<NodeId>>,
    edges: Vec<(NodeId, NodeId)>,
    maximal: bool,
}

impl Matching {
    /// Validates `edge_list` as a matching of `g`.
    pub fn new(g: &Graph, edge_list: &[(NodeId, NodeId)]) -> Result<Matching, MatchingError> {
        let mut partner: Vec<Option<NodeId>> = vec![None; g.node_count()];
        let mut edges = Vec::with_capacity(edge_list.len());
        for &(a, b) in edge_list {
            if !g.contains(a) || !g.contains(b) || !g.has_edge(a, b) {
                return Err(MatchingError::NotAnEdge { a: a.get(), b: b.get() });
            }
            for id in [a, b] {
                if partner[id.index()].is_some() {
                    return Err(MatchingError::SharedEndpoint { id: id.get() });
                }
            }
            partner[a.index()] = Some(b);
            partner[b.index()] = Some(a);
            edges.push(if a < b { (a, b) } else { (b, a) });
        }
        edges.sort_unstable();
        let mut m = Matching { partner, edges, maximal: false };
        m.maximal = is_maximal(g, &m);
        Ok(m)
    }

    /// The empty matching (maximal only on edgeless graphs).
    pub fn empty(g: &Graph) -> Matching {
        Matching::new(g, &[]).expect("empty edge set is always a matching")
    }

    /// Matched partner of `u`, or `None` when `u` is single.
    pub fn partner(&self, u: NodeId) -> Option<NodeId> {
        self.partner[u.index()]
    }

    /// Matched edges in canonical sorted order.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    /// Number of matched edges.
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    /// Whether no graph edge joins two unmatched nodes (computed once at
    /// construction).
    pub fn is_maximal(&self) -> bool {
        self.maximal
    }
}

/// True when no edge of `g` has both endpoints unmatched by `m`.
pub fn is_maximal(g: &Graph, m: &Matching) -> bool {
    g.edges()
        .iter()
        .all(|&(u, v)| m.partner(u).is_some() || m.partner(v).is_some())
}

/// Greedy maximal matching: scan edges in ascending canonical order and take
/// every edge whose endpoints are still free. Deterministic, so instances
/// derived from the same graph are always identical.
pub fn greedy_maximal_matching(g: &Graph) -> Matching {
    let mut taken: Vec<bool> = vec![false; g.node_count()];
    let mut edges = Vec::new();
    for &(u, v) in g.edges() {
        if !taken[u.index()] && !taken[v.index()] {
            taken[u.index()] = true;
            taken[v.index()] = true;
            edges.push((u, v));
        }
    }
    Matching::new(g, &edges).expect("greedy picks disjoint graph edges")
}

/// The matched/single role split induced by a matching, with the counts the
/// move bounds are phrased in: μ matched nodes and σ single nodes.
#[derive(Clone, Debug)]
pub struct RolePartition {
    matched: Vec<bool>,
    mu: usize,
    sigma: usize,
}

impl RolePartition {
    /// Derives the partition of `g`'s nodes from `m`.
    pub fn new(g: &Graph, m: &Matching) -> RolePartition {
        let matched: Vec<bool> = g.nodes().map(|u| m.partner(u).is_some()).collect();
        let mu = matched.iter().filter(|&&b| b).count();
        RolePartition { mu, sigma: matched.len() - mu, matched }
    }

    /// Whether `u` is an endpoint of a matched edge.
    pub fn is_matched(&self, u: NodeId) -> bool {
        self.matched[u.index()]
    }

    /// Number of matched nodes (μ = 2|M|).
    pub fn mu(&self) -> usize {
        self.mu
    }

    /// Number of single nodes (σ).
    pub fn sigma(&self) -> usize {
        self.sigma
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_single_edge() {
        let g = Graph::from_edges(&[(1, 2)]).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.max_degree(), 1);
        assert!(g.has_edge(NodeId::new(1), NodeId::new(2)));
    }

    #[test]
    fn builds_path_with_sorted_adjacency() {
        let g = Graph::from_edges(&[(3, 4), (1, 2), (2, 3)]).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.max_degree(), 2);
        assert_eq!(g.neighbors(NodeId::new(2)), &[NodeId::new(1), NodeId::new(3)]);
        assert_eq!(g.neighbors(NodeId::new(3)), &[NodeId::new(2), NodeId::new(4)]);
        // Canonical sorted edge list regardless of input order.
        let ids: Vec<(u32, u32)> = g.edges().iter().map(|&(a, b)| (a.get(), b.get())).collect();
        assert_eq!(ids, vec![(1, 2), (2, 3), (3, 4)]);
    }

    #[test]
    fn rejects_duplicate_edge_even_reversed() {
        assert_eq!(
            Graph::from_edges(&[(1, 2), (2, 1)]).err(),
            Some(GraphError::DuplicateEdge { a: 1, b: 2 })
        );
    }

    #[test]
    fn rejects_self_loop_and_bad_ids() {
        assert_eq!(Graph::from_edges(&[(2, 2)]).err(), Some(GraphError::SelfLoop { id: 2 }));
        assert_eq!(
            Graph::with_nodes(3, &[(1, 4)]).err(),
            Some(GraphError::IdOutOfRange { id: 4, n: 3 })
        );
        assert_eq!(
            Graph::with_nodes(3, &[(0, 1)]).err(),
            Some(GraphError::IdOutOfRange { id: 0, n: 3 })
        );
    }

    #[test]
    fn generates_path_and_cycle() {
        let p = generate(GraphKind::Path { n: 4 }).unwrap();
        assert_eq!(p.node_count(), 4);
        assert_eq!(p.edge_count(), 3);
        assert_eq!(p.degree(NodeId::new(1)), 1);
        assert_eq!(p.degree(NodeId::new(2)), 2);

        let c = generate(GraphKind::Cycle { n: 3 }).unwrap();
        assert_eq!(c.node_count(), 3);
        assert_eq!(c.edge_count(), 3);
        assert!(c.nodes().all(|u| c.degree(u) == 2));
        assert!(generate(GraphKind::Cycle { n: 2 }).is_err());
    }

    #[test]
    fn random_generation_is_deterministic() {
        let a = generate(GraphKind::Random { n: 20, p: 0.3, seed: 7 }).unwrap();
        let b = generate(GraphKind::Random { n: 20, p: 0.3, seed: 7 }).unwrap();
        assert_eq!(a.edges(), b.edges());
        let c = generate(GraphKind::Random { n: 20, p: 0.3, seed: 8 }).unwrap();
        assert!(a.edges() != c.edges() || a.edge_count() == c.edge_count());
    }

    #[test]
    fn random_probability_extremes() {
        let empty = generate(GraphKind::Random { n: 6, p: 0.0, seed: 1 }).unwrap();
        assert_eq!(empty.edge_count(), 0);
        let full = generate(GraphKind::Random { n: 6, p: 1.0, seed: 1 }).unwrap();
        assert_eq!(full.edge_count(), 15);
        assert!(generate(GraphKind::Random { n: 6, p: 1.5, seed: 1 }).is_err());
    }

    #[test]
    fn complete_bipartite_shape() {
        let g = generate(GraphKind::CompleteBipartite { a: 2, b: 3 }).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.edge_count(), 6);
        assert_eq!(g.max_degree(), 3);
        assert!(!g.has_edge(NodeId::new(1), NodeId::new(2)));
        assert!(g.has_edge(NodeId::new(1), NodeId::new(3)));
    }

    #[test]
    fn chain_k1_is_p4_with_middle_edge_matched() {
        let (g, m) = generate_augmenting_chain(1, IdOrder::Ascending);
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 3);
        let ids: Vec<(u32, u32)> = m.edges().iter().map(|&(a, b)| (a.get(), b.get())).collect();
        assert_eq!(ids, vec![(2, 3)]);
        assert!(m.is_maximal());
    }

    #[test]
    fn chain_k2_counts_and_roles() {
        let (g, m) = generate_augmenting_chain(2, IdOrder::Ascending);
        assert_eq!(g.node_count(), 7);
        assert_eq!(m.size(), 2);
        let roles = RolePartition::new(&g, &m);
        assert_eq!(roles.mu(), 4);
        assert_eq!(roles.sigma(), 3);
        // Single nodes sit at chain positions 1, 4, 7.
        for x in [1u32, 4, 7] {
            assert!(!roles.is_matched(NodeId::new(x)));
        }
    }

    #[test]
    fn chain_descending_relabels_same_topology() {
        let (ga, ma) = generate_augmenting_chain(1, IdOrder::Ascending);
        let (gd, md) = generate_augmenting_chain(1, IdOrder::Descending);
        assert_eq!(ga.node_count(), gd.node_count());
        assert_eq!(ga.edge_count(), gd.edge_count());
        // Reversal maps matched edge (2,3) onto itself for k = 1.
        assert_eq!(ma.edges(), md.edges());
        // Positions of the singles flip: descending gives x_1 the largest id.
        let (gd2, md2) = generate_augmenting_chain(2, IdOrder::Descending);
        let roles = RolePartition::new(&gd2, &md2);
        for x in [7u32, 4, 1] {
            assert!(!roles.is_matched(NodeId::new(x)));
        }
    }

    #[test]
    fn greedy_on_p4_takes_outer_edges() {
        let g = generate(GraphKind::Path { n: 4 }).unwrap();
        let m = greedy_maximal_matching(&g);
        let ids: Vec<(u32, u32)> = m.edges().iter().map(|&(a, b)| (a.get(), b.get())).collect();
        assert_eq!(ids, vec![(1, 2), (3, 4)]);
        assert!(m.is_maximal());
    }

    #[test]
    fn greedy_is_maximal_on_varied_graphs() {
        for kind in [
            GraphKind::Path { n: 9 },
            GraphKind::Cycle { n: 8 },
            GraphKind::Random { n: 17, p: 0.3, seed: 3 },
            GraphKind::CompleteBipartite { a: 3, b: 4 },
        ] {
            let g = generate(kind).unwrap();
            let m = greedy_maximal_matching(&g);
            assert!(m.is_maximal());
            assert!(is_maximal(&g, &m));
        }
    }

    #[test]
    fn greedy_on_edgeless_graph_is_empty() {
        let g = Graph::with_nodes(3, &[]).unwrap();
        let m = greedy_maximal_matching(&g);
        assert_eq!(m.size(), 0);
        assert!(m.is_maximal());
        let roles = RolePartition::new(&g, &m);
        assert_eq!(roles.sigma(), 3);
    }

    #[test]
    fn maximality_check_on_p4() {
        let g = generate(GraphKind::Path { n: 4 }).unwrap();
        let mid = Matching::new(&g, &[(NodeId::new(2), NodeId::new(3))]).unwrap();
        assert!(mid.is_maximal());
        let empty = Matching::empty(&g);
        assert!(!empty.is_maximal());
        let outer =
            Matching::new(&g, &[(NodeId::new(1), NodeId::new(2)), (NodeId::new(3), NodeId::new(4))])
                .unwrap();
        assert!(outer.is_maximal());
    }

    #[test]
    fn matching_rejects_non_edges_and_shared_endpoints() {
        let g = generate(GraphKind::Path { n: 4 }).unwrap();
        let non_edge = Matching::new(&g, &[(NodeId::new(1), NodeId::new(3))]);
        assert!(matches!(non_edge, Err(MatchingError::NotAnEdge { a: 1, b: 3 })));
        let shared = Matching::new(
            &g,
            &[(NodeId::new(1), NodeId::new(2)), (NodeId::new(2), NodeId::new(3))],
        );
        assert!(matches!(shared, Err(MatchingError::SharedEndpoint { id: 2 })));
    }
}
