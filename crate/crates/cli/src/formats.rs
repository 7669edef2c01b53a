//! The text formats: graph+matching files, configuration dumps, trace
//! exports, and the delimited stats/report tables.
//!
//! Conventions shared by every format: `#` starts a comment line, blank
//! lines are ignored, fields are whitespace-separated, `-` stands for
//! null. Every writer emits a provenance header (format name and version,
//! plus the experiment-spec hash, graph fingerprint, and seed where they
//! apply) and no timestamps, so identical inputs produce byte-identical
//! files. Each parser accepts its own writer's output: `parse ∘ render`
//! is the identity on the data.

use std::fmt;

use maxmatch_core::daemon::{Activation, MoveBounds, MoveStats, RunOutcome, Trace};
use maxmatch_core::graph::{is_maximal, Graph, Matching, NodeId};
use maxmatch_core::protocol::{Configuration, Instance, NodeState, RuleId};
use maxmatch_core::report::VerificationReport;

/// A parse failure with the 1-based line it happened on (0 for
/// file-level problems).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            f.write_str(&self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for FormatError {}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError { line, message: message.into() }
}

/// Data lines of a text file: 1-based line numbers, comments and blanks
/// skipped.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(ix, l)| (ix + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn push_provenance(out: &mut String, kind: &str) {
    out.push_str(&format!("# {kind} v1\n# version {}\n", env!("CARGO_PKG_VERSION")));
}

/// Run-level provenance: the experiment-spec hash plus the run
/// coordinates, rendered into every output file of that run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunProvenance {
    pub spec: u64,
    pub graph: u64,
    pub strategy: String,
    pub seed: u64,
    pub init: String,
    pub limit: u64,
}

impl RunProvenance {
    fn push(&self, out: &mut String) {
        out.push_str(&format!("# spec {:016x}\n# graph {:016x}\n", self.spec, self.graph));
        out.push_str(&format!(
            "# strategy {} seed {} init {} limit {}\n",
            self.strategy, self.seed, self.init, self.limit
        ));
    }
}

fn outcome_token(outcome: RunOutcome) -> &'static str {
    match outcome {
        RunOutcome::Stabilized => "stabilized",
        RunOutcome::LimitExceeded => "limit-exceeded",
    }
}

fn parse_outcome(token: &str) -> Option<RunOutcome> {
    match token {
        "stabilized" => Some(RunOutcome::Stabilized),
        "limit-exceeded" => Some(RunOutcome::LimitExceeded),
        _ => None,
    }
}

// ---------------------------------------------------------------------
// Graph + matching files: `n m` header, then `u v flag` per edge with
// flag 1 marking matched edges.
// ---------------------------------------------------------------------

pub fn render_graph_file(g: &Graph, m: &Matching) -> String {
    let mut out = String::new();
    push_provenance(&mut out, "maxmatch-graph");
    out.push_str(&format!("{} {}\n", g.node_count(), g.edge_count()));
    for &(a, b) in g.edges() {
        let flag = u8::from(m.partner(a) == Some(b));
        out.push_str(&format!("{} {} {}\n", a.get(), b.get(), flag));
    }
    out
}

/// Parses a graph+matching file, rejecting non-matchings and non-maximal
/// matchings with a diagnostic.
pub fn parse_graph_file(text: &str) -> Result<(Graph, Matching), FormatError> {
    let mut lines = data_lines(text);
    let (header_ln, header) =
        lines.next().ok_or_else(|| err(0, "empty graph file; expected `n m` header"))?;
    let mut header_fields = header.split_whitespace();
    let mut next_num = |what: &str| -> Result<u32, FormatError> {
        header_fields
            .next()
            .and_then(|t| t.parse::<u32>().ok())
            .ok_or_else(|| err(header_ln, format!("bad header; expected `n m`, missing {what}")))
    };
    let n = next_num("node count")?;
    let m_count = next_num("edge count")?;
    if header_fields.next().is_some() {
        return Err(err(header_ln, "bad header; expected exactly `n m`"));
    }

    let mut edges = Vec::with_capacity(m_count as usize);
    let mut matched = Vec::new();
    for (ln, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let &[u, v, flag] = fields.as_slice() else {
            return Err(err(ln, "expected `u v flag`"));
        };
        let parse_id = |t: &str| -> Result<u32, FormatError> {
            t.parse::<u32>()
                .ok()
                .filter(|&id| id >= 1 && id <= n)
                .ok_or_else(|| err(ln, format!("endpoint {t:?} is not a node id in 1..={n}")))
        };
        let (u, v) = (parse_id(u)?, parse_id(v)?);
        match flag {
            "0" => {}
            "1" => matched.push((NodeId::new(u), NodeId::new(v))),
            other => return Err(err(ln, format!("flag {other:?} is not 0 or 1"))),
        }
        edges.push((u, v));
    }
    if edges.len() != m_count as usize {
        return Err(err(
            0,
            format!("header announces {m_count} edges, file has {}", edges.len()),
        ));
    }
    let graph = Graph::with_nodes(n, &edges).map_err(|e| err(0, e.to_string()))?;
    let matching = Matching::new(&graph, &matched).map_err(|e| err(0, e.to_string()))?;
    if !is_maximal(&graph, &matching) {
        return Err(err(
            0,
            "matching is not maximal: some edge has both endpoints unmatched",
        ));
    }
    Ok((graph, matching))
}

// ---------------------------------------------------------------------
// Configuration dumps: one node per line,
// `id role m p alpha beta s end`, `-` for null and for fields the role
// does not have.
// ---------------------------------------------------------------------

fn ptr_token(p: Option<NodeId>) -> String {
    p.map_or_else(|| String::from("-"), |u| u.get().to_string())
}

pub fn render_configuration(
    inst: &Instance,
    c: &Configuration,
    provenance: Option<&RunProvenance>,
) -> String {
    let mut out = String::new();
    push_provenance(&mut out, "maxmatch-config");
    if let Some(p) = provenance {
        p.push(&mut out);
    }
    for u in inst.graph().nodes() {
        let row = match c.state(u) {
            NodeState::Single(s) => format!(
                "{} single - {} - - - {}\n",
                u.get(),
                ptr_token(s.p),
                s.end
            ),
            NodeState::Matched(m) => format!(
                "{} matched {} {} {} {} {} {}\n",
                u.get(),
                inst.partner(u).get(),
                ptr_token(m.p),
                ptr_token(m.alpha),
                ptr_token(m.beta),
                m.s,
                m.end
            ),
        };
        out.push_str(&row);
    }
    out
}

pub fn parse_configuration(inst: &Instance, text: &str) -> Result<Configuration, FormatError> {
    let n = inst.graph().node_count();
    let mut states: Vec<Option<NodeState>> = vec![None; n];
    for (ln, line) in data_lines(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let &[id, role, m, p, alpha, beta, s, end] = fields.as_slice() else {
            return Err(err(ln, "expected `id role m p alpha beta s end`"));
        };
        let id: u32 = id
            .parse()
            .ok()
            .filter(|&v| v >= 1 && v as usize <= n)
            .ok_or_else(|| err(ln, format!("id {id:?} is not a node id in 1..={n}")))?;
        let u = NodeId::new(id);
        if states[u.index()].is_some() {
            return Err(err(ln, format!("node {id} listed twice")));
        }
        let ptr = |t: &str, what: &str| -> Result<Option<NodeId>, FormatError> {
            if t == "-" {
                return Ok(None);
            }
            t.parse::<u32>()
                .ok()
                .filter(|&v| v >= 1)
                .map(|v| Some(NodeId::new(v)))
                .ok_or_else(|| err(ln, format!("bad {what} {t:?}; expected a node id or -")))
        };
        let flag = |t: &str, what: &str| -> Result<bool, FormatError> {
            t.parse::<bool>()
                .map_err(|_| err(ln, format!("bad {what} {t:?}; expected true or false")))
        };
        let is_matched = inst.roles().is_matched(u);
        let state = match (role, is_matched) {
            ("single", false) => {
                if [m, alpha, beta, s].iter().any(|t| *t != "-") {
                    return Err(err(ln, "single rows carry - in the m, alpha, beta, s columns"));
                }
                NodeState::single(ptr(p, "p")?, flag(end, "end")?)
            }
            ("matched", true) => {
                let partner = ptr(m, "partner")?
                    .ok_or_else(|| err(ln, "matched rows need the partner column"))?;
                if partner != inst.partner(u) {
                    return Err(err(
                        ln,
                        format!(
                            "node {id} is matched with {}, not {}",
                            inst.partner(u).get(),
                            partner.get()
                        ),
                    ));
                }
                NodeState::matched(
                    ptr(p, "p")?,
                    ptr(alpha, "alpha")?,
                    ptr(beta, "beta")?,
                    flag(s, "s")?,
                    flag(end, "end")?,
                )
            }
            (other, _) if other != "single" && other != "matched" => {
                return Err(err(ln, format!("role {other:?} is not single or matched")));
            }
            (claimed, _) => {
                return Err(err(
                    ln,
                    format!("node {id} is {} in this instance, not {claimed}", if is_matched { "matched" } else { "single" }),
                ));
            }
        };
        states[u.index()] = Some(state);
    }
    let mut collected = Vec::with_capacity(n);
    for (ix, st) in states.into_iter().enumerate() {
        collected.push(st.ok_or_else(|| err(0, format!("node {} is missing", ix + 1)))?);
    }
    inst.configuration_from_states(collected).map_err(|e| err(0, e.to_string()))
}

// ---------------------------------------------------------------------
// Trace exports: one line per transition,
// `<step> <node>:<Rule> [...] <cumulative-moves>`.
// ---------------------------------------------------------------------

pub fn render_trace(trace: &Trace, provenance: &RunProvenance) -> String {
    let mut out = String::new();
    push_provenance(&mut out, "maxmatch-trace");
    provenance.push(&mut out);
    out.push_str(&format!(
        "# outcome {} moves {}\n",
        outcome_token(trace.outcome()),
        trace.move_count()
    ));
    let mut cumulative = 0u64;
    for (ix, act) in trace.steps().iter().enumerate() {
        cumulative += act.nodes.len() as u64;
        let mut line = ix.to_string();
        for &(u, rule) in &act.nodes {
            line.push_str(&format!(" {}:{}", u.get(), rule.name()));
        }
        line.push_str(&format!(" {cumulative}\n"));
        out.push_str(&line);
    }
    out
}

/// Header fields and activation schedule recovered from a trace file.
/// Configurations are not stored in traces; replaying against an instance
/// (see [`Trace::validate`]) reconstructs them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedTrace {
    pub graph: Option<u64>,
    pub strategy: Option<String>,
    pub seed: Option<u64>,
    pub init: Option<String>,
    pub outcome: Option<RunOutcome>,
    pub moves: Option<u64>,
    pub activations: Vec<Activation>,
}

pub fn parse_trace(text: &str) -> Result<ParsedTrace, FormatError> {
    let mut parsed = ParsedTrace {
        graph: None,
        strategy: None,
        seed: None,
        init: None,
        outcome: None,
        moves: None,
        activations: Vec::new(),
    };
    let mut cumulative = 0u64;
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let tokens: Vec<&str> = comment.split_whitespace().collect();
            match tokens.as_slice() {
                ["graph", hex] => {
                    parsed.graph = Some(
                        u64::from_str_radix(hex, 16)
                            .map_err(|_| err(ln, format!("bad graph hash {hex:?}")))?,
                    );
                }
                ["strategy", s, "seed", n, "init", i, "limit", _] => {
                    parsed.strategy = Some((*s).to_string());
                    parsed.seed =
                        Some(n.parse().map_err(|_| err(ln, format!("bad seed {n:?}")))?);
                    parsed.init = Some((*i).to_string());
                }
                ["outcome", o, "moves", m] => {
                    parsed.outcome = Some(
                        parse_outcome(o).ok_or_else(|| err(ln, format!("bad outcome {o:?}")))?,
                    );
                    parsed.moves =
                        Some(m.parse().map_err(|_| err(ln, format!("bad move count {m:?}")))?);
                }
                _ => {} // other provenance lines carry no replay data
            }
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 3 {
            return Err(err(ln, "expected `<step> <node>:<Rule> ... <moves>`"));
        }
        let step_ix: usize = tokens[0]
            .parse()
            .map_err(|_| err(ln, format!("bad step index {:?}", tokens[0])))?;
        if step_ix != parsed.activations.len() {
            return Err(err(
                ln,
                format!("step index {step_ix}, expected {}", parsed.activations.len()),
            ));
        }
        let mut nodes: Vec<(NodeId, RuleId)> = Vec::with_capacity(tokens.len() - 2);
        for pair in &tokens[1..tokens.len() - 1] {
            let (id, rule) = pair
                .split_once(':')
                .ok_or_else(|| err(ln, format!("bad activation {pair:?}; expected node:Rule")))?;
            let id: u32 = id
                .parse()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| err(ln, format!("bad node id {id:?}")))?;
            let rule = RuleId::parse(rule)
                .ok_or_else(|| err(ln, format!("unknown rule {rule:?}")))?;
            if let Some(&(prev, _)) = nodes.last() {
                if prev.get() >= id {
                    return Err(err(ln, "activated nodes must be strictly ascending"));
                }
            }
            nodes.push((NodeId::new(id), rule));
        }
        cumulative += nodes.len() as u64;
        let recorded: u64 = tokens[tokens.len() - 1]
            .parse()
            .map_err(|_| err(ln, format!("bad move counter {:?}", tokens[tokens.len() - 1])))?;
        if recorded != cumulative {
            return Err(err(
                ln,
                format!("cumulative moves {recorded}, recount says {cumulative}"),
            ));
        }
        parsed.activations.push(Activation { nodes });
    }
    if let Some(moves) = parsed.moves {
        if moves != cumulative {
            return Err(err(
                0,
                format!("header announces {moves} moves, transitions sum to {cumulative}"),
            ));
        }
    }
    Ok(parsed)
}

// ---------------------------------------------------------------------
// Stats and report tables (tab-separated).
// ---------------------------------------------------------------------

pub fn render_stats(
    inst: &Instance,
    stats: &MoveStats,
    bounds: &MoveBounds,
    outcome: RunOutcome,
    checks_passed: bool,
    provenance: &RunProvenance,
) -> String {
    let mut out = String::new();
    push_provenance(&mut out, "maxmatch-stats");
    provenance.push(&mut out);
    out.push_str("key\tvalue\n");
    let mut kv = |key: &str, value: String| out.push_str(&format!("{key}\t{value}\n"));
    kv("outcome", outcome_token(outcome).to_string());
    kv("nodes", inst.graph().node_count().to_string());
    kv("mu", bounds.mu.to_string());
    kv("sigma", bounds.sigma.to_string());
    kv("delta", bounds.delta.to_string());
    kv("moves", stats.total_moves().to_string());
    for rule in RuleId::ALL {
        kv(&format!("rule_{}", rule.name()), stats.rule_total(rule).to_string());
    }
    kv("matched_moves", stats.matched_move_total().to_string());
    kv("single_end_flips", stats.single_end_flip_total().to_string());
    kv("bound_updates", bounds.updates.to_string());
    kv("bound_matched_moves", bounds.matched_moves.to_string());
    kv("bound_single_end_flips", bounds.single_end_flips.to_string());
    kv("bound_reset_end", bounds.reset_end.to_string());
    kv("bound_update_end", bounds.update_end.to_string());
    kv("bound_update_p", bounds.update_p.to_string());
    kv("bound_total", bounds.total_moves.to_string());
    kv("checks", if checks_passed { String::from("pass") } else { String::from("fail") });
    out
}

pub fn render_report(report: &VerificationReport, provenance: &RunProvenance) -> String {
    let mut out = String::new();
    push_provenance(&mut out, "maxmatch-report");
    provenance.push(&mut out);
    out.push_str("check\tstatus\twitness\n");
    out.push_str(&report.to_string());
    out
}
