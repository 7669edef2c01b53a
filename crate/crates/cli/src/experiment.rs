//! Experiment specifications: the serializable description of one run
//! (graph source, matching source, initialization, strategy, seed, limit,
//! repetitions), the generator mini-language shared by every subcommand,
//! and the resolution of a spec into a ready-to-run instance.
//!
//! A spec is hashed (FNV-1a over its canonical TOML form) into the
//! provenance header of every file the run writes, so outputs are tied to
//! the exact inputs that produced them and a re-run can be checked for
//! byte identity.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use maxmatch_core::daemon::{AdversarialHeuristic, CentralPick, DaemonStrategy};
use maxmatch_core::digest::fnv1a_64;
use maxmatch_core::graph::{
    generate, generate_augmenting_chain, greedy_maximal_matching, Graph, GraphKind, IdOrder,
    Matching,
};
use maxmatch_core::Instance;

/// One run, fully described. The TOML mirror of the `run` flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub graph: GraphSource,
    #[serde(default)]
    pub matching: MatchingSource,
    #[serde(default = "default_init")]
    pub init: String,
    #[serde(default = "default_strategy")]
    pub strategy: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub move_limit: Option<u64>,
    #[serde(default = "default_repetitions")]
    pub repetitions: u32,
}

fn default_init() -> String {
    String::from("clean")
}

fn default_strategy() -> String {
    String::from("sync")
}

fn default_repetitions() -> u32 {
    1
}

/// Exactly one of `generate` (a generator spec like `chain:3`) or `file`
/// (a graph+matching text file) must be set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GraphSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

/// Where the maximal matching comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MatchingSource {
    /// File flags when the graph comes from a file, the generator's own
    /// matching for `chain`, greedy otherwise.
    #[default]
    Auto,
    /// Recompute greedily (ascending edge order), ignoring file flags.
    Greedy,
    /// The flag column of the graph file; an error for generated graphs.
    File,
}

impl fmt::Display for MatchingSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchingSource::Auto => "auto",
            MatchingSource::Greedy => "greedy",
            MatchingSource::File => "file",
        })
    }
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<ExperimentSpec, String> {
        toml::from_str(text).map_err(|e| format!("invalid experiment file: {e}"))
    }

    /// Canonical serialized form; the basis of the provenance hash.
    pub fn to_canonical_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    /// Provenance hash: FNV-1a of the canonical TOML.
    pub fn hash(&self) -> u64 {
        fnv1a_64(self.to_canonical_toml().as_bytes())
    }
}

/// Parsed generator spec. Grammar (one per instance):
///
/// ```text
/// path:N | cycle:N | random:N:P[:SEED] | bipartite:A:B | chain:K
/// ```
///
/// `random` without an explicit seed takes the run's own seed, so a sweep
/// draws a fresh topology per cell while a pinned seed freezes one.
#[derive(Debug, Clone, PartialEq)]
pub enum GenSpec {
    Path(u32),
    Cycle(u32),
    Random { n: u32, p: f64, seed: Option<u64> },
    Bipartite { a: u32, b: u32 },
    Chain(u32),
}

impl GenSpec {
    pub fn parse(text: &str) -> Result<GenSpec, String> {
        let parts: Vec<&str> = text.trim().split(':').collect();
        let usage = "expected path:N, cycle:N, random:N:P[:SEED], bipartite:A:B, or chain:K";
        let num = |s: &str, what: &str| -> Result<u32, String> {
            s.parse::<u32>().map_err(|_| format!("bad {what} {s:?} in generator spec {text:?}"))
        };
        match parts.as_slice() {
            ["path", n] => Ok(GenSpec::Path(num(n, "length")?)),
            ["cycle", n] => Ok(GenSpec::Cycle(num(n, "length")?)),
            ["random", n, p] | ["random", n, p, _] => {
                let p_val = p
                    .parse::<f64>()
                    .ok()
                    .filter(|p| (0.0..=1.0).contains(p))
                    .ok_or_else(|| {
                        format!("bad probability {p:?} in generator spec {text:?}")
                    })?;
                let seed = match parts.get(3) {
                    None => None,
                    Some(s) => Some(
                        s.parse::<u64>()
                            .map_err(|_| format!("bad seed {s:?} in generator spec {text:?}"))?,
                    ),
                };
                Ok(GenSpec::Random { n: num(n, "size")?, p: p_val, seed })
            }
            ["bipartite", a, b] => {
                Ok(GenSpec::Bipartite { a: num(a, "side")?, b: num(b, "side")? })
            }
            ["chain", k] => Ok(GenSpec::Chain(num(k, "chain length")?)),
            _ => Err(format!("unrecognized generator spec {text:?}; {usage}")),
        }
    }

    /// Canonical label used in tables and file headers.
    pub fn label(&self) -> String {
        match self {
            GenSpec::Path(n) => format!("path:{n}"),
            GenSpec::Cycle(n) => format!("cycle:{n}"),
            GenSpec::Random { n, p, seed: None } => format!("random:{n}:{p}"),
            GenSpec::Random { n, p, seed: Some(s) } => format!("random:{n}:{p}:{s}"),
            GenSpec::Bipartite { a, b } => format!("bipartite:{a}:{b}"),
            GenSpec::Chain(k) => format!("chain:{k}"),
        }
    }

    /// Builds the graph, plus the generator's own matching when it has one
    /// (`chain`). `fallback_seed` feeds unpinned `random` specs.
    pub fn build(&self, fallback_seed: u64) -> Result<(Graph, Option<Matching>), String> {
        let kind = match *self {
            GenSpec::Path(n) => GraphKind::Path { n },
            GenSpec::Cycle(n) => GraphKind::Cycle { n },
            GenSpec::Random { n, p, seed } => {
                GraphKind::Random { n, p, seed: seed.unwrap_or(fallback_seed) }
            }
            GenSpec::Bipartite { a, b } => GraphKind::CompleteBipartite { a, b },
            GenSpec::Chain(k) => {
                if k == 0 {
                    return Err(String::from("chain:K needs K >= 1"));
                }
                let (g, m) = generate_augmenting_chain(k, IdOrder::Ascending);
                return Ok((g, Some(m)));
            }
        };
        let g = generate(kind).map_err(|e| format!("cannot build {}: {e}", self.label()))?;
        Ok((g, None))
    }
}

/// Expands sweep range sugar into plain generator specs: the first numeric
/// slot may be `A..B` (inclusive) or `A..B..STEP`, e.g. `chain:1..15` or
/// `path:10..100..10`. A spec without `..` expands to itself.
pub fn expand_generator_range(text: &str) -> Result<Vec<GenSpec>, String> {
    let trimmed = text.trim();
    let Some((family, rest)) = trimmed.split_once(':') else {
        return Ok(vec![GenSpec::parse(trimmed)?]);
    };
    let (slot, tail) = match rest.split_once(':') {
        Some((s, t)) => (s, Some(t)),
        None => (rest, None),
    };
    if !slot.contains("..") {
        return Ok(vec![GenSpec::parse(trimmed)?]);
    }
    let pieces: Vec<&str> = slot.split("..").collect();
    let bad = || format!("bad range {slot:?} in {text:?}; expected A..B or A..B..STEP");
    let parse_u32 = |s: &str| s.parse::<u32>().map_err(|_| bad());
    let (start, end, step) = match pieces.as_slice() {
        [a, b] => (parse_u32(a)?, parse_u32(b)?, 1),
        [a, b, s] => (parse_u32(a)?, parse_u32(b)?, parse_u32(s)?),
        _ => return Err(bad()),
    };
    if step == 0 {
        return Err(format!("zero step in range {text:?}"));
    }
    let mut specs = Vec::new();
    let mut value = start;
    while value <= end {
        let spec = match tail {
            Some(t) => format!("{family}:{value}:{t}"),
            None => format!("{family}:{value}"),
        };
        specs.push(GenSpec::parse(&spec)?);
        value = match value.checked_add(step) {
            Some(v) => v,
            None => break,
        };
    }
    Ok(specs)
}

/// How the initial configuration is produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitSpec {
    /// All pointers null, all flags false.
    Clean,
    /// Seeded-uniform corruption over all identifiers.
    Random,
    /// A configuration dump file.
    File(PathBuf),
}

impl InitSpec {
    pub fn parse(text: &str) -> InitSpec {
        match text {
            "clean" => InitSpec::Clean,
            "random" => InitSpec::Random,
            other => InitSpec::File(PathBuf::from(other)),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            InitSpec::Clean => "clean",
            InitSpec::Random => "random",
            InitSpec::File(_) => "file",
        }
    }
}

/// A strategy argument: a built-in daemon or a recorded trace to replay.
#[derive(Debug, Clone, PartialEq)]
pub enum StrategySpec {
    Builtin(DaemonStrategy),
    Replay(PathBuf),
}

impl StrategySpec {
    pub fn parse(text: &str) -> Result<StrategySpec, String> {
        let s = match text {
            "sync" => DaemonStrategy::Synchronous,
            "central-lowest" => DaemonStrategy::Central(CentralPick::LowestId),
            "central-random" => DaemonStrategy::Central(CentralPick::SeededRandom),
            "distributed-random" => DaemonStrategy::DistributedRandom,
            "adversarial" => DaemonStrategy::Adversarial(AdversarialHeuristic::RematchChurn),
            other => {
                if let Some(path) = other.strip_prefix("replay:") {
                    return Ok(StrategySpec::Replay(PathBuf::from(path)));
                }
                return Err(format!(
                    "unknown strategy {other:?}; expected sync, central-lowest, \
                     central-random, distributed-random, adversarial, or replay:FILE"
                ));
            }
        };
        Ok(StrategySpec::Builtin(s))
    }

    pub fn label(&self) -> &str {
        match self {
            StrategySpec::Builtin(s) => s.name(),
            StrategySpec::Replay(_) => "replay",
        }
    }
}

/// The materialized half of a spec: graph + matching bundled into an
/// instance, with a display label for tables.
pub struct ResolvedInstance {
    pub label: String,
    pub instance: Instance,
}

/// Builds the instance a spec describes. `read_file` supplies graph-file
/// contents (injected so resolution stays testable without touching the
/// filesystem); it receives the configured path.
pub fn resolve_instance(
    spec: &ExperimentSpec,
    read_file: &dyn Fn(&Path) -> Result<String, String>,
) -> Result<ResolvedInstance, String> {
    match (&spec.graph.generate, &spec.graph.file) {
        (Some(gen_text), None) => {
            let gen_spec = GenSpec::parse(gen_text)?;
            let (graph, builtin) = gen_spec.build(spec.seed)?;
            let matching = match (spec.matching, builtin) {
                (MatchingSource::File, _) => {
                    return Err(String::from(
                        "matching source \"file\" needs the graph to come from a file",
                    ));
                }
                (MatchingSource::Auto, Some(m)) => m,
                (MatchingSource::Auto, None) | (MatchingSource::Greedy, _) => {
                    greedy_maximal_matching(&graph)
                }
            };
            let instance = Instance::new(graph, matching)
                .map_err(|e| format!("{}: {e}", gen_spec.label()))?;
            Ok(ResolvedInstance { label: gen_spec.label(), instance })
        }
        (None, Some(path)) => {
            let text = read_file(path)?;
            let (graph, file_matching) = crate::formats::parse_graph_file(&text)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            let matching = match spec.matching {
                MatchingSource::Auto | MatchingSource::File => file_matching,
                MatchingSource::Greedy => greedy_maximal_matching(&graph),
            };
            let label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            let instance =
                Instance::new(graph, matching).map_err(|e| format!("{}: {e}", path.display()))?;
            Ok(ResolvedInstance { label, instance })
        }
        (Some(_), Some(_)) => {
            Err(String::from("graph source: set either generate or file, not both"))
        }
        (None, None) => Err(String::from("graph source: set generate or file")),
    }
}
