//! The three subcommands: `run` (one experiment, full file outputs),
//! `sweep` (a grid of instances × strategies × inits × seeds, tabulated),
//! and `modelcheck` (exhaustive state-space checks on tiny instances).
//!
//! Exit-code contract, stable for CI: 0 success, 2 check failure
//! (a falsifying run, bound violation, or failed oracle), 3 input error,
//! 4 model-checker cap refusal. IO problems exit 1.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use maxmatch_core::daemon::{
    run, theoretical_bounds, Daemon, DaemonStrategy, RunOutcome,
};
use maxmatch_core::graph::{greedy_maximal_matching, Graph, Matching, NodeId};
use maxmatch_core::mc::{
    explore_all, verify_silence_and_closure, McError, PointerDomain,
};
use maxmatch_core::oracle::{verify_approximation, verify_stable_structure};
use maxmatch_core::report::VerificationReport;
use maxmatch_core::Instance;

use crate::args::{ModelcheckArgs, RunArgs, SweepArgs};
use crate::experiment::{
    expand_generator_range, resolve_instance, ExperimentSpec, GenSpec, GraphSource, InitSpec,
    MatchingSource, StrategySpec,
};
use crate::formats::{
    parse_configuration, parse_trace, render_report, render_stats, render_trace, RunProvenance,
};

/// Command failures, each mapped to one exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Unusable input: bad flags, unparsable files, impossible specs. Exit 3.
    Input(String),
    /// The protocol or an oracle check failed — a falsifying result. Exit 2.
    Check(String),
    /// The model checker refused an instance over its transition budget. Exit 4.
    CapRefusal(String),
    /// Filesystem trouble. Exit 1.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Check(_) => 2,
            CliError::Input(_) => 3,
            CliError::CapRefusal(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Check(m) | CliError::CapRefusal(m) | CliError::Io(m) => {
                f.write_str(m)
            }
        }
    }
}

impl std::error::Error for CliError {}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn ensure_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------
// run
// ---------------------------------------------------------------------

fn spec_from_run_args(args: &RunArgs) -> Result<ExperimentSpec, CliError> {
    if let Some(config) = &args.config {
        let selection_flags_used = args.generate.is_some()
            || args.graph.is_some()
            || args.matching.is_some()
            || args.init.is_some()
            || args.strategy.is_some()
            || args.seed.is_some()
            || args.move_limit.is_some()
            || args.repetitions.is_some();
        if selection_flags_used {
            return Err(CliError::Input(String::from(
                "--config is exclusive with the selection flags; put everything in the file",
            )));
        }
        let text = read_file(config)?;
        return ExperimentSpec::from_toml(&text)
            .map_err(|e| CliError::Input(format!("{}: {e}", config.display())));
    }
    let matching = match args.matching.as_deref() {
        None | Some("auto") => MatchingSource::Auto,
        Some("greedy") => MatchingSource::Greedy,
        Some("file") => MatchingSource::File,
        Some(other) => {
            return Err(CliError::Input(format!(
                "unknown matching source {other:?}; expected auto, greedy, or file"
            )));
        }
    };
    Ok(ExperimentSpec {
        graph: GraphSource { generate: args.generate.clone(), file: args.graph.clone() },
        matching,
        init: args.init.clone().unwrap_or_else(|| String::from("clean")),
        strategy: args.strategy.clone().unwrap_or_else(|| String::from("sync")),
        seed: args.seed.unwrap_or(0),
        move_limit: args.move_limit,
        repetitions: args.repetitions.unwrap_or(1),
    })
}

/// Replay schedule loaded from a trace file, checked against the instance
/// it is about to drive.
fn load_replay(inst: &Instance, path: &Path) -> Result<Vec<Vec<NodeId>>, CliError> {
    let text = read_file(path)?;
    let parsed =
        parse_trace(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if let Some(recorded) = parsed.graph {
        if recorded != inst.fingerprint() {
            return Err(CliError::Input(format!(
                "{}: trace was recorded on instance {recorded:016x}, this run is on {:016x}",
                path.display(),
                inst.fingerprint()
            )));
        }
    }
    Ok(parsed
        .activations
        .into_iter()
        .map(|a| a.nodes.into_iter().map(|(u, _)| u).collect())
        .collect())
}

pub fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let spec = spec_from_run_args(args)?;
    let reader = |p: &Path| fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()));
    let resolved = resolve_instance(&spec, &reader).map_err(CliError::Input)?;
    let inst = &resolved.instance;
    let bounds = theoretical_bounds(inst.graph(), inst.matching());
    let limit = spec.move_limit.unwrap_or(bounds.total_moves + 1);
    let init = InitSpec::parse(&spec.init);
    let strategy = StrategySpec::parse(&spec.strategy).map_err(CliError::Input)?;

    let init_file = match &init {
        InitSpec::File(path) => {
            let text = read_file(path)?;
            Some(
                parse_configuration(inst, &text)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
            )
        }
        _ => None,
    };
    let replay = match &strategy {
        StrategySpec::Replay(path) => Some(load_replay(inst, path)?),
        _ => None,
    };

    ensure_dir(&args.out)?;
    let spec_hash = spec.hash();
    let repetitions = spec.repetitions.max(1);
    let mut failures: Vec<String> = Vec::new();

    for rep in 0..repetitions {
        let seed = spec.seed.wrapping_add(u64::from(rep));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c0 = match (&init, &init_file) {
            (InitSpec::Clean, _) => inst.clean_configuration(),
            (InitSpec::Random, _) => inst.random_configuration(&mut rng),
            (InitSpec::File(_), Some(c)) => c.clone(),
            (InitSpec::File(_), None) => unreachable!("file init parsed above"),
        };
        let mut daemon = match (&strategy, &replay) {
            (StrategySpec::Builtin(s), _) => Daemon::with_rng(s.clone(), rng),
            (StrategySpec::Replay(_), Some(sets)) => {
                Daemon::new(DaemonStrategy::Replay(sets.clone()), seed)
            }
            (StrategySpec::Replay(_), None) => unreachable!("replay loaded above"),
        };
        let (trace, stats) = run(inst, c0, &mut daemon, limit).map_err(|e| {
            CliError::Input(format!("replay schedule rejected by the protocol: {e}"))
        })?;

        let mut report = VerificationReport::new();
        match trace.outcome() {
            RunOutcome::Stabilized => report.pass(
                "run-outcome",
                format!("stabilized after {} moves (limit {limit})", trace.move_count()),
            ),
            RunOutcome::LimitExceeded => report.fail(
                "run-outcome",
                format!("move limit {limit} exceeded without stabilizing"),
            ),
        }
        report.merge(maxmatch_core::daemon::check_move_bounds(inst, &stats, &bounds));
        if trace.outcome() == RunOutcome::Stabilized {
            report.merge(verify_stable_structure(inst, trace.final_config()));
            report.merge(verify_approximation(inst, trace.final_config()));
        }
        let ok = report.passed();

        let provenance = RunProvenance {
            spec: spec_hash,
            graph: inst.fingerprint(),
            strategy: String::from(strategy.label()),
            seed,
            init: String::from(init.label()),
            limit,
        };
        let suffix = if repetitions > 1 { format!("-{rep}") } else { String::new() };
        write_file(&args.out.join(format!("trace{suffix}.txt")), &render_trace(&trace, &provenance))?;
        write_file(
            &args.out.join(format!("stats{suffix}.tsv")),
            &render_stats(inst, &stats, &bounds, trace.outcome(), ok, &provenance),
        )?;
        write_file(
            &args.out.join(format!("report{suffix}.tsv")),
            &render_report(&report, &provenance),
        )?;

        println!(
            "run {} strategy {} seed {}: {}, {} moves (bound {}), checks {}",
            resolved.label,
            strategy.label(),
            seed,
            match trace.outcome() {
                RunOutcome::Stabilized => "stabilized",
                RunOutcome::LimitExceeded => "limit exceeded",
            },
            trace.move_count(),
            bounds.total_moves,
            if ok { "pass" } else { "FAIL" }
        );
        if !ok {
            let names: Vec<&str> = report.failures().map(|c| c.name).collect();
            failures.push(format!("seed {seed}: {}", names.join(", ")));
        }
    }
    println!("outputs in {}", args.out.display());
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!("failing checks — {}", failures.join("; "))))
    }
}

// ---------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------

struct SweepCell {
    gen: GenSpec,
    strategy: DaemonStrategy,
    init: InitSpec,
    seed: u64,
}

struct CellResult {
    instance: String,
    strategy: &'static str,
    init: String,
    seed: u64,
    nodes: usize,
    moves: u64,
    bound: u64,
    outcome: &'static str,
    ok: bool,
    detail: String,
}

fn run_cell(cell: &SweepCell, limit_override: Option<u64>) -> CellResult {
    let label = cell.gen.label();
    let fail = |detail: String| CellResult {
        instance: label.clone(),
        strategy: cell.strategy.name(),
        init: String::from(cell.init.label()),
        seed: cell.seed,
        nodes: 0,
        moves: 0,
        bound: 0,
        outcome: "error",
        ok: false,
        detail,
    };
    let (graph, builtin) = match cell.gen.build(cell.seed) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let matching = builtin.unwrap_or_else(|| greedy_maximal_matching(&graph));
    let inst = match Instance::new(graph, matching) {
        Ok(i) => i,
        Err(e) => return fail(e.to_string()),
    };
    let bounds = theoretical_bounds(inst.graph(), inst.matching());
    let limit = limit_override.unwrap_or(bounds.total_moves + 1);

    let mut rng = ChaCha8Rng::seed_from_u64(cell.seed);
    let c0 = match cell.init {
        InitSpec::Clean => inst.clean_configuration(),
        InitSpec::Random => inst.random_configuration(&mut rng),
        InitSpec::File(_) => return fail(String::from("file inits are not sweepable")),
    };
    let mut daemon = Daemon::with_rng(cell.strategy.clone(), rng);
    let (trace, stats) = match run(&inst, c0, &mut daemon, limit) {
        Ok(x) => x,
        Err(e) => return fail(e.to_string()),
    };

    let mut report = VerificationReport::new();
    if trace.outcome() == RunOutcome::LimitExceeded {
        report.fail("run-outcome", format!("move limit {limit} exceeded"));
    }
    report.merge(maxmatch_core::daemon::check_move_bounds(&inst, &stats, &bounds));
    if trace.outcome() == RunOutcome::Stabilized {
        report.merge(verify_stable_structure(&inst, trace.final_config()));
        report.merge(verify_approximation(&inst, trace.final_config()));
    }
    let ok = report.passed();
    let detail = if ok {
        String::from("-")
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name).collect();
        names.join(",")
    };
    CellResult {
        instance: label,
        strategy: cell.strategy.name(),
        init: String::from(cell.init.label()),
        seed: cell.seed,
        nodes: inst.graph().node_count(),
        moves: trace.move_count(),
        bound: bounds.total_moves,
        outcome: match trace.outcome() {
            RunOutcome::Stabilized => "stabilized",
            RunOutcome::LimitExceeded => "limit-exceeded",
        },
        ok,
        detail,
    }
}

/// Aggregate row: worst observed moves per (instance, strategy), with the
/// `moves / n³` scaling column the move-bound argument predicts is O(1).
struct AggregateRow {
    instance: String,
    strategy: &'static str,
    runs: usize,
    max_moves: u64,
    bound: u64,
    nodes: usize,
    all_ok: bool,
}

impl AggregateRow {
    fn moves_per_n3(&self) -> f64 {
        let n3 = (self.nodes as f64).powi(3);
        if n3 == 0.0 {
            0.0
        } else {
            self.max_moves as f64 / n3
        }
    }
}

fn aggregate(results: &[CellResult]) -> Vec<AggregateRow> {
    let mut rows: Vec<AggregateRow> = Vec::new();
    for r in results {
        let found = rows
            .iter_mut()
            .find(|a| a.instance == r.instance && a.strategy == r.strategy);
        match found {
            Some(a) => {
                a.runs += 1;
                a.max_moves = a.max_moves.max(r.moves);
                a.bound = a.bound.max(r.bound);
                a.nodes = a.nodes.max(r.nodes);
                a.all_ok &= r.ok;
            }
            None => rows.push(AggregateRow {
                instance: r.instance.clone(),
                strategy: r.strategy,
                runs: 1,
                max_moves: r.moves,
                bound: r.bound,
                nodes: r.nodes,
                all_ok: r.ok,
            }),
        }
    }
    rows
}

fn render_sweep_summary(args: &SweepArgs, results: &[CellResult]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# maxmatch-sweep v1\n# version {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!(
        "# generate {} strategies {} seeds {} init {}\n",
        args.generate.join(","),
        args.strategies,
        args.seeds,
        args.init
    ));
    out.push_str("# cells\n");
    out.push_str("instance\tstrategy\tinit\tseed\tnodes\tmoves\tbound\toutcome\tverdict\tdetail\n");
    for r in results {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.instance,
            r.strategy,
            r.init,
            r.seed,
            r.nodes,
            r.moves,
            r.bound,
            r.outcome,
            if r.ok { "pass" } else { "fail" },
            r.detail
        ));
    }
    out.push_str("# aggregate\n");
    out.push_str("instance\tstrategy\truns\tmax_moves\tbound\tmoves_per_n3\tverdict\n");
    for a in aggregate(results) {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{:.6}\t{}\n",
            a.instance,
            a.strategy,
            a.runs,
            a.max_moves,
            a.bound,
            a.moves_per_n3(),
            if a.all_ok { "pass" } else { "fail" }
        ));
    }
    out
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let mut gens: Vec<GenSpec> = Vec::new();
    for text in &args.generate {
        gens.extend(expand_generator_range(text).map_err(CliError::Input)?);
    }
    let mut strategies: Vec<DaemonStrategy> = Vec::new();
    for name in args.strategies.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match StrategySpec::parse(name).map_err(CliError::Input)? {
            StrategySpec::Builtin(s) => strategies.push(s),
            StrategySpec::Replay(_) => {
                return Err(CliError::Input(String::from(
                    "replay is a single-run strategy, not sweepable",
                )));
            }
        }
    }
    let inits: Vec<InitSpec> = match args.init.as_str() {
        "clean" => vec![InitSpec::Clean],
        "random" => vec![InitSpec::Random],
        "both" => vec![InitSpec::Clean, InitSpec::Random],
        other => {
            return Err(CliError::Input(format!(
                "unknown sweep init {other:?}; expected clean, random, or both"
            )));
        }
    };

    let mut cells: Vec<SweepCell> = Vec::new();
    for gen in &gens {
        for strategy in &strategies {
            for init in &inits {
                for seed in 0..args.seeds {
                    cells.push(SweepCell {
                        gen: gen.clone(),
                        strategy: strategy.clone(),
                        init: init.clone(),
                        seed,
                    });
                }
            }
        }
    }
    if cells.is_empty() {
        return Err(CliError::Input(String::from(
            "empty sweep grid: no instances, strategies, inits, or seeds selected",
        )));
    }

    let results: Vec<CellResult> =
        cells.par_iter().map(|cell| run_cell(cell, args.move_limit)).collect();

    // The table is written before any failure is raised, so a falsifying
    // sweep still leaves its full evidence behind.
    let table = render_sweep_summary(args, &results);
    ensure_dir(&args.out)?;
    let table_path = args.out.join("summary.tsv");
    write_file(&table_path, &table)?;

    println!("instance\tstrategy\truns\tmax_moves\tbound\tmoves_per_n3\tverdict");
    for a in aggregate(&results) {
        println!(
            "{}\t{}\t{}\t{}\t{}\t{:.6}\t{}",
            a.instance,
            a.strategy,
            a.runs,
            a.max_moves,
            a.bound,
            a.moves_per_n3(),
            if a.all_ok { "pass" } else { "fail" }
        );
    }
    let failing: Vec<&CellResult> = results.iter().filter(|r| !r.ok).collect();
    println!(
        "{} cells, {} failing; table in {}",
        results.len(),
        failing.len(),
        table_path.display()
    );
    if let Some(first) = failing.first() {
        return Err(CliError::Check(format!(
            "{} of {} sweep cells failed; first: {} {} init {} seed {} ({})",
            failing.len(),
            results.len(),
            first.instance,
            first.strategy,
            first.init,
            first.seed,
            first.detail
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------
// modelcheck
// ---------------------------------------------------------------------

/// The instances checked when none are named: every product-space size
/// that fits the default transition budget.
pub const DEFAULT_SUITE: [&str; 4] = ["k2", "p3", "p4", "chain1-foreign"];

/// Resolves a named instance or generator spec into (label, instance,
/// pointer domain).
fn build_mc_instance(name: &str) -> Result<(String, Instance, PointerDomain), String> {
    let named = |edges: &[(u32, u32)], matched: &[(u32, u32)]| -> Result<Instance, String> {
        let g = Graph::from_edges(edges).map_err(|e| e.to_string())?;
        let m: Vec<(NodeId, NodeId)> = matched
            .iter()
            .map(|&(a, b)| (NodeId::new(a), NodeId::new(b)))
            .collect();
        let m = Matching::new(&g, &m).map_err(|e| e.to_string())?;
        Instance::new(g, m).map_err(|e| e.to_string())
    };
    match name {
        "k2" => Ok((String::from("k2"), named(&[(1, 2)], &[(1, 2)])?, PointerDomain::Neighbors)),
        "p3" => {
            let inst = named(&[(1, 2), (2, 3)], &[(1, 2)])?;
            Ok((String::from("p3"), inst, PointerDomain::Neighbors))
        }
        "p4" | "chain1-foreign" => {
            // The 4-path with its middle edge matched: the smallest
            // instance that exercises a full rematch cascade.
            let (g, m) = maxmatch_core::graph::generate_augmenting_chain(
                1,
                maxmatch_core::graph::IdOrder::Ascending,
            );
            let inst = Instance::new(g, m).map_err(|e| e.to_string())?;
            let domain = if name == "p4" {
                PointerDomain::Neighbors
            } else {
                PointerDomain::NeighborsPlusForeign
            };
            Ok((String::from(name), inst, domain))
        }
        "c4" => {
            let inst = named(&[(1, 2), (2, 3), (3, 4), (1, 4)], &[(1, 2), (3, 4)])?;
            Ok((String::from("c4"), inst, PointerDomain::Neighbors))
        }
        other => {
            let gen = GenSpec::parse(other)?;
            let (graph, builtin) = gen.build(0)?;
            let matching = builtin.unwrap_or_else(|| greedy_maximal_matching(&graph));
            let inst = Instance::new(graph, matching).map_err(|e| e.to_string())?;
            Ok((gen.label(), inst, PointerDomain::Neighbors))
        }
    }
}

struct McRow {
    instance: String,
    domain: &'static str,
    configs: String,
    transitions: String,
    sinks: String,
    longest: String,
    bound: String,
    verdict: String,
}

pub fn cmd_modelcheck(args: &ModelcheckArgs) -> Result<(), CliError> {
    let names: Vec<String> = if args.instances.is_empty() {
        DEFAULT_SUITE.iter().map(|s| String::from(*s)).collect()
    } else {
        args.instances.clone()
    };

    let mut rows: Vec<McRow> = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    let mut refusals: Vec<String> = Vec::new();

    for name in &names {
        let (label, inst, domain) = build_mc_instance(name).map_err(CliError::Input)?;
        match explore_all(&inst, domain, args.cap) {
            Ok(space) => {
                let summary = verify_silence_and_closure(&inst, &space);
                let verdict = if summary.passed() { "pass" } else { "fail" };
                println!(
                    "modelcheck {label} [{}]: {} configurations, {} transitions, {} sinks, \
                     longest {} moves (bound {}): {verdict}",
                    domain.name(),
                    summary.configs,
                    summary.transitions,
                    summary.sinks,
                    summary.longest_moves,
                    summary.bound
                );
                if !summary.passed() {
                    for failure in summary.report.failures() {
                        println!("  {}\t{}", failure.name, failure.witness);
                    }
                    failures.push(format!("{label}: {}", {
                        let names: Vec<&str> =
                            summary.report.failures().map(|c| c.name).collect();
                        names.join(", ")
                    }));
                }
                rows.push(McRow {
                    instance: label,
                    domain: domain.name(),
                    configs: summary.configs.to_string(),
                    transitions: summary.transitions.to_string(),
                    sinks: summary.sinks.to_string(),
                    longest: summary.longest_moves.to_string(),
                    bound: summary.bound.to_string(),
                    verdict: String::from(verdict),
                });
            }
            Err(e) => {
                let (configs, transitions) = match &e {
                    McError::EstimateExceedsCap { configs, estimated_transitions, .. } => {
                        (configs.to_string(), estimated_transitions.to_string())
                    }
                    McError::TransitionCapHit { configs_reached, transitions, .. } => {
                        (configs_reached.to_string(), transitions.to_string())
                    }
                    _ => (String::from("-"), String::from("-")),
                };
                println!("modelcheck {label} [{}]: refused — {e}", domain.name());
                refusals.push(format!("{label}: {e}"));
                rows.push(McRow {
                    instance: label,
                    domain: domain.name(),
                    configs,
                    transitions,
                    sinks: String::from("-"),
                    longest: String::from("-"),
                    bound: String::from("-"),
                    verdict: String::from("cap-refused"),
                });
            }
        }
    }

    if let Some(out) = &args.out {
        ensure_dir(out)?;
        let mut table = String::new();
        table.push_str(&format!(
            "# maxmatch-modelcheck v1\n# version {}\n# cap {}\n",
            env!("CARGO_PKG_VERSION"),
            args.cap
        ));
        table.push_str(
            "instance\tdomain\tconfigs\ttransitions\tsinks\tlongest_moves\tbound\tverdict\n",
        );
        for r in &rows {
            table.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                r.instance,
                r.domain,
                r.configs,
                r.transitions,
                r.sinks,
                r.longest,
                r.bound,
                r.verdict
            ));
        }
        write_file(&out.join("modelcheck.tsv"), &table)?;
        println!("table in {}", out.join("modelcheck.tsv").display());
    }

    if !failures.is_empty() {
        return Err(CliError::Check(format!(
            "model checking falsified {} instance(s): {}",
            failures.len(),
            failures.join("; ")
        )));
    }
    if !refusals.is_empty() {
        return Err(CliError::CapRefusal(refusals.join("; ")));
    }
    Ok(())
}
