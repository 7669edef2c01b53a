//! End-to-end tests of the installed binary: the exit-code contract, the
//! output files, replay, and byte-level determinism. Every test spawns the
//! real executable, so these cover argument parsing and dispatch too.

use std::path::Path;
use std::process::{Command, Output};

fn maxmatch(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxmatch"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary spawns")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal kills expected")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn run_stabilizes_a_clean_path_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = maxmatch(
        &[
            "run", "--generate", "path:4", "--matching", "greedy", "--init", "clean",
            "--strategy", "sync", "--out", "out",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("stabilized"));
    for file in ["trace.txt", "stats.tsv", "report.tsv"] {
        let path = dir.path().join("out").join(file);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("# spec "), "{file} lacks provenance");
        assert!(text.contains("# graph "), "{file} lacks provenance");
    }
}

#[test]
fn run_handles_adversarial_chains_from_random_states() {
    let dir = tempfile::tempdir().unwrap();
    let out = maxmatch(
        &[
            "run", "--generate", "chain:3", "--init", "random", "--seed", "9", "--strategy",
            "adversarial", "--out", "out",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let report = std::fs::read_to_string(dir.path().join("out/report.tsv")).unwrap();
    assert!(report.contains("approx-no-3-augmenting-path\tpass"));
    assert!(report.contains("total-moves\tpass"));
}

#[test]
fn run_exceeding_the_move_limit_exits_two_but_still_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = maxmatch(
        &["run", "--generate", "chain:1", "--move-limit", "1", "--out", "out"],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 2, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("run-outcome"));
    let stats = std::fs::read_to_string(dir.path().join("out/stats.tsv")).unwrap();
    assert!(stats.contains("outcome\tlimit-exceeded"));
}

#[test]
fn bad_inputs_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    // Unknown flag (clap usage error).
    assert_eq!(exit_code(&maxmatch(&["run", "--bogus"], dir.path())), 3);
    // No graph source at all.
    assert_eq!(exit_code(&maxmatch(&["run"], dir.path())), 3);
    // Unparsable generator spec.
    assert_eq!(exit_code(&maxmatch(&["run", "--generate", "tree:5"], dir.path())), 3);
    // Empty sweep grid.
    assert_eq!(
        exit_code(&maxmatch(&["sweep", "--generate", "chain:2", "--seeds", "0"], dir.path())),
        3
    );
    // --config is exclusive with selection flags.
    std::fs::write(dir.path().join("e.toml"), "[graph]\ngenerate = \"path:4\"\n").unwrap();
    let out = maxmatch(
        &["run", "--config", "e.toml", "--seed", "4"],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 3, "stderr: {}", stderr(&out));
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let help = maxmatch(&["--help"], dir.path());
    assert_eq!(exit_code(&help), 0);
    assert!(stdout(&help).contains("modelcheck"));
    assert_eq!(exit_code(&maxmatch(&["--version"], dir.path())), 0);
}

#[test]
fn modelcheck_p4_passes_with_a_longest_path_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = maxmatch(&["modelcheck", "p4", "--out", "mc"], dir.path());
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("longest"), "{text}");
    assert!(text.contains("pass"), "{text}");
    let table = std::fs::read_to_string(dir.path().join("mc/modelcheck.tsv")).unwrap();
    assert!(table.contains("p4\tneighbors\t186624\t"), "{table}");
}

#[test]
fn modelcheck_refuses_oversized_instances_with_the_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let out = maxmatch(&["modelcheck", "path:8"], dir.path());
    assert_eq!(exit_code(&out), 4, "stderr: {}", stderr(&out));
    let text = format!("{}{}", stdout(&out), stderr(&out));
    assert!(text.contains("configurations"), "{text}");
    assert!(text.contains("exceed the cap"), "{text}");
}

#[test]
fn sweep_emits_the_aggregate_table_and_exits_zero_when_all_cells_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = maxmatch(
        &[
            "sweep", "--generate", "chain:1..3", "--strategies", "sync,adversarial", "--seeds",
            "3", "--init", "both", "--out", "out",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let table = std::fs::read_to_string(dir.path().join("out/summary.tsv")).unwrap();
    assert!(table.contains("# cells"));
    assert!(table.contains("# aggregate"));
    // 3 instances x 2 strategies x 2 inits x 3 seeds.
    let cell_rows = table
        .lines()
        .skip_while(|l| *l != "# cells")
        .take_while(|l| *l != "# aggregate")
        .filter(|l| !l.starts_with('#') && !l.starts_with("instance"))
        .count();
    assert_eq!(cell_rows, 36);
    assert!(stdout(&out).contains("moves_per_n3"));
}

#[test]
fn sweep_failure_exits_two_and_still_writes_the_table() {
    let dir = tempfile::tempdir().unwrap();
    // A move limit of 1 forces limit-exceeded cells.
    let out = maxmatch(
        &["sweep", "--generate", "chain:2", "--move-limit", "1", "--out", "out"],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 2, "stderr: {}", stderr(&out));
    let table = std::fs::read_to_string(dir.path().join("out/summary.tsv")).unwrap();
    assert!(table.contains("limit-exceeded"));
    assert!(stderr(&out).contains("sweep cells failed"));
}

#[test]
fn recorded_traces_replay_to_the_same_moves() {
    let dir = tempfile::tempdir().unwrap();
    let rec = maxmatch(
        &[
            "run", "--generate", "chain:2", "--strategy", "central-random", "--seed", "5",
            "--init", "clean", "--out", "rec",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&rec), 0, "stderr: {}", stderr(&rec));
    let replayed = maxmatch(
        &[
            "run", "--generate", "chain:2", "--strategy", "replay:rec/trace.txt", "--init",
            "clean", "--out", "rep",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&replayed), 0, "stderr: {}", stderr(&replayed));
    let data = |p: &str| -> String {
        std::fs::read_to_string(dir.path().join(p))
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(data("rec/trace.txt"), data("rep/trace.txt"));
}

#[test]
fn replay_rejects_a_trace_from_a_different_instance() {
    let dir = tempfile::tempdir().unwrap();
    let rec = maxmatch(
        &["run", "--generate", "chain:2", "--out", "rec"],
        dir.path(),
    );
    assert_eq!(exit_code(&rec), 0);
    let out = maxmatch(
        &["run", "--generate", "chain:3", "--strategy", "replay:rec/trace.txt", "--out", "x"],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 3, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("recorded on instance"));
}

#[test]
fn graph_files_feed_runs() {
    let dir = tempfile::tempdir().unwrap();
    // The 4-cycle with a perfect matching, hand-written in the file format.
    std::fs::write(dir.path().join("c4.graph"), "4 4\n1 2 1\n2 3 0\n3 4 1\n1 4 0\n").unwrap();
    let out = maxmatch(
        &["run", "--graph", "c4.graph", "--strategy", "sync", "--out", "out"],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("c4"));

    // Greedy recomputation from the same file also works.
    let out = maxmatch(
        &["run", "--graph", "c4.graph", "--matching", "greedy", "--out", "out2"],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));

    // A non-maximal flag column is rejected as input error: matching only
    // (1,2) leaves the edge (3,4) with both endpoints unmatched.
    std::fs::write(dir.path().join("bad.graph"), "4 3\n1 2 1\n2 3 0\n3 4 0\n").unwrap();
    let out = maxmatch(&["run", "--graph", "bad.graph", "--out", "o"], dir.path());
    assert_eq!(exit_code(&out), 3);
    assert!(stderr(&out).contains("maximal"));
}

#[test]
fn config_files_drive_runs_with_repetitions() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("exp.toml"),
        "seed = 3\nstrategy = \"adversarial\"\ninit = \"random\"\nrepetitions = 2\n\n\
         [graph]\ngenerate = \"cycle:6\"\n",
    )
    .unwrap();
    let out = maxmatch(&["run", "--config", "exp.toml", "--out", "out"], dir.path());
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    for file in ["trace-0.txt", "trace-1.txt", "stats-0.tsv", "report-1.tsv"] {
        assert!(dir.path().join("out").join(file).exists(), "missing {file}");
    }
    // Repetition seeds are seed+0, seed+1.
    let t1 = std::fs::read_to_string(dir.path().join("out/trace-1.txt")).unwrap();
    assert!(t1.contains("seed 4"), "{t1}");
}

#[test]
fn identical_invocations_write_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        [
            "run".to_string(),
            "--generate".into(),
            "random:14:0.3:7".into(),
            "--strategy".into(),
            "distributed-random".into(),
            "--seed".into(),
            "11".into(),
            "--init".into(),
            "random".into(),
            "--out".into(),
            out.to_string(),
        ]
    };
    for out in ["a", "b"] {
        let owned = args(out);
        let argv: Vec<&str> = owned.iter().map(String::as_str).collect();
        let r = maxmatch(&argv, dir.path());
        assert_eq!(exit_code(&r), 0, "stderr: {}", stderr(&r));
    }
    for file in ["trace.txt", "stats.tsv", "report.tsv"] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical invocations");
    }
}
