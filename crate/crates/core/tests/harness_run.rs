//! Running real child processes under the harness.

use std::fs;
use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};

use arena_core::aiger::Status;
use arena_core::bench::{gen_counter_race, BenchmarkInstance};
use arena_core::harness::{run_all, run_job, Answer, Job, Limits, Mode, Subtrack, ToolConfig};
use arena_core::verify::VerdictStatus;

struct Sandbox {
    dir: tempfile::TempDir,
    bench: BenchmarkInstance,
}

impl Sandbox {
    fn new() -> Sandbox {
        let dir = tempfile::tempdir().unwrap();
        let mut bench = gen_counter_race(2).unwrap();
        fs::write(dir.path().join(&bench.file), arena_core::aiger::emit_ascii(bench.circuit.as_ref().unwrap())).unwrap();
        bench.circuit = None;
        Sandbox { dir, bench }
    }

    fn root(&self) -> &Path {
        self.dir.path()
    }

    fn scratch(&self) -> PathBuf {
        self.dir.path().join("scratch")
    }

    /// An executable shell script; returns its path.
    fn script(&self, name: &str, body: &str) -> String {
        let path = self.dir.path().join(name);
        fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
        fs::set_permissions(&path, fs::Permissions::from_mode(0o755)).unwrap();
        path.display().to_string()
    }

    fn run(&self, command: &str, subtrack: Subtrack, limits: &Limits) -> arena_core::RunRecord {
        let tool = ToolConfig::new("t", command, subtrack);
        run_job(&tool, &self.bench, self.root(), limits, &self.scratch()).unwrap()
    }
}

fn limits(timeout: f64, mode: Mode) -> Limits {
    Limits {
        timeout,
        mode: Some(mode),
        ..Default::default()
    }
}

#[test]
fn realizable_token() {
    let sb = Sandbox::new();
    let s = sb.script("ok.sh", "echo comment; echo REALIZABLE");
    let r = sb.run(&format!("{s} {{input}}"), Subtrack::Realizability, &limits(10.0, Mode::Sequential));
    assert_eq!(r.answer, Answer::Realizable);
    assert_eq!(r.exit_code, Some(0));
    assert!(r.wall_seconds < 5.0);
}

#[test]
fn sleeping_tool_times_out_in_parallel_mode() {
    let sb = Sandbox::new();
    let s = sb.script("sleep.sh", "sleep 5; echo REALIZABLE");
    let r = sb.run(&s, Subtrack::Realizability, &limits(0.5, Mode::Parallel));
    assert_eq!(r.answer, Answer::Timeout);
    assert!(r.wall_seconds < 3.0);
}

#[test]
fn sleeping_tool_hits_the_sequential_wall_guard() {
    let sb = Sandbox::new();
    let s = sb.script("sleep.sh", "sleep 30");
    let r = sb.run(&s, Subtrack::Realizability, &limits(0.2, Mode::Sequential));
    assert_eq!(r.answer, Answer::Timeout);
    assert!(r.wall_seconds < 10.0);
}

#[test]
fn garbage_and_failure_is_a_crash() {
    let sb = Sandbox::new();
    let s = sb.script("bad.sh", "echo garbage; exit 1");
    let r = sb.run(&s, Subtrack::Realizability, &limits(10.0, Mode::Sequential));
    assert_eq!(r.answer, Answer::Crash);
    assert_eq!(r.exit_code, Some(1));
}

#[test]
fn missing_executable_is_a_spawn_failure_or_crash() {
    let sb = Sandbox::new();
    let tool = ToolConfig::new("t", "/nonexistent/solver {input}", Subtrack::Realizability);
    let err = run_job(&tool, &sb.bench, sb.root(), &Limits::default(), &sb.scratch());
    assert!(matches!(err, Err(arena_core::harness::HarnessError::SpawnFailure { .. })));
    let job = Job { tool, benchmark: sb.bench.clone() };
    let records = run_all(&[job], sb.root(), &Limits::default(), 1, &sb.scratch(), None).unwrap();
    assert_eq!(records[0].answer, Answer::Crash);
}

#[test]
fn synthesis_solutions_are_verified() {
    let sb = Sandbox::new();
    // The "tool" copies a solution produced by the solver in-process.
    let solution = sb.dir.path().join("good.aag");
    let spec = fs::read_to_string(sb.root().join(&sb.bench.file)).unwrap();
    let spec_aig = arena_core::aiger::parse(spec.as_bytes()).unwrap();
    let mut game = arena_core::Game::from_spec(&spec_aig).unwrap();
    let res = game.solve();
    let strat = game.extract_strategy(&res).unwrap();
    let sol = arena_core::synth::encode_solution(&spec_aig, &game, &strat).unwrap();
    fs::write(&solution, arena_core::aiger::emit_ascii(&sol.circuit)).unwrap();
    let s = sb.script("synth.sh", &format!("cp {} \"$1\"; echo REALIZABLE", solution.display()));
    let r = sb.run(&format!("{s} {{output}}"), Subtrack::Synthesis, &limits(10.0, Mode::Sequential));
    assert_eq!(r.answer, Answer::Realizable);
    let v = r.verdict.unwrap();
    assert_eq!(v.status, VerdictStatus::Verified);
    assert_eq!(r.size.unwrap().and_gates, sol.circuit.ands.len());

    // Claiming realizability without writing a solution is falsified.
    let s = sb.script("lazy.sh", "echo REALIZABLE");
    let r = sb.run(&s, Subtrack::Synthesis, &limits(10.0, Mode::Sequential));
    assert_eq!(r.verdict.unwrap().status, VerdictStatus::Falsified);
    assert_eq!(sb.bench.status, Status::Realizable);
}

#[test]
fn pool_preserves_job_order() {
    let sb = Sandbox::new();
    let jobs: Vec<Job> = (0..4)
        .map(|i| {
            let word = if i % 2 == 0 { "REALIZABLE" } else { "UNREALIZABLE" };
            let s = sb.script(&format!("t{i}.sh"), &format!("echo {word}"));
            Job { tool: ToolConfig::new(&format!("t{i}"), &s, Subtrack::Realizability), benchmark: sb.bench.clone() }
        })
        .collect();
    let records = run_all(&jobs, sb.root(), &limits(10.0, Mode::Parallel), 3, &sb.scratch(), None).unwrap();
    let answers: Vec<Answer> = records.iter().map(|r| r.answer).collect();
    assert_eq!(answers, [Answer::Realizable, Answer::Unrealizable, Answer::Realizable, Answer::Unrealizable]);
    assert!(records.iter().all(|r| r.mode == Mode::Parallel));
}
