use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use arena_core::aiger::{emit_ascii, parse, Simulator, Status};
use arena_core::bench::{gen_counter_race, gen_predict};
use arena_core::explicit::{bits, pack, ExplicitGame};

fn arena(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arena")).args(args).current_dir(cwd).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_realizable_writes_verifiable_solution() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_counter_race(3).unwrap();
    fs::write(dir.path().join("spec.aag"), emit_ascii(inst.circuit.as_ref().unwrap())).unwrap();
    let o = arena(&["solve", "spec.aag", "--synth", "sol.aag", "--witness"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "REALIZABLE");
    assert!(dir.path().join("sol.winregion.aag").exists());

    let o = arena(
        &["verify", "--spec", "spec.aag", "--solution", "sol.aag", "--witness", "sol.winregion.aag"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("VERDICT VERIFIED witness"));

    // Binary output parses to the same circuit.
    let o = arena(&["solve", "spec.aag", "--synth", "sol.aig", "--binary"], dir.path());
    assert!(o.status.success());
    let ascii = parse(&fs::read(dir.path().join("sol.aag")).unwrap()).unwrap();
    let binary = parse(&fs::read(dir.path().join("sol.aig")).unwrap()).unwrap();
    assert_eq!(ascii.ands.len(), binary.ands.len());
}

#[test]
fn verify_rejects_the_spec_as_its_own_solution() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_counter_race(2).unwrap();
    fs::write(dir.path().join("spec.aag"), emit_ascii(inst.circuit.as_ref().unwrap())).unwrap();
    let o = arena(&["verify", "--spec", "spec.aag", "--solution", "spec.aag"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("VERDICT FALSIFIED"));
}

#[test]
fn solve_unrealizable_writes_counter_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen_predict(2).unwrap();
    let spec = inst.circuit.unwrap();
    fs::write(dir.path().join("spec.aag"), emit_ascii(&spec)).unwrap();
    let o = arena(&["solve", "spec.aag", "--counterstrategy", "cs.aag"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "UNREALIZABLE");

    let cs = parse(&fs::read(dir.path().join("cs.aag")).unwrap()).unwrap();
    let partition = spec.classify_spec().unwrap();
    let sim = Simulator::new(&cs).unwrap();
    let l = spec.latches.len();
    let oracle = ExplicitGame::new(&spec, &partition);
    assert!(oracle.counter_strategy_decreases_rank(|s| {
        let v = sim.eval(&vec![false; partition.controllable.len()], &bits(s, l));
        pack(&partition.uncontrollable.iter().map(|&p| v.lit(spec.inputs[p])).collect::<Vec<_>>())
    }));
}

#[test]
fn unreadable_input_fails_without_a_token() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.aag"), "aag 1 garbage\n").unwrap();
    for file in ["bad.aag", "missing.aag"] {
        let o = arena(&["solve", file], dir.path());
        assert_eq!(o.status.code(), Some(2));
        let out = stdout(&o);
        assert!(!out.contains("REALIZABLE"), "{out}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("arena: "));
    }
}

#[test]
fn gen_and_select() {
    let dir = tempfile::tempdir().unwrap();
    assert!(arena(&["gen", "--out", "repo"], dir.path()).status.success());
    let index: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("repo/index.json")).unwrap()).unwrap();
    let entries = index.as_array().unwrap();
    assert_eq!(entries.len(), 60);
    for e in entries {
        assert!(dir.path().join("repo").join(e["file"].as_str().unwrap()).exists());
    }

    let o = arena(&["select", "--bench", "repo", "--quota", "2", "--seed", "9"], dir.path());
    assert!(o.status.success());
    let picked: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // Two per category, three categories.
    assert_eq!(picked.as_array().unwrap().len(), 6);
}

/// The solver entered in its own competition over the whole corpus never
/// answers wrongly, in either subtrack.
#[test]
fn self_entrant_is_never_wrong() {
    let dir = tempfile::tempdir().unwrap();
    let exe = env!("CARGO_BIN_EXE_arena");
    fs::write(
        dir.path().join("tools.toml"),
        format!(
            "[[tool]]\nname = \"synth\"\ncommand = \"{exe} solve {{input}} --synth {{output}} --witness {{witness}}\"\nsubtrack = \"synthesis\"\n\n\
             [[tool]]\nname = \"real\"\ncommand = \"{exe} solve {{input}}\"\nsubtrack = \"realizability\"\n"
        ),
    )
    .unwrap();
    assert!(arena(&["gen", "--out", "repo"], dir.path()).status.success());
    let o = arena(&["run", "--tools", "tools.toml", "--bench", "repo", "--out", "out"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = arena(&["score", "--records", "out/records.json", "--bench", "repo", "--out", "scores"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("synth"));

    let board: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("scores/scoreboard.json")).unwrap()).unwrap();
    let mut tools = 0;
    for b in board["boards"].as_array().unwrap() {
        for t in b["tools"].as_array().unwrap() {
            tools += 1;
            assert_eq!(t["wrong"], 0, "{t}");
            assert_eq!(t["crashes"], 0, "{t}");
        }
    }
    assert_eq!(tools, 2);
    for name in ["results.csv", "ranking.txt", "cactus.csv"] {
        assert!(dir.path().join("scores").join(name).exists());
    }
    let index: Vec<serde_json::Value> =
        serde_json::from_slice(&fs::read(dir.path().join("repo/index.json")).unwrap()).unwrap();
    let known = index.iter().filter(|e| e["status"] != serde_json::json!(Status::Unknown)).count();
    assert!(known >= 50);
}
