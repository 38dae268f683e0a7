use arena_bench::corpus_circuits;
use arena_core::aiger::{emit_ascii, parse};
use arena_core::synth::{encode_solution, encode_witness};
use arena_core::verify::{check_witness, model_check, Budget};
use arena_core::Game;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

const INSTANCES: &[&str] = &[
    "counter_race_6.aag",
    "saturate_8.aag",
    "mux_arbiter_3.aag",
    "echo_8.aag",
    "predict_6.aag",
];

fn solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve");
    for (name, spec) in corpus_circuits(INSTANCES) {
        g.bench_with_input(BenchmarkId::from_parameter(&name), &spec, |b, spec| {
            b.iter(|| Game::from_spec(black_box(spec)).unwrap().solve().realizable)
        });
    }
    g.finish();
}

fn synthesize_and_verify(c: &mut Criterion) {
    let mut g = c.benchmark_group("synthesis");
    for (name, spec) in corpus_circuits(INSTANCES) {
        let mut game = Game::from_spec(&spec).unwrap();
        let result = game.solve();
        if !result.realizable {
            continue;
        }
        let strategy = game.extract_strategy(&result).unwrap();
        g.bench_function(BenchmarkId::new("encode", &name), |b| {
            b.iter(|| encode_solution(&spec, &game, black_box(&strategy)).unwrap())
        });
        let solution = encode_solution(&spec, &game, &strategy).unwrap().circuit;
        let witness = encode_witness(&game, result.winning_region).unwrap().circuit;
        g.bench_function(BenchmarkId::new("check_witness", &name), |b| {
            b.iter(|| check_witness(&spec, black_box(&solution), &witness).unwrap())
        });
        g.bench_function(BenchmarkId::new("model_check", &name), |b| {
            b.iter(|| model_check(black_box(&solution), Budget::default()))
        });
    }
    g.finish();
}

fn round_trip(c: &mut Criterion) {
    let (name, spec) = corpus_circuits(&["mux_arbiter_4.aag"]).remove(0);
    let text = emit_ascii(&spec);
    c.bench_function(&format!("parse/{name}"), |b| b.iter(|| parse(black_box(&text)).unwrap()));
}

criterion_group!(benches, solve, synthesize_and_verify, round_trip);
criterion_main!(benches);
