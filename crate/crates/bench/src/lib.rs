//! Shared fixtures for the criterion benchmarks.

use arena_core::bench::{default_plan, generate_plan};
use arena_core::Aig;

/// Corpus circuits whose file names end in one of `names`, in corpus order.
pub fn corpus_circuits(names: &[&str]) -> Vec<(String, Aig)> {
    generate_plan(&default_plan())
        .expect("default plan is valid")
        .into_iter()
        .filter(|i| names.iter().any(|n| i.file.ends_with(n)))
        .map(|i| (i.name(), i.circuit.expect("generated instances carry circuits")))
        .collect()
}
