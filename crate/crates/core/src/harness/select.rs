use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::HarnessError;
use crate::bench::BenchmarkInstance;

/// Picks up to `quota` instances per category, round-robin over difficulty
/// buckets 1..=5 so every bucket is represented before any is repeated.
/// Each bucket is shuffled by a generator seeded with `seed`; categories
/// are visited in name order.
pub fn select_benchmarks(
    index: &[BenchmarkInstance],
    quota: usize,
    seed: u64,
) -> Result<Vec<BenchmarkInstance>, HarnessError> {
    if index.is_empty() {
        return Err(HarnessError::EmptyIndex);
    }
    let mut categories: BTreeMap<&str, BTreeMap<u8, Vec<&BenchmarkInstance>>> = BTreeMap::new();
    for inst in index {
        categories
            .entry(&inst.category)
            .or_default()
            .entry(inst.difficulty_hint)
            .or_default()
            .push(inst);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut selected = Vec::new();
    for buckets in categories.values_mut() {
        for bucket in buckets.values_mut() {
            bucket.shuffle(&mut rng);
        }
        let available: usize = buckets.values().map(Vec::len).sum();
        let want = quota.min(available);
        let mut taken = 0;
        let mut round = 0;
        while taken < want {
            for bucket in buckets.values() {
                if taken == want {
                    break;
                }
                if let Some(inst) = bucket.get(round) {
                    selected.push((*inst).clone());
                    taken += 1;
                }
            }
            round += 1;
        }
    }
    Ok(selected)
}
