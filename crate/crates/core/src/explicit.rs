//! Explicit-state reference solver for small safety games.
//!
//! Enumerates every (state, uncontrollable, controllable) triple by gate
//! simulation and runs backward induction over the full state graph. It
//! shares no code with the symbolic engine and exists to cross-check it.

use rand::Rng;

use crate::aiger::{Aig, AigBuilder, InputPartition, Literal, Simulator};

pub struct ExplicitGame {
    pub latches: usize,
    pub uncontrollable: usize,
    pub controllable: usize,
    /// `(err, next state)` indexed by `(state, u, c)`.
    table: Vec<(bool, u32)>,
}

/// Bit `i` of `bits` as a bool vector of length `n`.
pub fn bits(value: u32, n: usize) -> Vec<bool> {
    (0..n).map(|i| value >> i & 1 == 1).collect()
}

pub fn pack(values: &[bool]) -> u32 {
    values
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (b as u32) << i)
}

impl ExplicitGame {
    pub fn new(aig: &Aig, partition: &InputPartition) -> ExplicitGame {
        let latches = aig.latches.len();
        let (nu, nc) = (partition.uncontrollable.len(), partition.controllable.len());
        assert!(latches + nu + nc <= 24, "game too large for enumeration");
        let sim = Simulator::new(aig).expect("acyclic circuit");
        let mut table = Vec::with_capacity(1 << (latches + nu + nc));
        let mut inputs = vec![false; aig.inputs.len()];
        for s in 0..1u32 << latches {
            let state = bits(s, latches);
            for u in 0..1u32 << nu {
                for (k, &pos) in partition.uncontrollable.iter().enumerate() {
                    inputs[pos] = u >> k & 1 == 1;
                }
                for c in 0..1u32 << nc {
                    for (k, &pos) in partition.controllable.iter().enumerate() {
                        inputs[pos] = c >> k & 1 == 1;
                    }
                    let (out, next) = sim.step(&inputs, &state);
                    table.push((out[0], pack(&next)));
                }
            }
        }
        ExplicitGame {
            latches,
            uncontrollable: nu,
            controllable: nc,
            table,
        }
    }

    pub fn from_spec(aig: &Aig) -> ExplicitGame {
        Self::new(aig, &aig.classify_spec().expect("single-output spec"))
    }

    pub fn state_count(&self) -> usize {
        1 << self.latches
    }

    pub fn step(&self, state: u32, u: u32, c: u32) -> (bool, u32) {
        let idx = ((state as usize) << (self.uncontrollable + self.controllable))
            | (u as usize) << self.controllable
            | c as usize;
        self.table[idx]
    }

    /// `∃u ∀c. err ∨ next ∈ set`, explicitly.
    pub fn upre(&self, set: &[bool]) -> Vec<bool> {
        (0..self.state_count() as u32)
            .map(|s| {
                (0..1u32 << self.uncontrollable).any(|u| {
                    (0..1u32 << self.controllable).all(|c| {
                        let (err, next) = self.step(s, u, c);
                        err || set[next as usize]
                    })
                })
            })
            .collect()
    }

    /// Ring index of every losing state (`None` for winning states).
    pub fn losing_ranks(&self) -> Vec<Option<usize>> {
        let mut rank = vec![None; self.state_count()];
        let mut losing = vec![false; self.state_count()];
        for k in 1.. {
            let pre = self.upre(&losing);
            let mut changed = false;
            for (s, &p) in pre.iter().enumerate() {
                if p && !losing[s] {
                    rank[s] = Some(k);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            for (l, p) in losing.iter_mut().zip(pre) {
                *l |= p;
            }
        }
        rank
    }

    pub fn realizable(&self) -> bool {
        self.losing_ranks()[0].is_none()
    }

    /// Checks a system strategy `(state, u) -> c` on every winning state:
    /// no error and the successor stays winning.
    pub fn strategy_keeps_winning(&self, strategy: impl Fn(u32, u32) -> u32) -> bool {
        let ranks = self.losing_ranks();
        (0..self.state_count() as u32)
            .filter(|&s| ranks[s as usize].is_none())
            .all(|s| {
                (0..1u32 << self.uncontrollable).all(|u| {
                    let (err, next) = self.step(s, u, strategy(s, u));
                    !err && ranks[next as usize].is_none()
                })
            })
    }

    /// Checks a Moore counter-strategy `state -> u`: from every losing state
    /// of rank `k`, every controllable choice raises the error or reaches a
    /// state of rank below `k`.
    pub fn counter_strategy_decreases_rank(&self, strategy: impl Fn(u32) -> u32) -> bool {
        let ranks = self.losing_ranks();
        (0..self.state_count() as u32).all(|s| {
            let Some(k) = ranks[s as usize] else {
                return true;
            };
            let u = strategy(s);
            (0..1u32 << self.controllable).all(|c| {
                let (err, next) = self.step(s, u, c);
                err || ranks[next as usize].is_some_and(|r| r < k)
            })
        })
    }
}

/// Random single-output game: `nu` uncontrollable and `nc` controllable
/// inputs, `latches` latches and up to `gates` AND gates over random
/// literals. Latch next-state functions and the error pick from all
/// signals, constants included.
pub fn random_game(rng: &mut impl Rng, latches: usize, nu: usize, nc: usize, gates: usize) -> Aig {
    let mut b = AigBuilder::new();
    let mut pool = vec![Literal::FALSE];
    for i in 0..nu {
        pool.push(b.input(Some(&format!("u{i}"))));
    }
    for i in 0..nc {
        pool.push(b.input(Some(&format!("controllable_c{i}"))));
    }
    let regs: Vec<usize> = (0..latches)
        .map(|i| {
            let (pos, lit) = b.latch(Some(&format!("x{i}")));
            pool.push(lit);
            pos
        })
        .collect();
    let pick = |rng: &mut dyn rand::RngCore, pool: &[Literal]| {
        let lit = pool[rng.gen_range(0..pool.len())];
        lit.negate_if(rng.gen_bool(0.5))
    };
    for _ in 0..gates {
        let a = pick(rng, &pool);
        let c = pick(rng, &pool);
        let g = b.and(a, c);
        if !g.is_constant() {
            pool.push(g.positive());
        }
    }
    for pos in regs {
        let next = pick(rng, &pool);
        b.set_next(pos, next);
    }
    let err = pick(rng, &pool);
    b.output(err, Some("err"));
    b.build()
}
