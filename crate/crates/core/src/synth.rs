//! Lowering of strategies and winning regions to AIGER circuits.
//!
//! A solution is the specification circuit with every controllable input
//! turned into a gate-driven signal. The input keeps its variable index and
//! becomes the left-hand side of an AND gate, so every consumer inside the
//! specification is untouched. Controllers are combinational over the spec
//! latches and uncontrollable inputs; no latches are added.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::aiger::{AigBuilder, Aig, AigerError, AndGate, Literal, SymbolKind};
use crate::dd::{Bdd, BddManager, Var};
use crate::game::{CounterStrategy, Game, Strategy};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("BDD variable {0} has no circuit literal")]
    UnmappedVariable(u32),
    #[error("strategy has {found} functions but the game has {expected} driven inputs")]
    StrategyMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Aiger(#[from] AigerError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub circuit: Aig,
    pub controller_and_count: usize,
    pub controller_latch_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessCircuit {
    pub circuit: Aig,
}

/// Multiplexer lowering of BDD nodes into AND gates, memoized per node so
/// that shared subgraphs are emitted once.
pub struct BddLowering<'a> {
    manager: &'a BddManager,
    var_to_lit: &'a HashMap<Var, Literal>,
    memo: HashMap<Bdd, Literal>,
}

impl<'a> BddLowering<'a> {
    pub fn new(manager: &'a BddManager, var_to_lit: &'a HashMap<Var, Literal>) -> Self {
        BddLowering {
            manager,
            var_to_lit,
            memo: HashMap::new(),
        }
    }

    /// Returns a literal of `sink` computing `f`, adding at most three gates
    /// per BDD node.
    pub fn lower(&mut self, f: Bdd, sink: &mut AigBuilder) -> Result<Literal, SynthError> {
        if f.is_false() {
            return Ok(Literal::FALSE);
        }
        if f.is_true() {
            return Ok(Literal::TRUE);
        }
        if let Some(&lit) = self.memo.get(&f) {
            return Ok(lit);
        }
        let (var, lo, hi) = self.manager.decompose(f).expect("non-constant");
        let x = *self.var_to_lit.get(&var).ok_or(SynthError::UnmappedVariable(var.0))?;
        let l = self.lower(lo, sink)?;
        let h = self.lower(hi, sink)?;
        let lit = match (h, l) {
            (Literal::TRUE, Literal::FALSE) => x,
            (Literal::FALSE, Literal::TRUE) => !x,
            (Literal::TRUE, _) => !sink.and_gate(!x, !l),
            (Literal::FALSE, _) => sink.and_gate(!x, l),
            (_, Literal::TRUE) => !sink.and_gate(x, !h),
            (_, Literal::FALSE) => sink.and_gate(x, h),
            _ => {
                let t = sink.and_gate(x, h);
                let e = sink.and_gate(!x, l);
                !sink.and_gate(!t, !e)
            }
        };
        self.memo.insert(f, lit);
        Ok(lit)
    }
}

/// One-shot form of [`BddLowering::lower`].
pub fn bdd_to_gates(
    manager: &BddManager,
    f: Bdd,
    var_to_lit: &HashMap<Var, Literal>,
    sink: &mut AigBuilder,
) -> Result<Literal, SynthError> {
    BddLowering::new(manager, var_to_lit).lower(f, sink)
}

/// Merges a controller into the specification: each controllable input is
/// redefined by its strategy function over latches and uncontrollable inputs.
pub fn encode_solution(spec: &Aig, game: &Game, strategy: &Strategy) -> Result<Solution, SynthError> {
    if strategy.functions.len() != game.controllable.len() {
        return Err(SynthError::StrategyMismatch {
            expected: game.controllable.len(),
            found: strategy.functions.len(),
        });
    }
    let mut var_to_lit = latch_literals(spec, game);
    for (&v, &pos) in game.uncontrollable.iter().zip(&game.partition.uncontrollable) {
        var_to_lit.insert(v, spec.inputs[pos]);
    }
    let driven: Vec<(usize, Bdd)> = game
        .partition
        .controllable
        .iter()
        .copied()
        .zip(strategy.functions.iter().copied())
        .collect();
    drive_inputs(spec, &game.manager, &var_to_lit, &driven)
}

/// Environment counterpart of [`encode_solution`]: the uncontrollable inputs
/// are redefined by the Moore counter-strategy over the latches, and the
/// controllable inputs stay free.
pub fn encode_counter_strategy(
    spec: &Aig,
    game: &Game,
    counter: &CounterStrategy,
) -> Result<Solution, SynthError> {
    if counter.functions.len() != game.uncontrollable.len() {
        return Err(SynthError::StrategyMismatch {
            expected: game.uncontrollable.len(),
            found: counter.functions.len(),
        });
    }
    let var_to_lit = latch_literals(spec, game);
    let driven: Vec<(usize, Bdd)> = game
        .partition
        .uncontrollable
        .iter()
        .copied()
        .zip(counter.functions.iter().copied())
        .collect();
    drive_inputs(spec, &game.manager, &var_to_lit, &driven)
}

fn latch_literals(spec: &Aig, game: &Game) -> HashMap<Var, Literal> {
    game.state_vars
        .iter()
        .copied()
        .zip(spec.latches.iter().map(|l| l.lit))
        .collect()
}

fn drive_inputs(
    spec: &Aig,
    manager: &BddManager,
    var_to_lit: &HashMap<Var, Literal>,
    driven: &[(usize, Bdd)],
) -> Result<Solution, SynthError> {
    let is_driven: Vec<bool> = {
        let mut v = vec![false; spec.inputs.len()];
        for &(pos, _) in driven {
            v[pos] = true;
        }
        v
    };

    // Controller gates are built in a scratch builder that continues the
    // spec's variable numbering, then appended after the spec gates.
    let first_fresh = spec.max_var + 1;
    let mut scratch = AigBuilder::from_aig(Aig {
        max_var: spec.max_var,
        ..Aig::default()
    });
    let mut lowering = BddLowering::new(manager, var_to_lit);
    let drivers = driven
        .iter()
        .map(|&(_, f)| lowering.lower(f, &mut scratch))
        .collect::<Result<Vec<_>, _>>()?;
    let mut gates = scratch.build().ands;

    // A driver that is a fresh, positive, unclaimed gate output is renamed
    // to the input variable; anything else gets a buffer gate.
    let mut rename: HashMap<u32, u32> = HashMap::new();
    let mut buffers = Vec::new();
    for (&(pos, _), &driver) in driven.iter().zip(&drivers) {
        let input = spec.inputs[pos];
        let claimable = !driver.is_negated()
            && driver.var() >= first_fresh
            && !rename.contains_key(&driver.var());
        if claimable {
            rename.insert(driver.var(), input.var());
        } else {
            buffers.push((input, driver));
        }
    }
    let remap = |lit: Literal, rename: &HashMap<u32, u32>| match rename.get(&lit.var()) {
        Some(&v) => Literal::from_var(v, lit.is_negated()),
        None => lit,
    };
    // Close the holes left by renamed gates.
    let mut next = first_fresh;
    for g in &gates {
        if let std::collections::hash_map::Entry::Vacant(e) = rename.entry(g.lhs.var()) {
            e.insert(next);
            next += 1;
        }
    }
    for g in &mut gates {
        *g = AndGate {
            lhs: remap(g.lhs, &rename),
            rhs0: remap(g.rhs0, &rename),
            rhs1: remap(g.rhs1, &rename),
        };
    }
    for (input, driver) in buffers {
        let d = remap(driver, &rename);
        gates.push(AndGate {
            lhs: input,
            rhs0: d,
            rhs1: d,
        });
    }

    let mut symbols = BTreeMap::new();
    let mut new_pos = 0;
    let mut inputs = Vec::new();
    for (pos, &lit) in spec.inputs.iter().enumerate() {
        if is_driven[pos] {
            continue;
        }
        if let Some(name) = spec.symbol(SymbolKind::Input, pos) {
            symbols.insert((SymbolKind::Input, new_pos), name.to_string());
        }
        inputs.push(lit);
        new_pos += 1;
    }
    for (&(kind, pos), name) in &spec.symbols {
        if kind != SymbolKind::Input {
            symbols.insert((kind, pos), name.clone());
        }
    }

    let controller_and_count = gates.len();
    let mut ands = spec.ands.clone();
    ands.extend(gates);
    let circuit = Aig {
        max_var: next - 1,
        inputs,
        latches: spec.latches.clone(),
        ands,
        outputs: spec.outputs.clone(),
        symbols,
        comments: spec.comments.clone(),
    };
    circuit.validate()?;
    Ok(Solution {
        circuit,
        controller_and_count,
        controller_latch_count: 0,
    })
}

/// Combinational circuit with one input per spec latch (in latch order)
/// whose single output is the characteristic function of `region`.
pub fn encode_witness(game: &Game, region: Bdd) -> Result<WitnessCircuit, SynthError> {
    let mut builder = AigBuilder::new();
    let mut var_to_lit = HashMap::new();
    for &v in &game.state_vars {
        let lit = builder.input(game.manager.var_name(v));
        var_to_lit.insert(v, lit);
    }
    let out = bdd_to_gates(&game.manager, region, &var_to_lit, &mut builder)?;
    builder.output(out, Some("winning_region"));
    Ok(WitnessCircuit {
        circuit: builder.build(),
    })
}
