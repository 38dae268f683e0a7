//! Symbolic safety games built from AIGER specifications.
//!
//! The system picks the controllable inputs after seeing the current state
//! and the uncontrollable inputs (Mealy); it loses as soon as the error
//! output is raised. The losing region is the least fixpoint of the
//! uncontrollable-predecessor operator, starting from the empty set.

mod strategy;

use std::collections::HashMap;

use log::debug;
use thiserror::Error;

use crate::aiger::{Aig, AigerError, InputPartition, Literal, SymbolKind};
use crate::dd::{Bdd, BddManager, Var};

pub use strategy::{CounterStrategy, Strategy};

#[derive(Debug, Error)]
pub enum GameError {
    #[error(transparent)]
    Aiger(#[from] AigerError),
    #[error("specification is not realizable")]
    NotRealizable,
    #[error("specification is realizable")]
    IsRealizable,
}

#[derive(Debug)]
pub struct Game {
    pub manager: BddManager,
    /// Current-state variable per latch, in latch order.
    pub state_vars: Vec<Var>,
    /// Next-state variable per latch, interleaved with `state_vars` in the order.
    pub next_vars: Vec<Var>,
    /// One per uncontrollable input, in input order.
    pub uncontrollable: Vec<Var>,
    /// One per controllable input, in input order.
    pub controllable: Vec<Var>,
    /// Next-state function per latch over (state, uncontrollable, controllable).
    pub next_fns: Vec<Bdd>,
    pub err_fn: Bdd,
    /// The all-zero state.
    pub init: Bdd,
    pub partition: InputPartition,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub realizable: bool,
    pub winning_region: Bdd,
    /// `rings[k]` holds the states from which the environment forces the
    /// error within `k` steps; `rings[0]` is empty and the last two rings
    /// are equal.
    pub rings: Vec<Bdd>,
    pub iterations: usize,
}

impl SolveResult {
    pub fn losing_region(&self) -> Bdd {
        *self.rings.last().expect("at least one ring")
    }
}

/// Builds BDDs for every variable of `aig`, given the BDDs of its inputs
/// and latch outputs, with one topological pass over the AND gates.
pub(crate) fn circuit_bdds(
    m: &mut BddManager,
    aig: &Aig,
    inputs: &[Bdd],
    latches: &[Bdd],
) -> Result<HashMap<u32, Bdd>, AigerError> {
    let mut values: HashMap<u32, Bdd> = HashMap::with_capacity(aig.max_var as usize + 1);
    values.insert(0, m.ff());
    for (lit, &f) in aig.inputs.iter().zip(inputs) {
        values.insert(lit.var(), f);
    }
    for (latch, &f) in aig.latches.iter().zip(latches) {
        values.insert(latch.lit.var(), f);
    }
    for i in aig.topological_order()? {
        let g = aig.ands[i];
        let a = lit_bdd(m, &values, g.rhs0)?;
        let b = lit_bdd(m, &values, g.rhs1)?;
        let f = m.and(a, b);
        values.insert(g.lhs.var(), f);
    }
    Ok(values)
}

pub(crate) fn lit_bdd(m: &mut BddManager, values: &HashMap<u32, Bdd>, lit: Literal) -> Result<Bdd, AigerError> {
    let f = *values
        .get(&lit.var())
        .ok_or(AigerError::UndefinedLiteral(lit.0))?;
    Ok(if lit.is_negated() { m.not(f) } else { f })
}

fn input_name(aig: &Aig, pos: usize) -> String {
    aig.symbol(SymbolKind::Input, pos)
        .map(str::to_string)
        .unwrap_or_else(|| format!("i{pos}"))
}

impl Game {
    /// Builds the game for a single-output specification.
    pub fn build(aig: &Aig, partition: &InputPartition) -> Result<Game, GameError> {
        if aig.outputs.len() != 1 {
            return Err(AigerError::NotSingleOutput(aig.outputs.len()).into());
        }
        aig.definitions()?;
        let mut m = BddManager::new();
        let mut state_vars = Vec::with_capacity(aig.latches.len());
        let mut next_vars = Vec::with_capacity(aig.latches.len());
        for i in 0..aig.latches.len() {
            let name = aig
                .symbol(SymbolKind::Latch, i)
                .map(str::to_string)
                .unwrap_or_else(|| format!("l{i}"));
            state_vars.push(m.new_var(name.clone()));
            next_vars.push(m.new_var(format!("{name}'")));
        }
        let uncontrollable: Vec<Var> = partition
            .uncontrollable
            .iter()
            .map(|&i| m.new_var(input_name(aig, i)))
            .collect();
        let controllable: Vec<Var> = partition
            .controllable
            .iter()
            .map(|&i| m.new_var(input_name(aig, i)))
            .collect();

        let mut input_bdds = vec![m.ff(); aig.inputs.len()];
        for (&pos, &v) in partition.uncontrollable.iter().zip(&uncontrollable) {
            input_bdds[pos] = m.var(v).expect("registered");
        }
        for (&pos, &v) in partition.controllable.iter().zip(&controllable) {
            input_bdds[pos] = m.var(v).expect("registered");
        }
        let latch_bdds: Vec<Bdd> = state_vars.iter().map(|&v| m.var(v).expect("registered")).collect();
        let values = circuit_bdds(&mut m, aig, &input_bdds, &latch_bdds)?;

        let next_fns = aig
            .latches
            .iter()
            .map(|l| lit_bdd(&mut m, &values, l.next))
            .collect::<Result<Vec<_>, _>>()?;
        let err_fn = lit_bdd(&mut m, &values, aig.outputs[0])?;
        let zero: Vec<Bdd> = state_vars.iter().map(|&v| m.nvar(v).expect("registered")).collect();
        let init = m.and_all(zero);

        Ok(Game {
            manager: m,
            state_vars,
            next_vars,
            uncontrollable,
            controllable,
            next_fns,
            err_fn,
            init,
            partition: partition.clone(),
        })
    }

    /// Convenience: classify the inputs of `aig` and build its game.
    pub fn from_spec(aig: &Aig) -> Result<Game, GameError> {
        let partition = aig.classify_spec()?;
        Self::build(aig, &partition)
    }

    fn next_substitution(&self) -> HashMap<Var, Bdd> {
        self.state_vars
            .iter()
            .copied()
            .zip(self.next_fns.iter().copied())
            .collect()
    }

    /// `set` evaluated on the successor state: `set(next(s, u, c))`.
    pub fn successor_in(&mut self, set: Bdd) -> Bdd {
        let subst = self.next_substitution();
        self.manager
            .compose_vector(set, &subst)
            .expect("game variables are registered")
    }

    /// States from which the environment can force, in one step, either the
    /// error or a successor inside `set`: `∃u ∀c. err ∨ set(next)`.
    pub fn upre(&mut self, set: Bdd) -> Bdd {
        let succ = self.successor_in(set);
        let bad = self.manager.or(self.err_fn, succ);
        let forced = self
            .manager
            .forall(&self.controllable, bad)
            .expect("game variables are registered");
        self.manager
            .exists(&self.uncontrollable, forced)
            .expect("game variables are registered")
    }

    /// Iterates `L(k+1) = L(k) ∨ upre(L(k))` from `L(0) = ∅` to the fixpoint.
    pub fn solve(&mut self) -> SolveResult {
        let mut rings = vec![self.manager.ff()];
        loop {
            let last = *rings.last().expect("nonempty");
            let pre = self.upre(last);
            let next = self.manager.or(last, pre);
            debug!(
                "ring {}: {} nodes ({} allocated)",
                rings.len(),
                self.manager.node_count(next),
                self.manager.allocated_nodes()
            );
            rings.push(next);
            if next == last {
                break;
            }
        }
        let losing = *rings.last().expect("nonempty");
        let winning_region = self.manager.not(losing);
        let realizable = self.manager.and(self.init, losing).is_false();
        SolveResult {
            realizable,
            winning_region,
            iterations: rings.len() - 1,
            rings,
        }
    }

    /// Moves the system may take: `¬err ∧ W(next)` over (state, u, c).
    pub fn permissible_moves(&mut self, winning_region: Bdd) -> Bdd {
        let succ = self.successor_in(winning_region);
        let safe = self.manager.not(self.err_fn);
        self.manager.and(safe, succ)
    }

    /// Symbolic soundness check: every state of `winning_region`, under
    /// every uncontrollable input, stays safe and inside the region when the
    /// controllable inputs follow `strategy`.
    pub fn strategy_is_sound(&mut self, winning_region: Bdd, strategy: &Strategy) -> bool {
        let moves = self.permissible_moves(winning_region);
        let subst: HashMap<Var, Bdd> = self
            .controllable
            .iter()
            .copied()
            .zip(strategy.functions.iter().copied())
            .collect();
        let under = self
            .manager
            .compose_vector(moves, &subst)
            .expect("game variables are registered");
        self.manager.leq(winning_region, under)
    }
}
