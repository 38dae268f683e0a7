//! Independent verification of synthesized solutions.
//!
//! Everything here is rebuilt from circuits: no state is shared with the
//! solver. A solution is first checked syntactically against its
//! specification. If a winning-region witness is supplied it is checked as
//! an inductive invariant; when that check fails the verdict is
//! inconclusive rather than negative, and full forward-reachability model
//! checking decides instead.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aiger::{Aig, AigerError, Simulator};
use crate::dd::{Bdd, BddManager, Var};
use crate::game::{circuit_bdds, lit_bdd};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("witness has {found} inputs but the specification has {expected} latches")]
    ArityMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Aiger(#[from] AigerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Verified,
    Falsified,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    WitnessCheck,
    ModelCheck,
    Syntactic,
}

/// One step of a counterexample: the inputs applied in `state`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub inputs: Vec<bool>,
    pub state: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub method: Method,
    pub detail: String,
    pub counterexample: Option<Vec<TraceStep>>,
}

impl Verdict {
    fn new(status: VerdictStatus, method: Method, detail: impl Into<String>) -> Self {
        Verdict {
            status,
            method,
            detail: detail.into(),
            counterexample: None,
        }
    }

    pub fn is_verified(&self) -> bool {
        self.status == VerdictStatus::Verified
    }
}

impl fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictStatus::Verified => "VERIFIED",
            VerdictStatus::Falsified => "FALSIFIED",
            VerdictStatus::Inconclusive => "INCONCLUSIVE",
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::WitnessCheck => "witness",
            Method::ModelCheck => "model-check",
            Method::Syntactic => "syntactic",
        })
    }
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// `VERDICT <status> <method>`, followed by one `step k: ...` line per trace step.
impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "VERDICT {} {}", self.status, self.method)?;
        for (k, step) in self.counterexample.iter().flatten().enumerate() {
            writeln!(
                f,
                "step {k}: inputs={} state={}",
                bit_string(&step.inputs),
                bit_string(&step.state)
            )?;
        }
        Ok(())
    }
}

/// Limits for model checking.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    pub max_steps: Option<usize>,
    pub time_limit: Option<Duration>,
}

/// Checks that `sol` contains `spec` verbatim: uncontrollable inputs,
/// latches, gates and the output literal, with every controllable input
/// redefined by an AND gate.
pub fn syntactic_check(spec: &Aig, sol: &Aig) -> Verdict {
    let fail = |detail: String| Verdict::new(VerdictStatus::Falsified, Method::Syntactic, detail);
    let partition = match spec.classify_spec() {
        Ok(p) => p,
        Err(e) => return fail(format!("specification: {e}")),
    };
    if let Err(e) = sol.validate().and_then(|_| sol.topological_order().map(|_| ())) {
        return fail(format!("solution is not a well-formed circuit: {e}"));
    }
    if sol.outputs != spec.outputs {
        return fail("output literal differs from the specification".into());
    }
    if sol.latches.len() < spec.latches.len() || sol.latches[..spec.latches.len()] != spec.latches[..] {
        return fail("specification latches are not preserved".into());
    }
    let expected_inputs: Vec<_> = partition.uncontrollable.iter().map(|&p| spec.inputs[p]).collect();
    if sol.inputs != expected_inputs {
        return fail("inputs must be exactly the uncontrollable inputs of the specification".into());
    }
    let sol_gates: HashSet<_> = sol.ands.iter().collect();
    if let Some(g) = spec.ands.iter().find(|g| !sol_gates.contains(g)) {
        return fail(format!("specification gate {} is missing or altered", g.lhs));
    }
    let gate_outputs: HashSet<u32> = sol.ands.iter().map(|g| g.lhs.var()).collect();
    for &p in &partition.controllable {
        let lit = spec.inputs[p];
        if !gate_outputs.contains(&lit.var()) {
            return fail(format!("controllable input {lit} is not driven by a gate"));
        }
    }
    Verdict::new(VerdictStatus::Verified, Method::Syntactic, "specification preserved")
}

/// Checks that `witness` (one input per spec latch, one output) is an
/// inductive invariant of `sol`: it contains the initial state, excludes
/// the error, and is closed under the solution's transitions. A failed
/// condition makes the verdict inconclusive.
pub fn check_witness(spec: &Aig, sol: &Aig, witness: &Aig) -> Result<Verdict, VerifyError> {
    if witness.inputs.len() != spec.latches.len() || !witness.latches.is_empty() {
        return Err(VerifyError::ArityMismatch {
            expected: spec.latches.len(),
            found: witness.inputs.len(),
        });
    }
    if witness.outputs.len() != 1 {
        return Err(AigerError::NotSingleOutput(witness.outputs.len()).into());
    }
    let inconclusive = |detail: &str| Ok(Verdict::new(VerdictStatus::Inconclusive, Method::WitnessCheck, detail));
    let partition = spec.classify_spec()?;

    let mut m = BddManager::new();
    let state_vars: Vec<Var> = (0..sol.latches.len()).map(|i| m.new_var(format!("s{i}"))).collect();
    let input_vars: Vec<Var> = (0..sol.inputs.len()).map(|i| m.new_var(format!("u{i}"))).collect();
    let ctrl_vars: Vec<Var> = (0..partition.controllable.len())
        .map(|i| m.new_var(format!("c{i}")))
        .collect();
    let bdds = |m: &mut BddManager, vars: &[Var]| -> Vec<Bdd> { vars.iter().map(|&v| m.var(v).expect("registered")).collect() };
    let state = bdds(&mut m, &state_vars);
    let sol_inputs = bdds(&mut m, &input_vars);
    let ctrl = bdds(&mut m, &ctrl_vars);

    // Controller functions, read off the solution's gates.
    let sol_values = circuit_bdds(&mut m, sol, &sol_inputs, &state)?;
    let mut controller: HashMap<Var, Bdd> = HashMap::new();
    for (&p, &cv) in partition.controllable.iter().zip(&ctrl_vars) {
        match sol_values.get(&spec.inputs[p].var()) {
            Some(&f) => {
                controller.insert(cv, f);
            }
            None => return inconclusive("controllable input is not defined in the solution"),
        }
    }

    // Error and transition functions of the specification, over (s, u, c).
    let sol_input_of: HashMap<u32, Bdd> = sol
        .inputs
        .iter()
        .zip(&sol_inputs)
        .map(|(lit, &f)| (lit.var(), f))
        .collect();
    let mut spec_inputs = Vec::with_capacity(spec.inputs.len());
    let mut next_ctrl = ctrl.iter();
    for (pos, lit) in spec.inputs.iter().enumerate() {
        if partition.is_controllable(pos) {
            spec_inputs.push(*next_ctrl.next().expect("partition sizes match"));
        } else {
            match sol_input_of.get(&lit.var()) {
                Some(&f) => spec_inputs.push(f),
                None => return inconclusive("uncontrollable input missing from the solution"),
            }
        }
    }
    let spec_values = circuit_bdds(&mut m, spec, &spec_inputs, &state[..spec.latches.len()])?;
    let err = lit_bdd(&mut m, &spec_values, spec.outputs[0])?;
    let err = m.compose_vector(err, &controller).expect("registered");
    let mut next_state: HashMap<Var, Bdd> = HashMap::new();
    for (latch, &v) in spec.latches.iter().zip(&state_vars) {
        let f = lit_bdd(&mut m, &spec_values, latch.next)?;
        next_state.insert(v, m.compose_vector(f, &controller).expect("registered"));
    }

    let wit_values = circuit_bdds(&mut m, witness, &state[..spec.latches.len()], &[])?;
    let region = lit_bdd(&mut m, &wit_values, witness.outputs[0])?;

    let zero: Vec<Bdd> = state_vars.iter().map(|&v| m.nvar(v).expect("registered")).collect();
    let init = m.and_all(zero);
    if !m.leq(init, region) {
        return inconclusive("initial state is outside the witness");
    }
    if !m.and(region, err).is_false() {
        return inconclusive("witness contains a state where the error can be raised");
    }
    // Extra solution latches, if any, are treated as unconstrained.
    let succ = m.compose_vector(region, &next_state).expect("registered");
    if !m.leq(region, succ) {
        return inconclusive("witness is not closed under the solution's transitions");
    }
    Ok(Verdict::new(
        VerdictStatus::Verified,
        Method::WitnessCheck,
        "witness is an inductive invariant",
    ))
}

/// Forward-reachability check that the output of `sol` is never raised.
/// All inputs of `sol` are treated as free.
pub fn model_check(sol: &Aig, budget: Budget) -> Verdict {
    let started = Instant::now();
    let fail_detail = |detail: String| Verdict::new(VerdictStatus::Inconclusive, Method::ModelCheck, detail);
    if sol.outputs.len() != 1 {
        return fail_detail(format!("expected one output, found {}", sol.outputs.len()));
    }
    let mut m = BddManager::new();
    let mut cur = Vec::with_capacity(sol.latches.len());
    let mut nxt = Vec::with_capacity(sol.latches.len());
    for i in 0..sol.latches.len() {
        cur.push(m.new_var(format!("s{i}")));
        nxt.push(m.new_var(format!("s{i}'")));
    }
    let inputs: Vec<Var> = (0..sol.inputs.len()).map(|i| m.new_var(format!("u{i}"))).collect();
    let input_bdds: Vec<Bdd> = inputs.iter().map(|&v| m.var(v).expect("registered")).collect();
    let state_bdds: Vec<Bdd> = cur.iter().map(|&v| m.var(v).expect("registered")).collect();
    let values = match circuit_bdds(&mut m, sol, &input_bdds, &state_bdds) {
        Ok(v) => v,
        Err(e) => return fail_detail(e.to_string()),
    };
    let bad = lit_bdd(&mut m, &values, sol.outputs[0]).expect("validated circuit");
    let next_fns: Vec<Bdd> = sol
        .latches
        .iter()
        .map(|l| lit_bdd(&mut m, &values, l.next).expect("validated circuit"))
        .collect();
    let mut trans = m.tt();
    for (&v, &f) in nxt.iter().zip(&next_fns) {
        let nv = m.var(v).expect("registered");
        let eq = m.iff(nv, f);
        trans = m.and(trans, eq);
    }
    let zero: Vec<Bdd> = cur.iter().map(|&v| m.nvar(v).expect("registered")).collect();
    let init = m.and_all(zero);

    let quantified: Vec<Var> = cur.iter().chain(&inputs).copied().collect();
    let back: Vec<(Var, Var)> = nxt.iter().copied().zip(cur.iter().copied()).collect();
    let mut reached = init;
    let mut frontiers = vec![init];
    loop {
        let frontier = *frontiers.last().expect("nonempty");
        let hit = m.and(frontier, bad);
        if !hit.is_false() {
            let trace = reconstruct(&mut m, &frontiers, hit, &cur, &inputs, &next_fns);
            let mut v = Verdict::new(
                VerdictStatus::Falsified,
                Method::ModelCheck,
                format!("error reachable in {} steps", frontiers.len() - 1),
            );
            v.counterexample = Some(trace);
            return v;
        }
        if budget.max_steps.is_some_and(|n| frontiers.len() > n)
            || budget.time_limit.is_some_and(|t| started.elapsed() > t)
        {
            return fail_detail(format!("budget exhausted after {} image steps", frontiers.len() - 1));
        }
        let image = m.and_exists(&quantified, frontier, trans).expect("registered");
        let image = m.rename(image, &back).expect("registered");
        let fresh = m.diff(image, reached);
        if fresh.is_false() {
            return Verdict::new(
                VerdictStatus::Verified,
                Method::ModelCheck,
                format!("fixpoint after {} image steps", frontiers.len()),
            );
        }
        reached = m.or(reached, fresh);
        frontiers.push(fresh);
    }
}

/// Walks the frontiers backwards from a bad (state, input) pair. Every
/// state of frontier `j + 1` has a predecessor in frontier `j`.
fn reconstruct(
    m: &mut BddManager,
    frontiers: &[Bdd],
    hit: Bdd,
    cur: &[Var],
    inputs: &[Var],
    next_fns: &[Bdd],
) -> Vec<TraceStep> {
    let vars: Vec<Var> = cur.iter().chain(inputs).copied().collect();
    let split = |cube: Vec<bool>| -> TraceStep {
        let (s, u) = cube.split_at(cur.len());
        TraceStep {
            inputs: u.to_vec(),
            state: s.to_vec(),
        }
    };
    let last = m.pick_cube(hit, &vars).expect("nonempty");
    let mut steps = vec![split(last)];
    for j in (0..frontiers.len() - 1).rev() {
        let target = steps.last().expect("nonempty").state.clone();
        let mut pre = frontiers[j];
        for (&f, &t) in next_fns.iter().zip(&target) {
            let lit = if t { f } else { m.not(f) };
            pre = m.and(pre, lit);
        }
        let cube = m.pick_cube(pre, &vars).expect("frontier states have predecessors");
        steps.push(split(cube));
    }
    steps.reverse();
    steps
}

/// Simulates a trace on `sol` from the zero state; true iff every step's
/// state matches and the output is raised at the last step.
pub fn replay(sol: &Aig, trace: &[TraceStep]) -> bool {
    let Ok(sim) = Simulator::new(sol) else {
        return false;
    };
    let mut state = vec![false; sol.latches.len()];
    for (k, step) in trace.iter().enumerate() {
        if step.state != state || step.inputs.len() != sol.inputs.len() {
            return false;
        }
        let (out, next) = sim.step(&step.inputs, &state);
        if k + 1 == trace.len() {
            return out.first() == Some(&true);
        }
        state = next;
    }
    false
}

/// Outcome of the full verification pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub verdict: Verdict,
    /// The witness check was attempted, was not conclusive, and model
    /// checking decided instead.
    pub fallback_used: bool,
    pub witness_verdict: Option<Verdict>,
}

/// Syntactic check, then the witness check if a witness is given, then
/// model checking if there is no witness or the witness check was
/// inconclusive.
pub fn verify_solution(spec: &Aig, sol: &Aig, witness: Option<&Aig>, budget: Budget) -> Report {
    let syntactic = syntactic_check(spec, sol);
    if !syntactic.is_verified() {
        return Report {
            verdict: syntactic,
            fallback_used: false,
            witness_verdict: None,
        };
    }
    let witness_verdict = witness.map(|w| match check_witness(spec, sol, w) {
        Ok(v) => v,
        Err(e) => Verdict::new(VerdictStatus::Inconclusive, Method::WitnessCheck, e.to_string()),
    });
    if let Some(v) = witness_verdict.as_ref().filter(|v| v.is_verified()) {
        return Report {
            verdict: v.clone(),
            fallback_used: false,
            witness_verdict: Some(v.clone()),
        };
    }
    Report {
        verdict: model_check(sol, budget),
        fallback_used: witness_verdict.is_some(),
        witness_verdict,
    }
}
