//! Parameterized benchmark families with known realizability status.
//!
//! Every generator is a pure function of its parameter. Instances carry
//! their status both in [`BenchmarkInstance::status`] and as a `STATUS`
//! comment in the circuit.

use std::collections::BTreeMap;
use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aiger::{emit_ascii, Aig, AigBuilder, Literal, Status};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{family}: parameter {param} = {value} outside {min}..={max}")]
    ParamOutOfRange {
        family: &'static str,
        param: &'static str,
        value: u32,
        min: u32,
        max: u32,
    },
    #[error("unknown benchmark family `{0}`")]
    UnknownFamily(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("index: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchmarkInstance {
    pub family: String,
    pub params: BTreeMap<String, u32>,
    /// Location relative to the repository root once written.
    pub file: String,
    pub category: String,
    pub status: Status,
    /// Ordinal bucket 1..=5.
    pub difficulty_hint: u8,
    #[serde(skip)]
    pub circuit: Option<Aig>,
}

impl BenchmarkInstance {
    /// `<family>_<param>`, the file stem.
    pub fn name(&self) -> String {
        let params: Vec<String> = self.params.values().map(u32::to_string).collect();
        format!("{}_{}", self.family, params.join("_"))
    }
}

/// Buckets by latch count. Solver timings would make the index depend on
/// the machine, so the state-space size stands in for them.
pub fn difficulty_hint(latches: usize) -> u8 {
    match latches {
        0..=2 => 1,
        3..=4 => 2,
        5..=8 => 3,
        9..=16 => 4,
        _ => 5,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    CounterRace,
    ForcedOverflow,
    Saturate,
    MuxArbiter,
    ArbiterTight,
    Echo,
    Predict,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::CounterRace,
        Family::ForcedOverflow,
        Family::Saturate,
        Family::MuxArbiter,
        Family::ArbiterTight,
        Family::Echo,
        Family::Predict,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::CounterRace => "counter_race",
            Family::ForcedOverflow => "forced_overflow",
            Family::Saturate => "saturate",
            Family::MuxArbiter => "mux_arbiter",
            Family::ArbiterTight => "arbiter_tight",
            Family::Echo => "echo",
            Family::Predict => "predict",
        }
    }

    pub fn from_name(name: &str) -> Result<Family, BenchError> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == name)
            .ok_or_else(|| BenchError::UnknownFamily(name.to_string()))
    }

    fn param(self) -> &'static str {
        match self {
            Family::MuxArbiter | Family::ArbiterTight => "k",
            _ => "n",
        }
    }

    pub fn range(self) -> RangeInclusive<u32> {
        match self {
            Family::MuxArbiter | Family::ArbiterTight => 1..=8,
            _ => 1..=16,
        }
    }

    fn default_category(self) -> &'static str {
        match self {
            Family::CounterRace | Family::ForcedOverflow | Family::Saturate => "counters",
            Family::MuxArbiter | Family::ArbiterTight => "arbiters",
            Family::Echo | Family::Predict => "shift",
        }
    }

    pub fn generate(self, value: u32) -> Result<BenchmarkInstance, BenchError> {
        let range = self.range();
        if !range.contains(&value) {
            return Err(BenchError::ParamOutOfRange {
                family: self.name(),
                param: self.param(),
                value,
                min: *range.start(),
                max: *range.end(),
            });
        }
        let n = value as usize;
        let (aig, status) = match self {
            Family::CounterRace => (counter(n, CounterMode::Reset), Status::Realizable),
            Family::ForcedOverflow => (counter(n, CounterMode::GatedReset), Status::Unrealizable),
            Family::Saturate => (counter(n, CounterMode::Halve), Status::Realizable),
            Family::MuxArbiter => {
                // Ground truth by enumeration is only established for small k.
                let status = if n <= 3 { Status::Realizable } else { Status::Unknown };
                (arbiter(n, n as u32), status)
            }
            Family::ArbiterTight => (arbiter(n, n as u32 - 1), Status::Unrealizable),
            Family::Echo => (shift(n, ShiftMode::Echo), Status::Realizable),
            Family::Predict => (shift(n, ShiftMode::Predict), Status::Unrealizable),
        };
        let mut aig = aig;
        aig.set_status(status);
        let instance = BenchmarkInstance {
            family: self.name().to_string(),
            params: BTreeMap::from([(self.param().to_string(), value)]),
            file: String::new(),
            category: self.default_category().to_string(),
            status,
            difficulty_hint: difficulty_hint(aig.latches.len()),
            circuit: Some(aig),
        };
        Ok(BenchmarkInstance {
            file: format!("{}.aag", instance.name()),
            ..instance
        })
    }
}

/// `n`-bit counter incremented by environment bit `u`, reset by
/// controllable bit `c`; error when it reaches 2ⁿ−1. Realizable.
pub fn gen_counter_race(n: u32) -> Result<BenchmarkInstance, BenchError> {
    Family::CounterRace.generate(n)
}

/// As [`gen_counter_race`], but the reset only takes effect when the
/// environment's enable is high. Unrealizable.
pub fn gen_forced_overflow(n: u32) -> Result<BenchmarkInstance, BenchError> {
    Family::ForcedOverflow.generate(n)
}

/// As [`gen_counter_race`], but the controller halves the counter instead
/// of resetting it. Realizable.
pub fn gen_saturate(n: u32) -> Result<BenchmarkInstance, BenchError> {
    Family::Saturate.generate(n)
}

/// `k` requests, `k` grants; error on two simultaneous grants or when a
/// pending request has waited `k` steps. Realizable (oldest-first).
pub fn gen_mux_arbiter(k: u32) -> Result<BenchmarkInstance, BenchError> {
    Family::MuxArbiter.generate(k)
}

/// The arbiter with a deadline of `k − 1` steps. Unrealizable: when all
/// clients request at once, the last one waits `k − 1` steps.
pub fn gen_arbiter_tight(k: u32) -> Result<BenchmarkInstance, BenchError> {
    Family::ArbiterTight.generate(k)
}

/// The controller must replay the environment's bit from `n` steps ago,
/// which is held in an `n`-latch shift register. Realizable.
pub fn gen_echo(n: u32) -> Result<BenchmarkInstance, BenchError> {
    Family::Echo.generate(n)
}

/// The controller's bit, delayed `n` steps, must equal the environment's
/// current bit. Unrealizable.
pub fn gen_predict(n: u32) -> Result<BenchmarkInstance, BenchError> {
    Family::Predict.generate(n)
}

#[derive(Clone, Copy)]
enum CounterMode {
    Reset,
    GatedReset,
    Halve,
}

fn counter(n: usize, mode: CounterMode) -> Aig {
    let mut b = AigBuilder::new();
    let u = b.input(Some("inc"));
    let enable = match mode {
        CounterMode::GatedReset => Some(b.input(Some("enable"))),
        _ => None,
    };
    let c = b.input(Some("controllable_reset"));
    let x: Vec<(usize, Literal)> = (0..n).map(|i| b.latch(Some(&format!("x{i}")))).collect();
    let bits: Vec<Literal> = x.iter().map(|&(_, l)| l).collect();

    let mut carry = u;
    let mut sum = Vec::with_capacity(n);
    for &xi in &bits {
        sum.push(b.xor(xi, carry));
        carry = b.and(xi, carry);
    }
    let act = match enable {
        Some(e) => b.and(c, e),
        None => c,
    };
    for (i, &(pos, _)) in x.iter().enumerate() {
        let alt = match mode {
            CounterMode::Halve => bits.get(i + 1).copied().unwrap_or(Literal::FALSE),
            _ => Literal::FALSE,
        };
        let next = b.mux(act, alt, sum[i]);
        b.set_next(pos, next);
    }
    let err = b.and_all(bits);
    b.output(err, Some("err"));
    b.build_normalized().expect("generated circuits are acyclic")
}

/// Unsigned `bits ≥ bound`, least significant bit first.
fn at_least(b: &mut AigBuilder, bits: &[Literal], bound: u32) -> Literal {
    let mut ge = Literal::TRUE;
    for (j, &x) in bits.iter().enumerate() {
        ge = if bound >> j & 1 == 1 { b.and(x, ge) } else { b.or(x, ge) };
    }
    if bound >> bits.len() != 0 {
        Literal::FALSE
    } else {
        ge
    }
}

fn arbiter(k: usize, deadline: u32) -> Aig {
    let width = (u32::BITS - (k as u32).leading_zeros()) as usize;
    let mut b = AigBuilder::new();
    let req: Vec<Literal> = (0..k).map(|i| b.input(Some(&format!("req{i}")))).collect();
    let grant: Vec<Literal> = (0..k)
        .map(|i| b.input(Some(&format!("controllable_grant{i}"))))
        .collect();
    let mut errors = Vec::new();
    for i in 0..k {
        let (p_pos, pending) = b.latch(Some(&format!("pending{i}")));
        let cnt: Vec<(usize, Literal)> = (0..width)
            .map(|j| b.latch(Some(&format!("wait{i}_{j}"))))
            .collect();
        let cnt_bits: Vec<Literal> = cnt.iter().map(|&(_, l)| l).collect();

        let open = b.or(pending, req[i]);
        let still = b.and(open, grant[i].negate());
        b.set_next(p_pos, still);
        let mut carry = Literal::TRUE;
        for &(pos, bit) in &cnt {
            let s = b.xor(bit, carry);
            carry = b.and(bit, carry);
            let next = b.and(still, s);
            b.set_next(pos, next);
        }
        errors.push(at_least(&mut b, &cnt_bits, deadline));
    }
    for i in 0..k {
        for j in i + 1..k {
            errors.push(b.and(grant[i], grant[j]));
        }
    }
    let err = b.or_all(errors);
    b.output(err, Some("err"));
    b.build_normalized().expect("generated circuits are acyclic")
}

#[derive(Clone, Copy)]
enum ShiftMode {
    Echo,
    Predict,
}

fn shift(n: usize, mode: ShiftMode) -> Aig {
    let mut b = AigBuilder::new();
    let u = b.input(Some("bit"));
    let c = b.input(Some("controllable_guess"));
    let regs: Vec<(usize, Literal)> = (0..n).map(|i| b.latch(Some(&format!("delay{i}")))).collect();
    let feed = match mode {
        ShiftMode::Echo => u,
        ShiftMode::Predict => c,
    };
    let mut prev = feed;
    for &(pos, lit) in &regs {
        b.set_next(pos, prev);
        prev = lit;
    }
    let delayed = prev;
    let compare = match mode {
        ShiftMode::Echo => c,
        ShiftMode::Predict => u,
    };
    let err = b.xor(delayed, compare);
    b.output(err, Some("err"));
    b.build_normalized().expect("generated circuits are acyclic")
}

/// One line of a generation plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub family: String,
    pub from: u32,
    pub to: u32,
    pub category: String,
}

impl PlanEntry {
    pub fn new(family: Family, params: RangeInclusive<u32>, category: &str) -> Self {
        PlanEntry {
            family: family.name().to_string(),
            from: *params.start(),
            to: *params.end(),
            category: category.to_string(),
        }
    }
}

/// The standard corpus: every family at sizes that solve and verify in
/// seconds.
pub fn default_plan() -> Vec<PlanEntry> {
    vec![
        PlanEntry::new(Family::CounterRace, 1..=10, "counters"),
        PlanEntry::new(Family::Saturate, 1..=12, "counters"),
        PlanEntry::new(Family::ForcedOverflow, 1..=8, "counters"),
        PlanEntry::new(Family::MuxArbiter, 1..=4, "arbiters"),
        PlanEntry::new(Family::ArbiterTight, 1..=2, "arbiters"),
        PlanEntry::new(Family::Echo, 1..=16, "shift"),
        PlanEntry::new(Family::Predict, 1..=8, "shift"),
    ]
}

/// Generates every instance of `plan` in memory, in plan order.
pub fn generate_plan(plan: &[PlanEntry]) -> Result<Vec<BenchmarkInstance>, BenchError> {
    let mut out = Vec::new();
    for entry in plan {
        let family = Family::from_name(&entry.family)?;
        for value in entry.from..=entry.to {
            let mut inst = family.generate(value)?;
            inst.category = entry.category.clone();
            inst.file = format!("{}/{}.aag", entry.category, inst.name());
            out.push(inst);
        }
    }
    Ok(out)
}

pub const INDEX_FILE: &str = "index.json";

/// Writes `<root>/<category>/<family>_<param>.aag` for every instance of
/// `plan` and the index `<root>/index.json`.
pub fn populate_repo(root: &Path, plan: &[PlanEntry]) -> Result<Vec<BenchmarkInstance>, BenchError> {
    let instances = generate_plan(plan)?;
    fs::create_dir_all(root)?;
    for inst in &instances {
        let path = root.join(&inst.file);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let aig = inst.circuit.as_ref().expect("generated instances carry circuits");
        fs::write(path, emit_ascii(aig))?;
    }
    write_index(&root.join(INDEX_FILE), &instances)?;
    Ok(instances)
}

pub fn write_index(path: &Path, instances: &[BenchmarkInstance]) -> Result<(), BenchError> {
    let mut text = serde_json::to_string_pretty(instances)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Reads an index; circuits are not loaded.
pub fn load_index(path: &Path) -> Result<Vec<BenchmarkInstance>, BenchError> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Absolute location of an indexed instance.
pub fn instance_path(root: &Path, inst: &BenchmarkInstance) -> PathBuf {
    root.join(&inst.file)
}
