//! And-inverter graphs in the AIGER format, restricted to what the safety
//! synthesis track uses: a single output, zero-initialized latches and no
//! bad/constraint/justice/fairness sections.

mod builder;
mod emit;
mod parse;
mod sim;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builder::AigBuilder;
pub use emit::{emit_ascii, emit_binary, normalize};
pub use parse::{parse, parse_ascii, parse_binary};
pub use sim::Simulator;

/// Symbol-name prefix that marks an input as controllable by the system.
pub const CONTROLLABLE_PREFIX: &str = "controllable_";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AigerError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("header declares {declared} {section} but body has {found}")]
    CountMismatch {
        section: &'static str,
        declared: usize,
        found: usize,
    },
    #[error("variable {0} is defined more than once")]
    RedefinedVariable(u32),
    #[error("literal {0} refers to an undefined variable")]
    UndefinedLiteral(u32),
    #[error("unsupported AIGER feature: {0}")]
    UnsupportedFeature(String),
    #[error("binary AND section ends in the middle of a delta")]
    TruncatedDeltaEncoding,
    #[error("AND gates form a combinational cycle through variable {0}")]
    NotReindexable(u32),
    #[error("specification must have exactly one output, found {0}")]
    NotSingleOutput(usize),
    #[error("conflicting STATUS comments")]
    ConflictingStatus,
}

/// An AIGER literal: `2 * variable + negated`. `0` is FALSE and `1` is TRUE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Literal(pub u32);

impl Literal {
    pub const FALSE: Literal = Literal(0);
    pub const TRUE: Literal = Literal(1);

    pub fn from_var(var: u32, negated: bool) -> Literal {
        Literal(var * 2 + negated as u32)
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn is_constant(self) -> bool {
        self.0 < 2
    }

    /// The positive literal of the same variable.
    pub fn positive(self) -> Literal {
        Literal(self.0 & !1)
    }

    #[must_use]
    pub fn negate(self) -> Literal {
        Literal(self.0 ^ 1)
    }

    #[must_use]
    pub fn negate_if(self, cond: bool) -> Literal {
        Literal(self.0 ^ cond as u32)
    }
}

impl std::ops::Not for Literal {
    type Output = Literal;
    fn not(self) -> Literal {
        self.negate()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A latch; the reset value is always zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Latch {
    pub lit: Literal,
    pub next: Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AndGate {
    pub lhs: Literal,
    pub rhs0: Literal,
    pub rhs1: Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Input,
    Latch,
    Output,
}

impl SymbolKind {
    fn prefix(self) -> char {
        match self {
            SymbolKind::Input => 'i',
            SymbolKind::Latch => 'l',
            SymbolKind::Output => 'o',
        }
    }
}

/// What drives a variable inside a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definition {
    Input(usize),
    Latch(usize),
    And(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Aig {
    pub max_var: u32,
    pub inputs: Vec<Literal>,
    pub latches: Vec<Latch>,
    pub ands: Vec<AndGate>,
    pub outputs: Vec<Literal>,
    pub symbols: BTreeMap<(SymbolKind, usize), String>,
    /// Comment lines following the `c` marker, without line terminators.
    pub comments: Vec<String>,
}

/// Split of the inputs into system-controlled and environment-controlled ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputPartition {
    /// Positions into [`Aig::inputs`], in input order.
    pub controllable: Vec<usize>,
    pub uncontrollable: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Realizable,
    Unrealizable,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Realizable => "realizable",
            Status::Unrealizable => "unrealizable",
            Status::Unknown => "unknown",
        })
    }
}

impl Aig {
    pub fn input_count(&self) -> usize {
        self.inputs.len()
    }

    pub fn latch_count(&self) -> usize {
        self.latches.len()
    }

    pub fn and_count(&self) -> usize {
        self.ands.len()
    }

    pub fn symbol(&self, kind: SymbolKind, pos: usize) -> Option<&str> {
        self.symbols.get(&(kind, pos)).map(String::as_str)
    }

    /// Map from variable index to its definition.
    pub fn definitions(&self) -> Result<HashMap<u32, Definition>, AigerError> {
        let mut defs = HashMap::with_capacity(self.inputs.len() + self.latches.len() + self.ands.len());
        let mut define = |lit: Literal, def: Definition| -> Result<(), AigerError> {
            if lit.is_negated() || lit.is_constant() {
                return Err(AigerError::Malformed {
                    line: 0,
                    reason: format!("literal {lit} cannot be defined"),
                });
            }
            if lit.var() > self.max_var {
                return Err(AigerError::UndefinedLiteral(lit.0));
            }
            if defs.insert(lit.var(), def).is_some() {
                return Err(AigerError::RedefinedVariable(lit.var()));
            }
            Ok(())
        };
        for (i, &l) in self.inputs.iter().enumerate() {
            define(l, Definition::Input(i))?;
        }
        for (i, l) in self.latches.iter().enumerate() {
            define(l.lit, Definition::Latch(i))?;
        }
        for (i, g) in self.ands.iter().enumerate() {
            define(g.lhs, Definition::And(i))?;
        }
        Ok(defs)
    }

    /// Checks that every variable is defined once and every used literal
    /// refers to a defined variable.
    pub fn validate(&self) -> Result<(), AigerError> {
        let defs = self.definitions()?;
        let used = self
            .latches
            .iter()
            .map(|l| l.next)
            .chain(self.outputs.iter().copied())
            .chain(self.ands.iter().flat_map(|g| [g.rhs0, g.rhs1]));
        for lit in used {
            if !lit.is_constant() && !defs.contains_key(&lit.var()) {
                return Err(AigerError::UndefinedLiteral(lit.0));
            }
        }
        for &(kind, pos) in self.symbols.keys() {
            let len = match kind {
                SymbolKind::Input => self.inputs.len(),
                SymbolKind::Latch => self.latches.len(),
                SymbolKind::Output => self.outputs.len(),
            };
            if pos >= len {
                return Err(AigerError::Malformed {
                    line: 0,
                    reason: format!("symbol {}{pos} has no matching entry", kind.prefix()),
                });
            }
        }
        Ok(())
    }

    /// Indices into `ands` in a deterministic topological order: among the
    /// gates whose operands are available, the one with the smallest
    /// original lhs goes first.
    pub fn topological_order(&self) -> Result<Vec<usize>, AigerError> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;

        let gate_of: HashMap<u32, usize> = self
            .ands
            .iter()
            .enumerate()
            .map(|(i, g)| (g.lhs.var(), i))
            .collect();
        let mut pending = vec![0u8; self.ands.len()];
        let mut users: Vec<Vec<usize>> = vec![Vec::new(); self.ands.len()];
        for (i, g) in self.ands.iter().enumerate() {
            let mut operands = [g.rhs0.var(), g.rhs1.var()];
            operands.sort_unstable();
            let count = if operands[0] == operands[1] { 1 } else { 2 };
            for &v in &operands[..count] {
                if let Some(&j) = gate_of.get(&v) {
                    pending[i] += 1;
                    users[j].push(i);
                }
            }
        }
        let mut ready: BinaryHeap<Reverse<(u32, usize)>> = pending
            .iter()
            .enumerate()
            .filter(|(_, &p)| p == 0)
            .map(|(i, _)| Reverse((self.ands[i].lhs.0, i)))
            .collect();
        let mut order = Vec::with_capacity(self.ands.len());
        while let Some(Reverse((_, i))) = ready.pop() {
            order.push(i);
            for &u in &users[i] {
                pending[u] -= 1;
                if pending[u] == 0 {
                    ready.push(Reverse((self.ands[u].lhs.0, u)));
                }
            }
        }
        if order.len() != self.ands.len() {
            let stuck = pending.iter().position(|&p| p > 0).unwrap_or(0);
            return Err(AigerError::NotReindexable(self.ands[stuck].lhs.var()));
        }
        Ok(order)
    }

    /// Partitions the inputs by the `controllable_` symbol prefix. Inputs
    /// without a symbol are uncontrollable.
    pub fn classify_inputs(&self) -> InputPartition {
        let (controllable, uncontrollable) = (0..self.inputs.len()).partition(|&i| {
            self.symbol(SymbolKind::Input, i)
                .is_some_and(|n| n.starts_with(CONTROLLABLE_PREFIX))
        });
        InputPartition {
            controllable,
            uncontrollable,
        }
    }

    /// Checks the single-output restriction of a specification and returns
    /// its input partition.
    pub fn classify_spec(&self) -> Result<InputPartition, AigerError> {
        if self.outputs.len() != 1 {
            return Err(AigerError::NotSingleOutput(self.outputs.len()));
        }
        Ok(self.classify_inputs())
    }

    /// Reads `STATUS : realizable|unrealizable` from the comment section.
    pub fn read_status(&self) -> Result<Status, AigerError> {
        let mut found = Status::Unknown;
        for line in &self.comments {
            let Some(rest) = line.trim().strip_prefix("STATUS") else {
                continue;
            };
            let Some(value) = rest.trim_start().strip_prefix(':') else {
                continue;
            };
            let status = match value.trim().to_ascii_lowercase().as_str() {
                "realizable" => Status::Realizable,
                "unrealizable" => Status::Unrealizable,
                _ => continue,
            };
            if found != Status::Unknown && found != status {
                return Err(AigerError::ConflictingStatus);
            }
            found = status;
        }
        Ok(found)
    }

    /// Replaces any STATUS comment with the given status (or removes it for
    /// `Unknown`).
    pub fn set_status(&mut self, status: Status) {
        self.comments
            .retain(|l| !l.trim().starts_with("STATUS"));
        if status != Status::Unknown {
            self.comments.insert(0, format!("STATUS : {status}"));
        }
    }
}

impl InputPartition {
    pub fn is_controllable(&self, input: usize) -> bool {
        self.controllable.binary_search(&input).is_ok()
    }
}
