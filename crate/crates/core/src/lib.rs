//! Safety-game synthesis for AIGER specifications.
//!
//! - [`aiger`]: circuit IR, ASCII/binary parsing and emission
//! - [`dd`]: reduced ordered BDDs
//! - [`game`]: symbolic safety games, fixpoint solving, strategy extraction
//! - [`synth`]: lowering strategies and winning regions to AIGER
//! - [`verify`]: witness checks, model checking, syntactic checks
//! - [`bench`]: parameterized benchmark families
//! - [`harness`]: competition runs, adjudication, scoring and reports

pub mod aiger;
pub mod bench;
pub mod dd;
pub mod game;
pub mod harness;
pub mod synth;
pub mod verify;

#[cfg(any(test, feature = "oracle"))]
pub mod explicit;

pub use aiger::{Aig, InputPartition, Literal, Status};
pub use bench::BenchmarkInstance;
pub use dd::{Bdd, BddManager, Var};
pub use game::{CounterStrategy, Game, SolveResult, Strategy};
pub use harness::{RunRecord, Scoreboard, ToolConfig};
pub use synth::{Solution, WitnessCircuit};
pub use verify::Verdict;
