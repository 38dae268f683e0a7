//! Competition harness: tool configurations, sandboxed runs, benchmark
//! selection, adjudication, scoring and reports.

mod adjudicate;
mod config;
mod quality;
mod report;
mod run;
mod score;
mod select;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::verify::Verdict;

pub use adjudicate::{adjudicate, Adjudication};
pub use config::{load_tools, parse_tools, ToolConfig, ToolRegistry, MAX_CONFIGS_PER_SUBTRACK};
pub use quality::{quality_points, quality_score, QualityConfig, SizeKind};
pub use report::{cactus_rows, ranking_table, report, write_results_csv, RESULTS_HEADER};
pub use run::{judge_timeout, parse_answer, run_all, run_job, witness_path_for, workdir, Job, Limits};
pub use score::{score, Board, BenchmarkScore, Rules, Scoreboard, ToolScore};
pub use select::select_benchmarks;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("tool `{tool}` already has {max} configurations in the {subtrack} subtrack", max = MAX_CONFIGS_PER_SUBTRACK)]
    TooManyConfigs { tool: String, subtrack: Subtrack },
    #[error("tool configuration: {0}")]
    Config(String),
    #[error("cannot start `{command}`: {source}")]
    SpawnFailure {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("benchmark index is empty")]
    EmptyIndex,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subtrack {
    Realizability,
    Synthesis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Sequential,
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Realizable,
    Unrealizable,
    Timeout,
    Crash,
}

impl Answer {
    pub fn is_verdict(self) -> bool {
        matches!(self, Answer::Realizable | Answer::Unrealizable)
    }
}

/// AND-gate and latch counts of a solution, split into the specification
/// part and the controller part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionSize {
    pub and_gates: usize,
    pub controller_ands: usize,
    pub controller_latches: usize,
}

/// One tool-on-benchmark execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool: String,
    pub benchmark: String,
    pub subtrack: Subtrack,
    pub mode: Mode,
    pub answer: Answer,
    pub cpu_seconds: f64,
    pub wall_seconds: f64,
    #[serde(default)]
    pub exit_code: Option<i32>,
    #[serde(default)]
    pub solution: Option<PathBuf>,
    #[serde(default)]
    pub witness: Option<PathBuf>,
    #[serde(default)]
    pub verdict: Option<Verdict>,
    #[serde(default)]
    pub fallback_used: bool,
    #[serde(default)]
    pub size: Option<SolutionSize>,
    #[serde(default)]
    pub hors_concours: bool,
}

impl RunRecord {
    pub fn new(tool: &str, benchmark: &str, subtrack: Subtrack, mode: Mode, answer: Answer) -> Self {
        RunRecord {
            tool: tool.to_string(),
            benchmark: benchmark.to_string(),
            subtrack,
            mode,
            answer,
            cpu_seconds: 0.0,
            wall_seconds: 0.0,
            exit_code: None,
            solution: None,
            witness: None,
            verdict: None,
            fallback_used: false,
            size: None,
            hors_concours: false,
        }
    }
}

impl fmt::Display for Subtrack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subtrack::Realizability => "realizability",
            Subtrack::Synthesis => "synthesis",
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sequential => "sequential",
            Mode::Parallel => "parallel",
        })
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Realizable => "realizable",
            Answer::Unrealizable => "unrealizable",
            Answer::Timeout => "timeout",
            Answer::Crash => "crash",
        })
    }
}

impl FromStr for Mode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "seq" | "sequential" => Ok(Mode::Sequential),
            "par" | "parallel" => Ok(Mode::Parallel),
            other => Err(HarnessError::Config(format!("unknown mode `{other}`"))),
        }
    }
}

impl FromStr for Subtrack {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "realizability" | "real" => Ok(Subtrack::Realizability),
            "synthesis" | "synt" => Ok(Subtrack::Synthesis),
            other => Err(HarnessError::Config(format!("unknown subtrack `{other}`"))),
        }
    }
}
