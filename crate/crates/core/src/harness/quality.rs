use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{HarnessError, RunRecord, SolutionSize};
use crate::verify::VerdictStatus;

/// What counts as the size of a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SizeKind {
    /// All AND gates, specification included.
    #[default]
    FullSolution,
    /// AND gates added by the controller.
    ControllerOnly,
    /// Controller AND gates plus [`SizeKind::LATCH_WEIGHT`] per controller latch.
    GateEquivalents,
}

impl SizeKind {
    pub const LATCH_WEIGHT: usize = 4;

    pub fn measure(self, size: &SolutionSize) -> u64 {
        (match self {
            SizeKind::FullSolution => size.and_gates,
            SizeKind::ControllerOnly => size.controller_ands,
            SizeKind::GateEquivalents => size.controller_ands + Self::LATCH_WEIGHT * size.controller_latches,
        }) as u64
    }
}

impl FromStr for SizeKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" | "full-solution" => Ok(SizeKind::FullSolution),
            "controller" | "controller-only" => Ok(SizeKind::ControllerOnly),
            "gate-equivalents" | "ge" => Ok(SizeKind::GateEquivalents),
            other => Err(HarnessError::Config(format!("unknown size kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityConfig {
    pub scale_base: f64,
    pub size_kind: SizeKind,
    /// Reference sizes by benchmark; the smallest verified size in the run
    /// is used where absent.
    #[serde(default)]
    pub reference: BTreeMap<String, u64>,
}

impl Default for QualityConfig {
    fn default() -> Self {
        QualityConfig {
            scale_base: 10.0,
            size_kind: SizeKind::FullSolution,
            reference: BTreeMap::new(),
        }
    }
}

/// `clamp(2 − log_b((s+1)/(r+1)), 0, 4)`: two points at the reference size,
/// one point lost per factor `b`.
pub fn quality_points(size: u64, reference: u64, base: f64) -> f64 {
    let ratio = (size as f64 + 1.0) / (reference as f64 + 1.0);
    (2.0 - ratio.ln() / base.ln()).clamp(0.0, 4.0)
}

fn verified_size(record: &RunRecord, kind: SizeKind) -> Option<u64> {
    let verified = record.verdict.as_ref().is_some_and(|v| v.status == VerdictStatus::Verified);
    verified.then_some(record.size.as_ref()?).map(|s| kind.measure(s))
}

/// Quality points per tool, summed over its verified solutions. Every tool
/// in `records` appears, possibly with zero.
pub fn quality_score(records: &[RunRecord], cfg: &QualityConfig) -> BTreeMap<String, f64> {
    let mut smallest: BTreeMap<&str, u64> = BTreeMap::new();
    for r in records {
        if let Some(s) = verified_size(r, cfg.size_kind) {
            let e = smallest.entry(&r.benchmark).or_insert(s);
            *e = (*e).min(s);
        }
    }
    let mut totals: BTreeMap<String, f64> = BTreeMap::new();
    for r in records {
        let total = totals.entry(r.tool.clone()).or_default();
        let Some(s) = verified_size(r, cfg.size_kind) else {
            continue;
        };
        let reference = cfg
            .reference
            .get(&r.benchmark)
            .copied()
            .unwrap_or(smallest[r.benchmark.as_str()]);
        *total += quality_points(s, reference, cfg.scale_base);
    }
    totals
}
