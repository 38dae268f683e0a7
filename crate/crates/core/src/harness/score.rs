use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{adjudicate, quality_score, Answer, Mode, QualityConfig, RunRecord, Subtrack};
use crate::aiger::Status;

/// Wrong answers cost this many points each.
pub const WRONG_PENALTY: i64 = 4;

#[derive(Debug, Clone, Default)]
pub struct Rules {
    /// Flag tools with any wrong answer.
    pub disqualify: bool,
    /// Used on synthesis boards.
    pub quality: QualityConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolScore {
    pub tool: String,
    pub solved: usize,
    pub wrong: usize,
    pub timeouts: usize,
    pub crashes: usize,
    pub points: i64,
    pub quality: f64,
    pub disqualified: bool,
    pub hors_concours: bool,
    /// `None` for hors-concours and disqualified tools.
    pub rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchmarkScore {
    pub benchmark: String,
    pub status: Status,
    pub newly_solved: bool,
    pub inspect: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Board {
    pub subtrack: Subtrack,
    pub mode: Mode,
    pub tools: Vec<ToolScore>,
    pub benchmarks: Vec<BenchmarkScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Scoreboard {
    pub boards: Vec<Board>,
}

/// Adjudicates and scores `records`, one board per (subtrack, mode).
/// `known` gives benchmark statuses; missing entries are unknown.
pub fn score(records: &[RunRecord], known: &BTreeMap<String, Status>, rules: &Rules) -> Scoreboard {
    let mut groups: BTreeMap<(Subtrack, Mode), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.subtrack, r.mode)).or_default().push(r);
    }
    let boards = groups
        .into_iter()
        .map(|((subtrack, mode), recs)| board(subtrack, mode, &recs, known, rules))
        .collect();
    Scoreboard { boards }
}

fn board(
    subtrack: Subtrack,
    mode: Mode,
    records: &[&RunRecord],
    known: &BTreeMap<String, Status>,
    rules: &Rules,
) -> Board {
    let mut by_bench: BTreeMap<&str, Vec<RunRecord>> = BTreeMap::new();
    let mut tools: BTreeMap<&str, ToolScore> = BTreeMap::new();
    let mut hors: BTreeSet<&str> = BTreeSet::new();
    for r in records {
        by_bench.entry(&r.benchmark).or_default().push((*r).clone());
        tools.entry(&r.tool).or_insert_with(|| ToolScore {
            tool: r.tool.clone(),
            solved: 0,
            wrong: 0,
            timeouts: 0,
            crashes: 0,
            points: 0,
            quality: 0.0,
            disqualified: false,
            hors_concours: false,
            rank: None,
        });
        if r.hors_concours {
            hors.insert(&r.tool);
        }
    }

    let mut benchmarks = Vec::with_capacity(by_bench.len());
    let mut scored = Vec::new();
    for (bench, recs) in &by_bench {
        let known = known.get(*bench).copied().unwrap_or(Status::Unknown);
        let adj = adjudicate(recs, known);
        for (r, correct) in recs.iter().zip(&adj.correct) {
            let t = tools.get_mut(r.tool.as_str()).expect("registered above");
            match r.answer {
                Answer::Timeout => t.timeouts += 1,
                Answer::Crash => t.crashes += 1,
                _ => {}
            }
            match correct {
                Some(true) => {
                    t.solved += 1;
                    scored.push(r.clone());
                }
                Some(false) => t.wrong += 1,
                None => {}
            }
        }
        benchmarks.push(BenchmarkScore {
            benchmark: bench.to_string(),
            status: adj.status,
            newly_solved: adj.newly_solved,
            inspect: adj.inspect,
        });
    }

    let quality = if subtrack == Subtrack::Synthesis {
        quality_score(&scored, &rules.quality)
    } else {
        BTreeMap::new()
    };
    let mut tools: Vec<ToolScore> = tools
        .into_values()
        .map(|mut t| {
            t.points = t.solved as i64 - WRONG_PENALTY * t.wrong as i64;
            t.quality = quality.get(&t.tool).copied().unwrap_or(0.0);
            t.disqualified = rules.disqualify && t.wrong > 0;
            t.hors_concours = hors.contains(t.tool.as_str());
            t
        })
        .collect();
    let ranked = |t: &ToolScore| !t.hors_concours && !t.disqualified;
    tools.sort_by(|a, b| {
        ranked(b)
            .cmp(&ranked(a))
            .then(b.points.cmp(&a.points))
            .then(b.quality.total_cmp(&a.quality))
            .then(a.tool.cmp(&b.tool))
    });
    // Competition ranking: ties share a rank, the next rank skips.
    let mut prev: Option<(i64, f64, usize)> = None;
    for (i, t) in tools.iter_mut().enumerate() {
        if !ranked(t) {
            continue;
        }
        let rank = match prev {
            Some((p, q, r)) if p == t.points && q == t.quality => r,
            _ => i + 1,
        };
        t.rank = Some(rank);
        prev = Some((t.points, t.quality, rank));
    }
    Board {
        subtrack,
        mode,
        tools,
        benchmarks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(tool: &str, bench: &str, answer: Answer) -> RunRecord {
        RunRecord::new(tool, bench, Subtrack::Realizability, Mode::Sequential, answer)
    }

    fn fixture(wrong: usize) -> (Vec<RunRecord>, BTreeMap<String, Status>) {
        let mut records = Vec::new();
        let mut known = BTreeMap::new();
        for i in 0..10 + wrong {
            let b = format!("b{i}");
            known.insert(b.clone(), Status::Realizable);
            let answer = if i < 10 { Answer::Realizable } else { Answer::Unrealizable };
            records.push(rec("t", &b, answer));
        }
        (records, known)
    }

    #[test]
    fn penalty_arithmetic() {
        let (records, known) = fixture(0);
        assert_eq!(score(&records, &known, &Rules::default()).boards[0].tools[0].points, 10);
        let (records, known) = fixture(1);
        let board = &score(&records, &known, &Rules::default()).boards[0];
        assert_eq!(board.tools[0].points, 6);
        assert!(!board.tools[0].disqualified);
        let rules = Rules { disqualify: true, ..Default::default() };
        let t = &score(&records, &known, &rules).boards[0].tools[0];
        assert!(t.disqualified);
        assert_eq!(t.points, 6);
        assert_eq!(t.rank, None);
    }

    #[test]
    fn boards_split_by_mode() {
        let mut a = rec("t", "b", Answer::Realizable);
        let b = rec("t", "b", Answer::Realizable);
        a.mode = Mode::Parallel;
        let sb = score(&[a, b], &BTreeMap::new(), &Rules::default());
        assert_eq!(sb.boards.len(), 2);
        assert_eq!(sb.boards[0].mode, Mode::Sequential);
    }

    #[test]
    fn hors_concours_listed_unranked() {
        let known = BTreeMap::from([("b".to_string(), Status::Realizable)]);
        let mut legacy = rec("old", "b", Answer::Realizable);
        legacy.hors_concours = true;
        let records = vec![legacy, rec("new", "b", Answer::Timeout), rec("mid", "b", Answer::Realizable)];
        let board = &score(&records, &known, &Rules::default()).boards[0];
        let names: Vec<_> = board.tools.iter().map(|t| (t.tool.as_str(), t.rank)).collect();
        assert_eq!(names, vec![("mid", Some(1)), ("new", Some(2)), ("old", None)]);
    }

    #[test]
    fn ties_share_rank() {
        let known = BTreeMap::from([("b".to_string(), Status::Realizable)]);
        let records = vec![
            rec("a", "b", Answer::Realizable),
            rec("b", "b", Answer::Realizable),
            rec("c", "b", Answer::Crash),
        ];
        let board = &score(&records, &known, &Rules::default()).boards[0];
        let ranks: Vec<_> = board.tools.iter().map(|t| t.rank).collect();
        assert_eq!(ranks, vec![Some(1), Some(1), Some(3)]);
        assert_eq!(board.tools[2].crashes, 1);
    }
}
