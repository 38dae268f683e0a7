use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{adjudicate, HarnessError, Mode, RunRecord, Scoreboard};

pub const RESULTS_HEADER: [&str; 14] = [
    "tool",
    "benchmark",
    "subtrack",
    "mode",
    "answer",
    "cpu_seconds",
    "wall_seconds",
    "exit_code",
    "solution",
    "witness",
    "verdict",
    "verdict_method",
    "fallback_used",
    "and_gates",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn path(p: &Option<PathBuf>) -> String {
    p.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
}

/// One row per record, header always present.
pub fn write_results_csv<W: Write>(out: W, records: &[RunRecord]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in records {
        w.write_record([
            r.tool.clone(),
            r.benchmark.clone(),
            r.subtrack.to_string(),
            r.mode.to_string(),
            r.answer.to_string(),
            format!("{:.3}", r.cpu_seconds),
            format!("{:.3}", r.wall_seconds),
            opt(r.exit_code),
            path(&r.solution),
            path(&r.witness),
            opt(r.verdict.as_ref().map(|v| v.status)),
            opt(r.verdict.as_ref().map(|v| v.method)),
            r.fallback_used.to_string(),
            opt(r.size.map(|s| s.and_gates)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Plain-text ranking, one table per board.
pub fn ranking_table(scoreboard: &Scoreboard) -> String {
    let mut out = String::new();
    for b in &scoreboard.boards {
        let _ = writeln!(out, "== {} / {} ==", b.subtrack, b.mode);
        let _ = writeln!(
            out,
            "{:>4}  {:<24} {:>6} {:>5} {:>8} {:>7} {:>6} {:>8}  notes",
            "rank", "tool", "solved", "wrong", "timeouts", "crashes", "points", "quality"
        );
        for t in &b.tools {
            let mut notes = Vec::new();
            if t.disqualified {
                notes.push("disqualified");
            }
            if t.hors_concours {
                notes.push("hors concours");
            }
            let _ = writeln!(
                out,
                "{:>4}  {:<24} {:>6} {:>5} {:>8} {:>7} {:>6} {:>8.3}  {}",
                t.rank.map(|r| r.to_string()).unwrap_or_else(|| "-".into()),
                t.tool,
                t.solved,
                t.wrong,
                t.timeouts,
                t.crashes,
                t.points,
                t.quality,
                notes.join(", ")
            );
        }
        let flagged: Vec<&str> = b.benchmarks.iter().filter(|x| x.inspect).map(|x| x.benchmark.as_str()).collect();
        if !flagged.is_empty() {
            let _ = writeln!(out, "inspect: {}", flagged.join(", "));
        }
        let fresh: Vec<&str> = b.benchmarks.iter().filter(|x| x.newly_solved).map(|x| x.benchmark.as_str()).collect();
        if !fresh.is_empty() {
            let _ = writeln!(out, "newly solved: {}", fresh.join(", "));
        }
        out.push('\n');
    }
    out
}

/// `(board, tool, k, seconds)`: the tool's k-th fastest correctly solved
/// benchmark on each board, timed by CPU in sequential mode and by wall
/// clock in parallel mode.
pub fn cactus_rows(scoreboard: &Scoreboard, records: &[RunRecord]) -> Vec<(String, String, usize, f64)> {
    let mut rows = Vec::new();
    for b in &scoreboard.boards {
        let mut times: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for bench in &b.benchmarks {
            let recs: Vec<RunRecord> = records
                .iter()
                .filter(|r| r.subtrack == b.subtrack && r.mode == b.mode && r.benchmark == bench.benchmark)
                .cloned()
                .collect();
            let adj = adjudicate(&recs, bench.status);
            for (r, c) in recs.iter().zip(&adj.correct) {
                if *c == Some(true) {
                    let t = if b.mode == Mode::Sequential { r.cpu_seconds } else { r.wall_seconds };
                    times.entry(r.tool.clone()).or_default().push(t);
                }
            }
        }
        for (tool, mut ts) in times {
            ts.sort_by(f64::total_cmp);
            for (k, t) in ts.into_iter().enumerate() {
                rows.push((format!("{}/{}", b.subtrack, b.mode), tool.clone(), k + 1, t));
            }
        }
    }
    rows
}

/// Writes `results.csv`, `scoreboard.json`, `ranking.txt` and `cactus.csv`
/// into `dir`. Returns the written paths.
pub fn report(scoreboard: &Scoreboard, records: &[RunRecord], dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir)?;
    let results = dir.join("results.csv");
    write_results_csv(fs::File::create(&results)?, records)?;

    let board_path = dir.join("scoreboard.json");
    let mut json = serde_json::to_string_pretty(scoreboard)?;
    json.push('\n');
    fs::write(&board_path, json)?;

    let ranking = dir.join("ranking.txt");
    fs::write(&ranking, ranking_table(scoreboard))?;

    let cactus = dir.join("cactus.csv");
    let mut w = csv::Writer::from_path(&cactus)?;
    w.write_record(["board", "tool", "solved", "seconds"])?;
    for (board, tool, k, t) in cactus_rows(scoreboard, records) {
        w.write_record([board, tool, k.to_string(), format!("{t:.3}")])?;
    }
    w.flush()?;
    Ok(vec![results, board_path, ranking, cactus])
}
